"""Symbol -> operator maps on a truncated Fock basis.

Every map returns the exact compression ``P_D Q P_D`` of the untruncated
operator onto the degree-D block: matrix elements are computed in closed form,
so no intermediate state ever leaves the basis.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .fock import FockBasis, FockOperator, coherent_tail, coherent_vector, vacuum_basis
from .symbols import Ordering, PolySymbol, convert_ordering

OrderingTag = Ordering

HERMITIAN_TOL = 1e-12


def _falling_rows(n: np.ndarray, k: Sequence[int]) -> np.ndarray:
    # prod_j n_j (n_j - 1) ... (n_j - k_j + 1), exact integers held in float
    out = np.ones(n.shape[0])
    for j, kj in enumerate(k):
        for r in range(kj):
            out *= n[:, j] - r
    return out


def _term_normal(basis: FockBasis, beta, alpha):
    """Entries of ``(a^dag)^beta a^alpha``: (rows, cols, values)."""
    S = basis.states
    beta, alpha = np.asarray(beta), np.asarray(alpha)
    ok = (S >= alpha).all(axis=1)
    cols = np.flatnonzero(ok)
    mid = S[cols] - alpha
    target = mid + beta
    rows = basis.lookup(target)
    keep = rows >= 0
    cols, rows, mid, target = cols[keep], rows[keep], mid[keep], target[keep]
    vals = np.sqrt(_falling_rows(S[cols], alpha) * _falling_rows(target, beta))
    return rows, cols, vals


def _term_antinormal(basis: FockBasis, beta, alpha):
    """Entries of ``a^alpha (a^dag)^beta``, creators acting first, untruncated in between."""
    S = basis.states
    beta, alpha = np.asarray(beta), np.asarray(alpha)
    up = S + beta
    ok = (up >= alpha).all(axis=1)
    cols = np.flatnonzero(ok)
    up = up[cols]
    rows = basis.lookup(up - alpha)
    keep = rows >= 0
    cols, rows, up = cols[keep], rows[keep], up[keep]
    vals = np.sqrt(_falling_rows(up, beta) * _falling_rows(up, alpha))
    return rows, cols, vals


def _assemble(p: PolySymbol, basis: FockBasis, term_fn) -> FockOperator:
    if p.n_modes != basis.n_modes:
        raise ValueError(f"symbol has {p.n_modes} modes, basis has {basis.n_modes}")
    n = len(basis)
    hermitian = p.is_real_diagonal(HERMITIAN_TOL)
    rows_all, cols_all, vals_all = [], [], []
    done = set()
    for (beta, alpha), c in p.terms.items():
        c = complex(c)
        if hermitian:
            if (beta, alpha) in done:
                continue
            done.add((alpha, beta))
            done.add((beta, alpha))
        r, k, v = term_fn(basis, beta, alpha)
        if hermitian and beta == alpha:
            rows_all.append(r)
            cols_all.append(k)
            vals_all.append(v * c.real + 0j)
        elif hermitian:
            # pair the mirrored term so the matrix is Hermitian by construction
            mirror = complex(p.terms.get((alpha, beta), 0))
            cc = 0.5 * (c + mirror.conjugate())
            rows_all += [r, k]
            cols_all += [k, r]
            vals_all += [v * cc, v * cc.conjugate()]
        else:
            rows_all.append(r)
            cols_all.append(k)
            vals_all.append(v * c)
    if rows_all:
        rows = np.concatenate(rows_all)
        cols = np.concatenate(cols_all)
        vals = np.concatenate(vals_all)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0, dtype=complex)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    if hermitian:
        # duplicate sums are order dependent; enforce bitwise symmetry on the final pattern
        upper = sp.triu(mat, k=1)
        diag = sp.diags(mat.diagonal().real.astype(complex))
        mat = (upper + upper.getH() + diag).tocsr()
    return FockOperator(basis, mat, hermitian)


def quantize(p: PolySymbol, tag, basis: FockBasis) -> FockOperator:
    """Operator with symbol ``p`` in ordering ``tag``, compressed to ``basis``."""
    tag = Ordering(tag)
    if tag is Ordering.NORMAL:
        return _assemble(p, basis, _term_normal)
    if tag is Ordering.ANTINORMAL:
        return _assemble(p, basis, _term_antinormal)
    return _assemble(convert_ordering(p, Ordering.WEYL, Ordering.NORMAL), basis, _term_normal)


def toeplitz_quantize(p: PolySymbol, basis: FockBasis) -> FockOperator:
    """Berezin-Toeplitz operator: multiply by ``p``, project back onto holomorphic states.

    The holomorphic variable is ``z*`` (multiplication by ``z*`` creates). The
    product ``p * e_delta`` lives in the enlarged space of degree
    ``D + deg p``; its projection onto ``e_gamma`` is the Gaussian moment
    ``<w^gamma, w^(beta+delta) conj(w)^alpha> = delta(gamma+alpha, beta+delta) (beta+delta)!``.
    """
    if p.n_modes != basis.n_modes:
        raise ValueError(f"symbol has {p.n_modes} modes, basis has {basis.n_modes}")
    top = basis.max_degree + p.degree
    log_fact = np.array([math.lgamma(k + 1) for k in range(top + 1)])
    S = basis.states
    n = len(basis)
    hermitian = p.is_real_diagonal(HERMITIAN_TOL)
    mat = sp.csr_matrix((n, n), dtype=complex)
    for (beta, alpha), c in p.terms.items():
        enlarged = S + np.asarray(beta)  # monomial degrees of p * e_delta in the holomorphic variable
        gamma = enlarged - np.asarray(alpha)
        rows = basis.lookup(gamma)
        keep = rows >= 0
        cols = np.flatnonzero(keep)
        moment = log_fact[enlarged[cols]].sum(axis=1)
        norm = 0.5 * (log_fact[S[cols]].sum(axis=1) + log_fact[gamma[cols]].sum(axis=1))
        vals = complex(c) * np.exp(moment - norm)
        mat = mat + sp.csr_matrix((vals, (rows[keep], cols)), shape=(n, n))
    if hermitian:
        mat = (0.5 * (mat + mat.getH())).tocsr()
        upper = sp.triu(mat, k=1)
        mat = (upper + upper.getH() + sp.diags(mat.diagonal().real.astype(complex))).tocsr()
    return FockOperator(basis, mat, hermitian)


def galerkin_compress(Q: FockOperator, keep: Iterable[int]) -> FockOperator:
    """Compress onto states supported on the kept modes (others in their vacuum).

    The returned operator lives on the basis of the kept modes, in the same
    graded order as :func:`~ymgap.fock.enumerate_basis`.
    """
    basis = Q.basis
    keep = sorted(set(int(k) for k in keep))
    if any(not 0 <= k < basis.n_modes for k in keep):
        raise IndexError("mode subset out of range")
    dropped = [j for j in range(basis.n_modes) if j not in set(keep)]
    mask = (basis.states[:, dropped] == 0).all(axis=1) if dropped else np.ones(len(basis), bool)
    idx = np.flatnonzero(mask)
    if keep:
        sub = FockBasis(len(keep), basis.max_degree, basis.states[np.ix_(idx, keep)])
    else:
        sub = vacuum_basis(basis.max_degree)
    mat = Q.matrix[idx][:, idx].tocsr()
    return FockOperator(sub, mat, Q.hermitian)


def coherent_matrix_element(Q: FockOperator, zeta, eta, tol: float = 1e-10) -> complex:
    """``<e^zeta | Q | e^eta>`` with truncated exponential vectors.

    Raises ``ValueError`` if either vector's discarded tail exceeds ``tol``.
    """
    D = Q.basis.max_degree
    for v in (zeta, eta):
        tail = coherent_tail(v, D)
        if tail > tol:
            raise ValueError(f"coherent vector tail {tail:.3e} above tolerance {tol:.1e} at D={D}")
    u = coherent_vector(Q.basis, zeta)
    w = coherent_vector(Q.basis, eta)
    return complex(np.vdot(u, Q.matrix @ w))


def truncation_safe_window(basis: FockBasis, degree: int) -> np.ndarray:
    """Positions of states of degree ``<= D - degree``, where compressed products stay exact."""
    return basis.degree_window(basis.max_degree - degree)
