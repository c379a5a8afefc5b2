"""Degree-truncated bosonic Fock space in the normalized monomial basis.

States are multi-indices ``alpha`` (occupation numbers) with ``|alpha| <= D``;
the basis vector for ``alpha`` is the Bargmann monomial ``z**alpha / sqrt(alpha!)``.
Ordering is graded lexicographic with the vacuum first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sp

MultiIndex = tuple[int, ...]


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    # first entry descending, so (1,0) precedes (0,1)
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class FockBasis:
    """Ordered list of multi-indices with total degree at most ``max_degree``."""

    def __init__(self, n_modes: int, max_degree: int, states: np.ndarray):
        states = np.asarray(states, dtype=np.int64)
        states = states.reshape(len(states), n_modes) if n_modes == 0 else states.reshape(-1, n_modes)
        states.setflags(write=False)
        self.n_modes = int(n_modes)
        self.max_degree = int(max_degree)
        self.states = states
        self.degrees = states.sum(axis=1)
        self.degrees.setflags(write=False)
        self._radix = max_degree + 1
        if n_modes * math.log2(self._radix) >= 62:
            raise ValueError("basis too large for integer state keys")
        self._weights = self._radix ** np.arange(n_modes, dtype=np.int64)
        keys = states @ self._weights
        self._order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._order]

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def size(self) -> int:
        return len(self)

    @property
    def index_list(self) -> list[MultiIndex]:
        return [tuple(int(v) for v in row) for row in self.states]

    def __repr__(self) -> str:
        return f"FockBasis(n_modes={self.n_modes}, D={self.max_degree}, size={len(self)})"

    def lookup(self, targets: np.ndarray) -> np.ndarray:
        """Positions of rows of ``targets`` in the basis; -1 where absent."""
        targets = np.asarray(targets, dtype=np.int64).reshape(-1, self.n_modes)
        out = np.full(targets.shape[0], -1, dtype=np.int64)
        ok = (targets >= 0).all(axis=1) & (targets.sum(axis=1) <= self.max_degree)
        if not ok.any():
            return out
        keys = targets[ok] @ self._weights
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        found = self._sorted_keys[pos] == keys
        idx = np.where(found, self._order[pos], -1)
        out[ok] = idx
        return out

    def index(self, alpha: Sequence[int]) -> int:
        pos = int(self.lookup(np.array([alpha]))[0])
        if pos < 0:
            raise KeyError(tuple(alpha))
        return pos

    def degree_window(self, max_degree: int) -> np.ndarray:
        """Positions of states with degree <= ``max_degree``."""
        return np.flatnonzero(self.degrees <= max_degree)


def enumerate_basis(n_modes: int, D: int) -> FockBasis:
    """All multi-indices with ``|alpha| <= D`` in graded lexicographic order."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if D < 0:
        raise ValueError("max degree must be >= 0")
    rows = [c for d in range(D + 1) for c in _compositions(d, n_modes)]
    return FockBasis(n_modes, D, np.array(rows, dtype=np.int64))


def vacuum_basis(D: int = 0) -> FockBasis:
    """The one-state basis left after compressing onto no modes."""
    return FockBasis(0, D, np.zeros((1, 0), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Sparse matrix of an operator on a truncated Fock basis."""

    basis: FockBasis
    matrix: sp.csr_matrix
    hermitian: bool = False

    def __post_init__(self):
        n = len(self.basis)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis size {n}")
        if self.hermitian:
            diff = self.matrix - self.matrix.getH()
            if diff.nnz and abs(diff).max() != 0:
                raise ValueError("hermitian flag set on a non-Hermitian matrix")

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dagger(self) -> "FockOperator":
        return FockOperator(self.basis, self.matrix.getH().tocsr(), self.hermitian)

    def _check(self, other: "FockOperator"):
        if other.basis is not self.basis and (
            other.basis.n_modes != self.basis.n_modes or len(other.basis) != len(self.basis)
        ):
            raise ValueError("operators live on different bases")

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return FockOperator(self.basis, (self.matrix @ other.matrix).tocsr())
        return self.matrix @ other

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(
            self.basis, (self.matrix + other.matrix).tocsr(), self.hermitian and other.hermitian
        )

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(
            self.basis, (self.matrix - other.matrix).tocsr(), self.hermitian and other.hermitian
        )

    def __mul__(self, scalar) -> "FockOperator":
        herm = self.hermitian and np.isreal(scalar)
        return FockOperator(self.basis, (self.matrix * scalar).tocsr(), bool(herm))

    __rmul__ = __mul__


def _check_mode(basis: FockBasis, j: int):
    if not 0 <= j < basis.n_modes:
        raise IndexError(f"mode {j} out of range for {basis.n_modes} modes")


def creation_matrix(basis: FockBasis, j: int) -> FockOperator:
    """a_j^dagger; transitions leaving the degree-D block are dropped."""
    _check_mode(basis, j)
    target = basis.states.copy()
    target[:, j] += 1
    rows = basis.lookup(target)
    cols = np.arange(len(basis))
    keep = rows >= 0
    vals = np.sqrt(basis.states[keep, j] + 1.0)
    n = len(basis)
    mat = sp.csr_matrix((vals, (rows[keep], cols[keep])), shape=(n, n), dtype=complex)
    return FockOperator(basis, mat)


def annihilation_matrix(basis: FockBasis, j: int) -> FockOperator:
    return creation_matrix(basis, j).dagger()


def number_operator(basis: FockBasis, shifted: bool = False) -> FockOperator:
    """Diagonal total number operator.

    ``shifted=True`` gives ``N + 1``, whose spectrum starts at the simple
    eigenvalue 1 on the vacuum.
    """
    diag = basis.degrees.astype(float) + (1.0 if shifted else 0.0)
    return FockOperator(basis, sp.diags(diag.astype(complex), format="csr"), hermitian=True)


def coherent_vector(basis: FockBasis, zeta) -> np.ndarray:
    """Truncated exponential vector: component ``zeta**alpha / sqrt(alpha!)``, unnormalized."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if zeta.shape != (basis.n_modes,):
        raise ValueError("one complex amplitude per mode required")
    if not np.all(np.isfinite(zeta)):
        raise ValueError("non-finite amplitude")
    log_fact = np.array([math.lgamma(k + 1) for k in range(basis.max_degree + 1)])
    norm = np.exp(-0.5 * log_fact[basis.states].sum(axis=1))
    powers = np.prod(zeta[None, :] ** basis.states, axis=1)
    return powers * norm


def coherent_tail(zeta, D: int) -> float:
    """Norm of the part of the exponential vector above degree D."""
    r2 = float(np.sum(np.abs(np.atleast_1d(zeta)) ** 2))
    total = 0.0
    term = r2 ** (D + 1) / math.factorial(D + 1) if r2 > 0 else 0.0
    k = D + 1
    while term > 0 and term > 1e-300:
        total += term
        k += 1
        term *= r2 / k
        if term < total * 1e-18:
            break
    return math.sqrt(total)
