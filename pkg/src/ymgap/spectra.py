"""Eigenvalue extraction and spectral experiments on quantized energy operators."""
from __future__ import annotations

import csv
import heapq
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import FockOperator, enumerate_basis, number_operator
from .quantize import galerkin_compress, quantize
from .symbols import Ordering, PolySymbol, restrict_modes
from .yangmills import algebra_by_name, build_mode_basis, energy_functional

DENSE_THRESHOLD = 2000
RESIDUAL_TOL = 1e-8


class EigenSolverError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass
class EigenResult:
    values: np.ndarray
    residuals: np.ndarray
    solver: str
    norm: float
    vectors: np.ndarray | None = field(default=None, repr=False)


def _operator_matrix(Q: FockOperator):
    mat = Q.matrix
    if mat.nnz == 0 or not np.any(mat.data.imag):
        return mat.real.tocsr()
    return mat


def eigen_smallest(
    Q: FockOperator,
    k: int,
    solver: str = "auto",
    dense_threshold: int = DENSE_THRESHOLD,
    residual_tol: float = RESIDUAL_TOL,
    return_vectors: bool = False,
) -> EigenResult:
    """The ``k`` smallest eigenvalues of a Hermitian operator, ascending.

    ``solver`` is ``dense`` (LAPACK), ``iterative`` (implicitly restarted
    Lanczos via ARPACK) or ``auto``. Residuals ``|Qv - lam v|`` are checked against
    ``residual_tol * |Q|_1`` (the 1-norm bounds the spectral norm from above).
    """
    if not Q.hermitian:
        raise ValueError("eigen_smallest needs a Hermitian-flagged operator")
    n = Q.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for an operator of size {n}")
    mat = _operator_matrix(Q)
    if solver == "auto":
        solver = "dense" if n <= dense_threshold else "iterative"
    if solver == "iterative" and k + 6 >= n:
        solver = "dense"
    if solver == "dense":
        w, v = sla.eigh(mat.toarray(), subset_by_index=[0, k - 1])
    elif solver == "iterative":
        # a few spare Ritz pairs so degenerate clusters at the cutoff are resolved
        extra = min(n - 2, k + 6)
        v0 = np.ones(n) / math.sqrt(n)
        w, v = spla.eigsh(mat, k=extra, which="SA", tol=1e-13, v0=v0, ncv=min(n, max(2 * extra + 1, 40)))
        order = np.argsort(w)[:k]
        w, v = w[order], v[:, order]
    else:
        raise ValueError(f"unknown solver {solver!r}")
    norm = float(spla.norm(mat, 1)) if mat.nnz else 0.0
    res = np.linalg.norm(mat @ v - v * w, axis=0)
    worst = float(res.max()) if len(res) else 0.0
    if worst > residual_tol * max(norm, 1.0):
        raise EigenSolverError(f"eigensolver residual {worst:.3e} above tolerance", worst)
    return EigenResult(w, res, solver, norm, v if return_vectors else None)


# ---------------------------------------------------------------------------
# Yang-Mills spectra


@dataclass(frozen=True)
class SpectrumConfig:
    algebra: str = "su2"
    L: float = 1.0
    kmax: int = 0
    D: int = 6
    k: int = 10
    ordering: str = "antinormal"
    form: str = "reduced"
    modes: tuple[int, ...] | None = None  # subset of mode variables; None keeps all
    solver: str = "auto"

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.kmax < 0 or self.D < 0 or self.k < 1:
            raise ValueError("kmax, D must be >= 0 and k >= 1")
        Ordering(self.ordering)


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    metadata: dict

    @property
    def gap_bottom(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap_first(self) -> float:
        if len(self.eigenvalues) < 2:
            return float("nan")
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def ym_symbol(config: SpectrumConfig) -> PolySymbol:
    algebra = algebra_by_name(config.algebra)
    modes = build_mode_basis(config.L, config.kmax, algebra)
    keep = None if config.modes is None else sorted(config.modes)
    return energy_functional(modes, config.form).to_symbol(keep)


def ym_operator(config: SpectrumConfig) -> FockOperator:
    p = ym_symbol(config)
    return quantize(p, config.ordering, enumerate_basis(p.n_modes, config.D))


def ym_spectrum(config: SpectrumConfig) -> SpectrumReport:
    """Energy polynomial -> quantization -> smallest eigenvalues."""
    t0 = time.perf_counter()
    p = ym_symbol(config)
    t1 = time.perf_counter()
    basis = enumerate_basis(p.n_modes, config.D)
    Q = quantize(p, config.ordering, basis)
    t2 = time.perf_counter()
    k = min(config.k, len(basis))
    res = eigen_smallest(Q, k, solver=config.solver)
    t3 = time.perf_counter()
    meta = {
        "algebra": config.algebra,
        "L": config.L,
        "kmax": config.kmax,
        "D": config.D,
        "n_modes": p.n_modes,
        "basis_size": len(basis),
        "ordering": Ordering(config.ordering).value,
        "form": config.form,
        "solver": res.solver,
        "timings": {"symbol": t1 - t0, "quantize": t2 - t1, "eigensolve": t3 - t2},
    }
    return SpectrumReport(res.values, res.residuals, meta)


# ---------------------------------------------------------------------------
# closed-form oscillator levels


def oscillator_levels(x_weights, y_weights, ordering: str = "antinormal", count: int = 10) -> np.ndarray:
    """Lowest exact levels of ``sum_m (a_m x_m^2 + b_m y_m^2)`` quantized in ``ordering``.

    With ``[x, y] = i`` each mode has Weyl levels ``2 sqrt(a b)(n + 1/2)``; normal and
    anti-normal quantization shift them by ``-(a + b)/2`` and ``+(a + b)/2``.
    Every weight must be positive (a zero weight gives continuous spectrum).
    """
    a = np.asarray(x_weights, float)
    b = np.asarray(y_weights, float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("oscillator weights must be positive")
    omega = 2 * np.sqrt(a * b)
    sign = {"normal": -1.0, "weyl": 0.0, "antinormal": 1.0}[Ordering(ordering).value]
    base = float(np.sum(omega / 2 + sign * (a + b) / 2))
    # best-first enumeration over occupation vectors
    start = (0,) * len(a)
    heap = [(0.0, start)]
    seen = {start}
    out = []
    while heap and len(out) < count:
        e, occ = heapq.heappop(heap)
        out.append(base + e)
        for j in range(len(a)):
            nxt = occ[:j] + (occ[j] + 1,) + occ[j + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (e + omega[j], nxt))
    return np.array(out)


def quadratic_weights(config: SpectrumConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-variable weights ``(a_m, b_m)`` of ``a x^2 + b y^2`` for a quadratic energy.

    Valid when the kept variables are decoupled (abelian algebra); the
    quadratic form in ``A`` is diagonal on the transverse Fourier basis.
    """
    algebra = algebra_by_name(config.algebra)
    modes = build_mode_basis(config.L, config.kmax, algebra)
    ef = energy_functional(modes, config.form)
    keep = list(range(modes.n_modes)) if config.modes is None else sorted(config.modes)
    quad = ef.quadratic_matrix(keep)
    if np.abs(quad - np.diag(np.diag(quad))).max() > 1e-12 * max(1.0, np.abs(quad).max()):
        raise ValueError("quadratic part is not diagonal on the kept modes")
    # A = sqrt(L) x,  E = y / sqrt(L)
    a = np.diag(quad) * config.L
    b = np.full(len(keep), 0.5 / config.L)
    return a, b


# ---------------------------------------------------------------------------
# experiments


@dataclass
class MonotonicityTable:
    subset_sizes: list[int]
    eigenvalues: np.ndarray  # (n_subsets, k)
    route: str

    def increments(self) -> np.ndarray:
        return np.diff(self.eigenvalues, axis=0)

    def is_nondecreasing(self, slack: float = 1e-9) -> bool:
        return bool(np.all(self.increments() >= -slack))


def galerkin_monotonicity(
    config: SpectrumConfig, subsets: Sequence[Sequence[int]], route: str = "restrict"
) -> MonotonicityTable:
    """Lowest eigenvalues along nested mode subsets.

    ``restrict``: quantize the cylindrical symbol (dropped variables set to 0) on
    each subset, i.e. the quantized Galerkin sequence. ``compress``: compress the
    operator of the largest subset onto each smaller one.
    """
    subsets = [sorted(set(s)) for s in subsets]
    for small, big in zip(subsets, subsets[1:]):
        if not set(small) <= set(big):
            raise ValueError("mode subsets must be nested")
    full = ym_symbol(replace(config, modes=None))
    rows = []
    if route == "restrict":
        for keep in subsets:
            p = restrict_modes(full, keep)
            Q = quantize(p, config.ordering, enumerate_basis(len(keep), config.D))
            rows.append(eigen_smallest(Q, min(config.k, Q.shape[0]), solver=config.solver).values)
    elif route == "compress":
        top = subsets[-1]
        Q_top = quantize(restrict_modes(full, top), config.ordering, enumerate_basis(len(top), config.D))
        for keep in subsets:
            local = [top.index(m) for m in keep]
            Q = galerkin_compress(Q_top, local)
            rows.append(eigen_smallest(Q, min(config.k, Q.shape[0]), solver=config.solver).values)
    else:
        raise ValueError(f"unknown route {route!r}")
    k = min(len(r) for r in rows)
    return MonotonicityTable([len(s) for s in subsets], np.array([r[:k] for r in rows]), route)


@dataclass
class EllipticityResult:
    constant: float
    generalized: float  # smallest generalized eigenvalue of (M, N) when N > 0
    iterations: int


def _generalized_bottom(M: FockOperator, N: FockOperator) -> float:
    # smallest lam with M v = lam N v, for positive definite N
    off = N.matrix - sp.diags(N.matrix.diagonal())
    diag = N.matrix.diagonal().real
    if off.count_nonzero() == 0:
        if np.any(diag <= 0):
            return float("nan")
        s = sp.diags(1 / np.sqrt(diag))
        mat = (s @ M.matrix @ s).tocsr()
        upper = sp.triu(mat, k=1)
        mat = (upper + upper.getH() + sp.diags(mat.diagonal().real.astype(complex))).tocsr()
        return float(eigen_smallest(FockOperator(M.basis, mat, True), 1).values[0])
    if M.shape[0] <= DENSE_THRESHOLD:
        try:
            return float(sla.eigh(M.toarray(), N.toarray(), eigvals_only=True)[0])
        except np.linalg.LinAlgError:
            return float("nan")
    return float("nan")


def ellipticity_constant(
    M: FockOperator, N: FockOperator, slack: float = 1e-9, rel_tol: float = 1e-10, max_iter: int = 200
) -> EllipticityResult:
    """Largest ``C >= 0`` with ``min eig(M - C N) >= -slack``, by bisection.

    Cross-checked against the smallest generalized eigenvalue of ``M v = lam N v``
    when ``N`` is positive definite. Returns 0 if no positive ``C`` certifies.
    """
    if not (M.hermitian and N.hermitian):
        raise ValueError("both operators must be Hermitian")
    if M.shape != N.shape:
        raise ValueError("operators live on different bases")

    def ok(c: float) -> bool:
        op = FockOperator(M.basis, (M.matrix - c * N.matrix).tocsr(), True)
        return eigen_smallest(op, 1).values[0] >= -slack

    generalized = _generalized_bottom(M, N)
    if not ok(0.0):
        return EllipticityResult(0.0, generalized, 0)
    lo, hi = 0.0, 1.0
    it = 0
    if math.isfinite(generalized) and generalized > 0:
        # tight bracket around the generalized eigenvalue when it brackets correctly
        a, b = generalized * (1 - 1e-7), generalized * (1 + 1e-7)
        it += 2
        if ok(a) and not ok(b):
            lo, hi = a, b
    while ok(hi):
        lo, hi = hi, 2 * hi
        it += 1
        if hi > 1e12:
            return EllipticityResult(float("inf"), generalized, it)
    while hi - lo > rel_tol * max(hi, 1e-300) and it < max_iter:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        it += 1
    return EllipticityResult(lo, generalized, it)


def ym_ellipticity(config: SpectrumConfig) -> tuple[EllipticityResult, dict]:
    """Ellipticity of the quantized energy against the shifted number operator ``N + 1``."""
    M = ym_operator(config)
    N = number_operator(M.basis, shifted=True)
    result = ellipticity_constant(M, N)
    meta = {"algebra": config.algebra, "L": config.L, "kmax": config.kmax, "D": config.D,
            "n_modes": M.basis.n_modes, "basis_size": len(M.basis), "ordering": config.ordering}
    return result, meta


@dataclass
class ScalingTable:
    L_values: list[float]
    products: np.ndarray  # (n_L, k): lambda_n(L) * L

    def max_relative_deviation(self) -> float:
        ref = self.products[0]
        scale = np.maximum(np.abs(ref), 1e-300)
        return float((np.abs(self.products - ref) / scale).max())


def scaling_study(config: SpectrumConfig, L_values: Sequence[float]) -> ScalingTable:
    rows = [ym_spectrum(replace(config, L=float(L))).eigenvalues * float(L) for L in L_values]
    k = min(len(r) for r in rows)
    return ScalingTable([float(L) for L in L_values], np.array([r[:k] for r in rows]))


@dataclass
class ConvergenceTable:
    D_values: list[int]
    eigenvalues: np.ndarray  # (n_D, k)
    timings: list[float]

    def relative_changes(self) -> np.ndarray:
        """``|lam(D_{i+1}) - lam(D_i)| / |lam(D_{i+1})|`` for successive cutoffs."""
        ev = self.eigenvalues
        return np.abs(np.diff(ev, axis=0)) / np.maximum(np.abs(ev[1:]), 1e-300)


def convergence_study(config: SpectrumConfig, D_values: Sequence[int]) -> ConvergenceTable:
    rows, times = [], []
    for D in D_values:
        t0 = time.perf_counter()
        rows.append(ym_spectrum(replace(config, D=int(D))).eigenvalues)
        times.append(time.perf_counter() - t0)
    k = min(len(r) for r in rows)
    return ConvergenceTable([int(D) for D in D_values], np.array([r[:k] for r in rows]), times)


# ---------------------------------------------------------------------------
# report files


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_to_csv(header: dict, columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    """CSV text with ``# key=value`` header lines; floats written with ``repr``."""
    buf = io.StringIO()
    for key, val in header.items():
        buf.write(f"# {key}={_fmt(val)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(float(v)) if isinstance(v, (np.floating,)) else _fmt(v) for v in row])
    return buf.getvalue()


def report_rows(report: SpectrumReport) -> tuple[list[str], list[list]]:
    meta = report.metadata
    cols = ["n", "eigenvalue", "residual", "algebra", "L", "kmax", "D", "n_modes", "ordering"]
    rows = [
        [i + 1, float(ev), float(r), meta["algebra"], float(meta["L"]), meta["kmax"], meta["D"], meta["n_modes"], meta["ordering"]]
        for i, (ev, r) in enumerate(zip(report.eigenvalues, report.residuals))
    ]
    return cols, rows


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return to_jsonable(asdict(obj))
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
