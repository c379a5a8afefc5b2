"""Gauge algebras, gauged vector calculus on a periodic grid, transverse field
modes, and the classical energy functional as a polynomial symbol.

Field arrays use the layout ``(3, dim, n, n, n)`` for Lie-algebra valued
vector fields and ``(dim, n, n, n)`` for scalar fields. Brackets are taken in a
trace-orthonormal basis, so the Lie-algebra dot product is the Euclidean one.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft as sp_fft

from .symbols import PolySymbol, laplacian

# B = curl a - BRACKET_WEIGHT * [a x, a] is the magnetic field of the curvature
# F_jk = d_j a_k - d_k a_j - [a_j, a_k] (B_i = eps_ijk F_jk / 2).
BRACKET_WEIGHT = 0.5

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    LEVI_CIVITA[_i, _j, _k] = np.linalg.det(np.eye(3)[[_i, _j, _k]])


# ---------------------------------------------------------------------------
# gauge algebras


@dataclass(frozen=True, eq=False)
class GaugeAlgebra:
    """Real Lie algebra given by ``f[k, i, j] = [b_i, b_j] . b_k``."""

    name: str
    structure_constants: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.structure_constants, dtype=float)
        object.__setattr__(self, "structure_constants", f)
        if f.ndim != 3 or len(set(f.shape)) != 1:
            raise ValueError("structure constants must be a dim^3 tensor")
        scale = max(1.0, np.abs(f).max())
        if self.antisymmetry_residual() > 1e-12 * scale:
            raise ValueError(f"{self.name}: structure constants not totally antisymmetric")
        if self.jacobi_residual() > 1e-12 * scale**2:
            raise ValueError(f"{self.name}: Jacobi identity violated")

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @property
    def is_abelian(self) -> bool:
        return not np.any(self.structure_constants)

    def antisymmetry_residual(self) -> float:
        f = self.structure_constants
        return max(
            np.abs(f + f.transpose(0, 2, 1)).max(),
            np.abs(f + f.transpose(1, 0, 2)).max(),
            np.abs(f + f.transpose(2, 1, 0)).max(),
        )

    def jacobi_residual(self) -> float:
        f = self.structure_constants
        # [b_i, [b_j, b_k]] + cyclic, component l
        t = np.einsum("mjk,lim->lijk", f, f)
        return float(np.abs(t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)).max())

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Pointwise ``[x, y]``; color is the leading axis of both arrays."""
        return np.einsum("kij,i...,j...->k...", self.structure_constants, x, y)

    def scaled(self, lam: float) -> "GaugeAlgebra":
        return GaugeAlgebra(f"{self.name}*{lam:g}", lam * self.structure_constants)


def _structure_from_matrices(mats: Sequence[np.ndarray]) -> np.ndarray:
    mats = [np.asarray(m, dtype=complex) for m in mats]
    dim = len(mats)
    gram = np.array([[np.trace(a.conj().T @ b).real for b in mats] for a in mats])
    if not np.allclose(gram, np.eye(dim), atol=1e-14):
        raise ValueError("basis is not trace-orthonormal")
    f = np.zeros((dim, dim, dim))
    for i, j, k in itertools.product(range(dim), repeat=3):
        comm = mats[i] @ mats[j] - mats[j] @ mats[i]
        f[k, i, j] = np.trace(mats[k].conj().T @ comm).real
    f[np.abs(f) < 1e-15] = 0.0
    return f


def su2_algebra() -> GaugeAlgebra:
    """su(2) in the basis ``b_i = -i sigma_i / sqrt(2)``."""
    sigma = [
        np.array([[0, 1], [1, 0]]),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]]),
    ]
    return GaugeAlgebra("su2", _structure_from_matrices([-1j * s / math.sqrt(2) for s in sigma]))


def su3_algebra() -> GaugeAlgebra:
    """su(3) in the basis ``b_a = -i lambda_a / sqrt(2)`` (Gell-Mann matrices)."""
    s3 = 1 / math.sqrt(3)
    gm = [
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
        [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
        [[s3, 0, 0], [0, s3, 0], [0, 0, -2 * s3]],
    ]
    return GaugeAlgebra("su3", _structure_from_matrices([-1j * np.array(m) / math.sqrt(2) for m in gm]))


def abelian_algebra(dim: int = 3) -> GaugeAlgebra:
    return GaugeAlgebra(f"abelian{dim}", np.zeros((dim, dim, dim)))


def algebra_by_name(name: str) -> GaugeAlgebra:
    if name == "su2":
        return su2_algebra()
    if name == "su3":
        return su3_algebra()
    if name.startswith("abelian"):
        rest = name[len("abelian"):]
        return abelian_algebra(int(rest) if rest else 3)
    raise ValueError(f"unknown algebra {name!r}")


# ---------------------------------------------------------------------------
# periodic grid and gauged calculus


class Lattice:
    """Periodic ``n^3`` grid of side ``L`` with spectral derivatives."""

    def __init__(self, n: int, L: float, algebra: GaugeAlgebra):
        self.n = int(n)
        self.L = float(L)
        self.algebra = algebra
        freq = np.fft.fftfreq(self.n, d=1.0 / self.n)
        rfreq = np.fft.rfftfreq(self.n, d=1.0 / self.n)
        if self.n % 2 == 0:
            # Nyquist derivative dropped: keeps d real and skew
            freq[self.n // 2] = 0.0
            rfreq[-1] = 0.0
        k1 = 2 * np.pi / self.L * freq
        kr = 2 * np.pi / self.L * rfreq
        self.k = np.array(np.meshgrid(k1, k1, kr, indexing="ij"))
        self.k2 = (self.k**2).sum(axis=0)

    @property
    def cell_volume(self) -> float:
        return (self.L / self.n) ** 3

    @property
    def volume(self) -> float:
        return self.L**3

    def positions(self) -> np.ndarray:
        x = np.arange(self.n) * self.L / self.n
        return np.array(np.meshgrid(x, x, x, indexing="ij"))

    def vector_zeros(self) -> np.ndarray:
        return np.zeros((3, self.algebra.dim, self.n, self.n, self.n))

    def scalar_zeros(self) -> np.ndarray:
        return np.zeros((self.algebra.dim, self.n, self.n, self.n))

    def _check(self, u: np.ndarray):
        if u.shape[-3:] != (self.n,) * 3:
            raise ValueError(f"field grid {u.shape[-3:]} does not match lattice n={self.n}")

    def fft(self, u):
        """Real-to-half-complex transform over the three grid axes."""
        return sp_fft.rfftn(u, axes=(-3, -2, -1), workers=-1)

    def ifft(self, u):
        return sp_fft.irfftn(u, s=(self.n,) * 3, axes=(-3, -2, -1), workers=-1)

    def deriv(self, u: np.ndarray, axis: int) -> np.ndarray:
        self._check(u)
        return self.ifft(1j * self.k[axis] * self.fft(u))

    def grad(self, u: np.ndarray) -> np.ndarray:
        uh = self.fft(u)
        return np.array([self.ifft(1j * self.k[i] * uh) for i in range(3)])

    def div(self, b: np.ndarray) -> np.ndarray:
        self._check(b)
        return self.ifft(sum(1j * self.k[i] * self.fft(b[i]) for i in range(3)))

    def curl(self, b: np.ndarray) -> np.ndarray:
        self._check(b)
        bh = [self.fft(b[i]) for i in range(3)]
        k = self.k
        return np.array(
            [
                self.ifft(1j * (k[1] * bh[2] - k[2] * bh[1])),
                self.ifft(1j * (k[2] * bh[0] - k[0] * bh[2])),
                self.ifft(1j * (k[0] * bh[1] - k[1] * bh[0])),
            ]
        )

    def bracket(self, x, y):
        return self.algebra.bracket(x, y)

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        """L2 product over the box (sum over all components)."""
        return float(np.sum(x * y) * self.cell_volume)

    def integrate(self, density: np.ndarray) -> float:
        return float(np.sum(density) * self.cell_volume)

    def random_field(self, rng, shape=(3,), kcut: int = 2, amplitude: float = 1.0) -> np.ndarray:
        """Smooth random real field with Fourier support ``|m|_inf <= kcut``."""
        u = rng.normal(size=tuple(shape) + (self.algebra.dim,) + (self.n,) * 3)
        uh = self.fft(u)
        m = np.abs(np.fft.fftfreq(self.n, d=1.0 / self.n))
        mr = np.fft.rfftfreq(self.n, d=1.0 / self.n)
        mx = np.maximum.reduce(np.meshgrid(m, m, mr, indexing="ij"))
        uh *= mx <= min(kcut, (self.n - 1) // 2)
        out = self.ifft(uh)
        return amplitude * out / max(np.abs(out).max(), 1e-300)


def cross_bracket(lat: Lattice, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``[a x, b]_i = eps_ijk [a_j, b_k]``."""
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for i, j, k in itertools.permutations(range(3)):
        out[i] += LEVI_CIVITA[i, j, k] * lat.bracket(a[j], b[k])
    return out


def dot_bracket(lat: Lattice, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``[a; b] = sum_k [a_k, b_k]``."""
    return sum(lat.bracket(a[k], b[k]) for k in range(3))


def gauged_grad(lat: Lattice, a: np.ndarray, u: np.ndarray) -> np.ndarray:
    return lat.grad(u) - np.array([lat.bracket(a[k], u) for k in range(3)])


def gauged_div(lat: Lattice, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return lat.div(b) - dot_bracket(lat, a, b)


def gauged_curl(lat: Lattice, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return lat.curl(b) - cross_bracket(lat, a, b)


def gauged_laplacian(lat: Lattice, a: np.ndarray, u: np.ndarray) -> np.ndarray:
    return gauged_div(lat, a, gauged_grad(lat, a, u))


def transverse_projector(lat: Lattice, b: np.ndarray) -> np.ndarray:
    """Remove the longitudinal Fourier part; constant components are kept."""
    lat._check(b)
    bh = np.array([lat.fft(b[i]) for i in range(3)])
    k2 = np.where(lat.k2 > 0, lat.k2, 1.0)
    kb = sum(lat.k[i] * bh[i] for i in range(3))
    out = np.array([bh[i] - lat.k[i] * kb / k2 for i in range(3)])
    return np.array([lat.ifft(out[i]) for i in range(3)])


def magnetic_field(lat: Lattice, a: np.ndarray) -> np.ndarray:
    return lat.curl(a) - BRACKET_WEIGHT * cross_bracket(lat, a, a)


def energy_density(lat: Lattice, a: np.ndarray, e: np.ndarray, form: str = "noether") -> np.ndarray:
    """Pointwise energy density, summed over space and color components.

    ``noether``: ``(|curl a - g[a x, a]|^2 + |e|^2) / 2``.
    ``reduced``: the same with the cross term ``curl a . [a x, a]`` dropped.
    """
    if form == "noether":
        b = magnetic_field(lat, a)
        mag = (b**2).sum(axis=(0, 1))
    elif form == "reduced":
        c = lat.curl(a)
        x = BRACKET_WEIGHT * cross_bracket(lat, a, a)
        mag = (c**2).sum(axis=(0, 1)) + (x**2).sum(axis=(0, 1))
    else:
        raise ValueError(f"unknown energy form {form!r}")
    return 0.5 * (mag + (e**2).sum(axis=(0, 1)))


def lattice_energy(lat: Lattice, a: np.ndarray, e: np.ndarray, form: str = "noether") -> float:
    return lat.integrate(energy_density(lat, a, e, form))


# ---------------------------------------------------------------------------
# transverse mode basis


@dataclass(frozen=True)
class SpatialMode:
    m: tuple[int, int, int]  # integer wavevector; physical k = 2 pi m / L
    polarization: tuple[float, float, float]
    parity: str  # "zero", "cos" or "sin"


def _polarizations(m: np.ndarray) -> list[np.ndarray]:
    khat = m / np.linalg.norm(m)
    ref = np.eye(3)[int(np.argmin(np.abs(khat)))]
    e1 = np.cross(khat, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return [e1, e2]


def _representatives(kmax: int) -> list[tuple[int, int, int]]:
    reps = []
    for m in itertools.product(range(-kmax, kmax + 1), repeat=3):
        if m == (0, 0, 0):
            continue
        first = next(v for v in m if v != 0)
        if first > 0:
            reps.append(m)
    return sorted(reps)


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """Real divergence-free modes ``phi_s(x) * b_c`` on the periodic box.

    Spatial functions have unit mean square, ``(1/V) int phi_s . phi_t = delta``.
    Variable ``m = s * dim + c`` carries canonical coordinates
    ``A_m = sqrt(V) a_m`` and ``E_m = sqrt(V) e_m``.
    """

    L: float
    kmax: int
    algebra: GaugeAlgebra
    spatial: tuple[SpatialMode, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def volume(self) -> float:
        return self.L**3

    @property
    def n_spatial(self) -> int:
        return len(self.spatial)

    @property
    def n_modes(self) -> int:
        return self.n_spatial * self.dim

    def index(self, s: int, c: int) -> int:
        return s * self.dim + c

    def split(self, m: int) -> tuple[int, int]:
        return divmod(m, self.dim)

    def select(self, colors: Sequence[int] | None = None, spatial: Sequence[int] | None = None) -> list[int]:
        colors = range(self.dim) if colors is None else colors
        spatial = range(self.n_spatial) if spatial is None else spatial
        return sorted(self.index(s, c) for s in spatial for c in colors)

    def wavevector(self, s: int) -> np.ndarray:
        return 2 * np.pi * np.asarray(self.spatial[s].m, dtype=float) / self.L

    def values(self, s: int, x: np.ndarray) -> np.ndarray:
        """``phi_s`` at positions ``x`` of shape ``(3, ...)``; returns ``(3, ...)``."""
        mode = self.spatial[s]
        eps = np.asarray(mode.polarization).reshape((3,) + (1,) * (x.ndim - 1))
        if mode.parity == "zero":
            return eps * np.ones(x.shape[1:])
        phase = np.tensordot(self.wavevector(s), x, axes=1)
        wave = np.cos(phase) if mode.parity == "cos" else np.sin(phase)
        return math.sqrt(2.0) * eps * wave

    def curl_values(self, s: int, x: np.ndarray) -> np.ndarray:
        mode = self.spatial[s]
        if mode.parity == "zero":
            return np.zeros(x.shape)
        k = self.wavevector(s)
        kxe = np.cross(k, mode.polarization).reshape((3,) + (1,) * (x.ndim - 1))
        phase = np.tensordot(k, x, axes=1)
        # curl(eps cos(k.x)) = -(k x eps) sin(k.x); curl(eps sin(k.x)) = (k x eps) cos(k.x)
        wave = -np.sin(phase) if mode.parity == "cos" else np.cos(phase)
        return math.sqrt(2.0) * kxe * wave

    def reconstruct(self, coords: np.ndarray, lat: Lattice) -> np.ndarray:
        """Lattice field ``a(x)`` from canonical coordinates (length ``n_modes``)."""
        coords = np.asarray(coords, dtype=float).reshape(self.n_spatial, self.dim)
        x = lat.positions()
        out = lat.vector_zeros()
        for s in range(self.n_spatial):
            phi = self.values(s, x)
            out += phi[:, None] * coords[s][None, :, None, None, None]
        return out / math.sqrt(self.volume)

    def project(self, field: np.ndarray, lat: Lattice) -> np.ndarray:
        """Canonical coordinates of a lattice field (exact for band-limited input)."""
        x = lat.positions()
        out = np.zeros((self.n_spatial, self.dim))
        for s in range(self.n_spatial):
            phi = self.values(s, x)
            out[s] = np.einsum("ixyz,icxyz->c", phi, field) * lat.cell_volume
        return (out / math.sqrt(self.volume)).reshape(-1)


def build_mode_basis(L: float, kmax: int, algebra: GaugeAlgebra) -> ModeBasis:
    """Zero mode (3 polarizations) plus cos/sin pairs with 2 transverse polarizations
    for every integer wavevector with ``|m|_inf <= kmax`` (one per +-m pair)."""
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    if L <= 0:
        raise ValueError("box size must be positive")
    spatial = [SpatialMode((0, 0, 0), tuple(np.eye(3)[i]), "zero") for i in range(3)]
    for m in _representatives(kmax):
        for eps in _polarizations(np.asarray(m, dtype=float)):
            for parity in ("cos", "sin"):
                spatial.append(SpatialMode(m, tuple(eps), parity))
    return ModeBasis(float(L), int(kmax), algebra, tuple(spatial))


# ---------------------------------------------------------------------------
# energy functional


def _quadrature_points(modes: ModeBasis) -> tuple[np.ndarray, float]:
    # trapezoid rule on n points integrates exp(i k x) exactly for |k| < n;
    # products of four modes reach 4 * kmax
    n = 4 * modes.kmax + 2
    x = np.arange(n) * modes.L / n
    return np.array(np.meshgrid(x, x, x, indexing="ij")).reshape(3, -1), 1.0 / n**3


@dataclass(eq=False)
class EnergyFunctional:
    """Energy of transverse Cauchy data in canonical mode coordinates.

    ``M = sum E^2/2 + sum A C A / 2 - (g/sqrt(V)) f K A A A + (g^2 / 2V) f f S A A A A``
    with ``C``, ``K``, ``S`` exact overlap integrals (volume means) of curls and
    cross products of the spatial mode functions.
    """

    modes: ModeBasis
    form: str
    curl_gram: np.ndarray  # (S, S)  mean curl phi_s . curl phi_t
    cross_overlap: np.ndarray | None  # (S, S, S)  mean curl phi_s . (phi_t x phi_u)
    quartic_overlap: np.ndarray  # (S, S, S, S)  mean (phi_s x phi_t) . (phi_u x phi_v)

    @property
    def g(self) -> float:
        return BRACKET_WEIGHT

    def evaluate(self, A: np.ndarray, E: np.ndarray) -> float:
        """Energy at canonical coordinates (flat arrays of length ``n_modes``)."""
        md = self.modes
        A = np.asarray(A, float).reshape(md.n_spatial, md.dim)
        E = np.asarray(E, float).reshape(md.n_spatial, md.dim)
        f = md.algebra.structure_constants
        V = md.volume
        total = 0.5 * np.sum(E**2) + 0.5 * np.einsum("sc,st,tc->", A, self.curl_gram, A)
        Y = np.einsum("kab,sa,tb->kst", f, A, A)
        if self.cross_overlap is not None:
            total -= self.g / math.sqrt(V) * np.einsum("rc,rst,cst->", A, self.cross_overlap, Y)
        total += 0.5 * self.g**2 / V * np.einsum("kst,stuv,kuv->", Y, self.quartic_overlap, Y)
        return float(total)

    def cubic_tensor(self, keep: Sequence[int] | None = None) -> np.ndarray:
        """Coefficients of ``A_p A_q A_r`` (unsymmetrized) over the kept variables."""
        md = self.modes
        keep = list(range(md.n_modes)) if keep is None else list(keep)
        n = len(keep)
        if self.cross_overlap is None:
            return np.zeros((n, n, n))
        s_idx = np.array([md.split(m)[0] for m in keep])
        c_idx = np.array([md.split(m)[1] for m in keep])
        f = md.algebra.structure_constants
        K = self.cross_overlap[np.ix_(s_idx, s_idx, s_idx)]
        F = f[np.ix_(c_idx, c_idx, c_idx)]
        return -self.g / math.sqrt(md.volume) * K * F

    def quartic_tensor(self, keep: Sequence[int] | None = None) -> np.ndarray:
        md = self.modes
        keep = list(range(md.n_modes)) if keep is None else list(keep)
        s_idx = np.array([md.split(m)[0] for m in keep])
        c_idx = np.array([md.split(m)[1] for m in keep])
        f = md.algebra.structure_constants
        S = self.quartic_overlap[np.ix_(s_idx, s_idx, s_idx, s_idx)]
        Fp = f[:, c_idx][:, :, c_idx]  # (k, p, q)
        FF = np.einsum("kpq,krs->pqrs", Fp, Fp)
        return 0.5 * self.g**2 / md.volume * S * FF

    def quadratic_matrix(self, keep: Sequence[int] | None = None) -> np.ndarray:
        md = self.modes
        keep = list(range(md.n_modes)) if keep is None else list(keep)
        s_idx = np.array([md.split(m)[0] for m in keep])
        c_idx = np.array([md.split(m)[1] for m in keep])
        same_color = c_idx[:, None] == c_idx[None, :]
        return 0.5 * self.curl_gram[np.ix_(s_idx, s_idx)] * same_color

    def real_coefficients(self, keep: Sequence[int] | None = None, tol: float = 0.0) -> dict:
        """Coefficients of ``A``-monomials keyed by sorted variable tuples (positions in ``keep``)."""
        out: dict[tuple[int, ...], float] = {}
        for tensor in (self.quadratic_matrix(keep), self.cubic_tensor(keep), self.quartic_tensor(keep)):
            nz = np.argwhere(np.abs(tensor) > 0)
            if len(nz) == 0:
                continue
            vals = tensor[tuple(nz.T)]
            keys = np.sort(nz, axis=1)
            uniq, inv = np.unique(keys, axis=0, return_inverse=True)
            sums = np.zeros(len(uniq))
            np.add.at(sums, inv.reshape(-1), vals)
            for key, v in zip(map(tuple, uniq.tolist()), sums):
                if abs(v) > tol:
                    out[key] = out.get(key, 0.0) + float(v)
        return out

    def to_symbol(self, keep: Sequence[int] | None = None, tol: float = 1e-14) -> PolySymbol:
        """Complex symbol with ``z_m = (A_m / sqrt(L) + i sqrt(L) E_m) / sqrt(2)``."""
        md = self.modes
        keep = list(range(md.n_modes)) if keep is None else sorted(keep)
        n = len(keep)
        L = md.L
        terms: dict = {}
        zero = (0,) * n

        def add(key, c):
            terms[key] = terms.get(key, 0) + c

        # E_m^2 / 2 = y_m^2 / (2L),  y^2 = z* z - (z^2 + z*^2) / 2
        for j in range(n):
            e1 = tuple(1 if i == j else 0 for i in range(n))
            e2 = tuple(2 if i == j else 0 for i in range(n))
            add((e1, e1), 1.0 / (2 * L))
            add((zero, e2), -1.0 / (4 * L))
            add((e2, zero), -1.0 / (4 * L))
        scale = max(1.0, max((abs(v) for v in self.real_coefficients(keep).values()), default=1.0))
        for key, c in self.real_coefficients(keep, tol=tol * scale).items():
            # A_m = sqrt(L) x_m,  x = (z + z*) / sqrt(2)
            exps = [0] * n
            for v in key:
                exps[v] += 1
            deg = len(key)
            coeff = c * L ** (deg / 2) * 2 ** (-deg / 2)
            active = [(j, e) for j, e in enumerate(exps) if e]
            choices = [[(r, math.comb(e, r)) for r in range(e + 1)] for _, e in active]
            for combo in itertools.product(*choices):
                beta, alpha = [0] * n, [0] * n
                w = coeff
                for (j, e), (r, binom) in zip(active, combo):
                    beta[j], alpha[j] = r, e - r
                    w *= binom
                add((tuple(beta), tuple(alpha)), complex(w))
        return PolySymbol(n, terms)


def energy_functional(modes: ModeBasis, form: str = "reduced") -> EnergyFunctional:
    """Assemble the energy as exact mode-overlap tensors.

    ``noether`` keeps the cubic cross term ``-g int curl a . [a x, a]``;
    ``reduced`` drops it.
    """
    if form not in ("noether", "reduced"):
        raise ValueError(f"unknown energy form {form!r}")
    x, w = _quadrature_points(modes)
    S = modes.n_spatial
    phi = np.array([modes.values(s, x) for s in range(S)])  # (S, 3, P)
    curl = np.array([modes.curl_values(s, x) for s in range(S)])
    curl_gram = np.einsum("sip,tip->st", curl, curl) * w
    # pairwise cross products (S, S, 3, P)
    cross = np.einsum("ijk,sjp,tkp->stip", LEVI_CIVITA, phi, phi)
    flat = cross.reshape(S * S, -1)
    quartic = (flat @ flat.T * w).reshape(S, S, S, S)
    cubic = None
    if form == "noether":
        cubic = np.einsum("rip,stip->rst", curl, cross) * w
    return EnergyFunctional(modes, form, curl_gram, cubic, quartic)


def energy_polynomial(modes: ModeBasis, form: str = "reduced", keep: Sequence[int] | None = None) -> PolySymbol:
    """Energy functional as a real-diagonal symbol in the scale-covariant variables."""
    return energy_functional(modes, form).to_symbol(keep)


def canonical_to_z(modes: ModeBasis, A: np.ndarray, E: np.ndarray) -> np.ndarray:
    L = modes.L
    return (np.asarray(A) / math.sqrt(L) + 1j * math.sqrt(L) * np.asarray(E)) / math.sqrt(2)


# ---------------------------------------------------------------------------
# Killing constant


def _quartic_bilinears(algebra: GaugeAlgebra) -> list[np.ndarray]:
    # [a x, a]_i^c = alpha^T M_ic alpha over variables (spatial j, color a)
    f = algebra.structure_constants
    return [np.kron(LEVI_CIVITA[i], f[c]) for i in range(3) for c in range(algebra.dim)]


def quartic_symbol(algebra: GaugeAlgebra) -> PolySymbol:
    """``[a x, a] . [a x, a]`` with each real variable written as ``alpha = z + z*``.

    With this normalization ``sum_j d/dz*_j d/dz_j`` is the flat Laplacian in ``alpha``.
    Variable ``dim * j + c`` is spatial component ``j`` of color ``c``.
    """
    n = 3 * algebra.dim
    lin = [PolySymbol.z(n, p) + PolySymbol.zbar(n, p) for p in range(n)]
    pairs = {}
    total = PolySymbol(n)
    for M in _quartic_bilinears(algebra):
        T = PolySymbol(n)
        for p, q in zip(*np.nonzero(M)):
            key = (min(p, q), max(p, q))
            if key not in pairs:
                pairs[key] = lin[key[0]] * lin[key[1]]
            T = T + pairs[key] * float(M[p, q])
        total = total + T * T
    return total


def killing_constant(algebra: GaugeAlgebra, spatial_dim: int = 3, rtol: float = 1e-10) -> float:
    """Constant ``c`` with ``Laplacian([a x, a] . [a x, a]) = c (a . a)``."""
    if spatial_dim != 3:
        raise ValueError("only three spatial dimensions are supported")
    q = quartic_symbol(algebra)
    lap = laplacian(q)
    n = q.n_modes
    norm = PolySymbol(n)
    for p in range(n):
        lin = PolySymbol.z(n, p) + PolySymbol.zbar(n, p)
        norm = norm + lin * lin
    zero = (0,) * n
    e0 = tuple(1 if i == 0 else 0 for i in range(n))
    c = complex(lap.coefficient(e0, e0)) / complex(norm.coefficient(e0, e0))
    resid = (lap - norm * c).max_abs()
    if resid > rtol * max(1.0, abs(c)):
        raise ValueError(f"Laplacian of the quartic is not proportional to a.a (residual {resid:.3e})")
    if abs(c.imag) > rtol * max(1.0, abs(c)):
        raise ValueError("non-real Killing constant")
    return float(c.real)
