"""Temporal-gauge Yang-Mills evolution on a periodic grid.

First-order system ``dA_k/dt = E_k``, ``dE_k/dt = d_j F_jk - [A_j, F_jk]`` with
``F_jk = d_j A_k - d_k A_j - [A_j, A_k]``, spectral derivatives and RK4 in time.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .yangmills import Lattice, dot_bracket, transverse_projector


@dataclass(frozen=True, eq=False)
class FieldState:
    """Cauchy data ``(A, E)`` at time ``t``; arrays of shape ``(3, dim, n, n, n)``."""

    t: float
    A: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        if self.A.shape != self.E.shape or self.A.ndim != 5 or self.A.shape[0] != 3:
            raise ValueError(f"A {self.A.shape} and E {self.E.shape} must share shape (3, dim, n, n, n)")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.E))):
            raise FloatingPointError(f"non-finite field values at t={self.t}")


def curvature(lat: Lattice, A: np.ndarray) -> np.ndarray:
    """``F[j, k] = d_j A_k - d_k A_j - [A_j, A_k]``, shape ``(3, 3, dim, n, n, n)``."""
    Ah = lat.fft(A)
    kk = lat.k[:, None, None]  # (3, 1, 1, n, n, n)
    dA = lat.ifft(1j * kk * Ah[None])  # dA[j, k] = d_j A_k
    F = np.zeros_like(dA)
    for j in range(3):
        for k in range(j + 1, 3):
            F[j, k] = dA[j, k] - dA[k, j] - lat.bracket(A[j], A[k])
            F[k, j] = -F[j, k]
    return F


def ym_rhs(lat: Lattice, state: FieldState) -> tuple[np.ndarray, np.ndarray]:
    F = curvature(lat, state.A)
    Fh = lat.fft(F)
    div_part = lat.ifft((1j * lat.k[:, None, None] * Fh).sum(axis=0))  # sum_j d_j F_jk
    # sum_j [A_j, F_jk]
    commutator = np.einsum("cab,ja...,jkb...->kc...", lat.algebra.structure_constants, state.A, F)
    Edot = div_part - commutator
    return state.E.copy(), Edot


def rk4_step(lat: Lattice, state: FieldState, dt: float) -> FieldState:
    if not dt > 0:
        raise ValueError("dt must be positive")

    def shifted(s, d, h):
        return FieldState(s.t + h, s.A + h * d[0], s.E + h * d[1])

    k1 = ym_rhs(lat, state)
    k2 = ym_rhs(lat, shifted(state, k1, dt / 2))
    k3 = ym_rhs(lat, shifted(state, k2, dt / 2))
    k4 = ym_rhs(lat, shifted(state, k3, dt))
    A = state.A + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    E = state.E + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return FieldState(state.t + dt, A, E)


def constraint_residual(lat: Lattice, state: FieldState) -> float:
    """L2 norm of the gauged divergence ``div E - [A; E]``."""
    g = lat.div(state.E) - dot_bracket(lat, state.A, state.E)
    return math.sqrt(lat.integrate((g**2).sum(axis=0)))


def total_energy(lat: Lattice, state: FieldState) -> float:
    """``(1/2) int (E.E + (1/2) F.F)``."""
    F = curvature(lat, state.A)
    density = (state.E**2).sum(axis=(0, 1)) + 0.5 * (F**2).sum(axis=(0, 1, 2))
    return 0.5 * lat.integrate(density)


@dataclass
class Trajectory:
    final: FieldState
    rows: list[tuple[float, float, float]]  # (t, energy, constraint_residual)

    @property
    def energy_drift(self) -> float:
        e0 = self.rows[0][1]
        return max(abs(r[1] - e0) for r in self.rows) / max(abs(e0), 1e-300)

    @property
    def residual_growth(self) -> float:
        return max(r[2] for r in self.rows) - self.rows[0][2]


def evolve(
    lat: Lattice,
    state: FieldState,
    dt: float,
    t_end: float,
    record_every: int = 1,
    callback: Callable[[FieldState], None] | None = None,
) -> Trajectory:
    """Integrate to ``t_end`` with fixed steps, recording diagnostics every few steps."""
    n_steps = int(round((t_end - state.t) / dt))
    if n_steps < 0 or abs(state.t + n_steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError("t_end - t must be a nonnegative multiple of dt")
    rows = [(state.t, total_energy(lat, state), constraint_residual(lat, state))]
    t0 = state.t
    for i in range(1, n_steps + 1):
        state = rk4_step(lat, state, dt)
        state = FieldState(t0 + i * dt, state.A, state.E)
        if i % record_every == 0 or i == n_steps:
            rows.append((state.t, total_energy(lat, state), constraint_residual(lat, state)))
        if callback is not None:
            callback(state)
    return Trajectory(state, rows)


def write_trajectory_csv(path, rows, header: dict | None = None):
    with open(path, "w", newline="") as fh:
        for key, val in (header or {}).items():
            fh.write(f"# {key}={val}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "energy", "constraint_residual"])
        for t, e, r in rows:
            w.writerow([repr(float(t)), repr(float(e)), repr(float(r))])


# ---------------------------------------------------------------------------
# initial data


def plane_wave_state(lat: Lattice, m=(1, 0, 0), polarization=(0, 1, 0), color: int = 0, amplitude: float = 1.0) -> FieldState:
    """Standing transverse wave ``A = amp eps cos(k.x) b_c``, ``E = 0``."""
    m = np.asarray(m, float)
    eps = np.asarray(polarization, float)
    if abs(m @ eps) > 1e-12:
        raise ValueError("polarization must be orthogonal to the wavevector")
    k = 2 * np.pi * m / lat.L
    phase = np.tensordot(k, lat.positions(), axes=1)
    A = lat.vector_zeros()
    for i in range(3):
        A[i, color] = amplitude * eps[i] * np.cos(phase)
    return FieldState(0.0, A, np.zeros_like(A))


def plane_wave_exact(lat: Lattice, t: float, **kwargs) -> np.ndarray:
    """Exact ``A(t)`` of :func:`plane_wave_state` for an abelian algebra."""
    m = np.asarray(kwargs.get("m", (1, 0, 0)), float)
    omega = 2 * np.pi * np.linalg.norm(m) / lat.L
    return plane_wave_state(lat, **kwargs).A * math.cos(omega * t)


def constrained_random_state(
    lat: Lattice, rng: np.random.Generator, kcut: int = 2, amplitude: float = 1.0, kind: str = "magnetic"
) -> FieldState:
    """Smooth transverse data satisfying the constraint exactly.

    ``magnetic``: transverse ``A``, ``E = 0``. ``electric``: transverse ``E``, ``A = 0``.
    """
    field = transverse_projector(lat, lat.random_field(rng, shape=(3,), kcut=kcut, amplitude=1.0))
    field *= amplitude / max(np.abs(field).max(), 1e-300)
    zero = np.zeros_like(field)
    if kind == "magnetic":
        return FieldState(0.0, field, zero)
    if kind == "electric":
        return FieldState(0.0, zero, field)
    raise ValueError(f"unknown kind {kind!r}")
