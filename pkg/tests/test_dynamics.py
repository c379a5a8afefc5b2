import math

import numpy as np
import pytest

from ymgap.dynamics import (
    FieldState,
    constrained_random_state,
    constraint_residual,
    curvature,
    evolve,
    plane_wave_exact,
    plane_wave_state,
    rk4_step,
    total_energy,
    write_trajectory_csv,
    ym_rhs,
)
from ymgap.yangmills import Lattice, abelian_algebra, su2_algebra


def test_zero_potential_has_zero_curvature():
    lat = Lattice(6, 1.0, su2_algebra())
    assert not curvature(lat, lat.vector_zeros()).any()


def test_curvature_antisymmetric():
    lat = Lattice(6, 1.0, su2_algebra())
    A = lat.random_field(np.random.default_rng(0), (3,), kcut=2)
    F = curvature(lat, A)
    assert np.abs(F + F.transpose(1, 0, 2, 3, 4, 5)).max() == 0


def test_zero_data_is_fixed_point():
    lat = Lattice(6, 1.0, su2_algebra())
    s = FieldState(0.0, lat.vector_zeros(), lat.vector_zeros())
    s1 = rk4_step(lat, s, 0.1)
    assert not s1.A.any() and not s1.E.any()
    assert s1.t == pytest.approx(0.1)


def test_state_validation():
    lat = Lattice(4, 1.0, su2_algebra())
    A = lat.vector_zeros()
    with pytest.raises(ValueError):
        FieldState(0.0, A, A[:, :2])
    bad = A.copy()
    bad[0, 0, 0, 0, 0] = np.nan
    with pytest.raises(FloatingPointError):
        FieldState(0.0, bad, A)
    with pytest.raises(ValueError):
        rk4_step(lat, FieldState(0.0, A, A), 0.0)


@pytest.mark.parametrize("seed", [0, 1])
def test_force_is_minus_potential_gradient(seed):
    # finite-difference oracle: d/de V(A + e h) = -<Edot, h>
    rng = np.random.default_rng(seed)
    lat = Lattice(8, 1.3, su2_algebra())
    A = lat.random_field(rng, (3,), kcut=2)
    h = lat.random_field(rng, (3,), kcut=2)
    zero = lat.vector_zeros()

    def potential(eps):
        return total_energy(lat, FieldState(0.0, A + eps * h, zero))

    eps = 1e-4
    fd = (potential(eps) - potential(-eps)) / (2 * eps)
    _, Edot = ym_rhs(lat, FieldState(0.0, A, zero))
    assert fd == pytest.approx(-lat.inner(Edot, h), rel=1e-6)


def test_constraint_residual_calibration():
    # E = grad u with A = 0 violates the constraint by exactly |lap u|
    L = 2.0
    lat = Lattice(8, L, su2_algebra())
    k = 2 * np.pi * 2 / L
    u = np.zeros((3, 8, 8, 8))
    u[1] = np.sin(k * lat.positions()[0])
    s = FieldState(0.0, lat.vector_zeros(), lat.grad(u))
    assert constraint_residual(lat, s) == pytest.approx(k**2 * math.sqrt(L**3 / 2), rel=1e-12)


@pytest.mark.parametrize("kind", ["magnetic", "electric"])
def test_constrained_random_state_satisfies_constraint(kind):
    lat = Lattice(8, 1.0, su2_algebra())
    s = constrained_random_state(lat, np.random.default_rng(2), kcut=2, amplitude=0.7, kind=kind)
    assert constraint_residual(lat, s) < 1e-12
    assert np.abs(s.A + s.E).max() == pytest.approx(0.7)


def test_pure_electric_energy():
    lat = Lattice(8, 1.5, su2_algebra())
    s = constrained_random_state(lat, np.random.default_rng(3), kind="electric")
    expected = 0.5 * lat.integrate((s.E**2).sum(axis=(0, 1)))
    assert total_energy(lat, s) == pytest.approx(expected, rel=1e-14)


def test_plane_wave_energy_and_solution():
    lat = Lattice(8, 2 * np.pi, abelian_algebra(1))
    kw = dict(m=(1, 1, 0), polarization=(1 / math.sqrt(2), -1 / math.sqrt(2), 0))
    s = plane_wave_state(lat, **kw)
    # B amplitude |k| = sqrt(2), cos^2 averages to 1/2
    assert total_energy(lat, s) == pytest.approx(0.5 * 2 * 0.5 * lat.volume, rel=1e-12)
    traj = evolve(lat, s, 0.05, 1.0)
    assert np.abs(traj.final.A - plane_wave_exact(lat, 1.0, **kw)).max() < 1e-5
    with pytest.raises(ValueError):
        plane_wave_state(lat, m=(1, 0, 0), polarization=(1, 0, 0))


def test_evolve_rejects_misaligned_end_time():
    lat = Lattice(4, 1.0, su2_algebra())
    s = FieldState(0.0, lat.vector_zeros(), lat.vector_zeros())
    with pytest.raises(ValueError):
        evolve(lat, s, 0.3, 1.0)


def test_energy_drift_fourth_order():
    lat = Lattice(8, 2 * np.pi, su2_algebra())
    s = constrained_random_state(lat, np.random.default_rng(4), kcut=2, amplitude=1.0)
    drifts = [evolve(lat, s, dt, 1.0).energy_drift for dt in (0.1, 0.05)]
    assert 10 < drifts[0] / drifts[1] < 40


def test_trajectory_csv(tmp_path):
    lat = Lattice(4, 1.0, su2_algebra())
    s = constrained_random_state(lat, np.random.default_rng(5), kcut=1, amplitude=0.2)
    traj = evolve(lat, s, 0.01, 0.05, record_every=2)
    assert [round(r[0], 12) for r in traj.rows] == [0.0, 0.02, 0.04, 0.05]
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj.rows, {"algebra": "su2"})
    lines = path.read_text().splitlines()
    assert lines[0] == "# algebra=su2"
    assert lines[1] == "t,energy,constraint_residual"
    assert len(lines) == 6
