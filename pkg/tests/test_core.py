import io

import numpy as np
import pytest

from diracspec.objects import (BoundaryAngles, Grid, GridFunction, PotentialMatrix, SpectralData, SpectralDatum,
                               Trajectory2, TSequence, SurgeryPlan, Addition, Rescaling, cumulative_c,
                               inner_product, omega_matrix, pauli_algebra_selftest, reduce_angle, B_REAL, Logger)
from diracspec.objects.errors import (ContractViolation, DomainError, EnumerationError, NumericError, PlanError,
                                      ShapeError)


def test_grid_nodes_and_quadrature():
    grid = Grid(0.0, np.pi, 512)
    assert grid.size == 513
    assert grid.nodes[0] == 0.0 and grid.nodes[-1] == np.pi
    assert grid.h == pytest.approx(np.pi / 512)
    assert grid.integrate(np.sin(grid.nodes)) == pytest.approx(2.0, abs=2e-5)
    running = grid.cumulative(np.ones(grid.size))
    np.testing.assert_allclose(running, grid.nodes, atol=1e-12)
    np.testing.assert_allclose(grid.tail(np.ones(grid.size)), np.pi - grid.nodes, atol=1e-12)


def test_grid_rejects_bad_bounds():
    with pytest.raises(DomainError):
        Grid(1.0, 1.0, 10)
    with pytest.raises(DomainError):
        Grid(0.0, 1.0, 0)


@pytest.mark.parametrize('theta', [-7.0, -np.pi / 2, -0.3, 0.0, np.pi / 2, 2.0, np.pi, 9.5])
def test_reduce_angle(theta):
    reduced, k = reduce_angle(theta)
    assert -np.pi / 2 < reduced <= np.pi / 2 + 1e-15
    assert reduced + k * np.pi == pytest.approx(theta, abs=1e-12)


def test_boundary_angles_reduce_and_offset():
    angles = BoundaryAngles(np.pi + 0.2, -0.1)
    assert angles.alpha == pytest.approx(0.2)
    assert angles.alpha_turns == 1
    assert angles.lattice_offset == pytest.approx(-0.3 / np.pi)
    np.testing.assert_allclose(angles.initial_vector(), [np.sin(0.2), -np.cos(0.2)])


def test_pauli_algebra():
    assert pauli_algebra_selftest()
    omega = omega_matrix(0.5, -1.5)
    np.testing.assert_allclose(omega, [[0.5, -1.5], [-1.5, -0.5]])
    # B Omega = -Omega B
    np.testing.assert_allclose(B_REAL @ omega, -omega @ B_REAL)


def test_spectral_datum_similarity_contract():
    SpectralDatum(0, 0.0, a=1.0, b=4.0, c=2.0)
    with pytest.raises(ContractViolation):
        SpectralDatum(0, 0.0, a=1.0, b=4.0, c=1.0)
    with pytest.raises(ContractViolation):
        SpectralDatum(0, 0.0, a=-1.0)


def test_spectral_data_ordering():
    data = SpectralData.from_lambdas(BoundaryAngles(0.0), {1: 1.0, -1: -1.0, 0: 0.0}, {0: np.pi})
    assert data.indices == (-1, 0, 1)
    assert data.n_min == -1 and data.n_max == 1
    assert data.a(0) == np.pi
    with pytest.raises(ContractViolation):
        data.a(1)
    with pytest.raises(EnumerationError):
        SpectralData.from_lambdas(BoundaryAngles(0.0), {0: 1.0, 1: 0.5})


def test_spectral_data_window_shift_updates():
    data = SpectralData.from_lambdas(BoundaryAngles(0.0), {n: float(n) for n in range(-5, 6)})
    assert data.covers(-5, 5) and not data.covers(-6, 5)
    window = data.window(-2, 2)
    assert window.indices == (-2, -1, 0, 1, 2)
    shifted = data.shifted(1)
    assert shifted.lam(1) == 0.0 and shifted.index_shift == 1
    updated = data.with_updates(a={0: 2.0})
    assert updated.a(0) == 2.0
    assert data[0].a is None


def test_potential_matrix_validation(unit_grid):
    with pytest.raises(ShapeError):
        PotentialMatrix.from_samples(unit_grid, np.zeros(3), np.zeros(unit_grid.size))
    q = np.zeros(unit_grid.size)
    q[7] = np.nan
    with pytest.raises(NumericError):
        PotentialMatrix.from_samples(unit_grid, np.zeros(unit_grid.size), q)
    with pytest.raises(DomainError):
        PotentialMatrix.builtin('no-such-potential', unit_grid)


def test_potential_evaluation(unit_grid):
    pot = PotentialMatrix.builtin('sin-q', unit_grid)
    p, q = pot.evaluate(np.array([0.5, 1.0]))
    np.testing.assert_allclose(q, np.sin([0.5, 1.0]))
    np.testing.assert_allclose(p, 0.0)
    sampled = PotentialMatrix.from_samples(unit_grid, pot.p_values, pot.q_values)
    assert sampled.interpolation == 'linear'
    _, q_line = sampled.evaluate(np.array([0.123456]))
    assert q_line[0] == pytest.approx(np.sin(0.123456), abs=1e-7)
    spline = PotentialMatrix.from_samples(unit_grid, pot.p_values, pot.q_values, interpolation='cubic')
    _, q_spline = spline.evaluate(np.array([0.123456]))
    assert q_spline[0] == pytest.approx(np.sin(0.123456), abs=1e-10)
    with pytest.raises(DomainError):
        pot.evaluate(np.array([4.0]))
    assert pot.omega().shape == (unit_grid.size, 2, 2)


def test_cumulative_c(sin_q):
    assert cumulative_c(sin_q, 0.0) == 0.0
    assert cumulative_c(sin_q, np.pi) == pytest.approx(2.0, abs=1e-6)
    assert cumulative_c(sin_q, 0.5 * np.pi) == pytest.approx(1.0, abs=1e-6)
    values = [cumulative_c(sin_q, x) for x in np.linspace(0.0, np.pi, 11)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    with pytest.raises(DomainError):
        cumulative_c(sin_q, 3.5)


def test_trajectory_and_inner_product(unit_grid):
    x = unit_grid.nodes
    f = Trajectory2(unit_grid, np.sin(x), np.cos(x))
    assert f.norm2() == pytest.approx(np.pi, abs=1e-10)
    g = f.scaled(2.0)
    assert inner_product(f, g) == pytest.approx(2.0 * np.pi, abs=1e-10)
    np.testing.assert_allclose(f.at(0.5 * np.pi), [1.0, 0.0], atol=1e-6)
    assert GridFunction(unit_grid, x)(1.0) == pytest.approx(1.0)
    with pytest.raises(ShapeError):
        inner_product(f, Trajectory2(Grid(0.0, 1.0, 4), np.zeros(5), np.zeros(5)))


def test_tsequence_order():
    tseq = TSequence({2: 0.1, -1: 0.2, 0: 0.3, 1: 0.0, -2: 0.5})
    assert tseq.support == [-2, -1, 0, 2]
    assert tseq.interleaved() == [0, -1, 2, -2]
    with pytest.raises(PlanError):
        TSequence({0: float('inf')})


def test_surgery_plan_validation():
    plan = SurgeryPlan(removals=(1, 0), additions=((0.5, 1.0),), rescalings=(Rescaling(2, 3.0),))
    assert plan.removals == (0, 1)
    assert plan.additions == (Addition(0.5, 1.0),)
    assert not plan.is_empty and SurgeryPlan().is_empty
    with pytest.raises(PlanError):
        SurgeryPlan(removals=(0, 0))
    with pytest.raises(PlanError):
        SurgeryPlan(additions=(Addition(0.5, 1.0), Addition(0.5, 2.0)))
    with pytest.raises(PlanError):
        SurgeryPlan(additions=(Addition(0.5, -1.0),))
    with pytest.raises(PlanError):
        SurgeryPlan(removals=(1,), rescalings=(Rescaling(1, 2.0),))


def test_logger_fields_and_levels(monkeypatch):
    logger = Logger.get_instance()
    assert Logger.get_instance() is logger
    stream = io.StringIO()
    monkeypatch.setenv('DIRACSPEC_LOG_LEVEL', 'warning')
    Logger.activate(stream=stream)
    try:
        logger.log('dropped below the level')
        logger.warn('singular system', x=0.5, rank=2)
    finally:
        Logger.deactivate()
    logger.error('after deactivate')
    lines = stream.getvalue().splitlines()
    assert len(lines) == 1
    assert lines[0].endswith('WARNING singular system x=0.5 rank=2')
    with pytest.raises(ValueError):
        Logger.activate('loud')
    assert Logger.DISABLED
