import numpy as np
import pytest
from scipy.special import erfcx

from diracspec.objects import SurgeryPlan
from diracspec.objects.errors import DomainError, PlanError, SingularSystemError
from diracspec.components import (HalfAxisProblem, SolverConfig, surgery, perturbation_steps,
                                  general_finite_perturbation, model_spectrum)
from diracspec.components.degenerate import solve_stacked
from diracspec.components.surgery import model_basis


@pytest.fixture(scope='module')
def removed(model):
    return surgery(model, SurgeryPlan(removals=(0,)), model.grid(4096))


def test_removal_closed_form(removed):
    grid = removed.potential.domain
    x = grid.nodes[grid.nodes <= 4.0]
    p, q = removed.potential.evaluate(x)
    expected = x - 2.0 / (np.sqrt(np.pi) * erfcx(x))
    np.testing.assert_allclose(q, expected, atol=1e-3)
    np.testing.assert_allclose(p, 0.0, atol=1e-12)
    assert np.all(removed.determinant.values > 0)


@pytest.mark.parametrize('m', [2048, 8192, 16384])
def test_removal_stays_regular_to_the_cutoff(model, m):
    result = surgery(model, SurgeryPlan(removals=(0,)), model.grid(m))
    det = result.determinant.values
    assert np.all(det > 0)
    assert det[-1] == pytest.approx(0.0, abs=1e-3)
    x = result.potential.domain.nodes
    inner = x <= 4.0
    expected = x[inner] - 2.0 / (np.sqrt(np.pi) * erfcx(x[inner]))
    np.testing.assert_allclose(result.potential.q_values[inner], expected, atol=1e-3)


def test_singular_floor_is_relative():
    tiny = np.broadcast_to(1e-20 * np.eye(2), (3, 2, 2)).copy()
    solution, _ = solve_stacked(tiny, np.ones((3, 2, 1)))
    np.testing.assert_allclose(solution[:, :, 0], 1e20)
    flat = np.broadcast_to(np.array([[1.0, 2.0], [2.0, 4.0]]), (3, 2, 2)).copy()
    with pytest.raises(SingularSystemError) as info:
        solve_stacked(flat, np.ones((3, 2, 1)), nodes=np.array([0.0, 0.5, 1.0]))
    assert info.value.x == 0.0


def test_removal_spectrum(removed):
    lambdas = removed.spectrum.lambdas()
    assert not np.any(np.abs(lambdas) < 0.5)
    for lam in (2.0, 2.0 * np.sqrt(2.0)):
        assert np.any(np.isclose(lambdas, lam))
    problem = HalfAxisProblem(removed.potential, 0.0)
    assert problem.roots(-0.5, 0.5) == []
    np.testing.assert_allclose(problem.roots(1.5, 3.0), [2.0, 2.0 * np.sqrt(2.0)], atol=1e-4)


def test_rescaling_moves_norming_constant(model):
    b = 0.5 * model.a(0)
    result = surgery(model, SurgeryPlan(rescalings=((0, b),)), model.grid(4096))
    assert result.spectrum.a(0) == pytest.approx(b)
    assert result.spectrum.lam(0) == 0.0
    problem = HalfAxisProblem(result.potential, 0.0)
    roots = problem.roots(-0.5, 0.5)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(0.0, abs=1e-6)
    assert problem.norm2(problem.decaying_solution(roots[0]), roots[0]) == pytest.approx(b, rel=1e-3)
    np.testing.assert_allclose(problem.roots(1.5, 3.0), [2.0, 2.0 * np.sqrt(2.0)], atol=1e-4)


def test_sequential_steps_match_one_shot(model):
    grid = model.grid(4096)
    plan = SurgeryPlan(removals=(0,), rescalings=((1, 2.0 * model.a(1)),))
    one_shot = surgery(model, plan, grid)
    steps = perturbation_steps(model, plan)
    assert [s.nu for s in steps] == [0.0, 2.0]
    assert steps[0].gamma == pytest.approx(-1.0 / model.a(0))
    sequential = general_finite_perturbation(model.potential(grid), 0.0, steps, SolverConfig(m=grid.m),
                                             model_basis(model, steps, grid))
    inner = grid.nodes <= 8.0
    np.testing.assert_allclose(sequential.q_values[inner], one_shot.potential.q_values[inner], atol=1e-8)
    np.testing.assert_allclose(sequential.p_values[inner], one_shot.potential.p_values[inner], atol=1e-8)


def test_added_eigenvalue(model):
    result = surgery(model, SurgeryPlan(additions=((1.1, 1.0),)), model.grid(4096))
    assert result.spectrum.lam(1) == pytest.approx(1.1)
    assert result.spectrum.a(1) == pytest.approx(1.0)
    assert result.spectrum.lam(2) == pytest.approx(2.0)
    inner = result.potential.domain.nodes <= 6.0
    assert np.all(np.isfinite(result.potential.q_values[inner]))
    roots = HalfAxisProblem(result.potential, 0.0).roots(0.5, 1.5)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(1.1, abs=1e-4)


def test_plan_errors(model):
    grid = model.grid(512)
    empty = surgery(model, SurgeryPlan(), grid)
    np.testing.assert_allclose(empty.potential.q_values, grid.nodes)
    np.testing.assert_allclose(empty.determinant.values, 1.0)
    with pytest.raises(PlanError):
        surgery(model, SurgeryPlan(additions=((2.0, 1.0),)), grid)
    with pytest.raises(PlanError):
        SurgeryPlan(removals=(1,), rescalings=((1, 2.0),))
    with pytest.raises(DomainError):
        surgery(model_spectrum('whole', -2, 2), SurgeryPlan(removals=(0,)))
