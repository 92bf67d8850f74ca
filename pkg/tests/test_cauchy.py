import numpy as np
import pytest

from diracspec.objects import Grid, PotentialMatrix
from diracspec.objects.errors import DomainError, ShapeError
from diracspec.components import (SolverConfig, solve_cauchy, solve_terminal, fundamental_matrix, wronskian,
                                  dirac_residual, picard_solution, endpoint_matrix, cauchy_batch)


@pytest.mark.parametrize('alpha,lam', [(0.0, 1.0), (0.4, 3.5), (-1.2, -7.25), (np.pi / 2, 0.0)])
def test_free_solution_closed_form(zero_pot, cfg, alpha, lam):
    phi = solve_cauchy(zero_pot, lam, alpha, cfg)
    x = phi.grid.nodes
    np.testing.assert_allclose(phi.y1, np.sin(alpha + lam * x), atol=1e-10)
    np.testing.assert_allclose(phi.y2, -np.cos(alpha + lam * x), atol=1e-10)


def test_terminal_solution_hits_end_vector(sin_q, cfg):
    beta = 0.3
    psi = solve_terminal(sin_q, 2.0, beta, cfg)
    np.testing.assert_allclose(psi.end(), [np.sin(beta), -np.cos(beta)], atol=1e-14)


@pytest.mark.parametrize('lam', [0.0, 4.0, 2.0 + 1.5j])
def test_fundamental_matrix_unimodular(sin_q, cfg, lam):
    fm = fundamental_matrix(sin_q, lam, cfg)
    np.testing.assert_allclose(fm.entries[0], np.eye(2))
    assert np.max(np.abs(fm.determinant() - 1.0)) < 1e-10
    np.testing.assert_allclose(endpoint_matrix(sin_q, [lam], cfg)[0], fm.at_end(), atol=1e-10)


def test_fundamental_matrix_columns_are_solutions(sin_q, cfg):
    fm = fundamental_matrix(sin_q, 1.7, cfg)
    phi = solve_cauchy(sin_q, 1.7, np.pi / 2, cfg)
    # phi(0) = (1, 0) is the first column of E
    np.testing.assert_allclose(fm.column(0).values, phi.values, atol=1e-12)


def test_wronskian_is_constant(sin_q, cfg):
    phi = solve_cauchy(sin_q, 2.5, 0.2, cfg)
    psi = solve_terminal(sin_q, 2.5, -0.4, cfg)
    report = wronskian(phi, psi)
    assert report.deviation < 1e-9
    assert abs(report.values[0] - (phi.y1[0] * psi.y2[0] - phi.y2[0] * psi.y1[0])) < 1e-14


def test_wronskian_grid_mismatch(sin_q, cfg):
    phi = solve_cauchy(sin_q, 1.0, 0.0, cfg)
    other = solve_cauchy(sin_q, 1.0, 0.0, SolverConfig(m=256))
    with pytest.raises(ShapeError):
        wronskian(phi, other)


def test_methods_agree(sin_q):
    magnus = solve_cauchy(sin_q, 3.0, 0.1, SolverConfig('magnus4', 2048))
    rk4 = solve_cauchy(sin_q, 3.0, 0.1, SolverConfig('rk4', 2048))
    assert np.max(np.abs(magnus.values - rk4.values)) < 1e-6


def test_rk4_is_default_and_fourth_order(sin_q):
    assert SolverConfig().method == 'rk4'
    reference = solve_cauchy(sin_q, 5.0, 0.3, SolverConfig('magnus4', 4096)).end()
    errors = [np.max(np.abs(solve_cauchy(sin_q, 5.0, 0.3, SolverConfig('rk4', m)).end() - reference))
              for m in (256, 512)]
    assert np.log2(errors[0] / errors[1]) == pytest.approx(4.0, abs=0.5)


def test_real_and_complex_paths_agree(sin_q):
    cfg = SolverConfig(m=2048)
    real = solve_cauchy(sin_q, 1.7, 0.2, cfg)
    complex_ = solve_cauchy(sin_q, 1.7 + 0.0j, 0.2, cfg)
    assert np.iscomplexobj(complex_.values)
    assert np.max(np.abs(real.values - complex_.values)) < 1e-12


def test_dirac_residual_small(sin_q, cfg):
    for lam in (0.5, 3.0, 1.0 - 0.5j):
        phi = solve_cauchy(sin_q, lam, 0.3, cfg)
        assert dirac_residual(sin_q, phi, lam) < 1e-6


def test_picard_matches_solver():
    grid = Grid(0.0, np.pi, 64)
    pot = PotentialMatrix.builtin('sin-q', grid)
    picard = picard_solution(pot, 1.0, 0.3)
    direct = solve_cauchy(pot, 1.0, 0.3, SolverConfig(m=64))
    assert np.max(np.abs(picard.values - direct.values)) < 1e-2


def test_batch_matches_single(sin_q, cfg):
    lams = np.linspace(-5.0, 5.0, 40)
    batch = cauchy_batch(sin_q, lams, np.array([0.0, -1.0]), cfg)
    single = solve_cauchy(sin_q, lams[17], 0.0, cfg)
    np.testing.assert_allclose(batch[17], single.values, atol=1e-14)


def test_solver_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(m=10)
    with pytest.raises(DomainError):
        SolverConfig(method='euler')
