import numpy as np
import pytest

from diracspec.objects import BoundaryAngles, Grid, SpectralData
from diracspec.objects.errors import ContractViolation, DomainError
from diracspec.components import (GLSeriesKernel, build_F, solve_gl, recover_potential, reconstruct,
                                  discrete_residual, free_solution, zero_family_potential, find_eigenvalues,
                                  norming_constants)


def lattice_data(N: int, norming: dict[int, float] | None = None, alpha: float = 0.0) -> SpectralData:
    angles = BoundaryAngles(alpha, 0.0)
    a = {n: np.pi for n in range(-N, N + 1)}
    a.update(norming or {})
    return SpectralData.from_lambdas(angles, {n: n + angles.lattice_offset for n in range(-N, N + 1)}, a)


def test_free_solution():
    x = np.array([0.0, 0.5, 1.0])
    phi = free_solution(np.array([2.0]), 0.3, x)
    assert phi.shape == (3, 1, 2)
    np.testing.assert_allclose(phi[:, 0, 0], np.sin(2.0 * x + 0.3))
    np.testing.assert_allclose(phi[:, 0, 1], -np.cos(2.0 * x + 0.3))


@pytest.mark.parametrize('method', ['degenerate', 'nystrom'])
def test_lattice_data_gives_zero_potential(method):
    grid = Grid(0.0, np.pi, 256)
    result = reconstruct(lattice_data(16), grid, 16, method=method)
    assert result.kernel.series.rank == 0
    assert np.max(np.abs(result.potential.p_values)) == 0.0
    assert np.max(np.abs(result.potential.q_values)) == 0.0
    assert result.orthogonality_defect < 1e-10


@pytest.mark.parametrize('t,alpha', [(0.5, 0.0), (-0.3, 0.0), (0.4, 0.25)])
def test_one_changed_norming_constant(t, alpha):
    grid = Grid(0.0, np.pi, 2048)
    data = lattice_data(20, {0: np.pi * np.exp(-t)}, alpha)
    series = GLSeriesKernel(data, 20)
    assert series.rank == 1
    assert series.coefficients[0] == pytest.approx(np.expm1(t) / np.pi)
    result = reconstruct(data, grid, 20)
    expected = zero_family_potential(grid, 0, t, data.alpha)
    np.testing.assert_allclose(result.potential.p_values, expected.p_values, atol=1e-6)
    np.testing.assert_allclose(result.potential.q_values, expected.q_values, atol=1e-6)
    assert result.kernel.residual < 1e-10


def test_nystrom_agrees_with_degenerate():
    grid = Grid(0.0, np.pi, 256)
    data = lattice_data(16, {0: np.pi * np.exp(-0.5), 2: 0.8 * np.pi})
    degenerate = reconstruct(data, grid, 16)
    nystrom = reconstruct(data, grid, 16, method='nystrom')
    np.testing.assert_allclose(nystrom.potential.q_values, degenerate.potential.q_values, atol=5e-3)
    np.testing.assert_allclose(nystrom.potential.p_values, degenerate.potential.p_values, atol=5e-3)


def test_kernel_matches_F_definition():
    data = lattice_data(5, {1: 2.0})
    series = GLSeriesKernel(data, 5)
    F = build_F(series, 0.7, 0.2)
    phi_x = free_solution(np.array([1.0]), 0.0, 0.7)[0]
    phi_t = free_solution(np.array([1.0]), 0.0, 0.2)[0]
    np.testing.assert_allclose(F, (1.0 / 2.0 - 1.0 / np.pi) * np.outer(phi_x, phi_t), atol=1e-14)
    with pytest.raises(DomainError):
        build_F(series, 3.5, 0.0)


def test_degenerate_solution_residual():
    grid = Grid(0.0, np.pi, 512)
    series = GLSeriesKernel(lattice_data(10, {0: 2.5, -3: 4.0}), 10)
    kernel = solve_gl(series, grid)
    assert discrete_residual(series, grid, kernel.weights) < 1e-10
    np.testing.assert_allclose(kernel.at(100, grid.nodes[100]), kernel.diagonal[100], atol=1e-12)
    with pytest.raises(DomainError):
        kernel.at(100, grid.nodes[101])
    with pytest.raises(DomainError):
        solve_gl(series, grid, method='galerkin')
    recovered = recover_potential(kernel)
    k = kernel.diagonal
    np.testing.assert_allclose(recovered.q_values, k[:, 0, 0] - k[:, 1, 1])


def test_sine_round_trip(sin_q, cfg):
    N = 60
    data = norming_constants(sin_q, 0.0, find_eigenvalues(sin_q, 0.0, 0.0, -N, N, cfg=cfg), cfg)
    grid = Grid(0.0, np.pi, 2048)
    result = reconstruct(data, grid, N)
    x = grid.nodes
    interior = (x > 0.05 * np.pi) & (x < 0.95 * np.pi)
    assert np.max(np.abs(result.potential.q_values[interior] - np.sin(x[interior]))) < 5e-2
    assert np.max(np.abs(result.potential.p_values[interior])) < 5e-2


def test_contracts():
    grid = Grid(0.0, np.pi, 256)
    with pytest.raises(ContractViolation):
        reconstruct(lattice_data(40), grid, 40)
    angles = BoundaryAngles(0.0, 0.0)
    strayed = SpectralData.from_lambdas(angles, {n: n + 1.2 for n in range(-8, 9)},
                                        {n: np.pi for n in range(-8, 9)})
    with pytest.raises(ContractViolation):
        reconstruct(strayed, grid, 8)
    with pytest.raises(ContractViolation):
        GLSeriesKernel(lattice_data(5), 6)
