import numpy as np
import pytest

from diracspec.objects import Grid
from diracspec.objects.errors import DomainError
from diracspec.components import HermiteBasis, hermite_functions, hermite_phi, model_spectrum, dirac_residual
from diracspec.components.hermite import model_x_max


def test_hermite_basis_is_orthonormal():
    basis = HermiteBasis(20, Grid(-15.0, 15.0, 4096))
    np.testing.assert_allclose(basis.gram(), np.eye(21), atol=1e-10)
    assert basis.recurrence_residual() < 1e-12


def test_low_order_closed_forms():
    x = np.linspace(-3.0, 3.0, 7)
    assert hermite_phi(0, 0.0) == pytest.approx(np.pi ** -0.25)
    phi0 = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    np.testing.assert_allclose(hermite_phi(1, x), np.sqrt(2.0) * x * phi0, atol=1e-15)
    np.testing.assert_allclose(hermite_phi(2, x), (2.0 * x * x - 1.0) / np.sqrt(2.0) * phi0, atol=1e-14)
    assert hermite_functions(3, x).shape == (4, 7)


def test_half_axis_bc0_data():
    model = model_spectrum('half_bc0', -2, 2)
    assert model.lam(0) == 0.0
    assert model.lam(1) == pytest.approx(2.0)
    assert model.lam(2) == pytest.approx(2.0 * np.sqrt(2.0))
    assert model.lam(-1) == pytest.approx(-2.0)
    assert model.a(0) == pytest.approx(0.5 * np.sqrt(np.pi))
    assert model.a(1) == pytest.approx(2.0 * np.sqrt(np.pi))
    assert model.a(-1) == pytest.approx(2.0 * np.sqrt(np.pi))
    np.testing.assert_allclose(model.eigenfunction(1, 0.0)[0], [0.0, -1.0], atol=1e-15)


def test_half_axis_pi2_data():
    model = model_spectrum('half_bc_pi2', -1, 2)
    assert model.index_shift == 1
    assert model.alpha == pytest.approx(0.5 * np.pi)
    assert model.lam(0) == pytest.approx(-np.sqrt(2.0))
    assert model.lam(1) == pytest.approx(np.sqrt(2.0))
    assert model.lam(-1) == pytest.approx(-np.sqrt(6.0))
    for n in (0, 1):
        assert model.a(n) == pytest.approx(np.sqrt(np.pi))
    spectrum = model.spectrum()
    assert spectrum.index_shift == 1
    assert list(spectrum.indices) == [-1, 0, 1, 2]


@pytest.mark.parametrize('flavor', ['whole', 'half_bc0', 'half_bc_pi2'])
def test_eigenfunctions_solve_the_model(flavor):
    model = model_spectrum(flavor, -3, 3)
    grid = model.grid(4096)
    pot = model.potential(grid)
    for n in model.indices:
        assert dirac_residual(pot, model.trajectory(n, grid), model.lam(n)) < 1e-6


def test_half_axis_norms_match_quadrature():
    model = model_spectrum('half_bc0', -2, 2)
    grid = model.grid(4096)
    for n in model.indices:
        assert model.trajectory(n, grid).norm2() == pytest.approx(model.a(n), rel=1e-10)


def test_model_errors():
    with pytest.raises(DomainError):
        model_spectrum('dirichlet', 0, 1)
    with pytest.raises(DomainError):
        model_spectrum('whole', 2, 1)
    with pytest.raises(DomainError):
        hermite_functions(-1, 0.0)
    assert model_x_max(0) == 12.0
    assert model_x_max(200) == pytest.approx(np.sqrt(401.0) + 6.0)
    assert model_spectrum('whole', -1, 1).grid(64).a == pytest.approx(-12.0)
