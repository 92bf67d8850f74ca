import numpy as np
import pytest

from diracspec.objects import BoundaryAngles, Grid, PotentialMatrix, Trajectory2, inner_product
from diracspec.objects.errors import ContractViolation, DomainError, ShapeError
from diracspec.objects.potential import sine_function, zero_function
from diracspec.components import (char_function, find_eigenvalues, norming_constants,
                                  similarity_coefficients, eigenfunctions, eigen_gradient, evf, evf_derivative,
                                  evf_zero, expand, interlacing_check, parseval_defect, lattice_shift,
                                  normalized_eigenfunction)


@pytest.mark.parametrize('alpha,beta', [(0.0, 0.0), (0.3, -0.2), (np.pi / 2, 0.0)])
def test_free_lattice(zero_pot, cfg, alpha, beta):
    spectrum = find_eigenvalues(zero_pot, alpha, beta, -50, 50, 1e-12, cfg)
    offset = BoundaryAngles(alpha, beta).lattice_offset
    for datum in spectrum:
        assert datum.lam == pytest.approx(datum.n + offset, abs=1e-10)
    assert spectrum.index_shift == 0


def test_free_norming_constants(zero_pot, cfg):
    spectrum = norming_constants(zero_pot, 0.0, find_eigenvalues(zero_pot, 0.0, 0.0, -10, 10, cfg=cfg), cfg)
    np.testing.assert_allclose(spectrum.norming(), np.pi, atol=1e-8)


def test_free_similarity_coefficients(zero_pot, cfg):
    spectrum = find_eigenvalues(zero_pot, 0.0, 0.0, -4, 4, cfg=cfg)
    spectrum = similarity_coefficients(zero_pot, 0.0, 0.0, spectrum, cfg)
    for datum in spectrum:
        assert datum.c == pytest.approx((-1.0) ** datum.n, abs=1e-8)
        assert datum.b == pytest.approx(np.pi, abs=1e-8)


def test_char_function_vanishes_at_eigenvalues(sin_q, cfg):
    spectrum = find_eigenvalues(sin_q, 0.2, 0.0, -3, 3, 1e-12, cfg)
    for datum in spectrum:
        assert abs(char_function(sin_q, 0.2, 0.0, datum.lam, cfg)) < 1e-10


def test_sine_potential_asymptotics(sin_q, cfg):
    spectrum = find_eigenvalues(sin_q, 0.0, 0.0, 20, 40, cfg=cfg)
    spectrum = norming_constants(sin_q, 0.0, spectrum, cfg)
    remainders = np.abs(spectrum.lambdas() - np.arange(20, 41))
    assert np.max(remainders) < 0.1
    assert np.max(np.abs(spectrum.norming() - np.pi)) < 0.05


def test_similarity_identity_on_sine_potential(sin_q, cfg):
    spectrum = find_eigenvalues(sin_q, 0.1, -0.3, -3, 3, cfg=cfg)
    spectrum = similarity_coefficients(sin_q, spectrum.alpha, spectrum.beta, spectrum, cfg)
    for datum in spectrum:
        assert datum.c ** 2 * datum.a == pytest.approx(datum.b, rel=1e-6)


def test_eigenfunctions_orthonormal(sin_q, cfg):
    spectrum = norming_constants(sin_q, 0.0, find_eigenvalues(sin_q, 0.0, 0.0, -3, 3, cfg=cfg), cfg)
    basis = eigenfunctions(sin_q, spectrum, cfg)
    for n in spectrum.indices:
        for m in spectrum.indices:
            expected = 1.0 if n == m else 0.0
            assert inner_product(basis[n], basis[m]) == pytest.approx(expected, abs=1e-5)
    h1 = normalized_eigenfunction(sin_q, 0.0, spectrum.lam(1), spectrum.a(1), cfg)
    np.testing.assert_allclose(h1.values, basis[1].values, atol=1e-12)
    with pytest.raises(ContractViolation):
        normalized_eigenfunction(sin_q, 0.0, spectrum.lam(1), 0.0, cfg)
    coefficients = expand(basis[1], basis)
    assert coefficients[1] == pytest.approx(1.0, abs=1e-5)
    assert abs(coefficients[-2]) < 1e-5


def test_angle_derivatives(sin_q, cfg):
    alpha, beta, n, delta = 0.2, 0.1, 1, 1e-4
    grad = eigen_gradient(sin_q, alpha, beta, n, cfg=cfg)

    def lam(a, b):
        return find_eigenvalues(sin_q, a, b, n, n, 1e-13, cfg).lam(n)

    d_alpha = (lam(alpha + delta, beta) - lam(alpha - delta, beta)) / (2 * delta)
    d_beta = (lam(alpha, beta + delta) - lam(alpha, beta - delta)) / (2 * delta)
    assert grad.d_alpha == pytest.approx(d_alpha, rel=1e-5)
    assert grad.d_beta == pytest.approx(d_beta, rel=1e-5)
    assert grad.d_alpha < 0 < grad.d_beta


def test_potential_derivatives(unit_grid, sin_q, cfg):
    n, eps = 0, 1e-5
    grad = eigen_gradient(sin_q, 0.0, 0.0, n, cfg=cfg)
    x = unit_grid.nodes

    def lam(p_func, q_func):
        pot = PotentialMatrix.from_functions(unit_grid, p_func, q_func)
        return find_eigenvalues(pot, 0.0, 0.0, n, n, 1e-13, cfg).lam(n)

    d_q = (lam(zero_function, lambda s: np.sin(s) + eps * np.cos(s))
           - lam(zero_function, lambda s: np.sin(s) - eps * np.cos(s))) / (2 * eps)
    assert d_q == pytest.approx(unit_grid.integrate(grad.d_q.values * np.cos(x)), rel=1e-4, abs=1e-7)

    d_p = (lam(lambda s: eps * s, sine_function) - lam(lambda s: -eps * s, sine_function)) / (2 * eps)
    assert d_p == pytest.approx(unit_grid.integrate(grad.d_p.values * x), rel=1e-4, abs=1e-7)


def test_free_eigenvalue_function(zero_pot, cfg):
    for gamma in (-4.0, -1.0, 0.0, 0.7, 2.5, 6.0):
        sample = evf(zero_pot, gamma, cfg=cfg)
        assert sample.value == pytest.approx(-gamma / np.pi, abs=1e-10)
        assert sample.alpha - np.pi * sample.m == pytest.approx(gamma, abs=1e-12)
    assert evf_derivative(zero_pot, 1.3, cfg=cfg) == pytest.approx(-1.0 / np.pi, abs=1e-9)
    assert evf_zero(zero_pot, cfg=cfg).gamma == pytest.approx(0.0, abs=1e-10)


def test_eigenvalue_function_monotone(sin_q, cfg):
    gammas = np.linspace(-5.0, 5.0, 21)
    values = [evf(sin_q, g, cfg=cfg).value for g in gammas]
    assert all(b < a for a, b in zip(values, values[1:]))
    delta = 1e-4
    slope = (evf(sin_q, 0.9 + delta, cfg=cfg).value - evf(sin_q, 0.9 - delta, cfg=cfg).value) / (2 * delta)
    assert evf_derivative(sin_q, 0.9, cfg=cfg) == pytest.approx(slope, rel=1e-5)
    zero = evf_zero(sin_q, cfg=cfg)
    assert abs(zero.value) < 1e-9


def test_interlacing(sin_q, cfg):
    lo = find_eigenvalues(sin_q, -0.3, 0.0, -5, 5, cfg=cfg)
    hi = find_eigenvalues(sin_q, 0.3, 0.0, -5, 5, cfg=cfg)
    assert interlacing_check(lo, hi)
    with pytest.raises(ContractViolation):
        interlacing_check(hi, lo)


def test_parseval_defect_decreases(unit_grid, sin_q, cfg):
    spectrum = norming_constants(sin_q, 0.0, find_eigenvalues(sin_q, 0.0, 0.0, -50, 50, cfg=cfg), cfg)
    basis = eigenfunctions(sin_q, spectrum, cfg)
    x = unit_grid.nodes
    f = Trajectory2(unit_grid, np.sin(x), x * (np.pi - x))
    defects = [parseval_defect(f, basis, N) for N in (10, 25, 50)]
    assert defects[-1] < 1e-2
    assert defects[0] > defects[1] > defects[2]
    with pytest.raises(ShapeError):
        parseval_defect(f, basis, 60)


def test_lattice_shift():
    lambdas = {n: n + 1.0 + 0.01 * n for n in range(-3, 4)}
    assert lattice_shift(lambdas, 0.0) == 1
    assert lattice_shift({n: float(n) for n in range(5)}, 0.0) == 0


def test_requires_unit_interval(cfg):
    pot = PotentialMatrix.zero(Grid(0.0, 1.0, 256))
    with pytest.raises(DomainError):
        find_eigenvalues(pot, 0.0, 0.0, 0, 1)
    with pytest.raises(ShapeError):
        find_eigenvalues(PotentialMatrix.zero(Grid(0.0, np.pi, 256)), 0.0, 0.0, 2, 1)
