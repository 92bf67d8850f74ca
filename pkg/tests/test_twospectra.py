import numpy as np
import pytest

from diracspec.objects import BoundaryAngles, PotentialMatrix, SpectralData
from diracspec.objects.errors import ContractViolation, InapplicableError, InterlacingError, PoleError
from diracspec.objects.potential import zero_function
from diracspec.components import (TwoSpectraInput, norming_from_two_spectra, weyl_m, mirror_spectrum_p0,
                                  mirror_spectrum_q0, one_spectrum_norming_p0, one_spectrum_norming_q0,
                                  ambarzumyan_residual, find_eigenvalues, norming_constants)

N = 200


def lattice(alpha: float, beta: float, n_max: int) -> SpectralData:
    angles = BoundaryAngles(alpha, beta)
    return SpectralData.from_lambdas(angles, {n: n + angles.lattice_offset for n in range(-n_max, n_max + 1)})


@pytest.fixture(scope='module')
def sine_spectra(sin_q, cfg):
    spec_a = find_eigenvalues(sin_q, 0.0, 0.0, -N, N, cfg=cfg)
    spec_e = find_eigenvalues(sin_q, 0.2, 0.0, -N, N, cfg=cfg)
    return spec_a, spec_e


@pytest.mark.parametrize('n', [-3, 0, 1, 7])
def test_free_lattice_gives_pi(n):
    inp = TwoSpectraInput(lattice(0.0, 0.0, N), lattice(0.5, 0.0, N), N)
    assert norming_from_two_spectra(inp, n) == pytest.approx(np.pi, abs=1e-8)


def test_tail_closure_improves_truncation():
    inp = TwoSpectraInput(lattice(0.0, 0.0, 20), lattice(0.5, 0.0, 20), 20)
    with_tail = abs(norming_from_two_spectra(inp, 2) - np.pi)
    without_tail = abs(norming_from_two_spectra(inp, 2, tail=False) - np.pi)
    assert with_tail < 1e-10 < without_tail
    ascending = norming_from_two_spectra(inp, 2, paired=False)
    assert ascending == pytest.approx(norming_from_two_spectra(inp, 2), rel=1e-12)


def test_untruncated_error_halves(sin_q, cfg, sine_spectra):
    spec_a, spec_e = sine_spectra
    a_direct = norming_constants(sin_q, 0.0, spec_a.window(3, 3), cfg).a(3)
    errors = [abs(norming_from_two_spectra(TwoSpectraInput(spec_a, spec_e, trunc), 3, tail=False) / a_direct - 1.0)
              for trunc in (50, 100, 200)]
    for coarse, fine in zip(errors, errors[1:]):
        assert np.log2(coarse / fine) == pytest.approx(1.0, abs=0.3)


@pytest.mark.parametrize('n', [-2, 0, 3])
def test_two_spectra_match_direct(sin_q, cfg, sine_spectra, n):
    spec_a, spec_e = sine_spectra
    a_direct = norming_constants(sin_q, 0.0, spec_a.window(n, n), cfg).a(n)
    a_two = norming_from_two_spectra(TwoSpectraInput(spec_a, spec_e, N), n)
    assert a_two == pytest.approx(a_direct, rel=1e-3)


def test_input_contracts():
    spec_a = lattice(0.0, 0.0, 10)
    with pytest.raises(InapplicableError):
        TwoSpectraInput(spec_a, lattice(0.0, 0.0, 10), 10)
    with pytest.raises(ContractViolation):
        TwoSpectraInput(spec_a, lattice(0.5, 0.0, 10), 11)
    with pytest.raises(ContractViolation):
        TwoSpectraInput(spec_a, lattice(0.5, 0.3, 10), 10)
    inp = TwoSpectraInput(spec_a, lattice(0.5, 0.0, 10), 10)
    with pytest.raises(ContractViolation):
        norming_from_two_spectra(inp, 10)


def test_interlacing_violation():
    spec_a = lattice(0.0, 0.0, 5)
    # eigenvalues of the second problem pushed past those of the first
    bad = SpectralData.from_lambdas(BoundaryAngles(0.5, 0.0), {n: n + 0.2 for n in range(-5, 6)})
    with pytest.raises(InterlacingError):
        TwoSpectraInput(spec_a, bad, 5)


@pytest.fixture(scope='module')
def weak_q(unit_grid):
    return PotentialMatrix.from_functions(unit_grid, zero_function, lambda x: 0.3 * np.sin(x))


def test_weyl_function_free(zero_pot, cfg):
    lam = 0.3 + 0.2j
    sample = weyl_m(zero_pot, 0.0, 0.5, 0.0, lam, cfg)
    expected = np.sin(lam * np.pi) / np.sin(lam * np.pi + 0.5)
    assert sample.m_value == pytest.approx(expected, rel=1e-9)
    assert abs(weyl_m(zero_pot, 0.0, 0.5, 0.0, 2.0, cfg).m_value) < 1e-10


def test_weyl_function_limit(sin_q, cfg):
    eps = 0.5
    assert abs(weyl_m(sin_q, 0.0, eps, 0.0, 40j, cfg).m_value - np.exp(1j * eps)) < 0.05


@pytest.mark.parametrize('lam', [0.1 + 0.5j, -3.3 + 5.0j, 2.6 - 0.5j, 0.1 - 5.0j])
def test_weyl_function_herglotz(sin_q, cfg, lam):
    assert weyl_m(sin_q, 0.0, 0.5, 0.0, lam, cfg).m_value.imag * lam.imag > 0


def test_weyl_function_residue(sin_q, cfg):
    eps, delta = 0.5, 1e-4
    spec = norming_constants(sin_q, 0.0, find_eigenvalues(sin_q, 0.0, 0.0, -2, 2, 1e-13, cfg), cfg)
    for d in spec:
        upper, lower = (weyl_m(sin_q, 0.0, eps, 0.0, d.lam + s, cfg).m_value for s in (delta, -delta))
        assert (upper - lower).real / (2.0 * delta) == pytest.approx(d.a / np.sin(eps), rel=1e-4)


def test_weyl_function_pole(zero_pot, cfg):
    pole = 1.0 - 0.5 / np.pi
    with pytest.raises(PoleError) as info:
        weyl_m(zero_pot, 0.0, 0.5, 0.0, pole, cfg)
    assert info.value.nearest == pytest.approx(pole, abs=1e-10)


def test_mirror_p0(weak_q, cfg):
    spec = find_eigenvalues(weak_q, 0.3, 0.0, -10, 10, cfg=cfg)
    direct = find_eigenvalues(weak_q, -0.3, 0.0, -10, 10, cfg=cfg)
    mirror = mirror_spectrum_p0(spec)
    assert mirror.alpha == pytest.approx(-0.3)
    common = [n for n in mirror.indices if n in direct]
    assert len(common) >= 19
    for n in common:
        assert mirror.lam(n) == pytest.approx(direct.lam(n), abs=1e-8)
    with pytest.raises(InapplicableError):
        mirror_spectrum_p0(find_eigenvalues(weak_q, 0.0, 0.0, -3, 3, cfg=cfg))


def test_mirror_q0(unit_grid, cfg):
    pot = PotentialMatrix.from_functions(unit_grid, lambda x: 0.3 * np.sin(x), zero_function)
    beta = 0.25 * np.pi
    spec = find_eigenvalues(pot, 0.2, beta, -8, 8, cfg=cfg)
    direct = find_eigenvalues(pot, 0.5 * np.pi - 0.2, beta, -8, 8, cfg=cfg)
    mirror = mirror_spectrum_q0(spec)
    assert mirror.alpha == pytest.approx(0.5 * np.pi - 0.2)
    common = [n for n in mirror.indices if n in direct]
    assert len(common) >= 15
    for n in common:
        assert mirror.lam(n) == pytest.approx(direct.lam(n), abs=1e-8)
    with pytest.raises(InapplicableError):
        mirror_spectrum_q0(find_eigenvalues(pot, 0.2, 0.0, -3, 3, cfg=cfg))


def test_one_spectrum_norming_p0(weak_q, cfg):
    spec = find_eigenvalues(weak_q, 0.3, 0.0, -N, N, cfg=cfg)
    a_direct = norming_constants(weak_q, 0.3, spec.window(1, 1), cfg).a(1)
    assert one_spectrum_norming_p0(spec, 1, N - 5) == pytest.approx(a_direct, rel=2e-3)


def test_ambarzumyan_residual(zero_pot, weak_q, cfg):
    free = find_eigenvalues(zero_pot, 0.3, 0.0, -10, 10, cfg=cfg)
    assert ambarzumyan_residual(free, 0.3, 'p0') < 1e-10
    perturbed = find_eigenvalues(weak_q, 0.3, 0.0, -10, 10, cfg=cfg)
    assert ambarzumyan_residual(perturbed, 0.3, 'p0') > 0.05
    with pytest.raises(InapplicableError):
        ambarzumyan_residual(free, 0.3, 'q0')
    with pytest.raises(InapplicableError):
        ambarzumyan_residual(free, 0.3, 'r0')


def test_one_spectrum_norming_q0(unit_grid, cfg):
    pot = PotentialMatrix.from_functions(unit_grid, lambda x: 0.3 * np.sin(x), zero_function)
    beta = 0.25 * np.pi
    spec = find_eigenvalues(pot, 0.2, beta, -N, N, cfg=cfg)
    a_direct = norming_constants(pot, 0.2, spec.window(1, 1), cfg).a(1)
    assert one_spectrum_norming_q0(spec, 1, N - 5) == pytest.approx(a_direct, rel=2e-3)
