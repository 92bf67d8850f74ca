"""
Invariant suite behind the `check` subcommand. Every check returns a measured
defect and the threshold it must stay under.
"""
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.special import erfc

from diracspec.objects import (Logger, BoundaryAngles, Grid, PotentialMatrix, SpectralData, SurgeryPlan,
                               TSequence, Trajectory2, B_REAL, cumulative_c, inner_product, pauli_algebra_selftest,
                               reduce_angle)
from diracspec.objects.errors import DiracSpecError
from diracspec.components import (SolverConfig, GLSeriesKernel, HalfAxisProblem, HermiteBasis, TwoSpectraInput,
                                  cauchy_batch, dirac_residual, discrete_residual, eigen_gradient, eigenfunctions,
                                  evf, evf_derivative, find_eigenvalues, fundamental_matrix, interlacing_check,
                                  l1_distance, model_spectrum, norming_constants, norming_from_two_spectra,
                                  reconstruct, recover_potential, shift_finite_explicit, shift_finite_recurrent,
                                  shift_one, solve_cauchy, solve_gl, solve_terminal, surgery, weyl_m, weyl_m0,
                                  wronskian, zero_family_potential)

from ISP_functions.batch_functions import asyncSpectrum_Linux, collector_to_spectrum
from ISP_functions.datacollector import DataCollector
from ISP_functions.spectral_io import emit_spectral_json

logger = Logger.get_instance()

@dataclass(frozen=True)
class CheckOutcome:
    value: float
    threshold: float
    detail: str = ''

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.threshold)


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    run: Callable[[int], CheckOutcome]


def _unit_grid(m: int) -> Grid:
    return Grid(0.0, np.pi, m)


def _sin_q(m: int) -> PotentialMatrix:
    return PotentialMatrix.builtin('sin-q', _unit_grid(m))


def _precise(m: int) -> SolverConfig:
    return SolverConfig('magnus4', m)


def _lattice_data(N: int, norming: dict[int, float] | None = None) -> SpectralData:
    a = {n: np.pi for n in range(-N, N + 1)}
    a.update(norming or {})
    return SpectralData.from_lambdas(BoundaryAngles(0.0), {n: float(n) for n in range(-N, N + 1)}, a)


def _lattice(alpha: float, N: int) -> SpectralData:
    angles = BoundaryAngles(alpha)
    return SpectralData.from_lambdas(angles, {n: n + angles.lattice_offset for n in range(-N, N + 1)})


# core

def check_pauli(m: int) -> CheckOutcome:
    return CheckOutcome(0.0 if pauli_algebra_selftest() else 1.0, 0.0)


def check_angle_reduction(m: int) -> CheckOutcome:
    worst = 0.0
    for theta in np.linspace(-7.0, 7.0, 57):
        reduced, k = reduce_angle(theta)
        inside = -0.5 * np.pi < reduced <= 0.5 * np.pi + 1e-15
        worst = max(worst, abs(reduced + k * np.pi - theta) + (0.0 if inside else 1.0))
    return CheckOutcome(worst, 1e-12)


def check_cumulative_c(m: int) -> CheckOutcome:
    pot = _sin_q(m)
    xs = np.linspace(0.0, np.pi, 9)
    values = np.array([cumulative_c(pot, x) for x in xs])
    drop = float(max(0.0, -np.min(np.diff(values))))
    return CheckOutcome(drop + abs(values[0]) + abs(values[-1] - 2.0), 1e-4, 'int |sin| = 2')


def check_trapezoid(m: int) -> CheckOutcome:
    errors = []
    for size in (500, 1000):
        grid = Grid(0.0, 1.0, size)
        errors.append(abs(float(grid.integrate(grid.nodes ** 2)) - 1.0 / 3.0))
    order = np.log2(errors[0] / errors[1])
    # both defects scaled to their own tolerance
    return CheckOutcome(max(errors[1] / 1e-6, abs(order - 2.0) / 0.1), 1.0,
                        f'error {errors[1]:.2e} at m = 1000, observed order {order:.3f}')


def check_inner_product(m: int) -> CheckOutcome:
    grid = _unit_grid(m)
    values = cauchy_batch(_sin_q(m), [0.3, 2.0, -4.5 + 1.0j], np.array([0.0, -1.0]), SolverConfig(m=m))
    norms = [inner_product(Trajectory2.from_array(grid, row), Trajectory2.from_array(grid, row)) for row in values]
    negative = max(0.0, -min(float(np.real(v)) for v in norms))
    zero = Trajectory2.from_array(grid, np.zeros((grid.size, 2)))
    return CheckOutcome(negative + abs(complex(inner_product(zero, zero))), 0.0)


# cauchy

def check_free_solution(m: int) -> CheckOutcome:
    pot = PotentialMatrix.zero(_unit_grid(m))
    alpha, lam = 0.3, 2.7
    phi = solve_cauchy(pot, lam, alpha, _precise(m))
    x = phi.grid.nodes
    exact = np.stack([np.sin(alpha + lam * x), -np.cos(alpha + lam * x)], axis=-1)
    return CheckOutcome(float(np.max(np.abs(phi.values - exact))), 1e-8)


def check_constant_potential(m: int) -> CheckOutcome:
    q0, lam, alpha = 1.0, 0.7, 0.4
    pot = PotentialMatrix.builtin('const-q', _unit_grid(m))
    phi = solve_cauchy(pot, lam, alpha, SolverConfig(m=m))
    generator = np.array([[q0, -lam], [lam, -q0]])
    start = np.array([np.sin(alpha), -np.cos(alpha)])
    picks = np.linspace(0, m, 9).astype(int)
    worst = max(float(np.max(np.abs(phi.values[i] - expm(phi.grid.nodes[i] * generator) @ start))) for i in picks)
    return CheckOutcome(worst, 1e-9, 'p = 0, q = 1 against the matrix exponential')


def check_rk4_order(m: int) -> CheckOutcome:
    pot, lam, alpha = _sin_q(m), 5.0, 0.3
    reference = solve_cauchy(pot, lam, alpha, _precise(4096)).end()
    errors = [float(np.max(np.abs(solve_cauchy(pot, lam, alpha, SolverConfig('rk4', size)).end() - reference)))
              for size in (256, 512)]
    order = float(np.log2(errors[0] / errors[1]))
    return CheckOutcome(abs(order - 4.0), 0.5, f'observed order {order:.3f}')


def check_terminal_round_trip(m: int) -> CheckOutcome:
    pot, lam, beta = _sin_q(m), 2.0, 0.3
    cfg = SolverConfig(m=m)
    psi = solve_terminal(pot, lam, beta, cfg)
    forward = cauchy_batch(pot, [lam], psi.start(), cfg)[0]
    return CheckOutcome(float(np.max(np.abs(forward[-1] - [np.sin(beta), -np.cos(beta)]))), 1e-9)


def check_complex_path(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), SolverConfig(m=m)
    real = solve_cauchy(pot, 1.7, 0.2, cfg)
    complex_ = solve_cauchy(pot, 1.7 + 0.0j, 0.2, cfg)
    return CheckOutcome(float(np.max(np.abs(real.values - complex_.values))), 1e-12)


def check_unimodular(m: int) -> CheckOutcome:
    fm = fundamental_matrix(_sin_q(m), 1.3, _precise(m))
    return CheckOutcome(float(np.max(np.abs(fm.determinant() - 1.0))), 1e-8)


def check_wronskian(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), _precise(m)
    report = wronskian(solve_cauchy(pot, 0.8, 0.2, cfg), solve_terminal(pot, 0.8, -0.4, cfg))
    return CheckOutcome(report.deviation, 1e-8)


# eigen

def check_free_lattice(m: int) -> CheckOutcome:
    worst = 0.0
    pot = PotentialMatrix.zero(_unit_grid(m))
    for alpha, beta in ((0.0, 0.0), (np.pi / 4, 0.0), (-0.3, 0.2)):
        spec = find_eigenvalues(pot, alpha, beta, -50, 50, 1e-12, _precise(m))
        offset = spec.angles.lattice_offset
        worst = max(worst, max(abs(d.lam - d.n - offset) for d in spec))
    return CheckOutcome(worst, 1e-10)


def check_free_norming(m: int) -> CheckOutcome:
    pot, cfg = PotentialMatrix.zero(_unit_grid(m)), _precise(m)
    spec = norming_constants(pot, 0.4, find_eigenvalues(pot, 0.4, 0.0, -5, 5, 1e-12, cfg), cfg)
    return CheckOutcome(float(np.max(np.abs(spec.norming() - np.pi))), 1e-8)


def check_orthonormality(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), _precise(m)
    spec = norming_constants(pot, 0.0, find_eigenvalues(pot, 0.0, 0.0, -10, 10, 1e-12, cfg), cfg)
    funcs = eigenfunctions(pot, spec, cfg)
    indices = list(spec.indices)
    gram = np.array([[inner_product(funcs[i], funcs[j]) for j in indices] for i in indices])
    return CheckOutcome(float(np.max(np.abs(gram - np.eye(len(indices))))), 1e-6, '|n| <= 10')


def check_interlacing(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), _precise(m)
    lo = find_eigenvalues(pot, 0.0, 0.0, -6, 6, 1e-12, cfg)
    hi = find_eigenvalues(pot, 0.5, 0.0, -6, 6, 1e-12, cfg)
    return CheckOutcome(0.0 if interlacing_check(lo, hi) else 1.0, 0.0)


def check_gradient(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), _precise(m)
    grad = eigen_gradient(pot, 0.1, 0.0, 1, cfg=cfg)
    delta = 1e-5
    plus = find_eigenvalues(pot, 0.1 + delta, 0.0, 1, 1, 1e-13, cfg).lam(1)
    minus = find_eigenvalues(pot, 0.1 - delta, 0.0, 1, 1, 1e-13, cfg).lam(1)
    fd = (plus - minus) / (2.0 * delta)
    return CheckOutcome(abs(grad.d_alpha - fd) / abs(fd), 1e-5, 'd lambda_1 / d alpha')


def check_evf(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), _precise(m)
    rising = 0.0
    for turn in (-1, 0, 1):
        gammas = np.pi * turn + np.linspace(-0.5 * np.pi, 0.5 * np.pi, 51)[1:]
        values = np.array([evf(pot, g, cfg=cfg).value for g in gammas])
        rising = max(rising, float(max(0.0, np.max(np.diff(values)))))
    delta = 1e-5
    fd = (evf(pot, 0.7 + delta, cfg=cfg).value - evf(pot, 0.7 - delta, cfg=cfg).value) / (2.0 * delta)
    return CheckOutcome(rising + abs(evf_derivative(pot, 0.7, cfg=cfg) - fd), 1e-5, '50 samples per interval')


# twospectra

def check_two_spectra_lattice(m: int) -> CheckOutcome:
    N = 200
    value = norming_from_two_spectra(TwoSpectraInput(_lattice(0.0, N), _lattice(0.5, N), N), 0)
    return CheckOutcome(abs(value - np.pi), 1e-3)


def check_truncation_rate(m: int) -> CheckOutcome:
    errors = []
    for N in (50, 100, 200):
        inp = TwoSpectraInput(_lattice(0.0, N), _lattice(0.5, N), N)
        errors.append(abs(norming_from_two_spectra(inp, 2, tail=False) / np.pi - 1.0))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    return CheckOutcome(float(np.max(np.abs(orders - 1.0))), 0.3, f'relative errors {errors}')


def check_pairing(m: int) -> CheckOutcome:
    N = 400
    inp = TwoSpectraInput(_lattice(0.0, N), _lattice(0.5, N), N)
    paired = norming_from_two_spectra(inp, 3, tail=False)
    ascending = norming_from_two_spectra(inp, 3, tail=False, paired=False)
    return CheckOutcome(abs(paired - ascending), 1e-6)


def check_weyl_limit(m: int) -> CheckOutcome:
    eps = 0.5
    value = weyl_m(_sin_q(m), 0.0, eps, 0.0, 40j, _precise(m)).m_value
    return CheckOutcome(abs(value - np.exp(1j * eps)), 0.05, 'm(40i) against e^{i(eps - alpha)}')


def check_herglotz(m: int) -> CheckOutcome:
    pot, cfg = _sin_q(m), _precise(m)
    wrong = 0
    for x in (-3.3, 0.1, 2.6):
        for mu in (-5.0, -0.5, 0.5, 5.0):
            sample = weyl_m(pot, 0.0, 0.5, 0.0, complex(x, mu), cfg)
            wrong += int(not sample.m_value.imag * mu > 0)
    return CheckOutcome(float(wrong), 0.0, 'sign of Im m against Im lambda')


def check_weyl_residue(m: int) -> CheckOutcome:
    pot, cfg, eps = _sin_q(m), _precise(m), 0.5
    spec = norming_constants(pot, 0.0, find_eigenvalues(pot, 0.0, 0.0, -2, 2, 1e-13, cfg), cfg)
    delta, worst = 1e-4, 0.0
    for d in spec:
        slope = (weyl_m(pot, 0.0, eps, 0.0, d.lam + delta, cfg).m_value
                 - weyl_m(pot, 0.0, eps, 0.0, d.lam - delta, cfg).m_value).real / (2.0 * delta)
        expected = d.a / np.sin(eps)
        worst = max(worst, abs(slope - expected) / expected)
    return CheckOutcome(worst, 1e-4, 'dm/dlambda = a_n / sin(eps - alpha)')


# isospectral

def check_isospectral(m: int) -> CheckOutcome:
    pot, cfg = PotentialMatrix.zero(_unit_grid(m)), _precise(m)
    t = 0.5
    result = shift_one(pot, 0.0, 0, t, window=(-3, 3), cfg=cfg)
    closed = zero_family_potential(result.omega_t.domain, 0, t)
    p, q = closed.evaluate(result.omega_t.domain.nodes)
    family = max(np.max(np.abs(result.omega_t.p_values - p)), np.max(np.abs(result.omega_t.q_values - q)))
    mass = abs(l1_distance(result.omega_t, pot.on_grid(result.omega_t.domain)) - t)
    return CheckOutcome(float(family + mass), 1e-5)


@lru_cache(maxsize=1)
def _shifted_sine(m: int) -> tuple:
    grid = _unit_grid(m)
    pot = PotentialMatrix.from_samples(grid, np.zeros(grid.size), np.sin(grid.nodes), interpolation='cubic')
    cfg = _precise(m)
    base = norming_constants(pot, 0.0, find_eigenvalues(pot, 0.0, 0.0, -10, 10, 1e-12, cfg), cfg)
    return base, shift_one(pot, 0.0, 0, 0.7, window=(-10, 10), cfg=cfg), cfg


def check_isospectral_spectrum(m: int) -> CheckOutcome:
    base, result, cfg = _shifted_sine(4096)
    moved = norming_constants(result.omega_t, 0.0,
                              find_eigenvalues(result.omega_t, 0.0, 0.0, -10, 10, 1e-12, cfg), cfg)
    shift = float(np.max(np.abs(moved.lambdas() - base.lambdas())))
    scale = max(abs(moved.a(n) / (base.a(n) * (np.exp(-0.7) if n == 0 else 1.0)) - 1.0) for n in base.indices)
    return CheckOutcome(max(shift, scale), 1e-6, 'a_0 multiplied by e^{-t}, |n| <= 10')


def check_isospectral_eigenfunctions(m: int) -> CheckOutcome:
    _, result, _ = _shifted_sine(4096)
    worst = max(dirac_residual(result.omega_t, h, result.lambdas[n]) for n, h in result.eigenfunctions.items())
    return CheckOutcome(float(worst), 1e-5)


def check_recurrent_explicit(m: int) -> CheckOutcome:
    pot, cfg = PotentialMatrix.zero(_unit_grid(m)), _precise(m)
    tseq = TSequence({0: 0.4, 2: -0.3})
    first = shift_finite_recurrent(pot, 0.0, tseq, window=(-3, 3), cfg=cfg).omega_t
    second = shift_finite_explicit(pot, 0.0, tseq, window=(-3, 3), cfg=cfg).omega_t
    gap = max(np.max(np.abs(first.p_values - second.p_values)), np.max(np.abs(first.q_values - second.q_values)))
    return CheckOutcome(float(gap), 1e-8)


# glreconstruct

def check_gl_lattice(m: int) -> CheckOutcome:
    N = 20
    rec = reconstruct(_lattice_data(N), Grid(0.0, np.pi, max(512, 8 * N)), N)
    pot = rec.potential
    return CheckOutcome(float(max(np.max(np.abs(pot.p_values)), np.max(np.abs(pot.q_values)))), 1e-6)


def check_gl_one_constant(m: int) -> CheckOutcome:
    t, grid = 0.5, Grid(0.0, np.pi, 2048)
    rec = reconstruct(_lattice_data(20, {0: np.pi * np.exp(-t)}), grid, 20)
    expected = zero_family_potential(grid, 0, t)
    gap = max(np.max(np.abs(rec.potential.p_values - expected.p_values)),
              np.max(np.abs(rec.potential.q_values - expected.q_values)))
    return CheckOutcome(float(gap), 1e-6)


def check_gl_defects(m: int) -> CheckOutcome:
    rec = reconstruct(_lattice_data(20, {0: 2.5, -3: 4.0}), Grid(0.0, np.pi, 2048), 20)
    return CheckOutcome(max(rec.orthogonality_defect, rec.boundary_defect), 1e-3,
                        f'orthogonality {rec.orthogonality_defect:.2e}, boundary {rec.boundary_defect:.2e}')


def check_gl_symmetry(m: int) -> CheckOutcome:
    grid = Grid(0.0, np.pi, 512)
    kernel = solve_gl(GLSeriesKernel(_lattice_data(10, {1: 2.0}), 10), grid)
    K = kernel.diagonal
    omega = K @ B_REAL - B_REAL @ K
    asym = np.max(np.abs(omega - np.swapaxes(omega, -1, -2)))
    trace = np.max(np.abs(np.trace(omega, axis1=-2, axis2=-1)))
    recovered = np.max(np.abs(omega - recover_potential(kernel).omega()))
    return CheckOutcome(float(asym + trace + recovered), 1e-14, 'K B - B K, symmetric and traceless')


def check_gl_noise(m: int) -> CheckOutcome:
    grid = Grid(0.0, np.pi, 512)
    series = GLSeriesKernel(_lattice_data(10, {0: 2.5, -3: 4.0}), 10)
    kernel = solve_gl(series, grid)
    noise = np.random.default_rng(7).standard_normal(kernel.weights.shape)
    small, large = (discrete_residual(series, grid, kernel.weights + level * noise) for level in (1e-6, 2e-6))
    return CheckOutcome(abs(large / small - 2.0), 1e-3,
                        f'residual per unit noise {small / 1e-6:.3e}, condition {kernel.condition:.3e}')


# halfaxis

def _model_problem(alpha: float = 0.0) -> tuple:
    model = model_spectrum('half_bc0', -2, 2)
    grid = model.grid(4096)
    return model, HalfAxisProblem(model.potential(grid), alpha, _precise(grid.m))


def check_hermite_basis(m: int) -> CheckOutcome:
    basis = HermiteBasis(40, Grid(-12.0, 12.0, 4096))
    gram = basis.gram()
    return CheckOutcome(float(np.max(np.abs(gram - np.eye(41))) + basis.recurrence_residual()), 1e-10)


def check_whole_axis(m: int) -> CheckOutcome:
    model = model_spectrum('whole', -20, 20)
    grid = model.grid(16384)
    pot = model.potential(grid)
    worst = max(dirac_residual(pot, model.trajectory(n, grid), model.lam(n)) for n in model.indices)
    return CheckOutcome(float(worst), 1e-8, 'U_n, |n| <= 20')


def check_hermite_shooting(m: int) -> CheckOutcome:
    _, problem = _model_problem()
    worst = max(abs(problem.eigenvalue(1) - 2.0), abs(problem.eigenvalue(2) - 2.0 * np.sqrt(2.0)))
    return CheckOutcome(float(worst), 1e-6)


def check_hermite_norming(m: int) -> CheckOutcome:
    _, problem = _model_problem()
    data = problem.eigen_data(0, 1)
    worst = max(abs(data.a(0) - 0.5 * np.sqrt(np.pi)), abs(data.a(1) - 2.0 * np.sqrt(np.pi)))
    return CheckOutcome(float(worst), 1e-8)


def check_weyl(m: int) -> CheckOutcome:
    _, problem = _model_problem()
    upper = abs(weyl_m0(problem, 50j).m_value - 1j)
    lower = abs(weyl_m0(problem, -50j).m_value + 1j)
    return CheckOutcome(float(max(upper, lower)), 0.05)


def check_weyl_decay(m: int) -> CheckOutcome:
    _, problem = _model_problem()
    errors = [abs(weyl_m0(problem, 1j * mu).m_value - 1j) for mu in (10.0, 20.0, 40.0, 80.0)]
    growth = max(0.0, float(np.max(np.diff(errors))))
    return CheckOutcome(growth, 0.0, f'|m0(i mu) - i| = {errors}')


# surgery

def check_surgery_removal(m: int) -> CheckOutcome:
    model, _ = _model_problem()
    result = surgery(model, SurgeryPlan(removals=(0,)))
    grid = result.potential.domain
    x = grid.nodes[grid.nodes <= 4.0]
    _, q = result.potential.evaluate(x)
    exact = x - np.exp(-x * x) / (0.5 * np.sqrt(np.pi) * erfc(x))
    return CheckOutcome(float(np.max(np.abs(q - exact))), 1e-3, 'q = x - e^{-x^2} / (sqrt(pi)/2 erfc x)')


def check_surgery_removal_spectrum(m: int) -> CheckOutcome:
    model, _ = _model_problem()
    result = surgery(model, SurgeryPlan(removals=(0,)), model.grid(4096))
    problem = HalfAxisProblem(result.potential, 0.0)
    left = len(problem.roots(-0.5, 0.5))
    kept = problem.roots(1.5, 3.0)
    if len(kept) != 2:
        return CheckOutcome(float('inf'), 1e-4, f'roots in [1.5, 3]: {kept}')
    gap = float(np.max(np.abs(np.array(kept) - [2.0, 2.0 * np.sqrt(2.0)])))
    return CheckOutcome(gap + left, 1e-4, 'no eigenvalue near 0, 2 and 2 sqrt 2 kept')


def check_surgery_rescaling(m: int) -> CheckOutcome:
    model, _ = _model_problem()
    b = 0.5 * model.a(0)
    result = surgery(model, SurgeryPlan(rescalings=((0, b),)), model.grid(4096))
    problem = HalfAxisProblem(result.potential, 0.0)
    roots = problem.roots(-0.5, 3.0)
    if len(roots) != 3:
        return CheckOutcome(float('inf'), 1.0, f'roots in [-0.5, 3]: {roots}')
    shift = float(np.max(np.abs(np.array(roots) - [0.0, 2.0, 2.0 * np.sqrt(2.0)])))
    norm = abs(problem.norm2(problem.decaying_solution(roots[0]), roots[0]) / b - 1.0)
    return CheckOutcome(max(shift / 1e-4, norm / 1e-3), 1.0, 'eigenvalues kept, a_0 halved')


def check_surgery_addition(m: int) -> CheckOutcome:
    model, _ = _model_problem()
    result = surgery(model, SurgeryPlan(additions=((1.1, 1.0),)), model.grid(4096))
    roots = HalfAxisProblem(result.potential, 0.0).roots(0.5, 1.5)
    if len(roots) != 1:
        return CheckOutcome(float('inf'), 1e-4, f'roots in [0.5, 1.5]: {roots}')
    return CheckOutcome(abs(roots[0] - 1.1), 1e-4, 'mu = 1.1, c = 1')


# io

def check_determinism(m: int) -> CheckOutcome:
    pot = _sin_q(256)
    blobs = []
    with tempfile.TemporaryDirectory() as folder:
        for name in ('first.json', 'second.json'):
            collector = asyncSpectrum_Linux(cores=1, pot=pot, alpha=0.0, beta=0.0, n_min=-3, n_max=3)
            path = emit_spectral_json(collector_to_spectrum(collector, 0.0, 0.0), os.path.join(folder, name))
            with open(path, 'rb') as handle:
                blobs.append(handle.read())
    return CheckOutcome(0.0 if blobs[0] == blobs[1] else 1.0, 0.0, 'spectrum JSON written twice')


CHECKS: tuple[Check, ...] = (
    Check('core', 'pauli algebra', check_pauli),
    Check('core', 'angle reduction', check_angle_reduction),
    Check('core', 'cumulative c', check_cumulative_c),
    Check('core', 'trapezoid order', check_trapezoid),
    Check('core', 'inner product', check_inner_product),
    Check('cauchy', 'free solution', check_free_solution),
    Check('cauchy', 'constant potential', check_constant_potential),
    Check('cauchy', 'rk4 order', check_rk4_order),
    Check('cauchy', 'terminal round trip', check_terminal_round_trip),
    Check('cauchy', 'real and complex paths', check_complex_path),
    Check('cauchy', 'unimodular fundamental matrix', check_unimodular),
    Check('cauchy', 'wronskian constancy', check_wronskian),
    Check('eigen', 'free lattice', check_free_lattice),
    Check('eigen', 'free norming constants', check_free_norming),
    Check('eigen', 'orthonormality', check_orthonormality),
    Check('eigen', 'interlacing', check_interlacing),
    Check('eigen', 'gradient', check_gradient),
    Check('eigen', 'eigenvalue function', check_evf),
    Check('twospectra', 'lattice norming', check_two_spectra_lattice),
    Check('twospectra', 'truncation rate', check_truncation_rate),
    Check('twospectra', 'pairing order', check_pairing),
    Check('twospectra', 'weyl limit', check_weyl_limit),
    Check('twospectra', 'herglotz sign', check_herglotz),
    Check('twospectra', 'weyl residue', check_weyl_residue),
    Check('isospectral', 'zero family', check_isospectral),
    Check('isospectral', 'spectrum kept', check_isospectral_spectrum),
    Check('isospectral', 'transformed eigenfunctions', check_isospectral_eigenfunctions),
    Check('isospectral', 'recurrent vs explicit', check_recurrent_explicit),
    Check('glreconstruct', 'lattice round trip', check_gl_lattice),
    Check('glreconstruct', 'one changed norming constant', check_gl_one_constant),
    Check('glreconstruct', 'eigenfunction defects', check_gl_defects),
    Check('glreconstruct', 'symmetric potential', check_gl_symmetry),
    Check('glreconstruct', 'noise amplification', check_gl_noise),
    Check('halfaxis', 'hermite basis', check_hermite_basis),
    Check('halfaxis', 'whole-axis eigenfunctions', check_whole_axis),
    Check('halfaxis', 'hermite eigenvalues', check_hermite_shooting),
    Check('halfaxis', 'hermite norming constants', check_hermite_norming),
    Check('halfaxis', 'weyl asymptotics', check_weyl),
    Check('halfaxis', 'weyl convergence', check_weyl_decay),
    Check('surgery', 'removal closed form', check_surgery_removal),
    Check('surgery', 'removal spectrum', check_surgery_removal_spectrum),
    Check('surgery', 'rescaling', check_surgery_rescaling),
    Check('surgery', 'addition', check_surgery_addition),
    Check('io', 'deterministic output', check_determinism),
)
def run_checks(m: int = 2048, modules: tuple[str, ...] | None = None) -> DataCollector:
    """
    Run the suite.

    Args:
        m: Grid size of the regular-problem checks
        modules: Restrict to these module names

    Returns:
        DataCollector: One row per check with columns module, check, value, threshold, passed, detail
    """
    rows = []
    for check in CHECKS:
        if modules and check.module not in modules:
            continue
        try:
            outcome = check.run(m)
        except DiracSpecError as error:
            outcome = CheckOutcome(float('inf'), 0.0, f'{type(error).__name__}: {error}')
        if outcome.passed:
            logger.log(f'check {check.module}/{check.name} passed', value=f'{outcome.value:.3e}')
        else:
            logger.error(f'check {check.module}/{check.name} failed', value=f'{outcome.value:.3e}',
                         threshold=f'{outcome.threshold:.1e}')
        rows.append({'module': check.module, 'check': check.name, 'value': outcome.value,
                     'threshold': outcome.threshold, 'passed': outcome.passed, 'detail': outcome.detail})
    return DataCollector.from_rows(rows)
