from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..objects import Logger, BoundaryAngles, PotentialMatrix, SpectralData, WeylSample
from ..objects.errors import (CoincidentSpectraError, ContractViolation, InapplicableError,
                              InterlacingError, PoleError)
from .cauchy import SolverConfig, terminal_batch
from .eigen import find_eigenvalues, lattice_shift

DENOMINATOR_FLOOR = 1e-14
POLE_FLOOR = 1e-10
ANGLE_TOL = 1e-12

logger = Logger.get_instance()

@dataclass(frozen=True)
class TwoSpectraInput:
    """
    Spectra of L(p, q, alpha, beta) and L(p, q, epsilon, beta) with a symmetric truncation N.
    """
    spec_a: SpectralData
    spec_e: SpectralData
    trunc: int = 200

    def __post_init__(self) -> None:
        if abs(self.spec_a.alpha - self.spec_e.alpha) < ANGLE_TOL:
            raise InapplicableError('the two spectra must belong to different left angles')
        if abs(self.spec_a.beta - self.spec_e.beta) > ANGLE_TOL:
            raise ContractViolation('the two spectra must share the right angle')
        n = self.trunc
        for label, spec in (('spec_a', self.spec_a), ('spec_e', self.spec_e)):
            if not spec.covers(-n, n):
                raise ContractViolation(f'{label} does not cover the indices [-{n}, {n}]')
        check_interlacing(self.spec_a, self.spec_e)

    @property
    def alpha(self) -> float:
        return self.spec_a.alpha

    @property
    def epsilon(self) -> float:
        return self.spec_e.alpha

    @property
    def beta(self) -> float:
        return self.spec_a.beta


def check_interlacing(spec_a: SpectralData, spec_e: SpectralData) -> None:
    """
    epsilon > alpha: lambda_n(eps) < lambda_n(alpha) < lambda_{n+1}(eps);
    epsilon < alpha: lambda_n(alpha) < lambda_n(eps) < lambda_{n+1}(alpha).
    """
    if spec_e.alpha > spec_a.alpha:
        lower, upper = spec_e, spec_a
    else:
        lower, upper = spec_a, spec_e
    for n in upper.indices:
        if n in lower and not lower.lam(n) < upper.lam(n):
            raise InterlacingError(f'interlacing fails at index {n}')
        if n + 1 in lower and not upper.lam(n) < lower.lam(n + 1):
            raise InterlacingError(f'interlacing fails between indices {n} and {n + 1}')


def _pair_order(n_trunc: int, skip: int) -> list[int]:
    ks = [0] + [s * k for k in range(1, n_trunc + 1) for s in (1, -1)]
    return [k for k in ks if k != skip]


def lattice_tail(x: float, c_alpha: float, c_eps: float, n_trunc: int) -> float:
    """
    log of the omitted factors prod over |k| > N of (k + c_alpha - x) / (k + c_eps - x).
    """
    m = n_trunc + 1
    a = c_alpha - x
    b = c_eps - x
    return float(gammaln(m - b) + gammaln(m + b) - gammaln(m - a) - gammaln(m + a))


def norming_from_two_spectra(inp: TwoSpectraInput, n: int, tail: bool = True,
                             paired: bool = True) -> float:
    """
    a_n(alpha, beta) = sin(eps - alpha) / (lambda_n(alpha) - lambda_n(eps))
    * prod over k != n, |k| <= N of (lambda_k(alpha) - lambda_n(alpha)) / (lambda_k(eps) - lambda_n(alpha)).

    Args:
        inp: The two spectra and the truncation N
        n: Index, |n| < N
        tail: Multiply by the omitted factors of the free lattice
        paired: Accumulate factors in the order 0, 1, -1, 2, -2, ...; otherwise ascending k

    Returns:
        float: Positive norming constant
    """
    N = inp.trunc
    if abs(n) >= N:
        raise ContractViolation(f'index {n} must satisfy |n| < N = {N}')
    spec_a, spec_e = inp.spec_a, inp.spec_e
    x = spec_a.lam(n)
    ks = _pair_order(N, n) if paired else [k for k in range(-N, N + 1) if k != n]
    num = np.array([spec_a.lam(k) - x for k in ks])
    den = np.array([spec_e.lam(k) - x for k in ks])
    head = x - spec_e.lam(n)
    if np.min(np.abs(den)) < DENOMINATOR_FLOOR or abs(head) < DENOMINATOR_FLOOR:
        raise CoincidentSpectraError(f'an eigenvalue of the second spectrum coincides with lambda_{n}')
    log_value = float(np.sum(np.log(np.abs(num)) - np.log(np.abs(den))))
    sign = np.prod(np.sign(num)) * np.prod(np.sign(den))
    if tail:
        c_alpha = (inp.beta - inp.alpha) / np.pi
        c_eps = (inp.beta - inp.epsilon) / np.pi
        log_value += lattice_tail(x, c_alpha, c_eps, N)
    value = float(np.sin(inp.epsilon - inp.alpha) / head * sign * np.exp(log_value))
    if not value > 0:
        raise ContractViolation(f'two-spectra formula gave a nonpositive a_{n} = {value!r}')
    return value


def weyl_m(pot: PotentialMatrix, alpha: float, epsilon: float, beta: float, lam: complex,
           cfg: SolverConfig | None = None) -> WeylSample:
    """
    m(lambda) = (u1(0) cos alpha + u2(0) sin alpha) / (u1(0) cos eps + u2(0) sin eps),
    u the solution normalized at the right end by (sin beta, -cos beta).
    Zeros are the spectrum at alpha, poles the spectrum at epsilon.
    """
    u, _ = terminal_batch(pot, [lam], np.array([np.sin(beta), -np.cos(beta)]), cfg, renormalize=True)
    u0 = u[0, 0]
    num = u0[0] * np.cos(alpha) + u0[1] * np.sin(alpha)
    den = u0[0] * np.cos(epsilon) + u0[1] * np.sin(epsilon)
    if abs(den) < POLE_FLOOR:
        n = int(np.round(np.real(lam) - BoundaryAngles(epsilon, beta).lattice_offset))
        nearest = find_eigenvalues(pot, epsilon, beta, n, n, cfg=cfg).lam(n)
        raise PoleError(nearest)
    return WeylSample(lam=complex(lam), m_value=complex(num / den))


def _reflected(spec: SpectralData, angle: float) -> SpectralData:
    """
    Spectrum at the given left angle obtained from lambda_k -> -lambda_{-k},
    re-indexed onto the free lattice of that angle.
    """
    angles = BoundaryAngles(angle, spec.beta)
    lambdas = {-k: -spec.lam(k) for k in reversed(spec.indices)}
    shift = lattice_shift(lambdas, angles.lattice_offset)
    mirrored = SpectralData.from_lambdas(angles, lambdas)
    return mirrored.shifted(shift) if shift else mirrored


def mirror_spectrum_p0(spec: SpectralData) -> SpectralData:
    """
    For p = 0 and beta = 0: lambda_k(-alpha) = -lambda_{-k}(alpha).
    """
    alpha = spec.alpha
    if abs(spec.beta) > ANGLE_TOL:
        raise InapplicableError('the p = 0 symmetry needs beta = 0')
    if abs(alpha) < ANGLE_TOL or abs(alpha - 0.5 * np.pi) < ANGLE_TOL:
        raise InapplicableError('the p = 0 one-spectrum route excludes alpha = 0 and alpha = pi/2')
    return _reflected(spec, -alpha)


def mirror_spectrum_q0(spec: SpectralData) -> SpectralData:
    """
    For q = 0 and beta = pi/4: the spectrum at alpha' = pi/2 sign(alpha) - alpha,
    sign(0) = 1, is the reflection of the spectrum at alpha.
    """
    alpha = spec.alpha
    if abs(spec.beta - 0.25 * np.pi) > ANGLE_TOL:
        raise InapplicableError('the q = 0 symmetry needs beta = pi/4')
    if abs(abs(alpha) - 0.25 * np.pi) < ANGLE_TOL:
        raise InapplicableError('the q = 0 one-spectrum route excludes alpha = +-pi/4')
    sign = 1.0 if alpha >= 0 else -1.0
    return _reflected(spec, 0.5 * np.pi * sign - alpha)


def one_spectrum_norming_p0(spec: SpectralData, n: int, N: int = 200, tail: bool = True) -> float:
    """
    a_n of L(0, q, alpha, 0) from its spectrum alone.
    """
    mirror = mirror_spectrum_p0(spec)
    return norming_from_two_spectra(TwoSpectraInput(spec, mirror, N), n, tail=tail)


def one_spectrum_norming_q0(spec: SpectralData, n: int, N: int = 200, tail: bool = True) -> float:
    """
    a_n of L(p, 0, alpha, pi/4) from its spectrum alone.
    """
    mirror = mirror_spectrum_q0(spec)
    return norming_from_two_spectra(TwoSpectraInput(spec, mirror, N), n, tail=tail)


def ambarzumyan_residual(spec: SpectralData, alpha: float, kind: str) -> float:
    """
    max_n |lambda_n - n - (beta - alpha)/pi|. Zero means the spectrum is the
    free lattice, the hypothesis of the Ambarzumyan-type uniqueness results.

    Args:
        spec: Spectrum of L(0, q, alpha, 0) (kind 'p0') or L(p, 0, alpha, pi/4) (kind 'q0')
        alpha: Left angle the spectrum belongs to
        kind: 'p0' or 'q0'
    """
    expected_beta = {'p0': 0.0, 'q0': 0.25 * np.pi}
    if kind not in expected_beta:
        raise InapplicableError(f"kind must be 'p0' or 'q0', got {kind!r}")
    if abs(spec.beta - expected_beta[kind]) > ANGLE_TOL:
        raise InapplicableError(f'a {kind} spectrum needs beta = {expected_beta[kind]}')
    if abs(BoundaryAngles(alpha, spec.beta).alpha - spec.alpha) > ANGLE_TOL:
        raise InapplicableError('alpha does not match the spectrum')
    offset = spec.angles.lattice_offset
    return float(max(abs(d.lam - d.n - offset) for d in spec))
