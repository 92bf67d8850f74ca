
import numpy as np
from scipy.optimize import brentq

from ..objects import Logger, BoundaryAngles, PotentialMatrix, SpectralData, Trajectory2, EvfSample, WeylSample
from ..objects.angles import reduce_angle
from ..objects.errors import (ContractViolation, DomainError, EnumerationError, InapplicableError,
                              InterlacingError, PoleError, TruncationError)
from .cauchy import SolverConfig, _tree_product, solver_grid, step_matrices, terminal_batch

SCAN_STEP = 0.02
BLOCK = 256
SCAN_LIMIT = 1e4
POLE_FLOOR = 1e-12
HALF_PI = 0.5 * np.pi

logger = Logger.get_instance()

class HalfAxisProblem:
    """
    Canonical Dirac system on [0, inf) truncated to the potential's grid [0, x_max].

    At x_max the solution is started along the decaying eigenvector of the
    frozen-coefficient system and integrated backwards, so every quantity
    here is built from the square-integrable solution u(x, lambda).
    Eigenvalues of every angle are indexed through the alpha = pi/2 spectrum:
    lambda_0(pi/2) <= 0 < lambda_1(pi/2) and lambda_n(pi/2) < lambda_n(alpha) < lambda_{n+1}(pi/2).

    Args:
        pot: Potential on [0, x_max]
        alpha: Default boundary angle at 0
        cfg: Solver settings, defaults to the potential's grid
    """
    def __init__(self, pot: PotentialMatrix, alpha: float = 0.0, cfg: SolverConfig | None = None) -> None:
        if abs(pot.domain.a) > 1e-12:
            raise DomainError('the half-axis problem lives on [0, x_max]')
        self._pot = pot
        self._alpha = BoundaryAngles(alpha).alpha
        self._cfg = cfg or SolverConfig(m=max(pot.domain.m, 64))
        p, q = pot.evaluate(np.array([pot.domain.b]))
        self._p_end, self._q_end = float(p[0]), float(q[0])
        self._pi2_cache: dict[int, float] = {}

    @property
    def potential(self) -> PotentialMatrix:
        return self._pot

    @property
    def alpha(self) -> float:
        return self._alpha

    @property
    def x_max(self) -> float:
        return self._pot.domain.b

    @property
    def decay_limit(self) -> float:
        """
        |Omega(x_max)|: real lambda beyond it no longer decay at x_max.
        """
        return float(np.hypot(self._p_end, self._q_end))

    def kappa(self, lams) -> np.ndarray:
        lams = np.asarray(lams)
        return np.sqrt(self._p_end ** 2 + self._q_end ** 2 - lams.astype(complex) ** 2)

    def start_vectors(self, lams) -> np.ndarray:
        """
        Decaying eigenvector of A(x_max, lambda), eigenvalue -kappa. The branch is
        fixed by the sign of q(x_max) so that it varies continuously with lambda.
        """
        lams = np.atleast_1d(np.asarray(lams))
        kappa = self.kappa(lams)
        p, q = self._p_end, self._q_end
        if q >= 0:
            e = np.stack([lams + p, q + kappa], axis=-1)
        else:
            e = np.stack([q - kappa, lams - p], axis=-1)
        if not np.iscomplexobj(lams):
            if np.any(np.abs(kappa.imag) > 0) or np.any(kappa.real <= 0):
                raise TruncationError(f'no decaying solution at x_max = {self.x_max} for these lambda')
            e = e.real
        return e / np.linalg.norm(e, axis=-1, keepdims=True)

    def boundary_values(self, lams) -> np.ndarray:
        """
        Unit vectors u(0, lambda)/|u(0, lambda)|, shape (L, 2). Block products with
        renormalization between blocks keep the growth of the backward sweep in range.
        """
        lams = np.atleast_1d(np.asarray(lams))
        y = self.start_vectors(lams).astype(np.result_type(lams, float))
        steps = step_matrices(self._pot, lams, self._cfg, backward=True)
        m = steps.shape[1]
        for hi in range(m, 0, -BLOCK):
            lo = max(0, hi - BLOCK)
            block = _tree_product(steps[:, lo:hi][:, ::-1])
            y = np.einsum('lij,lj->li', block, y)
            y /= np.linalg.norm(y, axis=-1, keepdims=True)
        if not np.all(np.isfinite(y)):
            raise TruncationError(f'backward integration blew up, increase x_max = {self.x_max}')
        return y

    def shooting(self, lams, alpha: float | None = None) -> np.ndarray:
        """
        u1(0) cos alpha + u2(0) sin alpha; zeros are the eigenvalues for that angle.
        """
        alpha = self._alpha if alpha is None else alpha
        u0 = self.boundary_values(lams)
        return u0[:, 0] * np.cos(alpha) + u0[:, 1] * np.sin(alpha)

    def _refine(self, alpha: float, lo: float, hi: float, tol: float) -> float:
        return brentq(lambda lam: float(self.shooting([lam], alpha)[0]), lo, hi, xtol=min(tol, 1e-12), maxiter=200)

    def roots(self, lo: float, hi: float, alpha: float | None = None, step: float = SCAN_STEP,
              tol: float = 1e-12) -> list[float]:
        """
        Every eigenvalue in [lo, hi] for the given angle, found by sign changes on a
        scan of the given step and refined with Brent's method.
        """
        alpha = self._alpha if alpha is None else alpha
        if hi >= self.decay_limit or lo <= -self.decay_limit:
            raise TruncationError(f'[{lo}, {hi}] reaches beyond the decay limit {self.decay_limit:.3g}, '
                                  f'increase x_max')
        count = max(2, int(np.ceil((hi - lo) / step)) + 1)
        lams = np.linspace(lo, hi, count)
        values = self.shooting(lams, alpha)
        found = [float(lam) for lam, v in zip(lams, values) if v == 0.0]
        for k in np.flatnonzero(values[:-1] * values[1:] < 0):
            found.append(self._refine(alpha, lams[k], lams[k + 1], tol))
        return sorted(found)

    def _pi2_roots(self, n_lo: int, n_hi: int, tol: float) -> dict[int, float]:
        """
        lambda_n(pi/2) for n_lo <= n <= n_hi, widening the scan until enough roots are found.
        """
        missing = [n for n in range(n_lo, n_hi + 1) if n not in self._pi2_cache]
        if not missing:
            return {n: self._pi2_cache[n] for n in range(n_lo, n_hi + 1)}
        need_neg = max(0, 1 - n_lo)
        need_pos = max(0, n_hi)
        width = 4.0
        while True:
            top = min(width, 0.999 * self.decay_limit)
            neg = self.roots(-top, 0.0, HALF_PI, tol=tol) if need_neg else []
            pos = self.roots(0.0, top, HALF_PI, tol=tol) if need_pos else []
            nonpos = sorted((r for r in neg if r <= 0.0), reverse=True)
            positive = sorted(r for r in pos if r > 0.0)
            if len(nonpos) >= need_neg and len(positive) >= need_pos:
                break
            if top >= 0.999 * self.decay_limit or width > SCAN_LIMIT:
                raise EnumerationError(f'found {len(nonpos)} nonpositive and {len(positive)} positive '
                                       f'eigenvalues below {top:.3g}, increase x_max')
            width *= 2.0
        for k, r in enumerate(nonpos):
            self._pi2_cache[-k] = r
        for k, r in enumerate(positive):
            self._pi2_cache[k + 1] = r
        return {n: self._pi2_cache[n] for n in range(n_lo, n_hi + 1)}

    def eigenvalue(self, n: int, alpha: float | None = None, tol: float = 1e-12) -> float:
        alpha = self._alpha if alpha is None else BoundaryAngles(alpha).alpha
        if abs(alpha - HALF_PI) < 1e-15:
            return self._pi2_roots(n, n, tol)[n]
        bounds = self._pi2_roots(n, n + 1, tol)
        return self._refine(alpha, bounds[n], bounds[n + 1], tol)

    def eigenvalues(self, n_min: int, n_max: int, alpha: float | None = None,
                    tol: float = 1e-12) -> SpectralData:
        alpha = self._alpha if alpha is None else BoundaryAngles(alpha).alpha
        if n_max < n_min:
            raise DomainError(f'empty index window [{n_min}, {n_max}]')
        if abs(alpha - HALF_PI) < 1e-15:
            lambdas = self._pi2_roots(n_min, n_max, tol)
        else:
            bounds = self._pi2_roots(n_min, n_max + 1, tol)
            lambdas = {n: self._refine(alpha, bounds[n], bounds[n + 1], tol) for n in range(n_min, n_max + 1)}
        logger.debug(f'half-axis eigenvalues {n_min}..{n_max} at alpha = {alpha}')
        return SpectralData.from_lambdas(BoundaryAngles(alpha), lambdas)

    def decaying_solution(self, lam: float, alpha: float | None = None) -> Trajectory2:
        """
        u(x, lambda) scaled so that u(0) . (sin alpha, -cos alpha) = 1.
        """
        alpha = self._alpha if alpha is None else alpha
        values, logscale = terminal_batch(self._pot, [lam], self.start_vectors([lam]), self._cfg,
                                          renormalize=True)
        u = values[0] * np.exp(logscale[0] - logscale[0, 0])[:, None]
        scale = u[0] @ BoundaryAngles(alpha).initial_vector()
        if abs(scale) < POLE_FLOOR:
            raise ContractViolation(f'u(0, {lam}) is orthogonal to the boundary vector')
        return Trajectory2.from_array(solver_grid(self._pot, self._cfg), u / scale)

    def norm2(self, traj: Trajectory2, lam: float) -> float:
        """
        int_0^inf |u|^2: quadrature on the grid plus the exponential tail beyond x_max.
        """
        tail = float(np.sum(traj.end() ** 2)) / (2.0 * float(self.kappa(lam).real))
        return float(traj.norm2()) + tail

    def eigen_data(self, n_min: int, n_max: int, alpha: float | None = None,
                   tol: float = 1e-12) -> SpectralData:
        """
        Eigenvalues with norming constants a_n = int_0^inf |phi(x, lambda_n)|^2.
        """
        alpha = self._alpha if alpha is None else BoundaryAngles(alpha).alpha
        spectrum = self.eigenvalues(n_min, n_max, alpha, tol)
        norming = {}
        for d in spectrum:
            norming[d.n] = self.norm2(self.decaying_solution(d.lam, alpha), d.lam)
        return spectrum.with_updates(a=norming)

    def eigenfunction(self, n: int, alpha: float | None = None, tol: float = 1e-12) -> Trajectory2:
        return self.decaying_solution(self.eigenvalue(n, alpha, tol), alpha)

    def evf(self, gamma: float, tol: float = 1e-12) -> EvfSample:
        """
        lambda(gamma) with lambda(alpha - pi m) = lambda_m(alpha), alpha in (-pi/2, pi/2].
        """
        alpha, turns = reduce_angle(gamma)
        m = -turns
        return EvfSample(gamma=float(gamma), value=self.eigenvalue(m, alpha, tol), alpha=alpha, m=m)


def evf_halfaxis(problem: HalfAxisProblem, gamma: float) -> EvfSample:
    return problem.evf(gamma)


def evf_halfaxis_derivative(problem: HalfAxisProblem, gamma: float, delta: float = 1e-3) -> float:
    """
    Central difference of the half-axis eigenvalue function; tends to -1/a_m(alpha).
    """
    if not 0 < delta < 0.25:
        raise DomainError(f'delta must lie in (0, 0.25), got {delta!r}')
    return (problem.evf(gamma + delta).value - problem.evf(gamma - delta).value) / (2.0 * delta)


def weyl_m0(problem: HalfAxisProblem, lam: complex) -> WeylSample:
    """
    m_0(lambda) = u1(0, lambda) / u2(0, lambda) for the decaying solution u.
    Tends to +i (-i) as Im lambda -> +inf (-inf).
    """
    lam = complex(lam)
    if lam.imag == 0:
        raise DomainError('weyl_m0 needs a nonreal spectral parameter')
    u0 = problem.boundary_values(np.array([lam]))[0]
    return WeylSample(lam=lam, m_value=complex(u0[0] / u0[1]))


def weyl_m_halfaxis(problem: HalfAxisProblem, lam: complex, alpha: float, beta: float) -> WeylSample:
    """
    m(lambda) = (m_0 cos alpha + sin alpha) / (m_0 cos beta + sin beta): zeros at the
    alpha spectrum, poles at the beta spectrum, limit e^{i(beta - alpha)} as Im lambda -> inf.
    """
    m0 = weyl_m0(problem, lam).m_value
    den = m0 * np.cos(beta) + np.sin(beta)
    if abs(den) < POLE_FLOOR:
        raise PoleError(float(np.real(lam)))
    return WeylSample(lam=complex(lam), m_value=complex((m0 * np.cos(alpha) + np.sin(alpha)) / den))


def check_halfaxis_interlacing(spec_a: SpectralData, spec_b: SpectralData) -> None:
    """
    For alpha < beta: lambda_n(beta) < lambda_n(alpha) < lambda_{n+1}(beta), and the
    roles swap for alpha > beta.
    """
    if spec_a.alpha < spec_b.alpha:
        lower, upper = spec_b, spec_a
    else:
        lower, upper = spec_a, spec_b
    for n in upper.indices:
        if n in lower and not lower.lam(n) < upper.lam(n):
            raise InterlacingError(f'interlacing fails at index {n}')
        if n + 1 in lower and not upper.lam(n) < lower.lam(n + 1):
            raise InterlacingError(f'interlacing fails between indices {n} and {n + 1}')
    for spec in (spec_a, spec_b):
        for n in spec.indices:
            if n != 0 and spec.lam(n) * np.sign(n) <= 0:
                raise InterlacingError(f'lambda_{n} has the wrong sign for its index')


def _log_c(spec_a: SpectralData, spec_b: SpectralData, N: int, mu: float) -> float:
    """
    -sum over 0 < |k| <= N of ln(lambda_k(beta)/lambda_k(alpha) |lambda_k(alpha) - i mu| / |lambda_k(beta) - i mu|).
    """
    ks = [k for k in range(-N, N + 1) if k != 0]
    la = np.array([spec_a.lam(k) for k in ks])
    lb = np.array([spec_b.lam(k) for k in ks])
    terms = np.log(lb / la) + 0.5 * (np.log1p((la / mu) ** 2) - np.log1p((lb / mu) ** 2))
    return -float(np.sum(terms))


def _log_derivative(spec_a: SpectralData, spec_b: SpectralData, n: int, N: int) -> float:
    """
    ln |R'(lambda_n(alpha))| for R the truncated product representation of m / c.
    """
    x = spec_a.lam(n)
    if n == 0:
        total = -np.log(abs(x - spec_b.lam(0)))
    else:
        total = np.log(abs(spec_b.lam(n) / spec_a.lam(n))) - np.log(abs(x - spec_b.lam(n)))
        total += np.log(abs(x - spec_a.lam(0))) - np.log(abs(x - spec_b.lam(0)))
    ks = [k for k in range(-N, N + 1) if k not in (0, n)]
    la = np.array([spec_a.lam(k) for k in ks])
    lb = np.array([spec_b.lam(k) for k in ks])
    total += np.sum(np.log(np.abs(lb / la)) + np.log(np.abs(la - x)) - np.log(np.abs(lb - x)))
    return float(total)


def _log_norming(spec_a: SpectralData, spec_b: SpectralData, n: int, N: int, mu_max: float) -> float:
    # c from the mu -> inf limit, Richardson over mu and mu/2 (error ~ mu^-2)
    high, low = _log_c(spec_a, spec_b, N, mu_max), _log_c(spec_a, spec_b, N, 0.5 * mu_max)
    log_c = (4.0 * high - low) / 3.0
    sin = abs(np.sin(spec_b.alpha - spec_a.alpha))
    return log_c + np.log(sin) + _log_derivative(spec_a, spec_b, n, N)


def halfaxis_two_spectra_norming(spec_a: SpectralData, spec_b: SpectralData, n: int, N: int = 400,
                                 mu_max: float = 1e3, extrapolate: bool = True) -> float:
    """
    a_n(alpha) of a half-axis problem from its spectra at alpha and at a second angle beta.

    a_n = c sin(beta - alpha) R'(lambda_n(alpha)) with R the product representation
    of the Weyl function m = c R, whose zeros are the alpha spectrum and whose poles
    are the beta spectrum. The constant c comes from |m(i mu)| -> 1.

    Args:
        spec_a: Spectrum at alpha, indexed through the pi/2 spectrum
        spec_b: Spectrum at beta != alpha, same indexing
        n: Index
        N: Truncation, both spectra must cover [-N, N]
        mu_max: Largest mu of the c limit
        extrapolate: Richardson over N, N/2, N/4 with the convergence exponent estimated from the three

    Returns:
        float: Norming constant
    """
    if abs(np.sin(spec_b.alpha - spec_a.alpha)) < 1e-12:
        raise InapplicableError('the two spectra must belong to different angles')
    for label, spec in (('spec_a', spec_a), ('spec_b', spec_b)):
        if not spec.covers(-N, N):
            raise ContractViolation(f'{label} does not cover the indices [-{N}, {N}]')
    check_halfaxis_interlacing(spec_a.window(-N, N), spec_b.window(-N, N))
    if not mu_max > 0:
        raise DomainError(f'mu_max must be positive, got {mu_max!r}')
    use_richardson = extrapolate and N >= 8 and abs(n) < N // 4
    if abs(n) >= N:
        raise ContractViolation(f'index {n} must satisfy |n| < N = {N}')
    value = _log_norming(spec_a, spec_b, n, N, mu_max)
    if use_richardson:
        half = _log_norming(spec_a, spec_b, n, N // 2, mu_max)
        quarter = _log_norming(spec_a, spec_b, n, N // 4, mu_max)
        d1, d2 = half - value, quarter - half
        if d1 != 0 and d2 / d1 > 1.0 and np.isfinite(d2 / d1):
            value -= d1 / (d2 / d1 - 1.0)
            logger.debug(f'two-spectra Richardson exponent {np.log2(d2 / d1):.3f} at n = {n}')
    return float(np.exp(value))


def argument_sum(spec_a: SpectralData, spec_b: SpectralData, mu: float, N: int) -> float:
    """
    sum over |k| <= N of arg((lambda_k(alpha) - i mu) / (lambda_k(beta) - i mu)); tends to beta - alpha.
    """
    ks = range(-N, N + 1)
    la = np.array([spec_a.lam(k) for k in ks])
    lb = np.array([spec_b.lam(k) for k in ks])
    return float(np.sum(np.angle((la - 1j * mu) / (lb - 1j * mu))))


def mirror_halfaxis_p0(spec: SpectralData) -> SpectralData:
    """
    For p = 0: lambda_n(-alpha) = -lambda_{-n}(alpha).
    """
    alpha = spec.alpha
    if abs(alpha) < 1e-12 or abs(alpha - HALF_PI) < 1e-12:
        raise InapplicableError('the p = 0 one-spectrum route excludes alpha = 0 and alpha = pi/2')
    lambdas = {-n: -spec.lam(n) for n in spec.indices}
    return SpectralData.from_lambdas(BoundaryAngles(-alpha), lambdas)


def halfaxis_one_spectrum_norming_p0(spec: SpectralData, n: int, N: int = 400,
                                     mu_max: float = 1e3, extrapolate: bool = True) -> float:
    """
    a_n(alpha) of a half-axis problem with p = 0 from its own spectrum.
    """
    return halfaxis_two_spectra_norming(spec, mirror_halfaxis_p0(spec), n, N, mu_max, extrapolate)
