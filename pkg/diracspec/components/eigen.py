from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..objects import (Logger, BoundaryAngles, GridFunction, PotentialMatrix, SpectralData,
                       SpectralDatum, Trajectory2, EvfSample, inner_product, reduce_angle)
from ..objects.errors import (BracketError, ContractViolation, DegenerateNormalizationError,
                              DomainError, EnumerationError, IntegrationError, ShapeError)
from .cauchy import SolverConfig, cauchy_batch, endpoint_matrix, resolve_config, solver_grid, terminal_batch

BRACKET_HALF_WIDTH = 0.45
SCAN_HALF_WIDTH = 1.0
SCAN_POINTS = 801
MAX_LATTICE_SHIFT = 2

logger = Logger.get_instance()

@dataclass(frozen=True)
class EigenGradient:
    """
    Derivatives of lambda_n with respect to alpha, beta, p(x) and q(x).
    """
    n: int
    lam: float
    d_alpha: float
    d_beta: float
    d_p: GridFunction
    d_q: GridFunction


def _require_unit_interval(pot: PotentialMatrix) -> None:
    grid = pot.domain
    if abs(grid.a) > 1e-12 or abs(grid.b - np.pi) > 1e-12:
        raise DomainError(f'the regular problem lives on [0, pi], got [{grid.a}, {grid.b}]')


def char_values(pot: PotentialMatrix, alpha: float, beta: float, lams,
                cfg: SolverConfig | None = None) -> np.ndarray:
    """
    chi(lambda) = phi_1(pi) cos(beta) + phi_2(pi) sin(beta) for an array of lambdas.
    """
    phi_end = endpoint_matrix(pot, lams, cfg) @ np.array([np.sin(alpha), -np.cos(alpha)])
    return phi_end[:, 0] * np.cos(beta) + phi_end[:, 1] * np.sin(beta)


def char_function(pot: PotentialMatrix, alpha: float, beta: float, lam: complex,
                  cfg: SolverConfig | None = None):
    """
    Characteristic function whose zeros are the eigenvalues of L(p, q, alpha, beta).

    Args:
        pot: Potential on [0, pi]
        alpha: Left boundary angle
        beta: Right boundary angle
        lam: Spectral parameter
        cfg: Solver settings

    Returns:
        float | complex: chi(lambda), complex when lambda is
    """
    _require_unit_interval(pot)
    value = char_values(pot, alpha, beta, [lam], cfg)[0]
    return complex(value) if np.iscomplexobj(value) else float(value)


def _refine(f, lo: float, hi: float, tol: float) -> float:
    return brentq(f, lo, hi, xtol=min(tol, 1e-12), maxiter=200)


def _scan_gap(chi_many, chi, center: float, n: int, tol: float) -> float:
    """
    Fallback search: sign changes of chi on a mesh spanning the neighbouring
    gaps, keeping the root closest to the lattice point.
    """
    mesh = np.linspace(center - SCAN_HALF_WIDTH, center + SCAN_HALF_WIDTH, SCAN_POINTS)
    values = chi_many(mesh)
    changes = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if changes.size == 0:
        raise BracketError(n)
    best = changes[np.argmin(np.abs(mesh[changes] - center))]
    if values[best] == 0.0:
        return float(mesh[best])
    return _refine(chi, mesh[best], mesh[best + 1], tol)


def lattice_shift(lambdas: dict[int, float], offset: float) -> int:
    """
    Shift s in [-2, 2] minimizing sum |lambda_n - (n + s) - offset| over the window.
    """
    ns = np.array(list(lambdas))
    lams = np.array(list(lambdas.values()))
    shifts = range(-MAX_LATTICE_SHIFT, MAX_LATTICE_SHIFT + 1)
    costs = [np.sum(np.abs(lams - (ns + s) - offset)) for s in shifts]
    return list(shifts)[int(np.argmin(costs))]


def find_eigenvalues(pot: PotentialMatrix, alpha: float, beta: float, n_min: int, n_max: int,
                     tol: float = 1e-10, cfg: SolverConfig | None = None) -> SpectralData:
    """
    Eigenvalues lambda_n for n_min <= n <= n_max. Each one is bracketed by
    n + (beta - alpha)/pi +- 0.45 and refined with Brent's method; a bracket
    without a sign change falls back to scanning the neighbouring gaps.

    Args:
        pot: Potential on [0, pi]
        alpha: Left boundary angle
        beta: Right boundary angle
        n_min: First index
        n_max: Last index
        tol: Width of the final root interval
        cfg: Solver settings

    Returns:
        SpectralData: Eigenvalues only, angles reduced into (-pi/2, pi/2]
    """
    _require_unit_interval(pot)
    if n_min > n_max:
        raise ShapeError(f'empty index window [{n_min}, {n_max}]')
    if not tol > 0:
        raise DomainError(f'tol must be positive, got {tol!r}')
    cfg = resolve_config(pot, cfg)
    angles = BoundaryAngles(alpha, beta)
    a, b = angles.alpha, angles.beta
    ns = np.arange(n_min, n_max + 1)
    centers = ns + angles.lattice_offset
    ends = char_values(pot, a, b, np.concatenate([centers - BRACKET_HALF_WIDTH,
                                                  centers + BRACKET_HALF_WIDTH]), cfg)
    lo_vals, hi_vals = ends[:ns.size], ends[ns.size:]

    def chi(lam: float) -> float:
        return float(char_values(pot, a, b, [lam], cfg)[0])

    lambdas = {}
    for n, c, f_lo, f_hi in zip(ns, centers, lo_vals, hi_vals):
        n = int(n)
        if f_lo * f_hi < 0:
            lambdas[n] = _refine(chi, c - BRACKET_HALF_WIDTH, c + BRACKET_HALF_WIDTH, tol)
        else:
            logger.warn(f'no sign change in the bracket of index {n}, scanning the gap')
            lambdas[n] = _scan_gap(lambda mesh: char_values(pot, a, b, mesh, cfg), chi, c, n, tol)

    values = list(lambdas.values())
    if any(y <= x for x, y in zip(values, values[1:])):
        raise EnumerationError(f'eigenvalues in [{n_min}, {n_max}] collide or are out of order')
    shift = lattice_shift(lambdas, angles.lattice_offset) if len(lambdas) > 4 else 0
    data = SpectralData.from_lambdas(angles, lambdas)
    if shift:
        logger.log(f'eigenvalues re-indexed by {shift} to follow the free lattice')
        data = data.shifted(shift)
    return data


def interlacing_check(spec_lo: SpectralData, spec_hi: SpectralData) -> bool:
    """
    For alpha(spec_lo) < alpha(spec_hi) with a shared beta, checks
    lambda_n(hi) < lambda_n(lo) < lambda_{n+1}(hi) on the common window.
    """
    if not spec_lo.alpha < spec_hi.alpha:
        raise ContractViolation('spec_lo must have the smaller left angle')
    common = [n for n in spec_lo.indices if n in spec_hi and n + 1 in spec_hi]
    return all(spec_hi.lam(n) < spec_lo.lam(n) < spec_hi.lam(n + 1) for n in common)


def _corrected_norm2(grid, values: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Trapezoid integral of |y|^2 with the first Euler-Maclaurin correction.
    For real solutions d|y|^2/dx = 2 q (y1^2 - y2^2) - 4 p y1 y2 exactly.
    """
    y1, y2 = values[..., 0], values[..., 1]
    total = grid.integrate(np.abs(y1) ** 2 + np.abs(y2) ** 2)
    if np.iscomplexobj(values):
        return total
    slope = 2.0 * q * (y1 ** 2 - y2 ** 2) - 4.0 * p * y1 * y2
    return total - grid.h ** 2 / 12.0 * (slope[..., -1] - slope[..., 0])


def _solutions(pot: PotentialMatrix, alpha: float, lams: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    return cauchy_batch(pot, lams, np.array([np.sin(alpha), -np.cos(alpha)]), cfg)


def norming_constants(pot: PotentialMatrix, alpha: float, spectrum: SpectralData,
                      cfg: SolverConfig | None = None) -> SpectralData:
    """
    a_n = integral over [0, pi] of |phi(x, lambda_n, alpha)|^2.

    Returns:
        SpectralData: spectrum with the a column filled in
    """
    _require_unit_interval(pot)
    cfg = resolve_config(pot, cfg)
    grid = solver_grid(pot, cfg)
    values = _solutions(pot, alpha, spectrum.lambdas(), cfg)
    p, q = pot.evaluate(grid.nodes)
    norms = _corrected_norm2(grid, values, p, q)
    for n, a in zip(spectrum.indices, norms):
        if not (np.isfinite(a) and a > 0):
            raise IntegrationError(f'norming constant for index {n} is {a!r}')
    return spectrum.with_updates(a=dict(zip(spectrum.indices, map(float, norms))))


def normalized_eigenfunction(pot: PotentialMatrix, alpha: float, lam: float, a: float,
                             cfg: SolverConfig | None = None) -> Trajectory2:
    """
    h_n = phi(x, lambda_n, alpha) / sqrt(a_n).
    """
    if not a > 0:
        raise ContractViolation(f'norming constant must be positive, got {a!r}')
    values = _solutions(pot, alpha, np.array([lam]), resolve_config(pot, cfg))[0]
    return Trajectory2.from_array(solver_grid(pot, cfg), values / np.sqrt(a))


def eigenfunctions(pot: PotentialMatrix, spectrum: SpectralData,
                   cfg: SolverConfig | None = None) -> dict[int, Trajectory2]:
    """
    Normalized eigenfunctions for every item of a spectrum carrying norming constants.
    """
    cfg = resolve_config(pot, cfg)
    grid = solver_grid(pot, cfg)
    values = _solutions(pot, spectrum.alpha, spectrum.lambdas(), cfg)
    return {n: Trajectory2.from_array(grid, v / np.sqrt(spectrum.a(n)))
            for n, v in zip(spectrum.indices, values)}


def similarity_coefficients(pot: PotentialMatrix, alpha: float, beta: float, spectrum: SpectralData,
                            cfg: SolverConfig | None = None) -> SpectralData:
    """
    c_n with u_n = c_n phi_n, where u_n is normalized at the right end by
    (sin beta, -cos beta), and b_n = ||u_n||^2. The ratio is taken at the node
    where |phi_n| is largest, in its larger component.

    Returns:
        SpectralData: spectrum with a, b and c filled in
    """
    _require_unit_interval(pot)
    cfg = resolve_config(pot, cfg)
    grid = solver_grid(pot, cfg)
    lams = spectrum.lambdas()
    phi = _solutions(pot, alpha, lams, cfg)
    u = terminal_batch(pot, lams, np.array([np.sin(beta), -np.cos(beta)]), cfg)
    p, q = pot.evaluate(grid.nodes)
    a_vals = _corrected_norm2(grid, phi, p, q)
    b_vals = _corrected_norm2(grid, u, p, q)
    a, b, c = {}, {}, {}
    for n, phi_n, u_n, a_n, b_n in zip(spectrum.indices, phi, u, a_vals, b_vals):
        k = int(np.argmax(np.sum(phi_n ** 2, axis=-1)))
        j = int(np.argmax(np.abs(phi_n[k])))
        if abs(phi_n[k, j]) < 1e-12:
            raise DegenerateNormalizationError(f'eigenfunction {n} vanishes at its maximum')
        a[n], b[n], c[n] = float(a_n), float(b_n), float(u_n[k, j] / phi_n[k, j])
    return spectrum.with_updates(a=a, b=b, c=c)


def eigen_gradient(pot: PotentialMatrix, alpha: float, beta: float, n: int,
                   tol: float = 1e-12, cfg: SolverConfig | None = None) -> EigenGradient:
    """
    Gradient of lambda_n: d/dalpha = -|h(0)|^2, d/dbeta = |h(pi)|^2,
    d/dp = h1^2 - h2^2, d/dq = 2 h1 h2, with h the normalized eigenfunction.
    """
    spectrum = norming_constants(pot, alpha, find_eigenvalues(pot, alpha, beta, n, n, tol, cfg), cfg)
    h = normalized_eigenfunction(pot, spectrum.alpha, spectrum.lam(n), spectrum.a(n), cfg)
    return EigenGradient(
        n=n,
        lam=spectrum.lam(n),
        d_alpha=-float(np.sum(h.start() ** 2)),
        d_beta=float(np.sum(h.end() ** 2)),
        d_p=GridFunction(h.grid, h.y1 ** 2 - h.y2 ** 2),
        d_q=GridFunction(h.grid, 2.0 * h.y1 * h.y2),
    )


def evf(pot: PotentialMatrix, gamma: float, beta: float = 0.0, tol: float = 1e-12,
        cfg: SolverConfig | None = None) -> EvfSample:
    """
    Eigenvalue function: gamma = alpha - pi m with alpha in (-pi/2, pi/2]
    gives lambda(gamma) = lambda_m(alpha).
    """
    alpha, turns = reduce_angle(gamma)
    m = -turns
    lam = find_eigenvalues(pot, alpha, beta, m, m, tol, cfg).lam(m)
    return EvfSample(gamma=float(gamma), value=lam, alpha=alpha, m=m)


def evf_derivative(pot: PotentialMatrix, gamma: float, beta: float = 0.0,
                   cfg: SolverConfig | None = None) -> float:
    """
    d lambda / d gamma = -1 / a_m(alpha).
    """
    alpha, turns = reduce_angle(gamma)
    m = -turns
    spectrum = norming_constants(pot, alpha, find_eigenvalues(pot, alpha, beta, m, m, 1e-12, cfg), cfg)
    return -1.0 / spectrum.a(m)


def evf_zero(pot: PotentialMatrix, beta: float = 0.0, cfg: SolverConfig | None = None) -> EvfSample:
    """
    The point gamma_0 with lambda(gamma_0) = 0.
    """
    def value(gamma: float) -> float:
        return evf(pot, gamma, beta, cfg=cfg).value

    lo, hi = -0.5 * np.pi + 1e-9, 0.5 * np.pi
    f_lo, f_hi = value(lo), value(hi)
    while f_lo < 0:
        lo, hi, f_hi = lo - np.pi, lo, f_lo
        f_lo = value(lo)
    while f_hi > 0:
        lo, hi, f_lo = hi, hi + np.pi, f_hi
        f_hi = value(hi)
    gamma0 = brentq(value, lo, hi, xtol=1e-13)
    return evf(pot, gamma0, beta, cfg=cfg)


def expand(f: Trajectory2, basis: dict[int, Trajectory2]) -> dict[int, complex]:
    """
    Fourier coefficients c_n = (f, h_n) against normalized eigenfunctions.
    """
    return {n: inner_product(f, h) for n, h in basis.items()}


def parseval_defect(f: Trajectory2, basis: dict[int, Trajectory2], N: int) -> float:
    """
    | ||f||^2 - sum over |n| <= N of |c_n|^2 |.
    """
    missing = [n for n in range(-N, N + 1) if n not in basis]
    if missing:
        raise ShapeError(f'basis lacks indices {missing[:5]}...')
    window = {n: basis[n] for n in range(-N, N + 1)}
    partial = sum(abs(c) ** 2 for c in expand(f, window).values())
    return float(abs(f.norm2() - partial))
