from dataclasses import dataclass, field

import numpy as np

from ..objects import (Logger, Grid, GridFunction, PotentialMatrix, SpectralData, Trajectory2,
                       TSequence)
from ..objects.errors import ContractViolation, DomainError, LogDomainError
from .cauchy import SolverConfig, resolve_config, solver_grid
from .degenerate import commutator_update, solve_stacked
from .eigen import eigenfunctions, find_eigenvalues, norming_constants

DEFAULT_WINDOW = (-10, 10)
NORM_TOL = 1e-6
LOG_FLOOR = 1e-14

logger = Logger.get_instance()

@dataclass
class IsoResult:
    """
    Output of an isospectral change of norming constants (right angle beta = 0).

    Args:
        omega_t: Transformed potential
        eigenfunctions: Normalized eigenfunctions of the transformed operator
        ell: ln|phi_n2(pi)| of the initially normalized eigenfunctions
        norming: Transformed norming constants
        lambdas: The (unchanged) eigenvalues
        determinant: det S(x, T) for the explicit form, None for the recurrent one
    """
    omega_t: PotentialMatrix
    eigenfunctions: dict[int, Trajectory2]
    ell: dict[int, float]
    norming: dict[int, float] = field(default_factory=dict)
    lambdas: dict[int, float] = field(default_factory=dict)
    determinant: GridFunction | None = None


def theta(h_m: Trajectory2, t: float, x: float | None = None):
    """
    theta(x, t) = 1 + (e^t - 1) * integral from 0 to x of |h_m|^2.

    Args:
        h_m: Normalized eigenfunction
        t: Exponent of the norming-constant change
        x: Point; if None the whole profile is returned

    Returns:
        float | GridFunction: theta at x, or on every node
    """
    if abs(h_m.norm2() - 1.0) > NORM_TOL:
        raise ContractViolation(f'h_m must have unit norm, got {h_m.norm2()!r}')
    profile = 1.0 + np.expm1(t) * h_m.grid.cumulative(h_m.density())
    if x is None:
        return GridFunction(h_m.grid, profile)
    if not h_m.grid.contains(x):
        raise DomainError(f'x = {x!r} outside [{h_m.grid.a}, {h_m.grid.b}]')
    return float(np.interp(x, h_m.grid.nodes, profile))


def _window_indices(tseq: TSequence, window: tuple[int, int] | None) -> list[int]:
    lo, hi = window or DEFAULT_WINDOW
    support = tseq.support
    if support:
        lo, hi = min(lo, min(support)), max(hi, max(support))
    return list(range(lo, hi + 1))


def _base_state(pot: PotentialMatrix, alpha: float, indices: list[int], tol: float,
                cfg: SolverConfig) -> tuple[SpectralData, np.ndarray]:
    spectrum = find_eigenvalues(pot, alpha, 0.0, indices[0], indices[-1], tol, cfg)
    spectrum = norming_constants(pot, alpha, spectrum, cfg)
    basis = eigenfunctions(pot, spectrum, cfg)
    grid = solver_grid(pot, cfg)
    H = np.stack([basis[n].values for n in indices])
    # unit norm in the same quadrature the Gram prefixes use
    H /= np.sqrt(grid.integrate(np.sum(H ** 2, axis=-1)))[:, None, None]
    return spectrum, H


def _gram_prefix(grid: Grid, H: np.ndarray) -> np.ndarray:
    """
    S[i, j](x) = integral from 0 to x of h_i . h_j, shape (K, K, m + 1).
    """
    return grid.cumulative(np.einsum('ixa,jxa->ijx', H, H))


def _ell(H: np.ndarray, norming: np.ndarray, indices: list[int]) -> dict[int, float]:
    ell = {}
    for k, n in enumerate(indices):
        value = abs(H[k, -1, 1]) * np.sqrt(norming[k])
        if value < LOG_FLOOR:
            raise LogDomainError(n)
        ell[n] = float(np.log(value))
    return ell


def _result(pot: PotentialMatrix, grid: Grid, p: np.ndarray, q: np.ndarray, H: np.ndarray,
            spectrum: SpectralData, tseq: TSequence, indices: list[int],
            determinant: GridFunction | None = None) -> IsoResult:
    norming = np.array([spectrum.a(n) * np.exp(-tseq.entries.get(n, 0.0)) for n in indices])
    omega_t = PotentialMatrix.from_samples(grid, p, q, interpolation=pot.interpolation)
    return IsoResult(
        omega_t=omega_t,
        eigenfunctions={n: Trajectory2.from_array(grid, H[k]) for k, n in enumerate(indices)},
        ell=_ell(H, norming, indices),
        norming=dict(zip(indices, map(float, norming))),
        lambdas={n: spectrum.lam(n) for n in indices},
        determinant=determinant,
    )


def shift_finite_recurrent(pot: PotentialMatrix, alpha: float, tseq: TSequence,
                           window: tuple[int, int] | None = None, order: list[int] | None = None,
                           tol: float = 1e-12, cfg: SolverConfig | None = None) -> IsoResult:
    """
    Change a_n to a_n e^{-t_n} for every n in the support of tseq, one index
    at a time. Each step applies the single-constant transformation to the
    current potential and eigenfunctions; the Gram prefixes are updated in
    closed form so that no eigenfunction is recomputed.

    Args:
        pot: Potential on [0, pi], right angle beta = 0
        alpha: Left angle
        tseq: Exponents t_n
        window: Eigenfunctions to carry along (the support is always included)
        order: Processing order, defaults to 0, 1, -1, 2, ...
        tol: Eigenvalue tolerance
        cfg: Solver settings
    """
    cfg = resolve_config(pot, cfg)
    grid = solver_grid(pot, cfg)
    indices = _window_indices(tseq, window)
    spectrum, H = _base_state(pot, alpha, indices, tol, cfg)
    S = _gram_prefix(grid, H)
    p, q = pot.evaluate(grid.nodes)
    p, q = p.copy(), q.copy()
    order = tseq.interleaved() if order is None else list(order)
    if sorted(order) != sorted(tseq.support):
        raise ContractViolation('order must be a permutation of the support of tseq')
    position = {n: k for k, n in enumerate(indices)}
    for n in order:
        t = tseq.entries[n]
        k = position[n]
        c = np.expm1(t)
        th = 1.0 + c * S[k, k]
        h = H[k]
        p += c / th * 2.0 * h[:, 0] * h[:, 1]
        q += c / th * (h[:, 1] ** 2 - h[:, 0] ** 2)
        s_m = S[k].copy()
        H = H - (c * s_m / th)[:, :, None] * h[None]
        H[k] = np.exp(0.5 * t) * h / th[:, None]
        S = S - c * s_m[:, None, :] * s_m[None, :, :] / th
        S[k, :] = np.exp(0.5 * t) * s_m / th
        S[:, k] = S[k, :]
        S[k, k] = np.exp(t) * s_m[k] / th
        logger.debug(f'norming constant {n} scaled by exp(-{t})')
    return _result(pot, grid, p, q, H, spectrum, tseq, indices)


def shift_one(pot: PotentialMatrix, alpha: float, m: int, t: float,
              window: tuple[int, int] | None = None, tol: float = 1e-12,
              cfg: SolverConfig | None = None) -> IsoResult:
    """
    Isospectral potential whose m-th norming constant is a_m e^{-t}, all others unchanged.
    """
    return shift_finite_recurrent(pot, alpha, TSequence({m: t}), window, tol=tol, cfg=cfg)


def shift_finite_explicit(pot: PotentialMatrix, alpha: float, tseq: TSequence,
                          window: tuple[int, int] | None = None, tol: float = 1e-12,
                          cfg: SolverConfig | None = None) -> IsoResult:
    """
    Same transformation as shift_finite_recurrent in closed form:
    S(x, T) g_p = H_p with S_ij = delta_ij + (e^{t_j} - 1) int_0^x h_i h_j and
    H_p = -(e^{t_j} - 1) h_jp, then Omega + G B - B G with G = sum g_k h_k^T.
    """
    cfg = resolve_config(pot, cfg)
    grid = solver_grid(pot, cfg)
    indices = _window_indices(tseq, window)
    spectrum, H = _base_state(pot, alpha, indices, tol, cfg)
    p, q = pot.evaluate(grid.nodes)
    support = tseq.support
    if not support:
        det = GridFunction(grid, np.ones(grid.size))
        return _result(pot, grid, p.copy(), q.copy(), H, spectrum, tseq, indices, det)
    position = {n: k for k, n in enumerate(indices)}
    rows = [position[n] for n in support]
    c = np.expm1(np.array([tseq.entries[n] for n in support]))
    W = H[rows]                                   # (K, X, 2)
    S = _gram_prefix(grid, W)                     # (K, K, X)
    matrix = np.eye(len(rows))[None] + np.moveaxis(S, -1, 0) * c[None, :, None]
    rhs = -(c[:, None, None] * W).transpose(1, 0, 2)
    g, det = solve_stacked(matrix, rhs, grid.nodes)
    w = W.transpose(1, 0, 2)
    dp, dq = commutator_update(g, w)
    cross = grid.cumulative(np.einsum('kxa,nxa->knx', W, H))   # int_0^x h_k h_n
    H_new = H + np.einsum('xka,knx->nxa', g, cross)
    for k, n in zip(rows, support):
        H_new[k] *= np.exp(0.5 * tseq.entries[n])
    return _result(pot, grid, p + dp, q + dq, H_new, spectrum, tseq, indices,
                   GridFunction(grid, det))


def ell_sequence(pot: PotentialMatrix, alpha: float, window: tuple[int, int] = DEFAULT_WINDOW,
                 tol: float = 1e-12, cfg: SolverConfig | None = None) -> dict[int, float]:
    """
    ell_n = ln|phi_n2(pi)|, phi_n normalized by (sin alpha, -cos alpha) at 0, beta = 0.
    """
    cfg = resolve_config(pot, cfg)
    indices = list(range(window[0], window[1] + 1))
    spectrum, H = _base_state(pot, alpha, indices, tol, cfg)
    return _ell(H, np.array([spectrum.a(n) for n in indices]), indices)


def zero_family_potential(grid: Grid, m: int, t: float, alpha: float = 0.0) -> PotentialMatrix:
    """
    Closed-form member of the isospectral family of the zero potential with
    a_m = pi e^{-t} (beta = 0):
    p = -c sin 2(lambda_m x + alpha) / (pi + c x), q = c cos 2(lambda_m x + alpha) / (pi + c x),
    c = e^t - 1, lambda_m = m - alpha/pi.
    """
    c = np.expm1(t)
    lam = m - alpha / np.pi

    def p_func(x):
        return -c * np.sin(2.0 * (lam * x + alpha)) / (np.pi + c * x)

    def q_func(x):
        return c * np.cos(2.0 * (lam * x + alpha)) / (np.pi + c * x)

    return PotentialMatrix.from_functions(grid, p_func, q_func, name=f'zero-family[{m},{t}]')


def l1_distance(first: PotentialMatrix, second: PotentialMatrix) -> float:
    """
    Integral of the operator norm of Omega_1 - Omega_2, sqrt(dp^2 + dq^2).
    """
    grid = first.domain
    p1, q1 = first.evaluate(grid.nodes)
    p2, q2 = second.evaluate(grid.nodes)
    return float(grid.integrate(np.hypot(p1 - p2, q1 - q2)))
