from dataclasses import dataclass, field

import numpy as np

from ..objects import (Logger, BoundaryAngles, Grid, GridFunction, PotentialMatrix, SpectralData, SurgeryPlan,
                       Trajectory2)
from ..objects.errors import ContractViolation, DomainError, PlanError
from .cauchy import SolverConfig, cauchy_batch, solve_cauchy, solver_grid
from .degenerate import commutator_update, solve_stacked
from .halfaxis import HalfAxisProblem
from .hermite import ModelSpectrum

COLLISION_TOL = 1e-9
DEFAULT_WINDOW = (-5, 5)

logger = Logger.get_instance()

@dataclass(frozen=True)
class BasisFunction:
    """
    Solution of the base problem entering a finite-rank kernel.

    Args:
        lam: Spectral parameter
        values: Samples on the grid, shape (X, 2), normalized by the left boundary vector
        norm: Squared norm on [0, inf) when lam is an eigenvalue of the base problem, else None
        kappa: Decay rate beyond the truncation point (eigenvalues only)
    """
    lam: float
    values: np.ndarray
    norm: float | None = None
    kappa: float = 0.0


@dataclass(frozen=True)
class PerturbationStep:
    """
    Rank-one change of the spectral function: a jump gamma at nu. Removal of an
    eigenvalue uses gamma = -1/a, rescaling a -> b uses 1/b - 1/a, and adding an
    eigenvalue with norming constant c uses 1/c. norm is a for eigenvalues of the
    current operator, None for added points.
    """
    nu: float
    gamma: float
    norm: float | None = None


@dataclass
class SurgeryResult:
    potential: PotentialMatrix
    eigenfunctions: dict[int, Trajectory2]
    spectrum: SpectralData
    determinant: GridFunction
    extra: dict = field(default_factory=dict)


def _gram(grid: Grid, funcs: list[BasisFunction]) -> tuple[np.ndarray, np.ndarray]:
    """
    S[i, j](x) = int_0^x f_i . f_j, shape (K, K, X), and for pairs of eigenfunctions
    the tails T[i, j](x) = int_x^inf f_i . f_j with S = delta_ij a_i - T, the part
    beyond x_max estimated from the decay rates. T is zero for the other pairs.
    """
    K = len(funcs)
    S = np.empty((K, K, grid.size))
    T = np.zeros((K, K, grid.size))
    for i, fi in enumerate(funcs):
        for j in range(i, K):
            fj = funcs[j]
            product = np.sum(fi.values * fj.values, axis=-1)
            if fi.norm is not None and fj.norm is not None:
                T[i, j] = grid.tail(product) + product[-1] / (fi.kappa + fj.kappa)
                S[i, j] = (fi.norm if i == j else 0.0) - T[i, j]
            else:
                S[i, j] = grid.cumulative(product)
            S[j, i], T[j, i] = S[i, j], T[i, j]
    return S, T


def _lead(gamma: float, norm: float) -> float:
    """
    1 + gamma a, exactly zero when the step removes the eigenvalue.
    """
    product = gamma * norm
    return 0.0 if abs(product + 1.0) < 1e-12 else 1.0 + product


def _end_kappa(pot: PotentialMatrix, lam: float) -> float:
    p, q = pot.evaluate(np.array([pot.domain.b]))
    value = p[0] ** 2 + q[0] ** 2 - lam ** 2
    if value <= 0:
        raise ContractViolation(f'lambda = {lam} does not decay at x_max = {pot.domain.b}')
    return float(np.sqrt(value))


def _model_function(base: ModelSpectrum, n: int, grid: Grid, pot: PotentialMatrix) -> BasisFunction:
    lam = base.lam(n)
    return BasisFunction(lam, base.eigenfunction(n, grid.nodes), base.a(n), _end_kappa(pot, lam))


def _check_additions(base: ModelSpectrum, plan: SurgeryPlan, kept: list[int]) -> None:
    retained = [base.lam(n) for n in kept if n not in plan.removals]
    for add in plan.additions:
        if any(abs(add.mu - lam) < COLLISION_TOL for lam in retained):
            raise PlanError(f'added eigenvalue {add.mu} collides with a retained eigenvalue')


def _window(base: ModelSpectrum, plan: SurgeryPlan, window: tuple[int, int]) -> list[int]:
    """
    Contiguous base indices covering the window, the plan's indices and the added points.
    """
    lo, hi = window
    touched = list(plan.removals) + [r.n for r in plan.rescalings]
    if touched:
        lo, hi = min(lo, min(touched)), max(hi, max(touched))
    for add in plan.additions:
        while base.lam(lo) >= add.mu:
            lo -= 1
        while base.lam(hi) <= add.mu:
            hi += 1
    return list(range(lo, hi + 1))


def _zero_indexed(lambdas: list[float]) -> dict[int, float]:
    """
    Index sorted eigenvalues so that lambda_0 <= 0 < lambda_1.
    """
    ordered = sorted(lambdas)
    nonpositive = sum(1 for lam in ordered if lam <= 0)
    return {k - nonpositive + 1: lam for k, lam in enumerate(ordered)}


def _system_matrix(funcs: list[BasisFunction], gammas: np.ndarray, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """
    delta_jk + gamma_j S_jk at every node, shape (X, R, R). Eigenfunction pairs are
    written as delta_jk (1 + gamma_j a_j) - gamma_j T_jk, so a removal row is T_jk / a_j.
    """
    matrix = np.eye(len(funcs))[:, :, None] + gammas[:, None, None] * S
    for j, fj in enumerate(funcs):
        if fj.norm is None:
            continue
        for k, fk in enumerate(funcs):
            if fk.norm is not None:
                matrix[j, k] = (_lead(gammas[j], fj.norm) if j == k else 0.0) - gammas[j] * T[j, k]
    return np.moveaxis(matrix, -1, 0)


def _equilibrated_solve(matrix: np.ndarray, rhs: np.ndarray, nodes: np.ndarray):
    """
    Row-scaled solve: removal rows shrink towards x_max without being singular.
    """
    scale = np.max(np.abs(matrix), axis=-1)
    scale = np.where(scale > 0, scale, 1.0)
    g, det = solve_stacked(matrix / scale[..., None], rhs / scale[..., None], nodes)
    return g, det * np.prod(scale, axis=-1)


def surgery(base: ModelSpectrum, plan: SurgeryPlan, grid: Grid | None = None,
            window: tuple[int, int] = DEFAULT_WINDOW) -> SurgeryResult:
    """
    Finite change of the half-axis spectral data of the linear model.

    The spectral function changes by sum_k gamma_k delta(lambda - nu_k), so the
    Gelfand-Levitan kernel is K(x, t) = sum_k g_k(x) W_k(t)^T with S(x) g = H,
    S_jk = delta_jk + gamma_j int_0^x W_j . W_k and H_j = -gamma_j W_j. The new
    potential is Omega_0 + G B - B G with G = K(x, x).

    Args:
        base: Half-axis model spectrum (flavor half_bc0 or half_bc_pi2)
        plan: Removals, additions and rescalings
        grid: Truncated domain [0, x_max], default from the base window
        window: Base indices whose eigenfunctions are carried along

    Returns:
        SurgeryResult: New potential, eigenfunctions, spectral data and det S(x)
    """
    if base.flavor == 'whole':
        raise DomainError('surgery works on the half-axis model spectra')
    grid = grid or base.grid()
    if abs(grid.a) > 1e-12:
        raise DomainError('surgery needs a grid on [0, x_max]')
    pot0 = base.potential(grid)
    kept = _window(base, plan, window)
    _check_additions(base, plan, kept)
    funcs = {n: _model_function(base, n, grid, pot0) for n in kept}
    if plan.additions:
        mus = np.array([add.mu for add in plan.additions])
        psi = cauchy_batch(pot0, mus, BoundaryAngles(base.alpha).initial_vector(), SolverConfig(m=grid.m))
        for j, add in enumerate(plan.additions):
            funcs[('add', j)] = BasisFunction(add.mu, psi[j])
    rows, gammas = [], []
    for n in plan.removals:
        rows.append(n)
        gammas.append(-1.0 / base.a(n))
    for r in plan.rescalings:
        gamma = 1.0 / r.b - 1.0 / base.a(r.n)
        if gamma != 0.0:
            rows.append(r.n)
            gammas.append(gamma)
    for j, add in enumerate(plan.additions):
        rows.append(('add', j))
        gammas.append(1.0 / add.c)
    keys = list(funcs)
    S, T = _gram(grid, [funcs[k] for k in keys])
    position = {k: i for i, k in enumerate(keys)}
    rescaled = {r.n: r.b for r in plan.rescalings}
    new_norming = {}
    for n in kept:
        if n not in plan.removals:
            new_norming[n] = rescaled.get(n, base.a(n))
    for j, add in enumerate(plan.additions):
        new_norming[('add', j)] = add.c
    if not rows:
        values = {k: funcs[k].values for k in new_norming}
        return _surgery_result(base, grid, pot0, values, funcs, new_norming, np.ones(grid.size))
    idx = [position[k] for k in rows]
    gam = np.array(gammas)
    W = np.stack([funcs[k].values for k in rows], axis=1)                # (X, R, 2)
    matrix = _system_matrix([funcs[k] for k in rows], gam, S[np.ix_(idx, idx)], T[np.ix_(idx, idx)])
    rhs = -gam[None, :, None] * W
    g, det = _equilibrated_solve(matrix, rhs, grid.nodes)
    dp, dq = commutator_update(g, W)
    p0, q0 = pot0.evaluate(grid.nodes)
    potential = PotentialMatrix.from_samples(grid, p0 + dp, q0 + dq, name='surgery')
    values = {}
    for k in new_norming:
        if k in rows:
            r = rows.index(k)
            values[k] = -g[:, r] / gam[r]
        else:
            cross = S[idx, position[k]]                                  # (R, X)
            values[k] = funcs[k].values + np.einsum('xra,rx->xa', g, cross)
    logger.log('surgery solved', terms=len(rows), min_det=f'{np.min(det):.3e}')
    return _surgery_result(base, grid, potential, values, funcs, new_norming, det)


def _surgery_result(base, grid, potential, values, funcs, norming, det) -> SurgeryResult:
    lambdas = {k: funcs[k].lam for k in norming}
    enumeration = _zero_indexed(list(lambdas.values()))
    by_lam = {lam: k for k, lam in lambdas.items()}
    spectrum = SpectralData.from_lambdas(BoundaryAngles(base.alpha), enumeration,
                                         {n: norming[by_lam[lam]] for n, lam in enumeration.items()})
    eigenfunctions = {n: Trajectory2.from_array(grid, values[by_lam[lam]]) for n, lam in enumeration.items()}
    return SurgeryResult(potential, eigenfunctions, spectrum, GridFunction(grid, det))


def perturbation_steps(base: ModelSpectrum, plan: SurgeryPlan) -> list[PerturbationStep]:
    """
    Rank-one steps equivalent to a surgery plan on the model: removals, then rescalings, then additions.
    """
    steps = [PerturbationStep(base.lam(n), -1.0 / base.a(n), base.a(n)) for n in plan.removals]
    steps += [PerturbationStep(base.lam(r.n), 1.0 / r.b - 1.0 / base.a(r.n), base.a(r.n))
              for r in plan.rescalings]
    steps += [PerturbationStep(add.mu, 1.0 / add.c) for add in plan.additions]
    return steps


def model_basis(base: ModelSpectrum, steps: list[PerturbationStep], grid: Grid) -> list[np.ndarray]:
    """
    Exact base solutions for the steps: model eigenfunctions for eigenvalue steps,
    forward Cauchy solutions otherwise.
    """
    pot0 = base.potential(grid)
    lookup = {base.lam(n): n for n in range(-400, 401)}
    basis = []
    for step in steps:
        if step.norm is not None:
            nearest = min(lookup, key=lambda lam: abs(lam - step.nu))
            basis.append(base.eigenfunction(lookup[nearest], grid.nodes))
        else:
            basis.append(solve_cauchy(pot0, step.nu, base.alpha, SolverConfig(m=grid.m)).values)
    return basis


def general_finite_perturbation(pot: PotentialMatrix, alpha: float, steps: list[PerturbationStep],
                                cfg: SolverConfig | None = None,
                                basis: list[np.ndarray] | None = None) -> PotentialMatrix:
    """
    Apply rank-one changes of the spectral function one after the other.

    Step k uses the current solution phi at nu_k: with d = 1 + gamma_k int_0^x |phi|^2,
    Omega += G B - B G for G = -gamma_k phi phi^T / d, and every other carried solution
    becomes psi - gamma_k phi int_0^x phi . psi / d. The Gram integrals are updated in
    closed form, so the result matches the one-shot surgery solve to rounding.

    Args:
        pot: Base potential on [0, x_max]
        alpha: Boundary angle at 0
        steps: Rank-one changes in application order
        cfg: Solver settings
        basis: Optional base solutions at the nu_k on the solver grid, shape (X, 2) each;
            computed by shooting (eigenvalues) or forward Cauchy solves otherwise

    Returns:
        PotentialMatrix: The perturbed potential
    """
    cfg = cfg or SolverConfig(m=max(pot.domain.m, 64))
    grid = solver_grid(pot, cfg)
    p, q = pot.evaluate(grid.nodes)
    p, q = p.copy(), q.copy()
    active = [k for k, step in enumerate(steps) if step.gamma != 0.0]
    if not active:
        return PotentialMatrix.from_samples(grid, p, q, interpolation=pot.interpolation)
    if basis is None:
        problem = HalfAxisProblem(pot, alpha, cfg)
        basis = [problem.decaying_solution(s.nu).values if s.norm is not None
                 else solve_cauchy(pot, s.nu, alpha, cfg).values for s in steps]
    funcs = []
    for k in active:
        s = steps[k]
        kappa = _end_kappa(pot, s.nu) if s.norm is not None else 0.0
        funcs.append(BasisFunction(s.nu, np.asarray(basis[k], dtype=float), s.norm, kappa))
    S, T = _gram(grid, funcs)
    H = np.stack([f.values for f in funcs])                                   # (K, X, 2)
    # tails stay valid for eigenfunction pairs until the first step at a non-eigenvalue
    tails = True
    for i, k in enumerate(active):
        gamma, norm = steps[k].gamma, funcs[i].norm
        if tails and norm is not None:
            d = _lead(gamma, norm) - gamma * T[i, i]
        else:
            d = 1.0 + gamma * S[i, i]
        if np.any(d <= 0):
            x = float(grid.nodes[np.flatnonzero(d <= 0)[0]])
            raise ContractViolation(f'1 + gamma int |phi|^2 reaches zero at x = {x} in step {k}')
        phi = H[i]
        g = (-gamma * phi / d[:, None])[:, None, :]
        dp, dq = commutator_update(g, phi[:, None, :])
        p += dp
        q += dq
        s_i = S[i].copy()
        H = H - (gamma * s_i / d)[:, :, None] * phi[None]
        H[i] = phi / d[:, None]
        S = S - gamma * s_i[:, None, :] * s_i[None, :, :] / d
        S[i, :] = s_i / d
        S[:, i] = S[i, :]
        S[i, i] = s_i[i] / d
        if norm is None:
            tails = False
        elif tails:
            t_i = T[i].copy()
            T = T + gamma * t_i[:, None, :] * t_i[None, :, :] / d
        logger.debug(f'rank-one step at nu = {steps[k].nu} applied')
    return PotentialMatrix.from_samples(grid, p, q, interpolation=pot.interpolation)
