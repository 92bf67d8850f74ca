from dataclasses import dataclass

import numpy as np

from ..objects import Logger, Grid, PotentialMatrix, Trajectory2
from ..objects.errors import DomainError, NumericError, ShapeError

METHODS = ('rk4', 'magnus4')
GAUSS_NODES = (0.5 - np.sqrt(3.0) / 6.0, 0.5 + np.sqrt(3.0) / 6.0)
MAGNUS_COMMUTATOR = np.sqrt(3.0) / 12.0
LAMBDA_CHUNK = 32

logger = Logger.get_instance()

@dataclass(frozen=True)
class SolverConfig:
    """
    Fixed-step integrator settings. The spectral parameter is passed per call.

    Args:
        method: 'rk4' (classical fourth-order Runge-Kutta, midpoint values interpolated
            for sampled potentials) or 'magnus4' (fourth-order Magnus, exact 2x2 exponentials)
        m: Number of grid intervals
    """
    method: str = 'rk4'
    m: int = 2048

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise DomainError(f'method must be one of {METHODS}, got {self.method!r}')
        if int(self.m) != self.m or self.m < 64:
            raise DomainError(f'the solver needs m >= 64 intervals, got {self.m!r}')


@dataclass(frozen=True)
class FundamentalMatrix:
    """
    Phi(x, lambda) per node of grid, with Phi at the left endpoint equal to E.
    """
    grid: Grid
    entries: np.ndarray

    def determinant(self) -> np.ndarray:
        e = self.entries
        return e[:, 0, 0] * e[:, 1, 1] - e[:, 0, 1] * e[:, 1, 0]

    def column(self, j: int) -> Trajectory2:
        return Trajectory2(self.grid, self.entries[:, 0, j], self.entries[:, 1, j])

    def at_end(self) -> np.ndarray:
        return self.entries[-1]


@dataclass(frozen=True)
class WronskianReport:
    """
    omega(x) = phi_1 u_2 - phi_2 u_1 per node, its mean and its largest deviation from the mean.
    """
    values: np.ndarray
    mean: complex
    deviation: float


def resolve_config(pot: PotentialMatrix, cfg: SolverConfig | None) -> SolverConfig:
    """
    Default configuration follows the potential's own grid.
    """
    if cfg is not None:
        return cfg
    return SolverConfig(m=max(pot.domain.m, 64))


def solver_grid(pot: PotentialMatrix, cfg: SolverConfig | None = None) -> Grid:
    cfg = resolve_config(pot, cfg)
    if cfg.m == pot.domain.m:
        return pot.domain
    return Grid(pot.domain.a, pot.domain.b, cfg.m)


def _node_samples(pot: PotentialMatrix, cfg: SolverConfig) -> tuple:
    grid = solver_grid(pot, cfg)

    def sample():
        x, h = grid.nodes, grid.h
        logger.debug(f'sampling {pot!r} for {cfg.method} on {cfg.m} intervals')
        if cfg.method == 'magnus4':
            return tuple(pot.evaluate(x[:-1] + c * h) for c in GAUSS_NODES)
        return pot.evaluate(x), pot.evaluate(x[:-1] + 0.5 * h)

    return pot.cached((cfg.method, cfg.m), sample)


def _as_lambdas(lams) -> np.ndarray:
    lams = np.atleast_1d(np.asarray(lams))
    if lams.ndim != 1:
        raise ShapeError('spectral parameters must be a scalar or a 1-D array')
    if not np.all(np.isfinite(lams)):
        raise NumericError('spectral parameter is not finite')
    if np.iscomplexobj(lams):
        return lams.astype(complex)
    return lams.astype(float)


def _expm_tracefree(m00, m01, m10) -> np.ndarray:
    """
    exp of ((m00, m01), (m10, -m00)) via cosh(w) E + sinh(w)/w M, w^2 = -det M.
    """
    d = m00 * m00 + m01 * m10
    small = np.abs(d) < 1e-8
    if np.iscomplexobj(d):
        w = np.sqrt(np.where(small, 1.0, d))
        c = np.where(small, 1 + d / 2 + d * d / 24, np.cosh(w))
        s = np.where(small, 1 + d / 6 + d * d / 120, np.sinh(w) / w)
    else:
        r = np.sqrt(np.where(small, 1.0, np.abs(d)))
        hyper = d > 0
        c = np.where(small, 1 + d / 2 + d * d / 24, np.where(hyper, np.cosh(r), np.cos(r)))
        s = np.where(small, 1 + d / 6 + d * d / 120, np.where(hyper, np.sinh(r), np.sin(r)) / r)
    return np.stack([np.stack([c + s * m00, s * m01], axis=-1),
                     np.stack([s * m10, c - s * m00], axis=-1)], axis=-2)


def _magnus_steps(lam: np.ndarray, samples: tuple, h: float) -> np.ndarray:
    (p1, q1), (p2, q2) = samples
    lam = lam[:, None]
    x0, x1, x2 = np.broadcast_to(q1, (lam.shape[0], q1.size)), -lam - p1, lam - p1
    y0, y1, y2 = np.broadcast_to(q2, (lam.shape[0], q2.size)), -lam - p2, lam - p2
    # [A(x_2), A(x_1)] for trace-free 2x2 matrices
    c0 = y1 * x2 - x1 * y2
    c1 = 2.0 * (y0 * x1 - y1 * x0)
    c2 = 2.0 * (y2 * x0 - y0 * x2)
    k = MAGNUS_COMMUTATOR * h * h
    return _expm_tracefree(0.5 * h * (x0 + y0) + k * c0,
                           0.5 * h * (x1 + y1) + k * c1,
                           0.5 * h * (x2 + y2) + k * c2)


def _coefficient_matrix(lam: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    lam = lam[:, None]
    a00 = np.broadcast_to(q, (lam.shape[0], q.size)).astype(np.result_type(lam, q))
    return np.stack([np.stack([a00, -lam - p], axis=-1),
                     np.stack([lam - p, -a00], axis=-1)], axis=-2)


def _rk4_steps(a_start: np.ndarray, a_mid: np.ndarray, a_end: np.ndarray, h: float) -> np.ndarray:
    eye = np.eye(2)
    k1 = a_start
    k2 = a_mid @ (eye + 0.5 * h * k1)
    k3 = a_mid @ (eye + 0.5 * h * k2)
    k4 = a_end @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_matrices(pot: PotentialMatrix, lams, cfg: SolverConfig | None = None,
                  backward: bool = False) -> np.ndarray:
    """
    One-step propagators of y' = A(x, lambda) y with A = -B(lambda - Omega).

    Args:
        pot: Potential
        lams: Spectral parameters, real or complex
        cfg: Solver settings
        backward: If True, step k maps y(x_{k+1}) to y(x_k)

    Returns:
        np.ndarray: Shape (L, m, 2, 2)
    """
    cfg = resolve_config(pot, cfg)
    lams = _as_lambdas(lams)
    h = solver_grid(pot, cfg).h
    samples = _node_samples(pot, cfg)
    if cfg.method == 'magnus4':
        steps = _magnus_steps(lams, samples, h)
        if backward:
            # det = 1, so the inverse is the adjugate
            inverse = np.empty_like(steps)
            inverse[..., 0, 0] = steps[..., 1, 1]
            inverse[..., 1, 1] = steps[..., 0, 0]
            inverse[..., 0, 1] = -steps[..., 0, 1]
            inverse[..., 1, 0] = -steps[..., 1, 0]
            steps = inverse
        return steps
    (p, q), (pm, qm) = samples
    a_nodes = _coefficient_matrix(lams, p, q)
    a_mid = _coefficient_matrix(lams, pm, qm)
    if backward:
        return _rk4_steps(a_nodes[:, 1:], a_mid, a_nodes[:, :-1], -h)
    return _rk4_steps(a_nodes[:, :-1], a_mid, a_nodes[:, 1:], h)


def _sweep(steps: np.ndarray, y_start: np.ndarray, backward: bool, renormalize: bool):
    n_lam, m = steps.shape[:2]
    values = np.empty((n_lam, m + 1, 2), dtype=np.result_type(steps, y_start))
    logscale = np.zeros((n_lam, m + 1)) if renormalize else None
    order = range(m - 1, -1, -1) if backward else range(m)
    current = m if backward else 0
    values[:, current] = y_start
    for k in order:
        target = k if backward else k + 1
        e = steps[:, k]
        y1, y2 = values[:, current, 0], values[:, current, 1]
        n1 = e[:, 0, 0] * y1 + e[:, 0, 1] * y2
        n2 = e[:, 1, 0] * y1 + e[:, 1, 1] * y2
        if renormalize:
            norm = np.sqrt(np.abs(n1) ** 2 + np.abs(n2) ** 2)
            n1, n2 = n1 / norm, n2 / norm
            logscale[:, target] = logscale[:, current] + np.log(norm)
        values[:, target, 0] = n1
        values[:, target, 1] = n2
        current = target
    return values, logscale


def _start_vectors(y_start, n_lam: int) -> np.ndarray:
    y_start = np.asarray(y_start)
    if y_start.shape == (2,):
        return np.broadcast_to(y_start, (n_lam, 2))
    if y_start.shape != (n_lam, 2):
        raise ShapeError(f'start vectors of shape {y_start.shape} for {n_lam} spectral parameters')
    return y_start


def cauchy_batch(pot: PotentialMatrix, lams, y_start, cfg: SolverConfig | None = None,
                 renormalize: bool = False):
    """
    Forward solutions from the left endpoint for several spectral parameters.

    Args:
        pot: Potential
        lams: Spectral parameters
        y_start: Initial vector, shape (2,) or (L, 2)
        cfg: Solver settings
        renormalize: If True, store unit vectors and return running log-norms too

    Returns:
        np.ndarray | tuple: Values of shape (L, m + 1, 2), plus log-norms when renormalize is set
    """
    cfg = resolve_config(pot, cfg)
    lams = _as_lambdas(lams)
    starts = _start_vectors(y_start, lams.size)
    parts, scales = [], []
    for lo in range(0, lams.size, LAMBDA_CHUNK):
        steps = step_matrices(pot, lams[lo:lo + LAMBDA_CHUNK], cfg)
        values, logscale = _sweep(steps, starts[lo:lo + LAMBDA_CHUNK], False, renormalize)
        parts.append(values)
        scales.append(logscale)
    values = np.concatenate(parts)
    if renormalize:
        return values, np.concatenate(scales)
    return values


def terminal_batch(pot: PotentialMatrix, lams, y_end, cfg: SolverConfig | None = None,
                   renormalize: bool = False):
    """
    Backward solutions from the right endpoint. Same conventions as cauchy_batch.
    """
    cfg = resolve_config(pot, cfg)
    lams = _as_lambdas(lams)
    ends = _start_vectors(y_end, lams.size)
    parts, scales = [], []
    for lo in range(0, lams.size, LAMBDA_CHUNK):
        steps = step_matrices(pot, lams[lo:lo + LAMBDA_CHUNK], cfg, backward=True)
        values, logscale = _sweep(steps, ends[lo:lo + LAMBDA_CHUNK], True, renormalize)
        parts.append(values)
        scales.append(logscale)
    values = np.concatenate(parts)
    if renormalize:
        return values, np.concatenate(scales)
    return values


def _tree_product(steps: np.ndarray) -> np.ndarray:
    """
    steps[:, m-1] @ ... @ steps[:, 0] by pairwise reduction.
    """
    mats = steps
    while mats.shape[1] > 1:
        count = mats.shape[1]
        paired = mats[:, 1:count - count % 2:2] @ mats[:, 0:count - count % 2:2]
        if count % 2:
            paired = np.concatenate([paired, mats[:, -1:]], axis=1)
        mats = paired
    return mats[:, 0]


def endpoint_matrix(pot: PotentialMatrix, lams, cfg: SolverConfig | None = None) -> np.ndarray:
    """
    Phi(b, lambda) for each spectral parameter, shape (L, 2, 2).
    """
    cfg = resolve_config(pot, cfg)
    lams = _as_lambdas(lams)
    parts = [_tree_product(step_matrices(pot, lams[lo:lo + LAMBDA_CHUNK], cfg))
             for lo in range(0, lams.size, LAMBDA_CHUNK)]
    return np.concatenate(parts)


def solve_cauchy(pot: PotentialMatrix, lam: complex, alpha: float,
                 cfg: SolverConfig | None = None) -> Trajectory2:
    """
    Solution phi(x, lambda, alpha) with phi(a) = (sin alpha, -cos alpha).

    Args:
        pot: Potential
        lam: Spectral parameter
        alpha: Boundary angle at the left end
        cfg: Solver settings

    Returns:
        Trajectory2: phi on the solver grid
    """
    values = cauchy_batch(pot, [lam], np.array([np.sin(alpha), -np.cos(alpha)]), cfg)[0]
    return Trajectory2.from_array(solver_grid(pot, cfg), values)


def solve_terminal(pot: PotentialMatrix, lam: complex, beta: float,
                   cfg: SolverConfig | None = None) -> Trajectory2:
    """
    Solution psi(x, lambda, beta) with psi(b) = (sin beta, -cos beta), integrated backwards.
    """
    values = terminal_batch(pot, [lam], np.array([np.sin(beta), -np.cos(beta)]), cfg)[0]
    return Trajectory2.from_array(solver_grid(pot, cfg), values)


def fundamental_matrix(pot: PotentialMatrix, lam: complex,
                       cfg: SolverConfig | None = None) -> FundamentalMatrix:
    cfg = resolve_config(pot, cfg)
    steps = step_matrices(pot, [lam], cfg)[0]
    entries = np.empty((cfg.m + 1, 2, 2), dtype=steps.dtype)
    entries[0] = np.eye(2)
    for k in range(cfg.m):
        entries[k + 1] = steps[k] @ entries[k]
    return FundamentalMatrix(solver_grid(pot, cfg), entries)


def wronskian(phi: Trajectory2, u: Trajectory2) -> WronskianReport:
    if phi.grid != u.grid:
        raise ShapeError(f'grid mismatch: {phi.grid} vs {u.grid}')
    values = phi.y1 * u.y2 - phi.y2 * u.y1
    mean = values.mean()
    return WronskianReport(values, complex(mean), float(np.max(np.abs(values - mean))))


def _derivative(values: np.ndarray, h: float) -> np.ndarray:
    """
    Fourth-order central differences on the nodes 2..m-2.
    """
    return (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)


def dirac_residual(pot: PotentialMatrix, traj: Trajectory2, lam: complex) -> float:
    """
    max |B y' + Omega y - lambda y| over the interior nodes of traj.grid.
    """
    grid = traj.grid
    p, q = pot.evaluate(grid.nodes[2:-2])
    y1, y2 = traj.y1[2:-2], traj.y2[2:-2]
    d1, d2 = _derivative(traj.y1, grid.h), _derivative(traj.y2, grid.h)
    r1 = d2 + p * y1 + q * y2 - lam * y1
    r2 = -d1 + q * y1 - p * y2 - lam * y2
    return float(np.max(np.sqrt(np.abs(r1) ** 2 + np.abs(r2) ** 2)))


def picard_solution(pot: PotentialMatrix, lam: complex, alpha: float,
                    iterations: int = 40) -> Trajectory2:
    """
    Successive approximations y_{k+1}(x) = y(a) + int_a^x A(s) y_k(s) ds on the
    potential's own grid, trapezoid quadrature. Meant for small grids.
    """
    grid = pot.domain
    lam_arr = _as_lambdas([lam])
    a = _coefficient_matrix(lam_arr, pot.p_values, pot.q_values)[0]
    y0 = np.array([np.sin(alpha), -np.cos(alpha)], dtype=a.dtype)
    y = np.broadcast_to(y0, (grid.size, 2)).copy()
    for _ in range(iterations):
        integrand = np.einsum('kij,kj->ki', a, y)
        y = y0 + grid.cumulative(integrand, axis=0)
    return Trajectory2.from_array(grid, y)
