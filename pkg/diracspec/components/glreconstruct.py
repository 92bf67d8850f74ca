from dataclasses import dataclass, field

import numpy as np

from ..objects import Logger, Grid, PotentialMatrix, SpectralData, Trajectory2
from ..objects.errors import ContractViolation, DomainError, InconsistentDataError, SingularSystemError

MERGE_TOL = 1e-12
DROP_TOL = 1e-15
DEFAULT_CHUNK = 64
NYSTROM_LIMIT = 512

logger = Logger.get_instance()

def free_solution(lam, alpha: float, x) -> np.ndarray:
    """
    phi_0(x, lambda, alpha) = (sin(lambda x + alpha), -cos(lambda x + alpha)), shape (..., 2).
    """
    arg = np.multiply.outer(np.asarray(x, dtype=float), np.asarray(lam, dtype=float)) + alpha
    return np.stack([np.sin(arg), -np.cos(arg)], axis=-1)


def _free_gram(lams_i: np.ndarray, lams_j: np.ndarray, x) -> np.ndarray:
    """
    int_0^x phi_0(s, l_i)^T phi_0(s, l_j) ds = sin((l_i - l_j) x) / (l_i - l_j), shape (..., I, J).
    """
    delta = lams_i[:, None] - lams_j[None, :]
    x = np.asarray(x, dtype=float)[..., None, None]
    return x * np.sinc(delta * x / np.pi)


class GLSeriesKernel:
    """
    Degenerate kernel F(x, t) = sum_j c_j phi_0(x, l_j) phi_0(t, l_j)^T built from
    the target data (l = lambda_n, c = 1/a_n) and the free reference
    (l = n + (beta - alpha)/pi, c = -1/pi), |n| <= N. Terms with coinciding
    eigenvalues are merged and vanishing coefficients dropped.

    Args:
        target: Spectral data with norming constants
        trunc: Truncation N
    """
    def __init__(self, target: SpectralData, trunc: int) -> None:
        if not target.covers(-trunc, trunc):
            raise ContractViolation(f'target data must cover the indices [-{trunc}, {trunc}]')
        for n in range(-trunc, trunc + 1):
            if not target.a(n) > 0:
                raise ContractViolation(f'norming constant a_{n} must be positive')
        self._target = target.window(-trunc, trunc)
        self._trunc = trunc
        offset = target.angles.lattice_offset
        order = sorted(range(-trunc, trunc + 1), key=lambda n: (abs(n), n))
        lams, coefs = [], []
        for n in order:
            for lam, c in ((target.lam(n), 1.0 / target.a(n)), (n + offset, -1.0 / np.pi)):
                hit = [k for k, l in enumerate(lams) if abs(l - lam) < MERGE_TOL]
                if hit:
                    coefs[hit[0]] += c
                else:
                    lams.append(lam)
                    coefs.append(c)
        keep = [k for k, c in enumerate(coefs) if abs(c) > DROP_TOL]
        self._lams = np.array([lams[k] for k in keep])
        self._coefs = np.array([coefs[k] for k in keep])

    @property
    def target(self) -> SpectralData:
        return self._target

    @property
    def reference(self) -> SpectralData:
        offset = self._target.angles.lattice_offset
        n = self._trunc
        return SpectralData.from_lambdas(self._target.angles, {k: k + offset for k in range(-n, n + 1)},
                                         {k: np.pi for k in range(-n, n + 1)})

    @property
    def trunc(self) -> int:
        return self._trunc

    @property
    def alpha(self) -> float:
        return self._target.alpha

    @property
    def beta(self) -> float:
        return self._target.beta

    @property
    def lambdas(self) -> np.ndarray:
        return self._lams

    @property
    def coefficients(self) -> np.ndarray:
        return self._coefs

    @property
    def rank(self) -> int:
        return self._lams.size

    def basis(self, x) -> np.ndarray:
        return free_solution(self._lams, self.alpha, x)


def build_F(series: GLSeriesKernel, x: float, t: float) -> np.ndarray:
    """
    F(x, t) as a real 2x2 matrix.
    """
    for v in (x, t):
        if not -1e-12 <= v <= np.pi + 1e-12:
            raise DomainError(f'{v!r} outside [0, pi]')
    gx = series.basis(x)
    gt = series.basis(t)
    return np.einsum('j,ja,jb->ab', series.coefficients, gx, gt)


@dataclass
class GLKernel:
    """
    Solution K(x, t), 0 <= t <= x, of the Gelfand-Levitan equation.

    The degenerate solver stores K(x, t) = sum_j w_j(x) phi_0(t, l_j)^T through the
    weights w (shape (X, J, 2)); the Nystrom solver stores the lower triangle of
    node values (shape (X, X, 2, 2)). Both keep the diagonal K(x, x).
    """
    grid: Grid
    diagonal: np.ndarray
    series: GLSeriesKernel
    weights: np.ndarray | None = None
    dense: np.ndarray | None = None
    residual: float = 0.0
    condition: float = 1.0
    method: str = 'degenerate'
    extra: dict = field(default_factory=dict)

    def at(self, i: int, t) -> np.ndarray:
        """
        K(x_i, t) for t in [0, x_i].
        """
        x = self.grid.nodes[i]
        t = np.asarray(t, dtype=float)
        if np.any(t > x + 1e-12) or np.any(t < -1e-12):
            raise DomainError('K(x, t) is defined for 0 <= t <= x only')
        if self.weights is not None:
            if self.series.rank == 0:
                return np.zeros(t.shape + (2, 2))
            return np.einsum('ja,...jb->...ab', self.weights[i], self.series.basis(t))
        nodes = self.grid.nodes[:i + 1]
        block = self.dense[i, :i + 1].reshape(i + 1, 4)
        out = np.stack([np.interp(t, nodes, block[:, c]) for c in range(4)], axis=-1)
        return out.reshape(t.shape + (2, 2))


def discrete_residual(series: GLSeriesKernel, grid: Grid, weights: np.ndarray) -> float:
    """
    max over nodes of |W + g C + W G C| for weights W of shape (X, J, 2).
    """
    if series.rank == 0:
        return float(np.max(np.abs(weights))) if weights.size else 0.0
    c = series.coefficients
    g = series.basis(grid.nodes)                           # (X, J, 2)
    worst = 0.0
    for lo in range(0, grid.size, DEFAULT_CHUNK):
        x = grid.nodes[lo:lo + DEFAULT_CHUNK]
        G = _free_gram(series.lambdas, series.lambdas, x)  # (x, J, J)
        w = weights[lo:lo + DEFAULT_CHUNK]
        res = w + c[None, :, None] * g[lo:lo + DEFAULT_CHUNK] + np.einsum('xia,xij,j->xja', w, G, c)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def _solve_degenerate(series: GLSeriesKernel, grid: Grid, chunk: int) -> GLKernel:
    lams, c = series.lambdas, series.coefficients
    J = series.rank
    if J == 0:
        zeros = np.zeros((grid.size, 2, 2))
        return GLKernel(grid, zeros, series, weights=np.zeros((grid.size, 0, 2)))
    g = series.basis(grid.nodes)                            # (X, J, 2)
    weights = np.empty((grid.size, J, 2))
    worst, cond = 0.0, 1.0
    for lo in range(0, grid.size, chunk):
        x = grid.nodes[lo:lo + chunk]
        G = _free_gram(lams, lams, x)                       # (x, J, J)
        matrix = np.eye(J)[None] + c[None, :, None] * G     # I + C G
        rhs = -c[None, :, None] * g[lo:lo + chunk]          # -C g^T
        try:
            w = np.linalg.solve(matrix, rhs)
        except np.linalg.LinAlgError:
            raise SingularSystemError(float(x[0]), 'Gelfand-Levitan system is singular')
        weights[lo:lo + chunk] = w
        res = w + c[None, :, None] * g[lo:lo + chunk] + np.einsum('xia,xij,j->xja', w, G, c)
        worst = max(worst, float(np.max(np.abs(res))))
        if lo + chunk >= grid.size:
            cond = float(np.linalg.cond(matrix[-1]))
        logger.debug(f'Gelfand-Levitan nodes {lo}..{lo + len(x) - 1} solved')
    diagonal = np.einsum('xja,xjb->xab', weights, g)
    logger.log(f'Gelfand-Levitan rank {J}: residual {worst:.2e}, condition {cond:.2e}')
    return GLKernel(grid, diagonal, series, weights=weights, residual=worst, condition=cond)


def _solve_nystrom(series: GLSeriesKernel, grid: Grid) -> GLKernel:
    """
    Dense trapezoid collocation: for each x_i, K(x_i, t_k) + F(x_i, t_k)
    + sum_l w_l K(x_i, s_l) F(s_l, t_k) = 0 over the nodes of [0, x_i].
    """
    if grid.m > NYSTROM_LIMIT:
        raise ContractViolation(f'the Nystrom solver is meant for m <= {NYSTROM_LIMIT}')
    X = grid.size
    g = series.basis(grid.nodes).reshape(X, series.rank, 2)
    stacked = g.transpose(0, 2, 1).reshape(2 * X, series.rank)    # row 2i + a
    F = (stacked * series.coefficients) @ stacked.T                # (2X, 2X)
    dense = np.zeros((X, X, 2, 2))
    worst, cond = 0.0, 1.0
    for i in range(X):
        size = 2 * (i + 1)
        weights = np.full(i + 1, grid.h)
        weights[[0, -1]] *= 0.5
        if i == 0:
            weights[:] = 0.0
        D = np.repeat(weights, 2)
        block = F[:size, :size]
        matrix = np.eye(size) + D[:, None] * block                 # (I + D F)
        row = F[2 * i:2 * i + 2, :size]                            # F(x_i, t_k)
        try:
            R = np.linalg.solve(matrix.T, -row.T).T                # R (I + D F) = -F_row
        except np.linalg.LinAlgError:
            raise SingularSystemError(float(grid.nodes[i]))
        worst = max(worst, float(np.max(np.abs(R @ matrix + row))))
        dense[i, :i + 1] = R.reshape(2, i + 1, 2).transpose(1, 0, 2)
        if i == X - 1:
            cond = float(np.linalg.cond(matrix))
    diagonal = dense[np.arange(X), np.arange(X)]
    return GLKernel(grid, diagonal, series, dense=dense, residual=worst, condition=cond, method='nystrom')


def solve_gl(series: GLSeriesKernel, grid: Grid, method: str = 'degenerate',
             chunk: int = DEFAULT_CHUNK) -> GLKernel:
    """
    Solve K(x, t) + F(x, t) + int_0^x K(x, s) F(s, t) ds = 0 for 0 <= t <= x.

    Args:
        series: Degenerate kernel F
        grid: Grid on [0, pi]
        method: 'degenerate' (finite-rank solve per node, exact Gram integrals)
            or 'nystrom' (dense trapezoid collocation, small grids only)
        chunk: Nodes per batched solve of the degenerate method
    """
    if abs(grid.a) > 1e-12 or abs(grid.b - np.pi) > 1e-12:
        raise DomainError('the Gelfand-Levitan equation is solved on [0, pi]')
    if method == 'degenerate':
        return _solve_degenerate(series, grid, chunk)
    if method == 'nystrom':
        return _solve_nystrom(series, grid)
    raise DomainError(f"method must be 'degenerate' or 'nystrom', got {method!r}")


def recover_potential(kernel: GLKernel) -> PotentialMatrix:
    """
    Omega(x) = K(x, x) B - B K(x, x): p = -(k12 + k21), q = k11 - k22.
    """
    K = kernel.diagonal
    p = -(K[:, 0, 1] + K[:, 1, 0])
    q = K[:, 0, 0] - K[:, 1, 1]
    return PotentialMatrix.from_samples(kernel.grid, p, q)


@dataclass
class Reconstruction:
    potential: PotentialMatrix
    eigenfunctions: dict[int, Trajectory2]
    kernel: GLKernel
    orthogonality_defect: float
    boundary_defect: float


def _eigenfunctions(kernel: GLKernel, indices: list[int]) -> dict[int, Trajectory2]:
    """
    phi(x, lambda_n) = phi_0(x, lambda_n) + int_0^x K(x, t) phi_0(t, lambda_n) dt.
    """
    series = kernel.series
    grid = kernel.grid
    x = grid.nodes
    lams = np.array([series.target.lam(n) for n in indices])
    phi = free_solution(lams, series.alpha, x)                     # (X, n, 2)
    if kernel.weights is not None and series.rank:
        cross = _free_gram(series.lambdas, lams, x)                # (X, J, n)
        phi = phi + np.einsum('xja,xjn->xna', kernel.weights, cross)
    elif kernel.dense is not None:
        X = grid.size
        weights = np.tril(np.full((X, X), grid.h))
        weights[:, 0] *= 0.5
        weights[np.arange(X), np.arange(X)] *= 0.5
        weights[0, 0] = 0.0
        phi = phi + np.einsum('xt,xtab,tnb->xna', weights, kernel.dense, phi)
    return {n: Trajectory2.from_array(grid, phi[:, k]) for k, n in enumerate(indices)}


def reconstruct(data: SpectralData, grid: Grid, N: int, n_check: int | None = None,
                check_tol: float = 1e-3, method: str = 'degenerate') -> Reconstruction:
    """
    Recover the potential from eigenvalues and norming constants.

    Builds F from the data, solves the Gelfand-Levitan equation, reads Omega off the
    kernel diagonal, then checks the recovered eigenfunctions on |n| <= n_check:
    (phi_n, phi_m) = a_n delta_nm and the right boundary condition, both relative to check_tol.

    Args:
        data: Eigenvalues and norming constants covering [-N, N]
        grid: Grid on [0, pi]
        N: Truncation
        n_check: Half-width of the verified window, default min(N, 10)
        check_tol: Relative tolerance of the checks
        method: Solver, see solve_gl

    Returns:
        Reconstruction: Potential, eigenfunctions phi(x, lambda_n), kernel and check defects
    """
    if N > grid.m // 8:
        raise ContractViolation(f'N = {N} under-resolved on {grid.m} intervals, need N <= m/8')
    offset = data.angles.lattice_offset
    for n in range(-N, N + 1):
        if n in data and abs(data.lam(n) - n - offset) >= 1.0:
            raise ContractViolation(f'lambda_{n} strays from the free lattice by more than 1')
    series = GLSeriesKernel(data, N)
    kernel = solve_gl(series, grid, method=method)
    potential = recover_potential(kernel)
    n_check = min(N, 10) if n_check is None else n_check
    indices = list(range(-n_check, n_check + 1))
    phis = _eigenfunctions(kernel, indices)
    values = np.stack([phis[n].values for n in indices])
    gram = grid.integrate(np.einsum('nxa,mxa->nmx', values, values))
    a = np.array([data.a(n) for n in indices])
    scaled = (gram - np.diag(a)) / np.sqrt(np.outer(a, a))
    i, j = np.unravel_index(int(np.argmax(np.abs(scaled))), scaled.shape)
    ortho = float(abs(scaled[i, j]))
    if ortho > check_tol:
        logger.error(f'recovered eigenfunctions fail orthogonality at ({indices[i]}, {indices[j]})')
        raise InconsistentDataError(indices[i], indices[j], ortho)
    beta = data.beta
    ends = values[:, -1]
    bc = np.abs(ends[:, 0] * np.cos(beta) + ends[:, 1] * np.sin(beta)) / np.linalg.norm(ends, axis=-1)
    k = int(np.argmax(bc))
    if bc[k] > check_tol:
        raise InconsistentDataError(indices[k], indices[k], float(bc[k]))
    return Reconstruction(potential, phis, kernel, ortho, float(bc[k]))
