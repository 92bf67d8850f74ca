import numpy as np

from ..objects import Logger
from ..objects.errors import SingularSystemError

CRAMER_LIMIT = 12
DETERMINANT_FLOOR = 1e-12

logger = Logger.get_instance()

def solve_stacked(matrix: np.ndarray, rhs: np.ndarray, nodes: np.ndarray | None = None,
                  cramer_limit: int = CRAMER_LIMIT, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """
    Solve matrix[x] @ g[x] = rhs[x] at every grid node x, the linear systems
    behind degenerate (finite-rank) Gelfand-Levitan kernels.

    Small systems use determinant ratios with the replaced-column matrices;
    larger ones go through LU solves.

    Args:
        matrix: Shape (X, K, K)
        rhs: Shape (X, K, P)
        nodes: Grid nodes, used to report where a system is singular
        cramer_limit: Largest K solved by determinant ratios
        check: Raise SingularSystemError when |det| <= 1e-12 times the product of the row scales

    Returns:
        tuple: (solution of shape (X, K, P), determinants of shape (X,))
    """
    det = np.linalg.det(matrix)
    if check:
        rows = np.prod(np.max(np.abs(matrix), axis=-1), axis=-1)
        bad = np.flatnonzero(~(np.abs(det) > DETERMINANT_FLOOR * rows))
        if bad.size:
            x = float(nodes[bad[0]]) if nodes is not None else float(bad[0])
            logger.error('degenerate system is singular', x=x)
            raise SingularSystemError(x)
    k = matrix.shape[-1]
    if k <= cramer_limit:
        solution = np.empty(rhs.shape, dtype=np.result_type(matrix, rhs))
        for i in range(k):
            for p in range(rhs.shape[-1]):
                replaced = matrix.copy()
                replaced[:, :, i] = rhs[:, :, p]
                solution[:, i, p] = np.linalg.det(replaced) / det
        return solution, det
    return np.linalg.solve(matrix, rhs), det


def commutator_update(g: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Potential increment G B - B G with G(x, x) = sum_k g_k(x) w_k(x)^T.

    Args:
        g: Shape (X, K, 2)
        w: Shape (X, K, 2)

    Returns:
        tuple: (delta p, delta q), each of shape (X,)
    """
    G = np.einsum('xka,xkb->xab', g, w)
    return -(G[:, 0, 1] + G[:, 1, 0]), G[:, 0, 0] - G[:, 1, 1]
