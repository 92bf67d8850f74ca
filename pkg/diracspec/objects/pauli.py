import numpy as np

E = np.array([[1, 0], [0, 1]], dtype=complex)
SIGMA1 = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA2 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA3 = np.array([[0, 1], [1, 0]], dtype=complex)
# B = sigma_1 / i
B = np.array([[0, 1], [-1, 0]], dtype=complex)
B_REAL = np.array([[0.0, 1.0], [-1.0, 0.0]])

def omega_matrix(p: float, q: float) -> np.ndarray:
    """
    Omega = p sigma_2 + q sigma_3.
    """
    return np.real(p * SIGMA2 + q * SIGMA3)

def pauli_algebra_selftest() -> bool:
    """
    Check the algebra of sigma_1, sigma_2, sigma_3 and B. All entries are
    small Gaussian integers, so equality is exact.

    Returns:
        bool: True iff every identity holds
    """
    sigmas = (SIGMA1, SIGMA2, SIGMA3)
    checks = []
    for k, s in enumerate(sigmas):
        checks.append(np.array_equal(s @ s, E))
        for j, t in enumerate(sigmas):
            if j != k:
                checks.append(np.array_equal(s @ t, -(t @ s)))
    checks.append(np.array_equal(SIGMA1 / 1j, B))
    checks.append(np.array_equal(B @ B, -E))
    checks.append(np.array_equal(SIGMA2 @ B, SIGMA3))
    checks.append(np.array_equal(SIGMA3 @ B, -SIGMA2))
    return bool(all(checks))
