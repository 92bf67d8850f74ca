from dataclasses import dataclass, field

import numpy as np

HALF_PI = 0.5 * np.pi

def reduce_angle(theta: float) -> tuple[float, int]:
    """
    Reduce an angle modulo pi into (-pi/2, pi/2].

    Args:
        theta: Any real angle

    Returns:
        tuple: (reduced, k) with theta = reduced + k * pi
    """
    theta = float(theta)
    k = int(np.ceil((theta - HALF_PI) / np.pi))
    reduced = theta - k * np.pi
    if reduced <= -HALF_PI:
        reduced += np.pi
        k -= 1
    elif reduced > HALF_PI + 1e-15:
        reduced -= np.pi
        k += 1
    return reduced, k


@dataclass(frozen=True)
class BoundaryAngles:
    """
    Boundary angles (alpha, beta) stored reduced into (-pi/2, pi/2]. The
    number of pi-turns removed by the reduction is kept in alpha_turns and
    beta_turns.
    """
    alpha: float
    beta: float = 0.0
    alpha_turns: int = field(default=0, init=False)
    beta_turns: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        alpha, ka = reduce_angle(self.alpha)
        beta, kb = reduce_angle(self.beta)
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'alpha_turns', ka)
        object.__setattr__(self, 'beta_turns', kb)

    @property
    def lattice_offset(self) -> float:
        """
        (beta - alpha) / pi, the offset of the free eigenvalue lattice.
        """
        return (self.beta - self.alpha) / np.pi

    def initial_vector(self) -> np.ndarray:
        return np.array([np.sin(self.alpha), -np.cos(self.alpha)])

    def terminal_vector(self) -> np.ndarray:
        return np.array([np.sin(self.beta), -np.cos(self.beta)])
