from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..objects import BoundaryAngles, Grid, PotentialMatrix, SpectralData, Trajectory2
from ..objects.errors import DomainError

FLAVORS = ('whole', 'half_bc0', 'half_bc_pi2')
PI_QUARTER = np.pi ** -0.25

def hermite_functions(n_max: int, x) -> np.ndarray:
    """
    Orthonormal Hermite functions phi_0 .. phi_{n_max} at x, shape (n_max + 1, len(x)).

    Uses phi_{n+1} = x sqrt(2/(n+1)) phi_n - sqrt(n/(n+1)) phi_{n-1}, which
    stays bounded where the raw polynomials overflow.
    """
    if n_max < 0:
        raise DomainError(f'n must be nonnegative, got {n_max}')
    x = np.atleast_1d(np.asarray(x, dtype=float))
    values = np.empty((n_max + 1, x.size))
    values[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if n_max >= 1:
        values[1] = np.sqrt(2.0) * x * values[0]
    for n in range(1, n_max):
        values[n + 1] = x * np.sqrt(2.0 / (n + 1)) * values[n] - np.sqrt(n / (n + 1)) * values[n - 1]
    return values


def hermite_phi(n: int, x):
    """
    phi_n(x) = C_n e^{-x^2/2} H_n(x) with unit L2 norm on the real line.
    """
    values = hermite_functions(n, x)[n]
    return float(values[0]) if np.ndim(x) == 0 else values


def model_x_max(n: int) -> float:
    """
    Truncation point for Hermite index n: beyond the turning point sqrt(2n + 1)
    the functions decay like Gaussians.
    """
    return max(12.0, np.sqrt(2.0 * abs(n) + 1.0) + 6.0)


@dataclass(frozen=True)
class HermiteBasis:
    n_max: int
    grid: Grid

    @cached_property
    def values(self) -> np.ndarray:
        return hermite_functions(self.n_max, self.grid.nodes)

    def gram(self) -> np.ndarray:
        v = self.values
        return self.grid.integrate(v[:, None, :] * v[None, :, :])

    def recurrence_residual(self) -> float:
        """
        Largest defect of x phi_n = sqrt(n/2) phi_{n-1} + sqrt((n+1)/2) phi_{n+1}.
        """
        v, x = self.values, self.grid.nodes
        n = np.arange(1, self.n_max)[:, None]
        lhs = x * v[1:-1]
        rhs = np.sqrt(n / 2.0) * v[:-2] + np.sqrt((n + 1) / 2.0) * v[2:]
        return float(np.max(np.abs(lhs - rhs))) if self.n_max >= 2 else 0.0


def linear_potential(grid: Grid) -> PotentialMatrix:
    """
    The model potential p = 0, q = x.
    """
    return PotentialMatrix.builtin('linear-q', grid)


def _whole_vector(n: int, x: np.ndarray) -> np.ndarray:
    """
    U_n = (phi_{n-1}, phi_n) for n > 0, (-phi_{|n|-1}, phi_{|n|}) for n < 0, (0, phi_0) for n = 0.
    """
    k = abs(n)
    phi = hermite_functions(k, x)
    first = np.zeros_like(x) if k == 0 else np.sign(n) * phi[k - 1]
    return np.stack([first, phi[k]], axis=-1)


@dataclass(frozen=True)
class ModelSpectrum:
    """
    Exact spectral data of the linear model B y' + x sigma_3 y = lambda y.

    Flavors:
        whole: the real line, lambda_n = sign(n) sqrt(2|n|), eigenfunctions U_n
        half_bc0: [0, inf) with alpha = 0, lambda_k = 2 sign(k) sqrt(|k|)
        half_bc_pi2: [0, inf) with alpha = pi/2, lambda_j = sign(2j - 1) sqrt(2|2j - 1|),
            indexed so that lambda_0 = -sqrt(2) <= 0 < lambda_1 (index_shift 1)

    Half-axis eigenfunctions V are normalized by V(0) = (sin alpha, -cos alpha)
    and a is their squared norm on [0, inf). For the whole line a is the squared norm of U_n.
    """
    flavor: str
    n_min: int
    n_max: int

    def __post_init__(self) -> None:
        if self.flavor not in FLAVORS:
            raise DomainError(f'flavor must be one of {FLAVORS}, got {self.flavor!r}')
        if self.n_max < self.n_min:
            raise DomainError(f'empty index window [{self.n_min}, {self.n_max}]')

    @property
    def alpha(self) -> float:
        return 0.5 * np.pi if self.flavor == 'half_bc_pi2' else 0.0

    @property
    def index_shift(self) -> int:
        return 1 if self.flavor == 'half_bc_pi2' else 0

    @property
    def indices(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def hermite_index(self, n: int) -> int:
        """
        Signed index of the whole-axis eigenfunction U behind item n.
        """
        if self.flavor == 'whole':
            return n
        if self.flavor == 'half_bc0':
            return 2 * n
        return 2 * n - 1

    def lam(self, n: int) -> float:
        k = self.hermite_index(n)
        return float(np.sign(k) * np.sqrt(2.0 * abs(k)))

    def _scale(self, n: int) -> float:
        """
        U(0) . (sin alpha, -cos alpha) for the half-axis flavors.
        """
        k = self.hermite_index(n)
        u0 = _whole_vector(k, np.zeros(1))[0]
        return float(u0 @ BoundaryAngles(self.alpha).initial_vector())

    def a(self, n: int) -> float:
        k = self.hermite_index(n)
        if self.flavor == 'whole':
            return 1.0 if k == 0 else 2.0
        whole_half = 0.5 if k == 0 else 1.0
        return whole_half / self._scale(n) ** 2

    def eigenfunction(self, n: int, x) -> np.ndarray:
        """
        U_n (whole) or V_n (half-axis) at x, shape (len(x), 2).
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        u = _whole_vector(self.hermite_index(n), x)
        if self.flavor == 'whole':
            return u
        return u / self._scale(n)

    def trajectory(self, n: int, grid: Grid) -> Trajectory2:
        return Trajectory2.from_array(grid, self.eigenfunction(n, grid.nodes))

    def spectrum(self) -> SpectralData:
        return SpectralData.from_lambdas(BoundaryAngles(self.alpha), {n: self.lam(n) for n in self.indices},
                                         {n: self.a(n) for n in self.indices}, self.index_shift)

    def x_max(self) -> float:
        return model_x_max(max(abs(self.hermite_index(n)) for n in (self.n_min, self.n_max)))

    def grid(self, m: int = 4096) -> Grid:
        """
        Truncated domain for the window: [0, x_max] on the half axis, [-x_max, x_max] on the line.
        """
        x_max = self.x_max()
        return Grid(-x_max if self.flavor == 'whole' else 0.0, x_max, m)

    def potential(self, grid: Grid | None = None) -> PotentialMatrix:
        return linear_potential(grid or self.grid())


def model_spectrum(flavor: str, n_min: int, n_max: int) -> ModelSpectrum:
    return ModelSpectrum(flavor, n_min, n_max)
