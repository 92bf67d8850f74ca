from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import trapezoid, cumulative_trapezoid

from .errors import DomainError, ShapeError

@dataclass(frozen=True)
class Grid:
    """
    Uniform grid on [a, b] with m intervals.
    """
    a: float
    b: float
    m: int

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f'grid needs a positive number of intervals, got {self.m!r}')
        if not np.isfinite(self.a) or not np.isfinite(self.b) or not self.b > self.a:
            raise DomainError(f'grid endpoints must satisfy a < b, got [{self.a}, {self.b}]')
        object.__setattr__(self, 'a', float(self.a))
        object.__setattr__(self, 'b', float(self.b))
        object.__setattr__(self, 'm', int(self.m))

    @cached_property
    def nodes(self) -> np.ndarray:
        """
        Grid nodes, m + 1 of them.

        Returns:
            np.ndarray: Read-only array of nodes
        """
        x = np.linspace(self.a, self.b, self.m + 1)
        x.setflags(write=False)
        return x

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def size(self) -> int:
        return self.m + 1

    def contains(self, x: float, slack: float = 1e-12) -> bool:
        scale = slack * max(1.0, abs(self.a), abs(self.b))
        return self.a - scale <= x <= self.b + scale

    def index_of(self, x: float) -> int:
        """
        Index of the last node not to the right of x.
        """
        if not self.contains(x):
            raise DomainError(f'x = {x!r} outside [{self.a}, {self.b}]')
        k = int(np.floor((x - self.a) / self.h + 1e-9))
        return min(max(k, 0), self.m)

    def integrate(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """
        Composite trapezoid rule over the whole grid.
        """
        return trapezoid(values, dx=self.h, axis=axis)

    def cumulative(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """
        Running trapezoid integral from the left endpoint, zero at the first node.
        """
        return cumulative_trapezoid(values, dx=self.h, axis=axis, initial=0)

    def tail(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """
        Running trapezoid integral from each node to the right endpoint.
        """
        flipped = np.flip(values, axis=axis)
        return np.flip(cumulative_trapezoid(flipped, dx=self.h, axis=axis, initial=0), axis=axis)


def _check_size(grid: Grid, values: np.ndarray, what: str) -> None:
    if values.shape[-1] != grid.size:
        raise ShapeError(f'{what} has {values.shape[-1]} values for a grid of {grid.size} nodes')


class GridFunction:
    """
    Scalar samples on a grid.

    Args:
        grid: Grid the values live on
        values: One value per node, real or complex
    """
    def __init__(self, grid: Grid, values) -> None:
        values = np.asarray(values)
        _check_size(grid, values, 'GridFunction')
        self._grid = grid
        self._values = values

    @property
    def grid(self) -> Grid:
        return self._grid

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __call__(self, x):
        return np.interp(x, self._grid.nodes, self._values)

    def __repr__(self) -> str:
        return f'GridFunction(grid={self._grid}, dtype={self._values.dtype})'


class Trajectory2:
    """
    Two-component vector function sampled on a grid.

    Args:
        grid: Grid the trajectory lives on
        y1: First component per node
        y2: Second component per node
    """
    def __init__(self, grid: Grid, y1, y2) -> None:
        y1 = np.asarray(y1)
        y2 = np.asarray(y2)
        _check_size(grid, y1, 'Trajectory2.y1')
        _check_size(grid, y2, 'Trajectory2.y2')
        self._grid = grid
        self._y1 = y1
        self._y2 = y2

    @classmethod
    def from_array(cls, grid: Grid, values: np.ndarray) -> 'Trajectory2':
        """
        Build from an array of shape (m + 1, 2).
        """
        return cls(grid, values[:, 0], values[:, 1])

    @property
    def grid(self) -> Grid:
        return self._grid

    @property
    def y1(self) -> np.ndarray:
        return self._y1

    @property
    def y2(self) -> np.ndarray:
        return self._y2

    @property
    def values(self) -> np.ndarray:
        """
        Returns:
            np.ndarray: Stacked components, shape (m + 1, 2)
        """
        return np.stack([self._y1, self._y2], axis=-1)

    def start(self) -> np.ndarray:
        return np.array([self._y1[0], self._y2[0]])

    def end(self) -> np.ndarray:
        return np.array([self._y1[-1], self._y2[-1]])

    def at(self, x: float) -> np.ndarray:
        """
        Linear interpolation of both components at x.
        """
        if not self._grid.contains(x):
            raise DomainError(f'x = {x!r} outside [{self._grid.a}, {self._grid.b}]')
        nodes = self._grid.nodes
        if np.iscomplexobj(self._y1) or np.iscomplexobj(self._y2):
            interp = lambda y: np.interp(x, nodes, y.real) + 1j * np.interp(x, nodes, y.imag)
        else:
            interp = lambda y: np.interp(x, nodes, y)
        return np.array([interp(self._y1), interp(self._y2)])

    def density(self) -> np.ndarray:
        """
        Pointwise |y|^2.
        """
        return np.abs(self._y1) ** 2 + np.abs(self._y2) ** 2

    def norm2(self) -> float:
        return float(self._grid.integrate(self.density()))

    def scaled(self, factor) -> 'Trajectory2':
        return Trajectory2(self._grid, factor * self._y1, factor * self._y2)

    def __add__(self, other: 'Trajectory2') -> 'Trajectory2':
        _same_grid(self, other)
        return Trajectory2(self._grid, self._y1 + other._y1, self._y2 + other._y2)

    def __sub__(self, other: 'Trajectory2') -> 'Trajectory2':
        _same_grid(self, other)
        return Trajectory2(self._grid, self._y1 - other._y1, self._y2 - other._y2)

    def __repr__(self) -> str:
        return f'Trajectory2(grid={self._grid})'


def _same_grid(f, g) -> None:
    if f.grid != g.grid:
        raise ShapeError(f'grid mismatch: {f.grid} vs {g.grid}')


def inner_product(f: Trajectory2, g: Trajectory2):
    """
    Trapezoid approximation of the integral of f1 conj(g1) + f2 conj(g2).

    Args:
        f: Left factor
        g: Right factor, conjugated

    Returns:
        complex | float: Complex when either argument is complex, float otherwise
    """
    _same_grid(f, g)
    integrand = f.y1 * np.conj(g.y1) + f.y2 * np.conj(g.y2)
    value = f.grid.integrate(integrand)
    if np.iscomplexobj(integrand):
        return complex(value)
    return float(value)
