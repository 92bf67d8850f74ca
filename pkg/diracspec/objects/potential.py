from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, NumericError, ShapeError
from .grid import Grid, GridFunction

INTERPOLATIONS = ('linear', 'cubic')

def zero_function(x):
    return np.zeros_like(np.asarray(x, dtype=float))

def sine_function(x):
    return np.sin(np.asarray(x, dtype=float))

def identity_function(x):
    return np.asarray(x, dtype=float).copy()

def one_function(x):
    return np.ones_like(np.asarray(x, dtype=float))

BUILTIN_POTENTIALS: dict[str, tuple[Callable, Callable]] = {
    'zero': (zero_function, zero_function),
    'sin-q': (zero_function, sine_function),
    'sin-p': (sine_function, zero_function),
    'const-q': (zero_function, one_function),
    'linear-q': (zero_function, identity_function),
}

class PotentialMatrix:
    """
    Potential Omega(x) = p(x) sigma_2 + q(x) sigma_3 on a grid, kept either as
    samples or as a pair of closed-form callables evaluated where needed.
    Use from_samples or from_functions to build one.
    """
    def __init__(self, domain: Grid, p_values: np.ndarray, q_values: np.ndarray,
                 p_func: Callable | None = None, q_func: Callable | None = None,
                 interpolation: str = 'linear', name: str | None = None) -> None:
        if interpolation not in INTERPOLATIONS:
            raise DomainError(f'interpolation must be one of {INTERPOLATIONS}, got {interpolation!r}')
        p_values = np.asarray(p_values, dtype=float)
        q_values = np.asarray(q_values, dtype=float)
        for label, values in (('p', p_values), ('q', q_values)):
            if values.shape != (domain.size,):
                raise ShapeError(f'{label} has shape {values.shape}, expected ({domain.size},)')
            if not np.all(np.isfinite(values)):
                bad = int(np.flatnonzero(~np.isfinite(values))[0])
                raise NumericError(f'{label} is not finite at x = {domain.nodes[bad]!r}')
        p_values.setflags(write=False)
        q_values.setflags(write=False)
        self._domain = domain
        self._p_values = p_values
        self._q_values = q_values
        self._p_func = p_func
        self._q_func = q_func
        self._interpolation = interpolation
        self._name = name
        self._splines = None
        # per-(method, m) node samples filled in by the Cauchy solver
        self._node_cache: dict = {}

    def cached(self, key, factory: Callable):
        """
        Memoized per-potential data, e.g. samples at quadrature nodes.
        """
        if key not in self._node_cache:
            self._node_cache[key] = factory()
        return self._node_cache[key]

    @classmethod
    def from_samples(cls, grid: Grid, p, q, interpolation: str = 'linear',
                     name: str | None = None) -> 'PotentialMatrix':
        return cls(grid, np.asarray(p, dtype=float), np.asarray(q, dtype=float),
                   interpolation=interpolation, name=name)

    @classmethod
    def from_functions(cls, grid: Grid, p_func: Callable, q_func: Callable,
                       name: str | None = None) -> 'PotentialMatrix':
        """
        Closed-form potential. Both callables take and return numpy arrays.
        """
        x = grid.nodes
        p_values = np.broadcast_to(np.asarray(p_func(x), dtype=float), x.shape).copy()
        q_values = np.broadcast_to(np.asarray(q_func(x), dtype=float), x.shape).copy()
        return cls(grid, p_values, q_values, p_func=p_func, q_func=q_func, name=name)

    @classmethod
    def zero(cls, grid: Grid) -> 'PotentialMatrix':
        return cls.from_functions(grid, zero_function, zero_function, name='zero')

    @classmethod
    def builtin(cls, name: str, grid: Grid) -> 'PotentialMatrix':
        if name not in BUILTIN_POTENTIALS:
            raise DomainError(f'unknown builtin potential {name!r}, known: {sorted(BUILTIN_POTENTIALS)}')
        p_func, q_func = BUILTIN_POTENTIALS[name]
        return cls.from_functions(grid, p_func, q_func, name=name)

    @property
    def domain(self) -> Grid:
        return self._domain

    @property
    def p(self) -> GridFunction:
        return GridFunction(self._domain, self._p_values)

    @property
    def q(self) -> GridFunction:
        return GridFunction(self._domain, self._q_values)

    @property
    def p_values(self) -> np.ndarray:
        return self._p_values

    @property
    def q_values(self) -> np.ndarray:
        return self._q_values

    @property
    def name(self) -> str | None:
        return self._name

    @property
    def is_closed_form(self) -> bool:
        return self._p_func is not None and self._q_func is not None

    @property
    def interpolation(self) -> str:
        return self._interpolation

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray]:
        """
        Values of p and q at arbitrary points of the domain.

        Args:
            x: Points inside the domain

        Returns:
            tuple: (p(x), q(x)) as arrays shaped like x
        """
        x = np.asarray(x, dtype=float)
        h = self._domain.h
        if x.size and (x.min() < self._domain.a - 1e-9 * h or x.max() > self._domain.b + 1e-9 * h):
            raise DomainError(f'evaluation outside [{self._domain.a}, {self._domain.b}]')
        if self.is_closed_form:
            p = np.broadcast_to(np.asarray(self._p_func(x), dtype=float), x.shape)
            q = np.broadcast_to(np.asarray(self._q_func(x), dtype=float), x.shape)
        elif self._interpolation == 'linear':
            nodes = self._domain.nodes
            p = np.interp(x, nodes, self._p_values)
            q = np.interp(x, nodes, self._q_values)
        else:
            if self._splines is None:
                nodes = self._domain.nodes
                self._splines = (CubicSpline(nodes, self._p_values), CubicSpline(nodes, self._q_values))
            p = self._splines[0](x)
            q = self._splines[1](x)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise NumericError('potential is not finite at a requested point')
        return np.asarray(p, dtype=float), np.asarray(q, dtype=float)

    def omega(self, x=None) -> np.ndarray:
        """
        Matrix values ((p, q), (q, -p)), shape (..., 2, 2). Defaults to the domain nodes.
        """
        if x is None:
            p, q = self._p_values, self._q_values
        else:
            p, q = self.evaluate(x)
        return np.stack([np.stack([p, q], axis=-1), np.stack([q, -p], axis=-1)], axis=-2)

    def on_grid(self, grid: Grid) -> 'PotentialMatrix':
        """
        Same potential carried onto another grid inside the domain.
        """
        if self.is_closed_form:
            return PotentialMatrix.from_functions(grid, self._p_func, self._q_func, name=self._name)
        p, q = self.evaluate(grid.nodes)
        return PotentialMatrix.from_samples(grid, p, q, interpolation=self._interpolation, name=self._name)

    def __add__(self, other: 'PotentialMatrix') -> 'PotentialMatrix':
        if other.domain != self._domain:
            raise ShapeError('potentials live on different grids')
        return PotentialMatrix.from_samples(self._domain, self._p_values + other.p_values,
                                            self._q_values + other.q_values,
                                            interpolation=self._interpolation)

    def __repr__(self) -> str:
        kind = 'closed-form' if self.is_closed_form else 'sampled'
        return f'PotentialMatrix({self._name or kind}, domain={self._domain})'


def cumulative_c(pot: PotentialMatrix, x: float) -> float:
    """
    Integral of |p| + |q| from the left end of the domain to x, by the trapezoid rule.

    Args:
        pot: Potential
        x: Upper limit inside pot.domain

    Returns:
        float: Nonnegative, nondecreasing in x
    """
    grid = pot.domain
    if not grid.contains(x):
        raise DomainError(f'x = {x!r} outside [{grid.a}, {grid.b}]')
    x = min(max(float(x), grid.a), grid.b)
    integrand = np.abs(pot.p_values) + np.abs(pot.q_values)
    running = grid.cumulative(integrand)
    k = grid.index_of(x)
    if k == grid.m:
        return float(running[-1])
    xk = grid.nodes[k]
    p_x, q_x = pot.evaluate(np.array([x]))
    f_x = abs(p_x[0]) + abs(q_x[0])
    return float(running[k] + 0.5 * (x - xk) * (integrand[k] + f_x))
