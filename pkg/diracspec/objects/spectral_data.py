from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .angles import BoundaryAngles
from .errors import ContractViolation, EnumerationError

SIMILARITY_RTOL = 1e-6

@dataclass(frozen=True)
class SpectralDatum:
    """
    One eigenvalue with its optional norming data.

    Args:
        n: Index
        lam: Eigenvalue
        a: Norming constant, the squared norm of the eigenfunction normalized at 0
        b: Squared norm of the eigenfunction normalized at the right end
        c: Similarity coefficient linking the two normalizations
    """
    n: int
    lam: float
    a: float | None = None
    b: float | None = None
    c: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'lam', float(self.lam))
        if self.a is not None and not self.a > 0:
            raise ContractViolation(f'norming constant a_{self.n} must be positive, got {self.a!r}')
        if self.b is not None and not self.b > 0:
            raise ContractViolation(f'b_{self.n} must be positive, got {self.b!r}')
        if self.a is not None and self.b is not None and self.c is not None:
            if abs(self.c ** 2 * self.a - self.b) > SIMILARITY_RTOL * self.b:
                raise ContractViolation(f'c^2 a = b violated at n = {self.n}')


@dataclass(frozen=True)
class SpectralData:
    """
    Indexed eigenvalues of one boundary problem. Items are kept sorted by index
    and the eigenvalues must increase strictly with it. index_shift records any
    re-indexing applied while enumerating.
    """
    angles: BoundaryAngles
    items: dict[int, SpectralDatum]
    index_shift: int = 0
    _order: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ordered = dict(sorted(self.items.items()))
        for n, datum in ordered.items():
            if datum.n != n:
                raise EnumerationError(f'item keyed {n} carries index {datum.n}')
        lams = [d.lam for d in ordered.values()]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise EnumerationError('eigenvalues are not strictly increasing in the index')
        object.__setattr__(self, 'items', ordered)
        object.__setattr__(self, '_order', tuple(ordered))

    @classmethod
    def from_lambdas(cls, angles: BoundaryAngles, lambdas: dict[int, float],
                     norming: dict[int, float] | None = None, index_shift: int = 0) -> 'SpectralData':
        norming = norming or {}
        items = {n: SpectralDatum(n, lam, norming.get(n)) for n, lam in lambdas.items()}
        return cls(angles, items, index_shift)

    @property
    def alpha(self) -> float:
        return self.angles.alpha

    @property
    def beta(self) -> float:
        return self.angles.beta

    @property
    def indices(self) -> tuple:
        return self._order

    @property
    def n_min(self) -> int:
        return self._order[0]

    @property
    def n_max(self) -> int:
        return self._order[-1]

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[SpectralDatum]:
        return iter(self.items.values())

    def __contains__(self, n: int) -> bool:
        return n in self.items

    def __getitem__(self, n: int) -> SpectralDatum:
        return self.items[n]

    def lam(self, n: int) -> float:
        return self.items[n].lam

    def a(self, n: int) -> float:
        value = self.items[n].a
        if value is None:
            raise ContractViolation(f'no norming constant stored for index {n}')
        return value

    def lambdas(self) -> np.ndarray:
        return np.array([d.lam for d in self.items.values()])

    def norming(self) -> np.ndarray:
        return np.array([self.a(n) for n in self._order])

    def has_norming(self) -> bool:
        return all(d.a is not None for d in self.items.values())

    def covers(self, n_lo: int, n_hi: int) -> bool:
        return all(n in self.items for n in range(n_lo, n_hi + 1))

    def window(self, n_lo: int, n_hi: int) -> 'SpectralData':
        kept = {n: d for n, d in self.items.items() if n_lo <= n <= n_hi}
        return SpectralData(self.angles, kept, self.index_shift)

    def with_updates(self, **columns: dict[int, float]) -> 'SpectralData':
        """
        Copy with per-index fields replaced, e.g. with_updates(a={0: 3.1}).
        """
        items = dict(self.items)
        for name, values in columns.items():
            for n, value in values.items():
                items[n] = replace(items[n], **{name: value})
        return SpectralData(self.angles, items, self.index_shift)

    def shifted(self, shift: int) -> 'SpectralData':
        """
        Re-index every item by n -> n + shift.
        """
        items = {n + shift: replace(d, n=n + shift) for n, d in self.items.items()}
        return SpectralData(self.angles, items, self.index_shift + shift)


@dataclass(frozen=True)
class EvfSample:
    """
    Value of the eigenvalue function at gamma = alpha - pi * m.
    """
    gamma: float
    value: float
    alpha: float
    m: int


@dataclass(frozen=True)
class WeylSample:
    lam: complex
    m_value: complex
