from dataclasses import dataclass, field

import numpy as np

from .errors import PlanError

@dataclass(frozen=True)
class TSequence:
    """
    Finitely supported map n -> t_n of norming-constant exponents.
    """
    entries: dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = {}
        for n, t in self.entries.items():
            t = float(t)
            if not np.isfinite(t):
                raise PlanError(f't_{n} is not finite')
            cleaned[int(n)] = t
        object.__setattr__(self, 'entries', dict(sorted(cleaned.items())))

    @property
    def support(self) -> list[int]:
        return [n for n, t in self.entries.items() if t != 0.0]

    def interleaved(self) -> list[int]:
        """
        Support in the order 0, 1, -1, 2, -2, ...
        """
        return sorted(self.support, key=lambda n: (abs(n), n < 0))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Addition:
    mu: float
    c: float


@dataclass(frozen=True)
class Rescaling:
    n: int
    b: float


@dataclass(frozen=True)
class SurgeryPlan:
    """
    Finite change of half-axis spectral data: eigenvalues to remove (by index),
    eigenvalues mu to add with norming constants c, and norming constants to
    replace by b.
    """
    removals: tuple[int, ...] = ()
    additions: tuple[Addition, ...] = ()
    rescalings: tuple[Rescaling, ...] = ()

    def __post_init__(self) -> None:
        removals = tuple(sorted(int(n) for n in self.removals))
        additions = tuple(a if isinstance(a, Addition) else Addition(*a) for a in self.additions)
        rescalings = tuple(r if isinstance(r, Rescaling) else Rescaling(*r) for r in self.rescalings)
        if len(set(removals)) != len(removals):
            raise PlanError('an index is removed twice')
        mus = [a.mu for a in additions]
        if len(set(mus)) != len(mus):
            raise PlanError('added eigenvalues must be pairwise distinct')
        for a in additions:
            if not a.c > 0:
                raise PlanError(f'norming constant of added eigenvalue {a.mu} must be positive')
        scaled = [r.n for r in rescalings]
        if len(set(scaled)) != len(scaled):
            raise PlanError('an index is rescaled twice')
        for r in rescalings:
            if not r.b > 0:
                raise PlanError(f'new norming constant for index {r.n} must be positive')
            if r.n in removals:
                raise PlanError(f'index {r.n} is both removed and rescaled')
        object.__setattr__(self, 'removals', removals)
        object.__setattr__(self, 'additions', additions)
        object.__setattr__(self, 'rescalings', rescalings)

    @property
    def is_empty(self) -> bool:
        return not (self.removals or self.additions or self.rescalings)
