import numpy as np
import pytest

from diracspec.objects import Grid, PotentialMatrix
from diracspec.components import SolverConfig, HalfAxisProblem, model_spectrum

@pytest.fixture(scope='session')
def unit_grid() -> Grid:
    return Grid(0.0, np.pi, 2048)


@pytest.fixture(scope='session')
def cfg() -> SolverConfig:
    return SolverConfig('magnus4', 2048)


@pytest.fixture(scope='session')
def zero_pot(unit_grid) -> PotentialMatrix:
    return PotentialMatrix.zero(unit_grid)


@pytest.fixture(scope='session')
def sin_q(unit_grid) -> PotentialMatrix:
    return PotentialMatrix.builtin('sin-q', unit_grid)


@pytest.fixture(scope='session')
def model():
    """
    Linear model on [0, inf) with alpha = 0, indices -2..2.
    """
    return model_spectrum('half_bc0', -2, 2)


@pytest.fixture(scope='session')
def model_problem(model) -> HalfAxisProblem:
    grid = model.grid(4096)
    return HalfAxisProblem(model.potential(grid), 0.0, SolverConfig('magnus4', grid.m))
