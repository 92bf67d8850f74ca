from .logger import Logger
from .errors import *
from .grid import Grid, GridFunction, Trajectory2, inner_product
from .potential import PotentialMatrix, cumulative_c, BUILTIN_POTENTIALS
from .angles import BoundaryAngles, reduce_angle
from .pauli import B, B_REAL, E, SIGMA1, SIGMA2, SIGMA3, omega_matrix, pauli_algebra_selftest
from .spectral_data import SpectralDatum, SpectralData, EvfSample, WeylSample
from .plans import TSequence, SurgeryPlan, Addition, Rescaling
