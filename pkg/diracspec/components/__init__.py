from .cauchy import (SolverConfig, FundamentalMatrix, WronskianReport, solve_cauchy, solve_terminal,
                     fundamental_matrix, wronskian, cauchy_batch, terminal_batch, endpoint_matrix,
                     dirac_residual, picard_solution)
from .eigen import (EigenGradient, char_function, char_values, find_eigenvalues, lattice_shift,
                    interlacing_check, norming_constants, normalized_eigenfunction, eigenfunctions,
                    similarity_coefficients, eigen_gradient, evf, evf_derivative, evf_zero, expand,
                    parseval_defect)
from .twospectra import (TwoSpectraInput, check_interlacing, norming_from_two_spectra, weyl_m,
                         mirror_spectrum_p0, mirror_spectrum_q0, one_spectrum_norming_p0,
                         one_spectrum_norming_q0, ambarzumyan_residual)
from .isospectral import (IsoResult, theta, shift_one, shift_finite_recurrent, shift_finite_explicit,
                          ell_sequence, zero_family_potential, l1_distance)
from .glreconstruct import (GLSeriesKernel, GLKernel, Reconstruction, build_F, solve_gl, recover_potential,
                            reconstruct, discrete_residual, free_solution)
from .hermite import HermiteBasis, ModelSpectrum, hermite_phi, hermite_functions, model_spectrum, linear_potential
from .halfaxis import (HalfAxisProblem, weyl_m0, weyl_m_halfaxis, halfaxis_two_spectra_norming, argument_sum,
                       halfaxis_one_spectrum_norming_p0, evf_halfaxis, evf_halfaxis_derivative)
from .surgery import SurgeryResult, PerturbationStep, surgery, general_finite_perturbation, perturbation_steps
