"""critlayer: singular solutions of the Rayleigh equation near critical
layers of arbitrary order, matched WKBJ asymptotics, Miles-Riccati
dispersion quantities, and the half-line Green function."""

from .profiles import (CriticalPoint, ShearProfile, classify_order,
                       eval_profile, find_critical_points, profile_from_name)
from .local import (PartialFraction, SolutionBranch, ZetaWeight,
                    bounded_ratio, hermite_interpolant, local_pair_alpha0,
                    partial_fraction, primitive_J, psi_smooth, root_sum,
                    singular_integral_I, wronskian)
from .perturb import (LocalGreen, apply_green, fixed_point_solution,
                      green_zero, local_green, zeta_norm)
from .wkbj import (Regime, Thresholds, classify_regime, matched_minus,
                   wkbj_branch, wkbj_condition)
from .globalsol import (GlobalPair, decaying_solution, dispersion_ratio,
                        global_pair, interval_expansion, interval_omega,
                        miles_omega, omega0, ratio_expansion)
from .green import (GreenKernel, adjoint_conjugation_residual, green_kernel,
                    interior_green, solve_forced)
from .oracle import (default_contour, fundamental_system, integrate_contour,
                     quadrature, rayleigh_residual)

__version__ = "0.1.0"
