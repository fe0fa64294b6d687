"""Numerical tools for weighted Bergman spaces with exponential-type radial weights."""

from .criteria import (CriterionReport, DiscreteMeasure, GB_transform, Sweep, berezin_G_t,
                       carleson_average, embedding_functional, evaluate_boundedness,
                       necessary_condition, pointwise_symbol_function, pullback_measure,
                       radial_sweep)
from .kernel import (KernelMoments, KernelTruncationError, kernel_eval, kernel_moments,
                     kernel_norm, normalized_kernel, test_function)
from .lattice import Lattice, build_lattice, verify_lattice
from .operators import (OperatorSpec, SymbolPair, apply_GI, apply_GV, apply_Jg, apply_Vg,
                        operator_norm_lower_bound)
from .quadrature import DiskGrid, disk_grid, integrate, radial_moments
from .series import PowerSeries, compose, differentiate, evaluate, integrate_from_0, multiply
from .spaces import NormReport, littlewood_paley_ratio, norm
from .weights import RadialWeight, check_class_L, make_weight, tau

__version__ = "0.1.0"
