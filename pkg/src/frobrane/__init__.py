"""Point-reduced brane geometry: Frobenius algebras, bimodules and the
open-closed correspondence, checked numerically."""

from .algebra import Algebra, check_frobenius, irreducible_module, is_simple, make_algebra, matrix_algebra
from .bimodule import Bimodule, balanced_tensor, is_invertible, make_bimodule, tensor_over
from .correspondence import BraneFamily, make_branes, regress, roundtrip_RT, roundtrip_TR, transgress
from .kfrob import KFrob, ReflectionStructure, check_kfrob, check_positivity, check_reflection, functor_F, inverse_F
from .lbg import LBGPointObject, check_lbg, concat_isomorphism, induced_bimodule, induced_frobenius, rank_identities
from .numcore import DEFAULT_TOL, Bilinear, ConjLinMap, HermitianSpace, LinMap, Tolerance
from .report import AxiomCheck, AxiomReport

__version__ = "0.1.0"
