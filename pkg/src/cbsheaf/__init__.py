"""Cantor-Bendixson ranks and injective dimensions of sheaves of Q-vector spaces.

Exact computations on finite spaces (minimal-neighborhood models) and a
symbolic layer for the standard profinite examples.
"""

from .linalg import RatMatrix, SubspacePresentation, cokernel, image_basis, kernel_basis, rref
from .spaces import CbFiltration, FiniteSpace, disjoint_union, product
from .sheaves import Sheaf, SheafMap, constant_sheaf, simple_sheaf, skyscraper
from .godement import GodementResolution, build_resolution, c0, serration_unit
from .extdim import DimensionVerdict, ExtComplex, ExtReport, category_dimension, ext_groups
from .profinite import cb_summary, dimension_verdict, finite_model, parse_expr

__version__ = "0.1.0"
