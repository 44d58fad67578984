"""Exact intersection homology of filtered simplicial complexes, with Kunneth checks for products."""

from .exactalg import GF, QQ, ZZ, FgModule, GradedModule, Ring, kunneth_rhs, smith_normal_form
from .ichain import CoefficientSpec, intersection_complex, intersection_homology, relative_intersection_homology
from .library import parse_expression, parse_space, serialize_space
from .perversity import Perversity, ProductPerversity, make_product_perversity, normalize_super
from .stratcomplex import FilteredComplex, cone, join, product, suspension

__version__ = "0.1.0"
