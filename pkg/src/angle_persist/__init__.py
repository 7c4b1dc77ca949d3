"""Configurations, module refinements and Hilbert projectors for circle-valued maps
on finite simplicial complexes, computed with exact coefficients."""

from .complex_io import ComplexWithMap, CriticalTurns, cohomology_degree, critical_turns, load_complex
from .config_engine import (
    BoxQuery,
    Configuration,
    ModuleRefinement,
    SupportPoint,
    box_rank,
    char_poly,
    collision_distance,
    configuration,
    delta_point,
    duality_check,
    f_subspace,
    image_subspace,
    module_refinement,
)
from .cyclic_cover import (
    NovikovInvariants,
    WindowComplex,
    novikov_invariants,
    star_subcomplex,
    twisted_boundary,
    window_complex,
)
from .exact_algebra import GF2, QQ, Field, LaurentMatrix, LaurentPoly, snf

__version__ = "0.1.0"
