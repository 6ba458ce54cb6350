"""Exact fractal colourings of the circle and (a,b)-progression search in Z/pZ."""

__version__ = "0.1.0"

from .exact import Colour, Configuration, Interval, IntervalType, locate, normalize_mod1
from .fractal import (
    apply_T,
    colour_at,
    initial_config,
    iterate,
    level_measures,
    measure,
    reflect,
    replace_interval,
    step,
    verify_band_structure,
    verify_properties_1_to_4,
)
from .search import (
    APWitness,
    CyclicColouring,
    PatternSpec,
    empirical_findability,
    find_pattern_naive,
    find_pattern_orbit,
    find_pattern_partial,
    induce,
    verify_no_pattern,
)
