"""Counting multicurves on closed surfaces in Dehn--Thurston coordinates."""
__version__ = "0.1.0"

from .surface import Surface, PantsDecomposition, build_surface
from .dtcoords import (DTCoordinates, CoordinateError, validate, norm, twist_about_cuff,
                       coordinate_add)
from .curves import MultiCurve, TypeInvariant, decode, topological_type, type_of
from .enumeration import CountTable, Sector, count_by_type, count_scc_table, leading_coefficient
from .hyperbolic import FenchelNielsen, length, count_by_length, pruning_constant
from .traintrack import TrainTrack, standard_track, thurston_form
from .experiments import powerlaw_fit, load_config, run_experiment, torus_primitive_count
