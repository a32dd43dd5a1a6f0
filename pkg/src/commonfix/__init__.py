"""Exact common fixed point analysis for piecewise maps on subsets of the real line."""
from .domain import DomainSet, GeometricSeq, Interval, PointSet, closure, is_complete, sample, scalar, subset_of
from .maps import (Constant, MapFamily, MapPiece, Mobius, PiecewiseMap, RootSet, coincidence_points, compose,
                   fixed_points, iterate_map, make_form, sample_for_maps)
from .control import ControlFunction, check_regularity, from_table, identity, linear, synthesize_psi
from .conditions import (BabuMax, BabuTriple, BoydWong, FamilyTwoMap, IteratedTwoMap, Jungck, Main, MinBoydWong,
                         MinSong, Singh, Som, SongGen, TwoMapMax, check_condition, rhs_bound, symmetry_audit,
                         worst_ratio)
from .compat import (MobiusInInverseN, commutes_on_set, fixed_set_intersection, is_compatible_on,
                     is_reciprocal_continuous_on, is_weakly_compatible, sequence_limits)
from .iteration import (PipelineConfig, common_fixed_point, family_common_fixed_point,
                        iterated_common_fixed_point, run_jungck, verify_alpha_descent)
from .corpus import load_fixture, run_scenario

__version__ = "0.1.0"
