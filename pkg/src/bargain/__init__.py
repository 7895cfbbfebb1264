"""Exact equilibrium analysis of two-player bargaining mechanisms over finite
collections of alternatives."""

from .afp import (
    AFPError,
    AveragingWitness,
    enumerate_afps_oracle,
    enumerate_diagonal_afps,
    is_afp,
    iterate_boundaries_included,
    verify_chain,
)
from .axioms import (
    AffineMap,
    AxiomVerdict,
    check_anonymity,
    check_efficiency,
    check_iat,
    check_ira,
    check_symmetry,
    check_uniqueness,
)
from .characterize import (
    cudd_neo,
    is_eps_close_to_frontier,
    is_eps_pareto_efficient,
    max_min_stats,
    neo_characterization,
    pe_set,
    pie_collection,
    pie_reference_x,
    sa_delta_neo,
    segment_distance,
)
from .core import (
    Collection,
    CollectionError,
    Point,
    dominates,
    parse_collection,
    quadrant,
    serialize_collection,
    to_rational,
    weighted_avg,
)
from .equilibria import EquilibriumReport, Profile, enumerate_pure_ne, is_pure_ne, payoffs
from .mechanisms import CUDD, Dictator, SADelta, SAKDelta, lift_k_uniform, make_mechanism

__version__ = "0.1.0"
