"""Hierarchical placement delivery arrays for two-layer coded caching.

Construct and verify single-layer and hierarchical placement delivery arrays,
execute their placement/delivery protocol bit-exactly, and compare achieved
transmission loads against closed-form baselines and the first-layer lower
bound.
"""

from .analysis import (
    ComparisonRow,
    SplitPoint,
    SystemParams,
    compare_sweep,
    knmd_loads,
    lower_bound_r1,
    optimal_r2,
    r_c,
    search_min_r1,
    wwcy_loads,
)
from .hierarchy import (
    Hpda,
    HpdaReport,
    MirrorPlacement,
    SchemeLoads,
    build_grouping,
    build_hybrid,
    derive_s_m,
    format_hpda,
    grouping_params,
    hybrid_params,
    inner_sets_disjoint,
    load_hpda,
    loads_from_hpda,
    parse_hpda,
    save_hpda,
    verify_hpda,
)
from .pda import (
    STAR,
    Pda,
    PdaFormatError,
    SubsetIndexer,
    VerificationReport,
    Violation,
    column_partition,
    format_pda,
    load_pda,
    mn_pda,
    parse_pda,
    pda_shift,
    save_pda,
    star_rows,
    verify_pda,
)
from .simulation import (
    CacheState,
    DecodingError,
    DemandVector,
    FileLibrary,
    SimulationResult,
    Transcript,
    decode_user,
    mirror_delivery,
    place,
    server_delivery,
    simulate,
    worst_case_demand,
)

__all__ = [
    "STAR",
    "CacheState",
    "ComparisonRow",
    "DecodingError",
    "DemandVector",
    "FileLibrary",
    "Hpda",
    "HpdaReport",
    "MirrorPlacement",
    "Pda",
    "PdaFormatError",
    "SchemeLoads",
    "SimulationResult",
    "SplitPoint",
    "SubsetIndexer",
    "SystemParams",
    "Transcript",
    "VerificationReport",
    "Violation",
    "build_grouping",
    "build_hybrid",
    "column_partition",
    "compare_sweep",
    "decode_user",
    "derive_s_m",
    "format_hpda",
    "format_pda",
    "grouping_params",
    "hybrid_params",
    "inner_sets_disjoint",
    "knmd_loads",
    "load_hpda",
    "load_pda",
    "loads_from_hpda",
    "lower_bound_r1",
    "mirror_delivery",
    "mn_pda",
    "optimal_r2",
    "parse_hpda",
    "parse_pda",
    "pda_shift",
    "place",
    "r_c",
    "save_hpda",
    "save_pda",
    "search_min_r1",
    "server_delivery",
    "simulate",
    "star_rows",
    "verify_hpda",
    "verify_pda",
    "worst_case_demand",
    "wwcy_loads",
]
