"""Sharp-threshold toolkit for monotone events on weighted product spaces.

The package splits into small layers: finite product spaces and their
enumeration (`spaces`), function tables with monotonicity and symmetry
machinery (`boolfn`), exact and Monte Carlo influences plus the dyadic
embedding (`influence`), Walsh spectra and concentration reports
(`spectrum`), the coupled threshold path with its transfer certificates
(`threshold`), an inequality lab for influence lower bounds (`ineqlab`),
and a tessellation percolation simulator (`jmperc`). `cli` wires them into
an experiment driver; `acceptance` is the self-check battery.
"""

from .errors import HypothesisError, SharpThresholdError, SizeLimitError
from .spaces import (
    Configuration,
    Space,
    ThreePointSpace,
    TwoPointSpace,
    all_configs,
    config_rank,
    measure_vector,
    perturb,
    point_mass,
    rank_config,
    sample,
    total_mass,
)
from .boolfn import (
    BooleanFunction,
    SymmetryGroup,
    at_least_k,
    builtin_function,
    cyclic_run,
    dictator,
    enumerate_monotone,
    from_predicate,
    is_increasing,
    majority,
    parse_table,
    serialize_table,
    symmetry_order,
    tribes,
)
from .influence import (
    DyadicEmbedding,
    InfluenceReport,
    embed_dyadic,
    influence_exact,
    influence_exact_symmetric,
    influence_mc,
    influence_onesided,
    lift_through_embedding,
    w_embedded,
    wilson_half_width,
)
from .spectrum import (
    BlockSpectrum,
    ConcentrationReport,
    DeltaNorms,
    ParsevalReport,
    block_spectrum,
    concentration_report,
    delta_norms,
    inverse_walsh,
    parseval_check,
    walsh_transform,
)
from .threshold import (
    BranchSample,
    C3SearchResult,
    CurveSample,
    RussoCheck,
    SharpThresholdCertificate,
    ThresholdCurve,
    g_curve,
    min_c3_search,
    russo_check,
    verify_sharp_threshold,
)
from .ineqlab import (
    ConcentrationSearch,
    FrontierResult,
    INEQUALITY_IDS,
    InequalityVerdict,
    LOWER_BOUND_IDS,
    check_delta_theorem,
    check_max_influence,
    check_nonuniform,
    check_talagrand,
    check_three_point,
    check_two_point,
    check_two_point_small_max,
    concentration_constants_search,
    constant_search,
    family_from_spec,
)
from .jmperc import (
    DiscreteGrid,
    JMConfiguration,
    RasterColoring,
    SweepResult,
    crossing,
    default_rect,
    discretize,
    recolor,
    rasterize,
    render_ppm,
    sample_jm,
    sweep,
    transition_window,
    translate,
)
from .acceptance import CriterionResult, run_all

__version__ = "0.1.0"

__all__ = [
    "HypothesisError",
    "SharpThresholdError",
    "SizeLimitError",
    "Configuration",
    "Space",
    "ThreePointSpace",
    "TwoPointSpace",
    "all_configs",
    "config_rank",
    "measure_vector",
    "perturb",
    "point_mass",
    "rank_config",
    "sample",
    "total_mass",
    "BooleanFunction",
    "SymmetryGroup",
    "at_least_k",
    "builtin_function",
    "cyclic_run",
    "dictator",
    "enumerate_monotone",
    "from_predicate",
    "is_increasing",
    "majority",
    "parse_table",
    "serialize_table",
    "symmetry_order",
    "tribes",
    "DyadicEmbedding",
    "InfluenceReport",
    "embed_dyadic",
    "influence_exact",
    "influence_exact_symmetric",
    "influence_mc",
    "influence_onesided",
    "lift_through_embedding",
    "w_embedded",
    "wilson_half_width",
    "BlockSpectrum",
    "ConcentrationReport",
    "DeltaNorms",
    "ParsevalReport",
    "block_spectrum",
    "concentration_report",
    "delta_norms",
    "inverse_walsh",
    "parseval_check",
    "walsh_transform",
    "BranchSample",
    "C3SearchResult",
    "CurveSample",
    "RussoCheck",
    "SharpThresholdCertificate",
    "ThresholdCurve",
    "g_curve",
    "min_c3_search",
    "russo_check",
    "verify_sharp_threshold",
    "ConcentrationSearch",
    "FrontierResult",
    "INEQUALITY_IDS",
    "InequalityVerdict",
    "LOWER_BOUND_IDS",
    "check_delta_theorem",
    "check_max_influence",
    "check_nonuniform",
    "check_talagrand",
    "check_three_point",
    "check_two_point",
    "check_two_point_small_max",
    "concentration_constants_search",
    "constant_search",
    "family_from_spec",
    "DiscreteGrid",
    "JMConfiguration",
    "RasterColoring",
    "SweepResult",
    "crossing",
    "default_rect",
    "discretize",
    "recolor",
    "rasterize",
    "render_ppm",
    "sample_jm",
    "sweep",
    "transition_window",
    "translate",
    "CriterionResult",
    "run_all",
    "__version__",
]
