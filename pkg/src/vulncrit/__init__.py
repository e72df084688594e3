"""Dynamic vulnerability criticality scoring for ICS/SCADA environments.

Pipeline: CVSS 3.1 exploitability scoring, environment-driven metric
modification (topology and security mechanisms), attack-tree aggregation of
co-located CVEs, and fuzzy-cognitive-map propagation to equilibrium.
"""

from .assessment import (
    AssessmentReport,
    ComparisonReport,
    CveAssessment,
    TargetMismatchError,
    TargetValue,
    UnresolvedVectorError,
    assess,
    compare,
    resolve_vectors,
)
from .attack_tree import (
    AssetAggregate,
    EmptyInputError,
    Relation,
    RelationMissingError,
    aggregate_and,
    aggregate_asset,
    aggregate_or,
)
from .cvss import (
    AttackComplexity,
    AttackVector,
    DuplicateMetricError,
    ExploitabilityVector,
    MalformedTokenError,
    MissingMetricError,
    PrivilegesRequired,
    UnknownValueError,
    UserInteraction,
    VectorError,
    exploitability_score,
    normalize,
    parse_vector,
)
from .environment import (
    Asset,
    Exposure,
    SecurityMechanism,
    UnknownAssetError,
    Vulnerability,
    apply_rule1,
    apply_rule2,
    is_protected,
    modify_vector,
)
from .fcm import (
    FcmConfig,
    FcmEdge,
    FcmModel,
    IterationTrace,
    MissingAggregateError,
    Scale,
    UnreachableTargetError,
    build_fcm,
    rescale,
    run_to_equilibrium,
    sigmoid,
    step,
)
from .nvd import (
    CveRecord,
    NvdClient,
    NvdError,
    NoV31MetricsError,
    NotFoundError,
    OfflineMissError,
    PrefetchError,
    RateLimitedError,
    RecordSource,
    TransportError,
)
from .scenario import (
    AttackEdge,
    ParseError,
    ScenarioError,
    ScenarioModel,
    SchemaError,
    ValidationError,
    load_bundled_scenario,
    load_scenario,
    parse_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)

__version__ = "0.1.0"
