"""ordlog: engine for event logs with timestamps and an explicit partial order.

Derives and combines orders, checks consistency, coarsens time, applies
tiebreakers, groups cases into partial-order variants, and emits
k-sequentialized logs for conventional process-mining tools.
"""

from .errors import (
    CyclicOrder,
    InconsistentLog,
    OrdlogError,
    ParseError,
    ResourceLimit,
    TiebreakerConflict,
    TimestampError,
)
from .model import (
    ConsistencyReport,
    Event,
    EventLog,
    Granularity,
    OrderViolation,
    activities,
    cases,
    check_consistency,
    combined_order,
    derive_time_order,
    events_of_case,
)
from .order import (
    Poset,
    is_strict_partial_order,
    is_strict_weak_order,
    transitive_closure,
    transitive_reduction,
    union_orders,
)
from .ingest import ColumnMap, IngestConfig, detect_precision, parse_log
from .preprocess import TimeAggregator, Tiebreaker, aggregate_time, validate_tiebreaker
from .preprocess import apply as apply_preprocessing
from .variants import (
    CasePoset,
    PartialOrderVariant,
    canonical_key,
    case_poset,
    group_variants,
    variant_to_json,
)
from .sequentialize import (
    SamplerConfig,
    SimplifiedLog,
    count_linear_extensions,
    enumerate_sequential_runs,
    k_sequentialize,
    sample_sequential_run,
)

__version__ = "0.1.0"

__all__ = [
    "OrdlogError",
    "CyclicOrder",
    "InconsistentLog",
    "TiebreakerConflict",
    "ResourceLimit",
    "ParseError",
    "TimestampError",
    "Granularity",
    "Event",
    "EventLog",
    "OrderViolation",
    "ConsistencyReport",
    "activities",
    "cases",
    "events_of_case",
    "derive_time_order",
    "combined_order",
    "check_consistency",
    "Poset",
    "transitive_closure",
    "transitive_reduction",
    "union_orders",
    "is_strict_partial_order",
    "is_strict_weak_order",
    "ColumnMap",
    "IngestConfig",
    "parse_log",
    "detect_precision",
    "TimeAggregator",
    "Tiebreaker",
    "aggregate_time",
    "validate_tiebreaker",
    "apply_preprocessing",
    "CasePoset",
    "PartialOrderVariant",
    "case_poset",
    "canonical_key",
    "group_variants",
    "variant_to_json",
    "SamplerConfig",
    "SimplifiedLog",
    "count_linear_extensions",
    "enumerate_sequential_runs",
    "sample_sequential_run",
    "k_sequentialize",
    "__version__",
]
