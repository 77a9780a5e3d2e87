"""snipminer: persistence mining and anomaly detection on edge streams.

Measures how persistently activity snippets (reoccurring sequences of edge
updates among connected nodes) appear in an evolving network, offline or
incrementally on a live stream, and scores each occurrence for anomaly in
the <frequency, persistence> plane.
"""

from ._core import BACKEND as backend_name
from .anomaly import (
    AnomalyPoint,
    AnomalyScorer,
    AnomalyVerdict,
    DsTracker,
    ForestConfig,
    RunningStats,
    ds_baseline,
    freq_baseline,
)
from .errors import (
    InjectionError,
    IntervalError,
    MissingLabelError,
    OutOfOrderError,
    SnipminerError,
    StreamFormatError,
)
from .inject import InjectionSpec, inject
from .metrics import auc, f1_at_k
from .miner import (
    MinerConfig,
    MiningResult,
    SnippetStats,
    StreamingMiner,
    Variant,
    mine_offline,
    mine_streaming,
)
from .persistence import (
    PersistenceParams,
    SnippetRecord,
    frequency,
    gap_entropy,
    persistence,
    query_persistence,
    record_occurrence,
    spread,
    width,
)
from .snippets import (
    SnippetKey,
    SnippetOccurrence,
    View,
    Window,
    canonicalize,
    extract_new_snippets,
)
from .stream_io import (
    EdgeUpdate,
    StreamMeta,
    StreamReader,
    emit_stream,
    generate_synthetic,
    parse_stream,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    # stream_io
    "EdgeUpdate",
    "StreamMeta",
    "StreamReader",
    "parse_stream",
    "emit_stream",
    "generate_synthetic",
    # snippets
    "View",
    "Window",
    "SnippetKey",
    "SnippetOccurrence",
    "canonicalize",
    "extract_new_snippets",
    # persistence
    "PersistenceParams",
    "SnippetRecord",
    "width",
    "frequency",
    "gap_entropy",
    "spread",
    "persistence",
    "record_occurrence",
    "query_persistence",
    # miner
    "MinerConfig",
    "Variant",
    "SnippetStats",
    "MiningResult",
    "mine_offline",
    "mine_streaming",
    "StreamingMiner",
    # anomaly
    "ForestConfig",
    "AnomalyPoint",
    "AnomalyVerdict",
    "RunningStats",
    "AnomalyScorer",
    "freq_baseline",
    "ds_baseline",
    "DsTracker",
    # metrics
    "auc",
    "f1_at_k",
    # inject
    "InjectionSpec",
    "inject",
    # errors
    "SnipminerError",
    "StreamFormatError",
    "OutOfOrderError",
    "IntervalError",
    "MissingLabelError",
    "InjectionError",
]
