"""protorail: gated state machines for structured ideation and foresight.

Two session protocols with hard validation gates and recorded outcomes,
an append-only ledger with longitudinal signal tracking, a batch harness
with exact-fraction statistics, and CLI/HTTP interfaces that share one
engine. All prose is operator-supplied; the engine only enforces the
rails.
"""

from .collider import (
    CheckResult,
    Collision,
    CollisionScore,
    ColliderSession,
    ColliderStatus,
    Confidence,
    Fragment,
    GateOutcome,
    Ghost,
    GhostChecklist,
    RealityBridge,
    SourceKind,
    Vision,
    VisionRatings,
    create_session,
    preflight_diversity,
    shallow_ghost_warning,
)
from .config import Config, DEFAULT_CONFIG, load_config
from .errors import GeneratorError, ProtocolError, ProviderFailure, StorageError
from .precog import (
    ActionCategory,
    ActionItem,
    CompetitivePosition,
    ContrarianScenario,
    ContrarianView,
    ConvergenceConfidence,
    ConvergencePoint,
    Evidence,
    ExternalWindow,
    GridEvaluation,
    MarketPhase,
    PrecogSession,
    PrecogStatus,
    Readiness,
    Signal,
    SignalDirection,
    SignalSource,
    SignalStrength,
    TimingCall,
    TimingGrid,
    TimingJudgment,
    evaluate_timing_grid,
)
from .integration import (
    IntegrationRun,
    bridge_to_actions,
    convergences_to_fragments,
    derive_collider_session,
    vision_to_readiness,
)
from .ledger import (
    DeltaClass,
    PredictionOutcome,
    PredictionRecord,
    Protocol,
    RubricScore,
    SessionRecord,
    SignalDelta,
    Store,
    diff_signals,
    evaluate_prediction,
    prediction_summary,
    record_prediction,
    score_rubric,
)
from .batch import (
    BatchStats,
    RunConfig,
    RunOutcome,
    RunResult,
    ScriptedProvider,
    compute_stats,
    load_batch_fixture,
    pearson,
    run_batch,
)
from .service import Engine

__version__ = "0.1.0"
