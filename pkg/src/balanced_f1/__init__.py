"""Balanced point adjustment F1 for time-series anomaly detection."""
from .adjustment import (
    AdjustedPrediction,
    IslandParams,
    IslandPolicy,
    Protocol,
    Provenance,
    adjust_ba,
    adjust_kpa,
    adjust_pa,
    island_mask,
    resolve_island_width,
)
from .metrics import (
    ConfusionCounts,
    EventMetrics,
    PointMetrics,
    all_f1,
    confusion,
    event_metrics,
    event_metrics_from_segments,
    f1_variant,
    hellinger,
    precision_recall_f1,
    separation_score,
)
from .series import (
    AnomalySegment,
    SeriesError,
    as_labels,
    as_scores,
    labels_from_segments,
    segments_from_labels,
    threshold_scores,
)
from .simulator import (
    GroundTruthConfig,
    MetricConfig,
    RunRecord,
    ScoreConfig,
    SimulationError,
    generate_ground_truth,
    random_scorer,
    run_simulation,
    simulate_scores,
)
from .theory import (
    NoiseModel,
    TheoryParams,
    f1_ba_closed,
    f1_ba_noise,
    f1_pa_noise,
    threshold_sensitivity,
)

__version__ = "0.1.0"
