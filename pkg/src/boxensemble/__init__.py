"""Multi-model bounding-box ensembling and RSNA-style detection scoring."""

from .ensemble import (
    Cluster,
    Detection,
    EnsembleConfig,
    PredictionSet,
    cluster_detections,
    ensemble_box,
    ensemble_dataset,
    ensemble_image,
    ensemble_score,
    filter_by_confidence,
)
from .errors import (
    BoxEnsembleError,
    ConflictingTarget,
    DegenerateResult,
    DuplicateImage,
    DuplicateModelTag,
    EmptyEvaluation,
    InvalidBox,
    InvalidBoxError,
    MalformedRow,
    ParseError,
    UndefinedCoefficient,
)
from .geometry import Box, area, intersection_area, iou
from .io import (
    GroundTruthSet,
    parse_ground_truth_csv,
    parse_predictions_csv,
    read_ground_truth,
    read_predictions,
    write_ground_truth_csv,
    write_predictions_csv,
    write_report,
)
from .metric import (
    ImageScore,
    MetricConfig,
    ScoreReport,
    ThresholdTally,
    dataset_score,
    default_thresholds,
    image_score,
    match_detections,
    score_coefficient,
)
from .synth import SyntheticConfig, generate_benchmark

__version__ = "0.1.0"
