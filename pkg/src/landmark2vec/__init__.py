"""Unsupervised recovery of relative landmark positions from signal measurements.

Train a shallow L -> d -> L softmax network on unlabeled measurement vectors;
the input-side weights converge to the landmark coordinates up to scale,
rotation/reflection, and translation.
"""

from .data import (
    LandmarkMap,
    MeasurementSet,
    MeasurementVector,
    TrainingPair,
    build_dataset,
    build_pair,
    read_map_csv,
    read_measurement_csv,
    split,
    write_map_csv,
    write_measurement_csv,
)
from .evaluate import (
    AffineFit,
    cyclic_order_score,
    evaluation_report,
    fit_affine,
    ssme,
    true_map_variance,
    wcl_agent,
    wcl_landmarks,
)
from .network import (
    EmbeddingModel,
    TrainConfig,
    TrainLog,
    backward,
    cross_entropy,
    extract_map,
    forward,
    init_model,
    load_model,
    save_model,
    should_stop,
    train,
)
from .simulate import (
    InverseLinearParams,
    Layout,
    PathlossParams,
    agent_region,
    gen_inverse_linear,
    gen_pathloss,
    make_layout,
)

__version__ = "0.1.0"

__all__ = [
    "AffineFit",
    "EmbeddingModel",
    "InverseLinearParams",
    "LandmarkMap",
    "Layout",
    "MeasurementSet",
    "MeasurementVector",
    "PathlossParams",
    "TrainConfig",
    "TrainLog",
    "TrainingPair",
    "agent_region",
    "backward",
    "build_dataset",
    "build_pair",
    "cross_entropy",
    "cyclic_order_score",
    "evaluation_report",
    "extract_map",
    "fit_affine",
    "forward",
    "gen_inverse_linear",
    "gen_pathloss",
    "init_model",
    "load_model",
    "make_layout",
    "read_map_csv",
    "read_measurement_csv",
    "save_model",
    "should_stop",
    "split",
    "ssme",
    "train",
    "true_map_variance",
    "wcl_agent",
    "wcl_landmarks",
    "write_map_csv",
    "write_measurement_csv",
]
