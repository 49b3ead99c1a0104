"""Feature-learning experiments with Adam/AdamW/SignSGD/SignSGDW on the
two-patch synthetic data model. Thin wrapper over the C++ core."""

from ._core import (  # noqa: F401
    ConfigError,
    DataConfig,
    DataPoint,
    Dataset,
    ExperimentConfig,
    IoError,
    ModelConfig,
    OptKind,
    OptimizerConfig,
    OverlapReport,
    PresetReport,
    RunResult,
    ShapeError,
    activation,
    activation_prime,
    check_non_overlap,
    feature_learning,
    forward_logit,
    grad_per_sample,
    init_weights,
    logit_weight,
    noise_memorization,
    parse_config_file,
    per_sample_loss,
    preset_config,
    preset_names,
    read_dataset,
    reproduce,
    sample_dataset,
    train,
    training_error,
    verify,
    write_dataset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
