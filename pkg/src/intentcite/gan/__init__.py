from .nets import (
    DiscriminatorParams,
    GanModel,
    GeneratorParams,
    discriminator_forward,
    generator_forward,
    init_model,
)
from .losses import loss_discriminator, loss_generator, generator_objective
from .training import TrainConfig, TrainResult, train, write_train_log
from .inference import classify
from .metrics import EvalReport, evaluate
from .checkpoint import load_checkpoint, save_checkpoint
from .estimator import GanIntentClassifier

__all__ = [
    "DiscriminatorParams",
    "GanModel",
    "GeneratorParams",
    "GanIntentClassifier",
    "TrainConfig",
    "TrainResult",
    "EvalReport",
    "classify",
    "discriminator_forward",
    "evaluate",
    "generator_forward",
    "generator_objective",
    "init_model",
    "load_checkpoint",
    "loss_discriminator",
    "loss_generator",
    "save_checkpoint",
    "train",
    "write_train_log",
]
