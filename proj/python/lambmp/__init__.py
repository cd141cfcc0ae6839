"""Single-atom matching pursuits (SAMPM, SACMPM) for dispersive Lamb-wave signals."""

from ._lambmp import (
    LambmpError,
    PlateModel,
    predict,
    propagate,
    run_pipeline,
    sacmpm,
    sampm,
    tone_burst,
    train,
    wavenumbers,
)

__all__ = [
    "LambmpError",
    "PlateModel",
    "predict",
    "propagate",
    "run_pipeline",
    "sacmpm",
    "sampm",
    "tone_burst",
    "train",
    "wavenumbers",
]
