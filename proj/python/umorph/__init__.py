"""Username morphology induction and classification."""

from umorph._core import (
    ClassModel,
    MorphModel,
    decode_markers,
    evaluate,
    extract_ngrams,
    load_model,
    normalize_case,
    train_classifier,
    train_morph,
)

__all__ = [
    "ClassModel",
    "MorphModel",
    "decode_markers",
    "evaluate",
    "extract_ngrams",
    "load_model",
    "normalize_case",
    "train_classifier",
    "train_morph",
]
