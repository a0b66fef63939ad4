"""Kernel SVMs trained by SMO, with one-vs-one multiclass voting."""

from .kernels import KernelSpec, auto_kernel_scale, cross_kernel, kernel_eval
from .model import (
    BinarySvm,
    OvoModel,
    class_scores,
    predict,
    train_binary,
    train_ovo,
    vote,
)
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .solver import SolverOptions

__all__ = [
    "KernelSpec",
    "kernel_eval",
    "cross_kernel",
    "auto_kernel_scale",
    "BinarySvm",
    "OvoModel",
    "SolverOptions",
    "train_binary",
    "train_ovo",
    "predict",
    "vote",
    "class_scores",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
]
