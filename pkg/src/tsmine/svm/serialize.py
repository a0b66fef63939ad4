"""JSON model files.

Layout::

    {"format": "tsmine-ovo-model", "version": 1,
     "labels": [...], "kernel": {...},
     "classifiers": [{"class_pair": [a, b], "bias": b, "penalty": C,
                      "support_vectors": [[...], ...],
                      "dual_coefficients": [...]}, ...]}

Floats are written with Python's shortest round-trip repr, so a reloaded
model predicts bit-identically.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import InputError
from .kernels import KernelSpec
from .model import BinarySvm, OvoModel

FORMAT = "tsmine-ovo-model"
VERSION = 1


def _label(v):
    return v.item() if hasattr(v, "item") else v


def model_to_dict(model: OvoModel) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "labels": [_label(v) for v in model.labels],
        "kernel": model.kernel.to_dict(),
        "classifiers": [
            {
                "class_pair": [_label(v) for v in c.class_pair],
                "bias": c.bias,
                "penalty": c.penalty,
                "iterations": c.iterations,
                "converged": c.converged,
                "kernel": c.kernel.to_dict(),
                "support_vectors": c.support_vectors.tolist(),
                "dual_coefficients": c.dual_coefficients.tolist(),
            }
            for c in model.classifiers
        ],
    }


def model_from_dict(d: dict) -> OvoModel:
    if d.get("format") != FORMAT:
        raise InputError(f"not a {FORMAT} file")
    if d.get("version") != VERSION:
        raise InputError(f"unsupported model version {d.get('version')!r}")
    machines = [
        BinarySvm(
            support_vectors=c["support_vectors"],
            dual_coefficients=c["dual_coefficients"],
            bias=float(c["bias"]),
            kernel=KernelSpec.from_dict(c["kernel"]),
            class_pair=tuple(c["class_pair"]),
            penalty=float(c["penalty"]),
            iterations=int(c.get("iterations", 0)),
            converged=bool(c.get("converged", True)),
        )
        for c in d["classifiers"]
    ]
    return OvoModel(machines, tuple(d["labels"]), KernelSpec.from_dict(d["kernel"]))


def save_model(model: OvoModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n")


def load_model(path) -> OvoModel:
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read model {path}: {exc}") from exc
    return model_from_dict(d)
