"""End-to-end orchestration shared by the CLI and the experiment scripts."""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .dataset import (
    EXT,
    HUM,
    SensorLog,
    SynthConfig,
    build_features,
    build_reduced,
    day_windows,
    generate_synthetic,
    read_log,
)
from .errors import InputError
from .paasax import paa_reconstruct, paa_transform, sax_encode, sax_reconstruct
from .preprocess import SmoothingConfig, patch_outliers, smooth, zscore
from .stats import summarize
from .svm import KernelSpec, SolverOptions

log = logging.getLogger(__name__)

SWEEP_W = (4, 6, 8, 10, 12, 16, 24)
SWEEP_A = (3, 4, 5, 6, 8, 10)


@dataclass
class RunConfig:
    """Every knob a command can take; see README for the config-file keys."""

    input: str | None = None
    days: int = 90
    smoothing: float | None = None
    w: int = 10
    a: int = 6
    kernel: str = "gaussian"
    gamma: float = 1.0
    sigma: float | None = None
    scale_mode: str = "fine"
    folds: int = 5
    seed: int = 0
    out: str = "tsmine-out"
    window: str = "day"
    breakpoints: str = "gaussian"
    tol: float = 1e-3
    max_iter: int = 10_000_000

    def __post_init__(self):
        if self.w < 1 or self.a < 2:
            raise InputError("need w >= 1 and a >= 2")
        if not self.gamma > 0:
            raise InputError("gamma must be positive")
        if self.folds < 2:
            raise InputError("folds must be >= 2")
        if self.window not in ("day", "whole"):
            raise InputError("window must be 'day' or 'whole'")
        if self.smoothing is not None and not 0 <= self.smoothing <= 1:
            raise InputError("smoothing must lie in [0, 1]")

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)

    def kernel_spec(self, kind: str | None = None) -> KernelSpec:
        kind = kind or self.kernel
        if kind == "gaussian" and self.sigma is None:
            return KernelSpec("gaussian", auto_scale=True, scale_mode=self.scale_mode)
        return KernelSpec(kind, self.sigma if kind == "gaussian" else None)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(tol=self.tol, max_iter=self.max_iter)

    @property
    def out_dir(self) -> Path:
        p = Path(self.out)
        p.mkdir(parents=True, exist_ok=True)
        return p


def load_source(cfg: RunConfig) -> SensorLog:
    if cfg.input:
        return read_log(cfg.input)
    log.info("no input log given; generating %d synthetic days (seed %d)", cfg.days, cfg.seed)
    return generate_synthetic(SynthConfig(days=cfg.days), cfg.seed)


def clean_log(raw: SensorLog, cfg: RunConfig) -> tuple:
    """Patch zero dropouts then smooth every channel.

    Returns the cleaned log and the number of patched samples per channel.
    """
    scfg = SmoothingConfig(cfg.smoothing)
    patched = {}
    out = {}
    for name, ts in raw.channels.items():
        patched[name] = int(np.count_nonzero(ts.values == 0.0))
        out[name] = smooth(patch_outliers(ts), scfg)
    return SensorLog(out), patched


def channel_stats(clean: SensorLog) -> dict:
    """Summary per channel; correlation against outdoor temperature."""
    ext = clean.channels.get(EXT)
    return {
        name: summarize(ts, None if name == EXT or ext is None else ext)
        for name, ts in clean.channels.items()
    }


def build_dataset(clean: SensorLog, variant: str, cfg: RunConfig):
    if variant == "proc":
        return build_features(clean)
    return build_reduced(clean, cfg.w, cfg.a, variant, breakpoints=cfg.breakpoints)


def temperature_channels(clean: SensorLog) -> list:
    return [n for n in clean.channels if n != HUM]


def windows(ts, window: str) -> list:
    if window == "whole":
        return [(0, len(ts))]
    starts, per_day = day_windows(ts)
    return [(int(s), per_day) for s in starts]


def encode_series(z, w: int, a: int, window: str) -> list:
    """(start, PaaVector, SaxWord, paa_recon, sax_recon) per window of ``z``."""
    out = []
    for start, length in windows(z, window):
        seg = z.values[start:start + length]
        if length < w:
            raise InputError(f"window of {length} samples is shorter than w={w}")
        p = paa_transform(seg, w)
        word = sax_encode(p, a)
        out.append((start, p, word, paa_reconstruct(p).values, sax_reconstruct(word).values))
    return out


def reconstruction_errors(z, w: int, a: int, window: str) -> dict:
    """RMSE of PAA and SAX reconstructions over all covered samples."""
    sq_paa = sq_sax = 0.0
    count = 0
    for start, p, _, rp, rs in encode_series(z, w, a, window):
        seg = z.values[start:start + p.source_length]
        sq_paa += float(np.sum((seg - rp) ** 2))
        sq_sax += float(np.sum((seg - rs) ** 2))
        count += seg.size
    return {"paa_rmse": (sq_paa / count) ** 0.5, "sax_rmse": (sq_sax / count) ** 0.5,
            "samples": count}


def standardize_channels(clean: SensorLog) -> dict:
    return {name: zscore(clean[name]) for name in temperature_channels(clean)}


def sweep(zs: dict, ws=SWEEP_W, as_=SWEEP_A, window: str = "day") -> list:
    """Reconstruction error and compression factor over a (w, a) grid."""
    rows = []
    for w in ws:
        for a in as_:
            sq_paa = sq_sax = 0.0
            count = 0
            for name, z in zs.items():
                err = reconstruction_errors(z, w, a, window)
                rows.append({"channel": name, "w": w, "a": a, **_cell(err, w, window, z)})
                sq_paa += err["paa_rmse"] ** 2 * err["samples"]
                sq_sax += err["sax_rmse"] ** 2 * err["samples"]
                count += err["samples"]
            pooled = {"paa_rmse": (sq_paa / count) ** 0.5, "sax_rmse": (sq_sax / count) ** 0.5,
                      "samples": count}
            rows.append({"channel": "all", "w": w, "a": a,
                         **_cell(pooled, w, window, next(iter(zs.values())))})
    return rows


def _cell(err: dict, w: int, window: str, z) -> dict:
    length = windows(z, window)[0][1]
    return {"paa_rmse": err["paa_rmse"], "sax_rmse": err["sax_rmse"],
            "compression": length / w}
