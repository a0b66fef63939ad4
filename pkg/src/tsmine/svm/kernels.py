"""Kernel functions and kernel-scale heuristics."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import InputError

KINDS = ("linear", "cubic", "gaussian")
KIND_CODES = {k: i for i, k in enumerate(KINDS)}

SIGMA_FLOOR = 1e-6
HEURISTIC_SUBSAMPLE = 1000


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice.

    ``gaussian_sigma`` is set exactly when the kind is gaussian and
    ``auto_scale`` is off. With ``auto_scale`` the width is resolved from the
    training data at fit time, by ``scale_mode`` ("fine" or "heuristic").
    """

    kind: str = "gaussian"
    gaussian_sigma: float | None = None
    auto_scale: bool = False
    scale_mode: str = "fine"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown kernel {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gaussian" and not self.auto_scale:
            if self.gaussian_sigma is None or not self.gaussian_sigma > 0:
                raise InputError("gaussian kernel needs a positive sigma or auto_scale")
        elif self.gaussian_sigma is not None:
            raise InputError("gaussian_sigma is only valid for a fixed-width gaussian kernel")
        if self.auto_scale and self.kind != "gaussian":
            raise InputError("auto_scale applies to the gaussian kernel only")
        if self.scale_mode not in ("fine", "heuristic"):
            raise InputError(f"unknown scale mode {self.scale_mode!r}")

    @classmethod
    def fine_gaussian(cls) -> "KernelSpec":
        return cls("gaussian", auto_scale=True, scale_mode="fine")

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]

    def resolve(self, data, seed: int = 0) -> "KernelSpec":
        """Fixed-width spec, computing sigma from ``data`` if auto-scaled."""
        if not self.auto_scale:
            return self
        sigma = auto_kernel_scale(data, mode=self.scale_mode, seed=seed)
        return replace(self, gaussian_sigma=sigma, auto_scale=False)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "gaussian_sigma": self.gaussian_sigma,
            "auto_scale": self.auto_scale,
            "scale_mode": self.scale_mode,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(
            d["kind"],
            d.get("gaussian_sigma"),
            bool(d.get("auto_scale", False)),
            d.get("scale_mode", "fine"),
        )


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """k(x, y) for a single pair of feature vectors."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise InputError(f"dimension mismatch: {x.size} vs {y.size}")
    if spec.kind == "gaussian":
        if spec.gaussian_sigma is None:
            raise InputError("resolve the kernel scale before evaluating")
        d = x - y
        return float(np.exp(-np.sum(d * d) / (2.0 * spec.gaussian_sigma**2)))
    s = float(np.sum(x * y))
    if spec.kind == "cubic":
        return (s + 1.0) ** 3
    return s


def cross_kernel(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of k(a_i, b_j) for row sets ``a`` and ``b``."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise InputError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if spec.kind == "gaussian":
        sq = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * (a @ b.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / (2.0 * spec.gaussian_sigma**2))
    dot = a @ b.T
    if spec.kind == "cubic":
        return (dot + 1.0) ** 3
    return dot


def auto_kernel_scale(data, mode: str = "fine", seed: int = 0) -> float:
    """Gaussian width from the data.

    ``fine`` returns sqrt(P)/4 for P features. ``heuristic`` returns the median
    pairwise Euclidean distance over a seeded subsample of up to 1000 rows,
    floored at 1e-6.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    n, p = data.shape
    if p < 1:
        raise InputError("need at least one feature")
    if mode == "fine":
        return float(np.sqrt(p) / 4.0)
    if mode != "heuristic":
        raise InputError(f"unknown scale mode {mode!r}")
    if n < 2:
        raise InputError("heuristic kernel scale needs at least 2 rows")
    if n > HEURISTIC_SUBSAMPLE:
        rows = np.random.default_rng(seed).choice(n, HEURISTIC_SUBSAMPLE, replace=False)
        data = data[np.sort(rows)]
    iu = np.triu_indices(data.shape[0], k=1)
    diff = data[iu[0]] - data[iu[1]]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    return float(max(np.median(dist), SIGMA_FLOOR))
