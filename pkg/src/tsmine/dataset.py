"""Sensor logs, feature datasets and the synthetic air-handling-unit generator.

A log holds 14 channels on one 5-minute time base: exhaust (``evac``), input
(``in``) and recirculation (``rec``) temperatures for units 1, 2, 3 and 5,
plus outdoor temperature and humidity. Humidity is carried through I/O but
never becomes a feature.

Three dataset variants are built from a log:

* ``proc`` one row per sample per unit;
* ``paa``  one row per PAA segment per unit, from per-day windows;
* ``sax``  like ``paa`` but each segment value replaced by the mean of its
  SAX cell.

Numeric features are z-scored per feature column over all units pooled, so
level differences between units survive standardisation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np
from scipy.signal import lfilter

from .errors import DegenerateDataError, InputError
from .paasax import (
    DEFAULT_A,
    DEFAULT_W,
    cell_means,
    empirical_breakpoints,
    gaussian_breakpoints,
    paa_transform,
    sax_encode,
)
from .timeseries import FIVE_MINUTES, TimeSeries

AHU_LABELS = (1, 2, 3, 5)
MEASURES = ("evac", "in", "rec")
EXT = "ext_temp"
HUM = "ext_hum"
LOG_COLUMNS = tuple(f"ahu{u}_{m}" for u in AHU_LABELS for m in MEASURES) + (EXT, HUM)
FEATURES = ("evac", "in", "rec", "ext", "iswkn", "iswinter", "issummer", "isshoulder")
VARIANTS = ("proc", "paa", "sax")


def channel_name(unit: int, measure: str) -> str:
    return f"ahu{unit}_{measure}"


# ---------------------------------------------------------------- sensor logs


@dataclass(frozen=True, eq=False)
class SensorLog:
    """Named channels sharing one time base."""

    channels: dict

    def __post_init__(self):
        if not self.channels:
            raise InputError("sensor log has no channels")
        ref = next(iter(self.channels.values()))
        for name, ts in self.channels.items():
            if not ts.same_time_base(ref):
                raise InputError(f"channel {name} does not share the log time base")

    @property
    def reference(self) -> TimeSeries:
        return next(iter(self.channels.values()))

    @property
    def units(self) -> tuple:
        return tuple(u for u in AHU_LABELS
                     if all(channel_name(u, m) in self.channels for m in MEASURES))

    @property
    def ext(self) -> TimeSeries:
        try:
            return self.channels[EXT]
        except KeyError:
            raise InputError(f"log has no {EXT} channel") from None

    def __getitem__(self, name: str) -> TimeSeries:
        return self.channels[name]

    def __len__(self) -> int:
        return len(self.reference)

    def map(self, fn) -> "SensorLog":
        """Apply ``fn(TimeSeries) -> TimeSeries`` to every channel."""
        return SensorLog({k: fn(v) for k, v in self.channels.items()})


def read_log(path) -> SensorLog:
    """Read a comma-separated log: ISO-8601 timestamp column, then channels."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [r for r in reader if r]
    except (OSError, StopIteration) as exc:
        raise InputError(f"cannot read log {path}: {exc}") from exc
    names = [h.strip() for h in header[1:]]
    if not rows:
        raise InputError(f"log {path} has no samples")
    try:
        stamps = [datetime.fromisoformat(r[0]) for r in rows]
        data = np.array([[float(v) for v in r[1:]] for r in rows])
    except ValueError as exc:
        raise InputError(f"malformed log {path}: {exc}") from exc
    if data.shape[1] != len(names):
        raise InputError(f"log {path}: rows do not match the header")
    step = (stamps[1] - stamps[0]).total_seconds() if len(stamps) > 1 else FIVE_MINUTES
    if len(stamps) > 1:
        gaps = np.diff([s.timestamp() for s in stamps])
        if not np.allclose(gaps, step):
            raise InputError(f"log {path} is not uniformly sampled")
    channels = {
        name: TimeSeries(data[:, i], stamps[0], step, name) for i, name in enumerate(names)
    }
    return SensorLog(channels)


def write_log(log: SensorLog, path) -> None:
    names = list(log.channels)
    stamps = log.reference.timestamps().astype(datetime)
    cols = [log.channels[n].values for n in names]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", *names])
        for i, ts in enumerate(stamps):
            w.writerow([ts.isoformat(), *(repr(float(c[i])) for c in cols)])


# ---------------------------------------------------------------- calendar


@dataclass(frozen=True)
class SeasonCalendar:
    """Month-to-season mapping and weekend days (Monday = 0)."""

    winter: tuple = (12, 1, 2)
    summer: tuple = (6, 7, 8)
    weekend: tuple = (5, 6)

    def flags(self, stamps: np.ndarray) -> np.ndarray:
        """(n, 4) binary matrix: iswkn, iswinter, issummer, isshoulder."""
        stamps = np.asarray(stamps, dtype="datetime64[s]")
        days = stamps.astype("datetime64[D]")
        weekday = (days.astype(np.int64) + 3) % 7  # 1970-01-01 was a Thursday
        month = (stamps.astype("datetime64[M]").astype(np.int64) % 12) + 1
        wkn = np.isin(weekday, self.weekend)
        win = np.isin(month, self.winter)
        sum_ = np.isin(month, self.summer)
        return np.column_stack([wkn, win, sum_, ~(win | sum_)]).astype(np.float64)


# ---------------------------------------------------------------- datasets


class FeatureRow(NamedTuple):
    evac: float
    in_: float
    rec: float
    ext: float
    iswkn: int
    iswinter: int
    issummer: int
    isshoulder: int
    label: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix in ``FEATURES`` column order plus unit labels."""

    features: np.ndarray
    labels: np.ndarray
    variant: str
    provenance: str = ""
    timestamps: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[1] != len(FEATURES):
            raise InputError(f"dataset needs {len(FEATURES)} feature columns")
        if X.shape[0] != y.size or y.size == 0:
            raise InputError("dataset must be non-empty with one label per row")
        if self.variant not in VARIANTS:
            raise InputError(f"unknown dataset variant {self.variant!r}")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.labels.size

    def rows(self) -> Iterator[FeatureRow]:
        for x, lab in zip(self.features, self.labels):
            yield FeatureRow(*(float(v) for v in x[:4]), *(int(v) for v in x[4:]), int(lab))

    def subset(self, idx) -> "Dataset":
        ts = None if self.timestamps is None else self.timestamps[idx]
        return replace(self, features=self.features[idx], labels=self.labels[idx], timestamps=ts)

    def with_labels(self, labels) -> "Dataset":
        return replace(self, labels=np.asarray(labels))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*FEATURES, "class"])
            for x, lab in zip(self.features, self.labels):
                w.writerow([*(repr(float(v)) for v in x[:4]),
                            *(str(int(v)) for v in x[4:]), int(lab)])

    @classmethod
    def from_csv(cls, path, variant: str = "proc", provenance: str | None = None) -> "Dataset":
        path = Path(path)
        try:
            with path.open(newline="") as fh:
                reader = csv.reader(fh)
                header = [h.strip() for h in next(reader)]
                body = [r for r in reader if r]
        except (OSError, StopIteration) as exc:
            raise InputError(f"cannot read dataset {path}: {exc}") from exc
        if header != [*FEATURES, "class"]:
            raise InputError(f"dataset {path}: expected columns {[*FEATURES, 'class']}")
        try:
            arr = np.array([[float(v) for v in r] for r in body])
        except ValueError as exc:
            raise InputError(f"malformed dataset {path}: {exc}") from exc
        if arr.ndim != 2 or arr.shape[0] == 0:
            raise InputError(f"dataset {path} has no rows")
        return cls(arr[:, :-1], arr[:, -1].astype(np.int64), variant,
                   provenance if provenance is not None else str(path))


def _check_time_base(log: SensorLog):
    units = log.units
    if not units:
        raise InputError("log contains no complete unit (evac, in, rec)")
    ref = log.ext
    for u in units:
        for m in MEASURES:
            if not log[channel_name(u, m)].same_time_base(ref):
                raise InputError(f"channel {channel_name(u, m)}: time-base mismatch")
    return units


def _pooled_z(arrays: list) -> list:
    """Standardise arrays with one shared mean and (n-1) sd."""
    allv = np.concatenate(arrays)
    mu = allv.mean()
    sd = allv.std(ddof=1)
    if not sd > 0:
        raise DegenerateDataError("degenerate variance")
    return [(a - mu) / sd for a in arrays]


def standardized_features(log: SensorLog) -> tuple:
    """z-scored numeric channels: ({(unit, measure): values}, ext values)."""
    units = _check_time_base(log)
    z = {}
    for m in MEASURES:
        cols = _pooled_z([log[channel_name(u, m)].values for u in units])
        for u, c in zip(units, cols):
            z[u, m] = c
    # outdoor temperature appears once per unit in the dataset; standardise
    # over those copies so the column has unit sd
    ext = _pooled_z([log.ext.values] * len(units))[0]
    return z, ext


def build_features(log: SensorLog, calendar: SeasonCalendar = SeasonCalendar()) -> Dataset:
    """Per-sample dataset: one row per sample and unit, time-major."""
    z, ext = standardized_features(log)
    units = log.units
    stamps = log.ext.timestamps()
    flags = calendar.flags(stamps)
    n, k = len(stamps), len(units)
    X = np.empty((n, k, len(FEATURES)))
    for j, u in enumerate(units):
        for c, m in enumerate(MEASURES):
            X[:, j, c] = z[u, m]
        X[:, j, 3] = ext
        X[:, j, 4:] = flags
    labels = np.tile(np.asarray(units), n)
    return Dataset(X.reshape(n * k, -1), labels, "proc",
                   f"{k} units x {n} samples, per-sample features",
                   np.repeat(stamps, k))


def day_windows(series: TimeSeries) -> tuple:
    """Start indices of whole calendar days and the samples per day."""
    per_day = 86400.0 / series.step
    if abs(per_day - round(per_day)) > 1e-9:
        raise InputError(f"step {series.step}s does not divide a day")
    per_day = int(round(per_day))
    stamps = series.timestamps()
    tod = (stamps - stamps.astype("datetime64[D]")).astype(np.int64)
    first = int(np.argmax(tod == 0)) if np.any(tod == 0) else len(series)
    starts = np.arange(first, len(series) - per_day + 1, per_day)
    return starts, per_day


def _reduce_day(values: np.ndarray, w: int, variant: str, bp) -> np.ndarray:
    p = paa_transform(values, w)
    if variant == "paa":
        return p.segments
    return cell_means(bp)[sax_encode(p, len(bp) + 1, bp).symbols]


def build_reduced(log: SensorLog, w: int = DEFAULT_W, a: int = DEFAULT_A,
                  variant: str = "sax", calendar: SeasonCalendar = SeasonCalendar(),
                  breakpoints: str = "gaussian") -> Dataset:
    """Segment-level dataset from per-day PAA (and SAX) of each channel.

    One row per day, segment and unit. Binary features come from the first
    sample of each segment. For ``sax`` the numeric features are the cell
    means of the encoded segments.
    """
    if variant not in ("paa", "sax"):
        raise InputError(f"reduced variant must be paa or sax, got {variant!r}")
    z, ext = standardized_features(log)
    units = log.units
    starts, per_day = day_windows(log.ext)
    if per_day < w:
        raise InputError(f"day window of {per_day} samples is shorter than w={w}")
    if starts.size == 0:
        raise InputError("log holds no complete day")

    def bp_for(values):
        if variant == "paa":
            return None
        if breakpoints == "gaussian":
            return gaussian_breakpoints(a)
        if breakpoints == "empirical":
            return empirical_breakpoints(values, a)
        raise InputError(f"unknown breakpoint mode {breakpoints!r}")

    def reduce_channel(values):
        bp = bp_for(values)
        return np.stack([_reduce_day(values[s:s + per_day], w, variant, bp) for s in starts])

    seg_first = np.floor(np.arange(w) * per_day / w).astype(np.int64)
    sample_idx = (starts[:, None] + seg_first[None, :]).reshape(-1)
    stamps = log.ext.timestamps()[sample_idx]
    flags = calendar.flags(stamps)
    ext_r = reduce_channel(ext).reshape(-1)
    nseg, k = sample_idx.size, len(units)
    X = np.empty((nseg, k, len(FEATURES)))
    for j, u in enumerate(units):
        for c, m in enumerate(MEASURES):
            X[:, j, c] = reduce_channel(z[u, m]).reshape(-1)
        X[:, j, 3] = ext_r
        X[:, j, 4:] = flags
    labels = np.tile(np.asarray(units), nseg)
    desc = f"{k} units x {starts.size} days x {w} segments, {variant}"
    if variant == "sax":
        desc += f" a={a} ({breakpoints} breakpoints, cell-mean reconstruction)"
    return Dataset(X.reshape(nseg * k, -1), labels, variant, desc, np.repeat(stamps, k))


# ---------------------------------------------------------------- synthetic data


@dataclass(frozen=True)
class UnitProfile:
    """Behaviour of one synthetic unit; temperatures in degrees C."""

    label: int
    evac: float
    inlet: float
    rec: float
    occupancy_amp: float
    ext_coupling: float
    weekend_factor: float = 0.3


DEFAULT_UNITS = (
    UnitProfile(1, evac=25.2, inlet=21.0, rec=23.5, occupancy_amp=1.5, ext_coupling=0.06),
    UnitProfile(2, evac=23.6, inlet=19.0, rec=21.0, occupancy_amp=1.0, ext_coupling=-0.03),
    UnitProfile(3, evac=21.5, inlet=17.0, rec=18.5, occupancy_amp=2.0, ext_coupling=0.12),
    UnitProfile(5, evac=25.6, inlet=23.5, rec=26.0, occupancy_amp=1.2, ext_coupling=-0.01),
)

# per-measure scaling of occupancy swing and outdoor coupling
_MEASURE_GAIN = {"evac": 1.0, "in": 0.6, "rec": 0.8}


@dataclass(frozen=True)
class SynthConfig:
    """Synthetic log settings."""

    days: int = 90
    start: datetime = datetime(2017, 1, 7)
    step: float = FIVE_MINUTES
    units: tuple = DEFAULT_UNITS
    ext_mean: float = 13.78
    ext_annual_amp: float = 12.0
    ext_daily_amp: float = 4.0
    ext_weather_sd: float = 3.0
    noise_sd: float = 0.15
    dropout_rate: float = 0.0005

    def __post_init__(self):
        if self.days < 1:
            raise InputError("synthetic log needs at least one day")
        if not self.step > 0 or (86400.0 / self.step) % 1:
            raise InputError("step must be positive and divide a day")
        if not 0.0 <= self.dropout_rate <= 0.001:
            raise InputError("dropout rate must lie in [0, 0.001]")
        if self.noise_sd < 0 or self.ext_weather_sd < 0:
            raise InputError("noise levels must be non-negative")
        labels = [u.label for u in self.units]
        if len(set(labels)) != len(labels) or not set(labels) <= set(AHU_LABELS):
            raise InputError(f"unit labels must be distinct members of {AHU_LABELS}")


def _occupancy(hours: np.ndarray) -> np.ndarray:
    """Smooth working-hours bump, 0 at night, ~1 between 9 and 17."""
    rise = 1.0 / (1.0 + np.exp(-(hours - 8.0) * 1.5))
    fall = 1.0 / (1.0 + np.exp((hours - 18.0) * 1.5))
    return rise * fall


def _ar1(rng, n: int, sd: float, phi: float) -> np.ndarray:
    shocks = rng.normal(0.0, sd * math.sqrt(1.0 - phi * phi), n)
    shocks[0] = rng.normal(0.0, sd)
    return lfilter([1.0], [1.0, -phi], shocks)


def generate_synthetic(config: SynthConfig = SynthConfig(), seed: int = 0) -> SensorLog:
    """Deterministic synthetic 14-channel log."""
    rng = np.random.default_rng(seed)
    per_day = int(round(86400.0 / config.step))
    n = config.days * per_day
    t = np.arange(n) * config.step
    start = config.start
    stamps = np.datetime64(start, "s") + np.round(t).astype("timedelta64[s]")
    hours = (stamps - stamps.astype("datetime64[D]")).astype(np.int64) / 3600.0
    doy = np.asarray(
        [(start + timedelta(seconds=float(s))).timetuple().tm_yday for s in t[::per_day]]
    ).repeat(per_day)
    weekend = SeasonCalendar().flags(stamps)[:, 0].astype(bool)

    ext = (
        config.ext_mean
        - config.ext_annual_amp * np.cos(2 * np.pi * (doy - 20) / 365.25)
        + config.ext_daily_amp * np.sin(2 * np.pi * (hours - 9.0) / 24.0)
        + _ar1(rng, n, config.ext_weather_sd, 0.9995)
    )
    ext_anom = ext - config.ext_mean
    occ = _occupancy(hours)

    channels = {}
    for unit in config.units:
        occ_u = occ * np.where(weekend, unit.weekend_factor, 1.0) * unit.occupancy_amp
        drift = _ar1(rng, n, 0.3, 0.999)
        for m, base in zip(MEASURES, (unit.evac, unit.inlet, unit.rec)):
            g = _MEASURE_GAIN[m]
            x = (base + g * occ_u + g * unit.ext_coupling * ext_anom + drift
                 + rng.normal(0.0, config.noise_sd, n))
            name = channel_name(unit.label, m)
            channels[name] = x
    hum = np.clip(60.0 - 1.2 * ext_anom + _ar1(rng, n, 8.0, 0.999), 5.0, 100.0)
    channels[EXT] = ext
    channels[HUM] = hum

    n_drop = int(math.floor(config.dropout_rate * n))
    out = {}
    for name, x in channels.items():
        if n_drop:
            x = x.copy()
            x[rng.choice(n, n_drop, replace=False)] = 0.0
        out[name] = TimeSeries(x, start, config.step, name)
    return SensorLog(out)
