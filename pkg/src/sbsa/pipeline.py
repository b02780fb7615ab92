"""Beat-to-beat analysis of arterial-pressure-like recordings.

A recording is cut into foot-to-foot beats, each beat gets its own chi and
soliton decomposition, and the per-beat indices are paired with the next
beat's pulse interval for baroreflex-style regressions.
"""
from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

from .errors import InsufficientDataError, InvalidInputError, SbsaError, SegmentationError
from .invariants import InvariantSet, invariant_set
from .signal import Signal
from .transform import ChiSelectionConfig, select_chi

PI_PLAUSIBLE_MS = (250.0, 2500.0)
MIN_BEAT_SAMPLES = 16


class Predictor(str, enum.Enum):
    LAMBDA1 = "lambda1"
    SBP = "sbp"
    PP = "pp"


class Baseline(str, enum.Enum):
    FOOT = "foot"   # analyze pressure minus the beat minimum
    NONE = "none"   # analyze raw pressure


@dataclass(frozen=True)
class SegmentationConfig:
    """Foot detection: upstrokes are slope peaks above ``threshold`` times the
    global slope maximum, at least ``refractory`` seconds apart; each foot is
    the minimum in the ``refractory`` seconds before its upstroke."""

    threshold: float = 0.5
    refractory: float = 0.25


@dataclass(frozen=True)
class BeatConfig:
    chi: ChiSelectionConfig = field(default_factory=ChiSelectionConfig)
    n_s: int = 3
    baseline: Baseline = Baseline.FOOT

    def __post_init__(self):
        object.__setattr__(self, "baseline", Baseline(self.baseline))
        if self.n_s < 0:
            raise InvalidInputError("n_s must be >= 0")


@dataclass(frozen=True)
class BeatWindow:
    start_index: int
    end_index: int
    onset_time: float

    def __len__(self) -> int:
        return self.end_index - self.start_index


@dataclass(frozen=True)
class BeatRecord:
    beat_index: int
    onset_time: float
    pi_ms: float
    sbp: float
    dbp: float
    mbp: float
    pp: float
    lambda1_abs: float
    lambda2_abs: float
    invariants: InvariantSet
    chi_hat: float
    n_chi: int
    relative_mse: float = 0.0
    converged: bool = True
    flagged: bool = False

    def predictor(self, which: Predictor) -> float:
        which = Predictor(which)
        if which is Predictor.LAMBDA1:
            return self.lambda1_abs
        return getattr(self, which.value)


@dataclass(frozen=True)
class BrsPair:
    x: float
    y: float


def _windows_from_boundaries(recording: Signal, bounds: Sequence[int]) -> list[BeatWindow]:
    return [
        BeatWindow(int(a), int(b), recording.t0 + int(a) * recording.dt)
        for a, b in zip(bounds[:-1], bounds[1:])
    ]


def segment_beats(recording: Signal, cfg: SegmentationConfig | None = None,
                  annotations: Sequence[int] | None = None) -> list[BeatWindow]:
    """Foot-to-foot beat windows (end index exclusive).

    With ``annotations`` (sample indices of beat onsets) detection is skipped
    and the windows run between consecutive annotations.
    """
    m = len(recording)
    if annotations is not None:
        idx = np.asarray(annotations)
        if idx.ndim != 1 or idx.size < 2:
            raise InvalidInputError("need at least two annotated onsets")
        if not np.issubdtype(idx.dtype, np.integer):
            if not np.all(idx == np.round(idx)):
                raise InvalidInputError("annotations must be integer sample indices")
            idx = idx.astype(np.int64)
        bad = np.flatnonzero((idx < 0) | (idx > m))
        if bad.size:
            raise InvalidInputError(f"annotation {bad[0]} ({idx[bad[0]]}) outside 0..{m}")
        if np.any(np.diff(idx) < MIN_BEAT_SAMPLES):
            raise InvalidInputError(
                f"annotated beats must be increasing and at least {MIN_BEAT_SAMPLES} samples long"
            )
        return _windows_from_boundaries(recording, idx.tolist())

    cfg = cfg or SegmentationConfig()
    x = recording.samples
    slope = np.gradient(x, recording.dt)
    top = float(slope.max())
    if not top > 0:
        raise SegmentationError("no upstrokes: signal never rises")
    refractory = max(1, int(round(cfg.refractory / recording.dt)))
    upstrokes, _ = find_peaks(slope, height=cfg.threshold * top, distance=refractory)
    feet = []
    prev = 0
    for u in upstrokes:
        lo = max(prev, u - refractory)
        foot = lo + int(np.argmin(x[lo:u + 1]))
        if not feet or foot > feet[-1]:
            feet.append(foot)
        prev = u
    bounds = [feet[0]]
    for f in feet[1:]:
        if f - bounds[-1] >= MIN_BEAT_SAMPLES:
            bounds.append(f)
    if len(bounds) < 2:
        raise SegmentationError(f"found {len(upstrokes)} upstroke(s), no complete beat")
    return _windows_from_boundaries(recording, bounds)


def analyze_beat(recording: Signal, w: BeatWindow, next_onset: float,
                 cfg: BeatConfig | None = None, beat_index: int = 0) -> BeatRecord:
    cfg = cfg or BeatConfig()
    seg = recording.window(w.start_index, w.end_index)
    raw = seg.samples
    sbp, dbp = float(raw.max()), float(raw.min())
    mbp = float(raw.mean())
    y = seg.with_samples(raw - dbp) if cfg.baseline is Baseline.FOOT else seg
    try:
        res = select_chi(y, cfg.chi)
    except SbsaError as exc:
        raise type(exc)(f"beat {beat_index}: {exc}") from exc
    d = res.decomposition
    inv = invariant_set(d, y, min(cfg.n_s, d.n))
    lam = d.kappas**2
    pi_ms = (next_onset - w.onset_time) * 1000.0
    return BeatRecord(
        beat_index=beat_index,
        onset_time=w.onset_time,
        pi_ms=pi_ms,
        sbp=sbp,
        dbp=dbp,
        mbp=mbp,
        pp=sbp - dbp,
        lambda1_abs=float(lam[0]) if d.n > 0 else 0.0,
        lambda2_abs=float(lam[1]) if d.n > 1 else 0.0,
        invariants=inv,
        chi_hat=res.chi_hat,
        n_chi=d.n,
        relative_mse=res.relative_mse,
        converged=res.converged,
        flagged=not PI_PLAUSIBLE_MS[0] <= pi_ms <= PI_PLAUSIBLE_MS[1],
    )


def _job(args):
    return analyze_beat(*args)


def analyze_recording(recording: Signal, windows: Sequence[BeatWindow],
                      cfg: BeatConfig | None = None, workers: int = 1) -> list[BeatRecord]:
    """Analyze every window; the next onset of the last beat is its end.

    ``workers > 1`` fans the beats out over processes; the result order and
    content do not depend on it.
    """
    cfg = cfg or BeatConfig()
    # ship only the beat's own samples to the worker
    jobs = [
        (recording.window(w.start_index, w.end_index), BeatWindow(0, len(w), w.onset_time),
         recording.t0 + w.end_index * recording.dt, cfg, i)
        for i, w in enumerate(windows)
    ]
    if workers <= 1 or len(jobs) < 2:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def brs_pairs(records: Sequence[BeatRecord], predictor: Predictor = Predictor.LAMBDA1) -> list[BrsPair]:
    """(predictor of beat n, PI of beat n+1) for consecutive beats."""
    if len(records) < 3:
        raise InsufficientDataError(f"need at least 3 beats, got {len(records)}")
    predictor = Predictor(predictor)
    return [
        BrsPair(a.predictor(predictor), b.pi_ms)
        for a, b in zip(records[:-1], records[1:])
        if b.beat_index == a.beat_index + 1
    ]
