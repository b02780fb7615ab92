"""Synthetic test signals: pulse trains and a baroreflex-coupled ABP recording.

The coupled recording is built beat by beat. Every beat is analyzed with the
same settings the pipeline uses, and the length of the following beat is set
from its |lambda_1|:

    PI(n+1) = slope * |lambda_1(n)| + intercept + noise,

rounded to whole samples. Beat width drives |lambda_1|; amplitude and foot
level wander independently, so SBP and PP carry little information on PI.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .pipeline import BeatConfig, BeatWindow, analyze_beat
from .signal import Signal


@dataclass(frozen=True)
class BeatShape:
    """Pressure pulse above the foot, in mmHg and seconds."""

    amplitude: float = 50.0
    systolic_width: float = 0.05
    systolic_time: float = 0.16
    reflection: float = 0.35     # relative to amplitude
    dicrotic: float = 0.25       # relative to amplitude
    runoff: float = 10.0         # mmHg, slow diastolic decay
    runoff_tau: float = 0.05


def _raw_shape(t: np.ndarray, T: float, s: BeatShape) -> np.ndarray:
    def bump(mu, sigma):
        return np.exp(-0.5 * ((t - mu) / sigma) ** 2)

    w = s.systolic_width
    pulse = bump(s.systolic_time, w) + s.reflection * bump(s.systolic_time + 0.13, 1.2 * w) \
        + s.dicrotic * bump(s.systolic_time + 0.29, 1.1 * w)
    return s.amplitude * pulse + s.runoff * (T - t) / T * (1.0 - np.exp(-t / s.runoff_tau))


def beat_samples(n_samples: int, fs: float, shape: BeatShape = BeatShape(),
                 foot: float = 70.0, next_foot: float | None = None) -> np.ndarray:
    """One foot-to-foot beat, end exclusive.

    The pulse is tilted so it starts exactly at ``foot`` and would reach
    ``next_foot`` at the next onset; every interior sample lies above the
    straight line between them, so the onset is a strict local minimum.
    """
    next_foot = foot if next_foot is None else next_foot
    T = n_samples / fs
    t = np.arange(n_samples) / fs
    s = _raw_shape(t, T, shape)
    s_end = _raw_shape(np.array([T]), T, shape)[0]
    s = s - (s[0] + (s_end - s[0]) * t / T)
    return foot + (next_foot - foot) * t / T + s


def periodic_pulse_train(period: float = 0.8, duration: float = 60.0, fs: float = 250.0,
                         shape: BeatShape = BeatShape(), foot: float = 70.0) -> Signal:
    """Identical beats every ``period`` seconds (``period * fs`` rounded)."""
    n = int(round(period * fs))
    beats = int(duration * fs) // n
    one = beat_samples(n, fs, shape, foot)
    tail = int(duration * fs) - beats * n
    samples = np.concatenate([np.tile(one, beats), one[:tail]])
    return Signal(samples, 1.0 / fs)


@dataclass(frozen=True)
class CoupledRecording:
    signal: Signal
    onsets: np.ndarray          # sample index of every beat onset, last one closes the final beat
    lambda1: np.ndarray         # |lambda_1| of each complete beat
    pi_ms: np.ndarray           # programmed pulse interval of each complete beat
    slope: float
    intercept: float

    @property
    def windows(self) -> list[BeatWindow]:
        dt, t0 = self.signal.dt, self.signal.t0
        return [BeatWindow(int(a), int(b), t0 + int(a) * dt)
                for a, b in zip(self.onsets[:-1], self.onsets[1:])]


def _ar1(rng, n, sd, rho):
    x = np.empty(n)
    x[0] = rng.normal(0.0, sd)
    k = sd * np.sqrt(1.0 - rho**2)
    for i in range(1, n):
        x[i] = rho * x[i - 1] + rng.normal(0.0, k)
    return np.clip(x, -2.5 * sd, 2.5 * sd)


def coupled_recording(duration: float = 300.0, fs: float = 250.0, slope: float = -0.105,
                      mean_pi_ms: float = 800.0, noise_ms: float = 2.0, seed: int = 0,
                      cfg: BeatConfig | None = None, base: BeatShape = BeatShape()) -> CoupledRecording:
    """Recording whose beat intervals follow |lambda_1| of the preceding beat.

    The intercept is fixed so a nominal ``base`` beat lasting ``mean_pi_ms``
    maps back onto ``mean_pi_ms``. One trailing beat is appended so the last
    programmed beat has a detectable closing foot.
    """
    cfg = cfg or BeatConfig()
    rng = np.random.default_rng(seed)
    n0 = int(round(mean_pi_ms * fs / 1000.0))
    nominal = Signal(beat_samples(n0, fs, base) - 70.0 + 1.0, 1.0 / fs)
    lam_ref = analyze_beat(nominal, BeatWindow(0, n0, 0.0), n0 / fs, cfg).lambda1_abs
    intercept = mean_pi_ms - slope * lam_ref

    cap = int(2 * duration * 1000.0 / mean_pi_ms) + 2
    width = base.systolic_width * np.exp(_ar1(rng, cap, 0.08, 0.6))
    amp = base.amplitude * np.exp(_ar1(rng, cap, 0.06, 0.5))
    feet = 72.0 + np.cumsum(rng.normal(0.0, 0.4, cap + 1))

    total = int(duration * fs)
    pieces, onsets, lams, pis = [], [0], [], []
    n_samp = n0
    i = 0
    while onsets[-1] + n_samp <= total:
        shape = replace(base, systolic_width=width[i], amplitude=amp[i])
        beat = beat_samples(n_samp, fs, shape, feet[i], feet[i + 1])
        rec = analyze_beat(Signal(beat, 1.0 / fs), BeatWindow(0, n_samp, 0.0), n_samp / fs, cfg)
        pieces.append(beat)
        lams.append(rec.lambda1_abs)
        pis.append(n_samp * 1000.0 / fs)
        onsets.append(onsets[-1] + n_samp)
        pi_next = slope * rec.lambda1_abs + intercept + rng.normal(0.0, noise_ms)
        n_samp = int(round(pi_next * fs / 1000.0))
        i += 1
    shape = replace(base, systolic_width=width[i], amplitude=amp[i])
    pieces.append(beat_samples(n_samp, fs, shape, feet[i], feet[i + 1]))
    return CoupledRecording(
        Signal(np.concatenate(pieces), 1.0 / fs),
        np.asarray(onsets), np.asarray(lams), np.asarray(pis), slope, intercept,
    )


BUNDLED_RECORDING = "synthetic_abp.csv"


def bundled_recording_path():
    """Path of the bundled 5-minute coupled recording (time,pressure CSV)."""
    return resources.files("sbsa") / "data" / BUNDLED_RECORDING
