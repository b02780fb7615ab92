from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled real time series.

    ``samples`` are in signal units (mmHg for pressure), ``dt`` and ``t0`` in
    seconds. The array is copied and made read-only on construction.
    """

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        samples = _frozen(self.samples)
        if samples.ndim != 1:
            raise InvalidInputError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size < 3:
            raise InvalidInputError(f"need at least 3 samples, got {samples.size}")
        bad = np.flatnonzero(~np.isfinite(samples))
        if bad.size:
            raise InvalidInputError(f"non-finite sample at index {bad[0]}")
        dt = float(self.dt)
        if not (np.isfinite(dt) and dt > 0):
            raise InvalidInputError(f"dt must be positive and finite, got {self.dt!r}")
        if not np.isfinite(self.t0):
            raise InvalidInputError(f"t0 must be finite, got {self.t0!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def rate(self) -> float:
        return 1.0 / self.dt

    def window(self, start: int, end: int) -> "Signal":
        return Signal(self.samples[start:end], self.dt, self.t0 + start * self.dt)

    def with_samples(self, samples) -> "Signal":
        """Same grid, new values."""
        return Signal(samples, self.dt, self.t0)

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.dt == other.dt
            and self.t0 == other.t0
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None
