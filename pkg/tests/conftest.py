import numpy as np
import pytest

import reporting
from sbsa import Signal, analyze_recording, segment_beats, select_chi
from sbsa.io import load_signal
from sbsa.pipeline import BeatConfig, Baseline
from sbsa.synthetic import bundled_recording_path


def pytest_terminal_summary(terminalreporter):
    if reporting.LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(reporting.LINES):
            terminalreporter.write_line(reporting.LINES[k])


@pytest.fixture(scope="session")
def bundled():
    return load_signal(bundled_recording_path())


@pytest.fixture(scope="session")
def bundled_analysis(bundled):
    """Windows, per-beat records and the decomposition behind each record."""
    cfg = BeatConfig()
    windows = segment_beats(bundled)
    records = analyze_recording(bundled, windows, cfg)
    fits = []
    for w in windows:
        raw = bundled.window(w.start_index, w.end_index)
        y = raw.with_samples(raw.samples - raw.samples.min()) if cfg.baseline is Baseline.FOOT else raw
        fits.append((y, select_chi(y, cfg.chi)))
    return windows, records, fits


@pytest.fixture
def sech2_signal():
    t = np.arange(-1500, 1501) * 0.01
    return Signal(1.0 / np.cosh(t) ** 2, 0.01, t[0])
