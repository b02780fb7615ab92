import numpy as np
import pytest

from sbsa import (
    BeatConfig,
    InsufficientDataError,
    InvalidInputError,
    Predictor,
    SegmentationError,
    Signal,
    analyze_recording,
    brs_pairs,
    segment_beats,
)
from sbsa.pipeline import BeatWindow, analyze_beat
from sbsa.synthetic import beat_samples, coupled_recording, periodic_pulse_train


def test_periodic_train_beat_count():
    rec = periodic_pulse_train(period=0.8, duration=60.0, fs=250.0)
    w = segment_beats(rec)
    assert abs(len(w) - 74) <= 1
    assert all(len(x) == 200 for x in w)


def test_constant_signal_rejected():
    with pytest.raises(SegmentationError):
        segment_beats(Signal(np.full(1000, 80.0), 0.004))


def test_annotations_override_detection():
    rec = periodic_pulse_train(duration=10.0)
    w = segment_beats(rec, annotations=[0, 200, 400, 600])
    assert [(x.start_index, x.end_index) for x in w] == [(0, 200), (200, 400), (400, 600)]
    with pytest.raises(InvalidInputError):
        segment_beats(rec, annotations=[0, 200, 10**6])
    with pytest.raises(InvalidInputError):
        segment_beats(rec, annotations=[0, 5])


def test_beat_record_values():
    fs = 250.0
    beat = beat_samples(200, fs, foot=70.0)
    rec = analyze_beat(Signal(beat, 1 / fs), BeatWindow(0, 200, 0.0), 0.8)
    assert rec.pi_ms == pytest.approx(800.0)
    assert rec.dbp == 70.0 and rec.pp == pytest.approx(rec.sbp - 70.0)
    assert rec.lambda1_abs >= rec.lambda2_abs > 0
    assert rec.converged and rec.relative_mse <= 1e-3
    assert not rec.flagged


def test_implausible_interval_flagged():
    fs = 250.0
    beat = beat_samples(50, fs)
    rec = analyze_beat(Signal(beat, 1 / fs), BeatWindow(0, 50, 0.0), 0.2)
    assert rec.flagged


def test_parallel_matches_serial():
    rec = coupled_recording(duration=8.0, seed=4)
    w = segment_beats(rec.signal)
    assert w == rec.windows
    serial = analyze_recording(rec.signal, w, workers=1)
    parallel = analyze_recording(rec.signal, w, workers=2)
    assert serial == parallel


def test_generator_programs_intervals():
    rec = coupled_recording(duration=20.0, seed=7, noise_ms=0.0)
    expected = rec.slope * rec.lambda1[:-1] + rec.intercept
    # only sample rounding separates programmed and realised intervals
    assert np.max(np.abs(rec.pi_ms[1:] - expected)) <= 2.0 + 1e-9


def test_brs_pairs_consecutive_only():
    rec = coupled_recording(duration=6.0, seed=1)
    records = analyze_recording(rec.signal, rec.windows)
    pairs = brs_pairs(records, Predictor.SBP)
    assert len(pairs) == len(records) - 1
    assert pairs[0].x == records[0].sbp and pairs[0].y == records[1].pi_ms
    gapped = records[:2] + records[3:]
    assert len(brs_pairs(gapped)) == len(records) - 3
    with pytest.raises(InsufficientDataError):
        brs_pairs(records[:2])


def test_raw_baseline_option():
    fs = 250.0
    beat = beat_samples(200, fs, foot=70.0)
    cfg = BeatConfig(baseline="none")
    rec = analyze_beat(Signal(beat, 1 / fs), BeatWindow(0, 200, 0.0), 0.8, cfg)
    assert rec.invariants.direct_inv1 == pytest.approx(np.trapezoid(beat, dx=1 / fs))


def test_bundled_recording_regenerates(bundled):
    rec = coupled_recording(seed=0)
    assert np.array_equal(rec.signal.samples, bundled.samples)
    assert segment_beats(bundled) == rec.windows
