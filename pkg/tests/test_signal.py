import numpy as np
import pytest

from sbsa import InvalidInputError, Signal


def test_samples_are_read_only_copy():
    a = np.arange(5.0)
    s = Signal(a, 0.5)
    a[0] = 99
    assert s.samples[0] == 0
    with pytest.raises(ValueError):
        s.samples[1] = 3


@pytest.mark.parametrize("samples,dt", [
    ([1.0, 2.0], 1.0),
    ([[1.0, 2.0, 3.0]], 1.0),
    ([1.0, np.nan, 3.0], 1.0),
    ([1.0, 2.0, 3.0], 0.0),
    ([1.0, 2.0, 3.0], np.inf),
])
def test_validation(samples, dt):
    with pytest.raises(InvalidInputError):
        Signal(samples, dt)


def test_window_times():
    s = Signal(np.arange(10.0), 0.1, 2.0)
    w = s.window(3, 7)
    assert w.t0 == pytest.approx(2.3) and w.samples.tolist() == [3, 4, 5, 6]
    assert s.rate == pytest.approx(10.0)
    assert s == Signal(np.arange(10.0), 0.1, 2.0)
