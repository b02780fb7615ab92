"""CSV ingestion/emission, per-beat tables, run configuration and JSON summaries."""
from __future__ import annotations

import configparser
import csv
import json
import math
import platform
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError
from .invariants import InvariantSet
from .pipeline import BeatConfig, BeatRecord, Predictor, SegmentationConfig
from .signal import Signal
from .transform import ChiMode, ChiSelectionConfig

FLOAT_FORMAT = "%.17g"
# relative step spread above which timestamps count as non-uniform
UNIFORM_RTOL = 1e-6

BEAT_COLUMNS = (
    "beat", "pi_ms", "sbp", "dbp", "mbp", "pp", "lambda1", "lambda2",
    "inv1g", "inv1s", "inv1d", "inv2g", "inv2s", "inv2d", "chi", "n",
)
BEAT_UNITS = {
    "beat": "index", "pi_ms": "ms", "sbp": "mmHg", "dbp": "mmHg", "mbp": "mmHg",
    "pp": "mmHg", "lambda1": "s^-2", "lambda2": "s^-2",
    "inv1g": "mmHg*s", "inv1s": "mmHg*s", "inv1d": "mmHg*s",
    "inv2g": "mmHg^2*s", "inv2s": "mmHg^2*s", "inv2d": "mmHg^2*s",
    "chi": "mmHg^-1*s^-2", "n": "count",
}


def fmt(x: float) -> str:
    return FLOAT_FORMAT % x


class SignalFileWarning(UserWarning):
    pass


def _parse_rows(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    rows = []
    header = None
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            values = [float(v) for v in row]
        except ValueError:
            if header is None and not rows:
                header = [v.strip() for v in row]
                continue
            raise InvalidInputError(f"{path}: row {lineno}: non-numeric value in {row!r}") from None
        rows.append((lineno, values))
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    return header, rows


def _column_index(column, header, width) -> int:
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        if header is None or column not in header:
            raise InvalidInputError(f"column {column!r} not found in header {header}")
        return header.index(column)
    idx = int(column)
    if not -width <= idx < width:
        raise InvalidInputError(f"column {idx} outside a {width}-column file")
    return idx % width


def load_signal(path, column=None, rate: float | None = None) -> Signal:
    """Read a uniform Signal from ``time,value`` or ``value`` CSV rows.

    With ``rate`` (Hz) the file holds samples only, taken from ``column``
    (default: last). Without it the first column is time in seconds and the
    value comes from ``column`` (default: second). Non-uniform time stamps are
    linearly interpolated onto a uniform grid with the mean step, with a
    ``SignalFileWarning``.
    """
    path = Path(path)
    header, rows = _parse_rows(path)
    width = len(rows[0][1])
    for lineno, values in rows:
        if len(values) != width:
            raise InvalidInputError(f"{path}: row {lineno}: expected {width} columns, got {len(values)}")
    data = np.array([v for _, v in rows])
    lines = np.array([ln for ln, _ in rows])
    bad = ~np.isfinite(data)
    if bad.any():
        r = int(np.argmax(bad.any(axis=1)))
        raise InvalidInputError(f"{path}: row {lines[r]}: non-finite value")

    if rate is not None:
        if not (rate > 0 and math.isfinite(rate)):
            raise InvalidInputError(f"sample rate must be positive, got {rate}")
        col = _column_index(column if column is not None else -1, header, width)
        return Signal(data[:, col], 1.0 / rate)

    if width < 2:
        raise InvalidInputError(f"{path}: single-column file needs a sample rate")
    col = _column_index(column if column is not None else 1, header, width)
    t, v = data[:, 0], data[:, col]
    steps = np.diff(t)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        raise InvalidInputError(f"{path}: row {lines[bad[0] + 1]}: time not increasing")
    dt = (t[-1] - t[0]) / (t.size - 1)
    if np.max(np.abs(steps - dt)) > UNIFORM_RTOL * dt:
        warnings.warn(f"{path}: non-uniform time stamps resampled to dt={dt:g} s",
                      SignalFileWarning, stacklevel=2)
        v = np.interp(t[0] + dt * np.arange(t.size), t, v)
    return Signal(v, dt, float(t[0]))


def write_columns(path, header: Sequence[str], columns: Iterable[np.ndarray]) -> Path:
    """Write equally long numeric columns as CSV with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt=FLOAT_FORMAT)
    return path


def write_signal(path, signal: Signal, value_name: str = "value") -> Path:
    return write_columns(path, ("time_s", value_name), (signal.times, signal.samples))


def _beat_row(r: BeatRecord) -> list:
    inv = r.invariants
    return [r.beat_index, r.pi_ms, r.sbp, r.dbp, r.mbp, r.pp, r.lambda1_abs, r.lambda2_abs,
            inv.inv1_global, inv.inv1_systolic, inv.inv1_diastolic,
            inv.inv2_global, inv.inv2_systolic, inv.inv2_diastolic, r.chi_hat, r.n_chi]


def write_beats(path, records: Sequence[BeatRecord]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BEAT_COLUMNS)
        for r in records:
            w.writerow([v if isinstance(v, (int, np.integer)) else fmt(v) for v in _beat_row(r)])
    return path


@dataclass(frozen=True)
class BeatTable:
    """Per-beat CSV contents, one array per column."""

    columns: dict

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["beat"])

    def records(self) -> list[BeatRecord]:
        """Rebuild BeatRecords; fields the table does not carry are zero/default."""
        c = self.columns
        out = []
        for i in range(len(self)):
            inv = InvariantSet(c["inv1g"][i], c["inv1s"][i], c["inv1d"][i],
                               c["inv2g"][i], c["inv2s"][i], c["inv2d"][i],
                               math.nan, math.nan, math.nan, math.nan)
            out.append(BeatRecord(
                beat_index=int(c["beat"][i]), onset_time=math.nan, pi_ms=c["pi_ms"][i],
                sbp=c["sbp"][i], dbp=c["dbp"][i], mbp=c["mbp"][i], pp=c["pp"][i],
                lambda1_abs=c["lambda1"][i], lambda2_abs=c["lambda2"][i], invariants=inv,
                chi_hat=c["chi"][i], n_chi=int(c["n"][i]),
            ))
        return out


def read_beats(path) -> BeatTable:
    path = Path(path)
    header, rows = _parse_rows(path)
    if header is None or tuple(header[: len(BEAT_COLUMNS)]) != BEAT_COLUMNS:
        raise InvalidInputError(f"{path}: header must start with {','.join(BEAT_COLUMNS)}")
    for lineno, values in rows:
        if len(values) != len(header):
            raise InvalidInputError(f"{path}: row {lineno}: expected {len(header)} columns")
        if not all(math.isfinite(v) for v in values):
            raise InvalidInputError(f"{path}: row {lineno}: non-finite value")
    data = np.array([v for _, v in rows])
    cols = {name: data[:, j].copy() for j, name in enumerate(header)}
    for name in ("beat", "n"):
        cols[name] = cols[name].astype(np.int64)
    return BeatTable(cols)


# --- run configuration -----------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run depends on; loadable from an INI file.

    Sections and defaults::

        [chi]       mode = error_target, target_n = 7, mse_tolerance = 1e-3,
                    chi_min = 1e-2, chi_max = 1e6, growth = 1.05
        [beats]     n_s = 3, baseline = foot, threshold = 0.5,
                    refractory = 0.25, annotations = (none), workers = 1
        [output]    predictor = lambda1, directory = sbsa-out, seed = 0
    """

    chi: ChiSelectionConfig = field(default_factory=ChiSelectionConfig)
    n_s: int = 3
    baseline: str = "foot"
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    annotations: str | None = None
    workers: int = 1
    predictor: Predictor = Predictor.LAMBDA1
    output_dir: str = "sbsa-out"
    seed: int = 0

    @property
    def beat_config(self) -> BeatConfig:
        return BeatConfig(chi=self.chi, n_s=self.n_s, baseline=self.baseline)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["chi"]["mode"] = self.chi.mode.value
        d["predictor"] = Predictor(self.predictor).value
        return d


_CHI_KEYS = {f.name: f.type for f in fields(ChiSelectionConfig)}


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """RunConfig from an INI file (all keys optional) plus explicit overrides.

    ``overrides`` keys use ``section.key`` names, e.g. ``"chi.mode"``; None
    values are ignored.
    """
    cp = configparser.ConfigParser()
    if path is not None:
        path = Path(path)
        try:
            with path.open() as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        section, name = key.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, str(value.value if hasattr(value, "value") else value))

    unknown = set(cp.sections()) - {"chi", "beats", "output"}
    if unknown:
        raise InvalidInputError(f"unknown config section(s): {sorted(unknown)}")
    try:
        chi_kw = {}
        if cp.has_section("chi"):
            for k, v in cp.items("chi"):
                if k not in _CHI_KEYS:
                    raise InvalidInputError(f"unknown [chi] key {k!r}")
                chi_kw[k] = v if k == "mode" else (int(v) if k in ("target_n", "max_iterations") else float(v))
        b = cp["beats"] if cp.has_section("beats") else {}
        o = cp["output"] if cp.has_section("output") else {}
        seg = SegmentationConfig(
            threshold=float(b.get("threshold", SegmentationConfig.threshold)),
            refractory=float(b.get("refractory", SegmentationConfig.refractory)),
        )
        cfg = RunConfig(
            chi=ChiSelectionConfig(**chi_kw),
            n_s=int(b.get("n_s", 3)),
            baseline=str(b.get("baseline", "foot")),
            segmentation=seg,
            annotations=b.get("annotations") or None,
            workers=int(b.get("workers", 1)),
            predictor=Predictor(o.get("predictor", "lambda1")),
            output_dir=str(o.get("directory", "sbsa-out")),
            seed=int(o.get("seed", 0)),
        )
        cfg.beat_config  # validate n_s / baseline
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"bad configuration: {exc}") from exc
    if cfg.chi.mode is ChiMode.FIXED_COMPONENT_COUNT and cfg.n_s > cfg.chi.target_n:
        raise InvalidInputError("n_s cannot exceed target_n")
    return cfg


def versions() -> dict:
    import scipy

    from . import __version__
    out = {"sbsa": __version__, "python": platform.python_version(),
           "numpy": np.__version__, "scipy": scipy.__version__}
    try:
        import numba
        out["numba"] = numba.__version__
    except ImportError:  # pragma: no cover
        pass
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, Path):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def write_summary(path, command: str, config: dict, results: dict, files: Sequence = ()) -> Path:
    """JSON run summary: command, config echo, package versions, units, results."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "command": command,
        "config": config,
        "versions": versions(),
        "units": BEAT_UNITS,
        "results": results,
        "files": [Path(f).name for f in files],
    }
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path
