"""Command-line entry point: ``sbsa <command> ...``.

Every command writes its CSV/JSON outputs into ``--out`` (default from the
config, ``sbsa-out``) and prints a short human-readable report. Exit codes:
0 success, 2 bad input, 3 numeric failure, 4 insufficient data.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .errors import InsufficientDataError, InvalidInputError, SbsaError
from .invariants import invariant_set
from .pipeline import (
    PI_PLAUSIBLE_MS,
    Predictor,
    analyze_recording,
    brs_pairs,
    segment_beats,
)
from .signal import Signal
from .spectral import decompose
from .stats import linear_regression, significance_stars, summarize, wilcoxon_signed_rank
from .synthetic import bundled_recording_path, coupled_recording
from .transform import (
    SbsaResult,
    auto_norming_constants,
    reconstruct,
    relative_mse,
    select_chi,
    soliton_component,
    split_phases,
    synthesize_reflectionless,
)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser, signal_input: bool = True) -> None:
    p.add_argument("--config", help="INI run configuration")
    p.add_argument("-o", "--out", help="output directory (default from config)")
    if signal_input:
        p.add_argument("input", help="CSV signal: time,value rows or value rows with --rate")
        p.add_argument("--column", help="value column (index or header name)")
        p.add_argument("--rate", type=float, help="sample rate in Hz for value-only files")


def _add_chi(p: argparse.ArgumentParser, fixed: bool = True) -> None:
    g = p.add_argument_group("chi selection")
    if fixed:
        g.add_argument("--chi", type=float, help="use this chi instead of searching")
    g.add_argument("--mode", choices=["fixed_count", "error_target"])
    g.add_argument("--target-n", type=int)
    g.add_argument("--mse-tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sbsa", description="Soliton decomposition, spectral invariants and beat-to-beat indices.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="bound states of a signal")
    _add_common(p)
    _add_chi(p)

    p = sub.add_parser("reconstruct", help="soliton reconstruction and phase split")
    _add_common(p)
    _add_chi(p)
    p.add_argument("--n-s", type=int, help="number of fast (systolic) components")

    p = sub.add_parser("invariants", help="spectral invariants vs direct integrals")
    _add_common(p)
    _add_chi(p)
    p.add_argument("--n-s", type=int)

    p = sub.add_parser("pipeline", help="beat-to-beat analysis of a pressure recording")
    _add_common(p, signal_input=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("input", nargs="?", help="CSV pressure recording")
    src.add_argument("--synthetic", action="store_true", help="use the bundled synthetic recording")
    p.add_argument("--column")
    p.add_argument("--rate", type=float)
    p.add_argument("--annotations", help="file of beat-onset sample indices, one per line")
    p.add_argument("--workers", type=int)
    p.add_argument("--n-s", type=int)
    p.add_argument("--baseline", choices=["foot", "none"])
    _add_chi(p, fixed=False)

    p = sub.add_parser("brs", help="regress next-beat PI on a beat index")
    _add_common(p, signal_input=False)
    p.add_argument("beats", help="per-beat CSV written by 'pipeline'")
    p.add_argument("--predictor", choices=[x.value for x in Predictor] + ["all"])

    p = sub.add_parser("compare", help="paired before/after comparison of per-beat tables")
    _add_common(p, signal_input=False)
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)

    p = sub.add_parser("synth", help="write a synthetic signal")
    _add_common(p, signal_input=False)
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--kappas", type=_floats, help="descending kappas of a reflectionless profile")
    kind.add_argument("--abp", action="store_true", help="baroreflex-coupled pressure recording")
    p.add_argument("--norming", default="auto", help="'auto' or comma-separated norming constants")
    p.add_argument("--t-min", type=float, default=-15.0)
    p.add_argument("--t-max", type=float, default=15.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--duration", type=float, default=300.0, help="seconds (with --abp)")
    p.add_argument("--fs", type=float, default=250.0, help="Hz (with --abp)")
    p.add_argument("--seed", type=int)
    return ap


def _config(args) -> io.RunConfig:
    over = {
        "chi.mode": getattr(args, "mode", None),
        "chi.target_n": getattr(args, "target_n", None),
        "chi.mse_tolerance": getattr(args, "mse_tol", None),
        "beats.n_s": getattr(args, "n_s", None),
        "beats.baseline": getattr(args, "baseline", None),
        "beats.annotations": getattr(args, "annotations", None),
        "beats.workers": getattr(args, "workers", None),
        "output.directory": getattr(args, "out", None),
        "output.seed": getattr(args, "seed", None),
    }
    if getattr(args, "predictor", None) not in (None, "all"):
        over["output.predictor"] = args.predictor
    return io.load_config(args.config, over)


def _load(args) -> Signal:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", io.SignalFileWarning)
        sig = io.load_signal(args.input, args.column, args.rate)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return sig


def _analyze(args, cfg: io.RunConfig, sig: Signal) -> SbsaResult:
    if args.chi is not None:
        d = decompose(sig, args.chi)
        rec = reconstruct(d)
        return SbsaResult(d, args.chi, rec, relative_mse(sig, rec))
    return select_chi(sig, cfg.chi)


def _spectrum_report(res: SbsaResult) -> list[str]:
    d = res.decomposition
    lines = [f"chi = {res.chi_hat:.6g}   N = {d.n}   relative MSE = {res.relative_mse:.3e}"]
    lines += [f"  kappa_{i + 1} = {k:.6f}   lambda_{i + 1} = {-k * k:.6f}" for i, k in enumerate(d.kappas)]
    return lines


def cmd_decompose(args, cfg, out: Path) -> dict:
    sig = _load(args)
    res = _analyze(args, cfg, sig)
    d = res.decomposition
    idx = np.arange(1, d.n + 1)
    files = [
        io.write_columns(out / "spectrum.csv", ("n", "kappa", "lambda"), (idx, d.kappas, d.eigenvalues)),
        io.write_columns(out / "eigenfunctions.csv", ["time_s"] + [f"psi{i}" for i in idx],
                         [d.times] + list(d.eigenfunctions)),
    ]
    print("\n".join(_spectrum_report(res)))
    return {"chi": res.chi_hat, "n": d.n, "kappas": d.kappas.tolist(),
            "relative_mse": res.relative_mse, "converged": res.converged}, files


def _n_s(args, cfg, n: int) -> int:
    if args.n_s is not None and not 0 <= args.n_s <= n:
        raise InvalidInputError(f"--n-s {args.n_s} outside 0..{n}")
    return min(cfg.n_s, n)


def cmd_reconstruct(args, cfg, out: Path) -> dict:
    sig = _load(args)
    res = _analyze(args, cfg, sig)
    d = res.decomposition
    split = split_phases(d, _n_s(args, cfg, d.n))
    files = [
        io.write_signal(out / "measured.csv", sig),
        io.write_signal(out / "reconstructed.csv", res.reconstruction),
        io.write_signal(out / "systolic.csv", split.systolic),
        io.write_signal(out / "diastolic.csv", split.diastolic),
    ]
    files += [io.write_signal(out / f"component_{n:02d}.csv", soliton_component(d, n))
              for n in range(1, d.n + 1)]
    print("\n".join(_spectrum_report(res)))
    print(f"n_s = {split.n_s}")
    return {"chi": res.chi_hat, "n": d.n, "n_s": split.n_s,
            "relative_mse": res.relative_mse}, files


def cmd_invariants(args, cfg, out: Path) -> dict:
    sig = _load(args)
    res = _analyze(args, cfg, sig)
    d = res.decomposition
    inv = invariant_set(d, sig, _n_s(args, cfg, d.n))
    table = {
        "INV1": (inv.inv1_global, inv.inv1_systolic, inv.inv1_diastolic, inv.direct_inv1, inv.residual1),
        "INV2": (inv.inv2_global, inv.inv2_systolic, inv.inv2_diastolic, inv.direct_inv2, inv.residual2),
    }
    path = out / "invariants.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write("invariant,global,systolic,diastolic,direct,residual\n")
        for name, vals in table.items():
            fh.write(name + "," + ",".join(io.fmt(v) for v in vals) + "\n")
    print(f"chi = {res.chi_hat:.6g}   N = {d.n}   n_s = {inv.n_s}")
    print(f"{'':6}{'global':>14}{'systolic':>14}{'diastolic':>14}{'direct':>14}{'residual':>14}")
    for name, vals in table.items():
        print(f"{name:6}" + "".join(f"{v:14.6g}" for v in vals))
    return {"chi": res.chi_hat, "n": d.n, "n_s": inv.n_s,
            **{k: dict(zip(("global", "systolic", "diastolic", "direct", "residual"), v))
               for k, v in table.items()}}, [path]


def _annotations(path) -> list[int]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read annotations {path}: {exc}") from exc
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#")[0].strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise InvalidInputError(f"{path}: row {lineno}: not a sample index: {line!r}") from None
    return out


SERIES = ("pi_ms", "sbp", "dbp", "mbp", "pp", "lambda1", "lambda2",
          "inv1g", "inv1s", "inv1d", "inv2g", "inv2s", "inv2d")


def cmd_pipeline(args, cfg, out: Path) -> dict:
    if args.synthetic:
        sig = io.load_signal(bundled_recording_path())
        source = "bundled synthetic recording"
    else:
        sig = _load(args)
        source = str(args.input)
    ann = _annotations(cfg.annotations) if cfg.annotations else None
    windows = segment_beats(sig, cfg.segmentation, ann)
    records = analyze_recording(sig, windows, cfg.beat_config, cfg.workers)
    beats = io.write_beats(out / "beats.csv", records)
    table = io.read_beats(beats)
    onset = np.array([r.onset_time for r in records])
    files = [beats]
    files += [io.write_columns(out / f"series_{name}.csv", ("time_s", name), (onset, table[name]))
              for name in SERIES]
    n = np.array([r.n_chi for r in records])
    flagged = [r.beat_index for r in records if r.flagged]
    unconverged = [r.beat_index for r in records if not r.converged]
    print(f"{source}: {len(records)} beats, N range {n.min()}..{n.max()}, median {np.median(n):g}")
    if flagged:
        print(f"warning: {len(flagged)} beat(s) with PI outside {PI_PLAUSIBLE_MS} ms: {flagged[:10]}",
              file=sys.stderr)
    if unconverged:
        print(f"warning: {len(unconverged)} beat(s) did not reach the MSE target", file=sys.stderr)
    counts = {int(k): int(v) for k, v in zip(*np.unique(n, return_counts=True))}
    return {"source": source, "beats": len(records), "component_counts": counts,
            "flagged_beats": flagged, "unconverged_beats": unconverged}, files


def cmd_brs(args, cfg, out: Path) -> dict:
    records = io.read_beats(args.beats).records()
    which = list(Predictor) if args.predictor == "all" else [Predictor(cfg.predictor)]
    results, files = {}, []
    print(f"{'predictor':10}{'slope':>14}{'intercept':>14}{'R^2':>10}{'n':>6}")
    for p in which:
        pairs = brs_pairs(records, p)
        fit = linear_regression(pairs)
        x = np.array([q.x for q in pairs])
        y = np.array([q.y for q in pairs])
        files.append(io.write_columns(out / f"scatter_{p.value}.csv", (p.value, "next_pi_ms"), (x, y)))
        xs = np.array([x.min(), x.max()])
        files.append(io.write_columns(out / f"fit_{p.value}.csv", (p.value, "fitted_pi_ms"),
                                      (xs, fit.intercept + fit.slope * xs)))
        results[p.value] = {"slope": fit.slope, "intercept": fit.intercept,
                            "r_squared": fit.r_squared, "n": fit.n, "slope_stderr": fit.slope_stderr}
        print(f"{p.value:10}{fit.slope:14.6g}{fit.intercept:14.6g}{fit.r_squared:10.4f}{fit.n:6d}")
    return results, files


def cmd_compare(args, cfg, out: Path) -> dict:
    a, b = io.read_beats(args.before), io.read_beats(args.after)
    m = min(len(a), len(b))
    if len(a) != len(b):
        print(f"warning: {len(a)} vs {len(b)} rows; pairing the first {m}", file=sys.stderr)
    results, rows = {}, []
    print(f"{'column':9}{'before':>22}{'after':>22}{'p':>12}  sig")
    for col in io.BEAT_COLUMNS:
        if col == "beat":
            continue
        x, y = a[col][:m], b[col][:m]
        sa, sb = summarize(x), summarize(y)
        try:
            t = wilcoxon_signed_rank(x, y)
            p, stat, stars = t.p_value, t.statistic, significance_stars(t.p_value)
        except InsufficientDataError:
            p, stat, stars = float("nan"), float("nan"), "NA"
        results[col] = {"before": str(sa), "after": str(sb), "p": p, "stars": stars}
        rows.append((col, sa.mean, sa.sem, sb.mean, sb.sem, stat, p, stars))
        print(f"{col:9}{str(sa):>22}{str(sb):>22}{p:12.4g}  {stars}")
    path = out / "compare.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write("column,before_mean,before_sem,after_mean,after_sem,statistic,p_value,stars\n")
        for col, *vals, stars in rows:
            fh.write(col + "," + ",".join(io.fmt(v) for v in vals) + f",{stars}\n")
    return results, [path]


def cmd_synth(args, cfg, out: Path) -> dict:
    if args.abp:
        rec = coupled_recording(duration=args.duration, fs=args.fs, seed=cfg.seed)
        path = io.write_signal(out / "abp.csv", rec.signal, "pressure_mmHg")
        onsets = out / "onsets.txt"
        onsets.write_text("".join(f"{int(i)}\n" for i in rec.onsets))
        print(f"{len(rec.lambda1)} beats, {len(rec.signal) / args.fs:g} s -> {path}")
        return {"beats": len(rec.lambda1), "slope": rec.slope, "intercept": rec.intercept,
                "seed": cfg.seed}, [path, onsets]
    kappas = np.asarray(args.kappas)
    if args.norming == "auto":
        c = auto_norming_constants(kappas)
    else:
        c = np.asarray(_floats(args.norming))
    if not args.t_max > args.t_min or not args.dt > 0:
        raise InvalidInputError("need t-max > t-min and dt > 0")
    t = args.t_min + args.dt * np.arange(int(round((args.t_max - args.t_min) / args.dt)) + 1)
    sig = synthesize_reflectionless(kappas, c, t)
    path = io.write_signal(out / "synth.csv", sig)
    print(f"reflectionless profile, kappas {kappas.tolist()} -> {path}")
    return {"kappas": kappas.tolist(), "norming": c.tolist()}, [path]


COMMANDS = {
    "decompose": cmd_decompose,
    "reconstruct": cmd_reconstruct,
    "invariants": cmd_invariants,
    "pipeline": cmd_pipeline,
    "brs": cmd_brs,
    "compare": cmd_compare,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        out = Path(cfg.output_dir)
        results, files = COMMANDS[args.command](args, cfg, out)
        io.write_summary(out / f"{args.command}.json", args.command, cfg.to_dict(), results, files)
    except SbsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
