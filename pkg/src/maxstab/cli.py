"""Command-line front end.

Sub-commands: ``simulate``, ``diagnose``, ``eta`` and ``ppplot``. Options may
come from a JSON file (``--config``); flags given on the command line win.
Every CSV written carries a ``# config=...`` line echoing the resolved
options (output paths and thread count excluded) so reruns are byte-identical.
"""
import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import Scale, SiteGrid
from .diagnostic import run_diagnostic, sample_subsets
from .errors import DataError, MaxStabError
from .io import fmt, load_dataset, save_coords, save_dataset
from .margins import empirical_to_gumbel, frechet_to_gumbel
from .simulate import SimConfig, simulate
from .svg import difference_plot
from .taildep import SENSITIVITY_FRACTIONS, EtaEstimate, eta_for_subsets

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULTS = {
    "simulate": dict(model=None, n_rep=1000, seed=0, alpha=0.7, lam=1 / 0.7,
                     corr_param="range", grid="10x10", spacing=1.0,
                     omega=[1.0, 0.0, 0.0, 1.0], buffer=None, out=None),
    "diagnose": dict(data=None, coords=None, k="2,3,4,m", subsets=500, boot=250,
                     level=0.95, seed=0, max_diameter=None, svg=False, out=None),
    "eta": dict(data=None, coords=None, k="2", subsets=500, tail_fraction=0.1,
                seed=0, max_diameter=None, out=None),
    "ppplot": dict(curve=None, out=None),
}
REQUIRED = {
    "simulate": ("model", "out"),
    "diagnose": ("data", "out"),
    "eta": ("data", "out"),
    "ppplot": ("curve", "out"),
}
# not echoed: they do not change any numbers
_NOT_ECHOED = {"out", "threads", "config"}


class UsageError(MaxStabError):
    exit_code = EXIT_USAGE


def _floats(text):
    return [float(v) for v in str(text).split(",")]


def build_parser():
    parser = argparse.ArgumentParser(prog="maxstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", default=S, help="JSON file of options")
        p.add_argument("--threads", type=int, default=S)
        p.add_argument("--out", default=S)

    p = sub.add_parser("simulate", help="simulate a benchmark dataset")
    common(p)
    p.add_argument("--model", choices=["smith", "logistic", "gauss"], default=S)
    p.add_argument("--n-rep", dest="n_rep", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--lambda", dest="lam", type=float, default=S)
    p.add_argument("--corr-param", dest="corr_param", choices=["rate", "range"], default=S)
    p.add_argument("--grid", default=S, help="WxH sites, e.g. 10x10")
    p.add_argument("--spacing", type=float, default=S)
    p.add_argument("--omega", type=_floats, default=S, help="a,b,c,d row-major 2x2")
    p.add_argument("--buffer", type=float, default=S)

    for name, text in (("diagnose", "run the max-stability P-P diagnostic"),
                       ("eta", "estimate tail-dependence coefficients")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--data", default=S)
        p.add_argument("--coords", default=S)
        p.add_argument("--k", default=S, help="comma list; 'm' means all sites")
        p.add_argument("--subsets", type=int, default=S)
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--max-diameter", dest="max_diameter", type=float, default=S)
        if name == "diagnose":
            p.add_argument("--boot", type=int, default=S)
            p.add_argument("--level", type=float, default=S)
            p.add_argument("--svg", action="store_true", default=S)
        else:
            p.add_argument("--tail-fraction", dest="tail_fraction", type=float, default=S)

    p = sub.add_parser("ppplot", help="draw a difference-curve CSV as SVG")
    p.add_argument("--config", default=S)
    p.add_argument("--curve", default=S)
    p.add_argument("--out", default=S)
    return parser


def resolve(command, flags):
    """Merge defaults, the config file and command-line flags (in that order)."""
    opts = dict(DEFAULTS[command])
    opts["threads"] = 1
    if "config" in flags:
        try:
            cfg = json.loads(Path(flags["config"]).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        if isinstance(cfg.get(command), dict):
            section = cfg[command]
            unknown = set(section) - set(opts)
            if unknown:
                raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
        else:
            section = {k: v for k, v in cfg.items() if k in opts}
        opts.update(section)
    opts.update({k: v for k, v in flags.items() if k != "config"})
    missing = [k for k in REQUIRED[command] if opts.get(k) is None]
    if missing:
        raise UsageError(f"{command}: missing required option(s) {missing}")
    return opts


def config_echo(command, opts):
    echo = {k: v for k, v in opts.items() if k not in _NOT_ECHOED}
    echo["command"] = command
    return json.dumps(echo, sort_keys=True, separators=(",", ":"))


def _csv_text(echo, header, rows):
    buf = io.StringIO()
    buf.write(f"# config={echo}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def parse_k_list(spec, m):
    items = spec if isinstance(spec, list) else str(spec).split(",")
    out = []
    for item in items:
        item = str(item).strip()
        try:
            k = m if item == "m" else int(item)
        except ValueError:
            raise UsageError(f"bad k value {item!r}") from None
        if not 1 <= k <= m:
            raise UsageError(f"k={k} outside 1..{m}")
        out.append(k)
    return out


def _parse_grid(text):
    try:
        w, h = (int(v) for v in str(text).lower().split("x"))
    except ValueError:
        raise UsageError(f"grid must look like WxH, got {text!r}") from None
    return w, h


def cmd_simulate(opts):
    nx, ny = _parse_grid(opts["grid"])
    grid = SiteGrid.regular(nx, ny, spacing=float(opts["spacing"]))
    omega = np.asarray(opts["omega"], dtype=float)
    if omega.size != 4:
        raise UsageError("omega needs 4 entries")
    config = SimConfig(opts["model"], n_rep=opts["n_rep"], seed=opts["seed"],
                       alpha=opts["alpha"], omega=omega.reshape(2, 2), lam=opts["lam"],
                       corr_param=opts["corr_param"], buffer=opts["buffer"])
    matrix = simulate(config, grid, n_jobs=opts["threads"])
    echo = config_echo("simulate", opts)
    out = Path(opts["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(matrix, out, comments=[f"seed={opts['seed']}", f"config={echo}"])
    save_coords(grid, matrix.site_ids, out.with_suffix(".coords.csv"))
    return {"out": str(out)}


def _load_gumbel(opts):
    if opts.get("max_diameter") is not None and opts.get("coords") is None:
        raise UsageError("--max-diameter needs a coordinates file (--coords)")
    try:
        matrix = load_dataset(opts["data"], opts.get("coords"))
    except OSError as exc:
        raise DataError(f"cannot read input: {exc}") from None
    if matrix.scale is Scale.RAW:
        matrix = empirical_to_gumbel(matrix)
    elif matrix.scale is Scale.FRECHET:
        matrix = type(matrix)(frechet_to_gumbel(matrix.values), Scale.GUMBEL,
                              matrix.grid, matrix.site_ids)
    return matrix


def _subset_label(matrix, subset):
    return ";".join(matrix.site_ids[j] for j in subset)


def cmd_diagnose(opts):
    matrix = _load_gumbel(opts)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    echo = config_echo("diagnose", opts)
    summary = {"config": json.loads(echo), "seed": opts["seed"], "results": {}}
    for k in parse_k_list(opts["k"], matrix.m):
        res = run_diagnostic(matrix, k, opts["subsets"], opts["boot"], opts["level"],
                             opts["seed"], opts["max_diameter"], n_jobs=opts["threads"])
        c = res.curve
        rows = [[fmt(a), fmt(b), fmt(lo), fmt(hi)]
                for a, b, lo, hi in zip(c.p_grid, c.diff, c.band_lo, c.band_hi)]
        (out / f"ppcurve_k{k}.csv").write_text(_csv_text(echo, ["p", "diff", "lo", "hi"], rows))
        rows = [[_subset_label(matrix, s.subset), fmt(s.mu.mu_hat), int(s.clamped)]
                for s in res.per_subset]
        (out / f"subsets_k{k}.csv").write_text(
            _csv_text(echo, ["subset", "mu_hat", "clamped"], rows))
        if opts["svg"]:
            (out / f"figure_k{k}.svg").write_text(
                difference_plot(c.p_grid, c.diff, c.band_lo, c.band_hi, f"|D| = {k}"))
        summary["results"][str(k)] = {
            "reject": res.reject,
            "max_abs_diff": res.max_abs_diff,
            "clamped_fraction": res.clamped_fraction,
            "coverage": res.coverage,
            "n_subsets": len(res.family),
            "family_exhausted": res.family.exhausted,
            "n_pooled": c.n_pooled,
        }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


_ETA_HEADER = ["subset", "eta", "se", "ci_lo", "ci_hi", "n_exceed"]


def _eta_row(matrix, est):
    label = _subset_label(matrix, est.subset)
    if isinstance(est, EtaEstimate):
        return [label, fmt(est.eta), fmt(est.se), fmt(est.ci_lo), fmt(est.ci_hi), est.n_exceed]
    return [label, "nan", "nan", "nan", "nan", 0]


def cmd_eta(opts):
    matrix = _load_gumbel(opts)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    echo = config_echo("eta", opts)
    fractions = sorted({float(opts["tail_fraction"]), *SENSITIVITY_FRACTIONS})
    main_rows, sens_rows = [], []
    summary = {"config": json.loads(echo), "seed": opts["seed"], "results": {}, "failures": []}
    for k in parse_k_list(opts["k"], matrix.m):
        family = sample_subsets(matrix.m, k, opts["subsets"], opts["seed"],
                                opts["max_diameter"], matrix.grid)
        per_k = {}
        for frac in fractions:
            ests = eta_for_subsets(matrix, family, frac)
            ok = [e.eta for e in ests if isinstance(e, EtaEstimate)]
            per_k[fmt(frac)] = {"median_eta": float(np.median(ok)) if ok else None,
                                "n_ok": len(ok), "n_failed": len(ests) - len(ok)}
            sens_rows += [[fmt(frac)] + _eta_row(matrix, e) for e in ests]
            if frac == float(opts["tail_fraction"]):
                main_rows += [_eta_row(matrix, e) for e in ests]
                summary["failures"] += [{"subset": _subset_label(matrix, e.subset),
                                         "reason": e.reason}
                                        for e in ests if not isinstance(e, EtaEstimate)]
        summary["results"][str(k)] = per_k
    (out / "eta.csv").write_text(_csv_text(echo, _ETA_HEADER, main_rows))
    (out / "eta_sensitivity.csv").write_text(
        _csv_text(echo, ["tail_fraction"] + _ETA_HEADER, sens_rows))
    (out / "eta_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def read_curve(path):
    """Read a difference-curve CSV; ``lo``/``hi`` columns are optional."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"p", "diff"} <= set(reader.fieldnames):
        raise DataError("curve file needs columns p and diff")
    p, diff, lo, hi = [], [], [], []
    for lineno, row in enumerate(reader, start=2):
        try:
            p.append(float(row["p"]))
            diff.append(float(row["diff"]))
            lo.append(float(row.get("lo") or "nan"))
            hi.append(float(row.get("hi") or "nan"))
        except (TypeError, ValueError):
            raise DataError("non-numeric cell", lineno) from None
    lo, hi = np.array(lo), np.array(hi)
    has_band = bool(np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)))
    return np.array(p), np.array(diff), (lo if has_band else None), (hi if has_band else None)


def cmd_ppplot(opts):
    try:
        p, diff, lo, hi = read_curve(opts["curve"])
    except OSError as exc:
        raise DataError(f"cannot read curve: {exc}") from None
    if p.size == 0:
        raise DataError("curve file has no rows")
    Path(opts["out"]).write_text(difference_plot(p, diff, lo, hi, Path(opts["curve"]).stem))
    return {"out": opts["out"]}


COMMANDS = {"simulate": cmd_simulate, "diagnose": cmd_diagnose, "eta": cmd_eta,
            "ppplot": cmd_ppplot}


def _error_record(exc, code):
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    try:
        opts = resolve(args.command, flags)
        COMMANDS[args.command](opts)
    except MaxStabError as exc:
        return _error_record(exc, exc.exit_code)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        return _error_record(exc, EXIT_NUMERIC)
    except (TypeError, ValueError, KeyError) as exc:
        # malformed option values from a config file
        return _error_record(exc, EXIT_USAGE)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
