"""Command-line interface: ``cimstat {cim,deps,null,power,synth,network}``.

Exit codes: 0 success, 2 usage or configuration error, 3 data error.
Tabular outputs print 6 significant digits; JSON keeps full precision.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from fractions import Fraction

import click

from . import synth
from .cim import ScanConfig, compute_cim, region_count
from .data import Dataset, read_csv, write_csv
from .exceptions import CalibrationError, InvalidConfigError, InvalidInputError
from .inference import NullModel, calibrate_null, p_value
from .network import NullRegistry, monotonicity_census, mrnet, pairwise_matrix
from .power import min_n_for_power, power_table

EXIT_USAGE = 2
EXIT_DATA = 3


class DataError(click.ClickException):
    exit_code = EXIT_DATA


def _g(v) -> str:
    return f"{float(v):.6g}"


def _parse_fraction(text) -> float:
    try:
        return float(Fraction(str(text)))
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"not a number: {text!r}") from None


def _split(text, cast=str) -> list:
    if text is None:
        return []
    try:
        return [cast(t.strip()) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot parse list {text!r}") from None


def _config(msi, alpha) -> ScanConfig:
    try:
        return ScanConfig(msi=_parse_fraction(msi), alpha=float(alpha))
    except InvalidConfigError as e:
        raise click.UsageError(str(e)) from None


def _load(path, cols=None, drop_incomplete=False) -> Dataset:
    if path is None:
        raise click.UsageError("--input is required")
    if path != "-" and not os.path.exists(path):
        raise click.UsageError(f"input file not found: {path}")
    try:
        data = read_csv(sys.stdin if path == "-" else path, drop_incomplete)
    except InvalidInputError as e:
        raise DataError(str(e)) from None
    if cols:
        missing = [c for c in cols if c not in data.columns]
        if missing:
            raise click.UsageError(f"unknown column: {missing[0]!r}")
        data = data.select(cols)
    return data


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


_common_scan = [
    click.option("--msi", default="1/64", show_default=True, help="Minimum scanning increment (1/2^k)."),
    click.option("--alpha", default=0.2, show_default=True, type=float, help="Boundary-test level."),
]
_common_out = [
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True),
    click.option("--out", type=click.Path(dir_okay=True), default=None, help="Output path (default stdout)."),
]


def _apply(options):
    def deco(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return deco


@click.group()
@click.version_option("0.1.0", prog_name="cimstat")
def cli():
    """Copula index for detecting dependence and monotonicity."""


@cli.command("cim")
@click.option("--input", "input_path", help="CSV file with a header row ('-' for stdin).")
@click.option("--cols", help="Two column names, comma separated.")
@_apply(_common_scan + _common_out)
@click.option("--null", "null_path", type=click.Path(), help="Saved null model for a p-value.")
@click.option("--replicates", type=int, default=None, help="Calibrate a fresh null with this many replicates.")
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--drop-incomplete-rows", is_flag=True)
def cmd_cim(input_path, cols, msi, alpha, fmt, out, null_path, replicates, seed, jobs,
            drop_incomplete_rows):
    """Index, global tau_KL and detected regions for one column pair."""
    names = _split(cols)
    if len(names) != 2:
        raise click.UsageError("--cols needs exactly two column names")
    data = _load(input_path, names, drop_incomplete_rows)
    cfg = _config(msi, alpha)
    x, y = data[names[0]], data[names[1]]
    try:
        res = compute_cim(x, y, cfg)
    except InvalidInputError as e:
        raise DataError(str(e)) from None
    pv = None
    if null_path:
        with open(null_path) as fh:
            model = NullModel.from_json(fh.read())
        pv = p_value(model, res.value, cfg)
    elif replicates is not None:
        if seed is None:
            raise click.UsageError("--seed is required with --replicates")
        model = calibrate_null("cim", data.n_rows, replicates,
                               (data.kinds[names[0]], data.kinds[names[1]]), seed, cfg, jobs)
        pv = p_value(model, res.value, cfg)

    regions = [{
        "u_interval": list(r.u_interval), "v_interval": list(r.v_interval),
        "tau_kl": r.tau_kl, "sample_count": r.sample_count,
    } for r in res.regions if r.sample_count > 0]
    report = {
        "cim": res.value, "tau_kl": res.tau_kl, "n": res.n,
        "regions": region_count(res), "detected_regions": res.n_regions,
        "boundaries": res.boundaries(), "p_value": pv,
        "winning_si": res.winning_si, "winning_orientation": res.winning_orientation.value,
        "winning_split": res.winning_split, "region_detail": regions,
    }
    if fmt == "json":
        _emit(json.dumps(report, indent=2) + "\n", out)
        return
    rows = [[_g(rg["u_interval"][0]), _g(rg["u_interval"][1]), _g(rg["v_interval"][0]),
             _g(rg["v_interval"][1]), _g(rg["tau_kl"]), rg["sample_count"]] for rg in regions]
    head = _csv_text(["cim", "tau_kl", "n", "regions", "boundaries", "p_value",
                      "winning_si", "winning_orientation", "winning_split"],
                     [[_g(res.value), _g(res.tau_kl), res.n, report["regions"],
                       ";".join(f"{ax}:{_g(b)}" for ax, bs in report["boundaries"].items() for b in bs),
                       "" if pv is None else _g(pv), _g(res.winning_si),
                       res.winning_orientation.value, res.winning_split]])
    body = _csv_text(["u_lo", "u_hi", "v_lo", "v_hi", "tau_kl", "sample_count"], rows)
    _emit(head + "\n" + body, out)


@cli.command("deps")
@click.option("--input", "input_path")
@click.option("--cols", help="Subset of columns (default all).")
@_apply(_common_scan + _common_out)
@click.option("--strength-min", default=0.4, show_default=True, type=float)
@click.option("--sig-level", default=0.05, show_default=True, type=float)
@click.option("--replicates", default=500, show_default=True, type=int, help="Null replicates.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--bonferroni", is_flag=True, help="Divide --sig-level by the number of pairs.")
@click.option("--drop-incomplete-rows", is_flag=True)
def cmd_deps(input_path, cols, msi, alpha, fmt, out, strength_min, sig_level, replicates,
             seed, jobs, bonferroni, drop_incomplete_rows):
    """Pairwise dependence matrix and monotonicity census.

    With --out DIR, writes dependencies.csv, dependencies.json and census.json
    into DIR.
    """
    data = _load(input_path, _split(cols) or None, drop_incomplete_rows)
    if len(data.labels) < 2:
        raise click.UsageError("need >= 2 columns")
    if not (0 < sig_level < 1):
        raise click.UsageError("--sig-level must lie in (0, 1)")
    cfg = _config(msi, alpha)
    nulls = NullRegistry(replicates, seed, jobs)
    try:
        mat = pairwise_matrix(data, cfg, nulls)
    except InvalidInputError as e:
        raise DataError(str(e)) from None
    d = len(data.labels)
    level = sig_level / (d * (d - 1) / 2) if bonferroni else sig_level
    census = monotonicity_census(mat, strength_min, level).to_dict()
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "dependencies.csv"), "w") as fh:
            fh.write(mat.to_csv())
        with open(os.path.join(out, "dependencies.json"), "w") as fh:
            fh.write(mat.to_json(indent=2) + "\n")
        with open(os.path.join(out, "census.json"), "w") as fh:
            fh.write(json.dumps(census, indent=2) + "\n")
        return
    if fmt == "csv":
        click.echo(mat.to_csv(), nl=False)
        click.echo(json.dumps(census), err=True)
    else:
        click.echo(json.dumps({"matrix": mat.to_dict(), "census": census}, indent=2))


@cli.command("null")
@click.option("--statistic", type=click.Choice(["tau_kl", "cim"]), default="cim", show_default=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--replicates", "b", type=int, default=500, show_default=True)
@click.option("--kinds", default="continuous,continuous", show_default=True)
@click.option("--seed", type=int, required=True)
@_apply(_common_scan)
@click.option("--out", type=click.Path(), default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
def cmd_null(statistic, n, b, kinds, seed, msi, alpha, out, jobs):
    """Calibrate a null distribution and write it as JSON."""
    kk = _split(kinds)
    if len(kk) != 2 or any(k not in ("continuous", "discrete") for k in kk):
        raise click.UsageError("--kinds must be two of continuous/discrete")
    cfg = _config(msi, alpha)
    model = calibrate_null(statistic, n, b, tuple(kk), seed, cfg, jobs)
    _emit(model.to_json() + "\n", out)


@cli.command("power")
@click.option("--patterns", default=",".join(p.value for p in synth.Pattern if p is not synth.Pattern.INDEPENDENT),
              show_default=True)
@click.option("--noise", default="0,0.25,0.5,1", show_default=True, help="Noise grid.")
@click.option("--noise-mode", type=click.Choice(["index", "sd"]), default="index", show_default=True)
@click.option("--n", "n_grid", default="100,500", show_default=True, help="Sample-size grid.")
@click.option("--replicates", type=int, default=500, show_default=True)
@click.option("--null-replicates", type=int, default=500, show_default=True)
@click.option("--target-power", type=float, default=0.8, show_default=True)
@click.option("--sig-level", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, required=True)
@_apply(_common_scan)
@click.option("--out", type=click.Path(), default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
def cmd_power(patterns, noise, noise_mode, n_grid, replicates, null_replicates, target_power,
              sig_level, seed, msi, alpha, out, jobs):
    """Power table of the level-alpha index test."""
    cfg = _config(msi, alpha)
    pats = _split(patterns)
    for p in pats:
        try:
            synth.Pattern(p)
        except ValueError:
            raise click.UsageError(f"unknown pattern {p!r}") from None
    rows = power_table(pats, _split(noise, float), _split(n_grid, int), replicates, seed,
                       sig_level, noise_mode, cfg, null_replicates, jobs=jobs)
    best = min_n_for_power(rows, target_power)
    table = [[r.pattern, _g(r.noise), _g(r.noise_sd), r.n, _g(r.power), _g(r.threshold),
              "" if best[(r.pattern, r.noise)] is None else best[(r.pattern, r.noise)]]
             for r in rows]
    _emit(_csv_text(["pattern", "noise", "noise_sd", "n", "power", "threshold",
                     "min_n_for_target"], table), out)


@cli.command("synth")
@click.argument("kind", type=click.Choice(["pattern", "parabola", "copula", "chain"]))
@click.option("--pattern", default="linear", show_default=True)
@click.option("--n", "n", type=int, default=1000, show_default=True)
@click.option("--noise-sd", type=float, default=0.0, show_default=True)
@click.option("--noise-index", type=float, default=None, help="Noise as a multiple of the signal range.")
@click.option("--r", "r", type=float, default=0.5, show_default=True, help="Parabola vertex.")
@click.option("--family", default="gaussian", show_default=True)
@click.option("--tau", type=float, default=0.5, show_default=True)
@click.option("--margins", default="continuous,continuous", show_default=True,
              help="Two of continuous / discrete:L.")
@click.option("--n-vars", type=int, default=4, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
def cmd_synth(kind, pattern, n, noise_sd, noise_index, r, family, tau, margins, n_vars, seed, out):
    """Generate a synthetic CSV dataset."""
    if kind == "pattern":
        sd = synth.noise_sd_from_index(pattern, noise_index) if noise_index is not None else noise_sd
        s = synth.gen_pattern(synth.PatternSpec(pattern, n, sd, seed))
        cols = {"x": s.xs, "y": s.ys}
    elif kind == "parabola":
        s = synth.gen_parabola(r, noise_sd, n, seed)
        cols = {"x": s.xs, "y": s.ys}
    elif kind == "copula":
        ms = _split(margins)
        if len(ms) != 2:
            raise click.UsageError("--margins needs two entries")
        s = synth.sample_copula(synth.CopulaSpec(family, tau, n, tuple(ms), seed))
        cols = {"x": s.xs, "y": s.ys}
    else:
        cols = synth.gen_markov_chain(n_vars, n, tau, seed).columns
    _emit(write_csv(cols), out)


@cli.command("network")
@click.option("--input", "input_path")
@click.option("--cols", help="Subset of columns (default all).")
@_apply(_common_scan + _common_out)
@click.option("--threshold", type=float, default=0.0, show_default=True, help="Minimum edge score.")
@click.option("--sig-level", type=float, default=None,
              help="Drop edges whose pair p-value is not below this level.")
@click.option("--replicates", default=500, show_default=True, type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--drop-incomplete-rows", is_flag=True)
def cmd_network(input_path, cols, msi, alpha, fmt, out, threshold, sig_level, replicates,
                seed, jobs, drop_incomplete_rows):
    """MRNET reconstruction from the pairwise index matrix."""
    data = _load(input_path, _split(cols) or None, drop_incomplete_rows)
    if len(data.labels) < 3:
        raise click.UsageError("need >= 3 columns")
    cfg = _config(msi, alpha)
    try:
        mat = pairwise_matrix(data, cfg, NullRegistry(replicates, seed, jobs))
    except InvalidInputError as e:
        raise DataError(str(e)) from None
    net = mrnet(mat, threshold)
    if sig_level is not None:
        net.edges = [e for e in net.edges if mat.p_values[e[0], e[1]] < sig_level]
    _emit(net.to_csv() if fmt == "csv" else net.to_json(indent=2) + "\n", out)


def main(argv=None):
    """Console entry point; maps library errors onto the exit-code contract."""
    try:
        rv = cli.main(args=argv, prog_name="cimstat", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except (InvalidConfigError, CalibrationError) as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_USAGE
    except (InvalidInputError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_DATA
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
