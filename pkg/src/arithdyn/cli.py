"""Command-line front end.

Coefficients are given low to high degree, comma separated:
    arithdyn crit --map "-25/9,0,1"
    arithdyn preperiodic --map "-29/16,0,1"
    arithdyn abcd --quad 0,1,3,4 --m 1

Exit codes: 0 success, 2 precondition or parse error, 3 undetermined verdict
under --strict.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from fractions import Fraction
from pathlib import Path

import click
import jsonschema

from . import __version__
from .abcd import build_abcd_point, find_split_quadruples, quality_report
from .berkovich import Disk, DiskUnionKernel, capacity_union, enumerate_components
from .config import ConfigError, RunConfig, load_schema
from .dynamics import PolyMap, _split_top_level, classify_orbit, enumerate_preperiodic
from .equidist import component_stats, equidist_verdict, global_report, k_vector
from .fields import MODE_Q, FieldError, Place, element_to_str, parse_element
from .local import DEFAULT_CAP, DEFAULT_TOL, canonical_height_report, critical_report

EXIT_PRECONDITION = 2
EXIT_UNDETERMINED = 3

CONVENTIONS = {
    "log_units": "formal parts are rational multiples of log p (Q) or of deg(pi) (Q(t) places)",
    "pluecker_identity": "(a-c)(b-d) = (a-b)(c-d) + (a-d)(b-c)",
    "pairs": "ordered, both orientations, diagonal excluded",
    "k_vector": "k_i = |T cap B_i| / (|T| d_i)",
}


class Precondition(click.ClickException):
    exit_code = EXIT_PRECONDITION


# ---------------------------------------------------------------------------
# shared options and output


def common_options(fn):
    opts = [
        click.option("--map", "map_", help="Coefficients a_0,...,a_d (exact rationals)."),
        click.option("--mode", type=click.Choice(["Q", "Q(t)"]), help="Base field."),
        click.option("--eps", help="epsilon (exact rational)."),
        click.option("--delta", help="delta for the slice test (exact rational)."),
        click.option("--level", type=int, help="Component level m."),
        click.option("--tol", type=float, help="Target width of archimedean enclosures."),
        click.option("--cap", type=int, help="Iteration cap."),
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML run config."),
        click.option("--out", help="Write the JSON report here."),
        click.option("--csv", "csv_path", help="Write CSV rows here."),
        click.option("--strict", is_flag=True, help="Exit 3 on undetermined verdicts."),
        click.option("--json", "as_json", is_flag=True, help="Print JSON instead of a table."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _rat(s, name):
    if s is None:
        return None
    try:
        return Fraction(str(s).replace(" ", ""))
    except (ValueError, ZeroDivisionError) as exc:
        raise Precondition(f"--{name}: not an exact rational: {s!r}") from exc


def resolve(config_path, map_, mode, eps, delta, level, tol, cap, out, csv_path, strict, **extra) -> RunConfig:
    cfg = RunConfig.load(config_path) if config_path else RunConfig()
    return cfg.merged(
        map=map_,
        mode=mode,
        eps=_rat(eps, "eps"),
        delta=_rat(delta, "delta"),
        level=level,
        tol=tol,
        cap=cap,
        out=out,
        csv=csv_path,
        strict=strict,
        **extra,
    )


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            raise Precondition(f"config {exc}") from exc
        except (FieldError, ValueError, ArithmeticError, KeyError) as exc:
            raise Precondition(str(exc)) from exc

    return wrapper


def need_map(cfg: RunConfig) -> PolyMap:
    if not cfg.map:
        raise Precondition("--map is required")
    try:
        return PolyMap.parse(cfg.map, cfg.mode)
    except (ValueError, ZeroDivisionError) as exc:
        raise Precondition(f"--map: {exc}") from exc


def parse_points(cfg: RunConfig, f: PolyMap) -> list:
    try:
        return [parse_element(str(p), f.mode) for p in cfg.points]
    except (ValueError, ZeroDivisionError) as exc:
        raise Precondition(f"--point: {exc}") from exc


def table(headers, rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def render_log(x) -> str:
    enc = x.enclosure()
    return f"{x.render()}  ≈ {enc.mid:.12g}"


def emit(command: str, cfg: RunConfig, result, text: str, as_json: bool, undetermined: bool = False, rows=None):
    report = {
        "command": command,
        "version": __version__,
        "undetermined": bool(undetermined),
        "conventions": CONVENTIONS,
        "result": result,
    }
    jsonschema.validate(report, load_schema("report.schema.json"))
    payload = json.dumps(report, indent=2)
    if cfg.out:
        Path(cfg.out).write_text(payload + "\n")
    if cfg.csv and rows:
        with open(cfg.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    click.echo(payload if as_json else text)
    if undetermined and cfg.strict:
        sys.exit(EXIT_UNDETERMINED)


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(__version__, prog_name="arithdyn")
def cli():
    """Exact arithmetic dynamics of polynomials over Q and Q(t)."""


@cli.command()
@common_options
@click.option("--point", "-P", "points", multiple=True, help="Point (repeatable).")
@guarded
def heights(as_json, points, **kw):
    """Canonical heights with per-place escape rates."""
    cfg = resolve(points=points, **kw)
    f = need_map(cfg)
    tol, cap = cfg.tol or DEFAULT_TOL, cfg.cap or DEFAULT_CAP
    reps = [canonical_height_report(f, P, tol, cap) for P in parse_points(cfg, f)]
    rows = [[element_to_str(r.point), render_log(r.value), r.preperiodic] for r in reps]
    text = table(["point", "canonical height", "preperiodic"], rows)
    undet = any(r.preperiodic is None for r in reps)
    emit("heights", cfg, {"map": f.to_json(), "points": [r.to_json() for r in reps]}, text, as_json, undet)


@cli.command()
@common_options
@click.option("--point", "-P", "points", multiple=True, help="Starting point (repeatable).")
@guarded
def orbit(as_json, points, **kw):
    """Certified preperiodic / divergent decision for each point."""
    cfg = resolve(points=points, **kw)
    f = need_map(cfg)
    certs = [(P, classify_orbit(f, P, cfg.cap or 4096)) for P in parse_points(cfg, f)]
    rows = []
    for P, c in certs:
        detail = f"tail {c.tail}, period {c.period}" if c.is_preperiodic else f"escapes at {c.place}" if c.place else c.note
        rows.append([element_to_str(P), c.verdict, detail])
    text = table(["point", "verdict", "certificate"], rows)
    res = {"map": f.to_json(), "orbits": [dict(point=element_to_str(P), **c.to_json()) for P, c in certs]}
    emit("orbit", cfg, res, text, as_json, any(c.verdict == "undetermined" for _, c in certs))


@cli.command()
@common_options
@guarded
def preperiodic(as_json, **kw):
    """All rational preperiodic points (over Q)."""
    cfg = resolve(**kw)
    f = need_map(cfg)
    census = enumerate_preperiodic(f, cfg.cap or 10**6)
    rows = [[element_to_str(z), census.certificates[z].tail, census.certificates[z].period] for z in census.points]
    text = table(["point", "tail", "period"], rows) + f"\n{len(census.points)} points"
    emit("preperiodic", cfg, {"map": f.to_json(), **census.to_json()}, text, as_json)


@cli.command()
@common_options
@guarded
def crit(as_json, **kw):
    """Local critical heights, bad places, splitting radii and h_crit."""
    cfg = resolve(**kw)
    f = need_map(cfg)
    rep = critical_report(f, cfg.tol or DEFAULT_TOL, cfg.cap or DEFAULT_CAP)
    rows = []
    for e in rep.entries:
        rows.append(
            [
                str(e.place),
                render_log(e.lambda_crit.as_log()),
                e.lambda_crit.mode,
                e.is_bad,
                e.in_S,
                e.g_v.render() if e.g_v is not None else "",
            ]
        )
    text = table(["place", "lambda_crit", "mode", "bad", "in S_d", "g_v"], rows)
    text += f"\nh_crit = {render_log(rep.h_crit)}"
    undet = any(e.is_bad is None for e in rep.entries)
    emit("crit", cfg, rep.to_json(), text, as_json, undet)


def need_place(place, f: PolyMap) -> Place:
    if not place:
        raise Precondition("--place is required")
    try:
        return Place.parse(place, f.mode)
    except ValueError as exc:
        raise Precondition(f"--place: {exc}") from exc


@cli.command()
@common_options
@click.option("--place", help="Finite place, e.g. 3 or t^2+1.")
@click.option("--point", "-P", "points", multiple=True, help="Sample point (repeatable).")
@guarded
def components(as_json, place, points, **kw):
    """Level-m disk components at a bad place and their capacity."""
    cfg = resolve(points=points, place=place, **kw)
    f = need_map(cfg)
    v = need_place(cfg.place, f)
    m = cfg.level if cfg.level is not None else 1
    if cfg.points:
        stats = component_stats(f, parse_points(cfg, f), v, m)
        comps = [(c.anchor, c.log_radius, c.degree, c.count) for c in stats.clusters]
        result = {"stats": stats.to_json()}
        rows_csv = stats.csv_rows()
    else:
        if f.mode != MODE_Q:
            raise Precondition("component enumeration without sample points needs Q")
        found = enumerate_components(f, v, m)
        comps = [(c.anchor, c.log_radius, c.degree, "") for c in found]
        result = {"components": [c.to_json() for c in found]}
        rows_csv = [{"place": str(v), "level": m, **c.to_json()} for c in found]
    kernel = DiskUnionKernel(v, [Disk(v, a, r) for a, r, _, _ in comps])
    logcap, weights, _ = capacity_union(kernel)
    result.update(
        place=v.to_json(), level=m, kernel=kernel.to_json(), log_capacity=logcap.to_json(),
        weights=[str(w) for w in weights],
    )
    rows = [[element_to_str(a), r, d, n, w] for (a, r, d, n), w in zip(comps, weights)]
    text = table(["anchor", "log-radius", "degree", "count", "weight"], rows)
    text += f"\nlog capacity = {render_log(logcap)}"
    emit("components", cfg, result, text, as_json, rows=rows_csv)


@cli.command()
@common_options
@click.option("--point", "-P", "points", multiple=True, help="Sample point (repeatable).")
@guarded
def equidist(as_json, points, **kw):
    """eps-equidistribution at each bad place and the resulting delta-slice."""
    cfg = resolve(points=points, **kw)
    f = need_map(cfg)
    T = parse_points(cfg, f)
    eps = cfg.eps if cfg.eps is not None else Fraction(1, 10)
    delta = cfg.delta if cfg.delta is not None else Fraction(1, 2)
    m0 = cfg.level if cfg.level is not None else 1
    rep = global_report(f, T, eps, delta, m0, cfg.tol or DEFAULT_TOL, cfg.cap or DEFAULT_CAP)
    rows, rows_csv, undet = [], [], False
    for entry in rep.places:
        v = Place.from_json(entry["place"])
        stats = component_stats(f, T, v, m0)
        verdict = equidist_verdict(stats, eps)
        undet |= verdict.verdict == "incomplete"
        ks = k_vector(stats)
        for c, k in zip(stats.clusters, ks):
            rows.append([str(v), element_to_str(c.anchor), c.count, c.degree, c.log_radius, k, verdict.verdict])
        rows_csv.extend(stats.csv_rows())
    text = table(["place", "anchor", "count", "degree", "log-radius", "k", "verdict"], rows)
    if rep.kappa is not None:
        text += f"\nkappa_hat in [{rep.kappa.lo:.12g}, {rep.kappa.hi:.12g}]"
    text += f"\ndelta-slice verdict: {rep.slice_verdict}" + (f" ({rep.note})" if rep.note else "")
    emit("equidist", cfg, rep.to_json(), text, as_json, undet, rows=rows_csv)


def parse_quad(s: str) -> tuple:
    parts = _split_top_level(s)
    if len(parts) != 4:
        raise Precondition(f"--quad expects four comma-separated values, got {s!r}")
    try:
        return tuple(parse_element(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise Precondition(f"--quad: {exc}") from exc


@cli.command()
@common_options
@click.option("--quad", "quads", multiple=True, help="Quadruple a,b,c,d (repeatable).")
@click.option("--m", "ms", multiple=True, help="Multiplier per quadruple (default 1).")
@guarded
def abcd(as_json, quads, ms, **kw):
    """abcd-tuple from Pluecker cross-ratios; with --map, its quality against h_crit."""
    cfg = resolve(quads=quads, m=ms, **kw)
    if not cfg.quads:
        raise Precondition("--quad is required")
    qs = [parse_quad(q) for q in cfg.quads]
    mult = [parse_element(str(m)) for m in cfg.m] if cfg.m else None
    P = build_abcd_point(qs, mult)
    result = {"point": P.to_json()}
    text = table(
        ["coords", "h", "rad", "gap"],
        [[" ".join(element_to_str(z) for z in P.coords), render_log(P.h), render_log(P.rad), render_log(P.gap)]],
    )
    undet = False
    rows = None
    if cfg.map:
        f = need_map(cfg)
        eps = cfg.eps if cfg.eps is not None else Fraction(1, 10)
        rep = critical_report(f, cfg.tol or DEFAULT_TOL, cfg.cap or DEFAULT_CAP)
        q = quality_report(P, f, eps, rep)
        result["quality"] = q.to_json()
        result["h_crit"] = rep.h_crit.to_json()
        text += f"\nthreshold (1-4eps)/2 h_crit = {render_log(q.threshold)}\nverdict: {q.verdict}"
        undet = q.verdict is None
        rows = [dict(q.csv_row(), h_crit=repr(rep.h_crit.approx()))]
    emit("abcd", cfg, result, text, as_json, undet, rows=rows)


@cli.command()
@common_options
@guarded
def sweep(as_json, **kw):
    """Sweep z^d + c over a rational grid (config file `sweep` section)."""
    cfg = resolve(**kw)
    if not cfg.sweep:
        raise Precondition("sweep needs a config file with a `sweep` section")
    d = cfg.sweep["d"]
    per_place = cfg.sweep.get("quads_per_place", 4)
    eps = cfg.eps if cfg.eps is not None else Fraction(1, 10)
    tol, cap = cfg.tol or DEFAULT_TOL, cfg.cap or DEFAULT_CAP
    cells, rows, undet = [], [], False
    for c in cfg.sweep_values():
        f = PolyMap.of([c] + [0] * (d - 1) + [1])
        rep = critical_report(f, tol, cap)
        cell = {"c": str(c), "h_crit": rep.h_crit.to_json(), "bad_places": [str(v) for v in rep.bad_places], "tuples": []}
        for v in rep.reference_set():
            # level-2 anchors give several sample points in each level-1 component
            T = [comp.anchor for comp in enumerate_components(f, v, 2)]
            for q in find_split_quadruples(f, T, v, per_place, rep):
                try:
                    P = build_abcd_point([q])
                except FieldError:
                    continue
                qr = quality_report(P, f, eps, rep)
                undet |= qr.verdict is None
                cell["tuples"].append({"place": str(v), **qr.to_json()})
                rows.append(
                    {"c": str(c), "place": str(v), **qr.csv_row(), "h_crit": repr(rep.h_crit.approx())}
                )
        cells.append(cell)
    text = table(
        ["c", "place", "coords", "gap", "threshold", "verdict"],
        [[r["c"], r["place"], r["coords"], r["gap"], r["threshold_value"], r["verdict"]] for r in rows],
    )
    text += f"\n{len(cells)} cells, {len(rows)} tuples"
    emit("sweep", cfg, {"d": d, "eps": str(eps), "cells": cells}, text, as_json, undet, rows=rows)


@cli.command()
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
def selftest(seed, as_json):
    """Run the built-in invariant suite; nonzero exit on any failure."""
    from .selftest import run

    results = run(seed)
    ok = all(passed for _, passed, _ in results)
    if as_json:
        click.echo(json.dumps({"passed": ok, "checks": [{"name": n, "passed": p, "error": e} for n, p, e in results]}))
    else:
        click.echo(table(["check", "result", "error"], [[n, "pass" if p else "FAIL", e or ""] for n, p, e in results]))
    sys.exit(0 if ok else 1)


def main():
    cli()


if __name__ == "__main__":
    main()
