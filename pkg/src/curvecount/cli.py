"""Command line interface: ``curvecount <subcommand> ...``.

Exit status: 0 success, 1 domain or usage error, 2 audit failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from typing import List, Optional

from . import __version__

EXIT_OK, EXIT_ERROR, EXIT_AUDIT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _header(argv: List[str], out) -> None:
    digest = hashlib.sha256("\0".join(argv).encode()).hexdigest()[:12]
    head = {"tool": "curvecount", "version": __version__, "config": digest,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    print("# " + json.dumps(head, sort_keys=True), file=out)


def _emit(obj, fmt: str, out) -> None:
    if fmt == "json" or not isinstance(obj, (int, str, float)):
        print(json.dumps(obj, indent=2, sort_keys=True, default=str), file=out)
    else:
        print(obj, file=out)


def _surface(genus):
    from .surface import build_surface
    return build_surface(genus)


def _coords(text):
    from .dtcoords import DTCoordinates
    return DTCoordinates.parse(text)


def _write(path: Optional[str], text: str, out) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_surface(args, out):
    _, dec = _surface(args.genus)
    _emit(dec.to_dict(), "json", out)
    return EXIT_OK


def cmd_validate(args, out):
    from .dtcoords import validate
    _, dec = _surface(args.genus)
    ok, reason = validate(dec, _coords(args.coords))
    _emit({"valid": ok, "reason": reason} if args.format == "json" else reason, args.format, out)
    return EXIT_OK if ok else EXIT_ERROR


def _describe(dec, mc):
    comps = []
    for comp, w in mc.components:
        if comp.is_cuff:
            comps.append({"cuff": comp.cuff + 1, "weight": w})
        else:
            comps.append({"weight": w, "crossings": list(comp.crossings(dec.num_cuffs)),
                          "arcs": len(comp.steps)})
    return {"coords": mc.coords.format(), "components": comps, "type": mc.type_invariant.key,
            "remeasured": list(mc.remeasure(dec.num_cuffs))}


def cmd_decode(args, out):
    from .curves import decode
    _, dec = _surface(args.genus)
    _emit(_describe(dec, decode(dec, _coords(args.coords))), "json", out)
    return EXIT_OK


def cmd_type(args, out):
    from .curves import decode
    _, dec = _surface(args.genus)
    mc = decode(dec, _coords(args.coords))
    inv = mc.type_invariant
    obj = {"key": inv.key, "vertices": [list(v) for v in inv.vertices],
           "edges": [list(e) for e in inv.edges]}
    _emit(obj if args.format == "json" else inv.key, args.format, out)
    return EXIT_OK


def _sector(args, dim):
    if not getattr(args, "sector", None):
        return None
    from .experiments import _parse_slab
    return _parse_slab(dim, args.sector)


def cmd_count(args, out):
    from .enumeration import count_scc_table
    from .experiments import parse_grid
    _, dec = _surface(args.genus)
    grid = parse_grid(args.grid) if args.grid else [args.norm_max]
    if args.norm_max is not None:
        grid = [L for L in grid if L <= args.norm_max]
    if not grid:
        raise UsageError("empty L grid")
    t0 = time.perf_counter()
    table = count_scc_table(dec, grid, _sector(args, dec.num_cuffs), args.workers)
    csv_text = table.to_csv()
    if args.format == "json":
        _emit({"rows": [[L, k, c] for L, k, c in table.rows], "metadata": table.metadata}, "json", out)
    else:
        _write(args.out, csv_text, out)
    if args.out:
        meta = dict(table.metadata, wall_seconds=round(time.perf_counter() - t0, 3))
        with open(args.out + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    return EXIT_OK


def cmd_volume(args, out):
    from .enumeration import leading_coefficient, parity_rank
    _, dec = _surface(args.genus)
    lc = leading_coefficient(dec)
    obj = {"genus": args.genus, "dimension": 6 * args.genus - 6, "parity_rank": parity_rank(dec),
           "leading_coefficient": str(lc), "leading_coefficient_float": float(lc)}
    _emit(obj if args.format == "json" else str(lc), args.format, out)
    return EXIT_OK


def cmd_length(args, out):
    from .hyperbolic import FenchelNielsen, length
    _, dec = _surface(args.genus)
    x = length(dec, FenchelNielsen.parse(args.fn), _coords(args.coords))
    _emit({"length": x} if args.format == "json" else repr(x), args.format, out)
    return EXIT_OK


def cmd_count_length(args, out):
    from .curves import type_of
    from .experiments import _resolve_key, parse_grid
    from .hyperbolic import INCOMPLETE, FenchelNielsen, count_by_length
    _, dec = _surface(args.genus)
    if args.type_of:
        key = type_of(dec, _coords(args.type_of)).key
    else:
        key = _resolve_key(args.genus, args.type)
    grid = parse_grid(args.grid, integer=False) if args.grid else [args.length_max]
    if args.length_max is not None:
        grid = [L for L in grid if L <= args.length_max + 1e-12]
    if not grid:
        raise UsageError("empty L grid")
    table = count_by_length(dec, FenchelNielsen.parse(args.fn), key, grid, args.workers)
    if args.format == "json":
        _emit({"rows": [[L, k, c] for L, k, c in table.rows], "metadata": table.metadata}, "json", out)
    else:
        _write(args.out, table.to_csv(), out)
    if args.out:
        with open(args.out + ".meta.json", "w") as fh:
            json.dump(table.metadata, fh, indent=2, sort_keys=True)
    if table.metadata["audit"]["status"] == INCOMPLETE:
        print("pruning audit: INCOMPLETE", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def cmd_fit(args, out):
    from .enumeration import ALL_KEY, CountTable
    from .experiments import powerlaw_fit
    with open(args.input) as fh:
        table = CountTable.from_csv(fh.read())
    keys = [args.key] if args.key else [k for k in table.keys() if k != ALL_KEY] or table.keys()
    res = {}
    for k in keys:
        L, N = table.series(k)
        res[k] = powerlaw_fit(L, N, args.exponent).to_dict()
    _emit(res, "json", out)
    return EXIT_OK


def cmd_oracle(args, out):
    from .experiments import torus_primitive_count
    n = torus_primitive_count(args.norm_max)
    _emit({"norm_max": args.norm_max, "primitive": n} if args.format == "json" else n, args.format, out)
    return EXIT_OK


def cmd_run(args, out):
    from .experiments import load_config, run_experiment
    cfg = load_config(args.config)
    if args.out:
        cfg.output = args.out
    if args.workers_given:
        cfg.workers = args.workers
    rep = run_experiment(cfg)
    _emit({"output": cfg.output, "status": rep.audit.get("status"), "config": cfg.digest}, "json", out)
    return EXIT_OK if rep.ok else EXIT_AUDIT


def _read_weights(path):
    with open(path) as fh:
        data = json.load(fh)
    return [Fraction(x) for x in (data["weights"] if isinstance(data, dict) else data)]


def cmd_track(args, out):
    from .traintrack import TrainTrack, standard_track, thurston_form, weight_space_dim
    if args.action == "show":
        _, dec = _surface(args.genus)
        signs = [(-1 if s.strip() == "-" else 1) for s in args.orthant.split(",")] if args.orthant \
            else [1] * dec.num_cuffs
        tau, _ = standard_track(dec, signs)
        obj = tau.to_dict()
        obj["weight_space_dim"] = weight_space_dim(tau)
        _emit(obj, "json", out)
        return EXIT_OK
    if not (args.track and args.u and args.v):
        raise UsageError("track form needs --track, --u and --v")
    with open(args.track) as fh:
        tau = TrainTrack.from_json(fh.read())
    val = thurston_form(tau, _read_weights(args.u), _read_weights(args.v))
    _emit({"omega": str(val)} if args.format == "json" else str(val), args.format, out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: 1)")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")

    p = _Parser(prog="curvecount", description="Count multicurves on closed surfaces.")
    p.add_argument("--version", action="version", version=f"curvecount {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("surface", cmd_surface, "print the pants decomposition as JSON")
    sp.add_argument("action", choices=("info",))
    sp.add_argument("--genus", type=int, required=True)

    for name, func, help_ in (("validate", cmd_validate, "check Dehn-Thurston coordinates"),
                              ("decode", cmd_decode, "decode coordinates into a multicurve"),
                              ("type", cmd_type, "topological type key of a multicurve")):
        sp = add(name, func, help_)
        sp.add_argument("--genus", type=int, required=True)
        sp.add_argument("--coords", required=True, help="'m1,..,mn;t1,..,tn'")

    sp = add("count", cmd_count, "count multicurves and simple closed curves in norm balls")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--norm-max", type=int, default=None)
    sp.add_argument("--grid", default=None, help="geometric:A..B[:n], linear:A..B[:step] or a list")
    sp.add_argument("--sector", default=None, help="slab such as 'm1:0:0.13' or 't2:0.2:1'")

    sp = add("volume", cmd_volume, "exact leading coefficient of the lattice count")
    sp.add_argument("--genus", type=int, required=True)

    sp = add("length", cmd_length, "hyperbolic length of a multicurve")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--fn", required=True, help="'l1,..,ln;theta1,..,thetan'")
    sp.add_argument("--coords", required=True)

    sp = add("count-length", cmd_count_length, "count curves of one type by hyperbolic length")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--fn", required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--type-of", default=None, help="coordinates of a representative")
    g.add_argument("--type", default="nonseparating", help="type key, 'nonseparating' or 'separating[:k]'")
    sp.add_argument("--length-max", type=float, default=None)
    sp.add_argument("--grid", default=None)

    sp = add("fit", cmd_fit, "power-law fit of a counts CSV")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--key", default=None)
    sp.add_argument("--exponent", type=float, default=None, help="known exponent for the refinement")

    sp = add("oracle", cmd_oracle, "known-answer counts")
    sp.add_argument("which", choices=("torus",))
    sp.add_argument("--norm-max", type=int, required=True)

    sp = add("run", cmd_run, "run an experiment config")
    sp.add_argument("config")

    sp = add("track", cmd_track, "standard train tracks and the Thurston form")
    sp.add_argument("action", choices=("show", "form"))
    sp.add_argument("--genus", type=int, default=2)
    sp.add_argument("--orthant", default=None, help="comma separated signs, e.g. '+,-,+'")
    sp.add_argument("--track", default=None, help="track JSON file")
    sp.add_argument("--u", default=None, help="weights JSON file")
    sp.add_argument("--v", default=None, help="weights JSON file")
    return p


def main(argv: Optional[List[str]] = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.workers_given = args.workers is not None
    if args.workers is None:
        args.workers = 1
    _header(argv, out)
    from .curves import DecodeError
    from .dtcoords import CoordinateError
    from .experiments import ConfigError
    from .traintrack import TrackError
    try:
        return args.func(args, out)
    except (UsageError, ValueError, CoordinateError, ConfigError, TrackError, DecodeError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
