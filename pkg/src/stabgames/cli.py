"""Batch experiment runner.

Subcommands build codes, validate strategies, evaluate games and sweep
deformations; every run writes a JSON record and a CSV table, both stamped
with the library version, a hash of the effective configuration, and the
seed.  Outputs are deterministic given the seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .codes import (
    code_info,
    double_semion,
    exchange_statistics,
    toric2d,
    toric2d_winding_z_fixers,
    toric3d_edges,
    toric3d_faces,
    xcube,
)
from .complexes import build_torus_2d, build_torus_3d
from .dense import deform, state_from_group
from .games import (
    CellulationGame,
    cellulation_game_eval,
    classical_optimum_magic_square,
    classical_optimum_parity,
    magic_square_eval,
    quantum_parity_eval,
)
from .strategies import (
    block_cellulation_ops,
    ds_magic_square_ops,
    fan_cellulation_ops,
    ghz_ops,
    tc2d_parity_ops,
    tc3d_1form_ops,
    tc3d_2form_ops,
    validate,
    xcube_ops,
)


def _num(x):
    """JSON form of a probability: exact fraction string plus float."""
    if isinstance(x, Fraction):
        return {"fraction": f"{x.numerator}/{x.denominator}", "float": float(x)}
    if isinstance(x, complex):
        return {"float": x.real if abs(x.imag) < 1e-12 else [x.real, x.imag]}
    return {"float": float(x)}


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _emit(args, cfg: dict, record: dict, csv_rows, csv_header):
    outdir = Path(args.outdir or os.environ.get("STABGAMES_OUTDIR", "."))
    outdir.mkdir(parents=True, exist_ok=True)
    stamp = {
        "version": __version__,
        "config": cfg,
        "config_hash": _config_hash(cfg),
        "seed": args.seed,
    }
    record = {**stamp, **record}
    base = outdir / (args.tag or cfg["command"].replace(" ", "_"))
    json_path = base.with_suffix(".json")
    csv_path = base.with_suffix(".csv")
    with open(json_path, "w") as f:
        json.dump(record, f, indent=2, default=str)
        f.write("\n")
    with open(csv_path, "w") as f:
        f.write(",".join(csv_header) + "\n")
        for row in csv_rows:
            f.write(",".join(str(v) for v in row) + "\n")
    print(json.dumps({k: record[k] for k in ("config_hash", "version")}
                     | {"json": str(json_path), "csv": str(csv_path)}))
    return 0


def _build_code(args):
    kind = args.code
    if kind == "ghz":
        return None
    if kind == "tc2d":
        return toric2d(args.L)
    if kind == "tc3d-faces":
        return toric3d_faces(args.L)
    if kind == "tc3d-edges":
        return toric3d_edges(args.L)
    if kind == "xcube":
        return xcube(args.L)
    if kind == "double-semion":
        return double_semion(args.Lx or args.L, args.Ly or args.L)
    raise ValueError(f"unknown code kind {args.code!r}")


def _build_strategy(args, code):
    if args.code == "ghz":
        return ghz_ops(args.P)
    if args.code == "tc2d":
        return tc2d_parity_ops(code, args.P, winding=args.variant == "winding")
    if args.code == "tc3d-faces":
        return tc3d_1form_ops(code)
    if args.code == "tc3d-edges":
        return tc3d_2form_ops(code)
    if args.code == "xcube":
        return xcube_ops(code, args.variant or "prism")
    raise ValueError(f"no parity strategy for code {args.code!r}")


def cmd_code_info(args):
    code = _build_code(args)
    if code is None:
        raise ValueError("code info needs a concrete code kind")
    info = code_info(code)
    cfg = {"command": "code info", "code": args.code, "L": args.L,
           "Lx": args.Lx, "Ly": args.Ly}
    rows = [[info["kind"], info["d"], info["n"], info["rank"],
             info["redundancies"], info["ground_space_log_dim"]]]
    header = ["kind", "d", "n", "rank", "redundancies", "ground_space_log_dim"]
    return _emit(args, cfg, {"info": info}, rows, header)


def cmd_complex_info(args):
    cell = build_torus_2d(args.L) if args.lattice == "torus2d" else build_torus_3d(args.L)
    chain = cell.to_chain()
    hom = [chain.homology_dim(i) for i in range(len(chain.dims))]
    cfg = {"command": "complex info", "lattice": args.lattice, "L": args.L}
    record = {
        "dims": list(chain.dims),
        "homology": hom,
        "boundary_squares_to_zero": chain.check_boundary_squares_to_zero(),
        "euler_check": chain.euler_check(),
    }
    rows = [[args.lattice, args.L, " ".join(map(str, chain.dims)), " ".join(map(str, hom))]]
    return _emit(args, cfg, record, rows, ["lattice", "L", "dims", "homology"])


def cmd_strategy_validate(args):
    code = _build_code(args)
    ops = _build_strategy(args, code)
    report = validate(ops)
    cfg = {"command": "strategy validate", "code": args.code, "L": args.L,
           "P": args.P, "variant": args.variant}
    record = {
        "ok": report.ok,
        "commutation_ok": report.commutation_ok,
        "hermitian_ok": report.hermitian_ok,
        "problems": report.problems,
        "constraints": [
            {"label": c.label, "kind": kind, "phase_exp": got}
            for (c, kind, got) in report.constraint_results
        ],
    }
    rows = [[c.label, kind, got] for (c, kind, got) in report.constraint_results]
    return _emit(args, cfg, record, rows, ["constraint", "kind", "phase_exp"])


def cmd_game_parity(args):
    cfg = {"command": "game parity", "code": args.code, "L": args.L, "P": args.P,
           "classical": args.classical, "variant": args.variant}
    if args.classical:
        opt, witness = classical_optimum_parity(args.P, workers=args.workers)
        record = {"p_cl": _num(opt), "witness": witness}
        rows = [[args.P, float(opt), f"{opt.numerator}/{opt.denominator}"]]
        return _emit(args, cfg, record, rows, ["P", "p_cl", "p_cl_exact"])
    code = _build_code(args)
    ops = _build_strategy(args, code)
    report = validate(ops)
    if not report.ok:
        raise ValueError(f"strategy failed validation: {report.problems[:2]}")
    ev = quantum_parity_eval(ops)
    record = {
        "p_q": _num(ev.p_q),
        "mermin": None if ev.mermin is None else _num(ev.mermin),
        "per_input": {"".join(map(str, k)): float(v) for k, v in ev.per_input.items()},
    }
    rows = [["".join(map(str, k)), float(v)] for k, v in sorted(ev.per_input.items())]
    rows.append(["average", float(ev.p_q)])
    return _emit(args, cfg, record, rows, ["input", "win_probability"])


def cmd_game_cellulation(args):
    code = toric2d(args.L)
    if args.fan:
        strat = fan_cellulation_ops(code)
    else:
        bx, by = (int(t) for t in args.blocks.split("x"))
        strat = block_cellulation_ops(code, bx, by)
    game = CellulationGame(strat)
    ev = cellulation_game_eval(
        game,
        restrict_unit_z=args.restrict_unit_z,
        max_exhaustive=1 << args.max_exhaustive_bits,
        samples=args.samples,
        seed=args.seed,
    )
    cfg = {"command": "game cellulation", "L": args.L, "blocks": args.blocks,
           "fan": args.fan, "restrict_unit_z": args.restrict_unit_z,
           "samples": args.samples}
    record = {"p_q": _num(ev.p_q), "inputs": len(ev.per_input), "meta": ev.meta}
    rows = [[args.blocks if not args.fan else "fan", len(ev.per_input), float(ev.p_q)]]
    return _emit(args, cfg, record, rows, ["cellulation", "inputs", "p_q"])


def cmd_game_magic_square(args):
    cfg = {"command": "game magic-square", "d": args.d, "classical": args.classical,
           "Lx": args.Lx, "Ly": args.Ly}
    if args.classical:
        opt, witness = classical_optimum_magic_square(args.d, workers=args.workers)
        record = {"p_cl": _num(opt), "witness": {k: [list(t) for t in v] for k, v in witness.items()}}
        rows = [[args.d, float(opt), f"{opt.numerator}/{opt.denominator}"]]
        return _emit(args, cfg, record, rows, ["d", "p_cl", "p_cl_exact"])
    code = double_semion(args.Lx, args.Ly)
    ms = ds_magic_square_ops(code)
    rep = magic_square_eval(ms)
    record = {
        "p_q": _num(rep.p_q),
        "rows_ok": [ok for ok, _ in rep.row_identities],
        "cols_ok": [ok for ok, _ in rep.col_identities],
        "cells": {f"{r}{c}": kind for (r, c), (kind, _) in rep.cell_constraints.items()},
        "problems": rep.problems,
        "exchange": {a: str(exchange_statistics(code, a)) for a in ("s", "sbar", "ssbar")},
    }
    rows = [[f"{r}{c}", kind, phase] for (r, c), (kind, phase) in sorted(rep.cell_constraints.items())]
    rows.append(["p_q", float(rep.p_q), ""])
    return _emit(args, cfg, record, rows, ["cell", "kind", "phase_exp"])


def _parse_thetas(grid: str):
    if ":" in grid:
        start, stop, step = (float(t) for t in grid.split(":"))
        out = []
        t = start
        while t <= stop + 1e-12:
            out.append(round(t, 10))
            t += step
        return out
    return [float(t) for t in grid.split(",")]


def cmd_sweep_deformation(args):
    code = toric2d(args.L)
    ops = tc2d_parity_ops(code, args.P)
    signs = {"+": 0, "-": 2}
    fixers = [
        f.scale_i(signs[s])
        for f, s in zip(toric2d_winding_z_fixers(code), args.sector)
    ]
    fixed = code.group.fix_sector(fixers)
    base_state = state_from_group(fixed)
    thetas = _parse_thetas(args.thetas)
    results = []
    for theta in thetas:
        state = deform(base_state, args.family, theta) if theta else base_state
        ev = quantum_parity_eval(ops, resource=state)
        results.append((theta, float(ev.p_q), None if ev.mermin is None else float(ev.mermin)))
    cfg = {"command": "sweep deformation", "code": args.code, "L": args.L,
           "P": args.P, "family": args.family, "thetas": args.thetas,
           "sector": args.sector}
    record = {"sweep": [{"theta": t, "p_q": p, "mermin": m} for t, p, m in results]}
    rows = [[t, p, "" if m is None else m] for t, p, m in results]
    return _emit(args, cfg, record, rows, ["theta", "p_q", "mermin"])


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--outdir", default=None)
    sub.add_argument("--tag", default=None)
    sub.add_argument("--workers", type=int, default=os.cpu_count(),
                     help="parallelism for enumeration-heavy searches")
    sub.add_argument("--config", default=None, help="JSON file with defaults; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabgames")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code", help="code-level queries")
    psub = p.add_subparsers(dest="subcommand", required=True)
    pi = psub.add_parser("info")
    pi.add_argument("--kind", dest="code", required=True)
    pi.add_argument("--L", type=int, default=3)
    pi.add_argument("--Lx", type=int, default=None)
    pi.add_argument("--Ly", type=int, default=None)
    _add_common(pi)
    pi.set_defaults(func=cmd_code_info)

    c = sub.add_parser("complex", help="cellulation queries")
    csub = c.add_subparsers(dest="subcommand", required=True)
    ci = csub.add_parser("info")
    ci.add_argument("--lattice", choices=("torus2d", "torus3d"), default="torus2d")
    ci.add_argument("--L", type=int, default=3)
    _add_common(ci)
    ci.set_defaults(func=cmd_complex_info)

    s = sub.add_parser("strategy", help="strategy validation")
    ssub = s.add_subparsers(dest="subcommand", required=True)
    sv = ssub.add_parser("validate")
    sv.add_argument("--code", required=True)
    sv.add_argument("--L", type=int, default=3)
    sv.add_argument("--Lx", type=int, default=None)
    sv.add_argument("--Ly", type=int, default=None)
    sv.add_argument("--P", type=int, default=3)
    sv.add_argument("--variant", default=None)
    _add_common(sv)
    sv.set_defaults(func=cmd_strategy_validate)

    g = sub.add_parser("game", help="evaluate games")
    gsub = g.add_subparsers(dest="subcommand", required=True)
    gp = gsub.add_parser("parity")
    gp.add_argument("--code", default="ghz")
    gp.add_argument("--L", type=int, default=3)
    gp.add_argument("--Lx", type=int, default=None)
    gp.add_argument("--Ly", type=int, default=None)
    gp.add_argument("--P", type=int, default=3)
    gp.add_argument("--classical", action="store_true")
    gp.add_argument("--variant", default=None)
    _add_common(gp)
    gp.set_defaults(func=cmd_game_parity)

    gc = gsub.add_parser("cellulation")
    gc.add_argument("--L", type=int, default=6)
    gc.add_argument("--blocks", default="2x2")
    gc.add_argument("--fan", action="store_true")
    gc.add_argument("--restrict-unit-z", action="store_true")
    gc.add_argument("--samples", type=int, default=1024)
    gc.add_argument("--max-exhaustive-bits", type=int, default=14)
    _add_common(gc)
    gc.set_defaults(func=cmd_game_cellulation)

    gm = gsub.add_parser("magic-square")
    gm.add_argument("--d", type=int, default=4)
    gm.add_argument("--classical", action="store_true")
    gm.add_argument("--Lx", type=int, default=8)
    gm.add_argument("--Ly", type=int, default=10)
    _add_common(gm)
    gm.set_defaults(func=cmd_game_magic_square)

    sw = sub.add_parser("sweep", help="parameter sweeps")
    swsub = sw.add_subparsers(dest="subcommand", required=True)
    sd = swsub.add_parser("deformation")
    sd.add_argument("--code", default="tc2d")
    sd.add_argument("--L", type=int, default=2)
    sd.add_argument("--P", type=int, default=3)
    sd.add_argument("--family", choices=("z", "x"), default="z")
    sd.add_argument("--thetas", default="0:0.5:0.05")
    sd.add_argument("--sector", choices=("++", "+-", "-+", "--"), default="+-",
                    help="winding-loop eigenvalue signs of the resource state")
    _add_common(sd)
    sd.set_defaults(func=cmd_sweep_deformation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    raw = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(raw)
    if getattr(args, "config", None):
        with open(args.config) as f:
            defaults = json.load(f)
        for key, value in defaults.items():
            # explicit flags override the config file
            if f"--{key}" in raw or f"--{key.replace('_', '-')}" in raw:
                continue
            setattr(args, key, value)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
