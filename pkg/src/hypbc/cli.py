"""``hypbc`` command-line front end.

Exit codes: 0 ok, 1 parse or usage error, 2 not hyperbolic, 3 kernel
inclusion fails, 4 solver failure, 5 property failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import HypbcError, KernelInclusionFailed, NotHyperbolic, ParseError, SolverFailure
from .halfspace import SobolevParams, SpaceTimeGrid, manufactured, solve, verify_weighted_estimate
from .hyperbolic import classify
from .io import GridField, SystemSpec, load_spec, parse_spec, preset_to_dict, read_field, write_field, write_spec
from .lopatinskii import check_kernel_inclusion, default_gamma_grid, estimate_power, kernel_witness
from .models import PRESETS, get_preset
from .verify import PROPERTIES, run_suite

EXIT_OK, EXIT_PARSE, EXIT_NOT_HYPERBOLIC, EXIT_KERNEL, EXIT_SOLVER, EXIT_PROPERTY = range(6)


def _num(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass
class RunConfig:
    seed: int = 0
    gamma_grid: tuple[float, float, int] = (1e-4, 1e-1, 12)
    samples: int = 256
    grid: tuple[int, ...] | None = None
    extent: tuple[float, ...] | None = None
    s: float = 0.0
    tol: Tolerances = field(default_factory=lambda: DEFAULT)


class _Parser(argparse.ArgumentParser):
    # argparse would exit 2, which is reserved for "not hyperbolic"
    def error(self, message):
        raise ParseError(message, "arguments")


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _pairs(items: list[str] | None, what: str) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ParseError(f"expected key=value, got {item!r}", what)
        out[key] = _value(val)
    return out


def _tuple(text: str | None, kind, what: str):
    if text is None:
        return None
    try:
        return tuple(kind(p) for p in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad list {text!r}: {exc}", what) from exc


def _config(args) -> RunConfig:
    try:
        tol = DEFAULT.with_overrides(**{k: v for k, v in _pairs(args.tol, "--tol").items()})
    except (KeyError, TypeError) as exc:
        raise ParseError(str(exc), "--tol") from exc
    cfg = RunConfig(
        seed=args.seed,
        gamma_grid=(args.gamma_min, args.gamma_max, args.gamma_count),
        samples=args.samples if args.samples is not None else 256,
        grid=_tuple(getattr(args, "grid", None), int, "--grid"),
        extent=_tuple(getattr(args, "extent", None), float, "--extent"),
        s=getattr(args, "s", 0.0),
        tol=tol,
    )
    gmin, gmax, count = cfg.gamma_grid
    if cfg.samples < 1 or count < 6 or not 0 < gmin < gmax < 1:
        raise ParseError("need samples >= 1, gamma-count >= 6 and 0 < gamma-min < gamma-max < 1", "config")
    return cfg


def _spec(args) -> SystemSpec:
    if args.preset:
        return parse_spec({"preset": {"name": args.preset, "params": _pairs(args.param, "--param")}})
    if not args.spec:
        raise ParseError("give a spec file or --preset", "arguments")
    return load_spec(args.spec)


def _worst_case(spec: SystemSpec):
    if not spec.preset:
        return None
    return get_preset(spec.preset["name"], **spec.preset.get("params", {})).closed_forms.worst_case


def _describe(c) -> str:
    if c.symmetric:
        kind = "symmetric hyperbolic"
    elif c.strictly_hyperbolic:
        kind = "strictly hyperbolic"
    elif c.constantly_hyperbolic:
        kind = "constantly hyperbolic"
    else:
        kind = "hyperbolic"
    bnd = "characteristic" if c.characteristic_boundary else "non-characteristic"
    return f"{kind}, {bnd} boundary, μ={c.mu}"


# -- commands -----------------------------------------------------------------


def cmd_classify(args, out) -> int:
    spec, cfg = _spec(args), _config(args)
    try:
        c = classify(spec.system, min(cfg.samples, 1000), cfg.seed, cfg.tol)
    except NotHyperbolic as exc:
        print(f"not hyperbolic: {exc}", file=out)
        if exc.sample is not None:
            print(f"offending sample: {np.asarray(exc.sample).tolist()}", file=out)
        return EXIT_NOT_HYPERBOLIC
    print(_describe(c), file=out)
    block = {
        "name": spec.name,
        "symmetric": c.symmetric,
        "constantly_hyperbolic": c.constantly_hyperbolic,
        "strictly_hyperbolic": c.strictly_hyperbolic,
        "characteristic_boundary": c.characteristic_boundary,
        "mu": c.mu,
        "boundary_rows": spec.B.mu,
    }
    print(json.dumps(block, indent=1), file=out)
    return EXIT_OK


def cmd_power(args, out) -> int:
    spec, cfg = _spec(args), _config(args)
    Ad = spec.system.Ad
    if not check_kernel_inclusion(spec.B, Ad, cfg.tol):
        v, val = kernel_witness(spec.B, Ad, tol=cfg.tol)
        exc = KernelInclusionFailed(f"|B v| = {val:.3e} for v in N(Ad)", v)
        print(f"kernel inclusion fails: {exc}", file=out)
        print("witness: " + json.dumps([[_num(z.real), _num(z.imag)] for z in v]), file=out)
        return EXIT_KERNEL
    gmin, gmax, count = cfg.gamma_grid
    est = estimate_power(
        spec.system,
        spec.B,
        default_gamma_grid(gmin, gmax, count),
        freq_samples=cfg.samples,
        seed=cfg.seed,
        worst_case=_worst_case(spec),
        tol=cfg.tol,
    )
    d = spec.system.d
    header = ["gamma", "rho_min", "tau_worst"] + [f"eta_worst_{j}" for j in range(1, d)]
    rows = [
        [_num(g), _num(r), _num(f.tau)] + [_num(e) for e in f.eta]
        for (g, r), f in zip(est.per_gamma_rho, est.worst_frequencies)
    ]
    target = open(args.csv, "w", newline="") if args.csv else out
    try:
        w = csv.writer(target, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if args.csv:
            target.close()
    summary = sys.stderr if not args.csv and out is sys.stdout else out
    lo, hi = est.fit_range
    print(
        f"s_hat={_num(est.s_hat)} r2={_num(est.regression_r2)} fit_range=[{_num(lo)}, {_num(hi)}]"
        + (" (fit unstable)" if est.fit_unstable else ""),
        file=summary,
    )
    return EXIT_OK


def _grid_for(spec: SystemSpec, cfg: RunConfig, data: GridField | None, bnd: GridField | None) -> SpaceTimeGrid:
    d = spec.system.d
    counts = cfg.grid
    ext = cfg.extent
    if counts is None and data is not None:
        counts = data.data.shape[1:]
    if ext is None and data is not None:
        sp = data.spacings
        ext = tuple(h * n for h, n in zip(sp[:-1], data.data.shape[1:-1])) + (sp[-1] * (data.data.shape[-1] - 1),)
    if counts is None and bnd is not None:
        counts = bnd.data.shape[1:] + (128,)
    if ext is None and bnd is not None:
        ext = tuple(h * n for h, n in zip(bnd.spacings, bnd.data.shape[1:])) + (20.0,)
    counts = counts or (64,) * d + (128,)
    ext = ext or (16.0,) * d + (20.0,)
    if len(counts) != d + 1 or len(ext) != d + 1:
        raise ParseError(f"grid and extent need d + 1 = {d + 1} entries", "--grid")
    try:
        return SpaceTimeGrid(counts[0], tuple(counts[1:-1]), counts[-1], ext[0], tuple(ext[1:-1]), ext[-1])
    except ValueError as exc:
        raise ParseError(str(exc), "--grid") from exc


def cmd_solve(args, out) -> int:
    spec, cfg = _spec(args), _config(args)
    system, B = spec.system, spec.B
    data = read_field(args.data) if args.data else None
    bnd = read_field(args.boundary) if args.boundary else None
    if not (args.manufactured or data is not None or bnd is not None):
        raise ParseError("give --manufactured, --data or --boundary", "arguments")
    grid = _grid_for(spec, cfg, data, bnd)
    gamma = args.gamma
    if gamma <= 0:
        raise ParseError("gamma must be positive", "--gamma")
    exact = None
    if args.manufactured:
        f, g, exact = manufactured(system, B, grid, SobolevParams(0.0, gamma), seed=cfg.seed)
    else:
        shape_f = (system.N, *grid.tangential_shape, grid.nxd)
        shape_g = (B.mu, *grid.tangential_shape)
        f = data.data if data is not None else None
        g = bnd.data if bnd is not None else np.zeros(shape_g, complex)
        if f is not None and f.shape != shape_f:
            raise ParseError(f"data has shape {f.shape}, expected {shape_f}", str(args.data))
        if g.shape != shape_g:
            raise ParseError(f"boundary data has shape {g.shape}, expected {shape_g}", str(args.boundary))
    sol = solve(system, B, f, g, grid, SobolevParams(0.0, gamma), cutoff=args.cutoff, tol=cfg.tol)
    if sol.failures:
        print(f"{len(sol.failures)} frequencies failed and were zeroed", file=out)
    if args.out:
        write_field(args.out, GridField(sol.w, (*grid.spacings, grid.h), gamma))
    if exact is not None:
        wt = np.exp(-gamma * grid.t).reshape((1, grid.nt) + (1,) * (exact.ndim - 2))
        ref = exact * wt
        err = float(np.linalg.norm(sol.w - ref) / np.linalg.norm(ref))
        print(f"recovery_error={_num(err)}", file=out)
    lhs, rhs, ratio = verify_weighted_estimate(system, B, f, g, grid, gamma, cfg.s, args.mode, solution=sol, tol=cfg.tol)
    print(f"gamma={_num(gamma)} s={_num(cfg.s)} lhs={_num(lhs)} rhs={_num(rhs)} ratio={_num(ratio)}", file=out)
    sweep = _tuple(args.gamma_sweep, float, "--gamma-sweep")
    if sweep:
        target = open(args.csv, "w", newline="") if args.csv else out
        try:
            w = csv.writer(target, lineterminator="\n")
            w.writerow(["gamma", "lhs", "rhs", "ratio"])
            for gm in sweep:
                sg = solve(system, B, f, g, grid, SobolevParams(0.0, gm), cutoff=args.cutoff, tol=cfg.tol)
                vals = verify_weighted_estimate(system, B, f, g, grid, gm, cfg.s, args.mode, solution=sg, tol=cfg.tol)
                w.writerow([_num(gm)] + [_num(v) for v in vals])
        finally:
            if args.csv:
                target.close()
    return EXIT_OK


def cmd_verify(args, out) -> int:
    spec, cfg = _spec(args), _config(args)
    names = args.property or None
    for n in names or []:
        if n not in PROPERTIES:
            raise ParseError(f"unknown property {n!r}; choose from {', '.join(sorted(PROPERTIES))}", "--property")
    samples = args.samples if args.samples is not None else 100_000
    results = run_suite(spec, names, samples, cfg.seed, cfg.tol)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} margin={r.margin:.6g} {r.detail}", file=out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def cmd_preset(args, out) -> int:
    if not args.name:
        for name in PRESETS:
            print(name, file=out)
        return EXIT_OK
    try:
        preset = get_preset(args.name, **_pairs(args.param, "--param"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(str(exc), "preset") from exc
    data = preset_to_dict(preset)
    if args.out:
        write_spec(args.out, data)
    else:
        print(json.dumps(data, indent=1), file=out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("spec", nargs="?", help="system-spec JSON file")
    common.add_argument("--preset", help="use a built-in preset instead of a spec file")
    common.add_argument("--param", action="append", metavar="KEY=VALUE", help="preset parameter (JSON value)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--gamma-min", type=float, default=1e-4)
    common.add_argument("--gamma-max", type=float, default=1e-1)
    common.add_argument("--gamma-count", type=int, default=12)
    common.add_argument("--tol", action="append", metavar="KEY=VALUE", help="tolerance override")

    p = _Parser(prog="hypbc", description="Weak Kreiss-Sakamoto analysis of hyperbolic boundary problems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("classify", parents=[common], help="classify the system")
    pw = sub.add_parser("power", parents=[common], help="estimate the loss power s")
    pw.add_argument("--csv", help="write the per-gamma table here (default stdout)")
    sv = sub.add_parser("solve", parents=[common], help="solve the half-space problem")
    sv.add_argument("--data", help="grid-field file with the interior forcing (N, nt, ny..., nxd)")
    sv.add_argument("--boundary", help="grid-field file with the boundary datum (mu, nt, ny...)")
    sv.add_argument("--manufactured", action="store_true", help="generate a manufactured problem")
    sv.add_argument("--grid", help="nt,ny...,nxd")
    sv.add_argument("--extent", help="T,Y...,L")
    sv.add_argument("--gamma", type=float, default=1.0)
    sv.add_argument("--s", type=float, default=0.0)
    sv.add_argument("--mode", choices=("standard", "shifted"), default="standard")
    sv.add_argument("--gamma-sweep", help="comma-separated gammas for an estimate table")
    sv.add_argument("--cutoff", type=float, default=0.0, help="relative spectral cutoff")
    sv.add_argument("--out", help="write the weighted solution exp(-gamma t) u here")
    sv.add_argument("--csv", help="write the sweep table here (default stdout)")
    vf = sub.add_parser("verify", parents=[common], help="run the property suite")
    vf.add_argument("--property", action="append", help="run only this property (repeatable)")
    pr = sub.add_parser("preset", help="export a preset as a spec file")
    pr.add_argument("name", nargs="?", help="preset name (omit to list)")
    pr.add_argument("--param", action="append", metavar="KEY=VALUE")
    pr.add_argument("--out")
    return p


COMMANDS = {
    "classify": cmd_classify,
    "power": cmd_power,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "preset": cmd_preset,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotHyperbolic as exc:
        print(f"not hyperbolic: {exc}", file=sys.stderr)
        return EXIT_NOT_HYPERBOLIC
    except KernelInclusionFailed as exc:
        print(f"kernel inclusion fails: {exc}", file=sys.stderr)
        return EXIT_KERNEL
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except HypbcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
