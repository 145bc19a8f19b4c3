"""Command-line front end.

Every option may also be given in a JSON config file (``--config``) under
the same name with dashes replaced by underscores; a flag on the command
line overrides the file, which overrides the built-in default.

Exit codes: 0 on success (an infeasible dispatch is a recorded outcome),
1 on domain errors (singular network, solver breakdown), 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import build_box
from .cases import BUILTIN, load_case
from .errors import DispatchError, DrlaedError, InputError, SolverFailure
from .evaluation import SWEEP_COLUMNS, evaluate, solar_samples, sweep
from .formulations import METHODS, MethodSpec, build_master, solve_dispatch
from .grid import build_ptdf
from .io import (config_hash, fmt, header_line, read_json, read_network, read_samples_csv,
                 write_samples_csv, write_table)
from .lpsolve import LpSettings, write_mps
from .problem import assemble
from .risk import AmbiguitySpec, SampleSet

logger = logging.getLogger("drlaed")

DEFAULTS = {
    "case": None,
    "network": None,
    "train": None,
    "valid": None,
    "solution": None,
    "out": None,
    "histogram": None,
    "mps": None,
    "method": "drcvp",
    "theta": 0.0,
    "thetas": None,
    "alpha": 0.01,
    "ground_norm": "linf",
    "support": None,
    "tolerances": None,
    "seed": 0,
    "horizon": None,
    "ramp_from_initial": True,
    "realized_row": 0,
    "n": 100,
    "capacity": None,
    "shift": 0.0,
    "start_hour": 7,
}

OUT_DEFAULTS = {
    "solve": "solution.json",
    "eval": "report.csv",
    "sweep": "sweep.csv",
    "bounds": "bounds.csv",
    "ptdf": "ptdf.csv",
    "export": "export",
    "gen-data": "samples.csv",
}

# keys that only name output locations and do not change results
_OUTPUT_KEYS = ("out", "histogram", "mps")


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _parser():
    p = argparse.ArgumentParser(prog="drlaed", description="Distributionally robust look-ahead dispatch.")
    p.add_argument("--version", action="version", version=f"drlaed {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("inputs")
    g.add_argument("--config", help="JSON config file")
    g.add_argument("--case", help=f"bundled network ({', '.join(BUILTIN)})")
    g.add_argument("--network", help="network JSON file")
    g.add_argument("--train", help="training samples CSV")
    g.add_argument("--valid", help="validation samples CSV")
    g.add_argument("--out", help="output path")
    g.add_argument("--seed", type=int)
    g.add_argument("--horizon", type=int, help="number of periods (default: network horizon)")
    g.add_argument("--no-initial-ramp", dest="ramp_from_initial", action="store_const", const=False,
                   help="omit first-period ramp rows against the initial set-points")
    r = common.add_argument_group("risk")
    r.add_argument("--method", choices=METHODS)
    r.add_argument("--theta", type=float, help="Wasserstein radius [MW]")
    r.add_argument("--thetas", type=_float_list, help="comma-separated radii for sweep")
    r.add_argument("--alpha", type=float, help="violation level in (0, 1)")
    r.add_argument("--ground-norm", choices=("linf", "l1"))

    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="solve one dispatch and write solution JSON")
    s.add_argument("--mps", help="also write the master LP in MPS format")
    s.add_argument("--realized-row", type=int, help="validation row used by the deterministic oracle")
    e = sub.add_parser("eval", parents=[common], help="evaluate a solution on validation samples")
    e.add_argument("--solution", help="solution JSON written by solve")
    e.add_argument("--histogram", help="also write per-line flow histograms")
    sub.add_parser("sweep", parents=[common], help="cost/violation tradeoff over --thetas")
    sub.add_parser("bounds", parents=[common], help="per-component robust bounds CSV")
    sub.add_parser("ptdf", parents=[common], help="PTDF matrix CSV")
    sub.add_parser("export", parents=[common], help="compact problem matrices as CSV files")
    gd = sub.add_parser("gen-data", parents=[common], help="synthetic solar samples CSV")
    gd.add_argument("--n", type=int, help="number of scenarios")
    gd.add_argument("--capacity", type=_float_list, help="site capacities [MW], comma-separated")
    gd.add_argument("--shift", type=float, help="distribution shift knob (0 = training distribution)")
    gd.add_argument("--start-hour", type=int)
    return p


def resolve_config(args) -> dict:
    """Merge defaults, the config file and command-line flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        data = read_json(args.config)
        if not isinstance(data, dict):
            raise InputError(f"{args.config}: config must be a JSON object")
        unknown = sorted(set(data) - set(DEFAULTS))
        if unknown:
            raise InputError(f"{args.config}: unknown config keys {unknown}")
        base = Path(args.config).parent
        for key in ("network", "train", "valid", "solution"):
            if isinstance(data.get(key), str):
                data[key] = str(base / data[key])
        cfg.update(data)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["out"] is None:
        cfg["out"] = OUT_DEFAULTS[args.command]
    alpha = float(cfg["alpha"])
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    thetas = cfg["thetas"] if cfg["thetas"] is not None else [cfg["theta"]]
    if isinstance(thetas, str):
        thetas = _float_list(thetas)
    if any(float(t) < 0 for t in list(thetas) + [cfg["theta"]]):
        raise InputError("radii must be nonnegative")
    cfg["thetas"] = [float(t) for t in thetas]
    return cfg


class Context:
    """Lazily loaded inputs shared by the subcommands."""

    def __init__(self, cfg: dict, command: str):
        self.cfg = cfg
        self.command = command
        hashed = {k: v for k, v in cfg.items() if k not in _OUTPUT_KEYS}
        hashed["command"] = command
        self.config_hash = config_hash(hashed)
        self.header = header_line(self.config_hash, cfg["seed"])
        self._network = None
        self._compact = None

    @property
    def network(self):
        if self._network is None:
            cfg = self.cfg
            if cfg["network"]:
                self._network = read_network(cfg["network"])
            elif cfg["case"]:
                self._network = load_case(cfg["case"])
            else:
                raise InputError("give --network or --case")
        return self._network

    @property
    def compact(self):
        if self._compact is None:
            self._compact = assemble(self.network, horizon=self.cfg["horizon"],
                                     ramp_from_initial=bool(self.cfg["ramp_from_initial"]))
        return self._compact

    def samples(self, which: str, required: bool = True) -> SampleSet | None:
        path = self.cfg[which]
        labels = self.compact.omega_labels()
        if path:
            return read_samples_csv(path, expected_labels=labels)
        if which == "train" and self.cfg["case"] and not self.cfg["network"]:
            bundled = resources.files("drlaed").joinpath("data", f"{self.cfg['case']}_train.csv")
            if bundled.is_file():
                with resources.as_file(bundled) as p:
                    return read_samples_csv(p, expected_labels=labels)
        if required:
            raise InputError(f"--{which} samples are required")
        return None

    def validation(self) -> SampleSet:
        valid = self.samples("valid", required=False)
        if valid is None:
            logger.warning("no validation samples given; evaluating on the training samples")
            valid = self.samples("train")
        return valid

    def ambiguity(self, theta=None) -> AmbiguitySpec:
        cfg = self.cfg
        sup = cfg["support"] or {}
        G, h = sup.get("G"), sup.get("h")
        theta = cfg["theta"] if theta is None else theta
        return AmbiguitySpec(theta, cfg["alpha"], cfg["ground_norm"], G, h)

    def settings(self) -> LpSettings:
        tol = self.cfg["tolerances"] or {}
        try:
            return LpSettings(**tol)
        except TypeError as exc:
            raise InputError(f"bad tolerances entry: {exc}") from None

    def method_spec(self, theta=None) -> MethodSpec:
        m = self.cfg["method"]
        if m in ("drcvp", "drccp-robust"):
            return MethodSpec(m, self.ambiguity(theta))
        if m == "deterministic-oracle":
            valid = self.samples("valid")
            row = int(self.cfg["realized_row"])
            if not 0 <= row < valid.N:
                raise InputError(f"realized row {row} outside 0..{valid.N - 1}")
            return MethodSpec(m, realized=valid.samples[row])
        return MethodSpec(m)


def _json_number(v):
    return None if v is None else float(fmt(v))


def cmd_solve(ctx: Context) -> int:
    cfg = ctx.cfg
    spec = ctx.method_spec()
    train = None if spec.method == "deterministic-oracle" else ctx.samples("train")
    if cfg["mps"]:
        lp, _ = build_master(spec, ctx.compact, train)
        write_mps(lp, cfg["mps"])
    try:
        sol = solve_dispatch(spec, ctx.compact, train, settings=ctx.settings())
    except SolverFailure:
        raise
    except DispatchError as exc:
        sol = exc.solution
        logger.warning("%s", exc)
    out = sol.to_dict()
    out["objective"] = _json_number(out["objective"])
    if out["x"] is not None:
        out["x"] = [_json_number(v) for v in out["x"]]
    doc = {"header": {"tool": "drlaed", "version": __version__, "config_hash": ctx.config_hash,
                      "seed": cfg["seed"]}}
    doc.update(out)
    Path(cfg["out"]).write_text(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_eval(ctx: Context) -> int:
    cfg = ctx.cfg
    if not cfg["solution"]:
        raise InputError("--solution is required")
    doc = read_json(cfg["solution"])
    try:
        status = doc["status"]
        x = doc["x"]
    except (KeyError, TypeError):
        raise InputError(f"{cfg['solution']}: not a solution file") from None
    valid = ctx.validation()
    if x is None:
        row = (doc.get("theta"), doc.get("method"), status, None, None, valid.N)
        write_table(cfg["out"], SWEEP_COLUMNS, [row], ctx.header)
        return 0
    rep = evaluate(np.asarray(x, dtype=float), ctx.compact, valid)
    row = (doc.get("theta"), doc.get("method"), status, rep.cost, rep.violation_frequency, rep.n_valid)
    write_table(cfg["out"], SWEEP_COLUMNS, [row], ctx.header)
    if cfg["histogram"]:
        write_table(cfg["histogram"], ("line", "bin_lo", "bin_hi", "count"), rep.histogram_rows(), ctx.header)
    return 0


def cmd_sweep(ctx: Context) -> int:
    cfg = ctx.cfg
    sup = cfg["support"] or {}
    rows = sweep(cfg["thetas"], cfg["method"], ctx.compact, ctx.samples("train"), ctx.validation(),
                 cfg["alpha"], cfg["ground_norm"], sup.get("G"), sup.get("h"), settings=ctx.settings())
    write_table(cfg["out"], SWEEP_COLUMNS, [r.as_tuple() for r in rows], ctx.header)
    return 0


def cmd_bounds(ctx: Context) -> int:
    box = build_box(ctx.samples("train"), ctx.ambiguity())
    with open(ctx.cfg["out"], "w") as fh:
        box.to_csv(fh, ctx.header)
    return 0


def cmd_ptdf(ctx: Context) -> int:
    net = ctx.network
    ptdf = build_ptdf(net)
    cols = ["line", "from", "to"] + [str(b) for b in net.buses]
    rows = [[e, ln.from_bus, ln.to_bus] + list(ptdf.entries[e]) for e, ln in enumerate(net.lines)]
    write_table(ctx.cfg["out"], cols, rows, ctx.header)
    return 0


def cmd_export(ctx: Context) -> int:
    cp = ctx.compact
    out = Path(ctx.cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    xcols = [f"p{i}_t{t}" for t in range(cp.horizon) for i in range(cp.n_gen)]
    write_table(out / "c.csv", ["c"], [[v] for v in cp.c], ctx.header)
    write_table(out / "A.csv", xcols, cp.A.tolist(), ctx.header)
    write_table(out / "b.csv", ["row", "b"], zip(cp.det_row_names, cp.b), ctx.header)
    write_table(out / "D.csv", xcols, cp.D.tolist(), ctx.header)
    write_table(out / "E.csv", cp.omega_labels(), cp.E.tolist(), ctx.header)
    write_table(out / "f.csv", ["row", "f"], zip(cp.row_names, cp.f), ctx.header)
    return 0


def cmd_gen_data(ctx: Context) -> int:
    cfg = ctx.cfg
    net = ctx.network
    T = cfg["horizon"] or net.horizon
    cap = cfg["capacity"] if cfg["capacity"] is not None else [100.0] * net.n_res
    if isinstance(cap, (int, float)):
        cap = [float(cap)] * net.n_res
    if len(cap) != net.n_res:
        raise InputError(f"--capacity needs {net.n_res} values, one per renewable site")
    samples = solar_samples(int(cfg["n"]), cap, T, seed=int(cfg["seed"]), shift=float(cfg["shift"]),
                            start_hour=int(cfg["start_hour"]))
    write_samples_csv(cfg["out"], samples, ctx.header)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "ptdf": cmd_ptdf,
    "export": cmd_export,
    "gen-data": cmd_gen_data,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](Context(cfg, args.command))
    except (InputError, argparse.ArgumentTypeError) as exc:
        print(f"drlaed: input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"drlaed: input error: {exc}", file=sys.stderr)
        return 2
    except DrlaedError as exc:
        print(f"drlaed: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
