"""Command-line front end.

Subcommands: ``solve`` (run the Lagrangian solver and write artifacts),
``validate`` (check an instance file), ``export-lp`` (write the exact
model), ``oracle`` (brute-force optimum for small instances).

Exit codes: 0 success, 1 instance or size error, 2 solver finished without
a feasible incumbent, 64 usage errors (unknown flags, missing files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .instance import InstanceError, parse_instance, validate_instance
from .lp_export import LpSizeError, export_lp
from .network import transform_stations
from .oracle import (OracleInfeasibleError, OracleLimitError, OracleLimits,
                     brute_force_optimum)
from .reporting import write_run_artifacts
from .solver import SolverConfig, run

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2, which we reserve
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _build_parser() -> _Parser:
    p = _Parser(prog="rrslrp",
                description="Recharging-station location-routing solver")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_instance(sp):
        sp.add_argument("--instance", required=True, help="instance file path")

    solve = sub.add_parser("solve", help="run the Lagrangian solver")
    add_instance(solve)
    solve.add_argument("--max-iters", type=int, default=50)
    solve.add_argument("--term-delta", type=float, default=1e-6)
    solve.add_argument("--penalty", default="auto",
                       help="virtual vehicle penalty (number or 'auto')")
    solve.add_argument("--step", choices=["harmonic", "ratio"], default="harmonic")
    solve.add_argument("--step-scale", type=float, default=1.0)
    solve.add_argument("--out", default="run_artifacts", help="artifact directory")
    solve.add_argument("--seed", type=int, default=None,
                       help="upper-bound vehicle ordering seed")

    val = sub.add_parser("validate", help="check an instance file")
    add_instance(val)

    lp = sub.add_parser("export-lp", help="write the exact model in LP format")
    add_instance(lp)
    lp.add_argument("--out", default="run_artifacts")
    lp.add_argument("--var-cap", type=int, default=2_000_000)

    orc = sub.add_parser("oracle", help="brute-force optimum (small instances)")
    add_instance(orc)
    orc.add_argument("--limit-states", type=int, default=5_000_000)
    return p


def _load(path_str: str):
    path = Path(path_str)
    if not path.exists():
        sys.stderr.write(f"error: no such file: {path}\n")
        raise SystemExit(USAGE_EXIT)
    text = path.read_text()
    return parse_instance(text), text


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        inst, text = _load(args.instance)
    except InstanceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1

    if args.command == "validate":
        violations = validate_instance(inst)
        for v in violations:
            sys.stderr.write(f"{v.code}: {v.message}\n")
        if violations:
            return 1
        print(f"OK: {len(inst.node_names)} nodes, {len(inst.links)} links, "
              f"{len(inst.stations)} stations, {len(inst.vehicles)} vehicles, "
              f"{len(inst.demands)} demands")
        return 0

    if args.command == "solve":
        penalty = None if args.penalty == "auto" else float(args.penalty)
        config = SolverConfig(
            max_iterations=args.max_iters,
            termination_delta=args.term_delta,
            step_rule=args.step,
            step_scale=args.step_scale,
            virtual_penalty=penalty,
            ordering_seed=args.seed,
        )
        try:
            result = run(inst, config)
        except InstanceError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        net = transform_stations(inst)
        artifacts = write_run_artifacts(args.out, inst, net, config, result,
                                        text, args.instance)
        names = "|".join(sorted(inst.node_name(k) for k in result.selection))
        print(f"status={result.status} iterations={len(result.trace)} "
              f"best_lb={result.best_lower} best_ub={result.best_upper} "
              f"gap={result.gap} stations={names}")
        print(f"artifacts: {artifacts.bounds_csv} {artifacts.routes_report} "
              f"{artifacts.selection_report} {artifacts.metadata}")
        return 2 if result.status == "no_feasible_incumbent" else 0

    if args.command == "export-lp":
        try:
            lp_text = export_lp(inst, var_cap=args.var_cap)
        except (InstanceError, LpSizeError) as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "model.lp"
        path.write_text(lp_text)
        print(f"wrote {path}")
        return 0

    if args.command == "oracle":
        limits = OracleLimits(max_states=args.limit_states)
        try:
            res = brute_force_optimum(inst, limits)
        except (InstanceError, OracleLimitError, OracleInfeasibleError) as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        names = "|".join(sorted(inst.node_name(k) for k in res.selection))
        print(f"optimum={res.optimum} stations={names} unserved={res.unserved}")
        return 0

    raise AssertionError("unreachable")


def console_entry():  # pragma: no cover - thin wrapper
    raise SystemExit(main())
