"""Run artifact writers: bounds CSV, route/selection reports, metadata.

The bounds CSV is byte-deterministic for a fixed instance and config, so
repeated runs can be diffed; per-iteration wall times are therefore kept
out of the CSV (its iter_wall_ms column is left blank) and recorded in the
metadata file instead.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .instance import Instance
from .routing import replay_route
from .network import TransformedNetwork
from .solver import RunResult, SolverConfig

BOUNDS_COLUMNS = ("iteration", "step_size", "lb", "ub", "best_lb", "best_ub",
                  "gap", "stations", "unserved", "iter_wall_ms")


@dataclass(frozen=True)
class RunArtifacts:
    bounds_csv: Path
    routes_report: Path
    selection_report: Path
    metadata: Path
    lp_export: Optional[Path] = None


def _f(x: float) -> str:
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    return repr(float(x))


def bounds_csv_text(inst: Instance, result: RunResult) -> str:
    lines = [",".join(BOUNDS_COLUMNS)]
    for rec in result.trace:
        stations = "|".join(sorted(inst.node_name(k) for k in rec.ub_selection))
        lines.append(",".join([
            str(rec.iteration), _f(rec.step_size), _f(rec.lower_bound),
            _f(rec.upper_bound), _f(rec.best_lower), _f(rec.best_upper),
            _f(rec.gap), stations, str(len(rec.ub.unserved)), ""]))
    return "\n".join(lines) + "\n"


def routes_report_text(inst: Instance, net: TransformedNetwork,
                       result: RunResult) -> str:
    """One line per route segment; routes are replayed before writing and
    a report is never emitted for a route that fails replay."""
    lines = ["vehicle,node,time,resource,arc_kind,arc_cost"]
    for vid in sorted(result.routes):
        route = result.routes[vid]
        replay_route(route, net)
        for arc in route.arcs:
            s = arc.from_state
            lines.append(f"{vid},{net.node_names[s.node]},{s.time},{s.resource},"
                         f"{arc.kind},{_f(arc.cost)}")
    return "\n".join(lines) + "\n"


def selection_report_text(inst: Instance, result: RunResult) -> str:
    lines = [f"status={result.status}"]
    names = sorted(inst.node_name(k) for k in result.selection)
    build = sum(s.build_cost for s in inst.stations if s.node in result.selection)
    lines.append("stations=" + "|".join(names))
    lines.append(f"build_cost={_f(build)}")
    lines.append(f"budget={_f(inst.budget)}")
    lines.append(f"best_upper={_f(result.best_upper)}")
    lines.append(f"best_lower={_f(result.best_lower)}")
    lines.append(f"gap={_f(result.gap)}")
    lines.append(f"unserved={len(result.unserved)}")
    for d in result.unserved:
        lines.append(f"unserved_demand={inst.node_name(d.from_node)},"
                     f"{inst.node_name(d.to_node)},{d.depart},{d.arrive}")
    return "\n".join(lines) + "\n"


def metadata_text(inst_text: str, config: SolverConfig, result: RunResult,
                  instance_path: str) -> str:
    digest = hashlib.sha256(inst_text.encode()).hexdigest()
    pen = "auto" if config.virtual_penalty is None else _f(config.virtual_penalty)
    seed = "none" if config.ordering_seed is None else str(config.ordering_seed)
    lines = [
        f"instance={instance_path}",
        f"instance_sha256={digest}",
        f"max_iterations={config.max_iterations}",
        f"termination_delta={_f(config.termination_delta)}",
        f"step_rule={config.step_rule}",
        f"step_scale={_f(config.step_scale)}",
        f"virtual_penalty={pen}",
        f"ordering_seed={seed}",
        f"status={result.status}",
        f"iterations={len(result.trace)}",
        "iter_wall_ms=" + "|".join(f"{rec.wall_ms:.3f}" for rec in result.trace),
    ]
    return "\n".join(lines) + "\n"


def write_run_artifacts(out_dir, inst: Instance, net: TransformedNetwork,
                        config: SolverConfig, result: RunResult,
                        inst_text: str, instance_path: str) -> RunArtifacts:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bounds = out / "bounds.csv"
    bounds.write_text(bounds_csv_text(inst, result))
    routes = out / "routes.csv"
    routes.write_text(routes_report_text(inst, net, result))
    selection = out / "selection.txt"
    selection.write_text(selection_report_text(inst, result))
    meta = out / "run.meta"
    meta.write_text(metadata_text(inst_text, config, result, instance_path))
    return RunArtifacts(bounds, routes, selection, meta)
