"""Write the joint location-routing model as an LP-format text file.

The exported model is the arc-flow formulation over the materialized RST
grid: binary arc variables per vehicle, binary build variables per
station, and binary drop variables per demand priced at the virtual
penalty (so the model stays feasible and comparable with the solver's
objective).  Flow starts from a per-vehicle seed set (origin, departure
window, initial resource), ends through exhaust arcs counted once, and is
conserved at every other state.  Since every non-exhaust arc strictly
increases time, the flow polytope contains exactly the vehicle's routes.

Only sensible for small grids; ``export_lp`` refuses above a variable cap
and reports the materialized count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .instance import Instance, check_instance, effective_penalty
from .network import TransformedNetwork, transform_stations


class LpSizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class LpArc:
    i: int
    j: int
    t: int
    t2: int
    r: int
    r2: int
    cost: float
    kind: str
    station: int = -1   # owning station node for recharge arcs
    demand: int = -1    # demand index served by this arc, if any


def _vehicle_arcs(inst: Instance, net: TransformedNetwork, veh) -> Iterator[LpArc]:
    T, rmin = inst.horizon, inst.resource_min
    q = veh.capacity
    demand_idx = {(d.from_node, d.to_node, d.depart, d.arrive): k
                  for k, d in enumerate(inst.demands)}
    for i in range(net.n_nodes):
        for j, tt, cost, delta in net.out_travel[i]:
            lo = max(rmin, rmin - delta)
            for t in range(0, T - tt + 1):
                d = demand_idx.get((net.phys[i], net.phys[j], t, t + tt), -1)
                for r in range(lo, q + 1):
                    yield LpArc(i, j, t, t + tt, r, r + delta, cost, "travel",
                                demand=d)
        for t in range(0, T):
            for r in range(rmin, q + 1):
                yield LpArc(i, i, t, t + 1, r, r, 0.0, "wait")
        st = net.station_at_entry.get(i)
        if st is not None:
            exit_id = net.exit_of[i]
            for t in range(0, T):
                for r in range(rmin, q + 1):
                    yield LpArc(i, exit_id, t, t + 1, r, r, 0.0, "wait")
            for dur, gain in sorted(st.profile):
                for t in range(0, T - dur + 1):
                    for r in range(rmin, q + 1):
                        r2 = min(r + gain, q)
                        if r2 > r:
                            yield LpArc(i, exit_id, t, t + dur, r, r2,
                                        st.recharge_price * (r2 - r),
                                        "recharge", station=st.node)
        if net.phys[i] == veh.destination:
            for t in range(veh.arrive_window[0], veh.arrive_window[1] + 1):
                for r in range(rmin, q + 1):
                    yield LpArc(i, i, t, t, r, rmin, 0.0, "exhaust")


def lp_counts(inst: Instance) -> dict:
    """Expected row/column counts of the export, in closed form.

    rows = objective + budget (present iff stations exist)
         + per vehicle: seed row + sink row
           + balance rows: |nodes| * (horizon+1) * (capacity - rmin + 1)
             minus the departure-window seed states
         + one capacity row per station + one covering row per demand.
    columns = per-vehicle arc variables + station builds + demand drops.
    """
    net = transform_stations(inst)
    T, rmin = inst.horizon, inst.resource_min
    n = net.n_nodes
    cols = len(inst.stations) + len(inst.demands)
    rows = 1 + (1 if inst.stations else 0)
    rows += len(inst.stations) + len(inst.demands)
    for veh in inst.vehicles:
        width = veh.capacity - rmin + 1
        seeds = veh.depart_window[1] - veh.depart_window[0] + 1
        rows += 2 + n * (T + 1) * width - seeds
        arcs = 0
        for i in range(n):
            for j, tt, cost, delta in net.out_travel[i]:
                span = max(0, T - tt + 1)
                arcs += span * max(0, veh.capacity - max(rmin, rmin - delta) + 1)
            arcs += T * width  # waits
            st = net.station_at_entry.get(i)
            if st is not None:
                arcs += T * width  # pass-through
                for dur, gain in sorted(st.profile):
                    arcs += max(0, T - dur + 1) * max(0, veh.capacity - rmin)
            if net.phys[i] == veh.destination:
                arcs += (veh.arrive_window[1] - veh.arrive_window[0] + 1) * width
        cols += arcs
    return {"rows": rows, "cols": cols}


def headline_size(inst: Instance) -> dict:
    """Size of the fully dense formulation (every RST node pair), for the
    refusal message: |V| * |N|^2 + stations binaries over N = grid states."""
    net = transform_stations(inst)
    states = net.n_nodes * (inst.horizon + 1) * (inst.resource_max - inst.resource_min + 1)
    return {"dense_binaries": len(inst.vehicles) * states * states + len(inst.stations)}


def export_lp(inst: Instance, var_cap: int = 2_000_000) -> str:
    """Render the instance's exact model in LP text format."""
    check_instance(inst)
    net = transform_stations(inst)
    counts = lp_counts(inst)
    if counts["cols"] > var_cap:
        raise LpSizeError(
            f"materialized model has {counts['cols']} variables "
            f"(cap {var_cap}; dense headline {headline_size(inst)['dense_binaries']})")
    penalty = effective_penalty(inst)
    rmin = inst.resource_min

    obj_terms: list[str] = []
    rows: list[str] = []
    binaries: list[str] = []

    # per-(vehicle) bookkeeping for the shared station/demand rows
    cap_terms: dict[int, list[str]] = {s.node: [] for s in inst.stations}
    dem_terms: dict[int, list[str]] = {k: [] for k in range(len(inst.demands))}

    for veh in inst.vehicles:
        vid = veh.id
        q = veh.capacity
        seeds = {(veh.origin, t, veh.initial_resource)
                 for t in range(veh.depart_window[0], veh.depart_window[1] + 1)}
        inflow: dict[tuple[int, int, int], list[str]] = {}
        outflow: dict[tuple[int, int, int], list[str]] = {}
        sink_terms: list[str] = []

        for a in _vehicle_arcs(inst, net, veh):
            name = f"x_{vid}_{a.i}_{a.j}_{a.t}_{a.t2}_{a.r}_{a.r2}"
            binaries.append(name)
            if a.cost:
                obj_terms.append(f"+ {_fmt(a.cost)} {name}")
            outflow.setdefault((a.i, a.t, a.r), []).append(name)
            if a.kind == "exhaust":
                sink_terms.append(name)   # absorbed by the super sink
            else:
                inflow.setdefault((a.j, a.t2, a.r2), []).append(name)
            if a.kind == "recharge":
                cap_terms[a.station].append(name)
            if a.demand >= 0:
                dem_terms[a.demand].append(name)

        seed_expr = []
        for s in sorted(seeds):
            seed_expr += [f"+ {n}" for n in outflow.get(s, [])]
            seed_expr += [f"- {n}" for n in inflow.get(s, [])]
        rows.append(f" src_{vid}: " + " ".join(seed_expr) + " = 1")
        rows.append(f" snk_{vid}: " + " ".join(f"+ {n}" for n in sink_terms) + " = 1")

        for i in range(net.n_nodes):
            for t in range(inst.horizon + 1):
                for r in range(rmin, q + 1):
                    key = (i, t, r)
                    if key in seeds:
                        continue
                    expr = [f"+ {n}" for n in inflow.get(key, [])]
                    expr += [f"- {n}" for n in outflow.get(key, [])]
                    rows.append(f" bal_{vid}_{i}_{t}_{r}: " + " ".join(expr) + " = 0")

    if inst.stations:
        terms = " ".join(f"+ {_fmt(s.build_cost)} w_{s.node}" for s in inst.stations)
        rows.append(f" budget: {terms} <= {_fmt(inst.budget)}")
        for s in inst.stations:
            expr = " ".join(f"+ {n}" for n in cap_terms[s.node])
            if expr:
                expr += " "
            rows.append(f" cap_{s.node}: {expr}- {s.capacity} w_{s.node} <= 0")
            binaries.append(f"w_{s.node}")
    for k, d in enumerate(inst.demands):
        obj_terms.append(f"+ {_fmt(penalty)} y_{k}")
        expr = " ".join(f"+ {n}" for n in dem_terms[k])
        if expr:
            expr += " "
        rows.append(f" dem_{k}: {expr}+ y_{k} >= 1")
        binaries.append(f"y_{k}")

    if obj_terms:
        objective = " ".join(obj_terms)
    else:
        objective = f"0 {binaries[0]}" if binaries else "0 x_none"
    out = ["Minimize", " obj: " + objective]
    out.append("Subject To")
    out.extend(rows)
    out.append("Binary")
    out.extend(f" {n}" for n in binaries)
    out.append("End")
    return "\n".join(out) + "\n"


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))
