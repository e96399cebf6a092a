"""Single-vehicle minimum generalized-cost routing over the RST network.

Forward dynamic programming in time order.  Negative arc costs are fine:
every non-exhaust arc strictly increases time, so the graph is acyclic and
one sweep computes exact optima.  Labels live in a dense
(time, node, resource) array and the sweep runs as a compiled kernel,
which is what makes the large benchmark networks tractable.

Ties keep the earlier-updated predecessor (strict-improvement updates,
fixed scan order: travel arcs by (to-node, travel_time), waiting, station
pass-through, recharge entries by (duration, gain)), so results are
deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .instance import DemandLink, Instance, Vehicle
from .network import (ArcError, EXHAUST, RECHARGE, TRAVEL, WAIT, RstArc, RstState,
                      TransformedNetwork, arc_between)


@dataclass
class Multipliers:
    """Dual prices: epsilon per demand link, theta per station node."""

    epsilon: dict[DemandLink, float] = field(default_factory=dict)
    theta: dict[int, float] = field(default_factory=dict)

    @classmethod
    def zeros(cls, inst: Instance) -> "Multipliers":
        return cls({d: 0.0 for d in inst.demands},
                   {s.node: 0.0 for s in inst.stations})

    def copy(self) -> "Multipliers":
        return Multipliers(dict(self.epsilon), dict(self.theta))

    def arc_credits(self) -> dict[tuple[int, int, int, int], float]:
        return {(d.from_node, d.to_node, d.depart, d.arrive): v
                for d, v in self.epsilon.items() if v != 0.0}


@dataclass
class VehicleRoute:
    vehicle_id: str
    states: list[RstState]
    arcs: list[RstArc]
    generalized_cost: float
    base_cost: float
    served_demands: set[DemandLink]
    station_visits: Counter


def profit_arc_cost(arc: RstArc, multipliers: Multipliers,
                    net: TransformedNetwork) -> float:
    """Generalized arc cost: base cost - demand credit + station price.

    The demand credit applies only when the arc's space-time projection
    matches a demand link exactly (travel arcs; demands never self-loop).
    Theta applies on recharge arcs of the owning station.
    """
    cost = arc.cost
    if arc.kind == TRAVEL:
        d = net.demand_match(arc.from_state.node, arc.to_state.node,
                             arc.from_state.time, arc.to_state.time)
        if d is not None:
            cost -= multipliers.epsilon.get(d, 0.0)
    elif arc.kind == RECHARGE:
        st = net.station_at_entry[arc.from_state.node]
        cost += multipliers.theta.get(st.node, 0.0)
    return cost


def _route_from_traceback(net: TransformedNetwork, vehicle: Vehicle,
                          states: list[RstState], multipliers: Multipliers,
                          generalized: float) -> VehicleRoute:
    arcs = [arc_between(net, a, b) for a, b in zip(states, states[1:])]
    base = sum(a.cost for a in arcs)
    served = set()
    visits: Counter = Counter()
    for a in arcs:
        if a.kind == TRAVEL:
            d = net.demand_match(a.from_state.node, a.to_state.node,
                                 a.from_state.time, a.to_state.time)
            if d is not None:
                served.add(d)
        elif a.kind == RECHARGE:
            visits[net.station_at_entry[a.from_state.node].node] += 1
    return VehicleRoute(vehicle.id, states, arcs, generalized, base, served, visits)


@njit(cache=True)
def _sweep(labels, pred, touched, T, n, rmin, q,
           trav_start, trav_end, trav_to, trav_tt, trav_cost, trav_delta,
           credit, exit_arr, rech_start, rech_end, rech_dur, rech_gain,
           theta_arr, price_arr, rech_allowed):
    INF = np.inf
    stride = labels.shape[2]
    for t in range(T + 1):
        for i in range(n):
            if not touched[t, i]:
                continue
            base = (t * n + i) * stride

            for k in range(trav_start[i], trav_end[i]):
                t2 = t + trav_tt[k]
                if t2 > T:
                    continue
                j = trav_to[k]
                dl = trav_delta[k]
                add = trav_cost[k] + credit[k, t]
                lo = rmin - dl if dl < 0 else rmin
                imp = False
                for r in range(lo, q + 1):
                    c = labels[t, i, r]
                    if c == INF:
                        continue
                    cand = c + add
                    if cand < labels[t2, j, r + dl]:
                        labels[t2, j, r + dl] = cand
                        pred[t2, j, r + dl] = base + r
                        imp = True
                if imp:
                    touched[t2, j] = True

            if t + 1 <= T:
                imp = False
                for r in range(rmin, q + 1):
                    c = labels[t, i, r]
                    if c == INF:
                        continue
                    if c < labels[t + 1, i, r]:
                        labels[t + 1, i, r] = c
                        pred[t + 1, i, r] = base + r
                        imp = True
                if imp:
                    touched[t + 1, i] = True

            ex = exit_arr[i]
            if ex >= 0:
                if t + 1 <= T:
                    imp = False
                    for r in range(rmin, q + 1):
                        c = labels[t, i, r]
                        if c == INF:
                            continue
                        if c < labels[t + 1, ex, r]:
                            labels[t + 1, ex, r] = c
                            pred[t + 1, ex, r] = base + r
                            imp = True
                    if imp:
                        touched[t + 1, ex] = True
                if rech_allowed[i]:
                    th = theta_arr[i]
                    pr = price_arr[i]
                    for e in range(rech_start[i], rech_end[i]):
                        t2 = t + rech_dur[e]
                        if t2 > T:
                            continue
                        g = rech_gain[e]
                        imp = False
                        for r in range(rmin, q + 1):
                            r2 = r + g
                            if r2 > q:
                                r2 = q
                            if r2 <= r:
                                continue
                            c = labels[t, i, r]
                            if c == INF:
                                continue
                            cand = c + th + pr * (r2 - r)
                            if cand < labels[t2, ex, r2]:
                                labels[t2, ex, r2] = cand
                                pred[t2, ex, r2] = base + r
                                imp = True
                        if imp:
                            touched[t2, ex] = True


def _kernel_tables(net: TransformedNetwork):
    """Flattened template arrays for the sweep kernel, cached on the net."""
    cached = getattr(net, "_kernel_tables", None)
    if cached is not None:
        return cached
    n = net.n_nodes
    trav_start = np.zeros(n, dtype=np.int64)
    trav_end = np.zeros(n, dtype=np.int64)
    to, tt, cost, delta = [], [], [], []
    for i in range(n):
        trav_start[i] = len(to)
        for rec in net.out_travel[i]:
            to.append(rec[0])
            tt.append(rec[1])
            cost.append(rec[2])
            delta.append(rec[3])
        trav_end[i] = len(to)

    exit_arr = np.full(n, -1, dtype=np.int64)
    rech_start = np.zeros(n, dtype=np.int64)
    rech_end = np.zeros(n, dtype=np.int64)
    durs, gains = [], []
    price_arr = np.zeros(n)
    for i in range(n):
        rech_start[i] = len(durs)
        st = net.station_at_entry.get(i)
        if st is not None:
            exit_arr[i] = net.exit_of[i]
            price_arr[i] = st.recharge_price
            for d, g in sorted(st.profile):
                durs.append(d)
                gains.append(g)
        rech_end[i] = len(durs)

    # (template, departure time) pairs carrying a demand credit
    credit_cells = []
    for i in range(n):
        for k in range(trav_start[i], trav_end[i]):
            for d in net.inst.demands:
                if (net.phys[i] == d.from_node and net.phys[to[k]] == d.to_node
                        and tt[k] == d.arrive - d.depart):
                    credit_cells.append((k, d.depart, d))
    tables = {
        "trav_start": trav_start, "trav_end": trav_end,
        "trav_to": np.array(to, dtype=np.int64),
        "trav_tt": np.array(tt, dtype=np.int64),
        "trav_cost": np.array(cost, dtype=np.float64),
        "trav_delta": np.array(delta, dtype=np.int64),
        "exit_arr": exit_arr,
        "rech_start": rech_start, "rech_end": rech_end,
        "rech_dur": np.array(durs, dtype=np.int64),
        "rech_gain": np.array(gains, dtype=np.int64),
        "price_arr": price_arr,
        "credit_cells": credit_cells,
        "n_templates": len(to),
    }
    net._kernel_tables = tables
    return tables


def solve_single_vehicle(vehicle: Vehicle, net: TransformedNetwork,
                         multipliers: Multipliers,
                         forbidden_stations: Optional[set[int]] = None,
                         remaining_capacity: Optional[dict[int, int]] = None,
                         ) -> Optional[VehicleRoute]:
    """Optimal route for one vehicle under the given dual prices.

    Label costs are swept in increasing time; origin labels are seeded at
    cost 0 for every departure time in the window at the vehicle's initial
    resource.  The returned route is the traceback from the cheapest sink
    (destination, any time in the arrival window, resource_min) reached
    through an exhaust arc.  Returns None when no sink is reachable.

    In upper-bound mode, recharge arcs of ``forbidden_stations`` or of
    stations with zero ``remaining_capacity`` are skipped.
    """
    inst = net.inst
    T, R, rmin = inst.horizon, inst.resource_max, inst.resource_min
    n = net.n_nodes
    q = vehicle.capacity
    INF = np.inf

    labels = np.full((T + 1, n, R + 1), INF)
    pred = np.full((T + 1, n, R + 1), -1, dtype=np.int64)
    touched = np.zeros((T + 1, n), dtype=np.bool_)
    stride = R + 1

    for t in range(vehicle.depart_window[0], vehicle.depart_window[1] + 1):
        labels[t, vehicle.origin, vehicle.initial_resource] = 0.0
        touched[t, vehicle.origin] = True

    tables = _kernel_tables(net)
    credit = np.zeros((max(tables["n_templates"], 1), T + 1))
    for k, t_dep, d in tables["credit_cells"]:
        credit[k, t_dep] = -multipliers.epsilon.get(d, 0.0)

    theta_arr = np.zeros(n)
    rech_allowed = np.ones(n, dtype=np.bool_)
    for node, st in net.station_at_entry.items():
        theta_arr[node] = multipliers.theta.get(st.node, 0.0)
        if forbidden_stations is not None and st.node in forbidden_stations:
            rech_allowed[node] = False
        if (remaining_capacity is not None
                and remaining_capacity.get(st.node, 0) <= 0):
            rech_allowed[node] = False

    _sweep(labels, pred, touched, T, n, rmin, q,
           tables["trav_start"], tables["trav_end"], tables["trav_to"],
           tables["trav_tt"], tables["trav_cost"], tables["trav_delta"],
           credit, tables["exit_arr"], tables["rech_start"], tables["rech_end"],
           tables["rech_dur"], tables["rech_gain"], theta_arr,
           tables["price_arr"], rech_allowed)

    phys = net.phys
    dest_nodes = sorted(i for i in range(n) if phys[i] == vehicle.destination)
    best_val, best_sink = INF, None
    for t in range(vehicle.arrive_window[0], vehicle.arrive_window[1] + 1):
        for i in dest_nodes:
            if not touched[t, i]:
                continue
            vec = labels[t, i, rmin:q + 1]
            k = int(np.argmin(vec))
            if vec[k] < best_val:
                best_val, best_sink = float(vec[k]), RstState(i, t, rmin + k)
    if best_sink is None:
        return None

    states = [best_sink]
    cur = best_sink
    while True:
        p = int(pred[cur.time, cur.node, cur.resource])
        if p < 0:
            break
        r = p % stride
        ti = p // stride
        cur = RstState(ti % n, ti // n, r)
        states.append(cur)
    states.reverse()
    states.append(RstState(best_sink.node, best_sink.time, rmin))  # exhaust
    return _route_from_traceback(net, vehicle, states, multipliers, best_val)


def replay_route(route: VehicleRoute, net: TransformedNetwork) -> dict:
    """Recompute cost and tallies of a route independently of DP labels.

    Walks consecutive states, re-derives each arc from the network
    definition, and checks resource conservation along the way.  Raises
    ArcError for structurally broken routes (non-adjacent states), which
    signals an internal routing bug.
    """
    inst = net.inst
    base = 0.0
    served: set[DemandLink] = set()
    visits: Counter = Counter()
    if len(route.states) < 2:
        raise ArcError("route must contain at least one arc")
    for s in route.states:
        if not (0 <= s.node < net.n_nodes and 0 <= s.time <= inst.horizon
                and inst.resource_min <= s.resource <= inst.resource_max):
            raise ArcError(f"state {s} outside the grid")
    for a, b in zip(route.states, route.states[1:]):
        arc = arc_between(net, a, b)  # enforces kind-specific resource deltas
        base += arc.cost
        if arc.kind == TRAVEL:
            d = net.demand_match(a.node, b.node, a.time, b.time)
            if d is not None:
                served.add(d)
        elif arc.kind == RECHARGE:
            visits[net.station_at_entry[a.node].node] += 1
    return {"base_cost": base, "served_demands": served, "station_visits": visits}
