"""Shared test utilities: random instance generation and an exhaustive
path-enumeration oracle for single-vehicle routing.

The enumeration oracle deliberately mirrors nothing of the label-sweep
implementation: it walks every feasible path through ``outgoing_arcs``
recursively and takes the best sink value.
"""

from __future__ import annotations

import numpy as np

from rrslrp.instance import (ArcOption, DemandLink, Instance, PhysicalLink,
                             Station, Vehicle, validate_instance)
from rrslrp.network import EXHAUST, outgoing_arcs, transform_stations
from rrslrp.routing import Multipliers, profit_arc_cost, solve_single_vehicle


def random_micro_instance(rng: np.random.Generator, *, max_nodes=6,
                          max_vehicles=2, max_stations=2, max_demands=2,
                          horizon_range=(8, 14), resource_range=(8, 14),
                          require_routable=True) -> Instance:
    """Small random instance; every vehicle has a feasible tour when all
    stations are usable (regenerated otherwise)."""
    for _ in range(60):
        n = int(rng.integers(2, max_nodes + 1))
        horizon = int(rng.integers(*horizon_range, endpoint=True))
        resource_max = int(rng.integers(*resource_range, endpoint=True))

        links = []
        pairs = set()
        for i in range(n):
            outs = rng.choice([j for j in range(n) if j != i],
                              size=min(n - 1, int(rng.integers(1, 4))),
                              replace=False)
            for j in outs:
                if (i, int(j)) in pairs:
                    continue
                pairs.add((i, int(j)))
                opts = []
                tts = set()
                for _ in range(int(rng.integers(1, 3))):
                    tt = int(rng.integers(1, 4))
                    if tt in tts:
                        continue
                    tts.add(tt)
                    opts.append(ArcOption(tt, float(rng.integers(1, 4) * tt),
                                          -int(rng.integers(1, 3)) * tt))
                links.append(PhysicalLink(i, int(j), tuple(opts)))
        if not links:
            continue

        n_st = int(rng.integers(0, max_stations + 1))
        st_nodes = rng.choice(n, size=min(n, n_st), replace=False) if n_st else []
        stations = []
        for node in st_nodes:
            gain = int(rng.integers(3, max(4, resource_max)))
            dur = int(rng.integers(1, 3))
            profile = [(dur, gain)]
            if rng.random() < 0.5 and dur + 1 <= 3:
                profile.append((dur + 1, gain + int(rng.integers(0, 4))))
            stations.append(Station(int(node), float(rng.integers(0, 13)),
                                    int(rng.integers(1, 3)), tuple(sorted(profile))))

        vehicles = []
        for k in range(int(rng.integers(1, max_vehicles + 1))):
            origin = int(rng.integers(0, n))
            dest = origin if rng.random() < 0.7 else int(rng.integers(0, n))
            cap = int(rng.integers(max(2, resource_max // 2), resource_max + 1))
            init = int(rng.integers(max(1, cap // 3), cap + 1))
            dep_lo = int(rng.integers(0, 3))
            dep_hi = dep_lo + int(rng.integers(0, 2))
            arr_hi = horizon
            arr_lo = max(dep_lo, horizon - int(rng.integers(2, 6)))
            vehicles.append(Vehicle(str(k + 1), origin, dest, (dep_lo, dep_hi),
                                    (arr_lo, arr_hi), cap, init))

        demands = []
        options = [(l.from_node, l.to_node, o.travel_time)
                   for l in links for o in l.options]
        for _ in range(int(rng.integers(0, max_demands + 1))):
            i, j, tt = options[int(rng.integers(0, len(options)))]
            depart = int(rng.integers(1, max(2, horizon - tt)))
            d = DemandLink(i, j, depart, depart + tt)
            if d not in demands:
                demands.append(d)

        inst = Instance(
            node_names=tuple(f"n{k}" for k in range(n)),
            links=tuple(links), stations=tuple(stations),
            vehicles=tuple(vehicles), demands=tuple(demands),
            budget=float(rng.integers(0, 25)), horizon=horizon,
            resource_max=resource_max,
        )
        if validate_instance(inst):
            continue
        if require_routable:
            net = transform_stations(inst)
            zero = Multipliers.zeros(inst)
            if any(solve_single_vehicle(v, net, zero) is None
                   for v in inst.vehicles):
                continue
        return inst
    raise RuntimeError("could not generate a feasible micro instance")


def enumerate_min_generalized(vehicle, net, multipliers,
                              path_cap: int = 2_000_000):
    """Exhaustive DFS over all feasible paths; min generalized sink cost.

    Returns (best_cost, visited_arc_count); best_cost is None when no
    path reaches a sink.
    """
    from rrslrp.network import RstState

    best = [None]
    visited = [0]

    def walk(state, acc):
        visited[0] += 1
        if visited[0] > path_cap:
            raise RuntimeError("path cap exceeded")
        for arc in outgoing_arcs(state, vehicle, net):
            cost = acc + profit_arc_cost(arc, multipliers, net)
            if arc.kind == EXHAUST:
                if best[0] is None or cost < best[0]:
                    best[0] = cost
            else:
                walk(arc.to_state, cost)

    for t in range(vehicle.depart_window[0], vehicle.depart_window[1] + 1):
        walk(RstState(vehicle.origin, t, vehicle.initial_resource), 0.0)
    return best[0], visited[0]


def random_multipliers(rng: np.random.Generator, inst: Instance) -> Multipliers:
    eps = {d: float(rng.integers(0, 12)) for d in inst.demands}
    theta = {s.node: float(rng.integers(0, 4)) for s in inst.stations}
    return Multipliers(eps, theta)
