"""Bundled benchmark instances.

Two desk-scale instances reconstruct published illustrative experiments
from their data tables (the figure-bound geometry is not recoverable, so
link layouts are chosen to reproduce the tables' time and resource
sequences and reported objectives; see the builders).  The two large
instances are synthetic analogues at the reported scales for performance
work, not reproductions.
"""

from __future__ import annotations

from .instance import (ArcOption, DemandLink, Instance, PhysicalLink, Station,
                       Vehicle)
from .network import derive_arc_options


def _links(node_ids, rows):
    """rows: (from_name, to_name, [(tt, cost, delta), ...])"""
    out = []
    for frm, to, opts in rows:
        out.append(PhysicalLink(node_ids[frm], node_ids[to],
                                tuple(ArcOption(*o) for o in opts)))
    return tuple(out)


def experiment_one() -> Instance:
    """One vehicle on a ring through two candidate stations.

    Depot tour c -> ... -> c, horizon 30, capacity 40, initial resource 15,
    four timed demands, stations a and b (build cost 10 each, capacity 3,
    one-step recharge of up to 20 units), budget 15 so only one station
    fits.  Building a is optimal: the single recharge on the way to the
    demand loop lets the vehicle serve all four demands at cost 15.
    """
    names = ("c", "f", "g", "a", "e", "d", "b")
    ids = {n: k for k, n in enumerate(names)}
    links = _links(ids, [
        ("c", "f", [(1, 1.0, -2)]),
        ("f", "g", [(1, 1.0, -2)]),
        ("g", "a", [(1, 1.0, -2)]),
        ("a", "e", [(1, 1.0, -2)]),
        ("e", "d", [(2, 2.0, -4)]),
        ("d", "e", [(1, 1.0, -2)]),
        ("d", "b", [(1, 1.0, -2)]),
        ("b", "e", [(1, 1.0, -2)]),
        ("d", "c", [(3, 3.0, -6)]),
    ])
    return Instance(
        node_names=names,
        links=links,
        stations=(Station(ids["a"], 10.0, 3, ((1, 20),)),
                  Station(ids["b"], 10.0, 3, ((1, 20),))),
        vehicles=(Vehicle("1", ids["c"], ids["c"], (1, 2), (30, 30), 40, 15),),
        demands=(DemandLink(ids["f"], ids["g"], 10, 11),
                 DemandLink(ids["e"], ids["d"], 15, 17),
                 DemandLink(ids["e"], ids["d"], 18, 20),
                 DemandLink(ids["e"], ids["d"], 23, 25)),
        budget=15.0,
        horizon=30,
        resource_max=40,
    )


def experiment_two(cap_c: int = 2, cap_h: int = 2, budget: float = 25.0,
                   order_up_to: bool = False, fast_links: bool = False) -> Instance:
    """Two identical depot vehicles, two timed demands, stations c and h.

    The published route tables pin the arc data: initial resource 6,
    recharges of up to 16 units over two time units at either station, and
    per-link resource use that deviates from twice-travel-time on two
    links.  Station h costs 14 (the budget sweep's remainder column fixes
    it), so c(11)+h(14) fit exactly at budget 25.  With both stations the
    vehicles split across them at total cost 18; with only c both recharge
    there for 19; the vehicle serving the early (f,a) demand cannot use h
    at all.

    ``order_up_to`` adds a half-gain one-unit recharge entry (partial
    recharging); ``fast_links`` adds a one-unit-faster option costing two
    extra resource units on every multi-unit link.
    """
    names = ("a", "b", "c", "e", "f", "g", "h")
    ids = {n: k for k, n in enumerate(names)}
    rows = [
        ("b", "f", [(1, 1.0, -2)]),
        ("f", "a", [(1, 1.0, -2)]),
        ("a", "c", [(1, 1.0, -2)]),
        ("c", "e", [(2, 2.0, -4)]),
        ("c", "g", [(2, 2.0, -2)]),
        ("e", "g", [(1, 1.0, -2)]),
        ("g", "c", [(2, 2.0, -2)]),
        ("g", "f", [(2, 3.0, -4)]),
        ("f", "b", [(1, 1.0, -2)]),
        ("b", "h", [(2, 2.0, -4)]),
        ("h", "e", [(2, 2.0, -4)]),
    ]
    if fast_links:
        rows = [(frm, to, opts + [(opts[0][0] - 1, opts[0][1] - 1.0, opts[0][2] - 2)]
                 if opts[0][0] > 1 else opts)
                for frm, to, opts in rows]
    profile = ((1, 8), (2, 16)) if order_up_to else ((2, 16),)
    return Instance(
        node_names=names,
        links=_links(ids, rows),
        stations=(Station(ids["c"], 11.0, cap_c, profile),
                  Station(ids["h"], 14.0, cap_h, profile)),
        vehicles=(Vehicle("1", ids["b"], ids["b"], (1, 2), (16, 20), 20, 6),
                  Vehicle("2", ids["b"], ids["b"], (1, 2), (16, 20), 20, 6)),
        demands=(DemandLink(ids["e"], ids["g"], 8, 9),
                 DemandLink(ids["f"], ids["a"], 3, 4)),
        budget=budget,
        horizon=20,
        resource_max=20,
    )


def _ring_and_chords(n_nodes: int, n_links: int, chord_step: int,
                     lengths=(60.0, 110.0, 160.0)):
    """Deterministic connected digraph: two-way ring plus one-way chords."""
    rows = []
    for i in range(n_nodes):
        j = (i + 1) % n_nodes
        rows.append((i, j, lengths[i % len(lengths)]))
        rows.append((j, i, lengths[(i + 1) % len(lengths)]))
    k = 0
    while len(rows) < n_links:
        src = k % n_nodes
        dst = (src + chord_step + (k // n_nodes)) % n_nodes
        if dst != src and all(not (a == src and b == dst) for a, b, _ in rows):
            rows.append((src, dst, lengths[k % len(lengths)]))
        k += 1
    return rows[:n_links]


def _grid_instance(n_nodes: int, n_links: int, chord_step: int, n_vehicles: int,
                   n_demands: int, n_stations: int, station_cost: float,
                   station_cap: int, budget: float, horizon: int,
                   resource_max: int, initial: int, capacity: int,
                   speeds=(40.0, 80.0), scale: float = 0.05) -> Instance:
    names = tuple(f"n{k}" for k in range(n_nodes))
    rows = _ring_and_chords(n_nodes, n_links, chord_step)
    links = []
    for src, dst, length in rows:
        opts = derive_arc_options(length, list(speeds), scale=scale)
        links.append(PhysicalLink(src, dst, tuple(opts)))
    links = tuple(links)

    step = max(1, n_nodes // n_stations)
    stations = tuple(
        Station((k * step + 2) % n_nodes, station_cost, station_cap,
                ((1, resource_max // 4), (2, resource_max // 2)))
        for k in range(n_stations))

    vehicles = []
    for k in range(n_vehicles):
        home = (k * 2 + 1) % n_nodes
        vehicles.append(Vehicle(str(k + 1), home, home, (0, 3),
                                (horizon - 25, horizon), capacity, initial))
    opt_of = {}
    for link in links:
        for o in link.options:
            opt_of.setdefault((link.from_node, link.to_node), []).append(o)

    demands = []
    k = 0
    while len(demands) < n_demands:
        link = links[(k * 7 + 1) % len(links)]
        tt = link.options[0].travel_time
        depart = 8 + (k * 5) % (horizon - 40)
        d = DemandLink(link.from_node, link.to_node, depart, depart + tt)
        if d not in demands:
            demands.append(d)
        k += 1

    return Instance(
        node_names=names, links=links, stations=stations,
        vehicles=tuple(vehicles), demands=tuple(demands),
        budget=budget, horizon=horizon, resource_max=resource_max,
    )


def sioux_falls_like() -> Instance:
    """Synthetic 29-node / 81-link analogue of the mid-size benchmark:
    15 vehicles, 12 demands, 5 candidate stations, budget 60.

    A two-way ring with one-way chords.  Nine demands sit on their owning
    vehicle's home link; three live in the ring's station-free north and
    force their servers to recharge mid-tour, so the budget (up to 3 of 5
    candidates) has to land on stations the routes actually use.  Resource
    limits shield each demand from every other vehicle, which keeps the
    dual bound tight.
    """
    n = 29
    names = tuple(f"n{k}" for k in range(n))
    rows = []
    for i in range(n):
        j = (i + 1) % n
        rows.append((i, j, [(2, 2.0, -4)]))
        rows.append((j, i, [(2, 2.0, -4)]))
    for i in range(23):
        # express chords burn more than the initial resource, so only a
        # freshly recharged vehicle can take one
        rows.append((i, (i + 5) % n, [(3, 3.0, -20)]))
    links = tuple(PhysicalLink(a, b, tuple(ArcOption(*o) for o in opts))
                  for a, b, opts in rows)

    station_nodes = (18, 20, 22, 24, 26)
    stations = tuple(Station(s, 20.0, 5, ((1, 10), (2, 20), (3, 30)))
                     for s in station_nodes)

    homes = [1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 25, 0, 0, 0, 0]
    vehicles = tuple(
        Vehicle(str(k + 1), h, h, (0, 5), (70, 100), 40, 15)
        for k, h in enumerate(homes))

    demands = [DemandLink(2 * k + 1, 2 * k + 2, 10 + 5 * k, 12 + 5 * k)
               for k in range(9)]
    demands += [DemandLink(21, 22, 60, 62),   # served from 19 via station 20
                DemandLink(27, 28, 64, 66),   # served from 25 via station 26
                DemandLink(23, 24, 68, 70)]   # served from 19 via station 20

    return Instance(
        node_names=names, links=links, stations=stations, vehicles=vehicles,
        demands=tuple(demands), budget=60.0, horizon=100, resource_max=40,
    )


def chicago_like() -> Instance:
    """Synthetic 933-node / 2967-link analogue of the large benchmark:
    30 vehicles, 40 demands, 40 candidate stations, budget 200."""
    return _grid_instance(
        n_nodes=933, n_links=2967, chord_step=31, n_vehicles=30, n_demands=40,
        n_stations=40, station_cost=10.0, station_cap=3, budget=200.0,
        horizon=110, resource_max=100, initial=80, capacity=100)
