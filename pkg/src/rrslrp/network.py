"""Resource-space-time (RST) network generated on demand.

States are (node, time, resource) triples; arcs encode traveling, waiting,
recharging and end-of-trip resource exhaustion.  The full arc set is never
materialized: ``outgoing_arcs`` enumerates a state's successors, which is
the contract every solver component builds on.

Each candidate station node k is split into an entry node (keeps k's id
and name) and an exit node (new id, name "k'").  Inbound physical links
keep targeting the entry node; outbound links leave from the exit node.
The pair is joined by one zero-gain pass-through arc of one time unit and
one recharge arc per profile entry, so recharging can only happen on those
dedicated arcs and each traversal consumes one unit of station capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .instance import Instance, ArcOption, Station, Vehicle, DemandLink, option_lookup

TRAVEL = "travel"
WAIT = "wait"
RECHARGE = "recharge"
EXHAUST = "exhaust"


class RstState(NamedTuple):
    node: int
    time: int
    resource: int


class RstArc(NamedTuple):
    from_state: RstState
    to_state: RstState
    cost: float
    kind: str


class ArcError(ValueError):
    """Raised when two states are not joined by any RST arc."""


@dataclass
class TransformedNetwork:
    """Station-split network plus the lookup tables the solvers need."""

    inst: Instance
    node_names: list[str]
    phys: list[int]                 # transformed node -> original node id
    out_travel: list[list[tuple[int, int, float, int]]]  # per node: (to, tt, cost, delta)
    station_at_entry: dict[int, Station]   # entry node id -> station
    exit_of: dict[int, int]                # entry node id -> exit node id
    demand_of: dict[tuple[int, int, int, int], DemandLink]  # (pi,pj,t,t') -> demand

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    def id_of(self, name: str) -> int:
        return self.node_names.index(name)

    def state(self, name: str, time: int, resource: int) -> RstState:
        return RstState(self.id_of(name), time, resource)

    def travel_option(self, i: int, j: int, tt: int) -> Optional[ArcOption]:
        for to, t, cost, delta in self.out_travel[i]:
            if to == j and t == tt:
                return ArcOption(t, cost, delta)
        return None

    def demand_match(self, i: int, j: int, t: int, t2: int) -> Optional[DemandLink]:
        return self.demand_of.get((self.phys[i], self.phys[j], t, t2))


def transform_stations(inst: Instance) -> TransformedNetwork:
    """Split every station node into an entry/exit pair (see module doc).

    An instance without stations maps onto an isomorphic network: same
    node count, same arcs.
    """
    names = list(inst.node_names)
    phys = list(range(len(names)))
    station_at_entry: dict[int, Station] = {}
    exit_of: dict[int, int] = {}
    for st in inst.stations:
        exit_id = len(names)
        names.append(inst.node_names[st.node] + "'")
        phys.append(st.node)
        station_at_entry[st.node] = st
        exit_of[st.node] = exit_id

    out_travel: list[list[tuple[int, int, float, int]]] = [[] for _ in names]
    for link in inst.links:
        src = exit_of.get(link.from_node, link.from_node)
        for o in link.options:
            out_travel[src].append(
                (link.to_node, o.travel_time, o.travel_cost, o.resource_delta))
    for lst in out_travel:
        lst.sort(key=lambda rec: (rec[0], rec[1]))

    demand_of = {(d.from_node, d.to_node, d.depart, d.arrive): d for d in inst.demands}
    return TransformedNetwork(inst, names, phys, out_travel,
                              station_at_entry, exit_of, demand_of)


def consumption_rate(speed: float) -> float:
    """Resource units consumed per time unit when traveling at ``speed``."""
    return -0.064 + 0.0056 * speed + 0.00026 * (speed - 50.0) ** 2


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def derive_arc_options(link_length: float, speeds: list[float],
                       scale: float = 1.0) -> list[ArcOption]:
    """Build speed-dependent arc options for a link of the given length.

    Each speed yields travel_time = round(length / speed) clamped to >= 1
    and a consumption of round(rate * travel_time * scale) resource units.
    When two speeds round to the same travel time only the option with the
    smallest consumption is kept.  Cost equals travel time.
    """
    if link_length <= 0:
        raise ValueError("link_length must be positive")
    if not speeds:
        raise ValueError("speeds must be nonempty")
    by_tt: dict[int, int] = {}
    for v in speeds:
        tt = max(1, _round_half_up(link_length / v))
        used = _round_half_up(consumption_rate(v) * tt * scale)
        if tt not in by_tt or used < by_tt[tt]:
            by_tt[tt] = used
    return [ArcOption(tt, float(tt), -used) for tt, used in sorted(by_tt.items())]


def outgoing_arcs(state: RstState, vehicle: Vehicle, net: TransformedNetwork,
                  forbidden_stations: Optional[set[int]] = None,
                  remaining_capacity: Optional[dict[int, int]] = None) -> list[RstArc]:
    """Enumerate the successors of ``state`` for ``vehicle``.

    Deterministic order: travel arcs sorted by (to-node, travel_time),
    then the in-place waiting arc, then the station pass-through arc, then
    recharge arcs sorted by (duration, gain), then the exhaust arc.
    Candidates leaving the grid or the vehicle's [resource_min, capacity]
    range are silently omitted.  ``forbidden_stations`` / zero
    ``remaining_capacity`` suppress recharge arcs (upper-bound mode).
    """
    inst = net.inst
    i, t, r = state
    rmin = inst.resource_min
    horizon = inst.horizon
    arcs: list[RstArc] = []

    for j, tt, cost, delta in net.out_travel[i]:
        t2, r2 = t + tt, r + delta
        if t2 <= horizon and r2 >= rmin:
            arcs.append(RstArc(state, RstState(j, t2, r2), cost, TRAVEL))

    if t + 1 <= horizon:
        arcs.append(RstArc(state, RstState(i, t + 1, r), 0.0, WAIT))

    st = net.station_at_entry.get(i)
    if st is not None:
        exit_id = net.exit_of[i]
        if t + 1 <= horizon:
            arcs.append(RstArc(state, RstState(exit_id, t + 1, r), 0.0, WAIT))
        blocked = (
            (forbidden_stations is not None and st.node in forbidden_stations)
            or (remaining_capacity is not None and remaining_capacity.get(st.node, 0) <= 0))
        if not blocked:
            for dur, gain in sorted(st.profile):
                t2 = t + dur
                if t2 > horizon:
                    continue
                r2 = min(r + gain, vehicle.capacity)
                if r2 <= r:
                    continue
                cost = st.recharge_price * (r2 - r)
                arcs.append(RstArc(state, RstState(exit_id, t2, r2), cost, RECHARGE))

    # destinations are physical, so both halves of a split station qualify
    if (net.phys[i] == vehicle.destination
            and vehicle.arrive_window[0] <= t <= vehicle.arrive_window[1]):
        arcs.append(RstArc(state, RstState(i, t, rmin), 0.0, EXHAUST))
    return arcs


def arc_between(net: TransformedNetwork, a: RstState, b: RstState) -> RstArc:
    """Classify the arc joining two adjacent states (cost included).

    Used by route replay and DP traceback; raises ArcError when the states
    are not joined by any arc the network can generate.
    """
    i, t, r = a
    j, t2, r2 = b
    if t2 == t and j == i and r2 == net.inst.resource_min:
        return RstArc(a, b, 0.0, EXHAUST)
    if t2 <= t:
        raise ArcError(f"no forward arc {a} -> {b}")
    if j == i and t2 == t + 1 and r2 == r:
        return RstArc(a, b, 0.0, WAIT)
    st = net.station_at_entry.get(i)
    if st is not None and j == net.exit_of[i]:
        if t2 == t + 1 and r2 == r:
            return RstArc(a, b, 0.0, WAIT)  # pass-through without recharging
        if r2 > r:
            for dur, gain in sorted(st.profile):
                # a gain clamped at vehicle capacity lands below r + gain
                if t2 == t + dur and r2 <= r + gain:
                    return RstArc(a, b, st.recharge_price * (r2 - r), RECHARGE)
    opt = net.travel_option(i, j, t2 - t)
    if opt is not None and r + opt.resource_delta == r2:
        return RstArc(a, b, opt.travel_cost, TRAVEL)
    raise ArcError(f"no arc {a} -> {b}")
