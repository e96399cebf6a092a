"""Lagrangian relaxation driver: subgradient updates, bound computation,
feasible-solution repair, and the iteration loop.

Relax/restore split: the lower bound routes every vehicle independently
with dual prices and ignores station selection and capacity entirely
(those constraints are dualized); the upper bound fixes a budget-feasible
selection, routes vehicles sequentially with live capacity decrements and
demand claiming, and prices the result without multipliers.  Every
reported upper bound passes an independent feasibility audit.

The upper-bound step evaluates a small candidate set of selections each
iteration (the knapsack argmax, a knapsack over the stations the relaxed
routes actually recharged at, and a cheapest-first budget fill) and keeps
the best audited result.  With the multiplier projection at zero, the
knapsack argmax alone never opens a station while capacities exceed relaxed
usage, which would leave the upper bound stuck at the no-station level.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .instance import DemandLink, Instance, check_instance, effective_penalty
from .knapsack import StationSelection, solve_station_selection
from .network import TransformedNetwork, transform_stations
from .routing import Multipliers, VehicleRoute, replay_route, solve_single_vehicle

STEP_HARMONIC = "harmonic"
STEP_RATIO = "ratio"


class AuditError(RuntimeError):
    """An upper-bound solution failed its feasibility audit (internal bug)."""


@dataclass
class SolverConfig:
    """Iteration controls.

    ``termination_delta`` stops the run once the best upper bound improves
    by less than the delta between consecutive iterations; a delta of 0
    disables that test (the run then ends on gap 0 or max_iterations).
    ``step_scale`` only affects the ratio rule.
    """

    max_iterations: int = 50
    termination_delta: float = 1e-6
    step_rule: str = STEP_HARMONIC
    step_scale: float = 1.0
    virtual_penalty: Optional[float] = None
    ordering_seed: Optional[int] = None


@dataclass
class UpperBoundResult:
    selection: frozenset
    objective: float
    routes: dict[str, VehicleRoute]
    claimed: dict[DemandLink, str]
    unserved: tuple[DemandLink, ...]
    unrouted: tuple[str, ...]

    @property
    def feasible(self) -> bool:
        return not self.unrouted

    def build_cost(self, inst: Instance) -> float:
        return sum(s.build_cost for s in inst.stations if s.node in self.selection)


@dataclass
class IterationRecord:
    iteration: int
    step_size: float
    lower_bound: float
    upper_bound: float
    best_lower: float
    best_upper: float
    gap: float
    spw_selection: frozenset
    ub_selection: frozenset
    lb_routes: dict[str, Optional[VehicleRoute]]
    ub: UpperBoundResult
    wall_ms: float


@dataclass
class RunResult:
    status: str
    selection: frozenset
    routes: dict[str, VehicleRoute]
    unserved: tuple[DemandLink, ...]
    best_lower: float
    best_upper: float
    gap: float
    trace: list[IterationRecord]
    penalty: float


def _gap(best_lower: float, best_upper: float) -> float:
    if best_upper == float("inf"):
        return float("inf")
    if best_upper == best_lower:
        return 0.0
    if best_upper == 0.0:
        return float("inf") if best_lower < 0 else 0.0
    return (best_upper - best_lower) / best_upper


def update_multipliers(multipliers: Multipliers,
                       lb_routes: dict[str, Optional[VehicleRoute]],
                       m: int, inst: Instance, *,
                       step_rule: str = STEP_HARMONIC,
                       step_scale: float = 1.0,
                       best_upper: float = float("inf"),
                       lower_bound: float = float("-inf"),
                       ) -> tuple[Multipliers, float]:
    """Projected subgradient step from iteration ``m``'s relaxed routes.

    Demand prices move by (1 - times served), station prices by
    (recharge visits - capacity); both are clipped at zero.  The harmonic
    rule uses alpha = 1/(m+1); the ratio rule scales the current
    bound gap by the squared subgradient norm.
    """
    served: Counter = Counter()
    usage: Counter = Counter()
    for route in lb_routes.values():
        if route is None:
            continue
        for d in route.served_demands:
            served[d] += 1
        usage.update(route.station_visits)

    g_eps = {d: 1.0 - served[d] for d in inst.demands}
    g_theta = {s.node: float(usage[s.node] - s.capacity) for s in inst.stations}

    if step_rule == STEP_HARMONIC:
        alpha = 1.0 / (m + 1)
    elif step_rule == STEP_RATIO:
        # count only components the projection lets move: a price already at
        # zero cannot follow a negative subgradient
        norm = sum(g * g for d, g in g_eps.items()
                   if g > 0 or multipliers.epsilon.get(d, 0.0) > 0)
        norm += sum(g * g for k, g in g_theta.items()
                    if g > 0 or multipliers.theta.get(k, 0.0) > 0)
        if norm == 0.0 or best_upper == float("inf") or lower_bound == float("-inf"):
            alpha = 0.0
        else:
            alpha = step_scale * max(best_upper - lower_bound, 0.0) / norm
    else:
        raise ValueError(f"unknown step rule {step_rule!r}")

    eps = {d: max(0.0, multipliers.epsilon.get(d, 0.0) + alpha * g)
           for d, g in g_eps.items()}
    theta = {k: max(0.0, multipliers.theta.get(k, 0.0) + alpha * g)
             for k, g in g_theta.items()}
    return Multipliers(eps, theta), alpha


def compute_lower_bound(inst: Instance, net: TransformedNetwork,
                        multipliers: Multipliers,
                        penalty: Optional[float] = None):
    """Dual objective value at the given multipliers.

    Constant term sums each demand price clipped at the virtual penalty
    (a demand can always be dropped for the penalty, so prices above it
    contribute no more than the penalty) minus the knapsack value; each
    vehicle adds its optimal generalized route cost, or one penalty when
    it has no feasible route at all.
    """
    penalty = effective_penalty(inst) if penalty is None else penalty
    selection = solve_station_selection(
        [(s.node, s.build_cost, multipliers.theta.get(s.node, 0.0) * s.capacity)
         for s in inst.stations],
        inst.budget)
    z = sum(min(v, penalty) for v in multipliers.epsilon.values())
    z -= selection.total_value
    routes: dict[str, Optional[VehicleRoute]] = {}
    for veh in inst.vehicles:
        route = solve_single_vehicle(veh, net, multipliers)
        routes[veh.id] = route
        z += route.generalized_cost if route is not None else penalty
    return z, selection, routes


def compute_upper_bound(inst: Instance, net: TransformedNetwork,
                        multipliers: Multipliers, selection: frozenset,
                        ordering: list[int],
                        penalty: Optional[float] = None) -> UpperBoundResult:
    """Feasible solution under a fixed station selection.

    Vehicles are routed one at a time in ``ordering``.  Each is priced
    with a credit of one virtual penalty per still-unclaimed demand
    (serving a demand saves exactly that penalty from the objective, so
    the myopic route decision is aligned with the repair goal); demands
    claimed by earlier vehicles carry no credit.  Recharge arcs of
    unselected or exhausted stations are masked and capacity is
    decremented as routes commit.  The objective prices routes without
    any credits and adds one penalty per unserved demand (and per
    unroutable vehicle, which also marks the solution infeasible).
    """
    penalty = effective_penalty(inst) if penalty is None else penalty
    remaining = {s.node: (s.capacity if s.node in selection else 0)
                 for s in inst.stations}
    base_forbidden = {s.node for s in inst.stations if s.node not in selection}
    claimed: dict[DemandLink, str] = {}
    routes: dict[str, VehicleRoute] = {}
    unrouted: list[str] = []

    for idx in ordering:
        veh = inst.vehicles[idx]
        eps_view = Multipliers(
            {d: penalty for d in inst.demands if d not in claimed}, {})
        forbidden = set(base_forbidden)
        while True:
            route = solve_single_vehicle(veh, net, eps_view,
                                         forbidden_stations=forbidden,
                                         remaining_capacity=remaining)
            if route is None:
                break
            over = sorted(k for k, c in route.station_visits.items()
                          if c > remaining.get(k, 0))
            if not over:
                break
            # a single route may not exceed a station's remaining slots;
            # re-solve without the overdrawn stations (sound, may cost more)
            forbidden.update(over)
        if route is None:
            unrouted.append(veh.id)
            continue
        routes[veh.id] = route
        for k, c in route.station_visits.items():
            remaining[k] -= c
        for d in sorted(route.served_demands,
                        key=lambda d: (d.depart, d.arrive, d.from_node, d.to_node)):
            if d not in claimed:
                claimed[d] = veh.id

    unserved = tuple(d for d in inst.demands if d not in claimed)
    objective = (sum(r.base_cost for r in routes.values())
                 + penalty * len(unserved) + penalty * len(unrouted))
    result = UpperBoundResult(frozenset(selection), objective, routes,
                              claimed, unserved, tuple(unrouted))
    audit_solution(inst, net, result, penalty)
    return result


def audit_solution(inst: Instance, net: TransformedNetwork,
                   result: UpperBoundResult, penalty: float) -> None:
    """Independent feasibility check of an upper-bound solution.

    Replays every route against the network definition (flow continuity,
    window membership, resource bounds), tallies joint station usage
    against capacities and the budget, and recomputes the objective.
    Raises AuditError on any mismatch; a failing solution is never
    reported as a bound.
    """
    build = sum(s.build_cost for s in inst.stations if s.node in result.selection)
    if build > inst.budget + 1e-9:
        raise AuditError(f"selection breaks budget: {build} > {inst.budget}")

    caps = {s.node: s.capacity for s in inst.stations}
    total_usage: Counter = Counter()
    vehicles = {v.id: v for v in inst.vehicles}
    base_total = 0.0
    traversed: set[DemandLink] = set()
    for vid, route in result.routes.items():
        veh = vehicles[vid]
        replay = replay_route(route, net)
        base_total += replay["base_cost"]
        traversed |= replay["served_demands"]
        total_usage.update(replay["station_visits"])
        first, last = route.states[0], route.states[-1]
        if (net.phys[first.node] != veh.origin
                or not veh.depart_window[0] <= first.time <= veh.depart_window[1]
                or first.resource != veh.initial_resource):
            raise AuditError(f"route of {vid} does not start at its seed: {first}")
        if (net.phys[last.node] != veh.destination
                or not veh.arrive_window[0] <= last.time <= veh.arrive_window[1]
                or last.resource != inst.resource_min
                or route.arcs[-1].kind != "exhaust"):
            raise AuditError(f"route of {vid} does not end in an exhaust sink: {last}")
        for s in route.states:
            if not inst.resource_min <= s.resource <= veh.capacity:
                raise AuditError(f"route of {vid} leaves resource bounds at {s}")
        if abs(replay["base_cost"] - route.base_cost) > 1e-9:
            raise AuditError(f"route of {vid} replay cost differs from DP cost")

    for node, used in total_usage.items():
        if node not in result.selection:
            raise AuditError(f"recharge at unselected station {inst.node_name(node)}")
        if used > caps[node]:
            raise AuditError(f"station {inst.node_name(node)} over capacity: "
                             f"{used} > {caps[node]}")
    for d in result.claimed:
        if d not in traversed:
            raise AuditError("claimed demand never traversed")
    expect = (base_total + penalty * len(result.unserved)
              + penalty * len(result.unrouted))
    if abs(expect - result.objective) > 1e-9:
        raise AuditError(f"objective mismatch: {expect} vs {result.objective}")


def _greedy_fill(inst: Instance) -> frozenset:
    """Cheapest-first budget fill over all candidates (repair heuristic)."""
    chosen = []
    left = inst.budget
    for s in sorted(inst.stations, key=lambda s: (s.build_cost, s.node)):
        if s.build_cost <= left + 1e-12:
            chosen.append(s.node)
            left -= s.build_cost
    return frozenset(chosen)


def _usage_selection(inst: Instance,
                     lb_routes: dict[str, Optional[VehicleRoute]]) -> frozenset:
    usage: Counter = Counter()
    for route in lb_routes.values():
        if route is not None:
            usage.update(route.station_visits)
    sel = solve_station_selection(
        [(s.node, s.build_cost, float(usage[s.node])) for s in inst.stations],
        inst.budget)
    return sel.selected


def run(inst: Instance, config: Optional[SolverConfig] = None) -> RunResult:
    """Full Lagrangian loop; returns the incumbent and the bounds trace.

    Multipliers start at zero (step size 1 by convention for the first
    record); each iteration computes the dual bound, repairs a feasible
    solution for the primal bound, folds the best bounds, and stops on
    gap <= 0, a stalled best upper bound (termination_delta > 0), or the
    iteration cap.
    """
    config = config or SolverConfig()
    check_instance(inst)
    net = transform_stations(inst)
    penalty = (config.virtual_penalty if config.virtual_penalty is not None
               else effective_penalty(inst))

    ordering = list(range(len(inst.vehicles)))
    if config.ordering_seed is not None:
        random.Random(config.ordering_seed).shuffle(ordering)
    greedy = _greedy_fill(inst)

    multipliers = Multipliers.zeros(inst)
    step_size = 1.0
    best_lower = float("-inf")
    best_upper = float("inf")
    incumbent: Optional[UpperBoundResult] = None   # best audited-feasible
    fallback: Optional[UpperBoundResult] = None    # reported if never feasible
    trace: list[IterationRecord] = []
    ub_cache: dict[frozenset, UpperBoundResult] = {}

    for m in range(1, config.max_iterations + 1):
        t0 = time.perf_counter()
        z_l, spw_sel, lb_routes = compute_lower_bound(inst, net, multipliers, penalty)

        # the repair is a function of the selection alone, so repeats are free
        candidates = [spw_sel.selected, _usage_selection(inst, lb_routes), greedy]
        ub_results = []
        for sel in candidates:
            if sel not in ub_cache:
                ub_cache[sel] = compute_upper_bound(inst, net, multipliers, sel,
                                                    ordering, penalty)
            if ub_cache[sel] not in ub_results:
                ub_results.append(ub_cache[sel])
        feasible = [r for r in ub_results if r.feasible]
        pool = feasible if feasible else ub_results
        ub = min(pool, key=lambda r: (r.objective, r.build_cost(inst)))

        prev_best_upper = best_upper
        best_lower = max(best_lower, z_l)
        if ub.feasible:
            if incumbent is None or ub.objective < best_upper - 1e-12:
                incumbent = ub
                best_upper = min(best_upper, ub.objective)
            elif (abs(ub.objective - best_upper) <= 1e-12
                    and ub.build_cost(inst) < incumbent.build_cost(inst) - 1e-12):
                incumbent = ub  # same objective, cheaper construction
        elif incumbent is None and (fallback is None
                                    or ub.objective < fallback.objective):
            fallback = ub
        gap = _gap(best_lower, best_upper)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        trace.append(IterationRecord(
            m, step_size, z_l, ub.objective, best_lower, best_upper, gap,
            spw_sel.selected, ub.selection, lb_routes, ub, wall_ms))

        if gap <= 0.0:
            break
        if (m >= 2 and config.termination_delta > 0.0
                and prev_best_upper != float("inf")
                and abs(prev_best_upper - best_upper) < config.termination_delta):
            break
        multipliers, step_size = update_multipliers(
            multipliers, lb_routes, m, inst,
            step_rule=config.step_rule, step_scale=config.step_scale,
            best_upper=best_upper, lower_bound=z_l)

    final = incumbent if incumbent is not None else fallback
    assert final is not None
    if incumbent is None:
        status = "no_feasible_incumbent"
    else:
        status = "optimal" if _gap(best_lower, best_upper) <= 1e-9 else "feasible"
    return RunResult(status, final.selection, final.routes,
                     final.unserved, best_lower, best_upper,
                     _gap(best_lower, best_upper), trace, penalty)
