"""Exact optimum by exhaustive search, for validating the solver on small
instances.

Enumerates every budget-feasible station subset; for each subset and each
vehicle, sweeps an exhaustive labeling over (node, time, resource,
served-demand set, per-station recharge count) states to collect the
cheapest route per (demand set, usage) signature; then folds vehicles
together under the joint capacity constraint.  The objective matches the
solver's semantics: travel (plus any recharge price) costs, one virtual
penalty per demand left unserved.

This is deliberately a separate code path from the routing DP (different
state space, plain dictionaries, no dual prices); it shares only the
instance/network definition.  Refuses instances beyond its limits rather
than approximating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .instance import Instance, effective_penalty
from .network import TransformedNetwork, transform_stations


class OracleLimitError(RuntimeError):
    """Instance exceeds the enumeration limits."""


class OracleInfeasibleError(RuntimeError):
    """No station subset allows every vehicle to complete a tour."""


@dataclass(frozen=True)
class OracleLimits:
    max_stations: int = 10
    max_demands: int = 10
    max_states: int = 5_000_000


@dataclass(frozen=True)
class OracleResult:
    optimum: float
    selection: frozenset
    unserved: int


def _vehicle_signatures(net: TransformedNetwork, veh, built: tuple[int, ...],
                        caps: dict[int, int], budget_states: list[int],
                        limit: int) -> dict:
    """Min cost per (served-demand bitmask, usage tuple) sink signature."""
    inst = net.inst
    T, rmin = inst.horizon, inst.resource_min
    q = veh.capacity
    INF = float("inf")
    demand_bit = {(d.from_node, d.to_node, d.depart, d.arrive): 1 << k
                  for k, d in enumerate(inst.demands)}
    pos = {k: idx for idx, k in enumerate(built)}
    zero_usage = (0,) * len(built)

    layers: list[dict] = [dict() for _ in range(T + 2)]

    def vec_for(t, key):
        v = layers[t].get(key)
        if v is None:
            v = np.full(q + 1, INF)
            layers[t][key] = v
            budget_states[0] += q + 1
            if budget_states[0] > limit:
                raise OracleLimitError(
                    f"oracle state budget exceeded ({budget_states[0]} > {limit})")
        return v

    for t in range(veh.depart_window[0], veh.depart_window[1] + 1):
        vec_for(t, (veh.origin, 0, zero_usage))[veh.initial_resource] = 0.0

    sinks: dict = {}
    arr_lo, arr_hi = veh.arrive_window
    for t in range(T + 1):
        for (i, mask, usage) in sorted(layers[t].keys()):
            vec = layers[t][(i, mask, usage)]
            finite = np.isfinite(vec)
            if not finite.any():
                continue

            if net.phys[i] == veh.destination and arr_lo <= t <= arr_hi:
                best = float(vec[finite].min())
                key = (mask, usage)
                if best < sinks.get(key, INF):
                    sinks[key] = best

            for j, tt, cost, delta in net.out_travel[i]:
                t2 = t + tt
                if t2 > T:
                    continue
                bit = demand_bit.get((net.phys[i], net.phys[j], t, t2), 0)
                lo = max(rmin, rmin - delta)
                if lo > q:
                    continue
                src = vec[lo:q + 1] + cost
                dst = vec_for(t2, (j, mask | bit, usage))
                seg = dst[lo + delta:q + 1 + delta]
                np.minimum(seg, src, out=seg)

            if t + 1 <= T:
                dst = vec_for(t + 1, (i, mask, usage))
                np.minimum(dst[rmin:], vec[rmin:], out=dst[rmin:])

            st = net.station_at_entry.get(i)
            if st is None:
                continue
            exit_id = net.exit_of[i]
            if t + 1 <= T:
                dst = vec_for(t + 1, (exit_id, mask, usage))
                np.minimum(dst[rmin:], vec[rmin:], out=dst[rmin:])
            if st.node not in pos:
                continue  # not built: recharging impossible
            k = pos[st.node]
            if usage[k] >= caps[st.node]:
                continue
            usage2 = usage[:k] + (usage[k] + 1,) + usage[k + 1:]
            for dur, gain in sorted(st.profile):
                t2 = t + dur
                if t2 > T:
                    continue
                dst = vec_for(t2, (exit_id, mask, usage2))
                hi_unc = q - gain
                if hi_unc >= rmin:
                    src = vec[rmin:hi_unc + 1] + st.recharge_price * gain
                    seg = dst[rmin + gain:hi_unc + gain + 1]
                    np.minimum(seg, src, out=seg)
                clo = max(rmin, q - gain + 1)
                if clo <= q - 1:
                    src = vec[clo:q] + st.recharge_price * (q - np.arange(clo, q))
                    m = float(src.min())
                    if m < dst[q]:
                        dst[q] = m
        layers[t].clear()
    return sinks


def brute_force_optimum(inst: Instance,
                        limits: Optional[OracleLimits] = None) -> OracleResult:
    """Exact minimum of the joint location-routing objective.

    Raises OracleLimitError when the instance exceeds the enumeration
    limits and OracleInfeasibleError when no budget-feasible subset lets
    every vehicle complete its tour.
    """
    limits = limits or OracleLimits()
    if len(inst.stations) > limits.max_stations:
        raise OracleLimitError(
            f"{len(inst.stations)} stations exceed limit {limits.max_stations}")
    if len(inst.demands) > limits.max_demands:
        raise OracleLimitError(
            f"{len(inst.demands)} demands exceed limit {limits.max_demands}")

    net = transform_stations(inst)
    penalty = effective_penalty(inst)
    n_demands = len(inst.demands)
    full_mask = (1 << n_demands) - 1
    caps = {s.node: s.capacity for s in inst.stations}
    cost_of = {s.node: s.build_cost for s in inst.stations}
    nodes = sorted(caps)

    best: Optional[tuple[float, float, tuple[int, ...], int]] = None
    feasible_any = False
    budget_states = [0]

    for size in range(len(nodes) + 1):
        for combo in itertools.combinations(nodes, size):
            if sum(cost_of[k] for k in combo) > inst.budget + 1e-9:
                continue
            folded = {(0, (0,) * len(combo)): 0.0}
            ok = True
            for veh in inst.vehicles:
                sigs = _vehicle_signatures(net, veh, combo, caps,
                                           budget_states, limits.max_states)
                if not sigs:
                    ok = False
                    break
                new: dict = {}
                for (m1, u1), c1 in folded.items():
                    for (m2, u2), c2 in sigs.items():
                        u = tuple(a + b for a, b in zip(u1, u2))
                        if any(u[i] > caps[combo[i]] for i in range(len(combo))):
                            continue
                        key = (m1 | m2, u)
                        c = c1 + c2
                        if c < new.get(key, float("inf")):
                            new[key] = c
                folded = new
                if not folded:
                    ok = False
                    break
            if not ok:
                continue
            feasible_any = True
            for (mask, _u), cost in folded.items():
                miss = bin(full_mask & ~mask).count("1")
                total = cost + penalty * miss
                cand = (total, sum(cost_of[k] for k in combo), combo, miss)
                if best is None or cand < best:
                    best = cand

    if not feasible_any or best is None:
        raise OracleInfeasibleError("no station subset routes every vehicle")
    total, _bc, combo, miss = best
    return OracleResult(total, frozenset(combo), miss)
