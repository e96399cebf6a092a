"""0/1 knapsack over station candidates: max total value within budget.

Values are theta_k * p_k when called from the dual decomposition, but the
solver is generic (any nonnegative values).  Build costs are quantized to
an integer grid (default 1/100 cost unit); results are exact on that grid.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class StationSelection:
    selected: frozenset
    total_value: float
    total_cost: float


def _quantize(cost: float, quantum: float) -> int:
    units = int(round(cost / quantum))
    return max(units, 0)


def solve_station_selection(stations, budget: float,
                            quantum: float = 0.01) -> StationSelection:
    """Pick the value-maximal affordable station set.

    ``stations`` is an iterable of (id, build_cost, value).  Deterministic
    tie-breaks: among equal-value selections prefer the cheaper one, then
    the lexicographically smallest id tuple.  Stations with value <= 0 are
    never selected (they can only tie, and ties prefer the smaller set).
    """
    items = [(sid, cost, val) for sid, cost, val in stations if val > 0]
    items.sort(key=lambda it: it[0])
    cap = _quantize(budget, quantum)

    # dp[w] = (value, -cost, ids tuple) best over subsets of weight <= w;
    # with all item values > 0 the tuple tie-break is preserved under the
    # ascending-id item order (no zero-value prefix collisions).
    empty = (0.0, 0.0, ())
    dp = [empty] * (cap + 1)
    for sid, cost, val in items:
        w_item = _quantize(cost, quantum)
        if w_item > cap:
            continue
        for w in range(cap, w_item - 1, -1):
            base_val, base_negcost, base_ids = dp[w - w_item]
            cand = (base_val + val, base_negcost - cost, base_ids + (sid,))
            cur = dp[w]
            if (cand[0] > cur[0]
                    or (cand[0] == cur[0]
                        and (cand[1] > cur[1]
                             or (cand[1] == cur[1] and cand[2] < cur[2])))):
                dp[w] = cand
    best = empty
    for w in range(cap + 1):
        cur = dp[w]
        if (cur[0] > best[0]
                or (cur[0] == best[0]
                    and (cur[1] > best[1]
                         or (cur[1] == best[1] and cur[2] < best[2])))):
            best = cur
    value, negcost, ids = best
    return StationSelection(frozenset(ids), value, -negcost)
