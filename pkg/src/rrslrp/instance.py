"""Problem input model: physical network, stations, vehicles, demands.

An instance bundles everything the solver needs: a directed physical
network whose links carry one or more (travel_time, cost, resource_delta)
options, candidate recharging stations with equipment profiles and build
costs, vehicles with departure/arrival windows and resource limits,
time-stamped demand links, a construction budget, and the discretization
grid (horizon, resource range).

Instances are immutable after construction and safe to share between
threads.  The line-oriented text format is documented in ``parse_instance``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional


class InstanceError(ValueError):
    """Raised for malformed instance files or rejected instances."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ArcOption:
    """One way of traversing a physical link.

    ``resource_delta`` is signed: traveling consumes (delta <= 0), a
    recharge gains (delta > 0).  A vehicle at resource r arrives at
    r + resource_delta.
    """

    travel_time: int
    travel_cost: float
    resource_delta: int


@dataclass(frozen=True)
class PhysicalLink:
    from_node: int
    to_node: int
    options: tuple[ArcOption, ...]


@dataclass(frozen=True)
class Station:
    """Candidate recharging station anchored at a physical node.

    ``profile`` lists (duration, gain) equipment entries; gains must be
    nondecreasing in duration.  ``recharge_price`` optionally charges
    price * actual_gain per recharge (0 keeps recharging free, which is
    the default objective).
    """

    node: int
    build_cost: float
    capacity: int
    profile: tuple[tuple[int, int], ...]
    recharge_price: float = 0.0


@dataclass(frozen=True)
class Vehicle:
    id: str
    origin: int
    destination: int
    depart_window: tuple[int, int]
    arrive_window: tuple[int, int]
    capacity: int
    initial_resource: int


@dataclass(frozen=True)
class DemandLink:
    """A required traversal of link (from, to) departing/arriving exactly
    at (depart, arrive).  Serving it means some route contains that
    space-time arc."""

    from_node: int
    to_node: int
    depart: int
    arrive: int


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):  # pragma: no cover - cosmetic
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class Instance:
    node_names: tuple[str, ...]
    links: tuple[PhysicalLink, ...]
    stations: tuple[Station, ...]
    vehicles: tuple[Vehicle, ...]
    demands: tuple[DemandLink, ...]
    budget: float
    horizon: int
    resource_max: int
    resource_min: int = 0
    virtual_penalty: Optional[float] = None  # None selects the default

    def node_id(self, name: str) -> int:
        return self.node_names.index(name)

    def node_name(self, node: int) -> str:
        return self.node_names[node]

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)


def effective_penalty(inst: Instance) -> float:
    """Cost of serving one demand with a virtual vehicle.

    Default is (sum of all arc costs over all options) + 1 so that any
    real service is strictly cheaper than abandoning a demand.
    """
    if inst.virtual_penalty is not None:
        return inst.virtual_penalty
    total = sum(opt.travel_cost for link in inst.links for opt in link.options)
    return total + 1.0


def option_lookup(inst: Instance) -> dict[tuple[int, int, int], ArcOption]:
    """Map (from, to, travel_time) -> ArcOption; triples are unique."""
    table = {}
    for link in inst.links:
        for opt in link.options:
            table[(link.from_node, link.to_node, opt.travel_time)] = opt
    return table


# ---------------------------------------------------------------------------
# text format


_SECTIONS = ("META", "NODES", "LINKS", "STATIONS", "VEHICLES", "DEMANDS")


def _strip(line: str) -> str:
    if "#" in line:
        line = line[: line.index("#")]
    return line.strip()


def _int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceError(f"expected integer {what}, got {tok!r}", line) from None


def _num(tok: str, what: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceError(f"expected number {what}, got {tok!r}", line) from None


def parse_instance(text: str) -> Instance:
    """Parse the plain-text instance format.

    Sections begin with a bracketed header; ``#`` starts a comment.

        [META]
        horizon=30  resource_max=40  resource_min=0  budget=15  virtual_penalty=auto
        [NODES]              # one symbolic name per line
        [LINKS]              # from,to,travel_time,cost,resource_delta
        [STATIONS]           # node,build_cost,capacity,profile=d1:g1|d2:g2[,price=P]
        [VEHICLES]           # id,origin,dest,dep_lo,dep_hi,arr_lo,arr_hi,capacity,initial
        [DEMANDS]            # from,to,depart,arrive

    Node names are mapped to integer ids in order of appearance.  Raises
    InstanceError (with a line number) on syntax problems, dangling node
    references, duplicate (from,to,travel_time) options, or windows with
    lo > hi.
    """
    meta: dict[str, str] = {}
    names: list[str] = []
    ids: dict[str, int] = {}
    link_opts: dict[tuple[int, int], list[ArcOption]] = {}
    link_order: list[tuple[int, int]] = []
    stations: list[Station] = []
    vehicles: list[Vehicle] = []
    demands: list[DemandLink] = []
    section = None

    def node_ref(tok: str, line: int) -> int:
        if tok not in ids:
            raise InstanceError(f"unknown node {tok!r}", line)
        return ids[tok]

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise InstanceError("unterminated section header", ln)
            section = line[1:-1].strip().upper()
            if section not in _SECTIONS:
                raise InstanceError(f"unknown section [{section}]", ln)
            continue
        if section is None:
            raise InstanceError("content before first section header", ln)

        if section == "META":
            for tok in line.split():
                if "=" not in tok:
                    raise InstanceError(f"expected key=value, got {tok!r}", ln)
                key, val = tok.split("=", 1)
                meta[key.strip()] = val.strip()
        elif section == "NODES":
            name = line.strip()
            if "," in name or name.startswith("["):
                raise InstanceError(f"bad node name {name!r}", ln)
            if name in ids:
                raise InstanceError(f"duplicate node {name!r}", ln)
            ids[name] = len(names)
            names.append(name)
        elif section == "LINKS":
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 5:
                raise InstanceError("expected from,to,travel_time,cost,resource_delta", ln)
            i = node_ref(parts[0], ln)
            j = node_ref(parts[1], ln)
            if i == j:
                raise InstanceError("self-loop links are not allowed", ln)
            tt = _int(parts[2], "travel_time", ln)
            cost = _num(parts[3], "cost", ln)
            delta = _int(parts[4], "resource_delta", ln)
            opts = link_opts.setdefault((i, j), [])
            if not opts:
                link_order.append((i, j))
            if any(o.travel_time == tt for o in opts):
                raise InstanceError(
                    f"duplicate option ({parts[0]},{parts[1]},tt={tt})", ln)
            opts.append(ArcOption(tt, cost, delta))
        elif section == "STATIONS":
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < 4:
                raise InstanceError("expected node,build_cost,capacity,profile=...", ln)
            node = node_ref(parts[0], ln)
            cost = _num(parts[1], "build_cost", ln)
            cap = _int(parts[2], "capacity", ln)
            profile: list[tuple[int, int]] = []
            price = 0.0
            for tok in parts[3:]:
                if tok.startswith("profile="):
                    for entry in tok[len("profile="):].split("|"):
                        if ":" not in entry:
                            raise InstanceError(f"bad profile entry {entry!r}", ln)
                        d, g = entry.split(":", 1)
                        profile.append((_int(d, "duration", ln), _int(g, "gain", ln)))
                elif tok.startswith("price="):
                    price = _num(tok[len("price="):], "price", ln)
                else:
                    raise InstanceError(f"unexpected station field {tok!r}", ln)
            if not profile:
                raise InstanceError("station needs a profile=", ln)
            stations.append(Station(node, cost, cap, tuple(profile), price))
        elif section == "VEHICLES":
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 9:
                raise InstanceError(
                    "expected id,origin,dest,dep_lo,dep_hi,arr_lo,arr_hi,capacity,initial", ln)
            dep = (_int(parts[3], "dep_lo", ln), _int(parts[4], "dep_hi", ln))
            arr = (_int(parts[5], "arr_lo", ln), _int(parts[6], "arr_hi", ln))
            if dep[0] > dep[1] or arr[0] > arr[1]:
                raise InstanceError("window with lo > hi", ln)
            vehicles.append(Vehicle(
                parts[0], node_ref(parts[1], ln), node_ref(parts[2], ln),
                dep, arr, _int(parts[7], "capacity", ln), _int(parts[8], "initial", ln)))
        elif section == "DEMANDS":
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4:
                raise InstanceError("expected from,to,depart,arrive", ln)
            demands.append(DemandLink(
                node_ref(parts[0], ln), node_ref(parts[1], ln),
                _int(parts[2], "depart", ln), _int(parts[3], "arrive", ln)))

    for key in ("horizon", "resource_max", "budget"):
        if key not in meta:
            raise InstanceError(f"[META] missing {key}")
    penalty_tok = meta.get("virtual_penalty", "auto")
    penalty = None if penalty_tok == "auto" else float(penalty_tok)

    links = tuple(
        PhysicalLink(i, j, tuple(link_opts[(i, j)])) for (i, j) in link_order)
    return Instance(
        node_names=tuple(names),
        links=links,
        stations=tuple(stations),
        vehicles=tuple(vehicles),
        demands=tuple(demands),
        budget=float(meta["budget"]),
        horizon=int(meta["horizon"]),
        resource_max=int(meta["resource_max"]),
        resource_min=int(meta.get("resource_min", "0")),
        virtual_penalty=penalty,
    )


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def serialize_instance(inst: Instance) -> str:
    """Render an instance back to the text format (parse round-trips)."""
    out = ["[META]"]
    penalty = "auto" if inst.virtual_penalty is None else _fmt(inst.virtual_penalty)
    out.append(
        f"horizon={inst.horizon} resource_max={inst.resource_max} "
        f"resource_min={inst.resource_min} budget={_fmt(inst.budget)} "
        f"virtual_penalty={penalty}")
    out.append("[NODES]")
    out.extend(inst.node_names)
    out.append("[LINKS]")
    for link in inst.links:
        for o in link.options:
            out.append(f"{inst.node_name(link.from_node)},{inst.node_name(link.to_node)},"
                       f"{o.travel_time},{_fmt(o.travel_cost)},{o.resource_delta}")
    out.append("[STATIONS]")
    for s in inst.stations:
        prof = "|".join(f"{d}:{g}" for d, g in s.profile)
        row = f"{inst.node_name(s.node)},{_fmt(s.build_cost)},{s.capacity},profile={prof}"
        if s.recharge_price:
            row += f",price={_fmt(s.recharge_price)}"
        out.append(row)
    out.append("[VEHICLES]")
    for v in inst.vehicles:
        out.append(f"{v.id},{inst.node_name(v.origin)},{inst.node_name(v.destination)},"
                   f"{v.depart_window[0]},{v.depart_window[1]},"
                   f"{v.arrive_window[0]},{v.arrive_window[1]},"
                   f"{v.capacity},{v.initial_resource}")
    out.append("[DEMANDS]")
    for d in inst.demands:
        out.append(f"{inst.node_name(d.from_node)},{inst.node_name(d.to_node)},"
                   f"{d.depart},{d.arrive}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# validation


def validate_instance(inst: Instance) -> list[Violation]:
    """Check every instance invariant; returns violations, never raises.

    The function is pure: repeated calls on the same instance return the
    same list.
    """
    v: list[Violation] = []

    def bad(code: str, msg: str):
        v.append(Violation(code, msg))

    n = inst.n_nodes
    if inst.horizon < 1:
        bad("grid.horizon", "horizon must be >= 1")
    if inst.resource_max < 1:
        bad("grid.resource_max", "resource_max must be >= 1")
    if not (0 <= inst.resource_min <= inst.resource_max):
        bad("grid.resource_min", "resource_min must lie in [0, resource_max]")
    if inst.budget < 0:
        bad("budget.negative", "budget must be nonnegative")
    if inst.virtual_penalty is not None and inst.virtual_penalty <= 0:
        bad("penalty.nonpositive", "virtual_penalty must be positive")

    opt_map = option_lookup(inst)
    for link in inst.links:
        name = f"({inst.node_name(link.from_node)},{inst.node_name(link.to_node)})"
        if not (0 <= link.from_node < n and 0 <= link.to_node < n):
            bad("link.dangling", f"link {name} references a missing node")
            continue
        for o in link.options:
            if o.travel_time < 1:
                bad("link.travel_time", f"option on {name} has travel_time < 1")
            if o.travel_cost < 0:
                bad("link.cost", f"option on {name} has negative cost")
            if o.resource_delta > 0:
                bad("link.recharging_delta",
                    f"traveling option on {name} has positive resource_delta")

    seen_station_nodes = set()
    for s in inst.stations:
        sname = inst.node_name(s.node) if 0 <= s.node < n else str(s.node)
        if not (0 <= s.node < n):
            bad("station.dangling", f"station at missing node {s.node}")
            continue
        if s.node in seen_station_nodes:
            bad("station.duplicate", f"two stations share node {sname}")
        seen_station_nodes.add(s.node)
        if s.build_cost < 0:
            bad("station.cost", f"station {sname} has negative build cost")
        if s.capacity < 0:
            bad("station.capacity", f"station {sname} has negative capacity")
        if not s.profile:
            bad("station.profile_empty", f"station {sname} has an empty profile")
        last_d, last_g = 0, 0
        for d, g in sorted(s.profile):
            if d < 1 or g < 1:
                bad("station.profile_entry",
                    f"station {sname} profile entry ({d},{g}) must be positive")
            if d == last_d:
                bad("station.profile_dup_duration",
                    f"station {sname} has two profile entries of duration {d}")
            if g < last_g:
                bad("station.profile_monotone",
                    f"station {sname}: longer charging yields less ({d}:{g} after {last_d}:{last_g})")
            last_d, last_g = d, g

    seen_vids = set()
    for veh in inst.vehicles:
        if veh.id in seen_vids:
            bad("vehicle.duplicate_id", f"duplicate vehicle id {veh.id!r}")
        seen_vids.add(veh.id)
        if not (0 <= veh.origin < n and 0 <= veh.destination < n):
            bad("vehicle.dangling", f"vehicle {veh.id} references a missing node")
        for lo, hi, which in (
                (*veh.depart_window, "depart"), (*veh.arrive_window, "arrive")):
            if not (0 <= lo <= hi <= inst.horizon):
                bad("vehicle.window",
                    f"vehicle {veh.id} {which} window ({lo},{hi}) outside [0,{inst.horizon}]")
        if veh.depart_window[0] > veh.arrive_window[1]:
            bad("vehicle.window_order",
                f"vehicle {veh.id} departs after its latest arrival")
        if veh.capacity < 1:
            bad("vehicle.capacity", f"vehicle {veh.id} capacity must be positive")
        if veh.capacity > inst.resource_max:
            bad("vehicle.capacity_grid",
                f"vehicle {veh.id} capacity {veh.capacity} exceeds resource_max")
        if not (inst.resource_min <= veh.initial_resource <= veh.capacity):
            bad("vehicle.initial_resource",
                f"vehicle {veh.id} initial resource {veh.initial_resource} "
                f"outside [{inst.resource_min},{veh.capacity}]")

    seen_demands = set()
    for d in inst.demands:
        label = (f"({inst.node_name(d.from_node)},{inst.node_name(d.to_node)},"
                 f"{d.depart},{d.arrive})")
        if not (0 <= d.from_node < n and 0 <= d.to_node < n):
            bad("demand.dangling", f"demand {label} references a missing node")
            continue
        if d.from_node == d.to_node:
            bad("demand.self_loop", f"demand {label} has identical endpoints")
        if d.arrive <= d.depart:
            bad("demand.times", f"demand {label} must arrive after departing")
        if not (0 <= d.depart and d.arrive <= inst.horizon):
            bad("demand.horizon", f"demand {label} lies outside [0,{inst.horizon}]")
        if (d.from_node, d.to_node, d.arrive - d.depart) not in opt_map:
            bad("demand.unservable",
                f"no arc option with travel_time {d.arrive - d.depart} for demand {label}")
        if d in seen_demands:
            bad("demand.duplicate", f"duplicate demand {label}")
        seen_demands.add(d)

    return v


def check_instance(inst: Instance) -> Instance:
    """Validation helper: raise InstanceError if any invariant fails."""
    violations = validate_instance(inst)
    if violations:
        raise InstanceError(
            "invalid instance:\n" + "\n".join(f"  {x}" for x in violations))
    return inst
