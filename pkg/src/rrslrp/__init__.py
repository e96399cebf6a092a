"""Recharging-station location-routing over resource-space-time networks.

A Lagrangian relaxation solver: the station-capacity and demand-covering
constraints are priced into the objective, decoupling the problem into a
knapsack (station selection) and per-vehicle shortest-path problems on an
acyclic (node, time, resource) network, both solved by dynamic
programming.  Bounds from both sides bracket the optimum.
"""

from .instance import (ArcOption, DemandLink, Instance, InstanceError,
                       PhysicalLink, Station, Vehicle, Violation,
                       check_instance, effective_penalty, parse_instance,
                       serialize_instance, validate_instance)
from .network import (RstArc, RstState, TransformedNetwork, arc_between,
                      consumption_rate, derive_arc_options, outgoing_arcs,
                      transform_stations)
from .routing import (Multipliers, VehicleRoute, profit_arc_cost, replay_route,
                      solve_single_vehicle)
from .knapsack import StationSelection, solve_station_selection
from .solver import (AuditError, IterationRecord, RunResult, SolverConfig,
                     audit_solution, compute_lower_bound, compute_upper_bound,
                     run, update_multipliers)
from .estimator import LocationRoutingSolver
from .lp_export import LpSizeError, export_lp, lp_counts
from .oracle import (OracleInfeasibleError, OracleLimitError, OracleLimits,
                     OracleResult, brute_force_optimum)
from .cli import main

__version__ = "0.1.0"

__all__ = [
    "ArcOption", "DemandLink", "Instance", "InstanceError", "PhysicalLink",
    "Station", "Vehicle", "Violation", "check_instance", "effective_penalty",
    "parse_instance", "serialize_instance", "validate_instance",
    "RstArc", "RstState", "TransformedNetwork", "arc_between",
    "consumption_rate", "derive_arc_options", "outgoing_arcs",
    "transform_stations",
    "Multipliers", "VehicleRoute", "profit_arc_cost", "replay_route",
    "solve_single_vehicle",
    "StationSelection", "solve_station_selection",
    "AuditError", "IterationRecord", "RunResult", "SolverConfig",
    "audit_solution", "compute_lower_bound", "compute_upper_bound", "run",
    "update_multipliers",
    "LocationRoutingSolver",
    "LpSizeError", "export_lp", "lp_counts",
    "OracleInfeasibleError", "OracleLimitError", "OracleLimits",
    "OracleResult", "brute_force_optimum",
    "main",
]
