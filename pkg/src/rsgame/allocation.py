"""Vehicle movement and seat assignment under first-fit linear allocation."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .graph import GameDefinitionError, RideShareGame, TimedEdge, TripPath, validate_profile


@dataclass(frozen=True)
class FlowState:
    """Per-period result of simulating a profile.

    ``seat[i][t-1]`` is the vehicle carrying player ``i`` during ``(t, t+1)``
    or ``None``. ``vehicle_edge[m][t-1]`` is the edge vehicle ``m`` is on;
    a parked vehicle sits on its node's loop. ``vehicles_on`` counts moving
    vehicles only, so loop edges always report ``M_et = 0``.
    """

    horizon: int
    players_on: dict  # TimedEdge -> N_et
    vehicles_on: dict  # TimedEdge -> M_et
    seat: tuple[tuple[Optional[int], ...], ...]
    vehicle_edge: tuple[tuple[tuple[int, int], ...], ...]
    occupancy_table: tuple[tuple[int, ...], ...]
    residents: dict  # (node, t) -> tuple of parked-or-departing vehicles at that node

    def N(self, t: int, u: int, v: int) -> int:
        return self.players_on.get((t, u, v), 0)

    def M(self, t: int, u: int, v: int) -> int:
        return self.vehicles_on.get((t, u, v), 0)

    def occupancy(self, m: int, t: int) -> int:
        if not 0 <= m < len(self.occupancy_table) or not 1 <= t < self.horizon:
            raise IndexError(f"no vehicle {m} at period {t}")
        return self.occupancy_table[m][t - 1]

    def is_allocated(self, timed_edges: Sequence[TimedEdge]) -> bool:
        """At least one vehicle moves on every given timed edge."""
        return all(self.vehicles_on.get(te, 0) > 0 for te in timed_edges)


def occupancy(flow: FlowState, vehicle: int, period: int) -> int:
    return flow.occupancy(vehicle, period)


def apportion(num_vehicles: int, demand: dict) -> dict:
    """Linear path allocation of ``num_vehicles`` over edges with player demand.

    ``demand`` maps an edge key (sortable, used for tie-breaking) to ``N_et``.
    Each edge receives ``floor(k * N_et)`` with ``k = M / sum(N_et)``; leftover
    vehicles go one each by descending remainder, ties to the smaller key.
    """
    total = sum(demand.values())
    if total == 0 or num_vehicles == 0:
        return {e: 0 for e in demand}
    k = Fraction(num_vehicles, total)
    share = {e: math.floor(k * n) for e, n in demand.items()}
    left = num_vehicles - sum(share.values())
    order = sorted(demand, key=lambda e: (-(k * demand[e] - share[e]), e))
    for e in order[:left]:
        share[e] += 1
    return share


def compute_flows(game: RideShareGame, profile: Sequence[TripPath]) -> FlowState:
    """Simulate periods ``1..T-1`` for a profile of trips."""
    if not validate_profile(game, profile):
        raise GameDefinitionError("profile contains a trip outside its owner's strategy set")
    graph, T, w = game.graph, game.horizon, game.capacity
    N, M = game.num_players, game.num_vehicles

    players_on: Counter = Counter()
    vehicles_on: Counter = Counter()
    seat = [[None] * (T - 1) for _ in range(N)]
    vehicle_edge = [[None] * (T - 1) for _ in range(M)]
    occ = [[0] * (T - 1) for _ in range(M)]
    residents: dict = {}
    location = list(game.vehicle_starts)

    for t in range(1, T):
        departing: dict = {}  # (u, v) -> players in ascending order
        for i, r in enumerate(profile):
            u, v = r.edge_at(t)
            players_on[(t, u, v)] += 1
            if u != v:
                departing.setdefault((u, v), []).append(i)

        at_node: dict = {}
        for m in range(M):
            at_node.setdefault(location[m], []).append(m)
        for node, fleet in at_node.items():
            residents[(node, t)] = tuple(fleet)

        for node, fleet in sorted(at_node.items()):
            demand = {
                graph.edge_index(u, v): len(ps) for (u, v), ps in departing.items() if u == node
            }
            share = apportion(len(fleet), demand)
            pool = iter(fleet)
            for idx in sorted(share):
                if share[idx] == 0:
                    continue
                e = graph.edges[idx]
                assigned = [next(pool) for _ in range(share[idx])]
                riders = departing[(e.source, e.target)]
                for slot, i in enumerate(riders):
                    if slot // w >= len(assigned):
                        break
                    m = assigned[slot // w]
                    seat[i][t - 1] = m
                    occ[m][t - 1] += 1
                for m in assigned:
                    if occ[m][t - 1] > 0:
                        vehicle_edge[m][t - 1] = (e.source, e.target)
                        vehicles_on[(t, e.source, e.target)] += 1
                        location[m] = e.target

        for m in range(M):
            if vehicle_edge[m][t - 1] is None:
                here = location[m]
                vehicle_edge[m][t - 1] = (here, here)

    for m in range(M):
        residents.setdefault((location[m], T), ())
    final: dict = {}
    for m in range(M):
        final.setdefault(location[m], []).append(m)
    for node, fleet in final.items():
        residents[(node, T)] = tuple(fleet)

    return FlowState(
        horizon=T,
        players_on=dict(players_on),
        vehicles_on=dict(vehicles_on),
        seat=tuple(tuple(s) for s in seat),
        vehicle_edge=tuple(tuple(e) for e in vehicle_edge),
        occupancy_table=tuple(tuple(o) for o in occ),
        residents=residents,
    )


def delta_N(game: RideShareGame, profile: Sequence[TripPath], new_trip: TripPath, i: int,
            edge: tuple[int, int], period: int) -> int:
    """Change of ``N_et`` on one timed edge when player ``i`` switches to ``new_trip``."""
    old = profile[i].edge_at(period) == tuple(edge)
    new = new_trip.edge_at(period) == tuple(edge)
    return int(new) - int(old)


def update_profile(profile: Sequence[TripPath], new_trip: TripPath, i: int) -> tuple[TripPath, ...]:
    out = list(profile)
    out[i] = new_trip
    return tuple(out)


def is_no_vehicle_loss(game: RideShareGame, profile: Sequence[TripPath], new_trip: TripPath,
                       i: int, before: FlowState | None = None) -> bool:
    """No timed edge of ``new_trip`` that carried a vehicle before the update loses all of them."""
    before = before or compute_flows(game, profile)
    after = compute_flows(game, update_profile(profile, new_trip, i))
    return all(after.M(*te) != 0 for te in new_trip.timed_edges() if before.M(*te) > 0)


def riding_segments(trip: TripPath, flow: FlowState, player: int) -> list:
    """Maximal segments of ``trip`` on which ``player`` is seated in a vehicle.

    When ``N <= w`` every player on an edge with a moving vehicle is seated,
    so these are exactly the allocated segments of the trip.
    """
    from .graph import _group_timed_edges

    return _group_timed_edges(te for te in trip.timed_edges() if flow.seat[player][te[0] - 1] is not None)
