"""Edge, player and social costs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .allocation import FlowState, compute_flows
from .graph import Edge, RideShareGame, TripPath


class CostDomainError(ValueError):
    pass


@dataclass(frozen=True)
class FormulaCost:
    """Occupancy cost ``d/(s+1)`` up to capacity, ``d(1 - w^2/(s(w+1)))`` beyond.

    ``s = 0`` (no vehicle) costs the full distance ``d``.
    """

    def edge_cost(self, edge: Edge, capacity: int, occupancy: int):
        return formula_edge_cost(edge.distance, capacity, occupancy)


def formula_edge_cost(d, w: int, s: int):
    if s < 0:
        raise CostDomainError(f"negative occupancy {s}")
    d = Fraction(d) if isinstance(d, int) else d
    if s <= w:
        return d / (s + 1)
    return d * (1 - Fraction(w * w, s * (w + 1)))


@dataclass(frozen=True)
class TableCost:
    """Explicit per-edge cost by occupancy.

    ``tables`` maps ``(u, v)`` to a sequence indexed by occupancy. Edges not
    listed fall back to ``default`` (itself a sequence) or raise.
    """

    tables: Mapping = field(default_factory=dict)
    default: Sequence | None = None

    def edge_cost(self, edge: Edge, capacity: int, occupancy: int):
        table = self.tables.get((edge.source, edge.target), self.default)
        if table is None:
            raise CostDomainError(f"no cost table for edge {edge.source}->{edge.target}")
        if not 0 <= occupancy < len(table):
            raise CostDomainError(
                f"occupancy {occupancy} outside table domain of edge {edge.source}->{edge.target}")
        return table[occupancy]


def edge_cost(model, edge: Edge, w: int, s: int):
    return model.edge_cost(edge, w, s)


def _rider_occupancy(flow: FlowState, i: int, t: int) -> int:
    m = flow.seat[i][t - 1]
    return 0 if m is None else flow.occupancy_table[m][t - 1]


def player_cost(game: RideShareGame, profile: Sequence[TripPath], flow: FlowState, i: int):
    model, graph, w = game.cost_model, game.graph, game.capacity
    total = 0
    for t, u, v in profile[i].timed_edges():
        total += model.edge_cost(graph.edge(u, v), w, _rider_occupancy(flow, i, t))
    return total


def player_costs(game: RideShareGame, profile: Sequence[TripPath], flow: FlowState | None = None):
    flow = flow or compute_flows(game, profile)
    return tuple(player_cost(game, profile, flow, i) for i in range(game.num_players))


def social_cost(game: RideShareGame, profile: Sequence[TripPath]):
    return sum(player_costs(game, profile))


def social_cost_by_edges(game: RideShareGame, profile: Sequence[TripPath], flow: FlowState | None = None):
    """Social cost re-derived from per-edge rider groups (bookkeeping cross-check)."""
    flow = flow or compute_flows(game, profile)
    groups: dict = {}
    for i, r in enumerate(profile):
        for t, u, v in r.timed_edges():
            key = (t, u, v, _rider_occupancy(flow, i, t))
            groups[key] = groups.get(key, 0) + 1
    return sum(n * game.cost_model.edge_cost(game.graph.edge(u, v), game.capacity, s)
               for (t, u, v, s), n in groups.items())
