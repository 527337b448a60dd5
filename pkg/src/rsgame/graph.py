"""Road graphs, time-anchored trips and the ride sharing game definition.

Nodes are labelled ``1..V``. Times are 1-based: a trip visits ``nodes[t-1]``
at time ``t`` and traverses the edge ``(nodes[t-1], nodes[t])`` during the
period ``(t, t+1)``. Players and vehicles are 0-based indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

TimedEdge = tuple[int, int, int]  # (t, from, to)


class GameDefinitionError(ValueError):
    """Raised when a graph, path or game violates its structural invariants."""


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    distance: Any = 0

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class RoadGraph:
    """Simple directed graph where every node carries exactly one loop edge.

    Edges are kept sorted by ``(source, target)``; that order is the edge
    index used for tie-breaking during vehicle allocation.
    """

    num_nodes: int
    edges: tuple[Edge, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        edges = tuple(sorted(self.edges, key=lambda e: (e.source, e.target)))
        object.__setattr__(self, "edges", edges)
        index = {}
        for k, e in enumerate(edges):
            for v in (e.source, e.target):
                if not 1 <= v <= self.num_nodes:
                    raise GameDefinitionError(f"edge {e.source}->{e.target} uses unknown node {v}")
            if (e.source, e.target) in index:
                raise GameDefinitionError(f"duplicate edge {e.source}->{e.target}")
            if e.distance < 0:
                raise GameDefinitionError(f"negative distance on edge {e.source}->{e.target}")
            index[(e.source, e.target)] = k
        for v in self.nodes:
            if (v, v) not in index:
                raise GameDefinitionError(f"node {v} has no loop edge")
        object.__setattr__(self, "_index", index)

    @classmethod
    def complete(cls, num_nodes: int, distance=1, loop_distance=0) -> "RoadGraph":
        edges = [
            Edge(u, v, loop_distance if u == v else distance)
            for u in range(1, num_nodes + 1)
            for v in range(1, num_nodes + 1)
        ]
        return cls(num_nodes, tuple(edges))

    @property
    def nodes(self) -> range:
        return range(1, self.num_nodes + 1)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._index

    def edge(self, u: int, v: int) -> Edge:
        return self.edges[self._index[(u, v)]]

    def edge_index(self, u: int, v: int) -> int:
        return self._index[(u, v)]

    def successors(self, u: int) -> list[int]:
        return [e.target for e in self.edges if e.source == u]


@dataclass(frozen=True, order=True)
class PathSegment:
    """Contiguous piece of a trip anchored at time ``start``.

    A segment with a single node has no edges.
    """

    start: int
    nodes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.start < 1 or not self.nodes:
            raise GameDefinitionError("segment needs start >= 1 and at least one node")

    @property
    def end(self) -> int:
        return self.start + len(self.nodes) - 1

    def timed_edges(self) -> list[TimedEdge]:
        return [(self.start + k, u, v) for k, (u, v) in enumerate(zip(self.nodes, self.nodes[1:]))]

    def __len__(self) -> int:
        return len(self.nodes) - 1

    def __str__(self) -> str:
        return f"{self.nodes}@t={self.start}"


@dataclass(frozen=True, order=True)
class TripPath:
    """A full day's trip ``(v_1, ..., v_T)``; edges are implied by the simple graph."""

    nodes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(self.nodes) < 1:
            raise GameDefinitionError("empty trip")

    @property
    def horizon(self) -> int:
        return len(self.nodes)

    @property
    def start(self) -> int:
        return self.nodes[0]

    def node_at(self, t: int) -> int:
        return self.nodes[t - 1]

    def edge_at(self, t: int) -> tuple[int, int]:
        return self.nodes[t - 1], self.nodes[t]

    def timed_edges(self) -> list[TimedEdge]:
        return [(t, u, v) for t, (u, v) in enumerate(zip(self.nodes, self.nodes[1:]), start=1)]

    def as_segment(self) -> PathSegment:
        return PathSegment(1, self.nodes)

    def is_valid_in(self, graph: RoadGraph) -> bool:
        if any(v not in graph.nodes for v in self.nodes):
            return False
        return all(graph.has_edge(u, v) for u, v in zip(self.nodes, self.nodes[1:]))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.nodes)) + ")"


def _as_segment(r) -> PathSegment:
    return r.as_segment() if isinstance(r, TripPath) else r


def segment_contained(segment: PathSegment | TripPath, trip: TripPath | PathSegment) -> bool:
    """True iff ``segment`` occurs in ``trip`` at its anchored times."""
    seg, whole = _as_segment(segment), _as_segment(trip)
    if seg.start < whole.start or seg.end > whole.end:
        return False
    offset = seg.start - whole.start
    return whole.nodes[offset:offset + len(seg.nodes)] == seg.nodes


def _group_timed_edges(edges: Iterable[TimedEdge]) -> list[PathSegment]:
    """Merge timed edges into maximal contiguous segments."""
    segments: list[PathSegment] = []
    run: list[TimedEdge] = []
    for te in sorted(edges):
        if run and te[0] == run[-1][0] + 1 and te[1] == run[-1][2]:
            run.append(te)
        else:
            if run:
                segments.append(PathSegment(run[0][0], (run[0][1],) + tuple(e[2] for e in run)))
            run = [te]
    if run:
        segments.append(PathSegment(run[0][0], (run[0][1],) + tuple(e[2] for e in run)))
    return segments


def segment_intersection(r1: TripPath, r2: TripPath) -> list[PathSegment]:
    """Maximal time-anchored segments shared by two trips."""
    if r1.horizon != r2.horizon:
        raise GameDefinitionError(f"horizon mismatch: {r1.horizon} vs {r2.horizon}")
    return _group_timed_edges(set(r1.timed_edges()) & set(r2.timed_edges()))


def segment_complement(trip: TripPath, segment: PathSegment) -> list[PathSegment]:
    """Timed edges of ``trip`` outside ``segment``, as maximal segments."""
    if not segment_contained(segment, trip):
        raise GameDefinitionError(f"segment {segment} is not contained in trip {trip}")
    return _group_timed_edges(set(trip.timed_edges()) - set(segment.timed_edges()))


def segments_disjoint(segments: Sequence[PathSegment]) -> bool:
    """Pairwise empty intersection of timed edge sets."""
    seen: set[TimedEdge] = set()
    for seg in segments:
        edges = set(seg.timed_edges())
        if edges & seen:
            return False
        seen |= edges
    return True


def enumerate_strategies(
    graph: RoadGraph,
    start: int,
    required: Iterable[int],
    horizon: int,
    return_to_start: bool = True,
) -> list[TripPath]:
    """All trips of ``horizon`` nodes from ``start`` visiting every required node.

    Output is in lexicographic node order.
    """
    if start not in graph.nodes:
        raise GameDefinitionError(f"unknown start node {start}")
    if horizon < 2:
        raise GameDefinitionError("horizon must be at least 2")
    required = frozenset(required)
    succ = {v: sorted(graph.successors(v)) for v in graph.nodes}
    out: list[TripPath] = []

    def extend(prefix: list[int]) -> None:
        if len(prefix) == horizon:
            if return_to_start and prefix[-1] != start:
                return
            if required <= set(prefix):
                out.append(TripPath(tuple(prefix)))
            return
        missing = len(required - set(prefix))
        if missing > horizon - len(prefix):
            return
        for v in succ[prefix[-1]]:
            prefix.append(v)
            extend(prefix)
            prefix.pop()

    extend([start])
    return out


@dataclass(frozen=True, eq=False)
class RideShareGame:
    """Immutable ride sharing game.

    ``strategies[i]`` is the explicit strategy set of player ``i``.
    ``cost_model`` must provide ``edge_cost(edge, capacity, occupancy)``.
    Games compare by identity; the cached flows of :mod:`rsgame.allocation`
    rely on that.
    """

    graph: RoadGraph
    horizon: int
    strategies: tuple[tuple[TripPath, ...], ...]
    player_starts: tuple[int, ...]
    vehicle_starts: tuple[int, ...]
    capacity: int
    cost_model: Any
    allocation: str = "first_fit_linear"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(tuple(s) for s in self.strategies))
        object.__setattr__(self, "player_starts", tuple(self.player_starts))
        object.__setattr__(self, "vehicle_starts", tuple(self.vehicle_starts))
        if self.capacity <= 0:
            raise GameDefinitionError(f"capacity must satisfy w > 0, got {self.capacity}")
        if self.allocation != "first_fit_linear":
            raise GameDefinitionError(f"unknown allocation policy {self.allocation!r}")
        if len(self.strategies) != len(self.player_starts):
            raise GameDefinitionError("one strategy set and one start node per player required")
        for v in self.vehicle_starts:
            if v not in self.graph.nodes:
                raise GameDefinitionError(f"vehicle starts at unknown node {v}")
        for i, (strats, start) in enumerate(zip(self.strategies, self.player_starts)):
            if not strats:
                raise GameDefinitionError(f"player {i} has an empty strategy set")
            if len(set(strats)) != len(strats):
                raise GameDefinitionError(f"player {i} has duplicate strategies")
            for r in strats:
                if r.horizon != self.horizon:
                    raise GameDefinitionError(f"player {i}: trip {r} does not have horizon {self.horizon}")
                if r.start != start:
                    raise GameDefinitionError(f"player {i}: trip {r} does not start at node {start}")
                if not r.is_valid_in(self.graph):
                    raise GameDefinitionError(f"player {i}: trip {r} uses a missing edge")

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    @property
    def num_vehicles(self) -> int:
        return len(self.vehicle_starts)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strategies)

    def profile(self, indices: Sequence[int]) -> tuple[TripPath, ...]:
        return tuple(self.strategies[i][k] for i, k in enumerate(indices))

    def indices(self, profile: Sequence[TripPath]) -> tuple[int, ...]:
        return tuple(self.strategies[i].index(r) for i, r in enumerate(profile))

    def strategy_label(self, i: int, k: int) -> str:
        return str(self.strategies[i][k])

    def cost_vector(self, indices: Sequence[int]):
        from .cost import player_costs

        return player_costs(self, self.profile(indices))

    def replace(self, **changes) -> "RideShareGame":
        kwargs = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kwargs.update(changes)
        return RideShareGame(**kwargs)


def all_profiles(counts: Sequence[int]) -> Iterable[tuple[int, ...]]:
    """Index profiles in lexicographic order."""
    return itertools.product(*(range(n) for n in counts))


def validate_profile(game: RideShareGame, profile: Sequence[TripPath]) -> bool:
    """True iff every entry is drawn from its owner's strategy set."""
    if len(profile) != game.num_players:
        return False
    return all(r in game.strategies[i] for i, r in enumerate(profile))
