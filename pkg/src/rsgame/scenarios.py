"""Canonical games: the 4-node three-player family and the two-state signaling game."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cost import FormulaCost
from .graph import RideShareGame, RoadGraph, TripPath, enumerate_strategies

BASE_PLAYERS = 3
BASE_HORIZON = 5
BASE_NODES = 4
PLAYER_START = 1
VEHICLE_START = 2
REQUIRED_NODES = frozenset({3, 4})


def build_base_parts() -> dict:
    """Graph, cost model and common strategy set shared by the three-player games."""
    graph = RoadGraph.complete(BASE_NODES, distance=1, loop_distance=0)
    strategies = enumerate_strategies(graph, PLAYER_START, REQUIRED_NODES, BASE_HORIZON, True)
    return {
        "graph": graph,
        "horizon": BASE_HORIZON,
        "strategies": (tuple(strategies),) * BASE_PLAYERS,
        "player_starts": (PLAYER_START,) * BASE_PLAYERS,
        "cost_model": FormulaCost(),
    }


def _base_game(num_vehicles: int, capacity: int, name: str) -> RideShareGame:
    return RideShareGame(
        vehicle_starts=(VEHICLE_START,) * num_vehicles,
        capacity=capacity,
        name=name,
        **build_base_parts(),
    )


def build_nonfip_game() -> RideShareGame:
    """Two single-seat vehicles; best-response updates can cycle."""
    return _base_game(2, 1, "nonfip")


def build_fip_game() -> RideShareGame:
    """One four-seat vehicle."""
    return _base_game(1, 4, "fip")


def build_two_vehicle_game() -> RideShareGame:
    """Two four-seat vehicles; FIP without the single-vehicle assumption."""
    return _base_game(2, 4, "two_vehicle")


# Signaling game: actions C and D, per-state cost bimatrices indexed [a1][a2] -> (c1, c2).
SIGNAL_ACTIONS = ("C", "D")
SIGNAL_TRIPS = {"C": TripPath((1, 2, 3, 1)), "D": TripPath((1, 1, 3, 1))}
SIGNAL_COSTS = {
    0: (((20, 20), (20, 16)), ((16, 20), (16, 16))),
    1: (((10, 10), (15, 9)), ((9, 15), (16, 16))),
}
SIGNAL_PRIOR = {0: Fraction(1, 2), 1: Fraction(1, 2)}
SIGNAL_FLEET = {0: 0, 1: 1}
# Recommendation policy reported for the signaling game, symmetric form per state:
# (alpha, beta) with sigma(C,C)=alpha, sigma(C,D)=sigma(D,C)=beta.
REPORTED_POLICY = {0: (Fraction(0), Fraction(0)), 1: (Fraction(6, 100), Fraction(47, 100))}
REPORTED_BCE_COST = Fraction(279, 10)
REPORTED_PBNE_COST = 32
REPORTED_OPTIMUM = 26


def build_signaling_game():
    from .bayes import BayesianGame, MatrixGame

    states = {}
    for x, table in SIGNAL_COSTS.items():
        costs = {(a1, a2): table[a1][a2] for a1 in range(2) for a2 in range(2)}
        states[x] = MatrixGame(
            actions=(SIGNAL_ACTIONS, SIGNAL_ACTIONS),
            costs=costs,
            metadata={"num_vehicles": SIGNAL_FLEET[x],
                      "trips": {k: str(v) for k, v in SIGNAL_TRIPS.items()}},
        )
    return BayesianGame(states=states, priors=(SIGNAL_PRIOR, SIGNAL_PRIOR), name="signaling")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    overrides: dict = field(default_factory=dict)

    def build(self):
        if self.name not in SCENARIOS:
            raise KeyError(f"unknown scenario {self.name!r}; choose from {sorted(SCENARIOS)}")
        game = SCENARIOS[self.name]()
        if self.overrides:
            mapping = {"M": "vehicle_starts", "w": "capacity"}
            changes = {}
            for k, v in self.overrides.items():
                if k == "M":
                    v = (VEHICLE_START,) * v
                changes[mapping.get(k, k)] = v
            game = game.replace(**changes)
        return game


SCENARIOS = {
    "nonfip": build_nonfip_game,
    "fip": build_fip_game,
    "two_vehicle": build_two_vehicle_game,
    "signaling": build_signaling_game,
}
