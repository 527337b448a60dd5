"""Computational checks of the structural conditions behind FIP in ride sharing games.

Exhaustive over the profile space, so only meant for small games.

Conventions:

* A segment is *allocated* when a moving vehicle is on each of its timed edges.
* A player's riding path is the list of maximal segments of their trip on
  which they are seated; "riding path equals r" means that list is exactly
  ``[r]``. Under ``N <= w`` seated and allocated segments coincide.
* For the necessary-path test, ``r`` counts as allocated given the other
  players when some strategy of the deviator that avoids ``r`` still leaves
  ``r`` allocated.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .allocation import riding_segments
from .dynamics import (DEFAULT_BUDGET, BudgetExceeded, best_responses, deviate, enumerate_pne,
                       profile_costs)
from .graph import PathSegment, RideShareGame, segment_contained, segments_disjoint


class NoNecessaryPath(LookupError):
    pass


def _contexts(game: RideShareGame, i: int, budget: int):
    """Yield opponent profiles as full profiles with a placeholder for ``i``."""
    costs = profile_costs(game)
    if costs.size > budget:
        raise BudgetExceeded(f"{costs.size} profiles exceed budget {budget}")
    ranges = [range(n) if j != i else (0,) for j, n in enumerate(costs.counts)]
    return itertools.product(*ranges)


def riding_path(game: RideShareGame, profile: Sequence[int], i: int) -> tuple[PathSegment, ...]:
    flow = profile_costs(game).flow(profile)
    return tuple(riding_segments(game.profile(profile)[i], flow, i))


def is_necessary_path(game: RideShareGame, r: PathSegment, budget: int = DEFAULT_BUDGET) -> bool:
    """Containing ``r`` is weakly cheapest whenever the others keep ``r`` allocated.

    False when no strategy contains ``r`` or ``r`` is never allocated.
    """
    costs = profile_costs(game)
    edges = r.timed_edges()
    witnessed = False
    for i, strategies in enumerate(game.strategies):
        inside = [k for k, a in enumerate(strategies) if segment_contained(r, a)]
        outside = [k for k, a in enumerate(strategies) if not segment_contained(r, a)]
        if not inside:
            continue
        for ctx in _contexts(game, i, budget):
            if not any(costs.flow(deviate(ctx, i, k)).is_allocated(edges) for k in outside):
                continue
            with_r = [costs(deviate(ctx, i, k))[i] for k in inside
                      if costs.flow(deviate(ctx, i, k)).is_allocated(edges)]
            if not with_r:
                continue
            witnessed = True
            without = [costs(deviate(ctx, i, k))[i] for k in outside]
            if without and min(with_r) > min(without):
                return False
    return witnessed


def _sufficiency_violations(game: RideShareGame, candidates: Iterable[PathSegment], budget: int):
    """For each candidate: (ever a sole riding path, violated somewhere)."""
    costs = profile_costs(game)
    wanted = {(r,): r for r in candidates}
    seen = {r: False for r in wanted.values()}
    violated = {r: False for r in wanted.values()}
    for i, strategies in enumerate(game.strategies):
        for ctx in _contexts(game, i, budget):
            best_by_ride: dict = {}
            for k in range(len(strategies)):
                q = deviate(ctx, i, k)
                key = riding_path(game, q, i)
                c = costs(q)[i]
                if key not in best_by_ride or c < best_by_ride[key]:
                    best_by_ride[key] = c
            for key, c in best_by_ride.items():
                r = wanted.get(key)
                if r is None:
                    continue
                seen[r] = True
                others = [v for k2, v in best_by_ride.items() if k2 != key]
                if others and c > min(others):
                    violated[r] = True
    return seen, violated


def is_sufficient_path(game: RideShareGame, r: PathSegment, budget: int = DEFAULT_BUDGET) -> bool:
    """Riding exactly ``r`` is weakly cheapest whenever it is possible.

    Vacuously true when ``r`` can never be a riding path.
    """
    seen, violated = _sufficiency_violations(game, [r], budget)
    return not violated[r]


@dataclass
class PathClassification:
    candidates: list
    necessary: list
    sufficient: list
    necessary_and_sufficient: list

    @property
    def disjoint(self) -> bool:
        return segments_disjoint(self.necessary_and_sufficient)


def candidate_segments(game: RideShareGame, max_length: Optional[int] = None,
                       budget: int = DEFAULT_BUDGET) -> list[PathSegment]:
    """Riding segments seen in some pNE, plus all strategy sub-segments up to ``max_length`` edges.

    Without equilibria and without ``max_length`` every sub-segment is used.
    """
    found: set = set()
    for p in enumerate_pne(game, budget):
        for i in range(game.num_players):
            found.update(riding_path(game, p, i))
    if max_length is None and not found:
        max_length = game.horizon - 1
    if max_length:
        for strategies in game.strategies:
            for a in strategies:
                for s in range(1, game.horizon):
                    for e in range(s + 1, min(game.horizon, s + max_length) + 1):
                        found.add(PathSegment(s, a.nodes[s - 1:e]))
    return sorted(found)


def classify_paths(game: RideShareGame, candidates: Optional[Sequence[PathSegment]] = None,
                   budget: int = DEFAULT_BUDGET) -> PathClassification:
    candidates = list(candidates) if candidates is not None else candidate_segments(game, budget=budget)
    necessary = [r for r in candidates if is_necessary_path(game, r, budget)]
    seen, violated = _sufficiency_violations(game, candidates, budget)
    # never a riding path: sufficient only vacuously, not usable as a corridor
    sufficient = [r for r in candidates if seen[r] and not violated[r]]
    both = [r for r in necessary if r in sufficient]
    return PathClassification(candidates, necessary, sufficient, both)


@dataclass
class HypothesisReport:
    verdicts: dict  # H1..H5 -> bool
    details: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> bool:
        return self.verdicts[key]


def check_theorem_hypotheses(game: RideShareGame, candidate_paths: Optional[Sequence[PathSegment]] = None,
                             budget: int = DEFAULT_BUDGET) -> HypothesisReport:
    """H1 common strategy set, H2 single vehicle, H3 ``N <= w``, H4 first-fit linear
    allocation, H5 a non-empty disjoint set of necessary and sufficient paths."""
    common = all(set(s) == set(game.strategies[0]) for s in game.strategies)
    classes = classify_paths(game, candidate_paths, budget)
    verdicts = {
        "H1": common,
        "H2": game.num_vehicles == 1,
        "H3": game.num_players <= game.capacity,
        "H4": game.allocation == "first_fit_linear",
        "H5": bool(classes.necessary_and_sufficient) and classes.disjoint,
    }
    details = {
        "candidates": [str(r) for r in classes.candidates],
        "necessary": [str(r) for r in classes.necessary],
        "sufficient": [str(r) for r in classes.sufficient],
        "necessary_and_sufficient": [str(r) for r in classes.necessary_and_sufficient],
    }
    return HypothesisReport(verdicts, details)


# ------------------------------------------------------------------------- roles

def necessary_and_sufficient_paths(game: RideShareGame, budget: int = DEFAULT_BUDGET) -> list[PathSegment]:
    return classify_paths(game, budget=budget).necessary_and_sufficient


def classify_roles(game: RideShareGame, profile: Sequence[int],
                   paths: Optional[Sequence[PathSegment]] = None) -> list[str]:
    """Driver, passenger or pedestrian per player relative to the given corridors.

    A riding path strictly containing a corridor makes a driver, one equal to
    it a passenger. ``paths`` defaults to the game's necessary and sufficient paths.
    """
    if paths is None:
        paths = necessary_and_sufficient_paths(game)
    if not paths:
        raise NoNecessaryPath("no necessary path known for this game")
    roles = []
    for i in range(game.num_players):
        role = "pedestrian"
        for rc in riding_path(game, profile, i):
            hit = [r for r in paths if segment_contained(r, rc)]
            if hit:
                role = "passenger" if any(rc == r for r in hit) else "driver"
                break
        roles.append(role)
    return roles


# --------------------------------------------------------------------- lemma checks

@dataclass
class LemmaReport:
    checked: int = 0
    excluded: int = 0
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def _require_copy_hypotheses(game: RideShareGame) -> None:
    if not all(set(s) == set(game.strategies[0]) for s in game.strategies):
        raise ValueError("copy check needs a common strategy set")
    if game.num_players > game.capacity:
        raise ValueError("copy check needs N <= w")


def check_copy_lemma(game: RideShareGame, samples: Optional[Iterable[tuple]] = None,
                     budget: int = DEFAULT_BUDGET) -> LemmaReport:
    """Copying another player's trip never costs more than that player paid.

    ``samples`` holds ``(profile, i, j)`` triples; ``None`` checks every one.
    Updates that strand a previously served edge of the copied trip are skipped.
    """
    _require_copy_hypotheses(game)
    costs = profile_costs(game)
    if samples is None:
        n = game.num_players
        samples = ((p, i, j) for p in costs.profiles(budget) for i in range(n) for j in range(n))
    report = LemmaReport()
    for p, i, j in samples:
        p = tuple(p)
        k = game.strategies[i].index(game.strategies[j][p[j]])
        q = deviate(p, i, k)
        before, after = costs.flow(p), costs.flow(q)
        trip = game.strategies[i][k]
        if not all(after.M(*te) != 0 for te in trip.timed_edges() if before.M(*te) > 0):
            report.excluded += 1
            continue
        report.checked += 1
        if costs(q)[i] > costs(p)[j]:
            report.violations.append((p, i, j, costs(q)[i], costs(p)[j]))
    return report


def random_copy_samples(game: RideShareGame, count: int, seed: int = 0) -> list[tuple]:
    rng = random.Random(seed)
    counts = profile_costs(game).counts
    n = game.num_players
    return [(tuple(rng.randrange(c) for c in counts), rng.randrange(n), rng.randrange(n))
            for _ in range(count)]


def check_driver_stability(game: RideShareGame, paths: Optional[Sequence[PathSegment]] = None,
                           budget: int = DEFAULT_BUDGET) -> LemmaReport:
    """A player whose own best response made them a driver cannot improve while still a driver.

    Explores every best-response path (any player, any strict best response)
    from every such update, tracking which drivers earned their role by
    their own update.
    """
    if paths is None:
        paths = necessary_and_sufficient_paths(game, budget)
    if not paths:
        raise NoNecessaryPath("no necessary path known for this game")
    costs = profile_costs(game)
    n = game.num_players
    roles_cache: dict = {}

    def roles(p):
        if p not in roles_cache:
            roles_cache[p] = classify_roles(game, p, paths)
        return roles_cache[p]

    def moves(p):
        for i in range(n):
            for k in best_responses(game, p, i):
                yield i, deviate(p, i, k)

    start = set()
    for p in costs.profiles(budget):
        for i, q in moves(p):
            if roles(q)[i] == "driver":
                start.add((q, frozenset((i,))))
    report = LemmaReport()
    seen = set(start)
    queue = deque(start)
    while queue:
        p, committed = queue.popleft()
        report.checked += 1
        for j in committed:
            if best_responses(game, p, j):
                report.violations.append((p, j))
        for i, q in moves(p):
            r = roles(q)
            nxt = {j for j in committed if r[j] == "driver"}
            if r[i] == "driver":
                nxt.add(i)
            state = (q, frozenset(nxt))
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return report
