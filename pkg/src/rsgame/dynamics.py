"""Best-response dynamics, equilibria, improvement graphs and price of anarchy.

Everything here works on *index profiles* (a tuple holding one strategy index
per player) and on any game object exposing ``strategy_counts``,
``num_players`` and ``cost_vector(indices)``. Ride sharing games and the
matrix games of :mod:`rsgame.bayes` both qualify.
"""

from __future__ import annotations

import random
import weakref
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .graph import all_profiles

Profile = tuple[int, ...]

DEFAULT_BUDGET = 100_000


class BudgetExceeded(RuntimeError):
    """The profile space is larger than the configured budget."""


class NoEquilibrium(RuntimeError):
    pass


class ProfileCosts:
    """Lazily memoised cost vectors of one game."""

    def __init__(self, game):
        self.game = game
        self.counts = tuple(game.strategy_counts)
        self._costs: dict = {}
        self._flows: dict = {}

    @property
    def size(self) -> int:
        n = 1
        for c in self.counts:
            n *= c
        return n

    def __call__(self, p: Sequence[int]):
        p = tuple(p)
        try:
            return self._costs[p]
        except KeyError:
            pass
        if hasattr(self.game, "graph"):
            from .cost import player_costs

            c = player_costs(self.game, self.game.profile(p), self.flow(p))
        else:
            c = tuple(self.game.cost_vector(p))
        self._costs[p] = c
        return c

    def flow(self, p: Sequence[int]):
        """Cached :class:`~rsgame.allocation.FlowState` (ride sharing games only)."""
        p = tuple(p)
        try:
            return self._flows[p]
        except KeyError:
            from .allocation import compute_flows

            f = self._flows[p] = compute_flows(self.game, self.game.profile(p))
            return f

    def profiles(self, budget: int = DEFAULT_BUDGET) -> Iterable[Profile]:
        if self.size > budget:
            raise BudgetExceeded(f"{self.size} profiles exceed budget {budget}")
        return all_profiles(self.counts)


_caches: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def profile_costs(game) -> ProfileCosts:
    try:
        return _caches[game]
    except KeyError:
        cache = _caches[game] = ProfileCosts(game)
        return cache
    except TypeError:  # not weak-referenceable
        return ProfileCosts(game)


def deviate(p: Sequence[int], i: int, k: int) -> Profile:
    return tuple(p[:i]) + (k,) + tuple(p[i + 1:])


def _tiebreak(game, i: int, k: int):
    strategies = getattr(game, "strategies", None)
    return strategies[i][k] if strategies is not None else k


def best_response(game, profile: Sequence[int], i: int) -> int:
    """Cheapest strategy of ``i`` against ``profile``.

    The current strategy wins any tie it is part of; otherwise the
    lexicographically smallest strategy is returned.
    """
    costs = profile_costs(game)
    n = costs.counts[i]
    if n == 0:
        raise ValueError(f"player {i} has no strategies")
    current = costs(profile)[i]
    best_k, best_c = profile[i], current
    for k in sorted(range(n), key=lambda k: _tiebreak(game, i, k)):
        c = costs(deviate(profile, i, k))[i]
        if c < best_c:
            best_k, best_c = k, c
    return best_k


def best_responses(game, profile: Sequence[int], i: int) -> list[int]:
    """All strict best responses (empty when ``i`` cannot improve)."""
    costs = profile_costs(game)
    options = [(costs(deviate(profile, i, k))[i], k) for k in range(costs.counts[i])]
    best = min(c for c, _ in options)
    if not best < costs(profile)[i]:
        return []
    return [k for c, k in options if c == best]


def is_pne(game, profile: Sequence[int]) -> bool:
    costs = profile_costs(game)
    own = costs(profile)
    for i, n in enumerate(costs.counts):
        for k in range(n):
            if k != profile[i] and costs(deviate(profile, i, k))[i] < own[i]:
                return False
    return True


def enumerate_pne(game, budget: int = DEFAULT_BUDGET) -> list[Profile]:
    return [p for p in profile_costs(game).profiles(budget) if is_pne(game, p)]


# --------------------------------------------------------------------------- dynamics

@dataclass(frozen=True)
class DynamicsStep:
    profile: Profile  # profile before the move
    player: int
    new_strategy: int
    cost_before: object
    cost_after: object
    potential: object = None


@dataclass
class DynamicsTrace:
    initial: Profile
    steps: list[DynamicsStep] = field(default_factory=list)
    status: str = "step-limit"
    final: Profile = ()
    cycle: list[Profile] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def profiles(self) -> list[Profile]:
        return [self.initial] + [deviate(s.profile, s.player, s.new_strategy) for s in self.steps]


def run_dynamics(
    game,
    initial: Sequence[int],
    order: Sequence[int] | str | None = None,
    max_steps: Optional[int] = None,
    potential: Callable | None = None,
) -> DynamicsTrace:
    """Best-response dynamics in player rotation.

    ``order`` is either an explicit rotation, ``"roundrobin"`` (the default)
    or ``"random:<seed>"``, which reshuffles every rotation.
    Stops with ``pNE-reached`` after a full rotation without improvement,
    ``cycle-detected`` when a profile repeats, or ``step-limit``.
    """
    costs = profile_costs(game)
    n = len(costs.counts)
    if max_steps is None:
        max_steps = 2 * costs.size
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    rng = None
    if order is None or order == "roundrobin":
        rotation = list(range(n))
    elif isinstance(order, str) and order.startswith("random:"):
        rng = random.Random(int(order.split(":", 1)[1]))
        rotation = list(range(n))
    elif isinstance(order, str):
        raise ValueError(f"unknown order {order!r}")
    else:
        rotation = list(order)

    current = tuple(initial)
    trace = DynamicsTrace(initial=current)
    seen = {current: 0}
    while True:
        if rng is not None:
            rng.shuffle(rotation)
        moved = False
        for i in rotation:
            k = best_response(game, current, i)
            if k == current[i]:
                continue
            nxt = deviate(current, i, k)
            before, after = costs(current)[i], costs(nxt)[i]
            assert after < before
            trace.steps.append(DynamicsStep(current, i, k, before, after,
                                            potential(nxt) if potential else None))
            current, moved = nxt, True
            if current in seen:
                trace.status = "cycle-detected"
                trace.cycle = trace.profiles()[seen[current]:]
                trace.final = current
                return trace
            seen[current] = len(trace.steps)
            if len(trace.steps) >= max_steps:
                trace.final = current
                return trace
        if not moved:
            trace.status = "pNE-reached"
            trace.final = current
            return trace


# ------------------------------------------------------------------ improvement graph

@dataclass(frozen=True)
class ImprovementEdge:
    source: Profile
    target: Profile
    player: int
    delta: object  # cost change of the deviator (negative)


@dataclass
class ImprovementGraph:
    """Strict-improvement graph over all profiles.

    ``moves="better"`` keeps every strictly improving unilateral deviation;
    ``moves="best"`` keeps only deviations to a strict best response.
    """

    nodes: list[Profile]
    edges: list[ImprovementEdge]
    moves: str = "better"

    def __post_init__(self):
        self.index = {p: k for k, p in enumerate(self.nodes)}
        self.succ: dict = {p: [] for p in self.nodes}
        for e in self.edges:
            self.succ[e.source].append(e)

    def sinks(self) -> list[Profile]:
        return [p for p in self.nodes if not self.succ[p]]

    def find_cycle(self) -> list[Profile] | None:
        """A directed cycle (first node repeated at the end) or ``None``; iterative DFS."""
        color: dict = {}
        for root in self.nodes:
            if root in color:
                continue
            color[root] = 1
            path = [root]
            stack = [iter(self.succ[root])]
            while stack:
                for e in stack[-1]:
                    q = e.target
                    state = color.get(q)
                    if state == 1:
                        return path[path.index(q):] + [q]
                    if state is None:
                        color[q] = 1
                        path.append(q)
                        stack.append(iter(self.succ[q]))
                        break
                else:
                    color[path.pop()] = 2
                    stack.pop()
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def to_dot(self, name: str = "improvement") -> str:
        lines = [f"digraph {name} {{"]
        for p in self.nodes:
            lines.append(f'  {self.index[p]} [label="{self.index[p]}"];')
        for e in self.edges:
            lines.append(f'  {self.index[e.source]} -> {self.index[e.target]} [label="{e.player}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_improvement_graph(game, moves: str = "better", budget: int = DEFAULT_BUDGET) -> ImprovementGraph:
    if moves not in ("better", "best"):
        raise ValueError(f"moves must be 'better' or 'best', not {moves!r}")
    costs = profile_costs(game)
    nodes = list(costs.profiles(budget))
    edges = []
    for p in nodes:
        own = costs(p)
        for i, n in enumerate(costs.counts):
            options = [(costs(deviate(p, i, k))[i], k) for k in range(n) if k != p[i]]
            improving = [(c, k) for c, k in options if c < own[i]]
            if moves == "best" and improving:
                best = min(c for c, _ in improving)
                improving = [(c, k) for c, k in improving if c == best]
            edges.extend(ImprovementEdge(p, deviate(p, i, k), i, c - own[i]) for c, k in improving)
    return ImprovementGraph(nodes, edges, moves)


def has_fip(game, moves: str = "best", budget: int = DEFAULT_BUDGET) -> bool:
    """Whether every sequence of improving updates ends in a pNE.

    By default updates are best responses, the way players update in turn to
    minimise their cost; pass ``moves="better"`` for arbitrary improvements.
    """
    return build_improvement_graph(game, moves, budget).is_acyclic()


# ----------------------------------------------------------------------- potential

def potential_value(game, profile: Sequence[int]):
    """Minimum player cost at the profile."""
    return min(profile_costs(game)(profile))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass
class PotentialReport:
    checked: int = 0
    strict_violations: list = field(default_factory=list)  # sign(dPhi) != sign(dc)
    weak_violations: list = field(default_factory=list)  # improving move with dPhi > 0

    @property
    def is_ordinal_potential(self) -> bool:
        return not self.strict_violations

    @property
    def weakly_decreasing(self) -> bool:
        return not self.weak_violations


def check_ordinal_potential(game, phi: Callable | None = None, budget: int = DEFAULT_BUDGET) -> PotentialReport:
    """Compare the sign of ``phi`` changes with the deviator's cost change.

    Every unilateral deviation is checked. Each violation is recorded as
    ``(profile, player, new_strategy, d_phi, d_cost)``.
    """
    phi = phi or (lambda p: potential_value(game, p))
    costs = profile_costs(game)
    report = PotentialReport()
    for p in costs.profiles(budget):
        own, phi_p = costs(p), phi(p)
        for i, n in enumerate(costs.counts):
            for k in range(n):
                if k == p[i]:
                    continue
                q = deviate(p, i, k)
                dphi, dc = phi(q) - phi_p, costs(q)[i] - own[i]
                report.checked += 1
                if _sign(dphi) != _sign(dc):
                    report.strict_violations.append((p, i, k, dphi, dc))
                if dc < 0 and dphi > 0:
                    report.weak_violations.append((p, i, k, dphi, dc))
    return report


# --------------------------------------------------------------------- efficiency

def social_cost_of(game, profile: Sequence[int]):
    return sum(profile_costs(game)(profile))


def social_optimum(game, budget: int = DEFAULT_BUDGET) -> tuple[Profile, object]:
    costs = profile_costs(game)
    best = None
    for p in costs.profiles(budget):
        c = sum(costs(p))
        if best is None or c < best[1]:
            best = (p, c)
    return best


@dataclass(frozen=True)
class PriceOfAnarchy:
    worst: object
    best: object
    optimum: object
    worst_profile: Profile
    best_profile: Profile


def price_of_anarchy(game, budget: int = DEFAULT_BUDGET) -> PriceOfAnarchy:
    """Worst and best pNE social cost over the optimum."""
    equilibria = enumerate_pne(game, budget)
    if not equilibria:
        raise NoEquilibrium("game has no pure Nash equilibrium")
    _, opt = social_optimum(game, budget)
    ranked = sorted(equilibria, key=lambda p: (social_cost_of(game, p), p))
    lo, hi = ranked[0], max(ranked, key=lambda p: social_cost_of(game, p))
    ratio = (lambda c: c / opt) if opt else (lambda c: 1 if c == 0 else float("inf"))
    return PriceOfAnarchy(ratio(social_cost_of(game, hi)), ratio(social_cost_of(game, lo)),
                          opt, hi, lo)
