"""Bayesian ride sharing games, pure Bayesian equilibria and obedient recommendations.

A mediator who observes the state ``x`` draws a joint recommendation from
``sigma(. | x)``. The recommendation is obedient (incentive compatible) when,
for every player, recommended action and fixed deviation, following the
recommendation is weakly cheaper in prior-weighted expectation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dynamics import DEFAULT_BUDGET, NoEquilibrium, enumerate_pne, profile_costs
from .lp import LinearProgram, LPResult, solve_lp

IC_TOL = 1e-9


class PolicyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MatrixGame:
    """Finite game given by an explicit cost tensor.

    ``costs`` maps a joint action index tuple to the tuple of player costs.
    """

    actions: tuple
    costs: Mapping
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(tuple(a) for a in self.actions))
        for p in itertools.product(*(range(len(a)) for a in self.actions)):
            if p not in self.costs:
                raise ValueError(f"missing costs for joint action {p}")
            if len(self.costs[p]) != len(self.actions):
                raise ValueError(f"joint action {p}: expected {len(self.actions)} costs")
            if any(c < 0 for c in self.costs[p]):
                raise ValueError(f"joint action {p}: negative cost")

    @property
    def num_players(self) -> int:
        return len(self.actions)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)

    def cost_vector(self, p: Sequence[int]):
        return tuple(self.costs[tuple(p)])

    def strategy_label(self, i: int, k: int) -> str:
        return str(self.actions[i][k])

    def joint_actions(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.strategy_counts)))

    def labels(self, p: Sequence[int]) -> tuple[str, ...]:
        return tuple(self.strategy_label(i, k) for i, k in enumerate(p))


@dataclass(frozen=True, eq=False)
class BayesianGame:
    """Per-state games over shared players and actions, with one prior per player."""

    states: Mapping  # state -> game (MatrixGame or RideShareGame)
    priors: tuple  # per player: mapping state -> probability
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "priors", tuple(dict(p) for p in self.priors))
        counts = {tuple(g.strategy_counts) for g in self.states.values()}
        if len(counts) != 1:
            raise ValueError("all states must share the player and action sets")
        if len(self.priors) != self.num_players:
            raise ValueError("one prior per player required")
        for i, prior in enumerate(self.priors):
            if set(prior) != set(self.states):
                raise ValueError(f"prior of player {i} does not cover exactly the states")
            if any(q < 0 for q in prior.values()):
                raise ValueError(f"prior of player {i} has negative mass")
            if abs(sum(prior.values()) - 1) > 1e-12:
                raise ValueError(f"prior of player {i} does not sum to 1")

    @property
    def state_list(self) -> list:
        return sorted(self.states)

    @property
    def num_players(self) -> int:
        return next(iter(self.states.values())).num_players

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(next(iter(self.states.values())).strategy_counts)

    @property
    def common_prior(self) -> dict | None:
        first = self.priors[0]
        return first if all(p == first for p in self.priors) else None

    def require_common_prior(self) -> dict:
        prior = self.common_prior
        if prior is None:
            raise ValueError("this operation needs a common prior")
        return prior

    def state_cost(self, x, p: Sequence[int]):
        return profile_costs(self.states[x])(tuple(p))

    def joint_actions(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.strategy_counts)))

    def strategy_label(self, i: int, k: int) -> str:
        return next(iter(self.states.values())).strategy_label(i, k)


def expected_cost(bgame: BayesianGame, profile: Sequence[int], i: int):
    """Player ``i``'s expected cost under their own prior."""
    return sum(q * bgame.state_cost(x, profile)[i] for x, q in bgame.priors[i].items())


def expected_game(bgame: BayesianGame) -> MatrixGame:
    actions = tuple(tuple(bgame.strategy_label(i, k) for k in range(n))
                    for i, n in enumerate(bgame.strategy_counts))
    costs = {p: tuple(expected_cost(bgame, p, i) for i in range(bgame.num_players))
             for p in bgame.joint_actions()}
    return MatrixGame(actions, costs)


def enumerate_pbne(bgame: BayesianGame, budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    return enumerate_pne(expected_game(bgame), budget)


def expected_social_cost(bgame: BayesianGame, profile: Sequence[int]):
    prior = bgame.require_common_prior()
    return sum(q * sum(bgame.state_cost(x, profile)) for x, q in prior.items())


def full_information_optimum(bgame: BayesianGame):
    """Expected social cost when the optimal profile is chosen after seeing the state."""
    prior = bgame.require_common_prior()
    return sum(q * min(sum(bgame.state_cost(x, p)) for p in bgame.joint_actions())
               for x, q in prior.items())


# ----------------------------------------------------------------------- policies

@dataclass(frozen=True)
class RecommendationPolicy:
    """``dist[x][joint_action]`` is the probability of recommending that profile in state ``x``."""

    dist: Mapping

    def validate(self, bgame: BayesianGame, tol: float = 1e-9) -> None:
        if set(self.dist) != set(bgame.states):
            raise PolicyError("policy must define a distribution for every state")
        joints = set(bgame.joint_actions())
        for x, d in self.dist.items():
            if not set(d) <= joints:
                raise PolicyError(f"state {x}: unknown joint actions {set(d) - joints}")
            if any(v < -tol for v in d.values()):
                raise PolicyError(f"state {x}: negative probability")
            if abs(sum(d.values()) - 1) > tol:
                raise PolicyError(f"state {x}: probabilities sum to {sum(d.values())}")

    def prob(self, x, a) -> object:
        return self.dist[x].get(tuple(a), 0)

    @classmethod
    def deterministic(cls, bgame: BayesianGame, profile: Sequence[int]) -> "RecommendationPolicy":
        return cls({x: {tuple(profile): 1} for x in bgame.states})

    @classmethod
    def symmetric_2x2(cls, params: Mapping) -> "RecommendationPolicy":
        """Per state ``(alpha, beta)``: (0,0) gets alpha, (0,1) and (1,0) get beta, (1,1) the rest."""
        return cls({x: {(0, 0): a, (0, 1): b, (1, 0): b, (1, 1): 1 - a - 2 * b}
                    for x, (a, b) in params.items()})


@dataclass
class PolicyEvaluation:
    system_cost: object
    ic_slack: dict  # (player, recommended, deviation) -> rhs - lhs
    player_costs: tuple

    @property
    def min_slack(self):
        return min(self.ic_slack.values()) if self.ic_slack else 0

    @property
    def is_ic(self) -> bool:
        return self.min_slack >= -IC_TOL


def obedience_rows(bgame: BayesianGame) -> list[tuple[tuple[int, int, int], dict]]:
    """One row per (player, recommended action, deviation).

    Each row maps ``(x, joint_action)`` to the coefficient of
    ``sigma(joint_action | x)`` in ``follow - deviate <= 0``.
    """
    rows = []
    for i, n in enumerate(bgame.strategy_counts):
        for rec in range(n):
            for dev in range(n):
                if dev == rec:
                    continue
                coefs = {}
                for x in bgame.state_list:
                    q = bgame.priors[i][x]
                    for a in bgame.joint_actions():
                        if a[i] != rec:
                            continue
                        alt = a[:i] + (dev,) + a[i + 1:]
                        coefs[(x, a)] = q * (bgame.state_cost(x, a)[i] - bgame.state_cost(x, alt)[i])
                rows.append(((i, rec, dev), coefs))
    return rows


def evaluate_policy(bgame: BayesianGame, policy: RecommendationPolicy) -> PolicyEvaluation:
    policy.validate(bgame)
    prior = bgame.require_common_prior()
    system = sum(q * policy.prob(x, a) * sum(bgame.state_cost(x, a))
                 for x, q in prior.items() for a in bgame.joint_actions())
    slack = {key: -sum(c * policy.prob(x, a) for (x, a), c in coefs.items())
             for key, coefs in obedience_rows(bgame)}
    players = tuple(
        sum(q * policy.prob(x, a) * bgame.state_cost(x, a)[i]
            for x, q in bgame.priors[i].items() for a in bgame.joint_actions())
        for i in range(bgame.num_players))
    return PolicyEvaluation(system, slack, players)


def build_ic_lp(bgame: BayesianGame, symmetric: bool = False) -> tuple[LinearProgram, list]:
    """Obedience-constrained program minimising expected social cost.

    Returns the program and its variable keys ``(x, joint_action)``.
    ``symmetric=True`` adds ``sigma(a|x) = sigma(reversed a|x)`` (two-player games).
    """
    prior = bgame.require_common_prior()
    keys = [(x, a) for x in bgame.state_list for a in bgame.joint_actions()]
    col = {k: j for j, k in enumerate(keys)}
    c = [prior[x] * sum(bgame.state_cost(x, a)) for x, a in keys]

    A_ub, b_ub, row_names = [], [], []
    for (i, rec, dev), coefs in obedience_rows(bgame):
        row = [0] * len(keys)
        for k, v in coefs.items():
            row[col[k]] = v
        A_ub.append(row)
        b_ub.append(0)
        row_names.append(f"obey_p{i}_{bgame.strategy_label(i, rec)}_not_{bgame.strategy_label(i, dev)}")

    A_eq, b_eq = [], []
    for x in bgame.state_list:
        A_eq.append([1 if kx == x else 0 for kx, _ in keys])
        b_eq.append(1)
        row_names.append(f"sum_x{x}")
    if symmetric:
        if bgame.num_players != 2 or len(set(bgame.strategy_counts)) != 1:
            raise ValueError("symmetric restriction needs two players with equal action counts")
        for x in bgame.state_list:
            for a in bgame.joint_actions():
                if a[0] < a[1]:
                    row = [0] * len(keys)
                    row[col[(x, a)]], row[col[(x, a[::-1])]] = 1, -1
                    A_eq.append(row)
                    b_eq.append(0)
                    row_names.append(f"sym_x{x}_{a[0]}{a[1]}")

    names = [f"s[x{x},{''.join(bgame.strategy_label(i, k) for i, k in enumerate(a))}]" for x, a in keys]
    return LinearProgram(c, A_ub, b_ub, A_eq, b_eq, names=names, row_names=row_names), keys


@dataclass
class BCEResult:
    policy: RecommendationPolicy
    cost: object
    max_ic_violation: object
    lp: LPResult


def optimal_bce(bgame: BayesianGame, exact: bool = False, symmetric: bool = False) -> BCEResult:
    lp, keys = build_ic_lp(bgame, symmetric)
    result = solve_lp(lp, exact=exact)
    if result.status != "optimal":
        # a pure Bayesian equilibrium played in every state is always feasible
        raise AssertionError(f"obedience program reported {result.status}")
    dist: dict = {x: {} for x in bgame.states}
    for (x, a), v in zip(keys, result.x):
        dist[x][a] = v
    policy = RecommendationPolicy(dist)
    evaluation = evaluate_policy(bgame, policy)
    violation = max(0, -evaluation.min_slack)
    if violation > IC_TOL:
        raise AssertionError(f"solver policy violates obedience by {violation}")
    return BCEResult(policy, result.objective, violation, result)


@dataclass(frozen=True)
class BCEPriceOfAnarchy:
    pbne: object
    bce: object
    pbne_cost: object
    bce_cost: object
    optimum: object


def bce_poa(bgame: BayesianGame, exact: bool = True, bce_cost=None) -> BCEPriceOfAnarchy:
    """Worst pBNE and optimal-BCE expected social cost relative to the full-information optimum.

    ``bce_cost`` overrides the solver optimum, e.g. to rate a given policy.
    """
    equilibria = enumerate_pbne(bgame)
    if not equilibria:
        raise NoEquilibrium("no pure Bayesian Nash equilibrium")
    worst = max(expected_social_cost(bgame, p) for p in equilibria)
    opt = full_information_optimum(bgame)
    if bce_cost is None:
        bce_cost = optimal_bce(bgame, exact=exact).cost
    return BCEPriceOfAnarchy(worst / opt, bce_cost / opt, worst, bce_cost, opt)
