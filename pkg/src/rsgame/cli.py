"""Command line entry point ``rsg``.

Every command loads one game (``--game file.json`` or ``--scenario name``),
runs one analysis and prints a JSON report. Exit codes: 0 success, 2 budget
exceeded, 3 parse error, 4 analysis impossible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import scenarios
from .bayes import (BayesianGame, RecommendationPolicy, bce_poa, enumerate_pbne, evaluate_policy,
                    expected_cost, expected_social_cost, full_information_optimum, optimal_bce)
from .dynamics import (DEFAULT_BUDGET, BudgetExceeded, DynamicsTrace, ImprovementGraph, NoEquilibrium,
                       build_improvement_graph, check_ordinal_potential, enumerate_pne, price_of_anarchy,
                       profile_costs, run_dynamics)
from .gamefile import GameFileError, fingerprint, game_document, parse_game_file
from .graph import GameDefinitionError, RideShareGame
from .theorems import NoNecessaryPath, check_theorem_hypotheses

EXIT_OK, EXIT_BUDGET, EXIT_PARSE, EXIT_IMPOSSIBLE = 0, 2, 3, 4
COMMANDS = ("dynamics", "pne", "fip", "poa", "potential-check", "hypotheses", "pbne", "bce", "scenario")
DISCREPANCY_TOL = 1e-6


class AnalysisImpossible(RuntimeError):
    pass


def num(x):
    """Report form of a number: integers stay exact, everything else 4 decimals."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    if isinstance(x, int):
        return x
    return round(float(x), 4)


def labels(game, p: Sequence[int]) -> list[str]:
    return [game.strategy_label(i, k) for i, k in enumerate(p)]


def parse_initial(text: Optional[str], game) -> tuple[int, ...]:
    counts = game.strategy_counts
    if text is None:
        return (0,) * len(counts)
    if "," in text:
        p = tuple(int(s) for s in text.split(","))
        if len(p) != len(counts) or any(not 0 <= k < n for k, n in zip(p, counts)):
            raise ValueError(f"profile {text!r} does not fit strategy counts {list(counts)}")
        return p
    idx = int(text)
    size = 1
    for n in counts:
        size *= n
    if not 0 <= idx < size:
        raise ValueError(f"profile id {idx} outside 0..{size - 1}")
    p = []
    for n in reversed(counts):
        idx, k = divmod(idx, n)
        p.append(k)
    return tuple(reversed(p))


# ------------------------------------------------------------------------- DOT export

def trace_to_dot(game, trace: DynamicsTrace, name: str = "trace") -> str:
    lines = [f"digraph {name} {{"]
    profiles = trace.profiles()
    ids: dict = {}
    for p in profiles:
        if p not in ids:
            ids[p] = len(ids)
            lines.append(f'  {ids[p]} [label="{" ".join(labels(game, p))}"];')
    for s, (a, b) in zip(trace.steps, zip(profiles, profiles[1:])):
        lines.append(f'  {ids[a]} -> {ids[b]} [label="{s.player}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(artifact, path, game=None) -> None:
    """Write an improvement graph or a dynamics trace as DOT."""
    if isinstance(artifact, ImprovementGraph):
        text = artifact.to_dot()
    elif isinstance(artifact, DynamicsTrace):
        if game is None:
            raise ValueError("a trace needs its game for node labels")
        text = trace_to_dot(game, artifact)
    else:
        raise TypeError(f"cannot export {type(artifact).__name__} as DOT")
    Path(path).write_text(text)


# --------------------------------------------------------------------------- commands

def _ride_or_state(game, state):
    """The single game a pure-strategy command acts on."""
    if isinstance(game, BayesianGame):
        if state is None:
            raise AnalysisImpossible("Bayesian game: pick a state with --state or use pbne/bce")
        key = int(state) if str(state).lstrip("-").isdigit() else state
        if key not in game.states:
            raise AnalysisImpossible(f"unknown state {state!r}")
        return game.states[key]
    return game


def _need_bayesian(game) -> BayesianGame:
    if not isinstance(game, BayesianGame):
        raise AnalysisImpossible("command needs a Bayesian game")
    return game


def _profile_entry(game, p):
    costs = profile_costs(game)(p)
    return {"profile": list(p), "labels": labels(game, p),
            "costs": [num(c) for c in costs], "social_cost": num(sum(costs))}


def cmd_dynamics(game, args):
    g = _ride_or_state(game, args.state)
    initial = parse_initial(args.initial, g)
    trace = run_dynamics(g, initial, order=args.order, max_steps=args.max_steps)
    if args.dot:
        export_dot(trace, args.dot, g)
    return {
        "status": trace.status,
        "steps": len(trace),
        "initial": _profile_entry(g, trace.initial),
        "final": _profile_entry(g, trace.final),
        "trace": [{"player": s.player, "to": g.strategy_label(s.player, s.new_strategy),
                   "cost_before": num(s.cost_before), "cost_after": num(s.cost_after)}
                  for s in trace.steps],
        "cycle": [labels(g, p) for p in trace.cycle],
    }


def cmd_pne(game, args):
    g = _ride_or_state(game, args.state)
    return {"pne": [_profile_entry(g, p) for p in enumerate_pne(g, args.budget)]}


def cmd_fip(game, args):
    g = _ride_or_state(game, args.state)
    graph = build_improvement_graph(g, args.moves, args.budget)
    cycle = graph.find_cycle()
    if args.dot:
        export_dot(graph, args.dot)
    return {"moves": args.moves, "fip": cycle is None, "profiles": len(graph.nodes),
            "edges": len(graph.edges), "sinks": len(graph.sinks()),
            "witness_cycle": [labels(g, p) for p in cycle] if cycle else []}


def cmd_poa(game, args):
    if isinstance(game, BayesianGame) and args.state is None:
        r = bce_poa(game)
        return {"pbne": num(r.pbne), "bce": num(r.bce), "pbne_cost": num(r.pbne_cost),
                "bce_cost": num(r.bce_cost), "optimum": num(r.optimum)}
    g = _ride_or_state(game, args.state)
    r = price_of_anarchy(g, args.budget)
    return {"worst": num(r.worst), "best": num(r.best), "optimum": num(r.optimum),
            "worst_profile": labels(g, r.worst_profile), "best_profile": labels(g, r.best_profile)}


def cmd_potential(game, args):
    g = _ride_or_state(game, args.state)
    rep = check_ordinal_potential(g, budget=args.budget)

    def show(v):
        p, i, k, dphi, dc = v
        return {"profile": labels(g, p), "player": i, "to": g.strategy_label(i, k),
                "d_phi": num(dphi), "d_cost": num(dc)}

    return {"potential": "min_cost", "deviations": rep.checked,
            "ordinal_potential": rep.is_ordinal_potential,
            "weakly_decreasing_on_improvements": rep.weakly_decreasing,
            "sign_mismatches": len(rep.strict_violations),
            "increases_on_improvements": len(rep.weak_violations),
            "example": show(rep.weak_violations[0]) if rep.weak_violations else None}


def cmd_hypotheses(game, args):
    g = _ride_or_state(game, args.state)
    if not isinstance(g, RideShareGame):
        raise AnalysisImpossible("hypotheses need a ride sharing game")
    rep = check_theorem_hypotheses(g, budget=args.budget)
    return {"verdicts": rep.verdicts, **rep.details}


def cmd_pbne(game, args):
    bg = _need_bayesian(game)
    out = []
    for p in enumerate_pbne(bg, args.budget):
        out.append({"profile": list(p), "labels": labels(bg, p),
                    "expected_costs": [num(expected_cost(bg, p, i)) for i in range(bg.num_players)],
                    "expected_social_cost": num(expected_social_cost(bg, p))})
    return {"pbne": out}


def _policy_doc(bg, policy: RecommendationPolicy):
    return {str(x): {"".join(labels(bg, a)): num(policy.prob(x, a)) for a in bg.joint_actions()}
            for x in bg.state_list}


def cmd_bce(game, args):
    bg = _need_bayesian(game)
    result = optimal_bce(bg, exact=True)
    poa = bce_poa(bg, bce_cost=result.cost)
    out = {
        "pbne_cost": num(poa.pbne_cost),
        "full_information_optimum": num(poa.optimum),
        "lp_optimum": num(result.cost),
        "lp_policy": _policy_doc(bg, result.policy),
        "poa": {"pbne": num(poa.pbne), "bce": num(poa.bce)},
    }
    if bg.name == "signaling":
        reported = evaluate_policy(bg, RecommendationPolicy.symmetric_2x2(scenarios.REPORTED_POLICY))
        out["reported_policy_cost"] = num(reported.system_cost)
        out["reported_policy_ic"] = reported.is_ic
        out["reported_policy_min_slack"] = num(reported.min_slack)
        out["poa"]["reported_policy"] = num(reported.system_cost / poa.optimum)
        out["discrepancy"] = bool(result.cost < reported.system_cost - DISCREPANCY_TOL)
    return out


def cmd_scenario(game, args):
    return {"game": game_document(game)}


HANDLERS = {
    "dynamics": cmd_dynamics, "pne": cmd_pne, "fip": cmd_fip, "poa": cmd_poa,
    "potential-check": cmd_potential, "hypotheses": cmd_hypotheses, "pbne": cmd_pbne,
    "bce": cmd_bce, "scenario": cmd_scenario,
}


def run_command(command: str, game, args) -> dict:
    """Dispatch one command; returns the report without timing."""
    if command not in HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    return {"command": command, "game": game.name, "fingerprint": fingerprint(game),
            "results": HANDLERS[command](game, args)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rsg", description="Equilibrium analysis of ride sharing games.")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--game", help="game definition file (JSON)")
    src.add_argument("--scenario", choices=sorted(scenarios.SCENARIOS), help="built-in game")
    ap.add_argument("--initial", help="initial profile: id or comma separated strategy indices")
    ap.add_argument("--order", default="roundrobin", help="roundrobin or random:<seed>")
    ap.add_argument("--max-steps", type=int, default=None)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum number of profiles")
    ap.add_argument("--moves", choices=("best", "better"), default="best",
                    help="improvement moves for fip")
    ap.add_argument("--state", help="state of a Bayesian game for pure-strategy commands")
    ap.add_argument("--out", help="write the report here as well")
    ap.add_argument("--dot", help="write a DOT graph (fip, dynamics)")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        game = parse_game_file(args.game) if args.game else scenarios.SCENARIOS[args.scenario]()
    except (GameFileError, GameDefinitionError, OSError) as exc:
        print(f"rsg: {exc}", file=sys.stderr)
        return EXIT_PARSE

    start = time.perf_counter()
    try:
        report = run_command(args.command, game, args)
    except BudgetExceeded as exc:
        print(f"rsg: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NoEquilibrium, NoNecessaryPath, AnalysisImpossible) as exc:
        print(f"rsg: {exc}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    except ValueError as exc:
        print(f"rsg: {exc}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    report["wall_clock"] = round(time.perf_counter() - start, 3)

    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
