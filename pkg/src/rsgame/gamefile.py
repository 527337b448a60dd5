"""JSON game definition files.

A ride sharing game file::

    {
      "name": "fip",
      "horizon": 5,
      "graph": {"nodes": 4, "edges": [{"from": 1, "to": 2, "d": 1}, ...]},
      "players": {"count": 3, "initial_nodes": [1, 1, 1],
                  "strategy_rule": {"required_nodes": [3, 4], "return_to_start": true}},
      "vehicles": {"count": 1, "capacity": 4, "initial_nodes": [2]},
      "cost": {"model": "formula"},
      "allocation": "first_fit_linear"
    }

``players.strategies`` may replace ``strategy_rule`` with explicit node lists
per player. A ``bayesian`` section turns the file into a Bayesian game, either
with per-state overrides of the ride sharing sections or, without a graph,
with explicit cost matrices. Numbers may be integers, decimals or ``"p/q"``
strings.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .bayes import BayesianGame, MatrixGame
from .cost import FormulaCost, TableCost
from .graph import Edge, GameDefinitionError, RideShareGame, RoadGraph, TripPath, enumerate_strategies

TOP_KEYS = {"name", "horizon", "graph", "players", "vehicles", "cost", "allocation", "bayesian", "notes"}
GRAPH_KEYS = {"nodes", "edges"}
EDGE_KEYS = {"from", "to", "d"}
PLAYER_KEYS = {"count", "initial_nodes", "strategies", "strategy_rule"}
RULE_KEYS = {"required_nodes", "return_to_start"}
VEHICLE_KEYS = {"count", "capacity", "initial_nodes"}
COST_KEYS = {"model", "tables", "default"}
TABLE_KEYS = {"from", "to", "costs"}
BAYES_KEYS = {"states", "priors", "overrides", "actions", "cost_matrices", "metadata"}
OVERRIDE_KEYS = {"vehicles", "cost", "players"}


class GameFileError(ValueError):
    """Parse, schema or invariant failure, with the offending location."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def parse_number(value: Any, where: str):
    if isinstance(value, bool):
        raise GameFileError(where, f"expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            f = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise GameFileError(where, f"not a number: {value!r}") from None
        return f.numerator if f.denominator == 1 else f
    raise GameFileError(where, f"expected a number, got {type(value).__name__}")


def format_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def _check_keys(doc: Any, allowed: set, where: str, required: set = frozenset()) -> None:
    if not isinstance(doc, dict):
        raise GameFileError(where, f"expected an object, got {type(doc).__name__}")
    unknown = set(doc) - allowed
    if unknown:
        raise GameFileError(where, f"unknown field(s) {sorted(unknown)}")
    missing = set(required) - set(doc)
    if missing:
        raise GameFileError(where, f"missing field(s) {sorted(missing)}")


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GameFileError(where, f"expected an integer, got {value!r}")
    return value


def _parse_graph(doc, where="graph") -> RoadGraph:
    _check_keys(doc, GRAPH_KEYS, where, GRAPH_KEYS)
    edges = []
    for k, e in enumerate(doc["edges"]):
        w = f"{where}.edges[{k}]"
        _check_keys(e, EDGE_KEYS, w, EDGE_KEYS)
        edges.append(Edge(_int(e["from"], w + ".from"), _int(e["to"], w + ".to"), parse_number(e["d"], w + ".d")))
    try:
        return RoadGraph(_int(doc["nodes"], where + ".nodes"), tuple(edges))
    except GameDefinitionError as exc:
        raise GameFileError(where, str(exc)) from None


def _parse_cost(doc, where="cost"):
    _check_keys(doc, COST_KEYS, where, {"model"})
    model = doc["model"]
    if model == "formula":
        if set(doc) - {"model"}:
            raise GameFileError(where, "formula model takes no tables")
        return FormulaCost()
    if model == "table":
        tables = {}
        for k, t in enumerate(doc.get("tables", [])):
            w = f"{where}.tables[{k}]"
            _check_keys(t, TABLE_KEYS, w, TABLE_KEYS)
            tables[(t["from"], t["to"])] = tuple(parse_number(c, f"{w}.costs[{j}]") for j, c in enumerate(t["costs"]))
        default = doc.get("default")
        if default is not None:
            default = tuple(parse_number(c, f"{where}.default[{j}]") for j, c in enumerate(default))
        return TableCost(tables, default)
    raise GameFileError(where + ".model", f"unknown cost model {model!r}")


def _parse_ride_game(doc: dict, name: str, where: str = "") -> RideShareGame:
    def at(key):
        return f"{where}{key}"

    for key in ("horizon", "graph", "players", "vehicles", "cost"):
        if key not in doc:
            raise GameFileError(at(key), "missing section")
    horizon = _int(doc["horizon"], at("horizon"))
    graph = _parse_graph(doc["graph"], at("graph"))

    players = doc["players"]
    _check_keys(players, PLAYER_KEYS, at("players"), {"count", "initial_nodes"})
    n = _int(players["count"], at("players.count"))
    starts = [_int(v, at(f"players.initial_nodes[{k}]")) for k, v in enumerate(players["initial_nodes"])]
    if len(starts) != n:
        raise GameFileError(at("players.initial_nodes"), f"expected {n} entries, got {len(starts)}")
    if ("strategies" in players) == ("strategy_rule" in players):
        raise GameFileError(at("players"), "give exactly one of 'strategies' or 'strategy_rule'")
    if "strategies" in players:
        if len(players["strategies"]) != n:
            raise GameFileError(at("players.strategies"), f"expected {n} strategy lists")
        strategies = [tuple(TripPath(tuple(r)) for r in s) for s in players["strategies"]]
    else:
        rule = players["strategy_rule"]
        _check_keys(rule, RULE_KEYS, at("players.strategy_rule"), {"required_nodes"})
        try:
            strategies = [tuple(enumerate_strategies(graph, s, rule["required_nodes"], horizon,
                                                     rule.get("return_to_start", True))) for s in starts]
        except GameDefinitionError as exc:
            raise GameFileError(at("players.strategy_rule"), str(exc)) from None

    vehicles = doc["vehicles"]
    _check_keys(vehicles, VEHICLE_KEYS, at("vehicles"), VEHICLE_KEYS)
    m = _int(vehicles["count"], at("vehicles.count"))
    vstarts = [_int(v, at(f"vehicles.initial_nodes[{k}]")) for k, v in enumerate(vehicles["initial_nodes"])]
    if len(vstarts) != m:
        raise GameFileError(at("vehicles.initial_nodes"), f"expected {m} entries, got {len(vstarts)}")
    capacity = _int(vehicles["capacity"], at("vehicles.capacity"))
    if capacity <= 0:
        raise GameFileError(at("vehicles.capacity"), f"capacity must satisfy w > 0, got {capacity}")

    allocation = doc.get("allocation", "first_fit_linear")
    try:
        return RideShareGame(graph, horizon, strategies, starts, vstarts, capacity,
                             _parse_cost(doc["cost"], at("cost")), allocation, name)
    except GameDefinitionError as exc:
        raise GameFileError(where.rstrip(".") or "game", str(exc)) from None


def _parse_matrix(actions, table, where) -> MatrixGame:
    """Nested lists indexed by each player's action, innermost a cost per player."""
    counts = [len(a) for a in actions]
    costs = {}
    for p in itertools.product(*(range(c) for c in counts)):
        cell = table
        try:
            for k in p:
                cell = cell[k]
        except (IndexError, TypeError):
            raise GameFileError(where, f"no entry for joint action {list(p)}") from None
        if not isinstance(cell, list) or len(cell) != len(actions):
            raise GameFileError(where, f"entry {list(p)} must list {len(actions)} costs")
        costs[p] = tuple(parse_number(c, f"{where}{list(p)}") for c in cell)
    try:
        return MatrixGame(tuple(tuple(a) for a in actions), costs)
    except ValueError as exc:
        raise GameFileError(where, str(exc)) from None


def _parse_bayesian(doc: dict, name: str) -> BayesianGame:
    bay = doc["bayesian"]
    _check_keys(bay, BAYES_KEYS, "bayesian", {"states", "priors"})
    states = [str(s) for s in bay["states"]]
    priors_doc = bay["priors"]
    if isinstance(priors_doc, dict):
        priors_doc = [priors_doc]
    priors = []
    for k, pr in enumerate(priors_doc):
        if set(map(str, pr)) != set(states):
            raise GameFileError(f"bayesian.priors[{k}]", "must give a probability for every state")
        priors.append({_state_key(s): parse_number(v, f"bayesian.priors[{k}].{s}") for s, v in pr.items()})

    games = {}
    if "graph" in doc:
        if "cost_matrices" in bay or "actions" in bay:
            raise GameFileError("bayesian", "cost matrices cannot be combined with a graph")
        overrides = bay.get("overrides", {})
        for s in states:
            patch = overrides.get(s, {})
            _check_keys(patch, OVERRIDE_KEYS, f"bayesian.overrides.{s}")
            merged = {**doc, **patch}
            games[_state_key(s)] = _parse_ride_game(merged, f"{name}[x={s}]")
    else:
        if "actions" not in bay or "cost_matrices" not in bay:
            raise GameFileError("bayesian", "need 'actions' and 'cost_matrices' when no graph is given")
        meta = bay.get("metadata", {})
        for s in states:
            if s not in bay["cost_matrices"]:
                raise GameFileError(f"bayesian.cost_matrices.{s}", "missing matrix")
            g = _parse_matrix(bay["actions"], bay["cost_matrices"][s], f"bayesian.cost_matrices.{s}")
            games[_state_key(s)] = MatrixGame(g.actions, g.costs, meta.get(s, {}))
    n = next(iter(games.values())).num_players
    if len(priors) == 1:
        priors = priors * n
    try:
        return BayesianGame(games, tuple(priors), name)
    except ValueError as exc:
        raise GameFileError("bayesian", str(exc)) from None


def _state_key(s):
    s = str(s)
    return int(s) if s.lstrip("-").isdigit() else s


def load_game_document(doc: dict):
    _check_keys(doc, TOP_KEYS, "game")
    name = doc.get("name", "")
    if "bayesian" in doc:
        return _parse_bayesian(doc, name)
    return _parse_ride_game(doc, name)


def parse_game_file(path) -> RideShareGame | BayesianGame:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return load_game_document(doc)


# ------------------------------------------------------------------ serialization

def _cost_doc(model) -> dict:
    if isinstance(model, FormulaCost):
        return {"model": "formula"}
    if isinstance(model, TableCost):
        out: dict = {"model": "table", "tables": [
            {"from": u, "to": v, "costs": [format_number(c) for c in t]}
            for (u, v), t in sorted(model.tables.items())]}
        if model.default is not None:
            out["default"] = [format_number(c) for c in model.default]
        return out
    raise TypeError(f"cannot serialise cost model {model!r}")


def ride_game_document(game: RideShareGame) -> dict:
    return {
        "name": game.name,
        "horizon": game.horizon,
        "graph": {"nodes": game.graph.num_nodes,
                  "edges": [{"from": e.source, "to": e.target, "d": format_number(e.distance)}
                            for e in game.graph.edges]},
        "players": {"count": game.num_players, "initial_nodes": list(game.player_starts),
                    "strategies": [[list(r.nodes) for r in s] for s in game.strategies]},
        "vehicles": {"count": game.num_vehicles, "capacity": game.capacity,
                     "initial_nodes": list(game.vehicle_starts)},
        "cost": _cost_doc(game.cost_model),
        "allocation": game.allocation,
    }


def _matrix_doc(game: MatrixGame):
    def nest(prefix):
        if len(prefix) == game.num_players:
            return [format_number(c) for c in game.costs[tuple(prefix)]]
        return [nest(prefix + [k]) for k in range(game.strategy_counts[len(prefix)])]

    return nest([])


def game_document(game) -> dict:
    if isinstance(game, RideShareGame):
        return ride_game_document(game)
    if isinstance(game, BayesianGame):
        states = game.state_list
        first = game.states[states[0]]
        priors = [{str(x): format_number(p[x]) for x in states} for p in game.priors]
        if isinstance(first, MatrixGame):
            bay = {
                "states": [str(x) for x in states],
                "priors": priors,
                "actions": [list(a) for a in first.actions],
                "cost_matrices": {str(x): _matrix_doc(game.states[x]) for x in states},
            }
            meta = {str(x): dict(game.states[x].metadata) for x in states if game.states[x].metadata}
            if meta:
                bay["metadata"] = meta
            return {"name": game.name, "bayesian": bay}
        base = ride_game_document(first)
        base["name"] = game.name
        overrides = {}
        for x in states:
            doc = ride_game_document(game.states[x])
            patch = {k: doc[k] for k in OVERRIDE_KEYS if doc[k] != base[k]}
            if patch:
                overrides[str(x)] = patch
        base["bayesian"] = {"states": [str(x) for x in states], "priors": priors}
        if overrides:
            base["bayesian"]["overrides"] = overrides
        return base
    raise TypeError(f"cannot serialise {type(game).__name__}")


def dumps_game(game) -> str:
    return json.dumps(game_document(game), indent=2) + "\n"


def fingerprint(game) -> str:
    """SHA-256 of the canonical game document, name excluded."""
    doc = dict(game_document(game))
    doc.pop("name", None)
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def games_equal(a, b) -> bool:
    return fingerprint(a) == fingerprint(b)
