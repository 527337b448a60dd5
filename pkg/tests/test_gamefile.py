import json
from fractions import Fraction
from importlib import resources

import pytest

from rsgame.bayes import expected_game
from rsgame.gamefile import (GameFileError, dumps_game, game_document, games_equal, load_game_document,
                             parse_game_file, parse_number)
from rsgame.scenarios import SCENARIOS


def shipped(name):
    return resources.files("rsgame") / "data" / f"{name}.json"


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_shipped_files_match_builders(name, tmp_path):
    game = parse_game_file(shipped(name))
    assert games_equal(game, SCENARIOS[name]())
    out = tmp_path / "again.json"
    out.write_text(dumps_game(game))
    assert games_equal(parse_game_file(out), game)


def test_signaling_file_expected_matrix():
    eg = expected_game(parse_game_file(shipped("signaling")))
    assert eg.cost_vector((0, 0)) == (15, 15)
    assert eg.cost_vector((1, 0)) == (Fraction(25, 2), Fraction(35, 2))
    assert eg.cost_vector((1, 1)) == (16, 16)


def test_numbers():
    assert parse_number("3/4", "x") == Fraction(3, 4)
    assert parse_number(0.25, "x") == Fraction(1, 4)
    assert parse_number("2", "x") == 2
    with pytest.raises(GameFileError):
        parse_number("abc", "x")
    with pytest.raises(GameFileError):
        parse_number(True, "x")


def fip_doc():
    return json.loads(shipped("fip").read_text())


def test_zero_capacity_rejected():
    doc = fip_doc()
    doc["vehicles"]["capacity"] = 0
    with pytest.raises(GameFileError, match=r"vehicles\.capacity.*w > 0"):
        load_game_document(doc)


def test_unknown_field_rejected():
    doc = fip_doc()
    doc["vehicles"]["colour"] = "red"
    with pytest.raises(GameFileError, match="colour"):
        load_game_document(doc)


def test_edge_error_location():
    doc = fip_doc()
    doc["graph"]["edges"][3]["d"] = "x"
    with pytest.raises(GameFileError, match=r"graph\.edges\[3\]\.d"):
        load_game_document(doc)


def test_syntax_error_has_line(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "name": "x",\n  oops\n}\n')
    with pytest.raises(GameFileError, match=r"bad\.json:3:"):
        parse_game_file(bad)


def test_per_state_overrides(fip):
    doc = game_document(fip)
    doc["bayesian"] = {"states": ["0", "1"], "priors": {"0": "1/2", "1": "1/2"},
                       "overrides": {"0": {"vehicles": {"count": 0, "capacity": 4, "initial_nodes": []}}}}
    bg = load_game_document(doc)
    assert bg.states[0].num_vehicles == 0 and bg.states[1].num_vehicles == 1
    assert games_equal(load_game_document(game_document(bg)), bg)


def test_table_cost_round_trip(fip):
    doc = game_document(fip)
    doc["cost"] = {"model": "table", "default": [1, "1/2", "1/3", "1/4", "1/5"]}
    g = load_game_document(doc)
    assert games_equal(load_game_document(game_document(g)), g)
