import pytest

from rsgame.graph import TripPath
from rsgame.scenarios import SCENARIOS, ScenarioSpec, build_base_parts


def test_base_parts():
    parts = build_base_parts()
    assert len(parts["strategies"][0]) == 18
    assert len(parts["graph"].edges) == 16
    assert parts["player_starts"] == (1, 1, 1)


def test_fleets(nonfip, fip, two_vehicle):
    assert (nonfip.num_vehicles, nonfip.capacity) == (2, 1)
    assert (fip.num_vehicles, fip.capacity) == (1, 4)
    assert (two_vehicle.num_vehicles, two_vehicle.capacity) == (2, 4)
    assert set(two_vehicle.vehicle_starts) == {2}


def test_signaling_metadata(signaling):
    assert signaling.states[0].metadata["num_vehicles"] == 0
    assert signaling.states[1].metadata["num_vehicles"] == 1
    assert signaling.states[1].metadata["trips"] == {"C": str(TripPath((1, 2, 3, 1))),
                                                     "D": str(TripPath((1, 1, 3, 1)))}
    assert signaling.states[0].actions == (("C", "D"), ("C", "D"))


def test_builders_are_deterministic():
    for build in SCENARIOS.values():
        a, b = build(), build()
        assert a.name == b.name


def test_spec_overrides():
    g = ScenarioSpec("fip", {"M": 2}).build()
    assert g.num_vehicles == 2 and g.capacity == 4
    with pytest.raises(KeyError):
        ScenarioSpec("nope").build()
