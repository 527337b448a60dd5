from rsgame.dynamics import enumerate_pne
from rsgame.graph import PathSegment
from rsgame.theorems import (check_copy_lemma, check_driver_stability, check_theorem_hypotheses,
                             classify_roles, is_necessary_path, is_sufficient_path,
                             random_copy_samples)

CORRIDORS = [PathSegment(3, (3, 4, 1)), PathSegment(3, (4, 3, 1))]


def test_corridor_is_necessary_and_sufficient(fip):
    for r in CORRIDORS:
        assert is_necessary_path(fip, r)
        assert is_sufficient_path(fip, r)


def test_segment_in_no_strategy_is_not_necessary(fip):
    assert not is_necessary_path(fip, PathSegment(1, (1, 2, 1)))


def test_second_vehicle_breaks_necessity(nonfip):
    assert not any(is_necessary_path(nonfip, r) for r in CORRIDORS + [PathSegment(2, (2, 3, 4, 1))])


def test_hypotheses(fip, two_vehicle, nonfip):
    rep = check_theorem_hypotheses(fip)
    assert all(rep[h] for h in ("H1", "H2", "H3", "H4", "H5"))
    assert rep.details["necessary_and_sufficient"] == [str(r) for r in CORRIDORS]
    rep = check_theorem_hypotheses(two_vehicle)
    assert not rep["H2"] and rep["H1"] and rep["H3"]
    rep = check_theorem_hypotheses(nonfip)
    assert not rep["H2"] and not rep["H3"]


def test_roles_at_equilibria(fip):
    for p in enumerate_pne(fip):
        assert sorted(classify_roles(fip, p, CORRIDORS)) == ["driver", "passenger", "passenger"]


def test_all_walkers_are_pedestrians(fip, idx):
    walk = idx["(1,1,3,4,1)"]
    assert classify_roles(fip, (walk,) * 3, CORRIDORS) == ["pedestrian"] * 3


def test_two_driver_profile(nonfip, idx):
    p = (idx["(1,2,3,4,1)"], idx["(1,1,3,4,1)"], idx["(1,2,4,3,1)"])
    assert classify_roles(nonfip, p, CORRIDORS) == ["driver", "pedestrian", "driver"]


def test_copy_identity(fip):
    rep = check_copy_lemma(fip, [((0, 5, 9), 1, 1)])
    assert rep.checked == 1 and rep.holds


def test_copy_random(fip):
    rep = check_copy_lemma(fip, random_copy_samples(fip, 1000, seed=3))
    assert rep.holds and rep.checked + rep.excluded == 1000


def test_copy_filter_excludes_vehicle_loss(fip, idx):
    walk, pick = idx["(1,1,3,4,1)"], idx["(1,2,3,4,1)"]
    # player 0 copies a walker while being the only driver: 3->4 loses its vehicle
    rep = check_copy_lemma(fip, [((pick, walk, walk), 0, 1)])
    assert rep.excluded == 1 and rep.checked == 0


def test_driver_stability(fip):
    rep = check_driver_stability(fip, CORRIDORS)
    assert rep.checked > 0 and rep.holds
