import json

import pytest

from finalchain import chain as fc
from finalchain.errors import InvalidSystem
from finalchain.system import (FinSystem, PointedSystem, as_gen, cover_soundness_violations, dead, disjoint_union,
                               dump, from_json, load, make_system, parent, to_json, von_neumann, von_neumann_naive,
                               von_omega, von_set, zermelo)


def test_duplicate_successors_rejected():
    with pytest.raises(InvalidSystem):
        FinSystem((0, 1), {0: (1, 1)})


def test_duplicate_states_rejected():
    with pytest.raises(InvalidSystem):
        FinSystem((0, 0), {})


def test_unknown_successor_rejected():
    with pytest.raises(InvalidSystem, match="not a state"):
        FinSystem((0,), {0: (7,)})


def test_unknown_root_rejected():
    with pytest.raises(InvalidSystem):
        PointedSystem(FinSystem((0,), {}), 3)


def test_make_system_adds_sinks():
    x = make_system({"a": ["b", "c"]}, "a")
    assert set(x.sys.states) == {"a", "b", "c"}
    assert x.successors("b") == ()
    assert x.reachable() == ["a", "b", "c"]


def test_dead_has_no_moves():
    assert dead().successors() == ()


def test_parent_keeps_repeated_children_apart():
    z = zermelo(1)
    p = parent([z, z])
    assert p.successors() == ((0, 1), (1, 1))
    assert len(p.sys) == 5


def test_parent_of_generator_is_generator():
    g = parent([von_omega(), dead()])
    assert g.cover(g.root, 3) == [(0, "omega"), (1, ())]
    assert g.cover((0, "omega"), 2) == [(0, 0), (0, 1), (0, 2)]


@pytest.mark.parametrize("i", range(5))
def test_von_neumann_shared_matches_naive(i):
    assert fc.project(von_neumann(i), i + 2) == fc.project(von_neumann_naive(i), i + 2)
    assert len(von_neumann_naive(i).sys) == 2**i


def test_von_set_successors():
    x = von_set({0, 2})
    assert x.root == ("set", (0, 2))
    assert x.successors() == (0, 2)
    assert fc.project(x, 3) == fc.project(parent([von_neumann(0), von_neumann(2)]), 3)


def test_von_set_rejects_negative():
    with pytest.raises(ValueError):
        von_set({-1})


def test_zermelo_chain():
    z = zermelo(3)
    assert [z.successors(k) for k in range(4)] == [(), (0,), (1,), (2,)]


def test_disjoint_union_tags():
    sys, roots = disjoint_union(zermelo(1), zermelo(1))
    assert roots == [(0, 1), (1, 1)]
    assert sys.succ[(1, 1)] == ((1, 0),)


def test_as_gen_of_finite():
    g = as_gen(zermelo(2))
    assert list(g.enumerate_successors()) == [1]
    assert g.cover(2, 5) == [1]


def test_von_omega_enumeration_and_cover():
    g = von_omega()
    assert list(g.enumerate_successors(limit=4)) == [0, 1, 2, 3]
    assert g.cover(g.root, 3) == [0, 1, 2, 3]
    assert list(g.enumerate_successors(3)) == [0, 1, 2]


@pytest.mark.parametrize("n", range(6))
def test_von_omega_cover_sound(n):
    assert cover_soundness_violations(von_omega(), "omega", n) == []


def test_bad_cover_detected():
    g = von_omega()
    broken = type(g)(g.root, g.succ_enum, lambda s, n: [0] if s == "omega" else list(range(s)), "broken")
    assert cover_soundness_violations(broken, "omega", 3)[:3] == [1, 2, 3]


def test_json_round_trip(tmp_path):
    x = make_system({"a": ["b"], "b": ["a", "c"]}, "a")
    path = tmp_path / "x.json"
    dump(x, str(path))
    y = load(str(path))
    assert to_json(y) == to_json(x)
    assert json.loads(path.read_text())["root"] == "a"


def test_json_integer_states_renamed_consistently():
    data = to_json(von_neumann(2))
    y = from_json(data)
    assert fc.project(y, 4) == fc.project(von_neumann(2), 4)


def test_malformed_json_rejected():
    with pytest.raises(InvalidSystem):
        from_json({"states": ["a"]})
    with pytest.raises(InvalidSystem):
        from_json({"states": "a", "root": "a"})
