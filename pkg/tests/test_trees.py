import pytest

from finalchain import chain as fc
from finalchain.errors import NotAChannel, NotIncreasing
from finalchain.system import von_set
from finalchain.trees import (Channel, InverseChain, all_bits, beta_embedding, bits_encode, channel_image,
                              complete_binary, final_chain, is_tidy, pad_embedding, restrict_lemma_check, to_dot,
                              whole_channel)


def test_complete_binary_levels_and_laws():
    D = complete_binary(4)
    assert D.top == 3
    assert [len(D.level(j)) for j in D.indices()] == [1, 2, 4, 8]
    assert D.connect(1, 3, "101") == "1"
    assert D.law_violations() == []


def test_final_chain_laws():
    assert final_chain(3).law_violations() == []


def test_connect_order_enforced():
    with pytest.raises(ValueError):
        complete_binary(3).connect(2, 1, "0")
    with pytest.raises(IndexError):
        complete_binary(3).level(3)


def test_omega_binary_is_lazy():
    D = complete_binary(None)
    assert D.top is None
    assert len(D.level(10)) == 1024
    assert len(D.indices(5)) == 6


def test_complete_binary_is_tidy():
    r = is_tidy(complete_binary(5))
    assert r.tidy
    assert r.limit_clause == "not applicable"


def isolated_chain():
    # "11" at level 2 has no extension to level 3
    levels = {0: [""], 1: ["0", "1"], 2: ["00", "01", "10", "11"], 3: ["000", "010", "100"]}
    return InverseChain(3, levels.__getitem__, lambda j, i, x: x[:j], "isolated")


def test_isolated_node_not_tidy():
    r = is_tidy(isolated_chain())
    assert not r.tidy
    assert "11" in r.site and "level 2" in r.site


def test_empty_level_not_tidy():
    D = InverseChain(2, lambda j: [] if j == 2 else [""] if j == 0 else ["0"], lambda j, i, x: x[:j])
    r = is_tidy(D)
    assert not r.tidy and "empty" in r.site


def test_two_roots_not_tidy():
    D = InverseChain(1, lambda j: ["a", "b"] if j == 0 else ["a1"], lambda j, i, x: x[:1])
    assert "root" in is_tidy(D).site


def test_tidy_chain_is_channel_through_itself():
    for i in range(1, 6):
        assert whole_channel(complete_binary(i)).is_channel()


def test_channel_violations():
    D = complete_binary(3)
    C = Channel(D, lambda j: {"": [""], 1: ["0"], 2: ["00", "10"]}.get(j if j else "", None) or [""])
    bad = C.violations()
    assert any("not downward closed" in b for b in bad)
    assert not whole_channel(isolated_chain()).is_channel()


def test_full_branches():
    C = whole_channel(complete_binary(3))
    branches = C.full_branches()
    assert len(branches) == 4
    assert branches[0] == ("", "0", "00")


def test_bits_encode():
    assert bits_encode("101") == {0, 2, 3}
    assert bits_encode("") == {0}
    with pytest.raises(ValueError):
        bits_encode("12")


def test_beta_empty_string():
    B = beta_embedding(1)
    assert fc.to_text(B(0, "")) == "{()}@1"
    assert B(0, "") == fc.project(von_set({0}), 1)


def test_beta_injective_at_length_three():
    B = beta_embedding(4)
    images = {B(3, c) for c in all_bits(3)}
    assert len(images) == 8


def test_beta_naturality_example():
    B = beta_embedding(4)
    assert fc.connect(B(3, "101"), 3) == B(2, "10")


@pytest.mark.parametrize("depth", range(1, 6))
def test_beta_is_cofinal_embedding(depth):
    assert beta_embedding(depth).violations() == []


def test_pad_example():
    E = pad_embedding((0, 2, 4))
    assert E(2, "10") == "1000"
    assert E(1, "1") == "10"
    assert E(0, "") == ""
    assert E.violations() == []


@pytest.mark.parametrize("bad", [(), (1, 1), (2, 1), (-1, 2)])
def test_pad_needs_increasing(bad):
    with pytest.raises(NotIncreasing):
        pad_embedding(bad)


def test_composition_is_embedding():
    E = pad_embedding((0, 1, 3)).then(beta_embedding(4))
    assert E.violations() == []
    assert E(2, "11") == beta_embedding(4)(3, "1100")


def test_noncofinal_map_flagged():
    E = pad_embedding((0, 2))
    short = type(E)(E.source, complete_binary(5), E.index_map, E.level_map)
    assert any("cofinal" in b for b in short.violations())


def test_channel_image_preserves_branches():
    B = whole_channel(complete_binary(3))
    C = channel_image(beta_embedding(3), B)
    assert C.is_channel()
    assert len(C.full_branches()) == len(B.full_branches())
    assert len(C.level(0)) == 1 and len(C.level(3)) == 4


def test_channel_image_fills_gaps():
    B = whole_channel(complete_binary(3))
    C = channel_image(pad_embedding((0, 2, 4)), B)
    assert C.level(3) == {"000", "001", "100", "101"}
    assert C.level(4) == {"0000", "0010", "1000", "1010"}
    assert C.is_channel()


def test_channel_image_rejects_non_channel():
    with pytest.raises(NotAChannel):
        channel_image(beta_embedding(3), whole_channel(isolated_chain()))


def test_restriction_lemma_small():
    report = restrict_lemma_check(3, 3)
    assert report.ok
    assert report.checked == sum(2**j * 2**i for i in range(4) for j in range(i + 1))


def test_embedding_json():
    data = pad_embedding((0, 2)).to_json()
    assert data["index_map"] == {"0": 0, "1": 2}
    assert data["level_maps"]["1"] == {"0": "00", "1": "10"}
    assert data["level_maps"]["0"] == {"ε": "ε"}


def test_dot_binary():
    D = complete_binary(3)
    text = to_dot(D, whole_channel(D))
    assert text.startswith('digraph "chain" {')
    assert text.count("->") == 6
    assert "subgraph level_2" in text
    assert 'label="ε"' in text


def test_dot_channel_only_nodes_above_limit():
    C = channel_image(beta_embedding(4), whole_channel(complete_binary(4)))
    text = to_dot(C.chain, C)
    # level 4 has 65536 elements; only the 8 channel nodes are drawn
    assert text.count("n4_") == 8 + 8
    assert text.count("fillcolor") == 1 + 1 + 2 + 4 + 8
