import random

import pytest

from mwpflow.delta_graph import DeltaGraph
from mwpflow.polynomial import ChoiceRegistry, delta


def covered_by_raw(raw, assignment):
    return any(all(assignment[i] == v for i, v in ds) for ds in raw)


def test_insert_single_vertex():
    g = DeltaGraph(ChoiceRegistry([1, 3]))
    g.insert([delta(0, 1)])
    assert g.vertices() == [(delta(0, 1),)]
    assert list(g.edges()) == []
    assert not g.is_complete()


def test_full_fan_fuses_to_empty():
    g = DeltaGraph(ChoiceRegistry([1, 3]))
    g.insert([delta(0, 1)])
    g.insert([delta(1, 1)])
    assert not g.is_complete()
    g.insert([delta(2, 1)])
    assert g.vertices() == [()]
    assert g.is_complete()


def test_layer_edge_between_siblings():
    g = DeltaGraph(ChoiceRegistry([1, 3, 3]))
    g.insert([delta(0, 1), delta(0, 2)])
    g.insert([delta(1, 1), delta(0, 2)])
    assert len(g) == 2
    edges = list(g.edges())
    assert len(edges) == 1
    a, b, label = edges[0]
    assert label == 1
    assert {a, b} == {
        (delta(0, 1), delta(0, 2)),
        (delta(1, 1), delta(0, 2)),
    }


def test_fuse_three_siblings_into_shorter():
    g = DeltaGraph(ChoiceRegistry([1, 3, 3]))
    for k in range(3):
        g.insert([delta(k, 1), delta(0, 2)])
    assert g.vertices() == [(delta(0, 2),)]


def test_fuse_no_candidates_is_stable():
    g = DeltaGraph(ChoiceRegistry([1, 3, 3]))
    g.insert([delta(0, 1)])
    g.insert([delta(1, 2)])
    before = g.vertices()
    g.fuse()
    assert g.vertices() == before


def test_cascading_fusion_over_nine_vertices():
    reg = ChoiceRegistry([3, 3])
    g = DeltaGraph(reg)
    raw = []
    for a in range(3):
        for b in range(3):
            ds = (delta(a, 0), delta(b, 1))
            raw.append(ds)
            g.insert(ds)
    assert g.is_complete()
    for al in reg.assignments():
        assert g.covered(al) == covered_by_raw(raw, al) is True


def test_cardinality_one_domain_fuses_immediately():
    g = DeltaGraph(ChoiceRegistry([1, 3]))
    g.insert([delta(0, 0), delta(1, 1)])
    assert g.vertices() == [(delta(1, 1),)]


def test_is_complete_cases():
    empty = DeltaGraph(ChoiceRegistry([3]))
    assert not empty.is_complete()
    g = DeltaGraph(ChoiceRegistry([3]))
    g.insert([])
    assert g.is_complete()
    assert g.vertices() == [()]
    h = DeltaGraph(ChoiceRegistry([3, 3]))
    h.insert([delta(1, 1)])
    assert not h.is_complete()
    for al in h.registry.assignments():
        assert h.covered(al) == (al[1] == 1)


def test_empty_vertex_is_sole_content():
    g = DeltaGraph(ChoiceRegistry([3]))
    g.insert([delta(0, 0)])
    g.insert([])
    assert g.vertices() == [()]
    g.insert([delta(1, 0)])
    assert g.vertices() == [()]


def test_covered_cases():
    reg = ChoiceRegistry([3, 3])
    g = DeltaGraph(reg)
    for al in reg.assignments():
        assert not g.covered(al)
    g.insert([delta(1, 0)])
    assert g.covered((1, 0))
    assert not g.covered((0, 2))
    h = DeltaGraph(ChoiceRegistry([3, 3]))
    h.insert([delta(1, 0), delta(2, 1)])
    assert not h.covered((0, 2))
    assert h.covered((1, 2))


def test_covered_validates_assignment():
    g = DeltaGraph(ChoiceRegistry([3]))
    with pytest.raises(ValueError):
        g.covered((0, 1))


def test_insert_rejects_out_of_domain():
    g = DeltaGraph(ChoiceRegistry([2]))
    with pytest.raises(ValueError):
        g.insert([delta(2, 0)])


def test_dominated_insert_is_noop():
    g = DeltaGraph(ChoiceRegistry([3, 3]))
    g.insert([delta(0, 0)])
    g.insert([delta(0, 0), delta(1, 1)])
    assert g.vertices() == [(delta(0, 0),)]


def _random_inserts(rng, reg, count):
    raws = []
    for _ in range(count):
        idx = rng.sample(range(len(reg)), rng.randint(0, len(reg)))
        raws.append(tuple(sorted(
            (i, rng.randrange(reg.cardinality(i))) for i in idx
        )))
    return raws


def test_fusion_preserves_coverage_and_matches_oracle():
    rng = random.Random(37)
    for _ in range(300):
        reg = ChoiceRegistry([rng.choice((2, 3)) for _ in range(rng.randint(1, 3))])
        g = DeltaGraph(reg)
        raw = []
        for ds in _random_inserts(rng, reg, rng.randint(1, 7)):
            raw.append(ds)
            g.insert(ds)
            for al in reg.assignments():
                assert g.covered(al) == covered_by_raw(raw, al)
        assert g.is_complete() == all(g.covered(al) for al in reg.assignments())


def test_fan_absorbed_into_shorter_vertices_still_fuses():
    # the (2,0)(0,1) and (2,0)(2,1) fan members are absorbed by the
    # shorter index-1 vertices, yet the cover is complete and must fuse
    reg = ChoiceRegistry([3, 3])
    g = DeltaGraph(reg)
    g.insert([delta(0, 0)])
    g.insert([delta(1, 0)])
    g.insert([delta(0, 1)])
    g.insert([delta(2, 1)])
    assert not g.is_complete()
    g.insert([delta(2, 0), delta(1, 1)])
    assert g.vertices() == [()]
    assert g.is_complete()


def test_find_uncovered_matches_enumeration():
    rng = random.Random(53)
    for _ in range(200):
        reg = ChoiceRegistry([rng.choice((2, 3)) for _ in range(rng.randint(1, 3))])
        g = DeltaGraph(reg)
        for ds in _random_inserts(rng, reg, rng.randint(0, 6)):
            g.insert(ds)
        expected = next(
            (al for al in reg.assignments() if not g.covered(al)), None
        )
        assert g.find_uncovered() == expected
        assert g.is_complete() == (expected is None)


def test_insert_never_shrinks_coverage():
    rng = random.Random(41)
    for _ in range(100):
        reg = ChoiceRegistry([rng.choice((2, 3)) for _ in range(rng.randint(1, 3))])
        g = DeltaGraph(reg)
        prev: set = set()
        for ds in _random_inserts(rng, reg, 5):
            g.insert(ds)
            now = {al for al in reg.assignments() if g.covered(al)}
            assert prev <= now
            prev = now


def test_dump_format():
    g = DeltaGraph(ChoiceRegistry([3, 3]))
    g.insert([delta(0, 0), delta(1, 1)])
    out = g.dump()
    assert "layer=2 δ(0,0) δ(1,1)" in out
    assert out.endswith("complete: no")
    h = DeltaGraph(ChoiceRegistry([3]))
    h.insert([])
    assert h.dump().endswith("complete: yes")
