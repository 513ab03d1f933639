import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRAPH, ORDER, graph, order
from fraisse_forcing import (
    DomainError,
    Language,
    Structure,
    find_embeddings,
    is_extension,
    is_isomorphic,
    restrict,
    validate,
)


def test_validate_ok():
    assert validate(Structure.build(GRAPH, {0, 1}, {"E": [(0, 1)]})) == []


def test_validate_reports_outside_entry():
    problems = validate(Structure.build(GRAPH, {0}, {"E": [(0, 1)]}))
    assert len(problems) == 1 and "1" in problems[0]


def test_validate_reports_arity():
    problems = validate(Structure.build(GRAPH, {0, 1, 2}, {"E": [(0, 1, 2)]}))
    assert any("arity" in p for p in problems)


def test_build_rejects_unknown_symbol():
    with pytest.raises(DomainError):
        Structure.build(GRAPH, {0}, {"R": []})


def test_restrict_path_endpoints():
    path = graph({0, 1, 2}, [(0, 1), (1, 2)])
    r = restrict(path, {0, 2})
    assert r.universe == {0, 2} and r.relation("E") == frozenset()
    assert restrict(path, path.universe) == path


def test_restrict_order():
    assert restrict(order(3, 7, 5), {3, 5}) == order(3, 5)


def test_restrict_outside_universe():
    with pytest.raises(DomainError):
        restrict(order(0, 1), {0, 2})


def test_is_extension_examples():
    assert is_extension(order(3, 7, 5), order(3, 5))
    assert not is_extension(graph({0, 1}, [(0, 1)]), graph({0, 1}))
    p = graph({0, 1, 2}, [(0, 1)])
    assert is_extension(p, p)


def test_embeddings_of_a_vertex_in_order():
    embs = find_embeddings(graph({0}), graph({0, 1, 2}))
    assert [e(0) for e in embs] == [0, 1, 2]


def test_edge_into_triangle():
    tri = graph({0, 1, 2}, [(0, 1), (1, 2), (0, 2)])
    embs = find_embeddings(graph({0, 1}, [(0, 1)]), tri)
    assert len(embs) == 6 and all(e.is_valid() for e in embs)


def test_triangle_into_triangle_free():
    tri = graph({0, 1, 2}, [(0, 1), (1, 2), (0, 2)])
    c5 = graph(range(5), [(i, (i + 1) % 5) for i in range(5)])
    assert find_embeddings(tri, c5) == []


def test_isomorphism_of_orders():
    f = is_isomorphic(order(0, 1), order(9, 5))
    assert f.as_dict() == {0: 9, 1: 5}
    assert is_isomorphic(graph({0, 1}, [(0, 1)]), graph({0, 1})) is None


def test_identity_first():
    s = graph({0, 1, 2}, [(0, 1)])
    assert find_embeddings(s, s)[0].as_dict() == {0: 0, 1: 1, 2: 2}


def test_json_round_trip_and_errors():
    s = order(4, 1, 3)
    assert Structure.from_json(json.loads(s.dumps())) == s
    with pytest.raises(ValueError):
        Structure.from_json({"universe": [0]})


def test_empty_language():
    empty = Language(())
    s = Structure.build(empty, {0, 2})
    assert validate(s) == [] and Structure.from_json(s.to_json()) == s


# -- properties against a naive oracle ---------------------------------------


@st.composite
def small_graphs(draw, max_size=5):
    universe = sorted(draw(st.sets(st.integers(0, 6), max_size=max_size)))
    pairs = list(itertools.combinations(universe, 2))
    edges = [pr for pr in pairs if draw(st.booleans())]
    return graph(universe, edges)


@st.composite
def small_digraphs(draw, max_size=4):
    universe = sorted(draw(st.sets(st.integers(0, 5), max_size=max_size)))
    pairs = [p for p in itertools.product(universe, repeat=2) if draw(st.booleans())]
    return Structure.build(GRAPH, universe, {"E": pairs})


def naive_embeddings(a, b):
    """All injective maps checked tuple by tuple."""
    dom = a.sorted_universe()
    out = []
    for image in itertools.permutations(b.sorted_universe(), len(dom)):
        f = dict(zip(dom, image))
        if all(((x, y) in a.relation("E")) == ((f[x], f[y]) in b.relation("E"))
               for x in dom for y in dom):
            out.append(tuple(sorted(f.items())))
    return out


@settings(max_examples=150, deadline=None)
@given(small_digraphs(max_size=3), small_digraphs(max_size=5))
def test_find_embeddings_matches_oracle(a, b):
    got = [e.mapping for e in find_embeddings(a, b)]
    assert sorted(got) == sorted(naive_embeddings(a, b))
    assert len(set(got)) == len(got)


@settings(max_examples=100, deadline=None)
@given(small_graphs(), st.data())
def test_restrict_transitive(s, data):
    b = data.draw(st.sets(st.sampled_from(s.sorted_universe())) if s.universe else st.just(set()))
    a = data.draw(st.sets(st.sampled_from(sorted(b))) if b else st.just(set()))
    assert restrict(restrict(s, b), a) == restrict(s, a)
    assert is_extension(s, restrict(s, b))


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_size=4), small_graphs(max_size=4), small_graphs(max_size=4))
def test_is_extension_partial_order(p, q, r):
    assert is_extension(p, p)
    if is_extension(p, q) and is_extension(q, p):
        assert p == q
    if is_extension(p, q) and is_extension(q, r):
        assert is_extension(p, r)


@settings(max_examples=100, deadline=None)
@given(small_digraphs())
def test_serialization_round_trip(s):
    assert Structure.from_json(json.loads(s.dumps())) == s
    assert s.dumps() == Structure.from_json(json.loads(s.dumps())).dumps()
