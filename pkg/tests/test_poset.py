import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph, order
from fraisse_forcing import Condition, DomainError, compatible, get_class, leq

GRAPHS = get_class("graph")
LINEAR = get_class("linear-order")


def g(*args):
    return Condition(graph(*args), GRAPHS)


def lo(*points):
    return Condition(order(*points), LINEAR)


def test_condition_requires_membership():
    with pytest.raises(DomainError):
        Condition(order(0, 1), GRAPHS)


def test_leq_examples():
    p = g({0, 1, 2}, [(0, 1), (1, 2)])
    assert leq(p, g({0, 1}, [(0, 1)]))
    assert not leq(g({0, 1, 2}), g({0, 1}, [(0, 1)]))
    assert leq(p, p)


def test_leq_class_mismatch():
    with pytest.raises(DomainError):
        leq(g({0}), lo(0))


def test_compatible_examples():
    assert compatible(lo(0, 1), lo(1, 0)) is None
    r = compatible(g({0, 1}, [(0, 1)]), g({1, 2}, [(1, 2)]))
    assert r.structure == graph({0, 1, 2}, [(0, 1), (1, 2)])
    assert compatible(lo(1, 2), lo(2, 4)).structure == order(1, 2, 4)


orders = st.lists(st.integers(0, 5), unique=True, max_size=4).map(lambda xs: lo(*xs))


@settings(max_examples=200, deadline=None)
@given(orders, orders)
def test_compatible_is_common_extension(p, q):
    r = compatible(p, q)
    assert (r is None) == (compatible(q, p) is None)
    if r is not None:
        assert leq(r, p) and leq(r, q)
        assert r.universe == p.universe | q.universe
    else:
        common = p.universe & q.universe
        assert any(
            ((a, b) in p.structure.relation("<")) != ((a, b) in q.structure.relation("<"))
            for a in common for b in common
        )
