import itertools

import pytest

from conftest import cached_build
from fraisse_forcing import BuildConfig, DomainError, GenericStructure, restrict, run
from fraisse_forcing.verify import (
    back_and_forth_equiv,
    check_chain,
    check_class_invariant,
    check_density_linear,
    check_embeddability,
    check_extension_property,
    check_ledger,
    check_partial_iso_extension,
)


def corrupted(M, final):
    return GenericStructure(M.config, M.klass, final, M.ledger)


def test_density_passes():
    r = check_density_linear(cached_build("linear-order", 500, 0, ("0mod2",)), 20)
    assert r.passed and r.examined > 0 and r.examined == r.satisfied


def test_density_vacuous():
    M = run(BuildConfig("linear-order", 2))
    r = check_density_linear(M, 2)
    assert r.passed and (r.examined, r.satisfied) == (0, 0)


def test_density_needs_linear_order():
    with pytest.raises(DomainError):
        check_density_linear(cached_build("graph", 50), 5)


def test_density_fault_injection():
    M = cached_build("linear-order", 500, 0, ("0mod2",))
    lt = M.final.relation("<")
    a, b = 0, 1
    if (a, b) not in lt:
        a, b = b, a
    between = {x for x in M.final.universe if (a, x) in lt and (x, b) in lt}
    r = check_density_linear(corrupted(M, restrict(M.final, M.final.universe - between)), 20)
    assert not r.passed
    assert r.witness["kind"] == "between"
    x, y = r.witness["pair"]
    broken = restrict(M.final, M.final.universe - between)
    assert not any((x, z) in broken.relation("<") and (z, y) in broken.relation("<") for z in broken.universe)


def test_chain_and_ledger_detect_tampering():
    M = cached_build("graph", 300)
    victim = next(e.witness for e in M.ledger if e.obligation.kind == "extend" and e.obligation.base)
    bad = corrupted(M, restrict(M.final, M.final.universe - {victim}))
    assert not check_chain(bad).passed
    assert not check_ledger(bad).passed


def test_class_invariant_on_empty_build():
    assert check_class_invariant(run(BuildConfig("tournament", 0))).passed


def test_linear_prefixes_are_strict_total_orders():
    M = cached_build("linear-order", 400)
    assert check_class_invariant(M).passed
    lt = M.final.relation("<")
    pts = M.final.sorted_universe()
    for m in range(0, 40):
        sub = [x for x in pts if x < m]
        for a in sub:
            assert (a, a) not in lt
        for a, b in itertools.combinations(sub, 2):
            assert ((a, b) in lt) != ((b, a) in lt)
        for a, b, c in itertools.permutations(sub, 3):
            if (a, b) in lt and (b, c) in lt:
                assert (a, c) in lt


def test_embeddability():
    assert check_embeddability(cached_build("graph", 2000), 3).examined == 8
    assert check_embeddability(cached_build("graph", 10), 0).passed
    r = check_embeddability(cached_build("triangle-free", 2000), 3)
    assert r.passed and r.examined == 7


@pytest.mark.parametrize("name,k", [("graph", 3), ("linear-order", 2), ("triangle-free", 3), ("tournament", 2)])
def test_extension_property(name, k):
    r = check_extension_property(cached_build(name, 2000), k, 10)
    assert r.passed, r.witness


@pytest.mark.parametrize("name", ["graph", "linear-order", "tournament"])
def test_partial_iso_extension(name):
    r = check_partial_iso_extension(cached_build(name, 2000), 2, 8)
    assert r.passed and r.examined > 0


def test_back_and_forth():
    g1, g2 = cached_build("graph", 2000, 1), cached_build("graph", 2000, 2)
    assert back_and_forth_equiv(g1, g2, 0, 12).passed
    assert back_and_forth_equiv(g1, g2, 3, 10).passed
    r = back_and_forth_equiv(g1, cached_build("triangle-free", 2000), 3, 12)
    assert not r.passed
    assert r.witness["line"][-1]["response"] is None


def test_back_and_forth_needs_same_language():
    with pytest.raises(DomainError):
        back_and_forth_equiv(cached_build("graph", 10), cached_build("linear-order", 10), 1, 4)


def test_chain_rejects_delta_not_through_new_point():
    M = run(BuildConfig("graph", 60))
    stage = [i for i, e in enumerate(M.ledger) if e.added][3]
    z, delta = M.deltas[stage]
    other = next(x for x in M.final.universe if x != z)
    forged = list(M.deltas)
    forged[stage] = (z, [delta[0] | {(other, other)}])
    r = check_chain(GenericStructure(M.config, M.klass, M.final, M.ledger, forged))
    assert not r.passed and r.witness["stage"] == stage


def test_class_invariant_detects_non_member():
    M = cached_build("tournament", 200)
    (a, b), = [next(iter(M.final.relation("E")))]
    final = M.final
    broken = type(final)(final.language, final.universe, (final.rels[0] | {(b, a)},))
    r = check_class_invariant(corrupted(M, broken))
    assert not r.passed
