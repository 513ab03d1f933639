"""Fraïssé classes given intensionally.

A class is a :class:`FraisseClass` subclass supplying a membership predicate,
a deterministic amalgamation strategy and an enumerator for small universes.
The module-level functions (:func:`contains`, :func:`amalgamate`, ...) wrap
those hooks with the pre/postcondition checks every caller relies on.

Writing a plugin class
----------------------
Subclass :class:`FraisseClass`, set ``name`` and ``language`` and implement
:meth:`~FraisseClass.member`.  Everything else has a brute-force default:

* ``amalgamation(root, p, q)``: return an amalgam or ``None``; ``None`` (or an
  invalid answer) falls back to an exhaustive search over cross tuples.
* ``structures_on(universe)``: all members on exactly that universe.
* ``extension_patterns(base)``: the one-point extension types of a member.
* ``complete_point`` / ``accepts_point``: fast paths used by the builder on
  large conditions.  The defaults materialize the condition and go through
  :func:`amalgamate` / :func:`contains`.

Register the instance with :func:`register` to make it visible to the CLI.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .structures import (
    NEW,
    DomainError,
    Language,
    Pattern,
    Structure,
    extension_structure,
    instantiate,
    relabel,
    restrict,
    validate,
)


class ClassError(RuntimeError):
    """A class failed to amalgamate; the class is not a Fraïssé class."""


class IncompatibleError(ValueError):
    """The two structures disagree on their common part."""


class FraisseClass:
    name: str = ""
    language: Language = Language(())
    #: largest n for which ``enumerate_members(k, n)`` is supported
    enumeration_bound: int = 5
    #: extension obligations over bases larger than this are redundant
    max_extension_size: int | None = None

    def member(self, s: Structure) -> bool:
        """Class predicate; ``s`` is already known to be well formed."""
        raise NotImplementedError

    def amalgamation(self, root: Structure, p: Structure, q: Structure) -> Structure | None:
        return None

    def structures_on(self, universe: Iterable[int]) -> Iterator[Structure]:
        pts = sorted(universe)
        slots = [list(itertools.product(pts, repeat=a)) for _, a in self.language.relations]
        choices = [list(_powerset(s)) for s in slots]
        for combo in itertools.product(*choices):
            s = Structure(self.language, frozenset(pts), tuple(frozenset(c) for c in combo))
            if self.member(s):
                yield s

    def extension_patterns(self, base: Structure) -> list[Pattern]:
        z = max(base.universe, default=-1) + 1
        pts = base.sorted_universe() + [z]
        slots = [
            [t for t in itertools.product(pts, repeat=a) if z in t]
            for _, a in self.language.relations
        ]
        out = []
        for combo in itertools.product(*[list(_powerset(s)) for s in slots]):
            rels = tuple(rel | frozenset(c) for rel, c in zip(base.rels, combo))
            ext = Structure(self.language, base.universe | {z}, rels)
            if self.member(ext):
                out.append(tuple(
                    tuple(sorted(tuple(NEW if x == z else x for x in t) for t in c))
                    for c in combo
                ))
        return out

    def complete_point(self, view, base, pattern: Pattern, z: int) -> list[set]:
        """Tuples through ``z`` when ``z`` realizes ``pattern`` over ``base``.

        Cross tuples between ``z`` and points outside ``base`` follow the
        class's amalgamation strategy.
        """
        p = view.freeze()
        root = restrict(p, base)
        r = amalgamate(self, root, p, extension_structure(root, pattern, z))
        return [set(r.incident(z, n)) for n in self.language.names]

    def accepts_point(self, view, z: int) -> bool:
        """Membership of ``view``, given that ``view`` minus ``z`` is a member."""
        return contains(self, view.freeze())

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


def _powerset(items):
    items = list(items)
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))


# -- module-level operations ------------------------------------------------


def contains(k: FraisseClass, p: Structure) -> bool:
    if p.language != k.language or validate(p):
        return False
    return bool(k.member(p))


def _is_amalgam(k, r, p, q) -> bool:
    return (
        r is not None
        and r.language == k.language
        and r.universe == p.universe | q.universe
        and restrict(r, p.universe) == p
        and restrict(r, q.universe) == q
        and contains(k, r)
    )


def _lazy_product(slot_lists, i=0):
    # itertools.product would materialize every powerset up front
    if i == len(slot_lists):
        yield ()
        return
    for first in _powerset(slot_lists[i]):
        for rest in _lazy_product(slot_lists, i + 1):
            yield (first,) + rest


def brute_force_amalgams(k: FraisseClass, p: Structure, q: Structure) -> Iterator[Structure]:
    """Every amalgam of ``p`` and ``q`` over their common part (exponential)."""
    universe = p.universe | q.universe
    p_only, q_only = p.universe - q.universe, q.universe - p.universe
    pts = sorted(universe)
    cross = [
        [
            t
            for t in itertools.product(pts, repeat=a)
            if any(x in p_only for x in t) and any(x in q_only for x in t)
        ]
        for _, a in k.language.relations
    ]
    for combo in _lazy_product(cross):
        rels = tuple(rp | rq | frozenset(c) for rp, rq, c in zip(p.rels, q.rels, combo))
        r = Structure(k.language, frozenset(universe), rels)
        if contains(k, r):
            yield r


def amalgamate(k: FraisseClass, root: Structure, p: Structure, q: Structure) -> Structure:
    """Amalgam of ``p`` and ``q`` over their literal common substructure ``root``."""
    if not (p.language == q.language == root.language == k.language):
        raise DomainError("amalgamate: language mismatch")
    common = p.universe & q.universe
    if root.universe != common:
        raise IncompatibleError(f"root universe {sorted(root.universe)} != intersection {sorted(common)}")
    if restrict(p, common) != root or restrict(q, common) != root:
        raise IncompatibleError("p and q disagree on their common part")
    if not contains(k, p) or not contains(k, q):
        raise DomainError(f"amalgamate: inputs must be members of {k.name}")
    r = k.amalgamation(root, p, q)
    if _is_amalgam(k, r, p, q):
        return r
    r = next(brute_force_amalgams(k, p, q), None)
    if r is None:
        raise ClassError(f"{k.name}: no amalgam of {p!r} and {q!r} over {root!r}")
    return r


def fresh_relabelling(p: Structure, q: Structure) -> dict[int, int]:
    """Send the points of ``q`` (ascending) to the least naturals outside ``p``."""
    fresh = (n for n in itertools.count() if n not in p.universe)
    return {x: next(fresh) for x in q.sorted_universe()}


def joint_embed(k: FraisseClass, p: Structure, q: Structure) -> Structure:
    q2 = relabel(q, fresh_relabelling(p, q))
    return amalgamate(k, Structure.empty(k.language), p, q2)


def enumerate_members(k: FraisseClass, n: int) -> Iterator[Structure]:
    """Members with universe inside ``{0..n-1}`` in canonical order."""
    if n > k.enumeration_bound:
        raise DomainError(f"{k.name}: enumeration bound is {k.enumeration_bound}, asked for {n}")
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            yield from sorted(k.structures_on(subset), key=Structure.canonical_key)


def extension_patterns(k: FraisseClass, base: Structure) -> list[Pattern]:
    """One-point extension types of a member, in canonical (sorted) order."""
    return sorted(set(k.extension_patterns(base)))


@dataclass
class AxiomResult:
    axiom: str
    passed: bool = True
    checked: int = 0
    counterexample: dict | None = None

    def fail(self, **witness):
        if self.passed:
            self.passed = False
            self.counterexample = {key: _show(v) for key, v in witness.items()}


def _show(v):
    return v.to_json() if isinstance(v, Structure) else v


@dataclass
class AxiomReport:
    class_name: str
    n: int
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, axiom: str) -> AxiomResult:
        return next(r for r in self.results if r.axiom == axiom)

    def to_json(self) -> dict:
        return {
            "check": "class-axioms",
            "class": self.class_name,
            "n": self.n,
            "outcome": "pass" if self.passed else "fail",
            "axioms": [
                {"axiom": r.axiom, "outcome": "pass" if r.passed else "fail",
                 "checked": r.checked, "counterexample": r.counterexample}
                for r in self.results
            ],
        }


def verify_class_axioms(k: FraisseClass, n: int) -> AxiomReport:
    """Brute-force HP, JEP and AP over every member on a subset of ``{0..n-1}``."""
    members = list(enumerate_members(k, n))
    hp, jep, ap = AxiomResult("HP"), AxiomResult("JEP"), AxiomResult("AP")

    for p in members:
        pts = p.sorted_universe()
        for size in range(len(pts)):
            for sub in itertools.combinations(pts, size):
                hp.checked += 1
                if not contains(k, restrict(p, sub)):
                    hp.fail(member=p, subset=list(sub))

    for p, q in itertools.product(members, repeat=2):
        jep.checked += 1
        f = fresh_relabelling(p, q)
        q2 = relabel(q, f)
        try:
            r = amalgamate(k, Structure.empty(k.language), p, q2)
        except ClassError:
            jep.fail(p=p, q=q)
        else:
            if not (contains(k, r) and restrict(r, p.universe) == p and restrict(r, q2.universe) == q2):
                jep.fail(p=p, q=q, result=r)

        common = p.universe & q.universe
        root = restrict(p, common)
        if restrict(q, common) != root:
            continue
        ap.checked += 1
        try:
            r = amalgamate(k, root, p, q)
        except ClassError:
            ap.fail(root=root, p=p, q=q)
            continue
        if not _is_amalgam(k, r, p, q):
            ap.fail(root=root, p=p, q=q, result=r)

    return AxiomReport(k.name, n, [hp, jep, ap])


# -- built-in classes -------------------------------------------------------


class PureSets(FraisseClass):
    name = "pure-set"
    language = Language(())
    enumeration_bound = 8
    max_extension_size = 1

    def member(self, s):
        return True

    def amalgamation(self, root, p, q):
        return Structure(self.language, p.universe | q.universe, ())

    def structures_on(self, universe):
        yield Structure(self.language, frozenset(universe), ())

    def extension_patterns(self, base):
        return [()]

    def complete_point(self, view, base, pattern, z):
        return []

    def accepts_point(self, view, z):
        return True


def _order(s: Structure, name: str = "<") -> list[int]:
    """Points of a strict linear order listed from least to greatest."""
    below = Counter(t[1] for t in s.relation(name))
    return sorted(s.universe, key=lambda x: below[x])


def _order_tuples(seq: list[int]) -> set:
    return {(a, b) for i, a in enumerate(seq) for b in seq[i + 1:]}


def _merge_by_label(left: list[int], right: list[int]) -> list[int]:
    out, i, j = [], 0, 0
    while i < len(left) and j < len(right):
        if left[i] < right[j]:
            out.append(left[i])
            i += 1
        else:
            out.append(right[j])
            j += 1
    return out + left[i:] + right[j:]


def _gaps(order: list[int], root: frozenset) -> list[list[int]]:
    """Split the non-root points of an order into the intervals cut out by the root."""
    gaps: list[list[int]] = [[]]
    for x in order:
        if x in root:
            gaps.append([])
        else:
            gaps[-1].append(x)
    return gaps


class LinearOrders(FraisseClass):
    """Finite strict linear orders, encoded by the single binary symbol ``<``.

    Amalgamation keeps the common points fixed; inside each interval between
    consecutive common points the p-only and q-only runs are merged by label
    (each run keeps its own order).
    """

    name = "linear-order"
    language = Language((("<", 2),))
    enumeration_bound = 6
    max_extension_size = 2

    def member(self, s):
        rel = s.relation("<")
        n = len(s.universe)
        if len(rel) != n * (n - 1) // 2:
            return False
        for a, b in rel:
            if a == b or (b, a) in rel:
                return False
        # a tournament is transitive iff its out-degrees are pairwise distinct
        outdeg = Counter(a for a, _ in rel)
        return len({outdeg[x] for x in s.universe}) == n

    def amalgamation(self, root, p, q):
        common = root.universe
        root_order = _order(root)
        p_gaps, q_gaps = _gaps(_order(p), common), _gaps(_order(q), common)
        seq: list[int] = []
        for i, (pg, qg) in enumerate(zip(p_gaps, q_gaps)):
            seq.extend(_merge_by_label(pg, qg))
            if i < len(root_order):
                seq.append(root_order[i])
        return Structure(self.language, p.universe | q.universe, (frozenset(_order_tuples(seq)),))

    def structures_on(self, universe):
        for perm in itertools.permutations(sorted(universe)):
            yield Structure(self.language, frozenset(universe), (frozenset(_order_tuples(list(perm))),))

    def extension_patterns(self, base):
        order = _order(base)
        return [
            (tuple(sorted([(a, NEW) for a in order[:i]] + [(NEW, b) for b in order[i:]])),)
            for i in range(len(order) + 1)
        ]

    @staticmethod
    def _down(view, x):
        return {t[0] for t in view.incident(x, "<") if t[1] == x}

    def complete_point(self, view, base, pattern, z):
        base_set = set(base)
        lower = [a for a, b in pattern[0] if b == NEW]
        upper = [b for a, b in pattern[0] if a == NEW]
        rank = lambda x: view.position_count(x, "<", 1)  # noqa: E731
        lo = max(lower, key=rank) if lower else None
        hi = min(upper, key=rank) if upper else None
        if lo is None:
            gap = set(view.universe) if hi is None else self._down(view, hi)
        else:
            up_lo = {t[1] for t in view.incident(lo, "<") if t[0] == lo}
            gap = up_lo if hi is None else up_lo & self._down(view, hi)
        gap -= base_set
        gap.discard(z)
        larger = [g for g in gap if g > z]
        if larger:
            stop = min(larger, key=rank)
        else:
            stop = hi
        below = set(view.universe) if stop is None else self._down(view, stop)
        below.discard(z)
        others = set(view.universe) - below - {z}
        return [{(u, z) for u in below} | {(z, u) for u in others}]

    def accepts_point(self, view, z):
        n = len(view.universe)
        tuples = view.incident(z, "<")
        if (z, z) in tuples or len(tuples) != n - 1:
            return False
        below = {t[0] for t in tuples if t[1] == z}
        above = {t[1] for t in tuples if t[0] == z}
        if below & above or len(below) + len(above) != n - 1:
            return False
        if not below:
            return True
        # below(z) must be an initial segment: it is the down-set of its top point
        top = max(below, key=lambda x: view.position_count(x, "<", 1))
        return self._down(view, top) | {top} == below


class Graphs(FraisseClass):
    """Finite simple graphs: ``E`` symmetric and irreflexive; free amalgamation."""

    name = "graph"
    language = Language((("E", 2),))
    enumeration_bound = 5

    def member(self, s):
        rel = s.relation("E")
        return all(a != b and (b, a) in rel for a, b in rel)

    def amalgamation(self, root, p, q):
        return Structure(self.language, p.universe | q.universe, (p.relation("E") | q.relation("E"),))

    def structures_on(self, universe):
        pts = sorted(universe)
        pairs = list(itertools.combinations(pts, 2))
        for chosen in _powerset(pairs):
            edges = {(a, b) for a, b in chosen} | {(b, a) for a, b in chosen}
            s = Structure(self.language, frozenset(pts), (frozenset(edges),))
            if self.member(s):
                yield s

    def _allowed_neighbourhoods(self, base):
        return _powerset(base.sorted_universe())

    def extension_patterns(self, base):
        return [
            (tuple(sorted([(a, NEW) for a in nbrs] + [(NEW, a) for a in nbrs])),)
            for nbrs in self._allowed_neighbourhoods(base)
        ]

    def complete_point(self, view, base, pattern, z):
        return instantiate(pattern, z)

    def accepts_point(self, view, z):
        tuples = view.incident(z, "E")
        return all(a != b and view.has("E", (b, a)) for a, b in tuples)


class TriangleFreeGraphs(Graphs):
    name = "triangle-free"

    def member(self, s):
        if not super().member(s):
            return False
        adj: dict[int, set] = {}
        for a, b in s.relation("E"):
            adj.setdefault(a, set()).add(b)
        return not any(adj[a] & adj[b] for a, b in s.relation("E"))

    def structures_on(self, universe):
        return (s for s in super().structures_on(universe) if self.member(s))

    def _allowed_neighbourhoods(self, base):
        rel = base.relation("E")
        for nbrs in _powerset(base.sorted_universe()):
            if not any((a, b) in rel for a, b in itertools.combinations(nbrs, 2)):
                yield nbrs

    def accepts_point(self, view, z):
        if not super().accepts_point(view, z):
            return False
        nbrs = sorted({b for a, b in view.incident(z, "E") if a == z})
        return not any(view.has("E", (u, v)) for u, v in itertools.combinations(nbrs, 2))


class Tournaments(FraisseClass):
    """Finite tournaments; cross pairs of an amalgam point from smaller to larger label."""

    name = "tournament"
    language = Language((("E", 2),))
    enumeration_bound = 5

    def member(self, s):
        rel = s.relation("E")
        n = len(s.universe)
        if len(rel) != n * (n - 1) // 2:
            return False
        return all(a != b and (b, a) not in rel for a, b in rel)

    def amalgamation(self, root, p, q):
        p_only, q_only = p.universe - q.universe, q.universe - p.universe
        cross = {(min(a, b), max(a, b)) for a in p_only for b in q_only}
        return Structure(
            self.language, p.universe | q.universe, (p.relation("E") | q.relation("E") | cross,)
        )

    def structures_on(self, universe):
        pts = sorted(universe)
        pairs = list(itertools.combinations(pts, 2))
        for flips in itertools.product((False, True), repeat=len(pairs)):
            arcs = {(b, a) if f else (a, b) for (a, b), f in zip(pairs, flips)}
            yield Structure(self.language, frozenset(pts), (frozenset(arcs),))

    def extension_patterns(self, base):
        pts = base.sorted_universe()
        return [
            (tuple(sorted([(NEW, a) for a in out] + [(a, NEW) for a in pts if a not in out])),)
            for out in _powerset(pts)
        ]

    def complete_point(self, view, base, pattern, z):
        (arcs,) = instantiate(pattern, z)
        base_set = set(base)
        for v in view.universe:
            if v != z and v not in base_set:
                arcs.add((min(v, z), max(v, z)))
        return [arcs]

    def accepts_point(self, view, z):
        arcs = view.incident(z, "E")
        if len(arcs) != len(view.universe) - 1:
            return False
        return all(a != b and not view.has("E", (b, a)) for a, b in arcs)


# -- registry -----------------------------------------------------------------

_REGISTRY: dict[str, FraisseClass] = {}


def register(k: FraisseClass) -> FraisseClass:
    if not k.name:
        raise ValueError("a registered class needs a name")
    _REGISTRY[k.name] = k
    return k


def get_class(name: str) -> FraisseClass:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown class {name!r}; registered: {', '.join(_REGISTRY)}") from None


def registered_classes() -> dict[str, FraisseClass]:
    return dict(_REGISTRY)


for _k in (PureSets(), LinearOrders(), Graphs(), TriangleFreeGraphs(), Tournaments()):
    register(_k)
