"""Finite relational structures over subsets of the naturals.

A :class:`Structure` stores every relation as an explicit set of tuples, so
the same code handles any finite relational language.  Structures are
immutable; equality is extensional (same language, universe and tuple sets).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence


class DomainError(ValueError):
    """An operation was called outside its domain (bad subset, language mismatch)."""


@dataclass(frozen=True)
class Language:
    """A finite relational signature: ordered ``(name, arity)`` pairs."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        rels = tuple((str(n), int(a)) for n, a in self.relations)
        object.__setattr__(self, "relations", rels)
        names = [n for n, _ in rels]
        if any(not n for n in names):
            raise ValueError("relation symbol names must be nonempty")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate relation symbols in {names}")
        for n, a in rels:
            if a < 1:
                raise ValueError(f"arity of {n!r} must be positive, got {a}")

    @classmethod
    def of(cls, **arities: int) -> "Language":
        return cls(tuple(arities.items()))

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, (n, _) in enumerate(self.relations)}

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise KeyError(name)

    def to_json(self) -> list:
        return [{"name": n, "arity": a} for n, a in self.relations]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> "Language":
        return cls(tuple((d["name"], d["arity"]) for d in data))

    def __str__(self):
        return "{" + ", ".join(f"{n}/{a}" for n, a in self.relations) + "}"


@dataclass(frozen=True)
class Structure:
    """A finite structure: a universe of naturals and one tuple set per symbol.

    Construction does not check the invariants (so that :func:`validate` can
    report on malformed input); use :meth:`build` for the usual path.
    """

    language: Language
    universe: frozenset
    rels: tuple  # one frozenset of tuples per symbol, in language order

    @classmethod
    def build(
        cls,
        language: Language,
        universe: Iterable[int],
        relations: Mapping[str, Iterable[Sequence[int]]] | None = None,
    ) -> "Structure":
        relations = dict(relations or {})
        unknown = set(relations) - set(language.names)
        if unknown:
            raise DomainError(f"symbols {sorted(unknown)} not in language {language}")
        rels = tuple(
            frozenset(tuple(int(x) for x in t) for t in relations.get(n, ()))
            for n in language.names
        )
        return cls(language, frozenset(int(x) for x in universe), rels)

    @classmethod
    def empty(cls, language: Language) -> "Structure":
        return cls(language, frozenset(), tuple(frozenset() for _ in language.relations))

    def relation(self, name: str) -> frozenset:
        return self.rels[self.language.index[name]]

    @property
    def relations(self) -> dict[str, frozenset]:
        return dict(zip(self.language.names, self.rels))

    def __len__(self):
        return len(self.universe)

    def sorted_universe(self) -> list[int]:
        return sorted(self.universe)

    # -- point-local access, shared with the builder's working structure --

    def has(self, name: str, t: tuple) -> bool:
        return t in self.rels[self.language.index[name]]

    @cached_property
    def _incidence(self) -> dict[int, tuple[set, ...]]:
        index: dict[int, tuple[set, ...]] = {}
        width = len(self.rels)
        for i, rel in enumerate(self.rels):
            for t in rel:
                for x in set(t):
                    if x not in index:
                        index[x] = tuple(set() for _ in range(width))
                    index[x][i].add(t)
        return index

    def incident(self, point: int, name: str) -> set:
        """Tuples of ``name`` that mention ``point``."""
        entry = self._incidence.get(point)
        if entry is None:
            return set()
        return entry[self.language.index[name]]

    def degree(self, point: int) -> int:
        entry = self._incidence.get(point)
        return sum(len(s) for s in entry) if entry else 0

    @cached_property
    def _neighbours(self) -> dict[int, frozenset]:
        return {}

    def neighbours(self, point: int) -> frozenset:
        """Points sharing at least one tuple with ``point``."""
        cache = self._neighbours
        if point not in cache:
            out: set = set()
            for s in self._incidence.get(point, ()):
                for t in s:
                    out.update(t)
            out.discard(point)
            cache[point] = frozenset(out)
        return cache[point]

    @cached_property
    def _position_counts(self) -> dict:
        counts: dict = {}
        for name, rel in zip(self.language.names, self.rels):
            for t in rel:
                for pos, x in enumerate(t):
                    key = (x, name, pos)
                    counts[key] = counts.get(key, 0) + 1
        return counts

    def position_count(self, point: int, name: str, pos: int) -> int:
        """Number of ``name`` tuples carrying ``point`` at coordinate ``pos``."""
        return self._position_counts.get((point, name, pos), 0)

    def freeze(self) -> "Structure":
        return self

    # -- canonical serialization --

    def to_json(self) -> dict:
        return {
            "language": self.language.to_json(),
            "universe": sorted(self.universe),
            "relations": {
                n: [list(t) for t in sorted(rel)]
                for n, rel in zip(self.language.names, self.rels)
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Structure":
        try:
            lang = Language.from_json(data["language"])
            rels = data.get("relations", {})
            return cls.build(lang, data["universe"], {n: [tuple(t) for t in ts] for n, ts in rels.items()})
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed structure document: {exc!r}") from exc

    def dumps(self) -> str:
        return canonical_dumps(self.to_json())

    def canonical_key(self) -> tuple:
        """Sort key: size first, then universe, then tuple lists per symbol."""
        return (
            len(self.universe),
            tuple(sorted(self.universe)),
            tuple(tuple(sorted(rel)) for rel in self.rels),
        )

    def __repr__(self):
        parts = ", ".join(f"{n}={sorted(rel)}" for n, rel in zip(self.language.names, self.rels))
        return f"Structure({sorted(self.universe)}{', ' + parts if parts else ''})"


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Embedding:
    """An induced embedding; ``mapping`` is a sorted tuple of ``(source, target)`` pairs."""

    source: Structure = field(repr=False)
    target: Structure = field(repr=False)
    mapping: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    def __call__(self, x: int) -> int:
        return self.as_dict()[x]

    def image(self) -> frozenset:
        return frozenset(v for _, v in self.mapping)

    def is_valid(self) -> bool:
        """Exhaustive check of injectivity and the induced-embedding condition."""
        f = self.as_dict()
        if set(f) != set(self.source.universe) or not set(f.values()) <= self.target.universe:
            return False
        if len(set(f.values())) != len(f):
            return False
        dom = sorted(f)
        for name, arity in self.source.language.relations:
            src, tgt = self.source.relation(name), self.target.relation(name)
            for t in itertools.product(dom, repeat=arity):
                if (t in src) != (tuple(f[x] for x in t) in tgt):
                    return False
        return True


def validate(s: Structure) -> list[str]:
    """Return the list of violated invariants; an empty list means ok."""
    problems = []
    for x in s.universe:
        if not isinstance(x, int) or x < 0:
            problems.append(f"universe element {x!r} is not a natural number")
    if len(s.rels) != len(s.language.relations):
        problems.append("relation map does not cover the language")
    for (name, arity), rel in zip(s.language.relations, s.rels):
        for t in sorted(rel):
            if len(t) != arity:
                problems.append(f"{name}: tuple {t} has length {len(t)}, arity is {arity}")
                continue
            outside = [x for x in t if x not in s.universe]
            if outside:
                problems.append(f"{name}: tuple {t} has entry {outside[0]} outside the universe")
    return problems


def _same_language(a: Structure, b: Structure):
    if a.language != b.language:
        raise DomainError(f"language mismatch: {a.language} vs {b.language}")


def restrict(p: Structure, subset: Iterable[int]) -> Structure:
    """Induced substructure of ``p`` on ``subset``."""
    sub = frozenset(subset)
    if not sub <= p.universe:
        raise DomainError(f"{sorted(sub - p.universe)} not in the universe")
    if sub == p.universe:
        return p
    if 3 * len(sub) < len(p.universe) and p.rels:
        # small subsets: walk the incidence index instead of every tuple
        rels = []
        for name in p.language.names:
            keep = set()
            for x in sub:
                keep.update(t for t in p.incident(x, name) if all(y in sub for y in t))
            rels.append(frozenset(keep))
        return Structure(p.language, sub, tuple(rels))
    rels = tuple(frozenset(t for t in rel if all(x in sub for x in t)) for rel in p.rels)
    return Structure(p.language, sub, rels)


def is_extension(p: Structure, q: Structure) -> bool:
    """Forcing order ``p <= q``: ``p`` has a bigger universe and induces ``q``."""
    _same_language(p, q)
    if not q.universe <= p.universe:
        return False
    return restrict(p, q.universe) == q


def relabel(s: Structure, mapping: Mapping[int, int]) -> Structure:
    """Image of ``s`` under an injective relabelling of its universe."""
    rels = tuple(frozenset(tuple(mapping[x] for x in t) for t in rel) for rel in s.rels)
    return Structure(s.language, frozenset(mapping[x] for x in s.universe), rels)


def _consistent(a: Structure, b: Structure, f: dict, v: int) -> bool:
    """Does the newly assigned ``v -> f[v]`` respect every tuple through ``v``?"""
    dom = list(f)
    for (name, arity), src, tgt in zip(a.language.relations, a.rels, b.rels):
        for t in itertools.product(dom, repeat=arity):
            if v not in t:
                continue
            if (t in src) != (tuple(f[x] for x in t) in tgt):
                return False
    return True


def iter_embeddings(a: Structure, b: Structure) -> Iterator[Embedding]:
    """Embeddings of ``a`` into ``b`` in canonical order (lexicographic on images)."""
    _same_language(a, b)
    src = a.sorted_universe()
    tgt = b.sorted_universe()
    f: dict[int, int] = {}
    used: set[int] = set()

    def extend(i):
        if i == len(src):
            yield Embedding(a, b, tuple(sorted(f.items())))
            return
        v = src[i]
        for w in tgt:
            if w in used:
                continue
            f[v] = w
            if _consistent(a, b, f, v):
                used.add(w)
                yield from extend(i + 1)
                used.discard(w)
            del f[v]

    if len(src) <= len(tgt):
        yield from extend(0)


def find_embeddings(a: Structure, b: Structure, limit: int | None = None) -> list[Embedding]:
    return list(itertools.islice(iter_embeddings(a, b), limit))


def is_isomorphic(a: Structure, b: Structure) -> Embedding | None:
    _same_language(a, b)
    if len(a.universe) != len(b.universe):
        return None
    return next(iter_embeddings(a, b), None)


# -- one-point extension types ------------------------------------------------
#
# A pattern records how a new point relates to a base set: for each symbol of
# the language, the sorted tuples over ``base + [NEW]`` that mention NEW.

NEW = -1

Pattern = tuple  # tuple (per symbol) of sorted tuples of ints, NEW marks the new point


def _slots(base: Sequence[int], arity: int, z: int) -> Iterator[tuple]:
    pts = list(base) + [z]
    for t in itertools.product(pts, repeat=arity):
        if z in t:
            yield t


def pattern_of(view, base: Sequence[int], z: int) -> Pattern:
    """The type of point ``z`` over ``base`` in a structure (or working view)."""
    out = []
    for name, arity in view.language.relations:
        out.append(
            tuple(sorted(
                tuple(NEW if x == z else x for x in t)
                for t in _slots(base, arity, z)
                if view.has(name, t)
            ))
        )
    return tuple(out)


def instantiate(pattern: Pattern, z: int) -> list[set]:
    return [{tuple(z if x == NEW else x for x in t) for t in ts} for ts in pattern]


def transport(pattern: Pattern, f: Mapping[int, int]) -> Pattern:
    """Rename the base points of a pattern along ``f``."""
    return tuple(
        tuple(sorted(tuple(x if x == NEW else f[x] for x in t) for t in ts))
        for ts in pattern
    )


def realizes(view, base: Sequence[int], pattern: Pattern, z: int) -> bool:
    if z in base:
        return False
    return pattern_of(view, base, z) == pattern


def extension_structure(base: Structure, pattern: Pattern, z: int) -> Structure:
    """The one-point extension of ``base`` by point ``z`` with the given type."""
    extra = instantiate(pattern, z)
    rels = tuple(rel | frozenset(e) for rel, e in zip(base.rels, extra))
    return Structure(base.language, base.universe | {z}, rels)


def iter_witnesses(view, base: Sequence[int], pattern: Pattern, exclude=()) -> Iterator[int]:
    """Points realizing ``pattern`` over ``base``, in ascending order.

    When the pattern ties the new point to some base point, only that
    point's neighbours are scanned (the least-connected such point is used).
    """
    base = list(base)
    skip = set(base) | set(exclude)
    anchors = {x for ts in pattern for t in ts for x in t if x != NEW}
    if anchors:
        anchor = min(anchors, key=lambda a: (view.degree(a), a))
        pool = sorted(view.neighbours(anchor))
    else:
        pool = view.sorted_universe()
    for z in pool:
        if z not in skip and pattern_of(view, base, z) == pattern:
            yield z


def first_witness(view, base: Sequence[int], pattern: Pattern, exclude=()) -> int | None:
    return next(iter_witnesses(view, base, pattern, exclude), None)


def pattern_to_json(pattern: Pattern, language: Language) -> dict:
    return {n: [list(t) for t in ts] for n, ts in zip(language.names, pattern)}


def pattern_from_json(data: Mapping, language: Language) -> Pattern:
    return tuple(tuple(sorted(tuple(t) for t in data.get(n, ()))) for n in language.names)
