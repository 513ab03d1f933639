"""Building a generic filter one obligation at a time.

Every pull of the schedule yields one obligation (a dense set to meet).  If
the current condition already lies in the dense set it is recorded as met
and the condition is unchanged; otherwise the condition is strengthened by
one point.  The chain of conditions, the ledger of met obligations and the
final condition together form a :class:`GenericStructure`.

Schedule (version ``dovetail-1``)
---------------------------------
Obligations come from streams:

``point``
    ``point(0), point(1), ...``
``ext-j`` (j >= 1)
    one-point extension types over every ``j``-element set of points, by
    region (the largest point of the set), then lexicographically, then by
    type.  ``ext-1`` starts with the empty base.  Streams with ``j >= 4``
    are active from pull ``8**j`` on, and never beyond the class's
    ``max_extension_size``.
``ground-g``
    extension types over sets of at most two points whose witness must lie
    in the g-th ground set.

Within an epoch (the pulls between two stream activations) the pulls cycle
through ``point`` twice, each ``ground-g``, then ``ext-j`` repeated ``2**j``
times.
A seed other than 0 shuffles each region block of a stream; nothing else
depends on it.  An extension stream whose next region mentions a point not
yet in the universe emits ``point(n)`` for the least such ``n`` instead.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .classes import ClassError, FraisseClass, extension_patterns, get_class
from .poset import Condition
from .structures import (
    Pattern,
    Structure,
    canonical_dumps,
    first_witness,
    iter_witnesses,
    pattern_from_json,
    pattern_to_json,
    realizes,
    restrict,
)

SCHEDULE_VERSION = "dovetail-1"
GROUND_BASE_SIZE = 2


@dataclass(frozen=True)
class GroundSet:
    """The residue class ``{x : x = a mod m}``."""

    a: int
    m: int

    def __post_init__(self):
        if self.m < 1 or self.a < 0:
            raise ValueError(f"ground set needs a >= 0 and m >= 1, got {self.a}mod{self.m}")

    def __contains__(self, x: int) -> bool:
        return x % self.m == self.a % self.m

    def least_unused(self, used) -> int:
        x = self.a % self.m
        while x in used:
            x += self.m
        return x

    @classmethod
    def parse(cls, text: str) -> "GroundSet":
        match = re.fullmatch(r"\s*(\d+)\s*mod\s*(\d+)\s*", text)
        if not match:
            raise ValueError(f"ground set must look like AmodM, got {text!r}")
        return cls(int(match.group(1)), int(match.group(2)))

    def __str__(self):
        return f"{self.a}mod{self.m}"

    def to_json(self) -> dict:
        return {"a": self.a, "m": self.m}


@dataclass(frozen=True)
class BuildConfig:
    class_name: str
    steps: int
    seed: int = 0
    ground_sets: tuple[GroundSet, ...] = ()
    schedule_version: str = SCHEDULE_VERSION

    def __post_init__(self):
        object.__setattr__(self, "ground_sets", tuple(self.ground_sets))
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit natural")
        if self.schedule_version != SCHEDULE_VERSION:
            raise ValueError(f"unsupported schedule version {self.schedule_version!r}")

    def to_json(self) -> dict:
        return {
            "class": self.class_name,
            "steps": self.steps,
            "seed": self.seed,
            "ground_sets": [g.to_json() for g in self.ground_sets],
            "schedule_version": self.schedule_version,
        }

    @classmethod
    def from_json(cls, data) -> "BuildConfig":
        return cls(
            data["class"],
            int(data["steps"]),
            int(data.get("seed", 0)),
            tuple(GroundSet(g["a"], g["m"]) for g in data.get("ground_sets", [])),
            data.get("schedule_version", SCHEDULE_VERSION),
        )


@dataclass(frozen=True)
class Obligation:
    """One dense set to meet.

    ``kind`` is ``point`` (the point must be in the universe), ``extend``
    (some point realizes ``pattern`` over ``base``) or ``ground`` (as
    ``extend``, with the witness inside ground set number ``ground``).
    """

    kind: str
    index: int
    stream: str
    point: int | None = None
    base: tuple[int, ...] = ()
    pattern: Pattern = ()
    ground: int | None = None

    def params_json(self, k: FraisseClass) -> dict:
        out: dict = {"kind": self.kind, "stream": self.stream}
        if self.kind == "point":
            out["point"] = self.point
        else:
            out["base"] = list(self.base)
            out["pattern"] = pattern_to_json(self.pattern, k.language)
        if self.kind == "ground":
            out["ground"] = self.ground
        return out


@dataclass(frozen=True)
class LedgerEntry:
    obligation: Obligation
    stage: int
    witness: int
    added: bool

    def to_json(self, k: FraisseClass) -> dict:
        out = self.obligation.params_json(k)
        out.update(stage=self.stage, witness=self.witness, added=self.added)
        return out

    @classmethod
    def from_json(cls, data, k: FraisseClass) -> "LedgerEntry":
        kind = data["kind"]
        ob = Obligation(
            kind,
            int(data["stage"]),
            data.get("stream", ""),
            point=data.get("point"),
            base=tuple(data.get("base", ())),
            pattern=pattern_from_json(data.get("pattern", {}), k.language) if kind != "point" else (),
            ground=data.get("ground"),
        )
        return cls(ob, int(data["stage"]), int(data["witness"]), bool(data["added"]))


class WorkingStructure:
    """Mutable structure with a point-incidence index; the builder's condition."""

    def __init__(self, language):
        self.language = language
        self.universe: set[int] = set()
        self._idx = {n: i for i, n in enumerate(language.names)}
        self._rels = [set() for _ in language.names]
        self._incidence: dict[int, list[set]] = {}
        self._pos: Counter = Counter()

    def has(self, name, t) -> bool:
        return t in self._rels[self._idx[name]]

    def incident(self, point, name) -> set:
        entry = self._incidence.get(point)
        return entry[self._idx[name]] if entry else set()

    def degree(self, point) -> int:
        entry = self._incidence.get(point)
        return sum(len(s) for s in entry) if entry else 0

    def neighbours(self, point) -> set:
        out: set = set()
        for s in self._incidence.get(point, ()):
            for t in s:
                out.update(t)
        out.discard(point)
        return out

    def position_count(self, point, name, pos) -> int:
        return self._pos[(point, name, pos)]

    def sorted_universe(self) -> list[int]:
        return sorted(self.universe)

    def add_point(self, z: int, tuples: Sequence[set]):
        self.universe.add(z)
        self._incidence.setdefault(z, [set() for _ in self._rels])
        for name, rel, new in zip(self.language.names, self._rels, tuples):
            i = self._idx[name]
            for t in new:
                rel.add(t)
                for pos, x in enumerate(t):
                    self._pos[(x, name, pos)] += 1
                for x in set(t):
                    self._incidence.setdefault(x, [set() for _ in self._rels])[i].add(t)

    def remove_point(self, z: int):
        entry = self._incidence.pop(z, None) or []
        for name, rel, ts in zip(self.language.names, self._rels, entry):
            i = self._idx[name]
            for t in ts:
                rel.discard(t)
                for pos, x in enumerate(t):
                    self._pos[(x, name, pos)] -= 1
                for x in set(t) - {z}:
                    self._incidence[x][i].discard(t)
        self.universe.discard(z)

    def substructure(self, points) -> Structure:
        pts = sorted(points)
        rels = []
        for (name, arity), rel in zip(self.language.relations, self._rels):
            rels.append(frozenset(t for t in itertools.product(pts, repeat=arity) if t in rel))
        return Structure(self.language, frozenset(pts), tuple(rels))

    def freeze(self) -> Structure:
        return Structure(self.language, frozenset(self.universe), tuple(frozenset(r) for r in self._rels))


# -- schedule -------------------------------------------------------------


def extension_sizes(k: FraisseClass, pull: int) -> list[int]:
    """Base sizes of the extension streams active at a pull index."""
    top = 3
    while pull >= 8 ** (top + 1):
        top += 1
    if k.max_extension_size is not None:
        top = min(top, k.max_extension_size)
    return list(range(1, max(top, 1) + 1))


def _epoch_start(k: FraisseClass, pull: int) -> int:
    sizes = extension_sizes(k, pull)
    j = sizes[-1]
    return 8**j if j >= 4 else 0


def cycle(k: FraisseClass, n_ground: int, pull: int) -> list[str]:
    slots = ["point", "point"] + [f"ground-{g}" for g in range(n_ground)]
    for j in extension_sizes(k, pull):
        slots += [f"ext-{j}"] * 2**j
    return slots


def stream_at(k: FraisseClass, n_ground: int, pull: int) -> str:
    slots = cycle(k, n_ground, pull)
    return slots[(pull - _epoch_start(k, pull)) % len(slots)]


def fairness_bound(k: FraisseClass, n_ground: int, steps: int) -> int:
    """Every ``point(n)`` with ``n`` below this value is met within ``steps`` pulls."""
    return sum(1 for t in range(steps) if stream_at(k, n_ground, t) == "point")


def stream_deadline(k: FraisseClass, n_ground: int, stream: str, item: int) -> int:
    """Pull index at which ``stream`` is asked for its ``item``-th obligation."""
    seen = -1
    for t in itertools.count():
        if stream_at(k, n_ground, t) == stream:
            seen += 1
            if seen == item:
                return t
    raise AssertionError("unreachable")


class _Stream:
    name = ""

    def __init__(self, builder: "Builder"):
        self.builder = builder
        self.queue: list = []
        self.region = -1

    def _rng_shuffle(self, block):
        seed = self.builder.config.seed
        if seed:
            random.Random(f"{seed}:{self.name}:{self.region}").shuffle(block)
        return block

    def _missing(self, upto: int) -> int | None:
        universe = self.builder.view.universe
        return next((n for n in range(upto + 1) if n not in universe), None)

    def bases(self, region: int) -> list[tuple[int, ...]]:
        raise NotImplementedError

    def make(self, base, pattern, pull) -> Obligation:
        raise NotImplementedError

    def next(self, pull: int) -> Obligation:
        while not self.queue:
            region = self.region
            if region >= 0:
                missing = self._missing(region)
                if missing is not None:
                    return Obligation("point", pull, self.name, point=missing)
            block = []
            for base in self.bases(region):
                sub = self.builder.view.substructure(base)
                block += [(base, pat) for pat in extension_patterns(self.builder.klass, sub)]
            self.queue = self._rng_shuffle(block)
            self.queue.reverse()
            self.region += 1
        base, pattern = self.queue.pop()
        return self.make(base, pattern, pull)


class _ExtensionStream(_Stream):
    def __init__(self, builder, size):
        super().__init__(builder)
        self.size = size
        self.name = f"ext-{size}"
        self.region = -1 if size == 1 else size - 1

    def bases(self, region):
        if region < 0:
            return [()]
        return [rest + (region,) for rest in itertools.combinations(range(region), self.size - 1)]

    def make(self, base, pattern, pull):
        return Obligation("extend", pull, self.name, base=base, pattern=pattern)


class _GroundStream(_Stream):
    def __init__(self, builder, g):
        super().__init__(builder)
        self.g = g
        self.name = f"ground-{g}"
        self.top = min(GROUND_BASE_SIZE, builder.klass.max_extension_size or GROUND_BASE_SIZE)

    def bases(self, region):
        if region < 0:
            return [()]
        return [
            rest + (region,)
            for size in range(1, self.top + 1)
            for rest in itertools.combinations(range(region), size - 1)
        ]

    def make(self, base, pattern, pull):
        return Obligation("ground", pull, self.name, base=base, pattern=pattern, ground=self.g)


# -- the build ------------------------------------------------------------


@dataclass
class GenericStructure:
    """A finished build: final condition, ledger and (for fresh builds) per-stage deltas."""

    config: BuildConfig
    klass: FraisseClass
    final: Structure
    ledger: list[LedgerEntry]
    #: tuples added at each stage (``None`` when nothing was added); absent for parsed builds
    deltas: list | None = field(default=None, repr=False)

    @property
    def steps(self) -> int:
        return len(self.ledger)

    def added_points(self) -> list[int | None]:
        return [e.witness if e.added else None for e in self.ledger]

    def chain_universes(self) -> Iterator[frozenset]:
        current: set[int] = set()
        yield frozenset()
        for z in self.added_points():
            if z is not None:
                current.add(z)
            yield frozenset(current)

    def condition_at(self, i: int) -> Condition:
        """The ``i``-th condition of the chain (``0`` is the empty condition)."""
        universe = set()
        for z in self.added_points()[:i]:
            if z is not None:
                universe.add(z)
        return Condition(restrict(self.final, universe), self.klass)

    def conditions(self) -> Iterator[Condition]:
        for universe in self.chain_universes():
            yield Condition(restrict(self.final, universe), self.klass)

    @property
    def final_condition(self) -> Condition:
        return Condition(self.final, self.klass)

    def fairness_bound(self) -> int:
        return fairness_bound(self.klass, len(self.config.ground_sets), self.steps)

    def prefix(self, m: int) -> Structure:
        return prefix(self, m)

    def summary(self) -> dict:
        kinds = Counter(e.obligation.kind for e in self.ledger)
        return {
            "universe_size": len(self.final.universe),
            "obligations_met": len(self.ledger),
            "points_added": sum(e.added for e in self.ledger),
            "met_by_kind": dict(sorted(kinds.items())),
            "fairness_bound": self.fairness_bound(),
        }

    def to_json(self) -> dict:
        return {
            "schedule_version": self.config.schedule_version,
            "class": self.klass.name,
            "config": self.config.to_json(),
            "structure": self.final.to_json(),
            "ledger": [e.to_json(self.klass) for e in self.ledger],
            "summary": self.summary(),
        }

    def dumps(self) -> str:
        return canonical_dumps(self.to_json()) + "\n"

    @classmethod
    def from_json(cls, data) -> "GenericStructure":
        try:
            config = BuildConfig.from_json(data["config"])
            klass = get_class(data["class"])
            final = Structure.from_json(data["structure"])
            ledger = [LedgerEntry.from_json(e, klass) for e in data["ledger"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed build document: {exc}") from exc
        if final.language != klass.language:
            raise ValueError("build structure does not match the class language")
        return cls(config, klass, final, ledger)


def prefix(M: GenericStructure, m: int) -> Structure:
    """The final condition restricted to the points below ``m``."""
    return restrict(M.final, {x for x in M.final.universe if x < m})


class Builder:
    """Incremental state of a build; :func:`run` drives it for ``steps`` pulls."""

    def __init__(self, config: BuildConfig, klass: FraisseClass | None = None):
        self.config = config
        self.klass = klass or get_class(config.class_name)
        self.view = WorkingStructure(self.klass.language)
        self.ledger: list[LedgerEntry] = []
        self.deltas: list = []
        self.pull = 0
        self.streams: dict[str, _Stream] = {
            f"ground-{g}": _GroundStream(self, g) for g in range(len(config.ground_sets))
        }
        self._next_point = 0

    @property
    def stage(self) -> int:
        return self.pull

    def _stream(self, name) -> _Stream:
        if name not in self.streams:
            self.streams[name] = _ExtensionStream(self, int(name.split("-")[1]))
        return self.streams[name]

    def next_obligation(self) -> Obligation:
        name = stream_at(self.klass, len(self.config.ground_sets), self.pull)
        if name == "point":
            ob = Obligation("point", self.pull, "point", point=self._next_point)
            self._next_point += 1
            return ob
        return self._stream(name).next(self.pull)

    def _fresh(self) -> int:
        return next(n for n in itertools.count() if n not in self.view.universe)

    def _add(self, base, pattern, z) -> list[set]:
        k, view = self.klass, self.view
        tuples = k.complete_point(view, base, pattern, z)
        if not self._try(base, pattern, z, tuples):
            tuples = FraisseClass.complete_point(k, view, base, pattern, z)
            if not self._try(base, pattern, z, tuples):
                raise ClassError(f"{k.name}: could not realize {pattern} over {base}")
        return tuples

    def _try(self, base, pattern, z, tuples) -> bool:
        if any(z not in t for ts in tuples for t in ts):
            return False
        if any(x not in self.view.universe and x != z for ts in tuples for t in ts for x in t):
            return False
        self.view.add_point(z, tuples)
        if realizes(self.view, base, pattern, z) and self.klass.accepts_point(self.view, z):
            return True
        self.view.remove_point(z)
        return False

    def meet(self, ob: Obligation) -> LedgerEntry:
        view = self.view
        if ob.kind == "point":
            if ob.point in view.universe:
                return self._record(ob, ob.point, None)
            pattern = extension_patterns(self.klass, Structure.empty(self.klass.language))[0]
            return self._record(ob, ob.point, self._add((), pattern, ob.point))
        if ob.kind == "extend":
            w = first_witness(view, ob.base, ob.pattern)
            if w is not None:
                return self._record(ob, w, None)
            z = self._fresh()
        else:
            ground = self.config.ground_sets[ob.ground]
            w = next((x for x in iter_witnesses(view, ob.base, ob.pattern) if x in ground), None)
            if w is not None:
                return self._record(ob, w, None)
            z = ground.least_unused(view.universe)
        return self._record(ob, z, self._add(ob.base, ob.pattern, z))

    def _record(self, ob, witness, tuples) -> LedgerEntry:
        entry = LedgerEntry(ob, self.pull, witness, tuples is not None)
        self.ledger.append(entry)
        self.deltas.append(None if tuples is None else (witness, [frozenset(t) for t in tuples]))
        self.pull += 1
        return entry

    def step(self) -> LedgerEntry:
        return self.meet(self.next_obligation())

    def result(self) -> GenericStructure:
        return GenericStructure(self.config, self.klass, self.view.freeze(), list(self.ledger), list(self.deltas))


def run(config: BuildConfig, klass: FraisseClass | None = None) -> GenericStructure:
    """Meet ``config.steps`` obligations starting from the empty condition."""
    b = Builder(config, klass)
    for _ in range(config.steps):
        b.step()
    return b.result()
