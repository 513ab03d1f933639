"""Finite-stage checks of a build against the properties of the limit.

Each check returns a :class:`CheckReport`.  Checks are scoped by the build's
ledger: an instance whose obligation was met must hold, an instance outside
the ledger is still examined but only counted as ``unguaranteed`` when it
fails.  A failing report carries a witness that can be replayed with the
functions in :mod:`fraisse_forcing.structures`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .builder import GenericStructure, WorkingStructure
from .classes import LinearOrders, contains, enumerate_members, extension_patterns
from .structures import (
    NEW,
    DomainError,
    Structure,
    find_embeddings,
    first_witness,
    is_extension,
    is_isomorphic,
    iter_witnesses,
    pattern_of,
    pattern_to_json,
    realizes,
    restrict,
    transport,
)


@dataclass
class CheckReport:
    check: str
    scope: dict
    passed: bool = True
    witness: dict | None = None
    examined: int = 0
    satisfied: int = 0
    unguaranteed: int = 0
    warnings: list[str] = field(default_factory=list)

    def fail(self, **witness):
        if self.passed:
            self.passed = False
            self.witness = witness

    @property
    def outcome(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "scope": self.scope,
            "outcome": self.outcome,
            "witness": self.witness,
            "counts": {"examined": self.examined, "satisfied": self.satisfied,
                       "unguaranteed": self.unguaranteed},
            "warnings": self.warnings,
        }

    def line(self) -> str:
        scope = " ".join(f"{k}={v}" for k, v in self.scope.items())
        return f"{self.outcome.upper():4} {self.check} [{scope}] {self.satisfied}/{self.examined}"


def _met_extensions(M: GenericStructure) -> set:
    return {(e.obligation.base, e.obligation.pattern) for e in M.ledger if e.obligation.kind == "extend"}


def _check_ground_witnesses(M: GenericStructure, report: CheckReport):
    for e in M.ledger:
        ob = e.obligation
        if ob.kind != "ground":
            continue
        ground = M.config.ground_sets[ob.ground]
        report.examined += 1
        if e.witness in ground and realizes(M.final, ob.base, ob.pattern, e.witness):
            report.satisfied += 1
        else:
            report.fail(kind="ground", stage=e.stage, ground=str(ground), base=list(ob.base),
                        pattern=pattern_to_json(ob.pattern, M.klass.language), witness_point=e.witness)


def _prefix_points(M: GenericStructure, m: int) -> list[int]:
    return sorted(x for x in M.final.universe if x < m)


def _scope_warning(report: CheckReport):
    if report.unguaranteed:
        report.warnings.append(
            f"unguaranteed scope: {report.unguaranteed} instance(s) lie outside the ledger "
            "and have no witness yet"
        )


# -- structural checks on the chain ---------------------------------------


def check_chain(M: GenericStructure) -> CheckReport:
    """Chain property, filter coherence and point coverage.

    The chain is replayed point by point, from the recorded deltas for fresh
    builds or from the final condition for parsed ones.  A stage extends its
    predecessor iff its point is fresh and every added tuple goes through
    it; it agrees with the final condition iff the added tuples are exactly
    the final condition's tuples through the point inside the new universe.
    The replayed end of the chain is compared with the final condition.
    """
    report = CheckReport("chain", {"steps": M.steps})
    k, final = M.klass, M.final
    names = k.language.names
    universe: set[int] = set()
    rels = [set() for _ in names]
    for stage, e in enumerate(M.ledger):
        if not e.added:
            continue
        z = e.witness
        report.examined += 1
        if z not in final.universe:
            report.fail(kind="coherence", stage=stage, point=z, detail="point missing from the final condition")
            continue
        inside = universe | {z}
        expected = [{t for t in final.incident(z, n) if inside.issuperset(t)} for n in names]
        delta = expected if M.deltas is None else [set(d) for d in M.deltas[stage][1]]
        if z in universe or any(z not in t or not inside.issuperset(t) for d in delta for t in d):
            report.fail(kind="chain", stage=stage, point=z)
        elif delta != expected:
            report.fail(kind="coherence", stage=stage, point=z)
        else:
            report.satisfied += 1
        universe.add(z)
        for rel, d in zip(rels, delta):
            rel |= d
    replayed = Structure(k.language, frozenset(universe), tuple(frozenset(r) for r in rels))
    if replayed != final:
        report.fail(kind="coherence", stage=M.steps, detail="replayed chain does not end at the final condition")

    bound = M.fairness_bound()
    met_points = {e.obligation.point for e in M.ledger if e.obligation.kind == "point"}
    for n in range(bound):
        report.examined += 1
        if n in met_points and n in final.universe:
            report.satisfied += 1
        else:
            report.fail(kind="point", point=n)
    report.scope["fairness_bound"] = bound
    return report


def check_ledger(M: GenericStructure) -> CheckReport:
    """Replay every met obligation against the final condition."""
    report = CheckReport("ledger", {"steps": M.steps})
    for e in M.ledger:
        ob = e.obligation
        report.examined += 1
        if ob.kind == "point":
            ok = ob.point in M.final.universe and e.witness == ob.point
        else:
            ok = realizes(M.final, ob.base, ob.pattern, e.witness)
            if ob.kind == "ground":
                ok = ok and e.witness in M.config.ground_sets[ob.ground]
        if ok:
            report.satisfied += 1
        else:
            report.fail(stage=e.stage, kind=ob.kind, witness_point=e.witness)
    return report


def _grow_members(M: GenericStructure, order, kind: str, report: CheckReport):
    k, final = M.klass, M.final
    view = WorkingStructure(k.language)
    sample = {2**i for i in range(64)}
    for i, z in enumerate(order, 1):
        inside = view.universe | {z}
        view.add_point(z, [{t for t in final.incident(z, n) if inside.issuperset(t)} for n in k.language.names])
        report.examined += 1
        ok = k.accepts_point(view, z)
        if ok and i in sample:
            ok = contains(k, view.freeze())
        if ok:
            report.satisfied += 1
        else:
            report.fail(kind=kind, universe=sorted(view.universe))


def check_class_invariant(M: GenericStructure) -> CheckReport:
    """Every chain element and every prefix is a member of the class.

    Both sequences grow one point at a time, so each step is checked with the
    class's ``accepts_point`` hook.  The empty and final conditions, and the
    stages whose size is a power of two, are also checked from scratch.
    """
    report = CheckReport("class-invariant", {"class": M.klass.name})
    for s in (Structure.empty(M.klass.language), M.final):
        report.examined += 1
        if contains(M.klass, s):
            report.satisfied += 1
        else:
            report.fail(kind="member", universe=s.sorted_universe())
    _grow_members(M, [z for z in M.added_points() if z is not None], "chain", report)
    _grow_members(M, M.final.sorted_universe(), "prefix", report)
    return report


# -- properties of the limit ---------------------------------------------


def _between(a, b):
    return ((tuple(sorted([(a, NEW), (NEW, b)])),), (min(a, b), max(a, b)))


def check_density_linear(M: GenericStructure, m: int) -> CheckReport:
    """Intermediate points between ledger-met pairs, no endpoints, ground witnesses."""
    if not isinstance(M.klass, LinearOrders):
        raise DomainError(f"density check needs a linear-order build, got {M.klass.name}")
    report = CheckReport("density", {"m": m})
    final = M.final
    met = _met_extensions(M)
    pts = _prefix_points(M, m)

    for a, b in itertools.permutations(pts, 2):
        if not final.has("<", (a, b)):
            continue
        pattern, base = _between(a, b)
        if (base, pattern) not in met:
            continue
        report.examined += 1
        if first_witness(final, base, pattern) is not None:
            report.satisfied += 1
        else:
            report.fail(kind="between", pair=[a, b])

    for a in pts:
        for side, pattern in (("below", (((NEW, a),),)), ("above", (((a, NEW),),))):
            guaranteed = ((a,), pattern) in met
            found = first_witness(final, (a,), pattern) is not None
            if guaranteed:
                report.examined += 1
            if found:
                report.satisfied += guaranteed
            elif guaranteed:
                report.fail(kind="endpoint", point=a, missing=side)
            else:
                report.unguaranteed += 1

    _check_ground_witnesses(M, report)
    _scope_warning(report)
    return report


def isomorphism_types(k, size: int) -> list[Structure]:
    """One representative per isomorphism type of member with at most ``size`` points."""
    reps: list[Structure] = []
    for s in enumerate_members(k, size):
        if not any(len(r) == len(s) and is_isomorphic(r, s) for r in reps):
            reps.append(s)
    return reps


def check_embeddability(M: GenericStructure, k: int) -> CheckReport:
    report = CheckReport("embeddability", {"k": k})
    for t in isomorphism_types(M.klass, k):
        report.examined += 1
        if find_embeddings(t, M.final, limit=1):
            report.satisfied += 1
        else:
            report.fail(kind="missing-type", type=t.to_json())
    largest_met = max((len(e.obligation.base) for e in M.ledger if e.obligation.kind == "extend"), default=-1)
    if k > largest_met + 1:
        report.warnings.append(f"unguaranteed scope: the ledger covers bases of size <= {largest_met} only")
    return report


def check_extension_property(M: GenericStructure, k: int, m: int) -> CheckReport:
    """Every one-point extension type over every small set of the prefix has a witness."""
    report = CheckReport("extension", {"k": k, "m": m})
    final, met = M.final, _met_extensions(M)
    pts = _prefix_points(M, m)
    for size in range(k + 1):
        for base in itertools.combinations(pts, size):
            for pattern in extension_patterns(M.klass, restrict(final, base)):
                guaranteed = (base, pattern) in met
                found = first_witness(final, base, pattern) is not None
                report.examined += 1
                if found:
                    report.satisfied += 1
                elif guaranteed:
                    report.fail(kind="extension", base=list(base),
                                pattern=pattern_to_json(pattern, M.klass.language))
                else:
                    report.unguaranteed += 1
    _check_ground_witnesses(M, report)
    _scope_warning(report)
    return report


def _partial_isomorphisms(final: Structure, pts: list[int], k: int):
    for size in range(k + 1):
        subsets = list(itertools.combinations(pts, size))
        for A in subsets:
            sa = restrict(final, A)
            for B in subsets:
                for image in itertools.permutations(B):
                    f = dict(zip(A, image))
                    if transport(_full_pattern(sa), f) == _full_pattern(restrict(final, B)):
                        yield A, B, f


def _full_pattern(s: Structure):
    return tuple(tuple(sorted(rel)) for rel in s.rels)


def check_partial_iso_extension(M: GenericStructure, k: int, m: int) -> CheckReport:
    """Each partial isomorphism of the prefix extends by one point on either side."""
    report = CheckReport("partial-iso", {"k": k, "m": m})
    final, met = M.final, _met_extensions(M)
    pts = _prefix_points(M, m)
    types: dict = {}
    found: dict = {}
    for A, B, f in _partial_isomorphisms(final, pts, k):
        inverse = {v: u for u, v in f.items()}
        for side, dom, cod, g in (("forward", A, B, f), ("backward", B, A, inverse)):
            for a in pts:
                if a in dom:
                    continue
                if (dom, a) not in types:
                    types[dom, a] = pattern_of(final, dom, a)
                pattern = transport(types[dom, a], g)
                base = tuple(sorted(cod))
                if (base, pattern) not in found:
                    found[base, pattern] = first_witness(final, base, pattern) is not None
                report.examined += 1
                if found[base, pattern]:
                    report.satisfied += 1
                elif (base, pattern) in met:
                    report.fail(kind=side, map=sorted(f.items()), point=a)
                else:
                    report.unguaranteed += 1
    _scope_warning(report)
    return report


def back_and_forth_equiv(M1: GenericStructure, M2: GenericStructure, depth: int, m: int) -> CheckReport:
    """Bounded back-and-forth game between two final conditions.

    The spoiler challenges with points below ``m`` of either side, most
    constrained challenge first, then ascending; the duplicator answers with
    the least point of the other side that keeps the map a partial
    isomorphism and still wins the rest of the game.  Every line of the
    bounded game tree is explored.
    """
    if M1.klass.language != M2.klass.language:
        raise DomainError("back-and-forth needs builds over the same language")
    report = CheckReport("back-and-forth", {"depth": depth, "m": m,
                                            "classes": [M1.klass.name, M2.klass.name]})
    F = {1: M1.final, 2: M2.final}
    challengers = sorted(
        [(c, 1) for c in F[1].universe if c < m] + [(c, 2) for c in F[2].universe if c < m]
    )
    memo: dict = {}

    def challenge(pairs, side, c):
        f = dict(pairs) if side == 1 else {b: a for a, b in pairs}
        pattern = transport(pattern_of(F[side], sorted(f), c), f)
        return sorted(f.values()), pattern

    def play(pairs: frozenset, rounds: int):
        """Return ``None`` if the duplicator wins, else a losing line."""
        if rounds == 0:
            return None
        key = (pairs, rounds)
        if key in memo:
            return memo[key]
        dom = {a for a, _ in pairs}
        rng = {b for _, b in pairs}
        moves = []
        for c, side in challengers:
            if c in (dom if side == 1 else rng):
                continue
            base, pattern = challenge(pairs, side, c)
            tied = sum(len(ts) for ts in pattern)
            moves.append((-tied, c, side, base, pattern))
        # most constrained challenges first: cheap refutations in lost positions
        moves.sort(key=lambda mv: mv[:3])
        result = None
        for _, c, side, base, pattern in moves:
            report.examined += 1
            first_loss = None
            for r in iter_witnesses(F[3 - side], base, pattern):
                new = (c, r) if side == 1 else (r, c)
                line = play(pairs | {new}, rounds - 1)
                if line is None:
                    first_loss = None
                    break
                if first_loss is None:
                    first_loss = [{"side": side, "challenge": c, "response": r}] + line
            else:
                if first_loss is None:
                    first_loss = [{"side": side, "challenge": c, "response": None}]
                result = first_loss
                break
            report.satisfied += 1
        memo[key] = result
        return result

    line = play(frozenset(), depth)
    if line is not None:
        report.fail(line=line)
    return report
