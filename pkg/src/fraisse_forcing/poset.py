"""The forcing poset of finite class members living on subsets of the naturals."""

from __future__ import annotations

from dataclasses import dataclass

from .classes import FraisseClass, amalgamate, contains, get_class
from .structures import DomainError, Structure, is_extension, restrict


@dataclass(frozen=True)
class Condition:
    structure: Structure
    klass: FraisseClass

    def __post_init__(self):
        if not contains(self.klass, self.structure):
            raise DomainError(f"{self.structure!r} is not a member of {self.klass.name}")

    @property
    def universe(self) -> frozenset:
        return self.structure.universe

    def to_json(self) -> dict:
        return {"class": self.klass.name, "structure": self.structure.to_json()}

    @classmethod
    def from_json(cls, data) -> "Condition":
        return cls(Structure.from_json(data["structure"]), get_class(data["class"]))


def _same_class(p: Condition, q: Condition):
    if p.klass is not q.klass and p.klass.name != q.klass.name:
        raise DomainError(f"class mismatch: {p.klass.name} vs {q.klass.name}")


def leq(p: Condition, q: Condition) -> bool:
    """``p <= q``: ``p`` is the stronger condition."""
    _same_class(p, q)
    return is_extension(p.structure, q.structure)


def compatible(p: Condition, q: Condition) -> Condition | None:
    """A common extension of ``p`` and ``q``, or ``None`` when they disagree on the overlap."""
    _same_class(p, q)
    common = p.universe & q.universe
    root = restrict(p.structure, common)
    if restrict(q.structure, common) != root:
        return None
    return Condition(amalgamate(p.klass, root, p.structure, q.structure), p.klass)
