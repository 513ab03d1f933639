"""Finite prefixes of Fraïssé limits built by meeting dense sets of a forcing poset."""

from .builder import BuildConfig, Builder, GenericStructure, GroundSet, Obligation, prefix, run
from .classes import (
    ClassError,
    FraisseClass,
    IncompatibleError,
    amalgamate,
    contains,
    enumerate_members,
    get_class,
    joint_embed,
    register,
    registered_classes,
    verify_class_axioms,
)
from .poset import Condition, compatible, leq
from .structures import (
    DomainError,
    Embedding,
    Language,
    Structure,
    find_embeddings,
    is_extension,
    is_isomorphic,
    restrict,
    validate,
)

__all__ = [
    "BuildConfig", "Builder", "ClassError", "Condition", "DomainError", "Embedding",
    "FraisseClass", "GenericStructure", "GroundSet", "IncompatibleError", "Language",
    "Obligation", "Structure", "amalgamate", "compatible", "contains", "enumerate_members",
    "find_embeddings", "get_class", "is_extension", "is_isomorphic", "joint_embed", "leq",
    "prefix", "register", "registered_classes", "restrict", "run", "validate",
    "verify_class_axioms",
]
