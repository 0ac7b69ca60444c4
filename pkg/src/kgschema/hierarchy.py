"""Transitive-closure indexes over class, mixin, and predicate hierarchies.

The closure is materialized eagerly: the schema is small and read-mostly,
while validation and querying consult it per edge. Mixin reachability is
kept in its own map so that mixins never change a class's position in the
instantiable tree.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import (
    EmptyCategorySetError,
    IncomparableCategoriesWarning,
    SchemaNotValidError,
    UnknownClassError,
    UnknownPredicateError,
)
from .schema_model import PREDICATE, SchemaDocument, validate_schema


@dataclass
class ClosureIndex:
    """Precomputed reachability over one schema. Immutable after build.

    Ancestor lists are reflexive and ordered self-first, then nearest to
    farthest. Descendant sets are the exact duals of the ancestor lists.
    ``mixin_membership`` maps every class to the mixins reachable through
    its own mixin declarations and those of its ancestors.
    """

    class_ancestors: dict[str, list[str]] = field(default_factory=dict)
    class_descendants: dict[str, frozenset[str]] = field(default_factory=dict)
    predicate_ancestors: dict[str, list[str]] = field(default_factory=dict)
    predicate_descendants: dict[str, frozenset[str]] = field(default_factory=dict)
    mixin_membership: dict[str, frozenset[str]] = field(default_factory=dict)
    mixins: frozenset[str] = frozenset()
    mixin_carriers: dict[str, frozenset[str]] = field(default_factory=dict)

    def depth(self, class_name: str) -> int:
        return len(self.class_ancestors[class_name]) - 1

    def predicate_depth(self, predicate: str) -> int:
        return len(self.predicate_ancestors[predicate]) - 1


def _ancestor_lists(parents: dict[str, str | None]) -> dict[str, list[str]]:
    cache: dict[str, list[str]] = {}

    def walk(name: str) -> list[str]:
        known = cache.get(name)
        if known is not None:
            return known
        parent = parents[name]
        if parent is None or parent not in parents:
            result = [name]
        else:
            result = [name] + walk(parent)
        cache[name] = result
        return result

    for name in parents:
        walk(name)
    return cache


def _invert(ancestors: dict[str, list[str]]) -> dict[str, frozenset[str]]:
    down: dict[str, set[str]] = {name: set() for name in ancestors}
    for name, ups in ancestors.items():
        for up in ups:
            down[up].add(name)
    return {name: frozenset(members) for name, members in down.items()}


def build_closure(doc: SchemaDocument) -> ClosureIndex:
    """Materialize ancestor/descendant reachability for ``doc``.

    Raises :class:`SchemaNotValidError` if the schema has error-severity
    violations (warnings are tolerated).
    """
    errors = [v for v in validate_schema(doc) if v.severity == "error"]
    if errors:
        summary = ", ".join(sorted({v.code for v in errors}))
        raise SchemaNotValidError(f"schema has {len(errors)} error(s): {summary}")

    index = ClosureIndex()
    index.class_ancestors = _ancestor_lists({n: c.is_a for n, c in doc.classes.items()})
    index.class_descendants = _invert(index.class_ancestors)

    predicate_parents = {
        name: slot.is_a for name, slot in doc.slots.items() if slot.slot_kind == PREDICATE
    }
    index.predicate_ancestors = _ancestor_lists(predicate_parents)
    index.predicate_descendants = _invert(index.predicate_ancestors)

    index.mixins = frozenset(n for n, c in doc.classes.items() if c.is_mixin)
    membership: dict[str, frozenset[str]] = {}
    for name in doc.classes:
        reach: set[str] = set()
        stack = [name]
        seen = {name}
        while stack:
            current = stack.pop()
            cls = doc.classes[current]
            if cls.is_mixin:
                reach.add(current)
            for nxt in ([cls.is_a] if cls.is_a else []) + list(cls.mixins):
                if nxt not in seen and nxt in doc.classes:
                    seen.add(nxt)
                    stack.append(nxt)
        membership[name] = frozenset(reach)
    index.mixin_membership = membership

    carriers: dict[str, set[str]] = {m: set() for m in index.mixins}
    for name, reach in membership.items():
        if name in index.mixins:
            continue
        for mixin in reach:
            carriers[mixin].add(name)
    index.mixin_carriers = {m: frozenset(c) for m, c in carriers.items()}
    return index


def is_subclass_of(index: ClosureIndex, a: str, b: str, use_mixins: bool = False) -> bool:
    """True when ``b`` is an ancestor of ``a`` (reflexively).

    With ``use_mixins`` the mixins carried by ``a`` count as ancestors too.
    """
    ancestors = index.class_ancestors.get(a)
    if ancestors is None:
        raise UnknownClassError(a)
    if b not in index.class_ancestors:
        raise UnknownClassError(b)
    if b in ancestors:
        return True
    return use_mixins and b in index.mixin_membership[a]


def expand_predicates(index: ClosureIndex, predicates: set[str]) -> set[str]:
    """Union of descendant sets over ``predicates``; always a superset."""
    expanded: set[str] = set()
    for predicate in predicates:
        descendants = index.predicate_descendants.get(predicate)
        if descendants is None:
            raise UnknownPredicateError(predicate)
        expanded.update(descendants)
    return expanded


def minimal_categories(index: ClosureIndex, categories: set[str]) -> list[str]:
    """Members of ``categories`` with no other member below them, sorted.

    A member counts as below another when it descends from it in the
    instantiable tree or carries it as a mixin.
    """
    if not categories:
        raise EmptyCategorySetError("no categories given")
    for category in categories:
        if category not in index.class_ancestors:
            raise UnknownClassError(category)
    minimal = []
    for candidate in categories:
        below = index.class_descendants[candidate] | index.mixin_carriers.get(
            candidate, frozenset()
        )
        if not any(other != candidate and other in below for other in categories):
            minimal.append(candidate)
    return sorted(minimal)


def most_specific_category(index: ClosureIndex, categories: set[str]) -> str:
    """The category with no other member among its descendants or carriers.

    Ties between incomparable categories are broken by lexicographic order
    and reported with :class:`IncomparableCategoriesWarning`.
    """
    minimal = minimal_categories(index, categories)
    if len(minimal) > 1:
        warnings.warn(
            f"incomparable categories {minimal}; choosing {minimal[0]!r} lexicographically",
            IncomparableCategoriesWarning,
            stacklevel=2,
        )
    return minimal[0]
