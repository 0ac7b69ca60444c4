"""Schema metamodel: domain types, document parsing, validation, serialization.

A schema document declares prefixes, classes (including mixins), slots
(predicates, node properties, edge properties), associations, and custom
types, in the block-style text format implemented by
:mod:`kgschema.blockyaml`. Parsing is strict about structure and key names;
referential and hierarchy rules are checked separately by
:func:`validate_schema`, which reports violations as data instead of raising.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field

from . import blockyaml
from .blockyaml import MappingNode, Scalar, Sequence, YamlNode
from .errors import DuplicateNameError, ParseError, SchemaFormatWarning, UnknownClassError

_SECTION_KINDS = {
    "classes": "class",
    "slots": "slot",
    "associations": "association",
    "types": "type",
    "prefixes": "prefix",
}

PREDICATE = "predicate"
NODE_PROPERTY = "node_property"
EDGE_PROPERTY = "edge_property"
SLOT_KINDS = (PREDICATE, NODE_PROPERTY, EDGE_PROPERTY)

ROOT_PREDICATE = "related_to"

MAPPING_RELATIONS = ("exact", "close", "broad", "narrow", "related")
TYPE_BASES = ("string", "integer", "float", "boolean", "curie", "iri")

SCHEMA_FORMAT_VERSION = "1"

_CAMEL_RE = re.compile(r"^[A-Z][A-Za-z0-9]*$")
_SNAKE_RE = re.compile(r"^[a-z][a-z0-9_]*$")


@dataclass
class Mapping:
    """Cross-vocabulary link from a schema element to an external term."""

    relation: str
    target: str


@dataclass
class ClassDefinition:
    name: str
    description: str = ""
    is_a: str | None = None
    mixins: list[str] = field(default_factory=list)
    is_mixin: bool = False
    slots: list[str] = field(default_factory=list)
    id_prefixes: list[str] = field(default_factory=list)
    mappings: list[Mapping] = field(default_factory=list)


@dataclass
class SlotDefinition:
    name: str
    slot_kind: str
    description: str = ""
    is_a: str | None = None
    domain: str | None = None
    range: str | None = None
    multivalued: bool = False
    required: bool = False
    symmetric: bool = False
    mappings: list[Mapping] = field(default_factory=list)


@dataclass
class AssociationDefinition:
    name: str
    subject: str
    predicate: str
    object: str
    is_a: str | None = None
    required_edge_properties: list[str] = field(default_factory=list)
    optional_edge_properties: list[str] = field(default_factory=list)


@dataclass
class TypeDefinition:
    name: str
    base: str
    description: str = ""


@dataclass
class SchemaDocument:
    """A parsed schema. Treat as immutable once constructed."""

    name: str
    version: str
    prefixes: dict[str, str] = field(default_factory=dict)
    classes: dict[str, ClassDefinition] = field(default_factory=dict)
    slots: dict[str, SlotDefinition] = field(default_factory=dict)
    associations: dict[str, AssociationDefinition] = field(default_factory=dict)
    types: dict[str, TypeDefinition] = field(default_factory=dict)

    def predicate_names(self) -> list[str]:
        return [n for n, s in self.slots.items() if s.slot_kind == PREDICATE]

    def is_predicate(self, name: str) -> bool:
        slot = self.slots.get(name)
        return slot is not None and slot.slot_kind == PREDICATE


@dataclass(frozen=True)
class SchemaViolation:
    """One broken schema rule; ``severity`` is ``error`` or ``warning``."""

    code: str
    severity: str
    element: str
    detail: str


# Violation codes emitted by validate_schema.
CYCLE_IN_IS_A = "CYCLE_IN_IS_A"
PREDICATE_NOT_UNDER_RELATED_TO = "PREDICATE_NOT_UNDER_RELATED_TO"
UNDECLARED_PREFIX = "UNDECLARED_PREFIX"
DUPLICATE_ID_PREFIX = "DUPLICATE_ID_PREFIX"
MIXIN_NOT_MIXIN = "MIXIN_NOT_MIXIN"
MIXIN_IS_A_NOT_MIXIN = "MIXIN_IS_A_NOT_MIXIN"
CLASS_IS_A_MIXIN = "CLASS_IS_A_MIXIN"
UNKNOWN_IS_A = "UNKNOWN_IS_A"
UNKNOWN_CLASS_REF = "UNKNOWN_CLASS_REF"
UNKNOWN_SLOT_REF = "UNKNOWN_SLOT_REF"
NOT_A_PREDICATE = "NOT_A_PREDICATE"
SLOT_NOT_EDGE_PROPERTY = "SLOT_NOT_EDGE_PROPERTY"
SLOT_KIND_MISMATCH = "SLOT_KIND_MISMATCH"
NAMESPACE_COLLISION = "NAMESPACE_COLLISION"
INVALID_MAPPING_RELATION = "INVALID_MAPPING_RELATION"
MALFORMED_MAPPING_TARGET = "MALFORMED_MAPPING_TARGET"
INVALID_TYPE_BASE = "INVALID_TYPE_BASE"
INVALID_SLOT_KIND = "INVALID_SLOT_KIND"
ASSOCIATION_WIDENS_PARENT = "ASSOCIATION_WIDENS_PARENT"
CLASS_NAME_STYLE = "CLASS_NAME_STYLE"
SLOT_NAME_STYLE = "SLOT_NAME_STYLE"
ASSOCIATION_NAME_STYLE = "ASSOCIATION_NAME_STYLE"
MIXIN_SLOT_SHADOWED = "MIXIN_SLOT_SHADOWED"

_TOP_KEYS = ("name", "version", "prefixes", "classes", "slots", "associations", "types")
_CLASS_KEYS = ("description", "is_a", "is_mixin", "mixins", "slots", "id_prefixes", "mappings")
_SLOT_KEYS = (
    "description",
    "is_a",
    "slot_kind",
    "domain",
    "range",
    "multivalued",
    "required",
    "symmetric",
    "mappings",
)
_ASSOC_KEYS = (
    "is_a",
    "subject",
    "predicate",
    "object",
    "required_edge_properties",
    "optional_edge_properties",
)
_TYPE_KEYS = ("base", "description")

MAX_IDENTIFIER_BYTES = blockyaml.MAX_KEY_BYTES


# ---------------------------------------------------------------------------
# Parsing


def _err(message: str, node: YamlNode) -> ParseError:
    return ParseError(message, node.line, node.column)


def _scalar(node: YamlNode, what: str) -> str:
    if not isinstance(node, Scalar):
        raise _err(f"{what} must be a single value", node)
    return node.value


def _ident(node: YamlNode, what: str) -> str:
    value = _scalar(node, what)
    if len(value.encode("utf-8")) > MAX_IDENTIFIER_BYTES:
        raise _err(f"identifier longer than {MAX_IDENTIFIER_BYTES} bytes", node)
    return value


def _bool(node: YamlNode, what: str) -> bool:
    value = _scalar(node, what)
    if value == "true":
        return True
    if value == "false":
        return False
    raise _err(f"{what} must be 'true' or 'false', got {value!r}", node)


def _ident_list(node: YamlNode, what: str) -> list[str]:
    if not isinstance(node, Sequence):
        raise _err(f"{what} must be a sequence", node)
    return [_ident(item, what) for item in node.items]


def _check_keys(block: MappingNode, allowed: tuple[str, ...], what: str, lax: bool) -> None:
    for key in block.entries:
        if key not in allowed:
            line, column = block.key_positions[key]
            if lax:
                warnings.warn(
                    f"ignoring unknown key {key!r} in {what} (line {line})",
                    SchemaFormatWarning,
                    stacklevel=3,
                )
            else:
                raise ParseError(f"unknown key {key!r} in {what}", line, column)


def _mapping_list(node: YamlNode, what: str, lax: bool) -> list[Mapping]:
    if not isinstance(node, Sequence):
        raise _err(f"{what} must be a sequence", node)
    out = []
    for item in node.items:
        if not isinstance(item, MappingNode):
            raise _err("each mapping must have relation and target keys", item)
        _check_keys(item, ("relation", "target"), what, lax)
        for required in ("relation", "target"):
            if required not in item.entries:
                raise _err(f"mapping missing {required!r}", item)
        out.append(
            Mapping(
                relation=_ident(item.entries["relation"], "relation"),
                target=_ident(item.entries["target"], "target"),
            )
        )
    return out


def _named_blocks(node: YamlNode, what: str) -> dict[str, MappingNode]:
    if not isinstance(node, MappingNode):
        raise _err(f"{what} must be a mapping of names to definition blocks", node)
    out: dict[str, MappingNode] = {}
    for name, block in node.entries.items():
        if not isinstance(block, MappingNode):
            raise _err(f"definition of {name!r} must be a mapping", block)
        out[name] = block
    return out


def _build_class(name: str, block: MappingNode, lax: bool) -> ClassDefinition:
    _check_keys(block, _CLASS_KEYS, f"class {name!r}", lax)
    e = block.entries
    return ClassDefinition(
        name=name,
        description=_scalar(e["description"], "description") if "description" in e else "",
        is_a=_ident(e["is_a"], "is_a") if "is_a" in e else None,
        mixins=_ident_list(e["mixins"], "mixins") if "mixins" in e else [],
        is_mixin=_bool(e["is_mixin"], "is_mixin") if "is_mixin" in e else False,
        slots=_ident_list(e["slots"], "slots") if "slots" in e else [],
        id_prefixes=_ident_list(e["id_prefixes"], "id_prefixes") if "id_prefixes" in e else [],
        mappings=_mapping_list(e["mappings"], "mappings", lax) if "mappings" in e else [],
    )


def _build_slot(name: str, block: MappingNode, lax: bool) -> SlotDefinition:
    _check_keys(block, _SLOT_KEYS, f"slot {name!r}", lax)
    e = block.entries
    if "slot_kind" not in e:
        raise _err(f"slot {name!r} is missing slot_kind", block)
    return SlotDefinition(
        name=name,
        slot_kind=_ident(e["slot_kind"], "slot_kind"),
        description=_scalar(e["description"], "description") if "description" in e else "",
        is_a=_ident(e["is_a"], "is_a") if "is_a" in e else None,
        domain=_ident(e["domain"], "domain") if "domain" in e else None,
        range=_ident(e["range"], "range") if "range" in e else None,
        multivalued=_bool(e["multivalued"], "multivalued") if "multivalued" in e else False,
        required=_bool(e["required"], "required") if "required" in e else False,
        symmetric=_bool(e["symmetric"], "symmetric") if "symmetric" in e else False,
        mappings=_mapping_list(e["mappings"], "mappings", lax) if "mappings" in e else [],
    )


def _build_association(name: str, block: MappingNode, lax: bool) -> AssociationDefinition:
    _check_keys(block, _ASSOC_KEYS, f"association {name!r}", lax)
    e = block.entries
    for required in ("subject", "predicate", "object"):
        if required not in e:
            raise _err(f"association {name!r} is missing {required!r}", block)
    return AssociationDefinition(
        name=name,
        is_a=_ident(e["is_a"], "is_a") if "is_a" in e else None,
        subject=_ident(e["subject"], "subject"),
        predicate=_ident(e["predicate"], "predicate"),
        object=_ident(e["object"], "object"),
        required_edge_properties=(
            _ident_list(e["required_edge_properties"], "required_edge_properties")
            if "required_edge_properties" in e
            else []
        ),
        optional_edge_properties=(
            _ident_list(e["optional_edge_properties"], "optional_edge_properties")
            if "optional_edge_properties" in e
            else []
        ),
    )


def _build_type(name: str, block: MappingNode, lax: bool) -> TypeDefinition:
    _check_keys(block, _TYPE_KEYS, f"type {name!r}", lax)
    e = block.entries
    if "base" not in e:
        raise _err(f"type {name!r} is missing base", block)
    return TypeDefinition(
        name=name,
        base=_ident(e["base"], "base"),
        description=_scalar(e["description"], "description") if "description" in e else "",
    )


def parse_schema(source_text: str, *, lax: bool = False, max_depth: int = 8) -> SchemaDocument:
    """Parse a schema document from its textual form.

    Declaration order of prefixes and of every list field is preserved.
    Unknown keys raise :class:`ParseError` unless ``lax`` is set, in which
    case they are reported as :class:`SchemaFormatWarning` and skipped.
    """
    try:
        root = blockyaml.parse(source_text, max_depth=max_depth)
    except DuplicateNameError as exc:
        if len(exc.path) == 1 and exc.path[0] in _SECTION_KINDS:
            raise DuplicateNameError(
                _SECTION_KINDS[exc.path[0]], exc.name, exc.line, exc.column
            ) from exc
        raise
    _check_keys(root, _TOP_KEYS, "document", lax)
    for required in ("name", "version"):
        if required not in root.entries:
            raise ParseError(f"document is missing the {required!r} header", root.line, root.column)
    doc = SchemaDocument(
        name=_scalar(root.entries["name"], "name"),
        version=_scalar(root.entries["version"], "version"),
    )
    if "prefixes" in root.entries:
        block = root.entries["prefixes"]
        if not isinstance(block, MappingNode):
            raise _err("prefixes must be a mapping", block)
        for prefix, base in block.entries.items():
            doc.prefixes[prefix] = _scalar(base, f"prefix {prefix!r}")
    if "classes" in root.entries:
        for name, block in _named_blocks(root.entries["classes"], "classes").items():
            doc.classes[name] = _build_class(name, block, lax)
    if "slots" in root.entries:
        for name, block in _named_blocks(root.entries["slots"], "slots").items():
            doc.slots[name] = _build_slot(name, block, lax)
    if "associations" in root.entries:
        for name, block in _named_blocks(root.entries["associations"], "associations").items():
            doc.associations[name] = _build_association(name, block, lax)
    if "types" in root.entries:
        for name, block in _named_blocks(root.entries["types"], "types").items():
            doc.types[name] = _build_type(name, block, lax)
    return doc


# ---------------------------------------------------------------------------
# Serialization


def serialize_schema(doc: SchemaDocument) -> str:
    """Render ``doc`` in canonical textual form.

    ``parse_schema(serialize_schema(doc))`` equals ``doc`` field for field.
    Raises :class:`ValueError` if a value cannot be written as a plain scalar.
    """
    out: list[str] = []
    blockyaml.emit_entry(out, 0, "name", doc.name)
    blockyaml.emit_entry(out, 0, "version", doc.version)
    if doc.prefixes:
        out.append("prefixes:")
        for prefix, base in doc.prefixes.items():
            blockyaml.emit_entry(out, 2, prefix, base)
    if doc.classes:
        out.append("classes:")
        for cls in doc.classes.values():
            out.append(f"  {cls.name}:")
            empty = not (
                cls.description
                or cls.is_a
                or cls.is_mixin
                or cls.mixins
                or cls.slots
                or cls.id_prefixes
                or cls.mappings
            )
            if cls.description:
                blockyaml.emit_entry(out, 4, "description", cls.description)
            if cls.is_a is not None:
                blockyaml.emit_entry(out, 4, "is_a", cls.is_a)
            if cls.is_mixin or empty:
                # A definition block cannot be empty in the text format; the
                # explicit default keeps the round trip faithful.
                blockyaml.emit_entry(out, 4, "is_mixin", "true" if cls.is_mixin else "false")
            if cls.mixins:
                blockyaml.emit_seq_of_scalars(out, 4, "mixins", cls.mixins)
            if cls.slots:
                blockyaml.emit_seq_of_scalars(out, 4, "slots", cls.slots)
            if cls.id_prefixes:
                blockyaml.emit_seq_of_scalars(out, 4, "id_prefixes", cls.id_prefixes)
            _emit_mappings(out, cls.mappings)
    if doc.slots:
        out.append("slots:")
        for slot in doc.slots.values():
            out.append(f"  {slot.name}:")
            if slot.description:
                blockyaml.emit_entry(out, 4, "description", slot.description)
            if slot.is_a is not None:
                blockyaml.emit_entry(out, 4, "is_a", slot.is_a)
            blockyaml.emit_entry(out, 4, "slot_kind", slot.slot_kind)
            if slot.domain is not None:
                blockyaml.emit_entry(out, 4, "domain", slot.domain)
            if slot.range is not None:
                blockyaml.emit_entry(out, 4, "range", slot.range)
            if slot.multivalued:
                blockyaml.emit_entry(out, 4, "multivalued", "true")
            if slot.required:
                blockyaml.emit_entry(out, 4, "required", "true")
            if slot.symmetric:
                blockyaml.emit_entry(out, 4, "symmetric", "true")
            _emit_mappings(out, slot.mappings)
    if doc.associations:
        out.append("associations:")
        for assoc in doc.associations.values():
            out.append(f"  {assoc.name}:")
            if assoc.is_a is not None:
                blockyaml.emit_entry(out, 4, "is_a", assoc.is_a)
            blockyaml.emit_entry(out, 4, "subject", assoc.subject)
            blockyaml.emit_entry(out, 4, "predicate", assoc.predicate)
            blockyaml.emit_entry(out, 4, "object", assoc.object)
            if assoc.required_edge_properties:
                blockyaml.emit_seq_of_scalars(
                    out, 4, "required_edge_properties", assoc.required_edge_properties
                )
            if assoc.optional_edge_properties:
                blockyaml.emit_seq_of_scalars(
                    out, 4, "optional_edge_properties", assoc.optional_edge_properties
                )
    if doc.types:
        out.append("types:")
        for typ in doc.types.values():
            out.append(f"  {typ.name}:")
            blockyaml.emit_entry(out, 4, "base", typ.base)
            if typ.description:
                blockyaml.emit_entry(out, 4, "description", typ.description)
    return "\n".join(out) + "\n"


def _emit_mappings(out: list[str], mappings: list[Mapping]) -> None:
    if not mappings:
        return
    out.append("    mappings:")
    for m in mappings:
        blockyaml.check_emit_scalar(m.relation)
        blockyaml.check_emit_scalar(m.target)
        out.append(f"      - relation: {m.relation}")
        out.append(f"        target: {m.target}")


# ---------------------------------------------------------------------------
# Validation


def _chain(names: dict, start: str) -> list[str]:
    """is_a chain from ``start`` upward, cycle-guarded, unknown-guarded."""
    chain = [start]
    seen = {start}
    current = names.get(start)
    while current is not None and current.is_a is not None:
        parent = current.is_a
        if parent in seen or parent not in names:
            break
        chain.append(parent)
        seen.add(parent)
        current = names[parent]
    return chain


def _find_cycles(parents: dict[str, str | None]) -> list[tuple[str, ...]]:
    """Distinct is_a cycles, each as a canonical sorted member tuple."""
    cycles: set[tuple[str, ...]] = set()
    state: dict[str, int] = {}  # 1 = in progress, 2 = done
    for start in parents:
        if state.get(start) == 2:
            continue
        path: list[str] = []
        node: str | None = start
        while node is not None and node in parents and state.get(node) != 2:
            if state.get(node) == 1:
                cycles.add(tuple(sorted(path[path.index(node):])))
                break
            state[node] = 1
            path.append(node)
            node = parents[node]
        for visited in path:
            state[visited] = 2
    return sorted(cycles)


def _mixin_contribution(doc: SchemaDocument, mixin: str, seen: set[str]) -> list[str]:
    if mixin in seen or mixin not in doc.classes:
        return []
    seen.add(mixin)
    cls = doc.classes[mixin]
    out = list(cls.slots)
    if cls.is_a is not None:
        out.extend(_mixin_contribution(doc, cls.is_a, seen))
    for m in cls.mixins:
        out.extend(_mixin_contribution(doc, m, seen))
    return out


def effective_slots(doc: SchemaDocument, class_name: str) -> list[str]:
    """All slots applicable to instances of ``class_name``.

    Order: the class's own slots, then slots inherited along the is_a chain
    (nearest ancestor first), then mixin contributions in declaration order
    (the class's own mixins before inherited ones). Duplicates keep their
    first position. Mixins only add slots here; they never affect ancestor
    queries on the instantiable tree.
    """
    if class_name not in doc.classes:
        raise UnknownClassError(class_name)
    ordered: list[str] = []
    seen: set[str] = set()

    def add(slots: list[str]) -> None:
        for slot in slots:
            if slot not in seen:
                seen.add(slot)
                ordered.append(slot)

    chain = _chain(doc.classes, class_name)
    for name in chain:
        add(doc.classes[name].slots)
    for name in chain:
        for mixin in doc.classes[name].mixins:
            add(_mixin_contribution(doc, mixin, set()))
    return ordered


def validate_schema(doc: SchemaDocument) -> list[SchemaViolation]:
    """Check every structural rule; an empty result means the schema is valid.

    Violations are data, never exceptions, and are returned in a canonical
    order that does not depend on declaration order.
    """
    out: list[SchemaViolation] = []

    def err(code: str, element: str, detail: str) -> None:
        out.append(SchemaViolation(code, "error", element, detail))

    def warn(code: str, element: str, detail: str) -> None:
        out.append(SchemaViolation(code, "warning", element, detail))

    # Disjoint namespaces for classes and slots.
    for name in sorted(set(doc.classes) & set(doc.slots)):
        err(NAMESPACE_COLLISION, name, "name is declared both as a class and as a slot")

    # Classes.
    for name, cls in doc.classes.items():
        if not _CAMEL_RE.match(name):
            warn(CLASS_NAME_STYLE, name, "class names should be UpperCamelCase")
        if cls.is_a is not None:
            parent = doc.classes.get(cls.is_a)
            if parent is None:
                err(UNKNOWN_IS_A, name, f"is_a target {cls.is_a!r} is not a class")
            elif cls.is_mixin and not parent.is_mixin:
                err(MIXIN_IS_A_NOT_MIXIN, name, f"mixin extends non-mixin {cls.is_a!r}")
            elif not cls.is_mixin and parent.is_mixin:
                err(CLASS_IS_A_MIXIN, name, f"class extends mixin {cls.is_a!r}")
        for mixin in cls.mixins:
            target = doc.classes.get(mixin)
            if target is None:
                err(UNKNOWN_CLASS_REF, name, f"mixin {mixin!r} is not a class")
            elif not target.is_mixin:
                err(MIXIN_NOT_MIXIN, name, f"mixin list names non-mixin {mixin!r}")
        seen_prefixes: set[str] = set()
        for prefix in cls.id_prefixes:
            if prefix in seen_prefixes:
                err(DUPLICATE_ID_PREFIX, name, f"prefix {prefix!r} listed twice")
            seen_prefixes.add(prefix)
            if prefix not in doc.prefixes:
                err(UNDECLARED_PREFIX, name, f"prefix {prefix!r} is not declared")
        for slot in cls.slots:
            if slot not in doc.slots:
                err(UNKNOWN_SLOT_REF, name, f"slot {slot!r} is not declared")
        _check_mappings(cls.mappings, name, err)

    for members in _find_cycles({n: c.is_a for n, c in doc.classes.items()}):
        err(CYCLE_IN_IS_A, members[0], "class is_a cycle: " + " -> ".join(members))

    # Slots.
    for name, slot in doc.slots.items():
        if not _SNAKE_RE.match(name):
            warn(SLOT_NAME_STYLE, name, "slot names should be snake_case")
        if slot.slot_kind not in SLOT_KINDS:
            err(INVALID_SLOT_KIND, name, f"slot_kind {slot.slot_kind!r} is not one of {SLOT_KINDS}")
        if slot.is_a is not None:
            parent = doc.slots.get(slot.is_a)
            if parent is None:
                err(UNKNOWN_IS_A, name, f"is_a target {slot.is_a!r} is not a slot")
            elif parent.slot_kind != slot.slot_kind:
                err(
                    SLOT_KIND_MISMATCH,
                    name,
                    f"{slot.slot_kind} slot extends {parent.slot_kind} slot {slot.is_a!r}",
                )
        if slot.domain is not None and slot.domain not in doc.classes:
            err(UNKNOWN_CLASS_REF, name, f"domain {slot.domain!r} is not a class")
        if slot.range is not None and not (
            slot.range in doc.classes or slot.range in doc.types or slot.range in TYPE_BASES
        ):
            err(UNKNOWN_CLASS_REF, name, f"range {slot.range!r} is not a class or type")
        _check_mappings(slot.mappings, name, err)

    slot_cycles = _find_cycles({n: s.is_a for n, s in doc.slots.items()})
    for members in slot_cycles:
        err(CYCLE_IN_IS_A, members[0], "slot is_a cycle: " + " -> ".join(members))
    on_cycle = {name for members in slot_cycles for name in members}

    # Every predicate must sit under the root predicate.
    for name, slot in doc.slots.items():
        if slot.slot_kind != PREDICATE or name in on_cycle:
            continue
        if name == ROOT_PREDICATE:
            if slot.is_a is not None:
                err(PREDICATE_NOT_UNDER_RELATED_TO, name, "the root predicate must have no parent")
            continue
        chain = _chain(doc.slots, name)
        top = doc.slots.get(chain[-1])
        if chain[-1] != ROOT_PREDICATE or top is None or top.slot_kind != PREDICATE:
            err(
                PREDICATE_NOT_UNDER_RELATED_TO,
                name,
                f"predicate does not reach {ROOT_PREDICATE!r} via is_a",
            )

    # Associations.
    for name, assoc in doc.associations.items():
        if not name.endswith("Association") or not _CAMEL_RE.match(name):
            warn(
                ASSOCIATION_NAME_STYLE,
                name,
                "association names should be UpperCamelCase and end in 'Association'",
            )
        if assoc.is_a is not None and assoc.is_a not in doc.associations:
            err(UNKNOWN_IS_A, name, f"is_a target {assoc.is_a!r} is not an association")
        for side, target in (("subject", assoc.subject), ("object", assoc.object)):
            if target not in doc.classes:
                err(UNKNOWN_CLASS_REF, name, f"{side} {target!r} is not a class")
        pred = doc.slots.get(assoc.predicate)
        if pred is None:
            err(UNKNOWN_SLOT_REF, name, f"predicate {assoc.predicate!r} is not a slot")
        elif pred.slot_kind != PREDICATE:
            err(NOT_A_PREDICATE, name, f"{assoc.predicate!r} is a {pred.slot_kind}, not a predicate")
        for prop in assoc.required_edge_properties + assoc.optional_edge_properties:
            target_slot = doc.slots.get(prop)
            if target_slot is None:
                err(UNKNOWN_SLOT_REF, name, f"edge property {prop!r} is not a slot")
            elif target_slot.slot_kind != EDGE_PROPERTY:
                err(SLOT_NOT_EDGE_PROPERTY, name, f"{prop!r} is a {target_slot.slot_kind}")

    assoc_cycles = _find_cycles({n: a.is_a for n, a in doc.associations.items()})
    for members in assoc_cycles:
        err(CYCLE_IN_IS_A, members[0], "association is_a cycle: " + " -> ".join(members))

    # Child associations may only narrow their parent's constraints. The
    # check runs per association, only when both ends' references resolve.
    for name, assoc in doc.associations.items():
        parent = doc.associations.get(assoc.is_a) if assoc.is_a else None
        if parent is None:
            continue
        refs = (assoc.subject, assoc.object, parent.subject, parent.object)
        if any(ref not in doc.classes for ref in refs):
            continue
        if assoc.predicate not in doc.slots or parent.predicate not in doc.slots:
            continue
        for side, child_t, parent_t in (
            ("subject", assoc.subject, parent.subject),
            ("object", assoc.object, parent.object),
        ):
            if not _narrows(doc, child_t, parent_t):
                err(
                    ASSOCIATION_WIDENS_PARENT,
                    name,
                    f"{side} {child_t!r} is not a specialization of {parent_t!r}",
                )
        if parent.predicate not in _chain(doc.slots, assoc.predicate):
            err(
                ASSOCIATION_WIDENS_PARENT,
                name,
                f"predicate {assoc.predicate!r} is not a descendant of {parent.predicate!r}",
            )

    # Types.
    for name, typ in doc.types.items():
        if typ.base not in TYPE_BASES:
            err(INVALID_TYPE_BASE, name, f"base {typ.base!r} is not one of {TYPE_BASES}")

    # Two declared mixins contributing the same slot: first declaration wins.
    for name, cls in doc.classes.items():
        first_source: dict[str, str] = {}
        for mixin in cls.mixins:
            for slot in _mixin_contribution(doc, mixin, set()):
                if slot in first_source and first_source[slot] != mixin:
                    warn(
                        MIXIN_SLOT_SHADOWED,
                        name,
                        f"slot {slot!r} from {mixin!r} is shadowed by {first_source[slot]!r}",
                    )
                else:
                    first_source.setdefault(slot, mixin)

    out.sort(key=lambda v: (v.code, v.element, v.detail))
    return out


def _check_mappings(mappings: list[Mapping], element: str, err) -> None:
    for m in mappings:
        if m.relation not in MAPPING_RELATIONS:
            err(
                INVALID_MAPPING_RELATION,
                element,
                f"mapping relation {m.relation!r} is not one of {MAPPING_RELATIONS}",
            )
        prefix, _, local = m.target.partition(":")
        if not prefix or not local or any(c.isspace() for c in m.target):
            err(MALFORMED_MAPPING_TARGET, element, f"mapping target {m.target!r} is not a CURIE")


def _narrows(doc: SchemaDocument, child: str, parent: str) -> bool:
    """True when ``child`` denotes a subset of ``parent`` for association checks.

    A mixin child narrows a class parent when every instantiable carrier of
    the mixin descends from the parent.
    """
    if child == parent:
        return True
    child_cls = doc.classes.get(child)
    parent_cls = doc.classes.get(parent)
    if child_cls is None or parent_cls is None:
        return False
    if parent_cls.is_mixin:
        return parent in _mixin_reach(doc, child)
    if not child_cls.is_mixin:
        return parent in _chain(doc.classes, child)
    carriers = [
        name
        for name, cls in doc.classes.items()
        if not cls.is_mixin and child in _mixin_reach(doc, name)
    ]
    return all(parent in _chain(doc.classes, c) for c in carriers)


def _mixin_reach(doc: SchemaDocument, start: str) -> set[str]:
    """Mixins reachable from ``start`` through is_a and mixin declarations."""
    reach: set[str] = set()
    stack = [start]
    seen = {start}
    while stack:
        current = stack.pop()
        cls = doc.classes.get(current)
        if cls is None:
            continue
        if cls.is_mixin:
            reach.add(current)
        for nxt in ([cls.is_a] if cls.is_a else []) + list(cls.mixins):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return reach
