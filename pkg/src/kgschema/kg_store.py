"""In-memory knowledge graph with TSV/JSONL ingestion and normalization.

Nodes are deduplicated by identifier and edges by their core triple;
property values merge by order-preserving union so provenance is never
dropped. The tabular format uses ``|`` to separate multiple values in a
cell, with no escaping: a literal ``|`` in a single-valued cell is a syntax
error.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .errors import DanglingEdgeError, ParseError
from .hierarchy import ClosureIndex, minimal_categories
from .identifiers import Curie, EquivalenceTable, MalformedCurieError, normalize_curie, parse_curie
from .schema_model import SchemaDocument

NODE_COLUMNS = ("id", "category", "name")
EDGE_COLUMNS = ("subject", "predicate", "object")


@dataclass(slots=True)
class Node:
    id: Curie
    categories: list[str]
    name: str | None = None
    properties: dict[str, list[str]] = field(default_factory=dict)


@dataclass(slots=True)
class Edge:
    subject: Curie
    predicate: str
    object: Curie
    properties: dict[str, list[str]] = field(default_factory=dict)

    def key(self) -> tuple[Curie, str, Curie]:
        return (self.subject, self.predicate, self.object)


@dataclass
class KnowledgeGraph:
    """Node map plus edge list with adjacency indexes over edge ordinals."""

    nodes: dict[Curie, Node] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    out_edges: dict[Curie, list[int]] = field(default_factory=dict)
    in_edges: dict[Curie, list[int]] = field(default_factory=dict)

    def dangling_edge_ordinals(self) -> list[int]:
        return [
            ordinal
            for ordinal, edge in enumerate(self.edges)
            if edge.subject not in self.nodes or edge.object not in self.nodes
        ]


@dataclass
class NormalizationReport:
    nodes_merged: int = 0
    edges_deduplicated: int = 0
    ids_rewritten: int = 0
    unknown_ids: int = 0
    name_conflicts: int = 0


@dataclass
class StatsReport:
    num_nodes: int
    num_edges: int
    nodes_by_category: dict[str, int]
    edges_by_predicate: dict[str, int]

    def as_dict(self) -> dict:
        return {
            "nodes": self.num_nodes,
            "edges": self.num_edges,
            "nodes_by_category": dict(sorted(self.nodes_by_category.items())),
            "edges_by_predicate": dict(sorted(self.edges_by_predicate.items())),
        }


# ---------------------------------------------------------------------------
# Reading


def _sniff_format(source_text: str) -> str:
    stripped = source_text.lstrip()
    return "jsonl" if stripped.startswith("{") else "tsv"


def _split_cell(cell: str) -> list[str]:
    if "|" not in cell:
        return [cell] if cell else []
    # Order-preserving dedup: merged cells have union semantics.
    return list(dict.fromkeys(v for v in cell.split("|") if v))


def _curie_cache_get(cache: dict[str, Curie], text: str, line: int) -> Curie:
    curie = cache.get(text)
    if curie is None:
        try:
            curie = parse_curie(text)
        except MalformedCurieError as exc:
            raise ParseError(str(exc), line, 1) from exc
        cache[text] = curie
    return curie


def _tsv_header(source_text: str, leading: tuple[str, ...], what: str):
    lines = source_text.split("\n")
    if not lines or not lines[0].strip():
        raise ParseError(f"missing {what} header", 1, 1)
    header = lines[0].rstrip("\r").split("\t")
    if tuple(header[: len(leading)]) != leading:
        raise ParseError(
            f"{what} header must start with {list(leading)}, got {header[: len(leading)]}", 1, 1
        )
    if len(set(header)) != len(header):
        duplicate = next(name for name in header if header.count(name) > 1)
        raise ParseError(f"duplicate column {duplicate!r} in {what} header", 1, 1)
    return lines, header, header[len(leading):]


def read_nodes(source_text: str, fmt: str | None = None) -> list[Node]:
    """Parse nodes from TSV or JSONL text; the format is sniffed when unset."""
    fmt = fmt or _sniff_format(source_text)
    if fmt == "jsonl":
        return _read_nodes_jsonl(source_text)
    lines, header, extras = _tsv_header(source_text, NODE_COLUMNS, "nodes")
    width = len(header)
    cache: dict[str, Curie] = {}
    nodes = []
    for number, raw in enumerate(lines[1:], start=2):
        row = raw.rstrip("\r")
        if not row:
            continue
        cells = row.split("\t")
        if len(cells) != width:
            raise ParseError(f"expected {width} columns, got {len(cells)}", number, 1)
        if "|" in cells[0]:
            raise ParseError("literal '|' in single-valued column 'id'", number, 1)
        node_id = _curie_cache_get(cache, cells[0], number)
        categories = _split_cell(cells[1])
        if not categories:
            raise ParseError("node has no categories", number, 1)
        name = cells[2]
        if "|" in name:
            raise ParseError("literal '|' in single-valued column 'name'", number, 1)
        properties = {}
        for column, cell in zip(extras, cells[3:]):
            if cell:
                properties[column] = _split_cell(cell)
        nodes.append(Node(node_id, categories, name or None, properties))
    return nodes


def read_edges(source_text: str, fmt: str | None = None) -> list[Edge]:
    """Parse edges from TSV or JSONL text; the format is sniffed when unset."""
    fmt = fmt or _sniff_format(source_text)
    if fmt == "jsonl":
        return _read_edges_jsonl(source_text)
    lines, header, extras = _tsv_header(source_text, EDGE_COLUMNS, "edges")
    width = len(header)
    cache: dict[str, Curie] = {}
    edges = []
    for number, raw in enumerate(lines[1:], start=2):
        row = raw.rstrip("\r")
        if not row:
            continue
        cells = row.split("\t")
        if len(cells) != width:
            raise ParseError(f"expected {width} columns, got {len(cells)}", number, 1)
        subject_text, predicate, object_text = cells[0], cells[1], cells[2]
        if "|" in subject_text or "|" in predicate or "|" in object_text:
            raise ParseError(
                "literal '|' in single-valued column 'subject', 'predicate', or 'object'",
                number,
                1,
            )
        if not predicate:
            raise ParseError("empty predicate", number, 1)
        subject = _curie_cache_get(cache, subject_text, number)
        obj = _curie_cache_get(cache, object_text, number)
        properties = {}
        for column, cell in zip(extras, cells[3:]):
            if cell:
                properties[column] = _split_cell(cell)
        edges.append(Edge(subject, predicate, obj, properties))
    return edges


def _jsonl_objects(source_text: str, what: str):
    for number, raw in enumerate(source_text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", number, exc.colno) from exc
        if not isinstance(obj, dict):
            raise ParseError(f"each {what} line must be a JSON object", number, 1)
        yield number, obj


def _json_string(obj: dict, key: str, line: int) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ParseError(f"{key!r} must be a nonempty string", line, 1)
    return value


def _json_values(value, key: str, line: int) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"{key!r} must be an array of strings", line, 1)
    return list(dict.fromkeys(v for v in value if v))


def _read_nodes_jsonl(source_text: str) -> list[Node]:
    cache: dict[str, Curie] = {}
    nodes = []
    for number, obj in _jsonl_objects(source_text, "node"):
        node_id = _curie_cache_get(cache, _json_string(obj, "id", number), number)
        categories = _json_values(obj.get("category"), "category", number)
        if not categories:
            raise ParseError("node has no categories", number, 1)
        name = obj.get("name")
        if name is not None and not isinstance(name, str):
            raise ParseError("'name' must be a string", number, 1)
        properties = {}
        for key in sorted(obj):
            if key in ("id", "category", "name"):
                continue
            values = _json_values(obj[key], key, number)
            if values:
                properties[key] = values
        nodes.append(Node(node_id, categories, name or None, properties))
    return nodes


def _read_edges_jsonl(source_text: str) -> list[Edge]:
    cache: dict[str, Curie] = {}
    edges = []
    for number, obj in _jsonl_objects(source_text, "edge"):
        subject = _curie_cache_get(cache, _json_string(obj, "subject", number), number)
        predicate = _json_string(obj, "predicate", number)
        obj_id = _curie_cache_get(cache, _json_string(obj, "object", number), number)
        properties = {}
        for key in sorted(obj):
            if key in ("subject", "predicate", "object"):
                continue
            values = _json_values(obj[key], key, number)
            if values:
                properties[key] = values
        edges.append(Edge(subject, predicate, obj_id, properties))
    return edges


# ---------------------------------------------------------------------------
# Writing


def _check_single(value: str, column: str) -> str:
    if "|" in value:
        raise ValueError(f"value in single-valued column {column!r} contains '|': {value!r}")
    return value


def write_nodes(nodes: list[Node], fmt: str = "tsv") -> str:
    """Serialize nodes; extra property columns appear sorted by name."""
    if fmt == "jsonl":
        lines = []
        for node in nodes:
            obj: dict = {"id": node.id.text, "category": list(node.categories)}
            if node.name is not None:
                obj["name"] = node.name
            for key in sorted(node.properties):
                obj[key] = list(node.properties[key])
            lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")
    extras = sorted({key for node in nodes for key in node.properties})
    out = ["\t".join(NODE_COLUMNS + tuple(extras))]
    for node in nodes:
        cells = [
            _check_single(node.id.text, "id"),
            "|".join(node.categories),
            _check_single(node.name or "", "name"),
        ]
        cells.extend("|".join(node.properties.get(key, [])) for key in extras)
        out.append("\t".join(cells))
    return "\n".join(out) + "\n"


def write_edges(edges: list[Edge], fmt: str = "tsv") -> str:
    """Serialize edges; extra property columns appear sorted by name."""
    if fmt == "jsonl":
        lines = []
        for edge in edges:
            obj: dict = {
                "subject": edge.subject.text,
                "predicate": edge.predicate,
                "object": edge.object.text,
            }
            for key in sorted(edge.properties):
                obj[key] = list(edge.properties[key])
            lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")
    extras = sorted({key for edge in edges for key in edge.properties})
    out = ["\t".join(EDGE_COLUMNS + tuple(extras))]
    for edge in edges:
        cells = [
            _check_single(edge.subject.text, "subject"),
            _check_single(edge.predicate, "predicate"),
            _check_single(edge.object.text, "object"),
        ]
        cells.extend("|".join(edge.properties.get(key, [])) for key in extras)
        out.append("\t".join(cells))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Graph construction


def _merge_values(target: list[str], extra: list[str]) -> None:
    seen = set(target)
    for value in extra:
        if value not in seen:
            seen.add(value)
            target.append(value)


def _merge_properties(target: dict[str, list[str]], extra: dict[str, list[str]]) -> None:
    for key, values in extra.items():
        if key in target:
            _merge_values(target[key], values)
        else:
            target[key] = list(values)


def _copy_node(node: Node) -> Node:
    return Node(
        node.id,
        list(node.categories),
        node.name,
        {key: list(values) for key, values in node.properties.items()},
    )


def _copy_edge(edge: Edge) -> Edge:
    return Edge(
        edge.subject,
        edge.predicate,
        edge.object,
        {key: list(values) for key, values in edge.properties.items()},
    )


def _merge_nodes(nodes: list[Node], report: NormalizationReport | None = None) -> dict[Curie, Node]:
    # Stored objects alias the input until a merge forces a private copy.
    merged: dict[Curie, Node] = {}
    owned: set[Curie] = set()
    for node in nodes:
        existing = merged.get(node.id)
        if existing is None:
            merged[node.id] = node
            continue
        if node.id not in owned:
            existing = _copy_node(existing)
            merged[node.id] = existing
            owned.add(node.id)
        _merge_values(existing.categories, node.categories)
        if existing.name is None:
            existing.name = node.name
        elif node.name is not None and node.name != existing.name and report is not None:
            report.name_conflicts += 1
        _merge_properties(existing.properties, node.properties)
    return merged


def _merge_edges(edges: list[Edge]) -> list[Edge]:
    merged: dict[tuple[Curie, str, Curie], Edge] = {}
    owned: set[tuple[Curie, str, Curie]] = set()
    for edge in edges:
        key = edge.key()
        existing = merged.get(key)
        if existing is None:
            merged[key] = edge
            continue
        if key not in owned:
            existing = _copy_edge(existing)
            merged[key] = existing
            owned.add(key)
        _merge_properties(existing.properties, edge.properties)
    return list(merged.values())


def build_graph(nodes: list[Node], edges: list[Edge], *, strict: bool = False) -> KnowledgeGraph:
    """Assemble a graph, merging duplicate nodes and duplicate core triples.

    Category and property values merge by union; the first-seen name wins.
    Edges referencing absent nodes are kept (validation reports them) unless
    ``strict``, which raises :class:`DanglingEdgeError`. The graph takes
    ownership of the given nodes and edges; callers must not mutate them
    afterwards.
    """
    kg = KnowledgeGraph(nodes=_merge_nodes(nodes), edges=_merge_edges(edges))
    for ordinal, edge in enumerate(kg.edges):
        kg.out_edges.setdefault(edge.subject, []).append(ordinal)
        kg.in_edges.setdefault(edge.object, []).append(ordinal)
    if strict:
        dangling = kg.dangling_edge_ordinals()
        if dangling:
            first = kg.edges[dangling[0]]
            raise DanglingEdgeError(
                f"{len(dangling)} edge(s) reference absent nodes, e.g. "
                f"{first.subject.text} -{first.predicate}-> {first.object.text}"
            )
    return kg


def close_categories(kg: KnowledgeGraph, index: ClosureIndex) -> KnowledgeGraph:
    """Return a graph whose node categories are closed under class ancestors.

    Unknown category names are kept as-is; ancestors are appended in
    nearest-first order after the declared categories.
    """
    closed_nodes = []
    for node in kg.nodes.values():
        categories = list(node.categories)
        for category in node.categories:
            for ancestor in index.class_ancestors.get(category, []):
                if ancestor not in categories:
                    categories.append(ancestor)
        closed_nodes.append(
            Node(node.id, categories, node.name, {k: list(v) for k, v in node.properties.items()})
        )
    return build_graph(closed_nodes, [
        Edge(e.subject, e.predicate, e.object, {k: list(v) for k, v in e.properties.items()})
        for e in kg.edges
    ])


def normalize_graph(
    kg: KnowledgeGraph,
    table: EquivalenceTable,
    doc: SchemaDocument,
    index: ClosureIndex,
) -> tuple[KnowledgeGraph, NormalizationReport]:
    """Rewrite every identifier to its preferred form and re-merge.

    Nodes that normalize to the same identifier are merged; edges are
    rewritten to normalized endpoints and re-deduplicated by core triple.
    Identifiers outside every clique pass through unchanged and are counted.
    The result may share node and edge objects with the input graph; both
    are immutable by contract.
    """
    report = NormalizationReport()
    mapping: dict[Curie, Curie] = {}

    def resolve(curie: Curie) -> Curie:
        normalized = mapping.get(curie)
        if normalized is None:
            normalized = normalize_curie(table, curie, doc, index)
            mapping[curie] = normalized
            if table.clique_of(curie) is None:
                report.unknown_ids += 1
            elif normalized != curie:
                report.ids_rewritten += 1
        return normalized

    for node_id in kg.nodes:
        resolve(node_id)
    for edge in kg.edges:
        resolve(edge.subject)
        resolve(edge.object)
    if report.ids_rewritten == 0:
        # Fixed point: nothing to rewrite or merge.
        return kg, report

    new_nodes = []
    for node in kg.nodes.values():
        normalized = mapping[node.id]
        if normalized == node.id:
            new_nodes.append(node)
        else:
            copied = _copy_node(node)
            copied.id = normalized
            new_nodes.append(copied)
    new_edges = []
    for edge in kg.edges:
        subject = mapping[edge.subject]
        obj = mapping[edge.object]
        if subject == edge.subject and obj == edge.object:
            new_edges.append(edge)
        else:
            copied = _copy_edge(edge)
            copied.subject = subject
            copied.object = obj
            new_edges.append(copied)
    merged_nodes = _merge_nodes(new_nodes, report)
    merged_edges = _merge_edges(new_edges)
    report.nodes_merged = len(kg.nodes) - len(merged_nodes)
    report.edges_deduplicated = len(kg.edges) - len(merged_edges)
    normalized = KnowledgeGraph(nodes=merged_nodes, edges=merged_edges)
    for ordinal, edge in enumerate(normalized.edges):
        normalized.out_edges.setdefault(edge.subject, []).append(ordinal)
        normalized.in_edges.setdefault(edge.object, []).append(ordinal)
    return normalized, report


def graph_stats(kg: KnowledgeGraph, index: ClosureIndex | None = None) -> StatsReport:
    """Node and edge counts, bucketed by most specific category and predicate.

    Without a closure index the first declared category buckets the node;
    nodes with no known category fall back the same way.
    """
    by_category: Counter[str] = Counter()
    for node in kg.nodes.values():
        bucket = node.categories[0]
        if index is not None:
            known = {c for c in node.categories if c in index.class_ancestors}
            if known:
                bucket = minimal_categories(index, known)[0]
        by_category[bucket] += 1
    by_predicate: Counter[str] = Counter()
    for edge in kg.edges:
        by_predicate[edge.predicate] += 1
    return StatsReport(
        num_nodes=len(kg.nodes),
        num_edges=len(kg.edges),
        nodes_by_category=dict(by_category),
        edges_by_predicate=dict(by_predicate),
    )


def graph_equal(a: KnowledgeGraph, b: KnowledgeGraph) -> bool:
    """Equality on node set, deduplicated edge set, and property maps.

    Category order and property-value order are not significant.
    """

    def node_key(node: Node):
        return (
            frozenset(node.categories),
            node.name,
            frozenset((k, frozenset(v)) for k, v in node.properties.items()),
        )

    if set(a.nodes) != set(b.nodes):
        return False
    for node_id, node in a.nodes.items():
        if node_key(node) != node_key(b.nodes[node_id]):
            return False

    def edge_map(kg: KnowledgeGraph):
        return {
            edge.key(): frozenset((k, frozenset(v)) for k, v in edge.properties.items())
            for edge in kg.edges
        }

    return edge_map(a) == edge_map(b)
