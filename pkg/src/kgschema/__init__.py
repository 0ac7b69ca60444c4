"""Knowledge-graph schema toolkit.

Parse a hierarchical schema of classes, predicates, mixins, and
associations; normalize entity identifiers by preference order; validate
graph nodes and edges against the schema; and answer multi-hop pattern
queries with hierarchy-based predicate and category expansion.
"""

from .errors import (
    DanglingEdgeError,
    DisconnectedQueryError,
    DuplicateNameError,
    EmptyCategorySetError,
    EmptyCliqueError,
    IncomparableCategoriesWarning,
    KgschemaError,
    MalformedCurieError,
    NoMatchingBaseError,
    OverlappingCliquesError,
    ParseError,
    SchemaFormatWarning,
    SchemaNotValidError,
    UndeclaredPrefixError,
    UnknownClassError,
    UnknownPredicateError,
)
from .hierarchy import (
    ClosureIndex,
    build_closure,
    expand_predicates,
    is_subclass_of,
    most_specific_category,
)
from .identifiers import (
    Curie,
    EquivalenceTable,
    contract_iri,
    expand_iri,
    load_equivalences,
    normalize_curie,
    parse_curie,
    preferred_identifier,
)
from .kg_store import (
    Edge,
    KnowledgeGraph,
    Node,
    NormalizationReport,
    StatsReport,
    build_graph,
    close_categories,
    graph_equal,
    graph_stats,
    normalize_graph,
    read_edges,
    read_nodes,
    write_edges,
    write_nodes,
)
from .query import Binding, QueryGraph, expand_query, match, parse_query
from .schema_model import (
    AssociationDefinition,
    ClassDefinition,
    Mapping,
    SchemaDocument,
    SchemaViolation,
    SlotDefinition,
    TypeDefinition,
    effective_slots,
    parse_schema,
    serialize_schema,
    validate_schema,
)
from .validation import ValidationReport, Violation, validate_edge, validate_graph, validate_node

__version__ = "0.1.0"

__all__ = [
    "AssociationDefinition",
    "Binding",
    "ClassDefinition",
    "ClosureIndex",
    "Curie",
    "DanglingEdgeError",
    "DisconnectedQueryError",
    "DuplicateNameError",
    "Edge",
    "EmptyCategorySetError",
    "EmptyCliqueError",
    "EquivalenceTable",
    "IncomparableCategoriesWarning",
    "KgschemaError",
    "KnowledgeGraph",
    "MalformedCurieError",
    "Mapping",
    "Node",
    "NoMatchingBaseError",
    "NormalizationReport",
    "OverlappingCliquesError",
    "ParseError",
    "QueryGraph",
    "SchemaDocument",
    "SchemaFormatWarning",
    "SchemaNotValidError",
    "SchemaViolation",
    "SlotDefinition",
    "StatsReport",
    "TypeDefinition",
    "UndeclaredPrefixError",
    "UnknownClassError",
    "UnknownPredicateError",
    "ValidationReport",
    "Violation",
    "build_closure",
    "build_graph",
    "close_categories",
    "contract_iri",
    "effective_slots",
    "expand_iri",
    "expand_predicates",
    "expand_query",
    "graph_equal",
    "graph_stats",
    "is_subclass_of",
    "load_equivalences",
    "match",
    "most_specific_category",
    "normalize_curie",
    "normalize_graph",
    "parse_curie",
    "parse_query",
    "parse_schema",
    "preferred_identifier",
    "read_edges",
    "read_nodes",
    "serialize_schema",
    "validate_edge",
    "validate_graph",
    "validate_node",
    "validate_schema",
    "write_edges",
    "write_nodes",
]
