import random

import pytest

from kgschema import (
    Curie,
    DanglingEdgeError,
    Edge,
    Node,
    ParseError,
    build_graph,
    close_categories,
    graph_equal,
    graph_stats,
    load_equivalences,
    normalize_graph,
    read_edges,
    read_nodes,
    write_edges,
    write_nodes,
)
from generators import random_graph

NODES_TSV = (
    "id\tcategory\tname\n"
    "NCBIGene:1\tGene\talpha\n"
    "MONDO:2\tDisease\tbeta\n"
)
EDGES_TSV = (
    "subject\tpredicate\tobject\tpublications\n"
    "NCBIGene:1\tgene_associated_with_condition\tMONDO:2\tPMID:1|PMID:2\n"
)


def test_read_demo_fixture_counts(demo_graph):
    assert len(demo_graph.nodes) == 9
    assert len(demo_graph.edges) == 9
    assert demo_graph.dangling_edge_ordinals() == []


def test_read_tsv_basics():
    nodes = read_nodes(NODES_TSV)
    assert [n.id.text for n in nodes] == ["NCBIGene:1", "MONDO:2"]
    assert nodes[0].categories == ["Gene"]
    edges = read_edges(EDGES_TSV)
    assert edges[0].properties["publications"] == ["PMID:1", "PMID:2"]


def test_read_jsonl_and_sniffing():
    text = (
        '{"id": "NCBIGene:1", "category": ["Gene"], "name": "alpha", "symbol": ["A1"]}\n'
        '{"id": "MONDO:2", "category": ["Disease"]}\n'
    )
    nodes = read_nodes(text)
    assert nodes[0].properties == {"symbol": ["A1"]}
    assert nodes[1].name is None
    edge_text = '{"subject": "NCBIGene:1", "predicate": "treats", "object": "MONDO:2"}\n'
    assert read_edges(edge_text)[0].predicate == "treats"


@pytest.mark.parametrize(
    "text",
    [
        "id\tcategory\n",  # wrong header
        "id\tcategory\tname\nNCBIGene:1\tGene\n",  # short row
        "id\tcategory\tname\nNCBI|Gene:1\tGene\tx\n",  # pipe in id
        "id\tcategory\tname\nNCBIGene:1\tGene\ta|b\n",  # pipe in name
        "id\tcategory\tname\nNCBIGene:1\t\tx\n",  # no category
        "id\tcategory\tname\nnot a curie\tGene\tx\n",
    ],
)
def test_read_nodes_rejects_malformed(text):
    with pytest.raises(ParseError):
        read_nodes(text)


def test_read_edges_rejects_pipe_in_core_columns():
    text = "subject\tpredicate\tobject\nA:1\ttreats|affects\tB:2\n"
    with pytest.raises(ParseError):
        read_edges(text)


def test_read_jsonl_rejects_non_array_property():
    with pytest.raises(ParseError):
        read_nodes('{"id": "A:1", "category": ["Gene"], "symbol": "A1"}\n')


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as info:
        read_nodes("id\tcategory\tname\nNCBIGene:1\tGene\tok\nbroken row\tGene\n")
    assert info.value.line == 3


def test_node_merge_unions_categories():
    nodes = [
        Node(Curie("NCBIGene", "1"), ["Gene"], "alpha"),
        Node(Curie("NCBIGene", "1"), ["Protein"], "beta", {"symbol": ["A1"]}),
    ]
    kg = build_graph(nodes, [])
    merged = kg.nodes[Curie("NCBIGene", "1")]
    assert merged.categories == ["Gene", "Protein"]
    assert merged.name == "alpha"  # first seen wins
    assert merged.properties == {"symbol": ["A1"]}


def test_edge_merge_unions_publications():
    edge = lambda pubs: Edge(
        Curie("A", "1"), "treats", Curie("B", "2"), {"publications": [pubs]}
    )
    kg = build_graph(
        [Node(Curie("A", "1"), ["Gene"]), Node(Curie("B", "2"), ["Disease"])],
        [edge("PMID:1"), edge("PMID:2")],
    )
    assert len(kg.edges) == 1
    assert kg.edges[0].properties["publications"] == ["PMID:1", "PMID:2"]


def test_dedup_never_loses_provenance():
    rng = random.Random(77)
    pubs = [f"PMID:{rng.randint(1, 20)}" for _ in range(30)]
    edges = [
        Edge(Curie("A", "1"), "treats", Curie("B", "2"), {"publications": [p]}) for p in pubs
    ]
    kg = build_graph([Node(Curie("A", "1"), ["Gene"]), Node(Curie("B", "2"), ["Disease"])], edges)
    assert set(kg.edges[0].properties["publications"]) == set(pubs)


def test_adjacency_covers_edge_list(demo_graph):
    seen = set()
    for ordinals in demo_graph.out_edges.values():
        seen.update(ordinals)
    assert seen == set(range(len(demo_graph.edges)))
    seen_in = set()
    for ordinals in demo_graph.in_edges.values():
        seen_in.update(ordinals)
    assert seen_in == set(range(len(demo_graph.edges)))
    for node_id, ordinals in demo_graph.out_edges.items():
        assert all(demo_graph.edges[i].subject == node_id for i in ordinals)


def test_dangling_edges_collected_not_fatal():
    edges = [Edge(Curie("A", "1"), "treats", Curie("GONE", "9"))]
    kg = build_graph([Node(Curie("A", "1"), ["Gene"])], edges)
    assert kg.dangling_edge_ordinals() == [0]
    with pytest.raises(DanglingEdgeError):
        build_graph([Node(Curie("A", "1"), ["Gene"])], edges, strict=True)


def test_tsv_jsonl_round_trips(demo_nodes_text, demo_edges_text):
    nodes = read_nodes(demo_nodes_text)
    edges = read_edges(demo_edges_text)
    original = build_graph(nodes, edges)
    for fmt in ("tsv", "jsonl"):
        nodes_rt = read_nodes(write_nodes(nodes, fmt))
        edges_rt = read_edges(write_edges(edges, fmt))
        assert graph_equal(original, build_graph(nodes_rt, edges_rt))


def test_write_rejects_pipe_in_name():
    with pytest.raises(ValueError):
        write_nodes([Node(Curie("A", "1"), ["Gene"], "bad|name")])


def test_normalize_graph_fixed_point(seed_doc, seed_index, demo_graph, demo_equivalences):
    normalized, report = normalize_graph(demo_graph, demo_equivalences, seed_doc, seed_index)
    assert graph_equal(normalized, demo_graph)
    assert report.nodes_merged == 0
    assert report.edges_deduplicated == 0
    assert report.ids_rewritten == 0
    assert report.unknown_ids == len(demo_graph.nodes) - 4  # 4 ids sit in cliques


def test_normalize_graph_merges_clique_members(seed_doc, seed_index):
    table = load_equivalences("Gene\tNCBIGene:23221|HGNC:18756\n")
    disease = Node(Curie("MONDO", "1"), ["Disease"])
    nodes = [
        Node(Curie("HGNC", "18756"), ["Gene"], "by hgnc"),
        Node(Curie("NCBIGene", "23221"), ["Gene"], "by ncbi"),
        disease,
    ]
    edges = [
        Edge(Curie("HGNC", "18756"), "gene_associated_with_condition", Curie("MONDO", "1"),
             {"publications": ["PMID:1"]}),
        Edge(Curie("NCBIGene", "23221"), "gene_associated_with_condition", Curie("MONDO", "1"),
             {"publications": ["PMID:2"]}),
    ]
    kg = build_graph(nodes, edges)
    normalized, report = normalize_graph(kg, table, seed_doc, seed_index)
    gene_nodes = [n for n in normalized.nodes.values() if "Gene" in n.categories]
    assert len(gene_nodes) == 1
    assert gene_nodes[0].id == Curie("NCBIGene", "23221")
    assert len(normalized.edges) == 1
    assert set(normalized.edges[0].properties["publications"]) == {"PMID:1", "PMID:2"}
    assert report.nodes_merged == 1
    assert report.edges_deduplicated == 1
    assert report.ids_rewritten == 1
    assert report.name_conflicts == 1


def _random_table(rng, kg, seed_doc):
    ids = sorted(kg.nodes, key=lambda c: c.text)
    lines = []
    used = set()
    for _ in range(rng.randint(0, 4)):
        pool = [i for i in ids if i not in used]
        if len(pool) < 2:
            break
        members = rng.sample(pool, 2)
        used.update(members)
        lines.append("Gene\t" + "|".join(m.text for m in members))
    return load_equivalences("\n".join(lines) + ("\n" if lines else ""))


def test_normalize_graph_idempotent_on_random_graphs(seed_doc, seed_index):
    rng = random.Random(88)
    for _ in range(100):
        nodes, edges = random_graph(rng, seed_doc, max_nodes=12, max_edges=25)
        kg = build_graph(nodes, edges)
        table = _random_table(rng, kg, seed_doc)
        once, _ = normalize_graph(kg, table, seed_doc, seed_index)
        twice, report = normalize_graph(once, table, seed_doc, seed_index)
        assert graph_equal(once, twice)
        assert report.ids_rewritten == 0


def test_normalize_graph_preserves_reachability(seed_doc, seed_index):
    rng = random.Random(13)
    for _ in range(20):
        nodes, edges = random_graph(rng, seed_doc, max_nodes=10, max_edges=20)
        kg = build_graph(nodes, edges)
        table = _random_table(rng, kg, seed_doc)
        normalized, _ = normalize_graph(kg, table, seed_doc, seed_index)

        def reachable(graph):
            adjacency = {}
            for edge in graph.edges:
                adjacency.setdefault(edge.subject, set()).add(edge.object)
            out = {}
            for start in graph.nodes:
                seen = {start}
                stack = [start]
                while stack:
                    for nxt in adjacency.get(stack.pop(), ()):
                        if nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
                out[start] = seen
            return out

        from kgschema import normalize_curie

        mapping = {i: normalize_curie(table, i, seed_doc, seed_index) for i in kg.nodes}
        before = reachable(kg)
        after = reachable(normalized)
        for a in kg.nodes:
            for b in before[a]:
                assert mapping[b] in after[mapping[a]]


def test_graph_stats_empty():
    report = graph_stats(build_graph([], []))
    assert report.num_nodes == 0 and report.num_edges == 0
    assert report.nodes_by_category == {} and report.edges_by_predicate == {}


def test_graph_stats_demo_tally(demo_graph, seed_index):
    report = graph_stats(demo_graph, seed_index)
    assert report.num_nodes == 9 and report.num_edges == 9
    assert report.nodes_by_category == {
        "Gene": 2,
        "Protein": 1,
        "SmallMolecule": 4,
        "Disease": 1,
        "PhenotypicFeature": 1,
    }
    assert report.edges_by_predicate == {
        "entity_regulates_entity": 1,
        "genetically_interacts_with": 1,
        "interacts_with": 2,
        "negatively_regulates": 1,
        "gene_associated_with_condition": 1,
        "has_phenotype": 1,
        "treats": 1,
        "affects": 1,
    }


def test_graph_stats_invariant_under_row_permutation(
    demo_nodes_text, demo_edges_text, seed_index
):
    rng = random.Random(3)
    header_n, *rows_n = [ln for ln in demo_nodes_text.split("\n") if ln]
    header_e, *rows_e = [ln for ln in demo_edges_text.split("\n") if ln]
    baseline = None
    for _ in range(4):
        rng.shuffle(rows_n)
        rng.shuffle(rows_e)
        kg = build_graph(
            read_nodes("\n".join([header_n] + rows_n) + "\n"),
            read_edges("\n".join([header_e] + rows_e) + "\n"),
        )
        stats = graph_stats(kg, seed_index).as_dict()
        if baseline is None:
            baseline = stats
        assert stats == baseline


def test_close_categories_adds_ancestors(demo_graph, seed_index):
    closed = close_categories(demo_graph, seed_index)
    gene = closed.nodes[Curie("NCBIGene", "23221")]
    assert gene.categories[0] == "Gene"
    assert {"Gene", "GenomicEntity", "BiologicalEntity", "NamedThing"} <= set(gene.categories)
    # idempotent
    assert graph_equal(close_categories(closed, seed_index), closed)


def test_categories_and_values_deduplicated_at_read():
    nodes = read_nodes("id\tcategory\tname\nNCBIGene:1\tGene|Gene|Protein\tx\n")
    assert nodes[0].categories == ["Gene", "Protein"]
    edges = read_edges(
        "subject\tpredicate\tobject\tpublications\nA:1\ttreats\tB:2\tPMID:1|PMID:1\n"
    )
    assert edges[0].properties["publications"] == ["PMID:1"]


def test_crlf_line_endings_accepted():
    text = "id\tcategory\tname\r\nNCBIGene:1\tGene\talpha\r\n"
    nodes = read_nodes(text)
    assert nodes[0].name == "alpha"


def test_duplicate_header_column_rejected():
    with pytest.raises(ParseError):
        read_nodes("id\tcategory\tname\tsymbol\tsymbol\nNCBIGene:1\tGene\tx\ta\tb\n")
