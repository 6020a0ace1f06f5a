import io
import random

import pytest

from kgqa.errors import (
    CycleError,
    LinkFailureError,
    SnapshotFormatError,
    TripleParseError,
    UnknownEntityError,
)
from kgqa.kg import (
    EquivalenceRule,
    KnowledgeGraph,
    WeightPolicy,
    apply_entity_types,
    apply_synonyms,
    derive_head_hierarchy,
    expand_equivalence,
    load_triples,
    render_phrase,
)

from oracles import reachable_closure


def kg_from(text, weights=None):
    return load_triples(io.StringIO(text), weights)


class TestLoadTriples:
    def test_single_record(self):
        kg = kg_from("virtuoso\tsupport\tpython\n")
        assert kg.stats() == {"entities": 2, "edges": 1}
        assert kg.has_edge("virtuoso", "support", "python")

    def test_canonicalization(self):
        kg = kg_from("P4V\tis\tcross_platform\n")
        assert set(kg.entities) == {"p4v", "cross_platform"}

    def test_duplicate_lines_collapse(self):
        kg = kg_from("a\tuses\tb\na\tuses\tb\n")
        assert kg.stats()["edges"] == 1

    def test_comments_and_blanks_skipped(self):
        kg = kg_from("# comment\n\na\tuses\tb\n")
        assert kg.stats()["edges"] == 1

    def test_malformed_record_names_line(self):
        with pytest.raises(TripleParseError) as err:
            kg_from("a\tuses\tb\nbroken line\n")
        assert err.value.line_no == 2

    def test_default_weight_applied(self):
        kg = kg_from("a\tuses\tb\n", WeightPolicy(default=0.42))
        assert kg.edges[0].weight == 0.42

    def test_per_predicate_weight(self):
        kg = kg_from("a\tis_a\tb\na\tuses\tc\n",
                     WeightPolicy(default=0.5, per_predicate={"is_a": 0.7}))
        assert kg.edge_between("a", "is_a", "b").weight == 0.7
        assert kg.edge_between("a", "uses", "c").weight == 0.5

    def test_isa_cycle_rejected(self):
        with pytest.raises(CycleError) as err:
            kg_from("a\tis_a\tb\nb\tis_a\tc\nc\tis_a\ta\n")
        assert set(err.value.cycle) >= {"a", "b", "c"}


class TestSynonyms:
    def test_alias_links_to_canonical(self, fixture_kg):
        assert fixture_kg.link_entity("mpmjs") == "npm"

    def test_merge_repoints_edges(self):
        kg = kg_from("object-database\tused_in\tapps\n"
                     "object-oriented-database\tis_a\tdatabase\n")
        apply_synonyms(kg, [("object-database", "object-oriented-database")])
        assert "object-database" not in kg.entities
        assert kg.has_edge("object-oriented-database", "used_in", "apps")
        assert kg.synonym_map["object-database"] == "object-oriented-database"
        assert "object-database" in kg.entities["object-oriented-database"].aliases

    def test_self_pair_is_noop(self, caplog):
        kg = kg_from("npm\tis_a\tpackage_manager\n")
        before = kg.stats()
        apply_synonyms(kg, [("npm", "npm")])
        assert kg.stats() == before

    def test_empty_stream_identity(self):
        kg = kg_from("a\tuses\tb\n")
        before = {e.key() for e in kg.edges}
        apply_synonyms(kg, [])
        assert {e.key() for e in kg.edges} == before

    def test_edge_multiset_preserved_up_to_renaming(self):
        rng = random.Random(7)
        nodes = [f"n{i}" for i in range(12)]
        lines = []
        seen = set()
        while len(lines) < 30:
            s, t = rng.sample(nodes, 2)
            p = rng.choice(["uses", "runs_on", "supports"])
            if (s, p, t) not in seen:
                seen.add((s, p, t))
                lines.append(f"{s}\t{p}\t{t}")
        kg = kg_from("\n".join(lines) + "\n")
        before = {(s if s != "n3" else "n0", p, t if t != "n3" else "n0")
                  for (s, p, t) in seen}
        apply_synonyms(kg, [("n3", "n0")])
        assert {e.key() for e in kg.edges} == before


class TestHeadHierarchy:
    def test_token_suffix_creates_isa(self):
        kg = kg_from(
            "java\tis_a\tobject-oriented_programming_language\n"
            "python\tis_a\tprogramming_language\n")
        added = derive_head_hierarchy(kg)
        assert added == 1
        assert kg.has_edge("object-oriented_programming_language", "is_a",
                           "programming_language")

    def test_single_token_head(self):
        kg = kg_from("red_dog\tbarks_at\tcat\ndog\teats\tfood\n")
        derive_head_hierarchy(kg)
        assert kg.has_edge("red_dog", "is_a", "dog")

    def test_no_suffix_relation(self):
        kg = kg_from("python\tcompetes_with\tjava\n")
        assert derive_head_hierarchy(kg) == 0

    def test_idempotent(self, ):
        kg = kg_from("java\tis_a\tobject-oriented_programming_language\n"
                     "python\tis_a\tprogramming_language\n")
        derive_head_hierarchy(kg)
        assert derive_head_hierarchy(kg) == 0


class TestEquivalence:
    RULE = EquivalenceRule("is", "cross_platform", "run_on",
                           ("microsoft_windows", "linux", "macos"))

    def test_expansion(self):
        kg = kg_from("p4v\tis\tcross_platform\n")
        assert expand_equivalence(kg, [self.RULE]) == 3
        for target in ("microsoft_windows", "linux", "macos"):
            assert kg.has_edge("p4v", "run_on", target)

    def test_vacuous_rule(self):
        kg = kg_from("a\tuses\tb\n")
        assert expand_equivalence(kg, [self.RULE]) == 0

    def test_idempotent(self):
        kg = kg_from("p4v\tis\tcross_platform\n")
        expand_equivalence(kg, [self.RULE])
        assert expand_equivalence(kg, [self.RULE]) == 0


class TestEntityTypes:
    def test_assertions_add_isa_edges(self):
        kg = kg_from("microsoft\twas_founded_by\tbill_gates\n")
        added = apply_entity_types(
            kg, [("microsoft", "organization"), ("bill_gates", "person")])
        assert added == 2
        assert kg.has_edge("microsoft", "is_a", "organization")
        assert kg.has_edge("bill_gates", "is_a", "person")

    def test_empty_stream_identity(self):
        kg = kg_from("a\tuses\tb\n")
        assert apply_entity_types(kg, []) == 0

    def test_unknown_type_rejected(self):
        kg = kg_from("a\tuses\tb\n")
        with pytest.raises(Exception):
            apply_entity_types(kg, [("a", "starship")])


class TestHierarchyQueries:
    def test_superclasses_chain(self, fixture_kg):
        assert fixture_kg.superclasses("sparql") == [
            "rdf_query_language", "query_language"]

    def test_superclasses_empty(self, fixture_kg):
        assert fixture_kg.superclasses("subgraph_extraction") == []

    def test_superclasses_after_head_rule(self, fixture_kg):
        assert "programming_language" in fixture_kg.superclasses(
            "object-oriented_programming_language")

    def test_subclasses_fixture(self, fixture_kg):
        assert fixture_kg.subclasses("graph_database") == [
            "allegrograph", "neo4j", "virtuoso"]

    def test_subclasses_leaf(self, fixture_kg):
        assert fixture_kg.subclasses("virtuoso") == []

    def test_subclasses_two_level(self, fixture_kg):
        assert fixture_kg.subclasses("query_language") == [
            "rdf_query_language", "sparql"]

    def test_unknown_id(self, fixture_kg):
        with pytest.raises(UnknownEntityError):
            fixture_kg.superclasses("not_there")

    @pytest.mark.parametrize("seed", range(5))
    def test_closures_match_bruteforce_oracle(self, seed):
        rng = random.Random(seed)
        n = rng.randint(20, 200)
        nodes = [f"e{i}" for i in range(n)]
        lines = []
        # only edges i -> j with i > j keep is_a acyclic
        for i in range(1, n):
            for _ in range(rng.randint(0, 2)):
                j = rng.randrange(i)
                lines.append(f"e{i}\tis_a\te{j}")
        for _ in range(n):
            a, b = rng.sample(nodes, 2)
            lines.append(f"{a}\trelates_to\t{b}")
        kg = kg_from("\n".join(dict.fromkeys(lines)) + "\n")
        triples = [(e.source, e.predicate, e.target) for e in kg.edges]
        for node in rng.sample(sorted(kg.entities), 10):
            assert set(kg.superclasses(node)) == reachable_closure(
                triples, node, "up")
            assert set(kg.subclasses(node)) == reachable_closure(
                triples, node, "down")

    def test_augmentation_keeps_isa_acyclic(self, fixture_kg):
        fixture_kg.check_isa_acyclic()


class TestLinkEntity:
    def test_plural_phrase(self, fixture_kg):
        assert fixture_kg.link_entity("graph databases") == "graph_database"

    def test_lemma_tokens(self, fixture_kg):
        phrase = [("RDF", "rdf", "NNP"), ("query", "query", "NN"),
                  ("languages", "language", "NNS")]
        assert fixture_kg.link_entity(phrase) == "rdf_query_language"

    def test_unknown_phrase(self, fixture_kg):
        with pytest.raises(LinkFailureError) as err:
            fixture_kg.link_entity("quantum teleporter")
        assert err.value.phrase == "quantum_teleporter"

    def test_every_entity_links_from_rendered_phrase(self, fixture_kg):
        for entity_id in fixture_kg.entities:
            assert fixture_kg.link_entity(render_phrase(entity_id)) == entity_id


class TestSnapshot:
    def test_round_trip(self, tmp_path, fixture_kg):
        path = tmp_path / "kg.json"
        fixture_kg.save(path)
        loaded = KnowledgeGraph.load(path)
        assert set(loaded.entities) == set(fixture_kg.entities)
        assert {e.key() for e in loaded.edges} == {e.key() for e in fixture_kg.edges}
        assert loaded.synonym_map == fixture_kg.synonym_map

    def test_empty_round_trip(self, tmp_path):
        path = tmp_path / "kg.json"
        KnowledgeGraph().save(path)
        loaded = KnowledgeGraph.load(path)
        assert loaded.stats() == {"entities": 0, "edges": 0}

    def test_truncated_file(self, tmp_path, fixture_kg):
        path = tmp_path / "kg.json"
        fixture_kg.save(path)
        path.write_text(path.read_text()[: 50])
        with pytest.raises(SnapshotFormatError):
            KnowledgeGraph.load(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "kg.json"
        path.write_text('{"format": "kgqa-kg", "version": 99}')
        with pytest.raises(SnapshotFormatError):
            KnowledgeGraph.load(path)
