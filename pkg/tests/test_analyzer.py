"""code-analyzer: parsing, call graph, clone scoring, embeddings."""

import math

import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from cochange.analysis import (
    EmbeddingVector,
    ExternalFileEmbeddings,
    TokenHashEmbedder,
    build_call_graph,
    build_snapshot,
    clone_similarity,
    cosine_similarity,
    extract_methods,
    normalized_statement_lines,
    parse_file,
)
from cochange.analysis.clones import clone_similarity_lines
from cochange.errors import CochangeError


def record(source, path="src/main/java/a/b/C.java", name=None):
    methods = extract_methods(path, source)
    if name is None:
        assert len(methods) == 1
        return methods[0]
    return next(m for m in methods if m.name == name)


class TestExtractMethods:
    def test_simple_class(self):
        src = "package a.b;\nclass C { void f(int x) { x++; } }"
        (m,) = extract_methods("a/b/C.java", src)
        assert (m.package, m.type_name, m.name) == ("a.b", "C", "f")
        assert m.params == (("int", "x"),)

    def test_interface_signatures_have_no_records(self):
        src = "interface I { void f(int x); int g(); }"
        assert extract_methods("I.java", src) == []

    def test_default_method_has_a_record(self):
        src = "interface I { default int g() { return 1; } }"
        assert [m.name for m in extract_methods("I.java", src)] == ["g"]

    def test_test_flag_from_path_segment(self):
        src = "package a;\nclass Helper { void run() { go(); } }"
        (m,) = extract_methods("src/test/java/a/Helper.java", src)
        assert m.is_test
        (m,) = extract_methods("src/main/java/a/Helper.java", src)
        assert not m.is_test

    def test_test_flag_from_name_prefix(self):
        src = "class FooTest { void testThing() { check(); } void other() { x(); } }"
        methods = {m.name: m for m in extract_methods("src/main/java/FooTest.java", src)}
        assert methods["testThing"].is_test
        assert not methods["other"].is_test  # type prefix is Test*, FooTest is not

        src2 = "class TestFoo { void other() { x(); } }"
        (m,) = extract_methods("src/main/java/TestFoo.java", src2)
        assert m.is_test

    def test_constructor_and_overloads(self):
        src = """
        class C {
            C() { init(); }
            void f(int a) { g(); }
            void f(String a) { g(); }
        }
        """
        methods = extract_methods("C.java", src)
        assert [(m.name, m.param_types) for m in methods] == [
            ("C", ()), ("f", ("int",)), ("f", ("String",)),
        ]
        assert len({m.method_id for m in methods}) == 3

    def test_nested_and_anonymous_attribution(self):
        src = """
        class Outer {
            class Inner { void inner() { a(); } }
            Runnable r = new Runnable() { public void run() { b(); } };
            void outer() { c(); }
        }
        """
        methods = {m.name: m.type_name for m in extract_methods("O.java", src)}
        assert methods == {"inner": "Inner", "run": "Outer", "outer": "Outer"}

    def test_generic_parameters(self):
        src = "class C { <T> T pick(java.util.Map<String, T> m, int i) { return null; } }"
        (m,) = extract_methods("C.java", src)
        assert m.params == (("java.util.Map<String,T>", "m"), ("int", "i"))

    def test_varargs_and_arrays(self):
        src = "class C { void f(String... parts, int[] xs, int ys[]) { g(); } }"
        (m,) = extract_methods("C.java", src)
        assert m.params == (("String[]", "parts"), ("int[]", "xs"), ("int[]", "ys"))

    def test_line_span_contains_body(self):
        src = "class C {\n    void f() {\n        a();\n    }\n}\n"
        (m,) = extract_methods("C.java", src)
        assert m.line_span == (2, 4)

    def test_parse_failure_returns_empty(self):
        assert extract_methods("C.java", None) == []  # type: ignore[arg-type]

    def test_control_blocks_are_not_methods(self):
        src = """
        class C {
            void f(int x) {
                if (x > 0) { a(); }
                for (int i = 0; i < x; i++) { b(); }
                while (x > 0) { x--; }
                switch (x) { case 1: break; }
                try { c(); } catch (Exception e) { d(); } finally { e(); }
                synchronized (this) { f(); }
                Runnable r = () -> { g(); };
            }
        }
        """
        assert [m.name for m in extract_methods("C.java", src)] == ["f"]

    def test_braces_in_strings_and_comments(self):
        src = 'class C { void f() { a("}{"); /* } */ } void g() { b(); } }'
        assert [m.name for m in extract_methods("C.java", src)] == ["f", "g"]

    def test_supers_from_extends_and_implements(self):
        src = "class C extends Base implements Runnable, Comparable<C> { void f() { a(); } }"
        (m,) = extract_methods("C.java", src)
        assert m.superclasses == ("Base", "Runnable", "Comparable")

    def test_type_parameter_bounds_do_not_shadow_extends(self):
        src = ("class D<T extends Comparable<? super T>> extends AbstractList<T> "
               "implements RandomAccess { T get(int i) { return null; } }")
        (m,) = extract_methods("D.java", src)
        assert m.superclasses == ("AbstractList", "RandomAccess")

    def test_transitive_hierarchy_in_snapshot(self):
        files = {
            "A.java": "class A { void fa() { x(); } }",
            "B.java": "class B extends A { void fb() { x(); } }",
            "C.java": "class C extends B { void fc() { x(); } }",
            "D.java": "class D extends Object { void fd() { x(); } }",
        }
        snapshot = build_snapshot(files)
        chains = {m.name: m.superclasses for m in snapshot.methods.values()}
        assert chains["fc"] == ("B", "A")
        assert chains["fb"] == ("A",)
        assert chains["fd"] == ()  # universal root excluded


class TestCallGraph:
    def test_counts_call_sites(self):
        files = {
            "C.java": """
            class C {
                void f() { g(); g(); }
                void g() { }
            }
            """,
        }
        methods = extract_methods("C.java", files["C.java"])
        edges = build_call_graph(methods)
        assert len(edges) == 1
        edge = edges[0]
        f = next(m.method_id for m in methods if m.name == "f")
        g = next(m.method_id for m in methods if m.name == "g")
        assert (edge.caller, edge.callee, edge.count) == (f, g, 2)

    def test_library_calls_make_no_edges(self):
        methods = extract_methods("C.java", "class C { void f() { System.out.println(1); } }")
        assert build_call_graph(methods) == []

    def test_arity_matches_both_overloads(self):
        src = """
        class C {
            void f(Object x) { g(x); }
            void g(int a) { }
            void g(String a) { }
        }
        """
        methods = extract_methods("C.java", src)
        edges = build_call_graph(methods)
        callees = {e.callee for e in edges}
        expected = {m.method_id for m in methods if m.name == "g"}
        assert callees == expected
        assert all(e.count == 1 for e in edges)

    def test_no_self_edges(self):
        methods = extract_methods("C.java", "class C { void f() { f(); } }")
        assert build_call_graph(methods) == []

    def test_closed_world_endpoints(self):
        files = {
            "A.java": "class A { void fa() { fb(); helper(1); } }",
            "B.java": "class B { void fb() { fa(); } void helper(int x) { } }",
        }
        snapshot = build_snapshot(files)
        ids = set(snapshot.methods)
        for (a, b) in snapshot.call_counts:
            assert a in ids and b in ids

    def test_symmetric_dependency_count(self):
        files = {
            "A.java": "class A { void fa() { fb(); } }",
            "B.java": "class B { void fb() { fa(); fa(); } }",
        }
        snapshot = build_snapshot(files)
        fa = next(m for m in snapshot.methods.values() if m.name == "fa").method_id
        fb = next(m for m in snapshot.methods.values() if m.name == "fb").method_id
        assert snapshot.code_dependency(fa, fb) == 3
        assert snapshot.code_dependency(fb, fa) == 3


def _lcs_bruteforce(a, b):
    """Independent LCS oracle: textbook recursion with memoization."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


class TestClones:
    def test_identical_methods_score_100(self):
        src = "class C { int f(int x) { int y = x + 1; return y * 2; } }"
        m = record(src)
        assert clone_similarity(m, m) == 100.0

    def test_renamed_identifiers_still_identical(self):
        a = record("class C { int f(int count) { int total = count + 1; return total; } }")
        b = record("class D { int g(int n) { int acc = n + 1; return acc; } }", path="D.java")
        assert clone_similarity(a, b) == 100.0

    def test_disjoint_bodies_score_0(self):
        a = record("class C { void f() { alpha(); beta(); gamma(); } }")
        b = record("class D { int g(int x) { if (x > 0) { return x; } return 0; } }", path="D.java")
        assert clone_similarity(a, b) == 0.0

    def test_below_near_miss_threshold_reports_zero(self):
        # 2 of 4 normalized lines in common -> 50 < 70 -> clipped to 0
        a = record("class C { void f() { v = 1; f(v); g(); return v; } }")
        b = record("class D { void g() { v = 1; f(v); while (v) { h(v, v); } } }", path="D.java")
        lines_a = normalized_statement_lines(a.body_source)
        lines_b = normalized_statement_lines(b.body_source)
        assert _lcs_bruteforce(lines_a, lines_b) == 2
        assert clone_similarity(a, b) == 0.0

    # statements with pairwise-distinct normalized shapes
    _SHARED = ["a = 1;", "b(a);", "c();", "return a;",
               "e = a + 1;", "f = g + h;", "n++;", "throw o;"]

    def test_eight_of_ten_lines_scores_80(self):
        body_a = " ".join(self._SHARED + ["p--;", "q = r * 2;"])
        body_b = " ".join(self._SHARED + ["s(t, u);", "x[0] = 9;"])
        a = record("class C { void f() { %s } }" % body_a)
        b = record("class D { void g() { %s } }" % body_b, path="D.java")
        lines_a = normalized_statement_lines(a.body_source)
        lines_b = normalized_statement_lines(b.body_source)
        assert len(lines_a) == len(lines_b) == 10
        assert _lcs_bruteforce(lines_a, lines_b) == 8
        assert clone_similarity(a, b) == 80.0

    def test_empty_body_scores_zero(self):
        a = record("class C { void f() { } }")
        b = record("class D { void g() { a(); } }", path="D.java")
        assert clone_similarity(a, b) == 0.0
        assert clone_similarity(a, a) == 0.0

    def test_matches_bruteforce_oracle_on_random_pairs(self):
        import random

        rng = random.Random(1234)
        vocab = [f"s{i}();" for i in range(6)]
        for _ in range(50):
            la = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 12)))
            lb = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 12)))
            expected = 100.0 * _lcs_bruteforce(la, lb) / max(len(la), len(lb))
            if expected < 70.0:
                expected = 0.0
            assert clone_similarity_lines(la, lb) == pytest.approx(expected)

    @given(st.lists(st.sampled_from(["a ;", "b ;", "c ;"]), min_size=1, max_size=10),
           st.lists(st.sampled_from(["a ;", "b ;", "c ;"]), min_size=1, max_size=10))
    @settings(max_examples=60, deadline=None)
    def test_symmetry(self, la, lb):
        assert clone_similarity_lines(tuple(la), tuple(lb)) == clone_similarity_lines(tuple(lb), tuple(la))

    def test_hundred_implies_equal_lines(self):
        # score 100 requires LCS == len(a) == len(b), i.e. identical sequences
        a = ("x ;", "y ;")
        b = ("x ;", "y ;")
        assert clone_similarity_lines(a, b) == 100.0
        assert clone_similarity_lines(a, ("x ;", "z ;")) < 100.0


class TestEmbeddings:
    def _methods(self):
        files = {
            "A.java": "class A { void loadConfig() { parseConfigFile(); readEntries(); } }",
            "B.java": "class B { void loadConfig() { parseConfigFile(); readEntries(); } }",
            "C.java": "class C { int totalCount(int[] xs) { return xs.length; } }",
        }
        methods = []
        for path, src in sorted(files.items()):
            methods.extend(extract_methods(path, src))
        return methods

    def test_identical_sources_identical_vectors(self):
        methods = self._methods()
        embedder = TokenHashEmbedder(methods)
        va = embedder.embed(methods[0])
        vb = embedder.embed(methods[1])
        assert va.values == vb.values
        assert cosine_similarity(va, vb) == pytest.approx(1.0, abs=1e-9)

    def test_unit_norm(self):
        methods = self._methods()
        embedder = TokenHashEmbedder(methods)
        for m in methods:
            vec = embedder.embed(m)
            norm = math.sqrt(sum(v * v for v in vec.values))
            assert norm == pytest.approx(1.0, abs=1e-9)

    def test_self_similarity_is_one(self):
        methods = self._methods()
        embedder = TokenHashEmbedder(methods)
        for m in methods:
            v = embedder.embed(m)
            assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-9)

    def test_cosine_hand_example(self):
        u = EmbeddingVector("u", (1.0, 1.0, 0.0), "external-file")
        v = EmbeddingVector("v", (1.0, 0.0, 1.0), "external-file")
        assert cosine_similarity(u, v) == pytest.approx(0.5)

    def test_cosine_orthogonal(self):
        u = EmbeddingVector("u", (1.0, 0.0), "external-file")
        v = EmbeddingVector("v", (0.0, 1.0), "external-file")
        assert cosine_similarity(u, v) == 0.0

    def test_cosine_zero_norm_defined_as_zero(self):
        u = EmbeddingVector("u", (0.0, 0.0), "external-file")
        v = EmbeddingVector("v", (1.0, 0.0), "external-file")
        assert cosine_similarity(u, v) == 0.0

    def test_cosine_rejects_mixed_providers(self):
        u = EmbeddingVector("u", (1.0,), "external-file")
        v = EmbeddingVector("v", (1.0,), "token-hash-fallback")
        with pytest.raises(CochangeError):
            cosine_similarity(u, v)

    def test_external_file_roundtrip(self, tmp_path):
        path = tmp_path / "embeddings.jsonl"
        path.write_text(
            '{"method_id": "X", "values": [0.5, 0.5, 0.70710678]}\n'
            '{"method_id": "Y", "values": [1.0, 0.0, 0.0]}\n'
        )
        provider = ExternalFileEmbeddings.load(path)
        methods = self._methods()
        missing = methods[0]
        with pytest.raises(CochangeError, match=missing.method_id):
            provider.embed(missing)
        assert provider.dim == 3

    def test_external_vector_returned_verbatim(self, tmp_path):
        import json

        method = self._methods()[0]
        stored = [round(0.001 * i, 6) for i in range(768)]
        path = tmp_path / "embeddings.jsonl"
        path.write_text(json.dumps({"method_id": method.method_id, "values": stored}) + "\n")
        provider = ExternalFileEmbeddings.load(path)
        vector = provider.embed(method)
        assert list(vector.values) == stored
        assert vector.provider == "external-file"

    def test_external_file_rejects_ragged_vectors(self, tmp_path):
        path = tmp_path / "embeddings.jsonl"
        path.write_text('{"method_id": "X", "values": [1.0]}\n{"method_id": "Y", "values": [1.0, 2.0]}\n')
        with pytest.raises(CochangeError):
            ExternalFileEmbeddings.load(path)
