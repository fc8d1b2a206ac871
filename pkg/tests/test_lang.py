import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modgen.lang import (
    Arm,
    BranchGoalId,
    CheckError,
    ParseError,
    enumerate_branch_goals,
    load_program,
    parse_program,
    print_program,
)
from modgen.lang import ast as A

from conftest import CORPUS


class TestParse:
    def test_empty_class_gets_default_constructor(self):
        prog = parse_program("class A { }")
        (cls,) = prog.classes
        assert cls.name == "A"
        assert cls.fields == []
        assert len(cls.constructors) == 1
        assert cls.constructors[0].synthesized
        assert cls.constructors[0].params == []

    def test_syntax_error_reports_line_and_column(self):
        with pytest.raises(ParseError) as exc:
            parse_program("class A {\n  int f = \n}")
        (d,) = exc.value.diagnostics
        assert (d.line, d.col) == (2, 9)
        assert d.format("a.moo") == "a.moo:2:9: expected ';' but found '='"

    def test_duplicate_class(self):
        with pytest.raises(ParseError, match="duplicate class A"):
            parse_program("class A { } class A { }")

    def test_visibility_defaults(self):
        prog = parse_program("class A { int f; public int g; int m() { return f; } private void n() { } }")
        cls = prog.classes[0]
        assert [f.public for f in cls.fields] == [False, True]
        assert [m.public for m in cls.methods] == [True, False]

    def test_consistency_round_trip(self, consistency):
        ast = consistency.program
        names = [m.name for m in ast.cls("Consistency").methods]
        assert names == ["setType", "setName", "checkConsistency"]
        assert parse_program(print_program(ast)) == ast

    @pytest.mark.parametrize("path", sorted(CORPUS.glob("*.moo")), ids=lambda p: p.stem)
    def test_corpus_round_trips(self, path):
        ast = parse_program(path.read_text())
        assert parse_program(print_program(ast)) == ast

    def test_negative_literal_is_folded(self):
        prog = parse_program("class A { int m() { return -5; } }")
        ret = prog.classes[0].methods[0].body[0]
        assert ret.value == A.IntLit(-5)

    def test_else_if_chain(self):
        src = "class A { int m(int x) { if (x < 0) { return 0; } else if (x < 5) { return 1; } else { return 2; } } }"
        ast = parse_program(src)
        assert parse_program(print_program(ast)) == ast
        assert "} else if (x < 5) {" in print_program(ast)


class TestTypecheck:
    def test_consistency_checks_clean(self, consistency):
        assert consistency.cls("Consistency").method("checkConsistency") is not None

    @pytest.mark.parametrize(
        "src, message",
        [
            ("class A { void m() { foo(); } }", "unknown method foo/0"),
            ("class A { void m() { if (1 + 2) { } } }", "predicate must be Bool"),
            ("class A { void v() { } int m() { return v(); } }", "void used as value"),
            ("class A { int m() { return q; } }", "unknown variable q"),
            ("class A { int m() { return true; } }", "expected int"),
            ("class A { B b; }", "unknown class B"),
        ],
    )
    def test_diagnostics(self, src, message):
        with pytest.raises(CheckError) as exc:
            load_program(src)
        text = "\n".join(d.message for d in exc.value.diagnostics)
        assert message in text

    def test_private_field_of_other_class(self):
        src = "class B { int x; } class A { int m(B b) { return b.x; } }"
        with pytest.raises(CheckError, match="private"):
            load_program(src)

    def test_expressions_are_annotated(self, consistency):
        m = consistency.method("Consistency", "checkConsistency")
        for s in A.walk_stmts(m.body):
            for top in A.stmt_exprs(s):
                for e in A.walk_exprs(top):
                    # null has the null type, which is represented as None
                    if not isinstance(e, A.NullLit):
                        assert e.ty is not None


class TestBranchGoals:
    def test_one_if(self):
        prog = load_program("class A { int m(int x) { if (x == 7) { return 1; } return 0; } }")
        goals = enumerate_branch_goals(prog.method("A", "m"))
        assert goals == [BranchGoalId("A.m", 0, Arm.TRUE), BranchGoalId("A.m", 0, Arm.FALSE)]

    def test_check_consistency_has_twelve(self, consistency):
        assert len(consistency.method("Consistency", "checkConsistency").branch_goals) == 12

    def test_getter_has_none(self, consistency):
        assert enumerate_branch_goals(consistency.method("Label", "getText")) == []

    def test_source_order_and_while(self):
        src = """class A { int m(int x) {
            while (x < 3) { if (x == 1) { x = x + 2; } x = x + 1; }
            if (x > 9) { return 1; }
            return 0; } }"""
        m = load_program(src).method("A", "m")
        assert [(g.index, g.arm) for g in m.branch_goals] == [
            (0, Arm.TRUE), (0, Arm.FALSE), (1, Arm.TRUE), (1, Arm.FALSE), (2, Arm.TRUE), (2, Arm.FALSE),
        ]

    def test_stable_across_reparse(self, consistency):
        again = load_program(print_program(consistency.program))
        m1 = consistency.method("Consistency", "checkConsistency")
        m2 = again.method("Consistency", "checkConsistency")
        assert m1.branch_goals == m2.branch_goals


# --- property: pretty-print then parse is the identity ---------------------------

_names = st.sampled_from(["a", "b", "x", "count"])
_strings = st.text(alphabet='ab $"\\\n\t', max_size=6)


def _exprs():
    leaves = st.one_of(
        st.integers(-50, 50).map(A.IntLit),
        st.booleans().map(A.BoolLit),
        _strings.map(A.StrLit),
        st.just(A.NullLit()),
        st.just(A.This()),
        _names.map(A.Name),
    )

    def extend(inner):
        return st.one_of(
            st.builds(A.BinOp, st.sampled_from(["+", "-", "*", "==", "!=", "<", "<=", ">", ">=", "&&", "||"]),
                      inner, inner),
            st.builds(A.Unary, st.just("!"), inner),
            st.builds(A.FieldRead, inner, _names),
            st.builds(A.Call, st.one_of(st.none(), inner), _names, st.lists(inner, max_size=2)),
            st.builds(A.New, st.just("A"), st.lists(inner, max_size=2)),
        )

    return st.recursive(leaves, extend, max_leaves=8)


def _stmts(depth=2):
    e = _exprs()
    simple = st.one_of(
        st.builds(A.Assign, _names, e),
        st.builds(lambda n, v: A.Assign(n, v, decl=A.INT), _names, e),
        st.builds(A.Return, st.one_of(st.none(), e)),
        st.builds(A.ExprStmt, st.builds(A.Call, st.none(), _names, st.lists(e, max_size=2))),
    )
    if depth == 0:
        return simple
    inner = st.lists(_stmts(depth - 1), max_size=2)
    return st.one_of(
        simple,
        st.builds(A.If, e, inner, inner),
        st.builds(A.While, e, inner),
    )


@settings(max_examples=100, deadline=None)
@given(st.lists(_stmts(), max_size=4))
def test_print_parse_identity(body):
    method = A.MethodDef("m", [A.Param("x", A.INT)], A.INT, body)
    ctor = A.MethodDef("A", [], None, [], is_constructor=True)
    prog = A.Program([A.ClassDef("A", [A.FieldDef("f", A.STR, public=True)], [ctor], [method])])
    # the first parse assigns predicate indices; from then on the cycle is exact
    ast = parse_program(print_program(prog))
    assert parse_program(print_program(ast)) == ast
