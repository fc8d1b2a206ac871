import pytest

from modgen.interp import (
    K,
    ExecLimits,
    Outcome,
    attributed_events,
    branch_distance,
    execute_test,
    relational_distance,
)
from modgen.lang import Arm, load_program
from modgen.lang import ast as A
from modgen.lang.ast import BOOL, INT, STR, ref
from modgen.testmodel import Construct, CtorDesc, Invoke, Lit, MethodDesc, StaticInvoke, TestCase


def predicate(cond: str, params: str = "int x, int y, boolean a, boolean b, String s"):
    prog = load_program(f"class T {{ void m({params}) {{ if ({cond}) {{ }} }} }}")
    stmt = prog.method("T", "m").body[0]
    assert isinstance(stmt, A.If)
    return stmt.cond


def invoke(var, recv, cls, name, params, ret, *args):
    return Invoke(var, recv, MethodDesc(cls, name, params, ret), tuple(args))


def album_test(price_arg: str) -> TestCase:
    return TestCase((
        Construct("a", CtorDesc("Album", ()), ()),
        invoke("p", "a", "Album", "getPrice", (STR,), INT, Lit(price_arg)),
    ))


class TestBranchDistance:
    def test_equality_taken(self):
        assert branch_distance(predicate("x == 7"), {"x": 7}) == (Arm.TRUE, 1)

    def test_equality_not_taken(self):
        assert branch_distance(predicate("x == 7"), {"x": 3}) == (Arm.FALSE, 5)

    def test_conjunction_sums(self):
        arm, d = branch_distance(predicate("a && b"), {"a": False, "b": False})
        assert arm is Arm.FALSE
        assert d == K + K

    def test_conjunction_sums_numeric_operands(self):
        # both sides false: distance to TRUE is |x-7|+K plus the skipped right operand's K
        arm, d = branch_distance(predicate("x == 7 && y == 2"), {"x": 4, "y": 2})
        assert (arm, d) == (Arm.FALSE, 4 + K)

    def test_disjunction_min(self):
        arm, d = branch_distance(predicate("x == 7 || y == 2"), {"x": 4, "y": 9})
        assert (arm, d) == (Arm.FALSE, min(4, 8))

    def test_negation_swaps(self):
        assert branch_distance(predicate("!(x == 7)"), {"x": 3}) == (Arm.TRUE, 5)

    def test_less_than(self):
        assert branch_distance(predicate("x < y"), {"x": 5, "y": 2}) == (Arm.FALSE, 4)
        assert branch_distance(predicate("x < y"), {"x": 2, "y": 5}) == (Arm.TRUE, 4)

    def test_greater_equal_is_swapped_less_equal(self):
        assert branch_distance(predicate("x >= y"), {"x": 1, "y": 4}) == (Arm.FALSE, 4)

    def test_strings_are_flat(self):
        assert branch_distance(predicate('s == "abc"'), {"s": "abd"}) == (Arm.FALSE, K)
        assert branch_distance(predicate('s != "abc"'), {"s": "abc"}) == (Arm.FALSE, K)

    def test_bool_atom(self):
        assert branch_distance(predicate("a"), {"a": True}) == (Arm.TRUE, K)
        assert branch_distance(predicate("a"), {"a": False}) == (Arm.FALSE, K)

    @pytest.mark.parametrize("op", ["==", "!=", "<", "<=", ">", ">="])
    def test_opposite_distance_positive(self, op):
        for a in range(-3, 4):
            for b in range(-3, 4):
                value, dt, df = relational_distance(op, a, b)
                assert (dt == 0) == value
                assert (df == 0) == (not value)
                assert max(dt, df) > 0

    def test_monotone_towards_flip(self):
        ds = [branch_distance(predicate("x == 7"), {"x": x})[1] for x in (0, 3, 5, 6)]
        assert ds == sorted(ds, reverse=True)


class TestExecute:
    def test_empty_test(self, consistency):
        trace = execute_test(consistency, TestCase())
        assert trace.events == ()
        assert trace.outcome is Outcome.COMPLETED
        assert trace.steps == 0

    def test_consistency_first_event(self, consistency):
        test = TestCase((
            Construct("a", CtorDesc("Consistency", ()), ()),
            invoke("r", "a", "Consistency", "checkConsistency", (), BOOL),
        ))
        trace = execute_test(consistency, test)
        first = trace.events[0]
        assert first.goal == A.BranchGoalId("Consistency.checkConsistency", 0, Arm.TRUE)
        assert first.root == "Consistency.checkConsistency"
        assert len(trace.events) == 1

    def test_callee_events_rooted_at_caller(self, album):
        trace = execute_test(album, album_test("$5"))
        inner = [e for e in trace.events if e.goal.method == "Album.stripString"]
        assert inner
        assert all(e.root == "Album.getPrice" for e in inner)

    def test_field_defaults(self, program_of):
        prog = program_of("class A { int i; boolean b; String s; A o; "
                          "boolean m() { if (i == 0 && !b && s == \"\" && o == null) { return true; } return false; } }")
        test = TestCase((Construct("a", CtorDesc("A", ()), ()), invoke("r", "a", "A", "m", (), BOOL)))
        (event,) = execute_test(prog, test).events
        assert event.goal.arm is Arm.TRUE

    def test_deterministic(self, album):
        t = album_test("$10")
        assert execute_test(album, t).dump() == execute_test(album, t).dump()

    def test_static_root(self, program_of):
        prog = program_of("class U { public static int f(int x) { if (x < 0) { return 0; } return x; } }")
        test = TestCase((StaticInvoke("r", MethodDesc("U", "f", (INT,), INT, True), (Lit(-4),)),))
        (event,) = execute_test(prog, test).events
        assert event.root == "U.f"


FAULTY = """
class Node {
    Node next;
    int v;
    public void link(Node n) { next = n; }
    public int probe(int k) {
        if (k > 0) { return next.v; }
        return 0;
    }
    public String cut(String s, int i) {
        if (i < 10) { return s.charAt(i); }
        return s;
    }
    public int spin(int n) {
        while (n != 0) { n = n + 1; }
        return n;
    }
}
"""


@pytest.fixture(scope="module")
def prog():
    return load_program(FAULTY)


class TestFaults:
    def probe(self, k):
        return invoke(None, "n", "Node", "probe", (INT,), INT, Lit(k))

    def test_null_dereference(self, prog):
        test = TestCase((Construct("n", CtorDesc("Node", ()), ()), self.probe(0), self.probe(1), self.probe(0)))
        trace = execute_test(prog, test)
        assert trace.outcome is Outcome.RUNTIME_FAULT
        assert trace.fault.kind == "null_dereference"
        assert trace.fault.statement == 2
        assert trace.fault.line > 0

    def test_fault_prefix(self, prog):
        test = TestCase((Construct("n", CtorDesc("Node", ()), ()), self.probe(0), self.probe(1), self.probe(0)))
        faulting = execute_test(prog, test)
        upto = execute_test(prog, TestCase(test.statements[:3]))
        before = execute_test(prog, TestCase(test.statements[:2]))
        assert faulting.events == upto.events
        assert before.outcome is Outcome.COMPLETED
        assert faulting.events[: len(before.events)] == before.events

    def test_char_at_out_of_range(self, prog):
        test = TestCase((Construct("n", CtorDesc("Node", ()), ()),
                         invoke("c", "n", "Node", "cut", (STR, INT), STR, Lit("ab"), Lit(5))))
        trace = execute_test(prog, test)
        assert trace.fault.kind == "index_out_of_range"
        assert len(trace.events) == 1

    def test_step_limit(self, prog):
        test = TestCase((Construct("n", CtorDesc("Node", ()), ()),
                         invoke("r", "n", "Node", "spin", (INT,), INT, Lit(1))))
        trace = execute_test(prog, test, ExecLimits(max_steps=500))
        assert trace.outcome is Outcome.STEP_LIMIT
        assert trace.steps <= 500
        assert trace.events

    def test_receiver_null_via_argument(self, prog):
        test = TestCase((
            Construct("n", CtorDesc("Node", ()), ()),
            invoke(None, "n", "Node", "link", (ref("Node"),), None, Lit(None)),
            self.probe(3),
        ))
        assert execute_test(prog, test).outcome is Outcome.RUNTIME_FAULT


class TestAttribution:
    def test_indirect_call_not_attributed(self, album):
        trace = execute_test(album, album_test("$5a"))
        assert attributed_events(trace, "Album.stripString") == []

    def test_direct_call_attributed(self, album):
        test = TestCase((
            Construct("a", CtorDesc("Album", ()), ()),
            invoke("s", "a", "Album", "stripString", (STR, STR), STR, Lit("x1"), Lit("1")),
        ))
        trace = execute_test(album, test)
        assert attributed_events(trace, "Album.stripString") == list(trace.events)

    def test_mixed_keeps_second_statement_only(self, album):
        test = TestCase((
            Construct("a", CtorDesc("Album", ()), ()),
            invoke("p", "a", "Album", "getPrice", (STR,), INT, Lit("$5")),
            invoke("s", "a", "Album", "stripString", (STR, STR), STR, Lit("x1"), Lit("1")),
        ))
        trace = execute_test(album, test)
        kept = attributed_events(trace, "Album.stripString")
        assert kept
        assert all(e.statement == 2 for e in kept)
        assert kept == [e for e in trace.events if e.statement == 2]

    def test_dump_format(self, album):
        line = execute_test(album, album_test("$5")).dump().splitlines()[0]
        goal, root, dist = line.split()
        assert goal.startswith("Album.stripString#")
        assert root == "Album.getPrice"
        assert float(dist) > 0
