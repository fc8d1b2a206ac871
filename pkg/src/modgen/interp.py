"""Tree-walking interpreter with branch instrumentation.

Every ``if``/``while`` predicate evaluation emits a :class:`BranchEvent`
carrying the arm taken, the raw distance to the opposite arm, and the
method invoked by the top-level test statement whose dynamic extent
contains the event (the call-chain root).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .lang import ast as A
from .lang.checker import CheckedProgram
from .testmodel.statements import (
    Construct,
    Invoke,
    Literal,
    SetField,
    StaticInvoke,
    TestCase,
    VarRef,
)

K = 1  # branch distance constant

DEFAULT_MAX_STEPS = 100_000
DEFAULT_MAX_DEPTH = 100


@dataclass(frozen=True)
class ObjRef:
    id: int


class Obj:
    __slots__ = ("cls", "fields")

    def __init__(self, cls: str, fields: dict):
        self.cls = cls
        self.fields = fields


@dataclass(frozen=True)
class ExecLimits:
    max_steps: int = DEFAULT_MAX_STEPS
    max_depth: int = DEFAULT_MAX_DEPTH


class Outcome(enum.Enum):
    COMPLETED = "COMPLETED"
    RUNTIME_FAULT = "RUNTIME_FAULT"
    STEP_LIMIT = "STEP_LIMIT"


@dataclass(frozen=True)
class Fault:
    kind: str
    line: int
    col: int
    statement: int  # index of the top-level test statement


@dataclass(frozen=True)
class BranchEvent:
    goal: A.BranchGoalId
    distance: float  # raw distance to the arm not taken; always > 0
    root: str
    step: int
    statement: int


@dataclass(frozen=True)
class ExecutionTrace:
    events: tuple[BranchEvent, ...]
    outcome: Outcome
    steps: int
    fault: Optional[Fault] = None

    def dump(self) -> str:
        """Line-oriented debug form: one ``goal root distance`` line per event."""
        lines = [f"{e.goal} {e.root} {e.distance:g}" for e in self.events]
        tail = self.outcome.value
        if self.fault is not None:
            tail += f" {self.fault.kind} at {self.fault.line}:{self.fault.col} (statement {self.fault.statement})"
        lines.append(f"# {tail} steps={self.steps}")
        return "\n".join(lines)


class RuntimeFault(Exception):
    def __init__(self, kind: str, node=None):
        super().__init__(kind)
        self.kind = kind
        self.line = getattr(node, "line", 0)
        self.col = getattr(node, "col", 0)


class StepLimit(RuntimeFault):
    def __init__(self, node=None):
        super().__init__("step_limit", node)


def default_value(ty: A.Type):
    if ty.kind == "int":
        return 0
    if ty.kind == "bool":
        return False
    if ty.kind == "str":
        return ""
    return None


class _Return:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class _Frame:
    __slots__ = ("locals", "this")

    def __init__(self, locals_: dict, this):
        self.locals = locals_
        self.this = this


class Execution:
    """Execution state for one test: a private heap, test variables and trace.

    Statements are run one at a time with :meth:`run_statement`, so callers
    that need intermediate states (the brute-force enumerator) can snapshot
    between them.
    """

    def __init__(self, program: CheckedProgram, limits: ExecLimits = ExecLimits()):
        self.program = program
        self.limits = limits
        self.heap: list[Obj] = []
        self.vars: dict[str, object] = {}
        self.events: list[BranchEvent] = []
        self.steps = 0
        self.depth = 0
        self.root = ""
        self.statement_index = -1
        self._eval = {
            A.IntLit: self._lit,
            A.BoolLit: self._lit,
            A.StrLit: self._lit,
            A.NullLit: self._null,
            A.This: self._this,
            A.Name: self._name,
            A.FieldRead: self._field_read,
            A.Unary: self._unary,
            A.BinOp: self._binop,
            A.Call: self._call,
            A.New: self._new,
        }

    # -- test statements

    def _arg(self, a):
        if isinstance(a, VarRef):
            return self.vars[a.name]
        return a.value

    def run_statement(self, stmt, index: int) -> None:
        """Execute one top-level test statement; raises :class:`RuntimeFault`."""
        self.statement_index = index
        if isinstance(stmt, Literal):
            self.vars[stmt.var] = stmt.value
            return
        if isinstance(stmt, SetField):
            obj = self._deref(self.vars[stmt.receiver], None)
            obj.fields[stmt.field.name] = self._arg(stmt.value)
            return
        if isinstance(stmt, Construct):
            self.root = stmt.ctor.qualified
            args = [self._arg(a) for a in stmt.args]
            self.vars[stmt.var] = self.construct(stmt.ctor.cls, args, None)
            return
        if isinstance(stmt, Invoke):
            self.root = stmt.method.qualified
            recv = self.vars[stmt.receiver]
            self._deref(recv, None)
            method = self.program.method(stmt.method.cls, stmt.method.name)
            result = self.invoke(method, recv, [self._arg(a) for a in stmt.args], None)
        elif isinstance(stmt, StaticInvoke):
            self.root = stmt.method.qualified
            method = self.program.method(stmt.method.cls, stmt.method.name)
            result = self.invoke(method, None, [self._arg(a) for a in stmt.args], None)
        else:
            raise TypeError(f"unknown test statement {stmt!r}")
        if stmt.var is not None:
            self.vars[stmt.var] = result

    # -- heap and calls

    def _deref(self, value, node) -> Obj:
        if value is None:
            raise RuntimeFault("null_dereference", node)
        return self.heap[value.id]

    def _tick(self, node):
        self.steps += 1
        if self.steps > self.limits.max_steps:
            self.steps = self.limits.max_steps
            raise StepLimit(node)

    def construct(self, cls_name: str, args: list, node) -> ObjRef:
        cls = self.program.cls(cls_name)
        fields = {f.name: default_value(f.type) for f in cls.fields}
        self.heap.append(Obj(cls_name, fields))
        ref = ObjRef(len(self.heap) - 1)
        ctor = cls.constructor(len(args))
        self.invoke(ctor, ref, args, node)
        return ref

    def invoke(self, method: A.MethodDef, this, args: list, node):
        self._tick(node)
        if self.depth >= self.limits.max_depth:
            raise RuntimeFault("stack_overflow", node)
        frame = _Frame({p.name: v for p, v in zip(method.params, args)}, this)
        self.depth += 1
        try:
            ret = self._block(method.body, frame)
        finally:
            self.depth -= 1
        return ret.value if ret is not None else None

    # -- statements

    def _block(self, body, frame) -> Optional[_Return]:
        for stmt in body:
            self._tick(stmt)
            t = type(stmt)
            if t is A.Assign:
                value = self._eval[type(stmt.value)](stmt.value, frame)
                if stmt.kind == "field":
                    self.heap[frame.this.id].fields[stmt.target] = value
                else:
                    frame.locals[stmt.target] = value
            elif t is A.If:
                if self._predicate(stmt, frame):
                    ret = self._block(stmt.then, frame)
                else:
                    ret = self._block(stmt.orelse, frame)
                if ret is not None:
                    return ret
            elif t is A.While:
                while self._predicate(stmt, frame):
                    ret = self._block(stmt.body, frame)
                    if ret is not None:
                        return ret
                    self._tick(stmt)
            elif t is A.Return:
                if stmt.value is None:
                    return _Return(None)
                return _Return(self._eval[type(stmt.value)](stmt.value, frame))
            elif t is A.FieldAssign:
                obj = self._deref(self._eval[type(stmt.obj)](stmt.obj, frame), stmt)
                obj.fields[stmt.field] = self._eval[type(stmt.value)](stmt.value, frame)
            else:
                self._eval[type(stmt.expr)](stmt.expr, frame)
        return None

    def _predicate(self, stmt, frame) -> bool:
        value, d_true, d_false = self.condition(stmt.cond, frame)
        goal_true, goal_false = stmt.goals
        if value:
            self.events.append(BranchEvent(goal_true, d_false, self.root, self.steps, self.statement_index))
        else:
            self.events.append(BranchEvent(goal_false, d_true, self.root, self.steps, self.statement_index))
        return value

    # -- branch distance

    def condition(self, e, frame) -> tuple[bool, float, float]:
        """Evaluate a boolean expression to ``(value, d_true, d_false)``.

        Exactly one of the two distances is zero. An operand skipped by
        short-circuiting contributes the constant K.
        """
        t = type(e)
        if t is A.BinOp:
            op = e.op
            if op == "&&":
                lv, lt, lf = self.condition(e.left, frame)
                if not lv:
                    return False, lt + K, 0
                rv, rt, rf = self.condition(e.right, frame)
                return rv, rt, min(lf, rf)
            if op == "||":
                lv, lt, lf = self.condition(e.left, frame)
                if lv:
                    return True, 0, lf + K
                rv, rt, rf = self.condition(e.right, frame)
                return rv, min(lt, rt), lf + rf
            if op in _RELATIONAL:
                a = self._eval[type(e.left)](e.left, frame)
                b = self._eval[type(e.right)](e.right, frame)
                return relational_distance(op, a, b)
        elif t is A.Unary and e.op == "!":
            v, dt, df = self.condition(e.operand, frame)
            return not v, df, dt
        v = self._eval[t](e, frame)
        return (True, 0, K) if v else (False, K, 0)

    # -- expressions

    def _lit(self, e, frame):
        return e.value

    def _null(self, e, frame):
        return None

    def _this(self, e, frame):
        return frame.this

    def _name(self, e, frame):
        if e.kind == "local":
            return frame.locals[e.id]
        return self.heap[frame.this.id].fields[e.id]

    def _field_read(self, e, frame):
        obj = self._deref(self._eval[type(e.obj)](e.obj, frame), e)
        return obj.fields[e.field]

    def _unary(self, e, frame):
        v = self._eval[type(e.operand)](e.operand, frame)
        return (not v) if e.op == "!" else -v

    def _binop(self, e, frame):
        op = e.op
        if op == "&&" or op == "||":
            return self.condition(e, frame)[0]
        a = self._eval[type(e.left)](e.left, frame)
        b = self._eval[type(e.right)](e.right, frame)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b

    def _new(self, e, frame):
        args = [self._eval[type(a)](a, frame) for a in e.args]
        return self.construct(e.cls, args, e)

    def _call(self, e, frame):
        kind, owner = e.kind
        if kind == "str":
            s = self._eval[type(e.receiver)](e.receiver, frame)
            args = [self._eval[type(a)](a, frame) for a in e.args]
            return string_op(owner, s, args, e)
        if kind == "static":
            this = None
        elif e.receiver is None:
            this = frame.this
        else:
            this = self._eval[type(e.receiver)](e.receiver, frame)
            self._deref(this, e)
        args = [self._eval[type(a)](a, frame) for a in e.args]
        method = self.program.method(owner, e.method)
        return self.invoke(method, this, args, e)

    # -- results

    def trace(self, outcome: Outcome = Outcome.COMPLETED, fault: Optional[Fault] = None) -> ExecutionTrace:
        return ExecutionTrace(tuple(self.events), outcome, self.steps, fault)


_RELATIONAL = {"==", "!=", "<", "<=", ">", ">="}


def _is_int(v) -> bool:
    return type(v) is int


def relational_distance(op: str, a, b) -> tuple[bool, float, float]:
    """Korel-style distances for a comparison, as ``(value, d_true, d_false)``."""
    if op == ">":
        op, a, b = "<", b, a
    elif op == ">=":
        op, a, b = "<=", b, a
    if op == "==" or op == "!=":
        equal = a == b
        if equal:
            d_eq, d_ne = 0, K
        elif _is_int(a) and _is_int(b):
            d_eq, d_ne = abs(a - b) + K, 0
        else:
            # strings, booleans and references: flat distance
            d_eq, d_ne = K, 0
        if op == "==":
            return equal, d_eq, d_ne
        return not equal, d_ne, d_eq
    if op == "<":
        if a < b:
            return True, 0, b - a + K
        return False, a - b + K, 0
    # "<="
    if a <= b:
        return True, 0, b - a + K
    return False, a - b + K, 0


def string_op(op: str, s: str, args: list, node=None):
    if op == "length":
        return len(s)
    if op == "contains":
        return args[0] in s
    if op == "indexOf":
        return s.find(args[0])
    if op == "concat":
        return s + args[0]
    if op == "charAt":
        i = args[0]
        if i < 0 or i >= len(s):
            raise RuntimeFault("index_out_of_range", node)
        return s[i]
    if op == "substring":
        begin, end = args
        if begin < 0 or end > len(s) or begin > end:
            raise RuntimeFault("index_out_of_range", node)
        return s[begin:end]
    raise ValueError(f"unknown string operation {op}")


def execute_test(program: CheckedProgram, test: TestCase, limits: ExecLimits = ExecLimits()) -> ExecutionTrace:
    """Run ``test`` on a fresh heap and return its execution trace.

    Runtime faults and step-limit exhaustion end the run and are recorded in
    the trace; the events collected before the fault are kept.
    """
    ex = Execution(program, limits)
    for i, stmt in enumerate(test.statements):
        try:
            ex.run_statement(stmt, i)
        except StepLimit as f:
            return ex.trace(Outcome.STEP_LIMIT, Fault(f.kind, f.line, f.col, i))
        except RuntimeFault as f:
            return ex.trace(Outcome.RUNTIME_FAULT, Fault(f.kind, f.line, f.col, i))
        except RecursionError:
            return ex.trace(Outcome.RUNTIME_FAULT, Fault("stack_overflow", 0, 0, i))
    return ex.trace()


def branch_distance(predicate: A.Expr, env: dict, program: Optional[CheckedProgram] = None):
    """Evaluate a checked predicate under local bindings ``env``.

    Returns ``(taken_arm, distance_to_opposite_arm)``.
    """
    ex = Execution(program if program is not None else CheckedProgram(A.Program([]), {}))
    value, d_true, d_false = ex.condition(predicate, _Frame(dict(env), None))
    if value:
        return A.Arm.TRUE, d_false
    return A.Arm.FALSE, d_true


def attributed_events(trace: ExecutionTrace, target: str) -> list[BranchEvent]:
    """Events whose call-chain root is the qualified method ``target``."""
    return [e for e in trace.events if e.root == target]
