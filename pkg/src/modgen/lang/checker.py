"""Static checking for MiniOO programs.

The checker resolves names and calls, annotates every expression with its
type, and attaches branch-goal ids to each ``if``/``while`` node. It
collects every diagnostic it can rather than stopping at the first one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import ast as A
from .parser import Diagnostic, LangError


class CheckError(LangError):
    pass


@dataclass
class CheckedProgram:
    program: A.Program
    classes: dict[str, A.ClassDef]
    string_literals: list[str] = field(default_factory=list)
    int_literals: list[int] = field(default_factory=list)

    def cls(self, name: str) -> A.ClassDef:
        return self.classes[name]

    def method(self, cls: str, name: str) -> A.MethodDef:
        m = self.classes[cls].method(name)
        if m is None:
            raise KeyError(f"{cls}.{name}")
        return m

    def method_by_qualified(self, qualified: str) -> A.MethodDef:
        cls, name = qualified.split(".", 1)
        return self.method(cls, name)


_NUMERIC_OPS = {"+", "-", "*"}
_COMPARE_OPS = {"<", "<=", ">", ">="}
_EQUALITY_OPS = {"==", "!="}
_LOGIC_OPS = {"&&", "||"}


class _Abort(Exception):
    """Raised to skip the rest of an expression once it has a diagnostic."""


class Checker:
    def __init__(self, program: A.Program):
        self.program = program
        self.classes = {c.name: c for c in program.classes}
        self.diagnostics: list[Diagnostic] = []
        self.strings: list[str] = []
        self.ints: list[int] = []
        # per-method state
        self.cls: Optional[A.ClassDef] = None
        self.method: Optional[A.MethodDef] = None
        self.locals: dict[str, A.Type] = {}

    def report(self, node, message: str):
        self.diagnostics.append(Diagnostic(getattr(node, "line", 0), getattr(node, "col", 0), message))

    def fail(self, node, message: str):
        self.report(node, message)
        raise _Abort()

    def check(self) -> CheckedProgram:
        for c in self.program.classes:
            self._check_declarations(c)
        for c in self.program.classes:
            self.cls = c
            for m in c.constructors + c.methods:
                self._check_method(m)
        if self.diagnostics:
            raise CheckError(sorted(self.diagnostics, key=lambda d: (d.line, d.col)))
        return CheckedProgram(
            self.program,
            self.classes,
            sorted(set(self.strings)),
            sorted(set(self.ints)),
        )

    # -- declarations

    def _check_type(self, ty: Optional[A.Type], node):
        if ty is not None and ty.is_ref and ty.cls not in self.classes:
            self.report(node, f"unknown class {ty.cls}")

    def _check_declarations(self, c: A.ClassDef):
        seen = set()
        for f in c.fields:
            if f.name in seen:
                self.report(f, f"duplicate field {f.name}")
            seen.add(f.name)
            self._check_type(f.type, f)
        names = set()
        for m in c.methods:
            if m.name in names:
                self.report(m, f"duplicate method {m.name}")
            names.add(m.name)
        arities = set()
        for m in c.constructors:
            if m.arity in arities:
                self.report(m, f"duplicate constructor {c.name}/{m.arity}")
            arities.add(m.arity)
        for m in c.constructors + c.methods:
            params = set()
            for p in m.params:
                if p.name in params:
                    self.report(m, f"duplicate parameter {p.name}")
                params.add(p.name)
                self._check_type(p.type, m)
            self._check_type(m.return_type, m)

    def _check_method(self, m: A.MethodDef):
        self.method = m
        self.locals = {p.name: p.type for p in m.params}
        self._check_block(m.body)
        if m.return_type is not None and not _always_returns(m.body):
            self.report(m, f"missing return in {m.qualified}")
        for s in A.walk_stmts(m.body):
            if isinstance(s, (A.If, A.While)):
                s.goals = (
                    A.BranchGoalId(m.qualified, s.index, A.Arm.TRUE),
                    A.BranchGoalId(m.qualified, s.index, A.Arm.FALSE),
                )

    # -- statements

    def _check_block(self, body: list[A.Stmt]):
        saved = dict(self.locals)
        for s in body:
            try:
                self._check_stmt(s)
            except _Abort:
                pass
        self.locals = saved

    def _check_stmt(self, s: A.Stmt):
        if isinstance(s, A.Assign):
            value_ty = self._expr(s.value)
            if s.decl is not None:
                self._check_type(s.decl, s)
                if s.target in self.locals:
                    self.fail(s, f"variable {s.target} already declared")
                self.locals[s.target] = s.decl
                s.kind = "local"
                target_ty = s.decl
            elif s.target in self.locals:
                s.kind = "local"
                target_ty = self.locals[s.target]
            else:
                f = self.cls.field(s.target)
                if f is None:
                    self.fail(s, f"unknown variable {s.target}")
                if self.method.is_static:
                    self.fail(s, f"field {s.target} used in static context")
                s.kind = "field"
                target_ty = f.type
            self._assignable(target_ty, value_ty, s)
        elif isinstance(s, A.FieldAssign):
            obj_ty = self._expr(s.obj)
            f = self._lookup_field(obj_ty, s.field, s)
            self._assignable(f.type, self._expr(s.value), s)
        elif isinstance(s, (A.If, A.While)):
            cond_ty = self._expr(s.cond)
            if cond_ty != A.BOOL:
                self.report(s.cond, "predicate must be Bool")
            if isinstance(s, A.If):
                self._check_block(s.then)
                self._check_block(s.orelse)
            else:
                self._check_block(s.body)
        elif isinstance(s, A.Return):
            expected = self.method.return_type
            if s.value is None:
                if expected is not None:
                    self.fail(s, "missing return value")
            else:
                if expected is None:
                    self.fail(s, "cannot return a value from a void method")
                self._assignable(expected, self._expr(s.value), s)
        elif isinstance(s, A.ExprStmt):
            if not isinstance(s.expr, (A.Call, A.New)):
                self.fail(s, "expression statement must be a call")
            self._expr(s.expr, allow_void=True)

    def _assignable(self, target: A.Type, value: Optional[A.Type], node):
        if value == "null":
            if not target.is_ref:
                self.fail(node, f"cannot assign null to {target}")
            return
        if target != value:
            self.fail(node, f"type mismatch: expected {target}, found {value}")

    def _lookup_field(self, obj_ty, name: str, node) -> A.FieldDef:
        if obj_ty == "null" or obj_ty is None or not obj_ty.is_ref:
            self.fail(node, f"field access on non-object type {obj_ty}")
        c = self.classes.get(obj_ty.cls)
        if c is None:
            self.fail(node, f"unknown class {obj_ty.cls}")
        f = c.field(name)
        if f is None:
            self.fail(node, f"unknown field {c.name}.{name}")
        if not f.public and c is not self.cls:
            self.fail(node, f"private field {c.name}.{name}")
        return f

    # -- expressions
    #
    # _expr returns a Type, the string "null" for the null literal, or None
    # for a void call (only legal when allow_void is set).

    def _expr(self, e: A.Expr, allow_void: bool = False):
        ty = self._infer(e)
        if ty is None and not allow_void:
            self.fail(e, "void used as value")
        e.ty = None if ty == "null" else ty
        return ty

    def _value(self, e: A.Expr):
        return self._expr(e)

    def _infer(self, e: A.Expr):
        if isinstance(e, A.IntLit):
            self.ints.append(e.value)
            return A.INT
        if isinstance(e, A.BoolLit):
            return A.BOOL
        if isinstance(e, A.StrLit):
            self.strings.append(e.value)
            return A.STR
        if isinstance(e, A.NullLit):
            return "null"
        if isinstance(e, A.This):
            if self.method.is_static:
                self.fail(e, "this used in static context")
            return A.ref(self.cls.name)
        if isinstance(e, A.Name):
            if e.id in self.locals:
                e.kind = "local"
                return self.locals[e.id]
            f = self.cls.field(e.id)
            if f is not None:
                if self.method.is_static:
                    self.fail(e, f"field {e.id} used in static context")
                e.kind = "field"
                return f.type
            if e.id in self.classes:
                self.fail(e, f"class {e.id} used as value")
            self.fail(e, f"unknown variable {e.id}")
        if isinstance(e, A.FieldRead):
            return self._lookup_field(self._value(e.obj), e.field, e).type
        if isinstance(e, A.Unary):
            operand = self._value(e.operand)
            want = A.BOOL if e.op == "!" else A.INT
            if operand != want:
                self.fail(e, f"operand of {e.op} must be {want}")
            return want
        if isinstance(e, A.BinOp):
            return self._binop(e)
        if isinstance(e, A.New):
            c = self.classes.get(e.cls)
            if c is None:
                self.fail(e, f"unknown class {e.cls}")
            ctor = c.constructor(len(e.args))
            if ctor is None:
                self.fail(e, f"unknown constructor {e.cls}/{len(e.args)}")
            if not ctor.public and c is not self.cls:
                self.fail(e, f"private constructor {e.cls}/{len(e.args)}")
            self._args([p.type for p in ctor.params], e.args, e)
            return A.ref(e.cls)
        if isinstance(e, A.Call):
            return self._call(e)
        raise TypeError(f"unknown expression {e!r}")

    def _binop(self, e: A.BinOp):
        left = self._value(e.left)
        right = self._value(e.right)
        if e.op in _NUMERIC_OPS or e.op in _COMPARE_OPS:
            if left != A.INT or right != A.INT:
                self.fail(e, f"operands of {e.op} must be int")
            return A.INT if e.op in _NUMERIC_OPS else A.BOOL
        if e.op in _LOGIC_OPS:
            if left != A.BOOL or right != A.BOOL:
                self.fail(e, f"operands of {e.op} must be boolean")
            return A.BOOL
        # equality
        if left == "null" or right == "null":
            other = right if left == "null" else left
            if other != "null" and not other.is_ref:
                self.fail(e, f"cannot compare {other} with null")
            return A.BOOL
        if left != right:
            self.fail(e, f"cannot compare {left} with {right}")
        return A.BOOL

    def _args(self, params: list[A.Type], args: list[A.Expr], node):
        for p, a in zip(params, args):
            self._assignable(p, self._value(a), a)

    def _call(self, e: A.Call):
        arity = len(e.args)
        # static call C.m(...)
        if (
            isinstance(e.receiver, A.Name)
            and e.receiver.id not in self.locals
            and self.cls.field(e.receiver.id) is None
            and e.receiver.id in self.classes
        ):
            e.receiver.kind = "class"
            c = self.classes[e.receiver.id]
            m = self._resolve(c, e.method, arity, e)
            if not m.is_static:
                self.fail(e, f"instance method {m.qualified} called statically")
            e.kind = ("static", c.name)
        elif e.receiver is None:
            m = self._resolve(self.cls, e.method, arity, e)
            if not m.is_static and self.method.is_static:
                self.fail(e, f"instance method {m.qualified} called from static context")
            e.kind = ("static", self.cls.name) if m.is_static else ("virtual", self.cls.name)
        else:
            recv = self._value(e.receiver)
            if recv == A.STR:
                spec = A.STRING_OPS.get(e.method)
                if spec is None or len(spec[0]) != arity:
                    self.fail(e, f"unknown method {e.method}/{arity}")
                self._args(list(spec[0]), e.args, e)
                e.kind = ("str", e.method)
                return spec[1]
            if recv == "null" or not recv.is_ref:
                self.fail(e, f"method call on non-object type {recv}")
            c = self.classes.get(recv.cls)
            if c is None:
                self.fail(e, f"unknown class {recv.cls}")
            m = self._resolve(c, e.method, arity, e)
            if m.is_static:
                self.fail(e, f"static method {m.qualified} called on an instance")
            e.kind = ("virtual", c.name)
        self._args([p.type for p in m.params], e.args, e)
        return m.return_type

    def _resolve(self, c: A.ClassDef, name: str, arity: int, node) -> A.MethodDef:
        m = c.method(name)
        if m is None or m.arity != arity:
            self.fail(node, f"unknown method {name}/{arity}")
        if not m.public and c is not self.cls:
            self.fail(node, f"private method {m.qualified}")
        return m


def _always_returns(body: list[A.Stmt]) -> bool:
    for s in body:
        if isinstance(s, A.Return):
            return True
        if isinstance(s, A.If) and s.orelse and _always_returns(s.then) and _always_returns(s.orelse):
            return True
    return False


def typecheck(program: A.Program) -> CheckedProgram:
    """Check ``program`` and annotate it in place.

    Returns a :class:`CheckedProgram`; raises :class:`CheckError` with all
    collected diagnostics otherwise.
    """
    return Checker(program).check()


def enumerate_branch_goals(method: A.MethodDef) -> list[A.BranchGoalId]:
    return method.branch_goals
