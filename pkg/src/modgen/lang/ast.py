"""AST node definitions and the type model for MiniOO.

Structural equality ignores source positions and the annotations the
checker fills in (``ty``, ``kind``, ``goals``), so a re-parsed
pretty-print compares equal to the original tree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Type:
    kind: str  # "int" | "bool" | "str" | "ref"
    cls: Optional[str] = None

    @property
    def is_ref(self) -> bool:
        return self.kind == "ref"

    @property
    def is_primitive(self) -> bool:
        return self.kind != "ref"

    def accepts(self, other: Optional["Type"]) -> bool:
        """True if a value of type ``other`` can be stored in this type.

        ``None`` stands for the type of the ``null`` literal.
        """
        if other is None:
            return self.is_ref
        return self == other

    def __str__(self) -> str:
        if self.kind == "ref":
            return self.cls
        return _PRIMITIVE_NAMES[self.kind]


INT = Type("int")
BOOL = Type("bool")
STR = Type("str")
_PRIMITIVE_NAMES = {"int": "int", "bool": "boolean", "str": "String"}


def ref(cls: str) -> Type:
    return Type("ref", cls)


def type_from_name(name: str) -> Type:
    for kind, spelled in _PRIMITIVE_NAMES.items():
        if spelled == name:
            return Type(kind)
    return ref(name)


class Arm(enum.Enum):
    TRUE = "T"
    FALSE = "F"

    def flip(self) -> "Arm":
        return Arm.FALSE if self is Arm.TRUE else Arm.TRUE


@dataclass(frozen=True)
class BranchGoalId:
    method: str
    index: int
    arm: Arm

    def __str__(self) -> str:
        return f"{self.method}#{self.index}{self.arm.value}"

    def __lt__(self, other):  # TRUE arm sorts before FALSE
        return (self.method, self.index, self.arm is Arm.FALSE) < (
            other.method,
            other.index,
            other.arm is Arm.FALSE,
        )


def _pos():
    return field(default=0, compare=False, repr=False)


def _note(default=None):
    return field(default=default, compare=False, repr=False)


# --- expressions -----------------------------------------------------------


@dataclass(eq=True)
class IntLit:
    value: int
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class BoolLit:
    value: bool
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class StrLit:
    value: str
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class NullLit:
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class This:
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class Name:
    id: str
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()
    # set by the checker: "local" | "field" | "class"
    kind: Optional[str] = _note()


@dataclass(eq=True)
class FieldRead:
    obj: "Expr"
    field: str
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class Unary:
    op: str  # "!" | "-"
    operand: "Expr"
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


@dataclass(eq=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


STRING_OPS = {
    # name: (param types, return type)
    "length": ((), INT),
    "contains": ((STR,), BOOL),
    "indexOf": ((STR,), INT),
    "concat": ((STR,), STR),
    "charAt": ((INT,), STR),
    "substring": ((INT, INT), STR),
}


@dataclass(eq=True)
class Call:
    receiver: Optional["Expr"]
    method: str
    args: list["Expr"]
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()
    # set by the checker: ("str", op) | ("static", cls) | ("virtual", cls)
    kind: Optional[tuple] = _note()


@dataclass(eq=True)
class New:
    cls: str
    args: list["Expr"]
    line: int = _pos()
    col: int = _pos()
    ty: Optional[Type] = _note()


Expr = Union[IntLit, BoolLit, StrLit, NullLit, This, Name, FieldRead, Unary, BinOp, Call, New]


# --- statements ------------------------------------------------------------


@dataclass(eq=True)
class Assign:
    """``x = e;`` or, with ``decl`` set, the local declaration ``T x = e;``."""

    target: str
    value: Expr
    decl: Optional[Type] = None
    line: int = _pos()
    col: int = _pos()
    kind: Optional[str] = _note()  # "local" | "field"


@dataclass(eq=True)
class FieldAssign:
    obj: Expr
    field: str
    value: Expr
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class If:
    cond: Expr
    then: list["Stmt"]
    orelse: list["Stmt"]
    index: int = -1
    line: int = _pos()
    col: int = _pos()
    goals: Optional[tuple] = _note()  # (true goal, false goal)


@dataclass(eq=True)
class While:
    cond: Expr
    body: list["Stmt"]
    index: int = -1
    line: int = _pos()
    col: int = _pos()
    goals: Optional[tuple] = _note()


@dataclass(eq=True)
class Return:
    value: Optional[Expr]
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class ExprStmt:
    expr: Expr
    line: int = _pos()
    col: int = _pos()


Stmt = Union[Assign, FieldAssign, If, While, Return, ExprStmt]


# --- declarations ----------------------------------------------------------


@dataclass(eq=True)
class Param:
    name: str
    type: Type


@dataclass(eq=True)
class FieldDef:
    name: str
    type: Type
    public: bool = False
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class MethodDef:
    name: str
    params: list[Param]
    return_type: Optional[Type]  # None means void
    body: list[Stmt]
    is_static: bool = False
    public: bool = True
    is_constructor: bool = False
    synthesized: bool = field(default=False, compare=False)
    line: int = _pos()
    col: int = _pos()
    owner: Optional[str] = _note()

    @property
    def qualified(self) -> str:
        name = "<init>" if self.is_constructor else self.name
        return f"{self.owner}.{name}"

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def predicate_count(self) -> int:
        return count_predicates(self.body)

    @property
    def branch_goals(self) -> list[BranchGoalId]:
        goals = []
        for i in range(self.predicate_count):
            goals.append(BranchGoalId(self.qualified, i, Arm.TRUE))
            goals.append(BranchGoalId(self.qualified, i, Arm.FALSE))
        return goals


@dataclass(eq=True)
class ClassDef:
    name: str
    fields: list[FieldDef]
    constructors: list[MethodDef]
    methods: list[MethodDef]
    line: int = _pos()
    col: int = _pos()

    def field(self, name: str) -> Optional[FieldDef]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def method(self, name: str) -> Optional[MethodDef]:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def constructor(self, arity: int) -> Optional[MethodDef]:
        for c in self.constructors:
            if c.arity == arity:
                return c
        return None


@dataclass(eq=True)
class Program:
    classes: list[ClassDef]

    def cls(self, name: str) -> Optional[ClassDef]:
        for c in self.classes:
            if c.name == name:
                return c
        return None


def count_predicates(body: list[Stmt]) -> int:
    n = 0
    for stmt in body:
        if isinstance(stmt, If):
            n += 1 + count_predicates(stmt.then) + count_predicates(stmt.orelse)
        elif isinstance(stmt, While):
            n += 1 + count_predicates(stmt.body)
    return n


def walk_stmts(body: list[Stmt]):
    """Yield every statement in ``body`` in source order, nested ones included."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_stmts(stmt.then)
            yield from walk_stmts(stmt.orelse)
        elif isinstance(stmt, While):
            yield from walk_stmts(stmt.body)


def walk_exprs(expr: Expr):
    yield expr
    if isinstance(expr, FieldRead):
        yield from walk_exprs(expr.obj)
    elif isinstance(expr, Unary):
        yield from walk_exprs(expr.operand)
    elif isinstance(expr, BinOp):
        yield from walk_exprs(expr.left)
        yield from walk_exprs(expr.right)
    elif isinstance(expr, Call):
        if expr.receiver is not None:
            yield from walk_exprs(expr.receiver)
        for a in expr.args:
            yield from walk_exprs(a)
    elif isinstance(expr, New):
        for a in expr.args:
            yield from walk_exprs(a)


def stmt_exprs(stmt: Stmt):
    """Top-level expressions held directly by ``stmt``."""
    if isinstance(stmt, Assign):
        return [stmt.value]
    if isinstance(stmt, FieldAssign):
        return [stmt.obj, stmt.value]
    if isinstance(stmt, (If, While)):
        return [stmt.cond]
    if isinstance(stmt, Return):
        return [stmt.value] if stmt.value is not None else []
    return [stmt.expr]
