"""Test statements, test cases and their pseudocode serialization."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Union

from ..lang.ast import Type, ref
from ..lang.printer import quote


# --- descriptors of selectable program elements ------------------------------


@dataclass(frozen=True)
class CtorDesc:
    cls: str
    params: tuple[Type, ...]

    @property
    def ret(self) -> Type:
        return ref(self.cls)

    @property
    def qualified(self) -> str:
        return f"{self.cls}.<init>"

    def __str__(self) -> str:
        return f"{self.cls}({', '.join(map(str, self.params))})"


@dataclass(frozen=True)
class MethodDesc:
    cls: str
    name: str
    params: tuple[Type, ...]
    ret: Optional[Type]
    static: bool = False

    @property
    def qualified(self) -> str:
        return f"{self.cls}.{self.name}"

    def __str__(self) -> str:
        return f"{self.qualified}({', '.join(map(str, self.params))})"


@dataclass(frozen=True)
class FieldDesc:
    cls: str
    name: str
    type: Type

    @property
    def qualified(self) -> str:
        return f"{self.cls}.{self.name}"

    def __str__(self) -> str:
        return f"{self.qualified}:{self.type}"


Element = Union[CtorDesc, MethodDesc, FieldDesc]


# --- arguments ------------------------------------------------------------------


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class Lit:
    value: object  # int | bool | str | None (null)


Arg = Union[VarRef, Lit]


def format_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return quote(value)
    return str(value)


def _arg_str(a: Arg) -> str:
    return a.name if isinstance(a, VarRef) else format_value(a.value)


# --- statements -------------------------------------------------------------------
#
# Each statement exposes ``slots()``: the (slot, arg, required type) triples
# of everything it consumes. Slot ``-1`` is the receiver; ``i >= 0`` are
# argument positions.


@dataclass(frozen=True)
class Construct:
    var: str
    ctor: CtorDesc
    args: tuple[Arg, ...]

    @property
    def defined_type(self) -> Type:
        return self.ctor.ret

    @property
    def element(self) -> Element:
        return self.ctor

    def slots(self):
        return [(i, a, t) for i, (a, t) in enumerate(zip(self.args, self.ctor.params))]

    def with_slot(self, slot: int, arg: Arg) -> "Construct":
        args = list(self.args)
        args[slot] = arg
        return replace(self, args=tuple(args))

    def __str__(self) -> str:
        args = ", ".join(map(_arg_str, self.args))
        return f"{self.ctor.cls} {self.var} = new {self.ctor.cls}({args});"


@dataclass(frozen=True)
class Invoke:
    var: Optional[str]
    receiver: str
    method: MethodDesc
    args: tuple[Arg, ...]

    @property
    def defined_type(self) -> Optional[Type]:
        return self.method.ret if self.var is not None else None

    @property
    def element(self) -> Element:
        return self.method

    def slots(self):
        out = [(-1, VarRef(self.receiver), ref(self.method.cls))]
        out.extend((i, a, t) for i, (a, t) in enumerate(zip(self.args, self.method.params)))
        return out

    def with_slot(self, slot: int, arg: Arg) -> "Invoke":
        if slot == -1:
            return replace(self, receiver=arg.name)
        args = list(self.args)
        args[slot] = arg
        return replace(self, args=tuple(args))

    def __str__(self) -> str:
        call = f"{self.receiver}.{self.method.name}({', '.join(map(_arg_str, self.args))});"
        if self.var is None:
            return call
        return f"{self.method.ret} {self.var} = {call}"


@dataclass(frozen=True)
class StaticInvoke:
    var: Optional[str]
    method: MethodDesc
    args: tuple[Arg, ...]

    @property
    def defined_type(self) -> Optional[Type]:
        return self.method.ret if self.var is not None else None

    @property
    def element(self) -> Element:
        return self.method

    def slots(self):
        return [(i, a, t) for i, (a, t) in enumerate(zip(self.args, self.method.params))]

    def with_slot(self, slot: int, arg: Arg) -> "StaticInvoke":
        args = list(self.args)
        args[slot] = arg
        return replace(self, args=tuple(args))

    def __str__(self) -> str:
        call = f"{self.method.cls}.{self.method.name}({', '.join(map(_arg_str, self.args))});"
        if self.var is None:
            return call
        return f"{self.method.ret} {self.var} = {call}"


@dataclass(frozen=True)
class SetField:
    receiver: str
    field: FieldDesc
    value: Arg

    var = None
    defined_type = None

    @property
    def element(self) -> Element:
        return self.field

    def slots(self):
        return [(-1, VarRef(self.receiver), ref(self.field.cls)), (0, self.value, self.field.type)]

    def with_slot(self, slot: int, arg: Arg) -> "SetField":
        if slot == -1:
            return replace(self, receiver=arg.name)
        return replace(self, value=arg)

    def __str__(self) -> str:
        return f"{self.receiver}.{self.field.name} = {_arg_str(self.value)};"


@dataclass(frozen=True)
class Literal:
    var: str
    type: Type
    value: object

    element = None

    @property
    def defined_type(self) -> Type:
        return self.type

    def slots(self):
        return []

    def __str__(self) -> str:
        return f"{self.type} {self.var} = {format_value(self.value)};"


Statement = Union[Construct, Invoke, StaticInvoke, SetField, Literal]


def rename_statement(stmt: Statement, mapping: dict[str, str]) -> Statement:
    """Rename the defined variable and every variable reference per ``mapping``."""
    for slot, arg, _ in stmt.slots():
        if isinstance(arg, VarRef) and arg.name in mapping:
            stmt = stmt.with_slot(slot, VarRef(mapping[arg.name]))
    if stmt.var is not None and stmt.var in mapping:
        stmt = replace(stmt, var=mapping[stmt.var])
    return stmt


def invokes(stmt: Statement, method: MethodDesc) -> bool:
    return isinstance(stmt, (Invoke, StaticInvoke)) and stmt.method == method


@dataclass(frozen=True)
class TestCase:
    """An ordered sequence of test statements over named variables."""

    statements: tuple[Statement, ...] = ()

    __test__ = False  # keep pytest from collecting this class

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)

    @cached_property
    def var_types(self) -> dict[str, Type]:
        types = {}
        for s in self.statements:
            if s.var is not None:
                types[s.var] = s.defined_type
        return types

    def vars_before(self, position: int) -> dict[str, Type]:
        types = {}
        for s in self.statements[:position]:
            if s.var is not None:
                types[s.var] = s.defined_type
        return types

    def fresh_var(self) -> str:
        n = 0
        for name in self.var_types:
            if name.startswith("v") and name[1:].isdigit():
                n = max(n, int(name[1:]) + 1)
        return f"v{n}"

    def canonical(self) -> "TestCase":
        """Rename variables to v0, v1, ... in definition order."""
        mapping = {}
        for s in self.statements:
            if s.var is not None:
                mapping[s.var] = f"v{len(mapping)}"
        if all(k == v for k, v in mapping.items()):
            return self
        return TestCase(tuple(rename_statement(s, mapping) for s in self.statements))

    def serialize(self) -> str:
        return "\n".join(str(s) for s in self.statements)

    def __str__(self) -> str:
        return self.serialize()


def validate(test: TestCase, program=None) -> list[str]:
    """Return a list of type-validity problems; empty means valid.

    With ``program`` given, element descriptors are also checked against the
    declared classes (existence, arity, parameter types, field visibility).
    """
    problems = []
    scope: dict[str, Type] = {}
    for pos, s in enumerate(test.statements):
        for slot, arg, want in s.slots():
            if isinstance(arg, VarRef):
                have = scope.get(arg.name)
                if have is None:
                    problems.append(f"{pos}: undefined variable {arg.name}")
                elif not want.accepts(have):
                    problems.append(f"{pos}: {arg.name} is {have}, expected {want}")
            elif not _literal_fits(arg.value, want) or (slot == -1):
                problems.append(f"{pos}: literal {format_value(arg.value)} does not fit {want}")
        if isinstance(s, Literal) and not _literal_fits(s.value, s.type):
            problems.append(f"{pos}: literal {format_value(s.value)} does not fit {s.type}")
        if s.var is not None:
            if s.var in scope:
                problems.append(f"{pos}: variable {s.var} redefined")
            scope[s.var] = s.defined_type
        if program is not None:
            problems.extend(f"{pos}: {p}" for p in _check_element(s, program))
    return problems


def _literal_fits(value, want: Type) -> bool:
    if value is None:
        return want.is_ref
    if want.kind == "bool":
        return isinstance(value, bool)
    if want.kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if want.kind == "str":
        return isinstance(value, str)
    return False


def _check_element(s: Statement, program) -> list[str]:
    el = s.element
    if el is None:
        return []
    c = program.classes.get(el.cls)
    if c is None:
        return [f"unknown class {el.cls}"]
    if isinstance(el, CtorDesc):
        ctor = c.constructor(len(el.params))
        if ctor is None or tuple(p.type for p in ctor.params) != el.params:
            return [f"unknown constructor {el}"]
        return []
    if isinstance(el, FieldDesc):
        f = c.field(el.name)
        if f is None or f.type != el.type:
            return [f"unknown field {el}"]
        if not f.public:
            return [f"SetField on private field {el}"]
        return []
    m = c.method(el.name)
    if m is None or tuple(p.type for p in m.params) != el.params or m.return_type != el.ret:
        return [f"unknown method {el}"]
    if m.is_static != isinstance(s, StaticInvoke):
        return [f"static mismatch for {el}"]
    if not m.public:
        return [f"private method {el}"]
    return []
