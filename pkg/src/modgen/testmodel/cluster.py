"""Test Cluster construction: the pools random statements are drawn from."""

from __future__ import annotations

import enum
import string
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from ..lang import ast as A
from ..lang.checker import CheckedProgram
from .statements import CtorDesc, Element, FieldDesc, MethodDesc

SEED_INTS = (-1, 0, 1, 2, 7, 100)
SEED_STRINGS = ("", "a")
RANDOM_INT_RANGE = (-1000, 1000)
RANDOM_STR_ALPHABET = string.ascii_letters + string.digits + " _.,$-"
SEEDED_LITERAL_PROB = 0.6


class ClusterMode(enum.Enum):
    WHOLE = "whole"
    STRICT = "strict"
    EMOTE = "emote"


class UnknownTarget(LookupError):
    pass


@dataclass(frozen=True)
class LiteralPool:
    ints: tuple[int, ...]
    strings: tuple[str, ...]

    @classmethod
    def from_program(cls, program: CheckedProgram) -> "LiteralPool":
        ints = sorted(set(SEED_INTS) | set(program.int_literals))
        strings = sorted(set(SEED_STRINGS) | set(program.string_literals))
        return cls(tuple(ints), tuple(strings))

    def seeded(self, ty: A.Type) -> tuple:
        if ty.kind == "int":
            return self.ints
        if ty.kind == "str":
            return self.strings
        if ty.kind == "bool":
            return (False, True)
        return ()

    def sample(self, ty: A.Type, rng):
        if ty.kind == "bool":
            return rng.random() < 0.5
        if rng.random() < SEEDED_LITERAL_PROB:
            return rng.choice(self.seeded(ty))
        if ty.kind == "int":
            return rng.randint(*RANDOM_INT_RANGE)
        n = rng.randint(1, 5)
        return "".join(rng.choice(RANDOM_STR_ALPHABET) for _ in range(n))


def _key(el: Element) -> str:
    return f"{type(el).__name__}:{el}"


def _sorted(elements) -> tuple:
    return tuple(sorted(set(elements), key=_key))


@dataclass(frozen=True)
class TestCluster:
    mode: ClusterMode
    target: MethodDesc
    test_methods: tuple[MethodDesc, ...]
    generators: tuple[Element, ...]
    modifiers: tuple[MethodDesc, ...]
    fields: tuple[FieldDesc, ...]
    literals: LiteralPool

    __test__ = False

    def generators_for(self, ty: A.Type) -> list[Element]:
        return [g for g in self.generators if g.ret == ty]

    @cached_property
    def selectable(self) -> tuple[Element, ...]:
        """Elements eligible as the primary statement of a random insertion."""
        own_ctors = [g for g in self.generators if isinstance(g, CtorDesc) and g.cls == self.target.cls]
        return _sorted([*self.test_methods, *self.modifiers, *self.fields, *own_ctors])

    @cached_property
    def elements(self) -> frozenset:
        return frozenset([*self.test_methods, *self.modifiers, *self.fields, *self.generators])

    def allows(self, el: Element) -> bool:
        return el in self.elements


def method_desc(m: A.MethodDef) -> MethodDesc:
    return MethodDesc(m.owner, m.name, tuple(p.type for p in m.params), m.return_type, m.is_static)


def ctor_desc(c: A.MethodDef) -> CtorDesc:
    return CtorDesc(c.owner, tuple(p.type for p in c.params))


def _assigns_this_field(body: list[A.Stmt]) -> bool:
    for s in A.walk_stmts(body):
        if isinstance(s, A.Assign) and s.kind == "field":
            return True
        if isinstance(s, A.FieldAssign) and isinstance(s.obj, A.This):
            return True
    return False


def _self_calls(body: list[A.Stmt]):
    for s in A.walk_stmts(body):
        for top in A.stmt_exprs(s):
            for e in A.walk_exprs(top):
                if isinstance(e, A.Call) and e.kind and e.kind[0] == "virtual":
                    if e.receiver is None or isinstance(e.receiver, A.This):
                        yield e.method


def is_impure(program: CheckedProgram, m: A.MethodDef) -> bool:
    """Syntactic impurity: the method assigns a field of ``this``, directly or
    through an instance method it calls on ``this`` (one level deep)."""
    if m.is_static:
        return False
    if _assigns_this_field(m.body):
        return True
    cls = program.cls(m.owner)
    for name in _self_calls(m.body):
        callee = cls.method(name)
        if callee is not None and _assigns_this_field(callee.body):
            return True
    return False


def target_method_desc(program: CheckedProgram, target_class: str, target_method: str) -> MethodDesc:
    cls = program.classes.get(target_class)
    if cls is None:
        raise UnknownTarget(f"unknown class {target_class}")
    m = cls.method(target_method)
    if m is None:
        raise UnknownTarget(f"unknown target method {target_class}.{target_method}")
    return method_desc(m)


def build_cluster(
    program: CheckedProgram,
    target_class: str,
    target_method: str,
    mode: ClusterMode,
    literals: Optional[LiteralPool] = None,
) -> TestCluster:
    """Build the mode-filtered Test Cluster for one target method.

    STRICT keeps only the target and the constructors of its class. EMOTE
    and WHOLE expose every public method of the target class, constructors
    and static factories of all classes, the impure methods as modifiers and
    the public fields of the target class as assignable.
    """
    target = target_method_desc(program, target_class, target_method)
    cls = program.cls(target_class)
    literals = literals or LiteralPool.from_program(program)
    own_ctors = [ctor_desc(c) for c in cls.constructors if c.public]

    if mode is ClusterMode.STRICT:
        return TestCluster(mode, target, (target,), _sorted(own_ctors), (), (), literals)

    public_methods = [m for m in cls.methods if m.public]
    test_methods = [method_desc(m) for m in public_methods]
    modifiers = [method_desc(m) for m in public_methods if is_impure(program, m)]
    generators: list[Element] = []
    for c in program.program.classes:
        generators.extend(ctor_desc(k) for k in c.constructors if k.public)
        generators.extend(
            method_desc(m)
            for m in c.methods
            if m.public and m.is_static and m.return_type is not None and m.return_type.is_ref
        )
    fields = [FieldDesc(cls.name, f.name, f.type) for f in cls.fields if f.public]
    return TestCluster(
        mode,
        target,
        _sorted(test_methods),
        _sorted(generators),
        _sorted(modifiers),
        _sorted(fields),
        literals,
    )
