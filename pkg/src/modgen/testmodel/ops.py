"""Random construction and repair of test cases over a Test Cluster.

All operations are pure: they take a :class:`TestCase` and an explicit
``random.Random`` and return a new, canonically renamed test case.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from ..lang.ast import Type
from .cluster import RANDOM_STR_ALPHABET, TestCluster
from .statements import (
    Arg,
    Construct,
    CtorDesc,
    FieldDesc,
    Invoke,
    Lit,
    Literal,
    MethodDesc,
    SetField,
    StaticInvoke,
    TestCase,
    VarRef,
    invokes,
)

MAX_GENERATOR_DEPTH = 4
REUSE_PRIMITIVE_PROB = 0.1
REUSE_OBJECT_PROB = 0.8
NULL_ARG_PROB = 0.05


class Saturated(Exception):
    """No selectable element's requirements could be satisfied."""


class _Builder:
    """Mutable working copy of a statement list with fresh-name allocation."""

    def __init__(self, test: TestCase, cluster: TestCluster, rng):
        self.stmts = list(test.statements)
        self.cluster = cluster
        self.rng = rng
        self._next = 0
        for s in self.stmts:
            if s.var is not None and s.var.startswith("v") and s.var[1:].isdigit():
                self._next = max(self._next, int(s.var[1:]) + 1)

    def fresh(self) -> str:
        name = f"v{self._next}"
        self._next += 1
        return name

    def vars_before(self, pos: int, ty: Type) -> list[str]:
        return [s.var for s in self.stmts[:pos] if s.var is not None and ty.accepts(s.defined_type)]

    def result(self) -> TestCase:
        return TestCase(tuple(self.stmts)).canonical()

    # Each satisfy_* call may insert supporting statements at ``pos`` and
    # returns (arg, new_pos) where new_pos is where the consumer now goes.

    def satisfy(self, ty: Type, pos: int, depth: int, receiver: bool = False,
                literal_stmt: bool = False) -> tuple[Arg, int]:
        rng = self.rng
        existing = self.vars_before(pos, ty)
        if ty.is_primitive:
            if existing and rng.random() < REUSE_PRIMITIVE_PROB:
                return VarRef(rng.choice(existing)), pos
            value = self.cluster.literals.sample(ty, rng)
            if literal_stmt:
                var = self.fresh()
                self.stmts.insert(pos, Literal(var, ty, value))
                return VarRef(var), pos + 1
            return Lit(value), pos
        if not receiver and rng.random() < NULL_ARG_PROB:
            return Lit(None), pos
        if existing and rng.random() < REUSE_OBJECT_PROB:
            return VarRef(rng.choice(existing)), pos
        try:
            return self.generate(ty, pos, depth)
        except Saturated:
            if existing:
                return VarRef(rng.choice(existing)), pos
            if not receiver:
                # an argument nobody can build is passed as null
                return Lit(None), pos
            raise

    def generate(self, ty: Type, pos: int, depth: int) -> tuple[Arg, int]:
        if depth >= MAX_GENERATOR_DEPTH:
            raise Saturated(f"generator depth exceeded for {ty}")
        gens = self.cluster.generators_for(ty)
        if not gens:
            raise Saturated(f"no generator for {ty}")
        gen = self.rng.choice(gens)
        var = self.fresh()
        args, pos = self.satisfy_args(gen.params, pos, depth + 1)
        if isinstance(gen, CtorDesc):
            self.stmts.insert(pos, Construct(var, gen, args))
        else:
            self.stmts.insert(pos, StaticInvoke(var, gen, args))
        return VarRef(var), pos + 1

    def satisfy_args(self, params, pos: int, depth: int) -> tuple[tuple[Arg, ...], int]:
        args = []
        for ty in params:
            arg, pos = self.satisfy(ty, pos, depth)
            args.append(arg)
        return tuple(args), pos

    def make_statement(self, el, pos: int, var: Optional[str] = None):
        """Build a statement for element ``el`` to sit at ``pos``; supporting
        statements are inserted before it. Returns (statement, pos)."""
        if isinstance(el, CtorDesc):
            args, pos = self.satisfy_args(el.params, pos, 1)
            return Construct(var or self.fresh(), el, args), pos
        if isinstance(el, FieldDesc):
            recv, pos = self.satisfy(_ref(el.cls), pos, 1, receiver=True)
            value, pos = self.satisfy(el.type, pos, 1)
            return SetField(recv.name, el, value), pos
        if el.static:
            args, pos = self.satisfy_args(el.params, pos, 1)
            out = var if var is not None else (self.fresh() if el.ret is not None else None)
            return StaticInvoke(out, el, args), pos
        recv, pos = self.satisfy(_ref(el.cls), pos, 1, receiver=True)
        args, pos = self.satisfy_args(el.params, pos, 1)
        out = var if var is not None else (self.fresh() if el.ret is not None else None)
        return Invoke(out, recv.name, el, args), pos


def _ref(cls: str) -> Type:
    return Type("ref", cls)


def random_statement_insertion(
    test: TestCase, cluster: TestCluster, rng, position: Optional[int] = None
) -> TestCase:
    """Insert one random cluster element, materializing its inputs.

    Elements are tried in random order until one can be satisfied; raises
    :class:`Saturated` if none can.
    """
    elements = list(cluster.selectable)
    rng.shuffle(elements)
    pos0 = rng.randint(0, len(test)) if position is None else position
    for el in elements:
        b = _Builder(test, cluster, rng)
        try:
            stmt, pos = b.make_statement(el, pos0)
        except Saturated:
            continue
        b.stmts.insert(pos, stmt)
        return b.result()
    raise Saturated("no selectable element can be satisfied")


def enforce_target_suffix(test: TestCase, target: MethodDesc, cluster: TestCluster, rng) -> TestCase:
    """Make the last statement a call to ``target``.

    Statements after the last target call are dropped; if there is no target
    call, one is appended with its receiver and arguments materialized.
    """
    last = None
    for i, s in enumerate(test.statements):
        if invokes(s, target):
            last = i
    if last is not None:
        if last == len(test) - 1:
            return test
        return TestCase(test.statements[: last + 1]).canonical()
    b = _Builder(test, cluster, rng)
    stmt, pos = b.make_statement(target, len(b.stmts))
    b.stmts.insert(pos, stmt)
    return b.result()


def type_repair(test: TestCase, cluster: TestCluster, rng) -> TestCase:
    """Rebind or satisfy every dangling or ill-typed variable reference.

    A bad reference is rebound to a uniformly chosen earlier variable of a
    compatible type; if none exists a generator (objects) or literal
    statement (primitives) is inserted in front of the consumer.
    """
    if _is_valid(test):
        return test
    b = _Builder(test, cluster, rng)
    pos = 0
    seen: dict[str, Type] = {}
    while pos < len(b.stmts):
        stmt = b.stmts[pos]
        for slot, arg, want in stmt.slots():
            if isinstance(arg, VarRef):
                have = seen.get(arg.name)
                if have is not None and want.accepts(have):
                    continue
            elif slot != -1:
                continue
            candidates = [v for v, t in seen.items() if want.accepts(t)]
            if candidates:
                new = VarRef(rng.choice(candidates))
            else:
                at = pos
                if want.is_primitive:
                    new, pos = b.satisfy(want, pos, 1, literal_stmt=True)
                else:
                    new, pos = b.generate(want, pos, 1)
                for s in b.stmts[at:pos]:
                    seen[s.var] = s.defined_type
            stmt = stmt.with_slot(slot, new)
        if stmt.var is not None and stmt.var in seen:
            stmt = _rename_def(stmt, b.fresh())
        b.stmts[pos] = stmt
        if stmt.var is not None:
            seen[stmt.var] = stmt.defined_type
        pos += 1
    return b.result()


def _rename_def(stmt, name: str):
    return replace(stmt, var=name)


def _is_valid(test: TestCase) -> bool:
    scope: dict[str, Type] = {}
    for s in test.statements:
        for slot, arg, want in s.slots():
            if isinstance(arg, VarRef):
                have = scope.get(arg.name)
                if have is None or not want.accepts(have):
                    return False
            elif slot == -1:
                return False
        if s.var is not None:
            if s.var in scope:
                return False
            scope[s.var] = s.defined_type
    return True


# --- statement-level modification used by mutation ---------------------------


def perturb_value(value, ty: Type, cluster: TestCluster, rng):
    """Small random change to a literal of type ``ty``."""
    if ty.kind == "bool":
        return not value
    if ty.is_ref:
        return value
    if rng.random() < 0.2:
        return cluster.literals.sample(ty, rng)
    if ty.kind == "int":
        delta = rng.randint(1, 10)
        return value + delta if rng.random() < 0.5 else value - delta
    s = value
    choice = rng.randrange(3)
    if choice == 0 or not s:
        i = rng.randint(0, len(s))
        return s[:i] + rng.choice(RANDOM_STR_ALPHABET) + s[i:]
    i = rng.randrange(len(s))
    if choice == 1:
        return s[:i] + s[i + 1:]
    return s[:i] + rng.choice(RANDOM_STR_ALPHABET) + s[i + 1:]


def modify_statement(test: TestCase, index: int, cluster: TestCluster, rng) -> TestCase:
    """Change statement ``index``: swap its call for a cluster element with
    the same return type, or alter one of its inputs."""
    stmt = test.statements[index]
    if isinstance(stmt, Literal):
        new = Literal(stmt.var, stmt.type, perturb_value(stmt.value, stmt.type, cluster, rng))
        return _replace_at(test, index, new)

    swaps = _swap_candidates(stmt, cluster)
    slots = [(slot, arg, want) for slot, arg, want in stmt.slots() if slot != -1]
    if swaps and (not slots or rng.random() < 0.5):
        el = rng.choice(swaps)
        b = _Builder(test, cluster, rng)
        del b.stmts[index]
        new, pos = b.make_statement(el, index, var=stmt.var)
        b.stmts.insert(pos, new)
        return b.result()
    if not slots:
        raise Saturated("nothing to modify")
    slot, arg, want = rng.choice(slots)
    if isinstance(arg, Lit) and arg.value is not None and rng.random() < 0.8:
        new_arg = Lit(perturb_value(arg.value, want, cluster, rng))
        return _replace_at(test, index, stmt.with_slot(slot, new_arg))
    b = _Builder(test, cluster, rng)
    new_arg, pos = b.satisfy(want, index, 1)
    b.stmts[pos] = stmt.with_slot(slot, new_arg)
    return b.result()


def _replace_at(test: TestCase, index: int, stmt) -> TestCase:
    stmts = list(test.statements)
    stmts[index] = stmt
    return TestCase(tuple(stmts))


def _swap_candidates(stmt, cluster: TestCluster) -> list:
    if isinstance(stmt, Construct):
        ret = stmt.ctor.ret
        pool = cluster.generators
        current = stmt.ctor
    elif isinstance(stmt, (Invoke, StaticInvoke)):
        ret = stmt.method.ret
        pool = [*cluster.test_methods, *cluster.modifiers, *cluster.generators]
        current = stmt.method
    else:
        return []
    out = []
    for el in pool:
        if isinstance(el, FieldDesc) or el == current or el in out:
            continue
        if el.ret == ret:
            out.append(el)
    return out
