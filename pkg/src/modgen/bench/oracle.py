"""Brute-force enumeration of short tests, used as a coverage oracle.

The enumerator explores every sequence of up to ``max_length`` statements
over a Test Cluster, using only the seeded literal pool for primitive
arguments and ``null`` for reference arguments. Sequences that lead to the
same canonical execution state share their futures, so states are
deduplicated and each is expanded once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ..interp import ExecLimits, Execution, Obj, ObjRef, RuntimeFault
from ..lang.ast import BranchGoalId, Type
from ..lang.checker import CheckedProgram
from ..testmodel.cluster import ClusterMode, TestCluster, build_cluster
from ..testmodel.statements import (
    Construct,
    CtorDesc,
    FieldDesc,
    Invoke,
    Lit,
    SetField,
    StaticInvoke,
    TestCase,
    VarRef,
)

DEFAULT_MAX_LENGTH = 6
DEFAULT_NODE_CAP = 200_000


@dataclass
class OracleResult:
    target: str
    mode: ClusterMode
    admitted: bool
    reachable: set[BranchGoalId] = field(default_factory=set)
    witnesses: dict[BranchGoalId, TestCase] = field(default_factory=dict)
    states: int = 0
    transitions: int = 0
    decomposed: bool = False


@dataclass
class _Node:
    execution: Execution
    test: tuple


class _Exhausted(Exception):
    pass


class _Complete(Exception):
    pass


def _snapshot(ex: Execution) -> Execution:
    copy = Execution(ex.program, ex.limits)
    copy.heap = [Obj(o.cls, dict(o.fields)) for o in ex.heap]
    copy.vars = dict(ex.vars)
    return copy


def _consumed_types(cluster: TestCluster) -> set[Type]:
    types = set()
    for el in cluster.elements:
        if isinstance(el, FieldDesc):
            types.add(Type("ref", el.cls))
            types.add(el.type)
        elif isinstance(el, CtorDesc):
            types.update(el.params)
        else:
            types.update(el.params)
            if not el.static:
                types.add(Type("ref", el.cls))
    return types


def _takes_refs(cluster: TestCluster) -> bool:
    for el in cluster.elements:
        params = (el.type,) if isinstance(el, FieldDesc) else el.params
        if any(t.is_ref for t in params):
            return True
    return False


class Enumerator:
    def __init__(self, program: CheckedProgram, cluster: TestCluster, attributed: bool,
                 max_length: int = DEFAULT_MAX_LENGTH, node_cap: int = DEFAULT_NODE_CAP,
                 limits: ExecLimits = ExecLimits()):
        self.program = program
        self.cluster = cluster
        self.target = cluster.target
        self.attributed = attributed
        self.max_length = max_length
        self.node_cap = node_cap
        self.limits = limits
        self.goals = set(program.method(cluster.target.cls, cluster.target.name).branch_goals)
        self.consumed = _consumed_types(cluster)
        # without reference parameters objects never interact, so one
        # receiver object per test is enough
        self.decomposed = not _takes_refs(cluster)
        self.elements = sorted(cluster.elements, key=lambda e: (type(e).__name__, str(e)))
        self.transitions = 0

    # -- state canonicalization

    def _live_vars(self, ex: Execution, var_types: dict[str, Type]) -> list[tuple[str, Type, object]]:
        """Variables that can still influence the future, deduplicated by value."""
        seen = set()
        out = []
        pool = self.cluster.literals
        for name, value in ex.vars.items():
            ty = var_types[name]
            if ty not in self.consumed and not any(ty.accepts(t) or t.accepts(ty) for t in self.consumed):
                continue
            if value is None:
                continue
            if ty.is_primitive and value in pool.seeded(ty):
                continue
            key = (str(ty), ("ref", value.id) if isinstance(value, ObjRef) else ("val", value))
            if key in seen:
                continue
            seen.add(key)
            out.append((name, ty, value))
        return out

    def _shape(self, ex: Execution, value, path: frozenset) -> tuple:
        if not isinstance(value, ObjRef):
            return ("v", repr(value))
        if value.id in path:
            return ("cycle",)
        obj = ex.heap[value.id]
        inner = path | {value.id}
        return (obj.cls,) + tuple((k, self._shape(ex, obj.fields[k], inner)) for k in sorted(obj.fields))

    def state_key(self, ex: Execution, var_types: dict[str, Type]) -> tuple:
        live = [(ty, value) for _, ty, value in self._live_vars(ex, var_types)]
        live.sort(key=lambda tv: (str(tv[0]), repr(self._shape(ex, tv[1], frozenset()))))
        numbering: dict[int, int] = {}
        parts = []

        def visit(value):
            if not isinstance(value, ObjRef):
                return ("v", repr(value))
            if value.id in numbering:
                return ("@", numbering[value.id])
            numbering[value.id] = len(numbering)
            obj = ex.heap[value.id]
            return ("o", numbering[value.id], obj.cls,
                    tuple((k, visit(obj.fields[k])) for k in sorted(obj.fields)))

        for ty, value in live:
            parts.append((str(ty), visit(value)))
        return tuple(parts)

    # -- transitions

    def _choices(self, ty: Type, vars_: list[tuple[str, Type]]) -> list:
        out = []
        if ty.is_primitive:
            out.extend(Lit(v) for v in self.cluster.literals.seeded(ty))
        else:
            out.append(Lit(None))
        out.extend(VarRef(n) for n, t in vars_ if ty.accepts(t))
        return out

    def _statements(self, node: _Node, var_types: dict[str, Type], last: bool, var: str):
        vars_ = [(n, ty) for n, ty, _ in self._live_vars(node.execution, var_types)]
        if self.decomposed:
            has_object = any(t.is_ref for n, t in vars_)
        for el in self.elements:
            if last and not self._may_cover(el):
                continue
            if isinstance(el, FieldDesc):
                recvs = [n for n, t in vars_ if t == Type("ref", el.cls)]
                for r, v in itertools.product(recvs, self._choices(el.type, vars_)):
                    yield SetField(r, el, v)
                continue
            arg_choices = [self._choices(t, vars_) for t in el.params]
            if isinstance(el, CtorDesc) or (el.static and el.ret is not None and el.ret.is_ref):
                if self.decomposed and has_object:
                    continue
            if isinstance(el, CtorDesc):
                for args in itertools.product(*arg_choices):
                    yield Construct(var, el, tuple(args))
            elif el.static:
                for args in itertools.product(*arg_choices):
                    yield StaticInvoke(var if el.ret is not None else None, el, tuple(args))
            else:
                recvs = [n for n, t in vars_ if t == Type("ref", el.cls)]
                for r in recvs:
                    for args in itertools.product(*arg_choices):
                        yield Invoke(var if el.ret is not None else None, r, el, tuple(args))

    def _may_cover(self, el) -> bool:
        if self.attributed or self.cluster.mode is ClusterMode.STRICT:
            return el == self.target
        return not isinstance(el, FieldDesc)

    def _covered(self, events) -> set[BranchGoalId]:
        target = self.target.qualified
        return {e.goal for e in events
                if e.goal in self.goals and (not self.attributed or e.root == target)}

    def run(self) -> OracleResult:
        result = OracleResult(self.target.qualified, self.cluster.mode, True, decomposed=self.decomposed)
        root = _Node(Execution(self.program, self.limits), ())
        frontier = [root]
        seen = {self.state_key(root.execution, {})}
        if not self.goals:
            return result
        try:
            for depth in range(self.max_length):
                last = depth == self.max_length - 1
                next_frontier = []
                for node in frontier:
                    var_types = TestCase(node.test).var_types
                    var = f"v{len(node.test)}"
                    for stmt in self._statements(node, var_types, last, var):
                        self.transitions += 1
                        if self.transitions > self.node_cap:
                            raise _Exhausted
                        child = self._step(node, stmt, result)
                        if result.reachable == self.goals:
                            raise _Complete
                        if child is None or last:
                            continue
                        types = dict(var_types)
                        if getattr(stmt, "var", None) is not None:
                            types[stmt.var] = stmt.defined_type
                        key = self.state_key(child.execution, types)
                        if key not in seen:
                            seen.add(key)
                            next_frontier.append(child)
                frontier = next_frontier
                if not frontier:
                    break
        except _Complete:
            pass
        except _Exhausted:
            result.admitted = False
        result.states = len(seen)
        result.transitions = self.transitions
        return result

    def _step(self, node: _Node, stmt, result: OracleResult) -> Optional[_Node]:
        ex = _snapshot(node.execution)
        ex.steps = 0
        mark = len(ex.events)
        index = len(node.test)
        test = node.test + (stmt,)
        try:
            ex.run_statement(stmt, index)
            ok = True
        except (RuntimeFault, RecursionError):
            ok = False
        for g in self._covered(ex.events[mark:]):
            if g not in result.reachable:
                result.reachable.add(g)
                result.witnesses[g] = TestCase(test)
        ex.events = []
        return _Node(ex, test) if ok else None


def enumerate_reachable(program: CheckedProgram, target_class: str, target_method: str,
                        mode: ClusterMode, attributed: Optional[bool] = None,
                        max_length: int = DEFAULT_MAX_LENGTH,
                        node_cap: int = DEFAULT_NODE_CAP) -> OracleResult:
    """Goals of the target coverable by some test of at most ``max_length``
    statements under ``mode``; ``admitted`` is False when the node cap hit."""
    if attributed is None:
        attributed = mode is ClusterMode.EMOTE
    cluster = build_cluster(program, target_class, target_method, mode)
    return Enumerator(program, cluster, attributed, max_length, node_cap).run()
