"""Test cases as typed statement sequences, and the Test Cluster."""

from .cluster import (
    ClusterMode,
    LiteralPool,
    TestCluster,
    UnknownTarget,
    build_cluster,
    is_impure,
    method_desc,
    target_method_desc,
)
from .ops import (
    Saturated,
    enforce_target_suffix,
    modify_statement,
    random_statement_insertion,
    type_repair,
)
from .statements import (
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
    validate,
)

__all__ = [
    "ClusterMode", "Construct", "CtorDesc", "FieldDesc", "Invoke", "Lit", "Literal",
    "LiteralPool", "MethodDesc", "Saturated", "SetField", "StaticInvoke", "TestCase",
    "TestCluster", "UnknownTarget", "VarRef", "build_cluster", "enforce_target_suffix",
    "invokes", "is_impure", "method_desc", "modify_statement", "random_statement_insertion",
    "target_method_desc", "type_repair", "validate",
]
