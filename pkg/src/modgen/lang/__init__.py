"""The MiniOO language: AST, parser, pretty-printer and checker."""

from .ast import (
    BOOL,
    INT,
    STR,
    Arm,
    BranchGoalId,
    ClassDef,
    MethodDef,
    Program,
    Type,
    ref,
)
from .checker import CheckedProgram, CheckError, enumerate_branch_goals, typecheck
from .parser import Diagnostic, LangError, ParseError, parse_program
from .printer import print_program


def load_program(source: str) -> CheckedProgram:
    """Parse and typecheck ``source`` in one step."""
    return typecheck(parse_program(source))


__all__ = [
    "BOOL", "INT", "STR", "Arm", "BranchGoalId", "CheckError", "CheckedProgram",
    "ClassDef", "Diagnostic", "LangError", "MethodDef", "ParseError", "Program",
    "Type", "enumerate_branch_goals", "load_program", "parse_program",
    "print_program", "ref", "typecheck",
]
