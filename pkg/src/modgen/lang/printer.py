"""Pretty-printer producing canonical MiniOO source."""

from __future__ import annotations

from . import ast as A

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6}
_UNARY_PREC = 7
_POSTFIX_PREC = 8


def quote(s: str) -> str:
    body = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{body}"'


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.Unary):
        return _UNARY_PREC
    if isinstance(e, A.IntLit) and e.value < 0:
        return _UNARY_PREC
    return _POSTFIX_PREC + 1


def expr_str(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.StrLit):
        return quote(e.value)
    if isinstance(e, A.NullLit):
        return "null"
    if isinstance(e, A.This):
        return "this"
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.FieldRead):
        return f"{_wrap(e.obj, _POSTFIX_PREC)}.{e.field}"
    if isinstance(e, A.Unary):
        return f"{e.op}{_wrap(e.operand, _UNARY_PREC)}"
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        left = _wrap(e.left, p)
        right = _wrap(e.right, p + 1)  # left-associative
        return f"{left} {e.op} {right}"
    if isinstance(e, A.Call):
        args = ", ".join(expr_str(a) for a in e.args)
        if e.receiver is None:
            return f"{e.method}({args})"
        return f"{_wrap(e.receiver, _POSTFIX_PREC)}.{e.method}({args})"
    if isinstance(e, A.New):
        return f"new {e.cls}({', '.join(expr_str(a) for a in e.args)})"
    raise TypeError(f"unknown expression {e!r}")


def _wrap(e: A.Expr, min_prec: int) -> str:
    text = expr_str(e)
    if _prec(e) < min_prec:
        return f"({text})"
    return text


def _stmts(body: list[A.Stmt], indent: int) -> list[str]:
    lines = []
    for s in body:
        lines.extend(_stmt(s, indent))
    return lines


def _stmt(s: A.Stmt, indent: int) -> list[str]:
    pad = "    " * indent
    if isinstance(s, A.Assign):
        if s.decl is not None:
            return [f"{pad}{s.decl} {s.target} = {expr_str(s.value)};"]
        return [f"{pad}{s.target} = {expr_str(s.value)};"]
    if isinstance(s, A.FieldAssign):
        return [f"{pad}{_wrap(s.obj, _POSTFIX_PREC)}.{s.field} = {expr_str(s.value)};"]
    if isinstance(s, A.Return):
        if s.value is None:
            return [f"{pad}return;"]
        return [f"{pad}return {expr_str(s.value)};"]
    if isinstance(s, A.ExprStmt):
        return [f"{pad}{expr_str(s.expr)};"]
    if isinstance(s, A.While):
        return [f"{pad}while ({expr_str(s.cond)}) {{", *_stmts(s.body, indent + 1), f"{pad}}}"]
    if isinstance(s, A.If):
        lines = [f"{pad}if ({expr_str(s.cond)}) {{", *_stmts(s.then, indent + 1)]
        if len(s.orelse) == 1 and isinstance(s.orelse[0], A.If):
            nested = _stmt(s.orelse[0], indent)
            lines.append(f"{pad}}} else {nested[0].lstrip()}")
            lines.extend(nested[1:])
            return lines
        if s.orelse:
            lines.append(f"{pad}}} else {{")
            lines.extend(_stmts(s.orelse, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"unknown statement {s!r}")


def _method(m: A.MethodDef, cls: str) -> list[str]:
    mods = "public " if m.public else "private "
    params = ", ".join(f"{p.type} {p.name}" for p in m.params)
    if m.is_constructor:
        head = f"    {mods}{cls}({params}) {{"
    else:
        static = "static " if m.is_static else ""
        ret = "void" if m.return_type is None else str(m.return_type)
        head = f"    {mods}{static}{ret} {m.name}({params}) {{"
    return [head, *_stmts(m.body, 2), "    }"]


def print_class(c: A.ClassDef) -> str:
    lines = [f"class {c.name} {{"]
    for f in c.fields:
        vis = "public" if f.public else "private"
        lines.append(f"    {vis} {f.type} {f.name};")
    for m in c.constructors:
        if not m.synthesized:
            lines.extend(_method(m, c.name))
    for m in c.methods:
        lines.extend(_method(m, c.name))
    lines.append("}")
    return "\n".join(lines)


def print_program(p: A.Program) -> str:
    return "\n\n".join(print_class(c) for c in p.classes) + "\n"
