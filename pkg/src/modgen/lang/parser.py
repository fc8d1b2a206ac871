"""Lexer and recursive-descent parser for MiniOO source files."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import ast as A


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.message}"


class LangError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.format() for d in self.diagnostics))


class ParseError(LangError):
    pass


KEYWORDS = {
    "class", "public", "private", "static", "void", "int", "boolean", "String",
    "if", "else", "while", "return", "new", "null", "true", "false", "this",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*<>=!(){};,.])
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass
class Token:
    kind: str  # "int" | "str" | "ident" | "kw" | "op" | "eof"
    text: str
    line: int
    col: int
    value: object = None


def _unescape(body: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise ParseError([Diagnostic(line, col, f"unknown escape \\{nxt}")])
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError([Diagnostic(line, col, f"unexpected character {source[pos]!r}")])
        kind = m.lastgroup
        text = m.group()
        if kind == "int":
            tokens.append(Token("int", text, line, col, int(text)))
        elif kind == "str":
            tokens.append(Token("str", text, line, col, _unescape(text[1:-1], line, col)))
        elif kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, line, col))
        elif kind == "op":
            tokens.append(Token("op", text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*",),
]

_TYPE_KEYWORDS = {"int", "boolean", "String"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self._pred_counter = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError([Diagnostic(tok.line, tok.col, message)])

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected '{text}' but found '{found}'")
        tok = self.tok
        self.pos += 1
        return tok

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected identifier but found '{self.tok.text or 'end of input'}'")
        tok = self.tok
        self.pos += 1
        return tok

    # -- declarations

    def parse_program(self) -> A.Program:
        classes = []
        seen = {}
        while self.tok.kind != "eof":
            start = self.tok
            cls = self.parse_class()
            if cls.name in seen:
                self.error(f"duplicate class {cls.name}", start)
            seen[cls.name] = cls
            classes.append(cls)
        return A.Program(classes)

    def parse_class(self) -> A.ClassDef:
        start = self.expect("class")
        name = self.expect_ident().text
        self.expect("{")
        fields, ctors, methods = [], [], []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated class body")
            member = self.parse_member(name)
            if isinstance(member, A.FieldDef):
                fields.append(member)
            elif member.is_constructor:
                ctors.append(member)
            else:
                methods.append(member)
        self.expect("}")
        if not ctors:
            ctors.append(
                A.MethodDef(name, [], None, [], is_constructor=True, synthesized=True,
                            line=start.line, col=start.col)
            )
        for m in ctors + methods:
            m.owner = name
        return A.ClassDef(name, fields, ctors, methods, line=start.line, col=start.col)

    def parse_member(self, class_name: str):
        start = self.tok
        public, static, explicit = True, False, False
        while self.at("public") or self.at("private") or self.at("static"):
            tok = self.tok
            self.pos += 1
            if tok.text == "static":
                static = True
            else:
                public = tok.text == "public"
                explicit = True
        # constructor: ClassName '('
        if self.tok.kind == "ident" and self.tok.text == class_name and self.peek().text == "(":
            if static:
                self.error("constructors cannot be static")
            self.pos += 1
            params = self.parse_params()
            self._pred_counter = 0
            body = self.parse_block()
            return A.MethodDef(class_name, params, None, body, public=public,
                               is_constructor=True, line=start.line, col=start.col)
        if self.accept("void"):
            ret = None
        else:
            ret = self.parse_type()
        name_tok = self.expect_ident()
        if self.at("("):
            params = self.parse_params()
            self._pred_counter = 0
            body = self.parse_block()
            return A.MethodDef(name_tok.text, params, ret, body, is_static=static,
                               public=public, line=start.line, col=start.col)
        if ret is None:
            self.error("fields cannot be void", name_tok)
        if static:
            self.error("static fields are not supported", start)
        self.expect(";")
        # fields without a modifier default to private
        return A.FieldDef(name_tok.text, ret, public=public and explicit,
                          line=start.line, col=start.col)

    def parse_type(self) -> A.Type:
        tok = self.tok
        if tok.kind == "kw" and tok.text in _TYPE_KEYWORDS:
            self.pos += 1
            return A.type_from_name(tok.text)
        if tok.kind == "ident":
            self.pos += 1
            return A.ref(tok.text)
        self.error(f"expected type but found '{tok.text or 'end of input'}'")

    def parse_params(self) -> list[A.Param]:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ty = self.parse_type()
                params.append(A.Param(self.expect_ident().text, ty))
                if not self.accept(","):
                    break
        self.expect(")")
        return params

    # -- statements

    def parse_block(self) -> list[A.Stmt]:
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            body.append(self.parse_stmt())
        self.expect("}")
        return body

    def parse_body(self) -> list[A.Stmt]:
        if self.at("{"):
            return self.parse_block()
        return [self.parse_stmt()]

    def _next_index(self) -> int:
        idx = self._pred_counter
        self._pred_counter += 1
        return idx

    def parse_stmt(self) -> A.Stmt:
        tok = self.tok
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            index = self._next_index()
            then = self.parse_body()
            orelse = []
            if self.accept("else"):
                orelse = [self.parse_stmt()] if self.at("if") else self.parse_body()
            return A.If(cond, then, orelse, index, line=tok.line, col=tok.col)
        if self.accept("while"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            index = self._next_index()
            body = self.parse_body()
            return A.While(cond, body, index, line=tok.line, col=tok.col)
        if self.accept("return"):
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return A.Return(value, line=tok.line, col=tok.col)
        if self._looks_like_decl():
            ty = self.parse_type()
            name = self.expect_ident().text
            self.expect("=")
            value = self.parse_expr()
            self.expect(";")
            return A.Assign(name, value, ty, line=tok.line, col=tok.col)
        expr = self.parse_expr()
        if self.accept("="):
            value = self.parse_expr()
            self.expect(";")
            if isinstance(expr, A.Name):
                return A.Assign(expr.id, value, line=tok.line, col=tok.col)
            if isinstance(expr, A.FieldRead):
                return A.FieldAssign(expr.obj, expr.field, value, line=tok.line, col=tok.col)
            self.error("invalid assignment target", tok)
        self.expect(";")
        return A.ExprStmt(expr, line=tok.line, col=tok.col)

    def _looks_like_decl(self) -> bool:
        tok = self.tok
        if tok.kind == "kw" and tok.text in _TYPE_KEYWORDS:
            return True
        return tok.kind == "ident" and self.peek().kind == "ident"

    # -- expressions

    def parse_expr(self, level: int = 0) -> A.Expr:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_expr(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op_tok = self.tok
            self.pos += 1
            right = self.parse_expr(level + 1)
            left = A.BinOp(op_tok.text, left, right, line=op_tok.line, col=op_tok.col)
        return left

    def parse_unary(self) -> A.Expr:
        tok = self.tok
        if self.accept("!") or self.accept("-"):
            operand = self.parse_unary()
            if tok.text == "-" and isinstance(operand, A.IntLit) and operand.value >= 0:
                # fold so that printed negative literals re-parse identically
                return A.IntLit(-operand.value, line=tok.line, col=tok.col)
            return A.Unary(tok.text, operand, line=tok.line, col=tok.col)
        return self.parse_postfix()

    def parse_postfix(self) -> A.Expr:
        expr = self.parse_primary()
        while self.at("."):
            self.pos += 1
            name = self.expect_ident()
            if self.at("("):
                args = self.parse_args()
                expr = A.Call(expr, name.text, args, line=name.line, col=name.col)
            else:
                expr = A.FieldRead(expr, name.text, line=name.line, col=name.col)
        return expr

    def parse_args(self) -> list[A.Expr]:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return args

    def parse_primary(self) -> A.Expr:
        tok = self.tok
        pos = dict(line=tok.line, col=tok.col)
        if tok.kind == "int":
            self.pos += 1
            return A.IntLit(tok.value, **pos)
        if tok.kind == "str":
            self.pos += 1
            return A.StrLit(tok.value, **pos)
        if self.accept("true"):
            return A.BoolLit(True, **pos)
        if self.accept("false"):
            return A.BoolLit(False, **pos)
        if self.accept("null"):
            return A.NullLit(**pos)
        if self.accept("this"):
            return A.This(**pos)
        if self.accept("new"):
            cls = self.expect_ident().text
            return A.New(cls, self.parse_args(), **pos)
        if self.accept("("):
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind == "ident":
            self.pos += 1
            if self.at("("):
                return A.Call(None, tok.text, self.parse_args(), **pos)
            return A.Name(tok.text, **pos)
        self.error(f"unexpected '{tok.text or 'end of input'}'")


def parse_program(source: str) -> A.Program:
    """Parse MiniOO source text into a :class:`Program`.

    Raises :class:`ParseError` carrying a single positioned diagnostic on
    the first syntax error.
    """
    return Parser(tokenize(source)).parse_program()
