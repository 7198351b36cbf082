"""Text format for maps and rational expressions.

Grammar::

    program   := 'map' NAME '{' 'vars' ':' names ';' ['params' ':' [names] ';'] stmt* '}'
    stmt      := IDENT "'" '=' expr ';' | 'param' IDENT "'" '=' expr ';'
    expr      := term (('+' | '-') term)*
    term      := unary (('*' | '/') unary)*
    unary     := ('+' | '-') unary | power
    power     := atom ['^' INT]
    atom      := INT | IDENT | '(' expr ')'

``#`` starts a comment running to the end of the line.  Unary minus binds
looser than ``^``, so ``-q1^2`` is ``-(q1^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import RationalFunction, VariableRegistry
from .errors import ParseError, UndeclaredSymbol, ValidationError
from .maps import BirationalMap, make_map

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)"
    r"|(?P<op>[-+*/^(){};:,'=])"
)
KEYWORDS = {"map", "vars", "params", "param"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            text = m.group()
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, text, line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, tokens: list[Token], registry: VariableRegistry | None = None, polynomial: bool = False):
        self.toks = tokens
        self.i = 0
        self.registry = registry
        self.polynomial = polynomial

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident":
            self.fail(f"expected an identifier, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def names(self) -> list[Token]:
        out = [self.ident()]
        while self.accept(","):
            out.append(self.ident())
        return out

    # expressions
    def expr(self) -> RationalFunction:
        acc = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RationalFunction:
        acc = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op_tok = self.tok
            self.i += 1
            rhs = self.unary()
            if op_tok.text == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ValidationError(f"line {op_tok.line}, column {op_tok.col}: division by zero")
                if self.polynomial and not rhs.is_constant():
                    self.fail("division by a non-constant in a polynomial", op_tok)
                acc = acc / rhs
        return acc

    def unary(self) -> RationalFunction:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.accept("^"):
            tok = self.tok
            if tok.kind != "int":
                self.fail("exponent must be a non-negative integer literal")
            self.i += 1
            return base ** int(tok.text)
        return base

    def atom(self) -> RationalFunction:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return self.registry.const(int(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text not in self.registry:
                raise UndeclaredSymbol(f"line {tok.line}, column {tok.col}: undeclared symbol {tok.text!r}")
            return self.registry.var(tok.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail(f"unexpected token {tok.text or 'end of input'!r}")

    def end(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected trailing input {self.tok.text!r}")


def parse_expression(text: str, registry: VariableRegistry) -> RationalFunction:
    p = _Parser(tokenize(text), registry)
    e = p.expr()
    p.end()
    return e


def parse_polynomial(text: str, registry: VariableRegistry):
    p = _Parser(tokenize(text), registry, polynomial=True)
    e = p.expr()
    p.end()
    return e.num * (1 / e.den.terms()[(0,) * len(registry)])


def parse_map(src: str) -> BirationalMap:
    p = _Parser(tokenize(src))
    p.expect("map")
    name = p.ident().text
    p.expect("{")
    p.expect("vars")
    p.expect(":")
    var_toks = p.names()
    p.expect(";")
    param_toks: list[Token] = []
    if p.accept("params"):
        p.expect(":")
        if p.tok.kind == "ident":
            param_toks = p.names()
        p.expect(";")
    declared = [t.text for t in var_toks + param_toks]
    for t in var_toks + param_toks:
        if declared.count(t.text) > 1:
            raise ValidationError(f"line {t.line}, column {t.col}: {t.text!r} declared twice")
    if len(var_toks) != 4:
        raise ValidationError(f"line {var_toks[0].line}: exactly four phase variables required, got {len(var_toks)}")
    phase = tuple(t.text for t in var_toks)
    kinds = {v: "phase" for v in phase}
    kinds.update({t.text: "parameter" for t in param_toks})
    registry = VariableRegistry(declared, kinds)
    p.registry = registry
    images: dict[str, RationalFunction] = {}
    updates: dict[str, RationalFunction] = {}
    while not p.accept("}"):
        if p.tok.kind == "eof":
            p.fail("missing closing '}'")
        is_param = p.accept("param")
        lhs = p.ident()
        p.expect("'")
        p.expect("=")
        rhs = p.expr()
        p.expect(";")
        where = f"line {lhs.line}, column {lhs.col}"
        if lhs.text not in registry:
            raise UndeclaredSymbol(f"{where}: undeclared symbol {lhs.text!r}")
        table = updates if is_param else images
        if is_param != (lhs.text not in phase):
            kind = "parameter" if lhs.text not in phase else "phase variable"
            raise ValidationError(f"{where}: {lhs.text!r} is a {kind}; use {'param ' if kind == 'parameter' else ''}{lhs.text}' = ...")
        if lhs.text in table:
            raise ValidationError(f"{where}: {lhs.text!r} assigned twice")
        table[lhs.text] = rhs
    p.end()
    return make_map(name, registry, images, updates, phase=phase)


def format_map(m: BirationalMap) -> str:
    name = re.sub(r"[^A-Za-z0-9_.]", "_", m.name) or "m"
    if not re.match(r"[A-Za-z_]", name):
        name = "m_" + name
    lines = [f"map {name} {{", f"  vars: {', '.join(m.phase)};"]
    lines.append(f"  params: {', '.join(m.params)};" if m.params else "  params: ;")
    for v, e in zip(m.phase, m.images):
        lines.append(f"  {v}' = {e};")
    for pname, e in m.changed_params().items():
        lines.append(f"  param {pname}' = {e};")
    lines.append("}")
    return "\n".join(lines) + "\n"
