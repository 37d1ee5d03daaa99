"""A small text language for diagrams.

Expressions::

    expr  := par ('.' par)*          sequential: the left operand happens first
    par   := atom ('*' atom)*        parallel; binds tighter than '.'
    atom  := '(' expr ')' | name | id[T, ...] | cup[T] | cap[T] | swap[T, U]
           | spider{light|dark, T, n_in, n_out} | dag(expr) | tr(expr)

A program may start with declarations, one per line::

    type Q R
    gen f : Q -> Q Q [unitary]
    gen psi : 1 -> Q           # '1' is the empty wire list
    gen h : Q -> Q [selfadjoint]
    gen g : Q -> R [dagger=g_adj]

followed by a single expression (which may span several lines).  ``#``
starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .diagram import (
    COLORS,
    CompositionError,
    Diagram,
    DiagramError,
    Signature,
    cap,
    compose_par,
    compose_seq,
    cup,
    dagger,
    generator,
    identity,
    spider,
    swap,
    transpose,
)


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, column {col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class ParseError(DSLError):
    pass


class ElaborationError(DSLError):
    """A well-formed expression whose types do not fit."""

    def __init__(self, message: str, line: int = 0, col: int = 0, expr: str = ""):
        super().__init__(message + (f" in `{expr}`" if expr else ""), line, col)
        self.expr = expr


# -- syntax tree -----------------------------------------------------------------------

Pos = tuple[int, int]


@dataclass(frozen=True)
class Id:
    types: tuple[str, ...]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Gen:
    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Seq:
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Par:
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Cup:
    type: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Cap:
    type: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Swap:
    left: str
    right: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SpiderExpr:
    color: str
    type: str
    n_in: int
    n_out: int
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Dagger:
    body: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Transpose:
    body: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


Expr = Union[Id, Gen, Seq, Par, Cup, Cap, Swap, SpiderExpr, Dagger, Transpose]


# -- lexer -----------------------------------------------------------------------------

_TOKENS = re.compile(
    r"(?P<ws>[ \t\r]+|\#[^\n]*)|(?P<nl>\n)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*[†']*)"
    r"|(?P<arrow>->)|(?P<sym>[.*()\[\]{},:=])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start, i = 1, 0, 0
    while i < len(text):
        m = _TOKENS.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            out.append(Token("nl", "\n", line, i - start + 1))
            line, start = line + 1, m.end()
        elif kind != "ws":
            out.append(Token(kind if kind != "sym" else m.group(), m.group(), line, i - start + 1))
        i = m.end()
    out.append(Token("eof", "", line, i - start + 1))
    return out


class _Parser:
    def __init__(self, tokens: list[Token], skip_newlines: bool = True):
        self.toks = [t for t in tokens if t.kind != "nl"] if skip_newlines else tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self, kind: str, what: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind:
            shown = repr(t.text) if t.text else "end of input"
            raise ParseError(f"expected {what or repr(kind)}, found {shown}", t.line, t.col)
        self.i += 1
        return t

    def at(self, kind: str) -> bool:
        return self.tok.kind == kind

    def expr(self) -> Expr:
        left = self.par()
        while self.at("."):
            t = self.take(".")
            left = Seq(left, self.par(), (t.line, t.col))
        return left

    def par(self) -> Expr:
        left = self.atom()
        while self.at("*"):
            t = self.take("*")
            left = Par(left, self.atom(), (t.line, t.col))
        return left

    def type_list(self, close: str) -> tuple[str, ...]:
        types = []
        if not self.at(close):
            types.append(self.take("name", "a wire type").text)
            while self.at(","):
                self.take(",")
                types.append(self.take("name", "a wire type").text)
        return tuple(types)

    def atom(self) -> Expr:
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "(":
            self.take("(")
            e = self.expr()
            self.take(")", "')'")
            return e
        if t.kind != "name":
            shown = repr(t.text) if t.text else "end of input"
            raise ParseError(f"expected a diagram, found {shown}", t.line, t.col)
        self.take("name")
        word = t.text
        if word == "id" and self.at("["):
            self.take("[")
            types = self.type_list("]")
            self.take("]", "']'")
            return Id(types, pos)
        if word in ("cup", "cap") and self.at("["):
            self.take("[")
            ty = self.take("name", "a wire type").text
            self.take("]", "']'")
            return (Cup if word == "cup" else Cap)(ty, pos)
        if word == "swap" and self.at("["):
            self.take("[")
            a = self.take("name", "a wire type").text
            self.take(",", "','")
            b = self.take("name", "a wire type").text
            self.take("]", "']'")
            return Swap(a, b, pos)
        if word == "spider" and self.at("{"):
            self.take("{")
            ct = self.take("name", "a spider colour")
            if ct.text not in COLORS:
                raise ParseError(f"spider colour must be one of {list(COLORS)}", ct.line, ct.col)
            self.take(",", "','")
            ty = self.take("name", "a wire type").text
            self.take(",", "','")
            n = int(self.take("int", "an input count").text)
            self.take(",", "','")
            m = int(self.take("int", "an output count").text)
            self.take("}", "'}'")
            return SpiderExpr(ct.text, ty, n, m, pos)
        if word in ("dag", "tr") and self.at("("):
            self.take("(")
            body = self.expr()
            self.take(")", "')'")
            return (Dagger if word == "dag" else Transpose)(body, pos)
        return Gen(word, pos)


def parse_expr(text: str) -> Expr:
    p = _Parser(tokenize(text))
    e = p.expr()
    if not p.at("eof"):
        t = p.tok
        raise ParseError(f"unexpected {t.text!r} after the expression", t.line, t.col)
    return e


# -- programs ----------------------------------------------------------------------------


@dataclass
class Program:
    sig: Signature
    expr: Expr
    source: str = ""

    def diagram(self) -> Diagram:
        return elaborate(self.expr, self.sig)


def _decl_types(p: _Parser) -> tuple[str, ...]:
    types = []
    while p.at("name") or p.at("int"):
        t = p.tok
        if t.kind == "int":
            if t.text != "1":
                raise ParseError("only '1' may stand for the empty wire list", t.line, t.col)
            p.take("int")
            continue
        types.append(p.take("name").text)
    return tuple(types)


def parse_program(text: str, sig: Signature | None = None) -> Program:
    sig = sig.copy() if sig is not None else Signature()
    toks = tokenize(text)
    lines: list[list[Token]] = [[]]
    for t in toks:
        if t.kind == "nl":
            lines.append([])
        elif t.kind != "eof":
            lines[-1].append(t)
    k = 0
    while k < len(lines):
        ln = lines[k]
        if not ln:
            k += 1
            continue
        head = ln[0]
        if head.kind == "name" and head.text == "type" and (len(ln) == 1 or ln[1].kind == "name"):
            for t in ln[1:]:
                if t.kind != "name":
                    raise ParseError("type declarations list names only", t.line, t.col)
                sig.add_types(t.text)
        elif head.kind == "name" and head.text == "gen" and len(ln) > 1 and ln[1].kind == "name":
            _declare(ln, sig)
        else:
            break
        k += 1
    rest = [t for ln in lines[k:] for t in ln]
    if not rest:
        raise ParseError("program has no expression", toks[-1].line, toks[-1].col)
    p = _Parser(rest + [toks[-1]])
    e = p.expr()
    if not p.at("eof"):
        t = p.tok
        raise ParseError(f"unexpected {t.text!r} after the expression", t.line, t.col)
    return Program(sig, e, text)


def _declare(tokens: list[Token], sig: Signature) -> None:
    p = _Parser(tokens + [Token("eof", "", tokens[-1].line, tokens[-1].col + len(tokens[-1].text))])
    p.take("name")
    name_tok = p.take("name", "a generator name")
    p.take(":", "':'")
    dom = _decl_types(p)
    p.take("arrow", "'->'")
    cod = _decl_types(p)
    unitary, partner = False, None
    while p.at("["):
        p.take("[")
        flag = p.take("name", "a flag")
        if flag.text == "unitary":
            unitary = True
        elif flag.text == "selfadjoint":
            partner = name_tok.text
        elif flag.text == "dagger":
            p.take("=", "'='")
            partner = p.take("name", "a generator name").text
        else:
            raise ParseError(f"unknown flag {flag.text!r}", flag.line, flag.col)
        p.take("]", "']'")
    if not p.at("eof"):
        raise ParseError(f"unexpected {p.tok.text!r} in declaration", p.tok.line, p.tok.col)
    try:
        sig.add_generator(name_tok.text, dom, cod, dagger=partner, unitary=unitary)
    except DiagramError as e:
        raise ParseError(str(e), name_tok.line, name_tok.col) from None


def load_program(path: str | Path, sig: Signature | None = None) -> Program:
    return parse_program(Path(path).read_text(encoding="utf-8"), sig)


# -- elaboration -------------------------------------------------------------------------


def elaborate(e: Expr, sig: Signature) -> Diagram:
    """Build the diagram of ``e``; type errors name the offending sub-expression."""
    try:
        if isinstance(e, Id):
            return identity(sig, e.types)
        if isinstance(e, Gen):
            return generator(sig, e.name)
        if isinstance(e, Cup):
            return cup(sig, e.type)
        if isinstance(e, Cap):
            return cap(sig, e.type)
        if isinstance(e, Swap):
            return swap(sig, e.left, e.right)
        if isinstance(e, SpiderExpr):
            return spider(sig, e.color, e.type, e.n_in, e.n_out)
        if isinstance(e, Dagger):
            return dagger(elaborate(e.body, sig))
        if isinstance(e, Transpose):
            return transpose(elaborate(e.body, sig))
        if isinstance(e, Par):
            return compose_par(elaborate(e.left, sig), elaborate(e.right, sig))
        if isinstance(e, Seq):
            left, right = elaborate(e.left, sig), elaborate(e.right, sig)
            try:
                return compose_seq(left, right)
            except CompositionError:
                msg = (
                    f"cannot compose: left side outputs {_show(left.cod)} "
                    f"but right side expects {_show(right.dom)}"
                )
                raise ElaborationError(msg, *e.pos, expr=pretty(e)) from None
    except ElaborationError:
        raise
    except DiagramError as err:
        raise ElaborationError(str(err), *e.pos, expr=pretty(e)) from None
    raise TypeError(f"not an expression: {e!r}")


def _show(types) -> str:
    return "[" + ", ".join(types) + "]"


# -- printing ----------------------------------------------------------------------------


def pretty(e: Expr) -> str:
    """Canonical text; ``parse_expr(pretty(e)) == e``."""
    if isinstance(e, Id):
        return f"id[{', '.join(e.types)}]"
    if isinstance(e, Gen):
        return e.name
    if isinstance(e, Cup):
        return f"cup[{e.type}]"
    if isinstance(e, Cap):
        return f"cap[{e.type}]"
    if isinstance(e, Swap):
        return f"swap[{e.left}, {e.right}]"
    if isinstance(e, SpiderExpr):
        return f"spider{{{e.color}, {e.type}, {e.n_in}, {e.n_out}}}"
    if isinstance(e, Dagger):
        return f"dag({pretty(e.body)})"
    if isinstance(e, Transpose):
        return f"tr({pretty(e.body)})"
    if isinstance(e, Par):
        left = pretty(e.left)
        if isinstance(e.left, Seq):
            left = f"({left})"
        right = pretty(e.right)
        if isinstance(e.right, (Seq, Par)):
            right = f"({right})"
        return f"{left} * {right}"
    if isinstance(e, Seq):
        right = pretty(e.right)
        if isinstance(e.right, Seq):
            right = f"({right})"
        return f"{pretty(e.left)} . {right}"
    raise TypeError(f"not an expression: {e!r}")


def pretty_program(prog: Program) -> str:
    lines = []
    if prog.sig.types:
        lines.append("type " + " ".join(sorted(prog.sig.types)))
    done = set()
    for name in sorted(prog.sig.generators):
        g = prog.sig[name]
        if name in done:
            continue
        done.update({name, g.dagger})
        dom = " ".join(g.dom) or "1"
        cod = " ".join(g.cod) or "1"
        flags = " [unitary]" if g.unitary else ""
        if g.self_adjoint:
            flags += " [selfadjoint]"
        elif g.dagger != name + "†":
            flags += f" [dagger={g.dagger}]"
        lines.append(f"gen {name} : {dom} -> {cod}{flags}")
    lines.append(pretty(prog.expr))
    return "\n".join(lines) + "\n"
