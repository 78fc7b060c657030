"""Concrete text syntax for g-choreographies.

Grammar (loosest binder last)::

    G ::= "0" | Ident "->" Ident ":" Ident | G ";" G | G "|" G | G "+" G | "(" G ")"

``;`` binds tighter than ``|`` which binds tighter than ``+``; all three are
left-associative.  ``//`` starts a comment running to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .ast import (ChorError, Cho, GChor, Interaction, Par, SelfInteraction, Seq,
                  Zero, assign_control_points)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ChorSyntaxError(ChorError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class Token(NamedTuple):
    kind: str
    text: str
    start: int
    end: int


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n﻿]+)
  | (?P<comment>//[^\n]*)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<zero>0)
  | (?P<op>[;|+:()])
""", re.VERBOSE)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._lex()
        self.pos = 0

    def span(self, start: int, end: int) -> SourceSpan:
        line = self.text.count("\n", 0, start) + 1
        column = start - (self.text.rfind("\n", 0, start) + 1) + 1
        return SourceSpan(start, end, line, column)

    def error(self, message: str, start: int, end: int) -> ChorSyntaxError:
        end = max(start, min(end, len(self.text)))
        return ChorSyntaxError(message, self.span(min(start, len(self.text)), end))

    def _lex(self) -> list[Token]:
        out = []
        i = 0
        while i < len(self.text):
            m = _TOKEN.match(self.text, i)
            if m is None:
                raise self.error(f"unexpected character {self.text[i]!r}", i, i + 1)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                text = m.group()
                out.append(Token(text if kind == "op" else kind, text, i, m.end()))
            i = m.end()
        out.append(Token("eof", "", len(self.text), len(self.text)))
        return out

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self, kind: str) -> Token:
        tok = self.peek
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            expected = {"ident": "an identifier", "arrow": "'->'"}.get(kind, repr(kind))
            raise self.error(f"expected {expected}, found {found}", tok.start, tok.end)
        self.pos += 1
        return tok

    def parse(self) -> GChor:
        g = self.choice()
        self.take("eof")
        return g

    def choice(self) -> GChor:
        g = self.par()
        while self.peek.kind == "+":
            self.pos += 1
            g = Cho(g, self.par())
        return g

    def par(self) -> GChor:
        g = self.seq()
        while self.peek.kind == "|":
            self.pos += 1
            g = Par(g, self.seq())
        return g

    def seq(self) -> GChor:
        g = self.atom()
        while self.peek.kind == ";":
            self.pos += 1
            g = Seq(g, self.atom())
        return g

    def atom(self) -> GChor:
        tok = self.peek
        if tok.kind == "zero":
            self.pos += 1
            return Zero()
        if tok.kind == "(":
            self.pos += 1
            g = self.choice()
            self.take(")")
            return g
        if tok.kind == "ident":
            sender = self.take("ident")
            self.take("arrow")
            receiver = self.take("ident")
            self.take(":")
            msg = self.take("ident")
            if sender.text == receiver.text:
                raise SelfInteraction(sender.text, self.span(sender.start, msg.end))
            return Interaction(sender.text, receiver.text, msg.text)
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise self.error(f"expected a choreography, found {found}", tok.start, tok.end)


def parse_raw(text: str) -> GChor:
    """Parse without assigning control points."""
    return _Parser(text).parse()


def parse(text: str) -> GChor:
    return assign_control_points(parse_raw(text))


def pretty(g: GChor) -> str:
    """Fully parenthesised canonical text; ``parse(pretty(g))`` is congruent to ``g``."""
    if isinstance(g, Zero):
        return "0"
    if isinstance(g, Interaction):
        return f"{g.sender}->{g.receiver}:{g.msg}"
    op = {Seq: ";", Par: "|", Cho: "+"}[type(g)]
    return f"({pretty(g.left)} {op} {pretty(g.right)})"
