"""Abstract syntax of loop-free global choreographies.

Terms are immutable dataclasses.  Control points are attached by
:func:`assign_control_points`; raw terms built by hand or by the parser
carry ``cp=None`` until then.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

class ChorError(Exception):
    """Base class for every error raised by the toolchain."""


class SelfInteraction(ChorError):
    def __init__(self, participant: str, span=None):
        where = f"{span}: " if span is not None else ""
        super().__init__(f"{where}participant {participant} cannot send to itself")
        self.participant = participant
        self.span = span


@dataclass(frozen=True, order=True)
class ControlPoint:
    id: int
    barred: bool = False

    def __str__(self) -> str:
        return f"~k{self.id}" if self.barred else f"k{self.id}"


def mu(k: ControlPoint) -> ControlPoint:
    """Flip the bar of a control point; ``mu(mu(k)) == k``."""
    return ControlPoint(k.id, not k.barred)


class GChor:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(GChor):
    pass


@dataclass(frozen=True)
class Interaction(GChor):
    sender: str
    receiver: str
    msg: str
    cp: Optional[ControlPoint] = None


@dataclass(frozen=True)
class Seq(GChor):
    left: GChor
    right: GChor


@dataclass(frozen=True)
class Par(GChor):
    left: GChor
    right: GChor
    cp: Optional[ControlPoint] = None


@dataclass(frozen=True)
class Cho(GChor):
    left: GChor
    right: GChor
    cp: Optional[ControlPoint] = None


Binary = Union[Seq, Par, Cho]


def assign_control_points(raw: GChor) -> GChor:
    """Number interactions, forks and branches in pre-order, starting at 1."""
    counter = 0

    def fresh() -> ControlPoint:
        nonlocal counter
        counter += 1
        return ControlPoint(counter)

    def walk(g: GChor) -> GChor:
        if isinstance(g, Zero):
            return g
        if isinstance(g, Interaction):
            if g.sender == g.receiver:
                raise SelfInteraction(g.sender)
            return Interaction(g.sender, g.receiver, g.msg, fresh())
        if isinstance(g, Seq):
            left = walk(g.left)
            return Seq(left, walk(g.right))
        if isinstance(g, (Par, Cho)):
            k = fresh()
            left = walk(g.left)
            return type(g)(left, walk(g.right), k)
        raise TypeError(f"not a choreography: {g!r}")

    return walk(raw)


def strip_control_points(g: GChor) -> GChor:
    if isinstance(g, Zero):
        return g
    if isinstance(g, Interaction):
        return Interaction(g.sender, g.receiver, g.msg)
    if isinstance(g, Seq):
        return Seq(strip_control_points(g.left), strip_control_points(g.right))
    return type(g)(strip_control_points(g.left), strip_control_points(g.right))


def subterms(g: GChor) -> Iterator[GChor]:
    """Pre-order traversal."""
    stack = [g]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Seq, Par, Cho)):
            stack.append(node.right)
            stack.append(node.left)


def interactions(g: GChor) -> list[Interaction]:
    return [n for n in subterms(g) if isinstance(n, Interaction)]


def participants(g: GChor) -> frozenset[str]:
    out: set[str] = set()
    for n in interactions(g):
        out.add(n.sender)
        out.add(n.receiver)
    return frozenset(out)


def control_points(g: GChor) -> list[ControlPoint]:
    return [n.cp for n in subterms(g)
            if isinstance(n, (Interaction, Par, Cho)) and n.cp is not None]


def size(g: GChor) -> int:
    return sum(1 for _ in subterms(g))


# -- structural congruence ---------------------------------------------------

def normal_form(g: GChor):
    """Canonical nested-tuple form modulo the monoid axioms.

    ``;`` is flattened and stripped of ``0``; ``|`` and ``+`` are in addition
    sorted, as they are commutative.  Control points are ignored.
    """
    if isinstance(g, Zero):
        return ("0",)
    if isinstance(g, Interaction):
        return ("int", g.sender, g.receiver, g.msg)
    tag = {Seq: "seq", Par: "par", Cho: "cho"}[type(g)]
    children = []
    for side in (g.left, g.right):
        nf = normal_form(side)
        if nf[0] == "0":
            continue
        if nf[0] == tag:
            children.extend(nf[1])
        else:
            children.append(nf)
    if not children:
        return ("0",)
    if len(children) == 1:
        return children[0]
    if tag != "seq":
        children.sort(key=repr)
    return (tag, tuple(children))


def congruent(g: GChor, h: GChor) -> bool:
    return normal_form(g) == normal_form(h)
