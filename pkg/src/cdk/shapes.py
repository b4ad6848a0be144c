"""Objects of the base category: binary product trees over the line."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property


class Shape:
    """A product tree. Instances are immutable and compared structurally."""

    __slots__ = ()

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def __mul__(self, other: Shape) -> Shape:
        return Prod(self, other)


@dataclass(frozen=True, repr=False)
class _Unit(Shape):
    @property
    def dim(self) -> int:
        return 0

    def __repr__(self):
        return "Unit"


@dataclass(frozen=True, repr=False)
class _Line(Shape):
    @property
    def dim(self) -> int:
        return 1

    def __repr__(self):
        return "Line"


@dataclass(frozen=True, repr=False)
class Prod(Shape):
    left: Shape
    right: Shape

    @cached_property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    def __repr__(self):
        return f"Prod({self.left!r}, {self.right!r})"


Unit = _Unit()
Line = _Line()


def dim(s: Shape) -> int:
    return s.dim


def flat(n: int) -> Shape:
    """Right-nested product of ``n`` lines (``Unit`` for 0)."""
    if n == 0:
        return Unit
    s: Shape = Line
    for _ in range(n - 1):
        s = Prod(Line, s)
    return s


def tangent(s: Shape) -> Shape:
    return Prod(s, s)


def parse_shape(text: str) -> Shape:
    """Read the ``repr`` form back, e.g. ``Prod(Line, Unit)``."""
    text = text.replace(" ", "")
    pos = 0

    def node() -> Shape:
        nonlocal pos
        if text.startswith("Unit", pos):
            pos += 4
            return Unit
        if text.startswith("Line", pos):
            pos += 4
            return Line
        if text.startswith("Prod(", pos):
            pos += 5
            a = node()
            if text[pos] != ",":
                raise ValueError(f"bad shape text {text!r}")
            pos += 1
            b = node()
            if text[pos] != ")":
                raise ValueError(f"bad shape text {text!r}")
            pos += 1
            return Prod(a, b)
        raise ValueError(f"bad shape text {text!r}")

    s = node()
    if pos != len(text):
        raise ValueError(f"bad shape text {text!r}")
    return s
