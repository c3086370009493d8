# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""Bounded STL abstract syntax. Nodes are immutable and compare structurally."""


from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Predicate:
    """`coef * channel[t] + offset >= 0`."""

    channel: str
    coef: float
    offset: float

    def channels(self) -> frozenset[str]:
        return frozenset({self.channel})


@dataclass(frozen=True)
class AbsPredicate:
    """`bound - |channel[t] - center| >= 0`, sugar for two affine predicates."""

    channel: str
    bound: float
    center: float

    def channels(self) -> frozenset[str]:
        return frozenset({self.channel})

    def expand(self) -> And:
        """`min(bound - s + center, bound + s - center)`."""
        return And((
            Predicate(self.channel, -1.0, self.bound + self.center),
            Predicate(self.channel, 1.0, self.bound - self.center),
        ))


@dataclass(frozen=True)
class Not:
    child: StlFormula

    def channels(self) -> frozenset[str]:
        return self.child.channels()


@dataclass(frozen=True)
class And:
    children: tuple[StlFormula, ...]

    def __post_init__(self):
        if len(self.children) < 1:
            raise ValueError('"And" needs at least one operand.')

    def channels(self) -> frozenset[str]:
        return frozenset().union(*(c.channels() for c in self.children))


@dataclass(frozen=True)
class Or:
    children: tuple[StlFormula, ...]

    def __post_init__(self):
        if len(self.children) < 1:
            raise ValueError('"Or" needs at least one operand.')

    def channels(self) -> frozenset[str]:
        return frozenset().union(*(c.channels() for c in self.children))


@dataclass(frozen=True)
class _Temporal:
    lower: float
    upper: float
    child: StlFormula

    def __post_init__(self):
        object.__setattr__(self, 'lower', float(self.lower))
        object.__setattr__(self, 'upper', float(self.upper))
        if not (0 <= self.lower <= self.upper):
            raise ValueError(f'Temporal interval must satisfy 0 <= t1 <= t2, got [{self.lower}, {self.upper}].')

    def channels(self) -> frozenset[str]:
        return self.child.channels()


@dataclass(frozen=True)
class Always(_Temporal):
    """`G[t1,t2]`: minimum over the window."""


@dataclass(frozen=True)
class Eventually(_Temporal):
    """`F[t1,t2]`: maximum over the window."""


type StlFormula = Predicate | AbsPredicate | Not | And | Or | Always | Eventually
