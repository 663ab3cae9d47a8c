"""B-valued and crisp binary relations over a finite list of worlds.

Matrices are indexed ``[source, target]`` and hold chain element indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateCut, ModelError, NestingViolation

__all__ = [
    "FuzzyRelation", "CrispRelation",
    "is_reflexive", "is_meet_transitive",
    "strict_part", "indifference", "cut", "strict_of_cut", "cut_of_strict",
    "reconstruct_from_cuts", "meet_transitive_closure",
]


def _frozen(arr, dtype):
    arr = np.array(arr, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ModelError(f"relation matrix must be square, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class FuzzyRelation:
    """A square matrix of chain elements over ``worlds``.

    ``top`` is the index of the chain's top element; it is what "reflexive"
    means for the diagonal.
    """

    def __init__(self, worlds: Sequence[str], matrix, top: int):
        self.worlds = tuple(worlds)
        self.matrix = _frozen(matrix, np.int64)
        self.top = int(top)
        if self.matrix.shape[0] != len(self.worlds):
            raise ModelError(f"{len(self.worlds)} worlds but a {self.matrix.shape[0]}-row matrix")
        if len(self.worlds) and (self.matrix.min() < 0 or self.matrix.max() > self.top):
            raise ModelError("relation entries must be chain elements")

    @classmethod
    def from_labels(cls, worlds, rows, chain):
        return cls(worlds, [[chain.index(x) for x in row] for row in rows], chain.top)

    def to_labels(self, chain) -> list[list[str]]:
        return [[chain.labels[x] for x in row] for row in self.matrix.tolist()]

    def __call__(self, u, v) -> int:
        return int(self.matrix[self.worlds.index(u), self.worlds.index(v)])

    def __eq__(self, other):
        if not isinstance(other, FuzzyRelation):
            return NotImplemented
        return self.worlds == other.worlds and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"FuzzyRelation({list(self.worlds)}, {self.matrix.tolist()})"


class CrispRelation:
    def __init__(self, worlds: Sequence[str], bits):
        self.worlds = tuple(worlds)
        self.bits = _frozen(bits, bool)
        if self.bits.shape[0] != len(self.worlds):
            raise ModelError(f"{len(self.worlds)} worlds but a {self.bits.shape[0]}-row matrix")

    def pairs(self) -> set[tuple[str, str]]:
        return {(self.worlds[i], self.worlds[j]) for i, j in np.argwhere(self.bits)}

    def __call__(self, u, v) -> bool:
        return bool(self.bits[self.worlds.index(u), self.worlds.index(v)])

    def __le__(self, other):
        return bool(np.all(~self.bits | other.bits))

    def __eq__(self, other):
        if not isinstance(other, CrispRelation):
            return NotImplemented
        return self.worlds == other.worlds and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"CrispRelation({sorted(self.pairs())})"


# -- predicates ------------------------------------------------------------

def is_reflexive(r: FuzzyRelation) -> bool:
    return bool(np.all(np.diag(r.matrix) == r.top))


def meet_compose(m: np.ndarray) -> np.ndarray:
    """``(m;m)(u,w) = max_v min(m(u,v), m(v,w))``."""
    return np.minimum(m[:, :, None], m[None, :, :]).max(axis=1)


def is_meet_transitive(r: FuzzyRelation) -> bool:
    if len(r.worlds) == 0:
        return True
    return bool(np.all(meet_compose(r.matrix) <= r.matrix))


def is_reflexive_crisp(r: CrispRelation) -> bool:
    return bool(np.all(np.diag(r.bits)))


def is_transitive_crisp(r: CrispRelation) -> bool:
    b = r.bits.astype(np.int64)
    return bool(np.all(~((b @ b) > 0) | r.bits))


# -- derived relations -----------------------------------------------------

def _strict_matrix(m):
    return np.where(m > m.T, m, 0)


def strict_part(r: FuzzyRelation) -> FuzzyRelation:
    return FuzzyRelation(r.worlds, _strict_matrix(r.matrix), r.top)


def indifference(r: FuzzyRelation) -> FuzzyRelation:
    return FuzzyRelation(r.worlds, np.minimum(r.matrix, r.matrix.T), r.top)


def cut(r: FuzzyRelation, b: int) -> CrispRelation:
    return CrispRelation(r.worlds, r.matrix >= b)


def strict_of_cut(r: FuzzyRelation, b: int) -> CrispRelation:
    """``(P_b)^<``: pairs with ``P(u,v) >= b`` and ``P(v,u) < b``."""
    if b <= 0:
        raise DegenerateCut("the strict part of the level-0 cut is not defined; use a positive level")
    return CrispRelation(r.worlds, (r.matrix >= b) & (r.matrix.T < b))


def cut_of_strict(r: FuzzyRelation, b: int) -> CrispRelation:
    """``(P^<)_b``: the b-cut of the fuzzy strict part."""
    if b <= 0:
        raise DegenerateCut("cuts of the strict part are taken at positive levels only")
    return CrispRelation(r.worlds, _strict_matrix(r.matrix) >= b)


def reconstruct_from_cuts(cuts: Mapping[int, CrispRelation], top: int) -> FuzzyRelation:
    """Inverse of taking cuts: ``P(u,v) = max{b : (u,v) in cuts[b]}``.

    Levels absent from ``cuts`` contribute nothing; pairs in no cut get 0.
    The family must be nested: a pair in the cut at level ``a`` must be in
    every present cut at a level ``b <= a``.
    """
    levels = sorted(cuts)
    if not levels:
        raise NestingViolation("no cut levels given")
    worlds = cuts[levels[0]].worlds
    for lo, hi in zip(levels, levels[1:]):
        if cuts[lo].worlds != worlds or cuts[hi].worlds != worlds:
            raise NestingViolation("cut levels disagree on the world list")
        bad = np.argwhere(cuts[hi].bits & ~cuts[lo].bits)
        if len(bad):
            u, v = bad[0]
            raise NestingViolation(
                f"pair ({worlds[u]}, {worlds[v]}) is in the cut at level {hi} but not at level {lo}"
            )
    m = np.zeros((len(worlds), len(worlds)), dtype=np.int64)
    for b in levels:
        m = np.where(cuts[b].bits, np.maximum(m, b), m)
    return FuzzyRelation(worlds, m, top)


def meet_transitive_closure(r: FuzzyRelation) -> FuzzyRelation:
    m = r.matrix
    while True:
        nxt = np.maximum(m, meet_compose(m)) if len(r.worlds) else m
        if np.array_equal(nxt, m):
            return FuzzyRelation(r.worlds, m, r.top)
        m = nxt
