"""Finite MTL-chains: linearly ordered, integral, commutative residuated lattices.

Elements are plain integers ``0 .. n-1`` ordered by value, so ``0`` is the
bottom and ``n-1`` the top. Labels exist for display and parsing only;
arithmetic never looks at them.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ChainValidationError, InvalidCardinality, UnknownElement

__all__ = [
    "Chain",
    "make_lukasiewicz",
    "make_godel",
    "make_custom",
    "chain_from_spec",
    "double_residual",
]


def _decimal_label(q: Fraction) -> str:
    den = q.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    # terminating decimal; Fraction -> shortest exact string
    s = format(q.numerator / q.denominator, ".12f").rstrip("0").rstrip(".")
    return s or "0"


def equidistant_labels(n: int) -> list[str]:
    return [_decimal_label(Fraction(i, n - 1)) for i in range(n)]


class Chain:
    """A finite MTL-chain given by its ordered labels and monoid table.

    The residuum is always derived from the monoid as
    ``x -> y = max{z : x * z <= y}``; :meth:`validate` re-checks every law.
    """

    def __init__(self, labels: Sequence[str], mono, *, kind: str = "custom", validate: bool = True):
        labels = [str(lab) for lab in labels]
        n = len(labels)
        if n < 2:
            raise InvalidCardinality(f"a chain needs at least 2 elements, got {n}")
        if len(set(labels)) != n:
            raise ChainValidationError("distinct labels", [lab for lab in labels if labels.count(lab) > 1])
        table = np.asarray(mono, dtype=np.int64)
        if table.shape != (n, n):
            raise ChainValidationError("table dimensions", [f"expected {n}x{n}", f"got {table.shape}"])
        if table.min() < 0 or table.max() >= n:
            raise ChainValidationError("table entries are elements", [int(table.min()), int(table.max())])

        self.labels = tuple(labels)
        self.kind = kind
        self._index = {lab: i for i, lab in enumerate(labels)}
        self.mono_table = table
        # greatest z with x*z <= y; z = 0 always qualifies once monotonicity holds
        ok = table[:, None, :] <= np.arange(n)[None, :, None]  # [x, y, z]
        zs = np.where(ok, np.arange(n)[None, None, :], -1)
        self.res_table = zs.max(axis=2)
        idx = np.arange(n)
        self.meet_table = np.minimum(idx[:, None], idx[None, :])
        self.join_table = np.maximum(idx[:, None], idx[None, :])
        self.neg_table = self.res_table[:, 0].copy()
        self.delta_table = np.where(idx == n - 1, n - 1, 0)
        for arr in (self.mono_table, self.res_table, self.meet_table,
                    self.join_table, self.neg_table, self.delta_table):
            arr.setflags(write=False)
        if validate:
            self.validate()

    # -- element access -------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self.labels) - 1

    @property
    def coatom(self) -> int:
        return len(self.labels) - 2

    @property
    def elements(self) -> range:
        return range(len(self.labels))

    @property
    def positive(self) -> range:
        """``B+``: every element except the bottom."""
        return range(1, len(self.labels))

    def index(self, x) -> int:
        """Resolve a label (``str``) or an index (``int``) to an index."""
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            if 0 <= x < len(self.labels):
                return int(x)
            raise UnknownElement(f"no element with index {x} in a chain of size {len(self.labels)}")
        try:
            return self._index[str(x)]
        except KeyError:
            raise UnknownElement(f"unknown element label {x!r}; chain has {list(self.labels)}") from None

    __getitem__ = index

    def __contains__(self, label) -> bool:
        return str(label) in self._index

    def label(self, i) -> str:
        return self.labels[self.index(i)]

    # -- operations -----------------------------------------------------
    def meet(self, x, y) -> int:
        return min(self.index(x), self.index(y))

    def join(self, x, y) -> int:
        return max(self.index(x), self.index(y))

    def mono(self, x, y) -> int:
        return int(self.mono_table[self.index(x), self.index(y)])

    def residuum(self, x, y) -> int:
        return int(self.res_table[self.index(x), self.index(y)])

    def neg(self, x) -> int:
        return int(self.neg_table[self.index(x)])

    def delta(self, x) -> int:
        return int(self.delta_table[self.index(x)])

    def le(self, x, y) -> bool:
        return self.index(x) <= self.index(y)

    # -- laws -----------------------------------------------------------
    def validate(self) -> None:
        """Raise :class:`ChainValidationError` naming the first broken law."""
        m, r, n, lab = self.mono_table, self.res_table, len(self.labels), self.labels
        bad = np.argwhere(m != m.T)
        if len(bad):
            x, y = bad[0]
            raise ChainValidationError("commutativity", (lab[x], lab[y]))
        bad = np.argwhere(m[n - 1] != np.arange(n))
        if len(bad):
            raise ChainValidationError("top is the unit", (lab[bad[0][0]],))
        # monotone in the second argument (first follows by commutativity)
        bad = np.argwhere(np.diff(m, axis=1) < 0)
        if len(bad):
            x, y = bad[0]
            raise ChainValidationError("monotonicity", (lab[x], lab[y], lab[y + 1]))
        left = m[m[:, :, None], np.arange(n)[None, None, :]]   # (x*y)*z
        right = m[np.arange(n)[:, None, None], m[None, :, :]]  # x*(y*z)
        bad = np.argwhere(left != right)
        if len(bad):
            raise ChainValidationError("associativity", tuple(lab[i] for i in bad[0]))
        for x, y, z in product(range(n), repeat=3):
            if (m[x, z] <= y) != (z <= r[x, y]):
                raise ChainValidationError("residuation", (lab[x], lab[y], lab[z]))

    def to_spec(self) -> dict:
        if self.kind in ("lukasiewicz", "godel"):
            return {"kind": self.kind, "n": len(self.labels)}
        return {
            "kind": "custom",
            "elements": list(self.labels),
            "mono": [[self.labels[v] for v in row] for row in self.mono_table.tolist()],
        }

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.mono_table, other.mono_table)

    def __hash__(self):
        return hash((self.labels, self.mono_table.tobytes()))

    def __repr__(self):
        if self.kind in ("lukasiewicz", "godel"):
            return f"Chain({self.kind}, n={len(self.labels)})"
        return f"Chain(custom, {list(self.labels)})"


def make_lukasiewicz(n: int) -> Chain:
    """The n-element MV-chain: ``x * y = max(x + y - 1, 0)``."""
    if n < 2:
        raise InvalidCardinality(f"a chain needs at least 2 elements, got {n}")
    i = np.arange(n)
    mono = np.maximum(i[:, None] + i[None, :] - (n - 1), 0)
    return Chain(equidistant_labels(n), mono, kind="lukasiewicz", validate=False)


def make_godel(n: int) -> Chain:
    """The n-element Gödel chain: the monoid is the minimum."""
    if n < 2:
        raise InvalidCardinality(f"a chain needs at least 2 elements, got {n}")
    i = np.arange(n)
    return Chain(equidistant_labels(n), np.minimum(i[:, None], i[None, :]), kind="godel", validate=False)


def make_custom(labels: Sequence[str], mono_table) -> Chain:
    """Build and validate a chain from ordered labels and a monoid table.

    ``mono_table`` may hold labels or indices.
    """
    labels = [str(lab) for lab in labels]
    pos = {lab: i for i, lab in enumerate(labels)}
    rows = []
    for row in mono_table:
        conv = []
        for v in row:
            if isinstance(v, str):
                if v not in pos:
                    raise ChainValidationError("table entries are elements", (v,))
                conv.append(pos[v])
            else:
                conv.append(int(v))
        rows.append(conv)
    if len(rows) != len(labels) or any(len(r) != len(labels) for r in rows):
        raise ChainValidationError("table dimensions", (len(labels), [len(r) for r in rows]))
    return Chain(labels, rows, kind="custom")


def chain_from_spec(spec: dict) -> Chain:
    kind = spec.get("kind")
    if kind == "lukasiewicz":
        return make_lukasiewicz(int(spec["n"]))
    if kind == "godel":
        return make_godel(int(spec["n"]))
    if kind == "custom":
        return make_custom(spec["elements"], spec["mono"])
    raise ChainValidationError("known chain kind", (kind,))


def double_residual(c: Chain, b) -> int:
    """Meet over every ``a`` of ``(b -> a) -> a``."""
    b = c.index(b)
    r = c.res_table
    return int(min(r[r[b, a], a] for a in c.elements))
