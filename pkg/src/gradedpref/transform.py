"""Layered models and the bulldozing construction.

A layered model keeps one crisp relation per truth level instead of a single
fuzzy matrix: weak layers ``Q_b`` for every ``b`` and strict layers
``Q^<_b`` for every positive ``b``. Bulldozing replaces each strict cluster
(a cycle in some ``Q^<_b``) by ``K`` ordered copies of its members, which
removes the cycles while keeping the weak structure visible from the copies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import LayeredModelError, ModelError
from .lattice import Chain
from .model import PreferenceModel
from .relation import reconstruct_from_cuts, CrispRelation

__all__ = [
    "LayeredModel", "BulldozeReport", "derive_layered", "find_clusters",
    "bulldoze", "check_strict_part_condition", "to_preference_model",
]


def _transitive(m: np.ndarray) -> bool:
    mi = m.astype(np.int64)
    return bool(np.all(~((mi @ mi) > 0) | m))


def _pairs(m: np.ndarray, worlds) -> list[tuple[str, str]]:
    return [(worlds[i], worlds[j]) for i, j in np.argwhere(m)]


class LayeredModel:
    """Worlds with nested crisp layers and a valuation.

    ``weak`` maps every level index to a boolean matrix, ``strict`` maps every
    positive level index to one. Construction only checks shapes; use
    :meth:`violations` for the structural invariants.
    """

    def __init__(self, chain: Chain, worlds: Sequence[str], weak: Mapping[int, np.ndarray],
                 strict: Mapping[int, np.ndarray], valuation: Mapping[str, Sequence[int]]):
        self.chain = chain
        self.worlds = tuple(str(w) for w in worlds)
        n = len(self.worlds)
        if len(set(self.worlds)) != n:
            raise LayeredModelError("world names must be distinct")
        self.weak = {}
        self.strict = {}
        for name, layers, levels in (("weak", weak, chain.elements), ("strict", strict, chain.positive)):
            store = self.weak if name == "weak" else self.strict
            missing = [chain.labels[b] for b in levels if b not in layers]
            if missing:
                raise LayeredModelError(f"{name} layer missing for level {missing[0]}")
            for b in levels:
                m = np.array(layers[b], dtype=bool)
                if m.shape != (n, n):
                    raise LayeredModelError(f"{name} layer at level {chain.labels[b]} has shape {m.shape}, expected {(n, n)}")
                m.setflags(write=False)
                store[b] = m
        self.valuation = {}
        for var, col in valuation.items():
            col = np.array(col, dtype=np.int64)
            if col.shape != (n,):
                raise LayeredModelError(f"variable {var!r} needs one value per world")
            if n and (col.min() < 0 or col.max() > chain.top):
                raise LayeredModelError(f"variable {var!r} has a value outside the chain")
            col.setflags(write=False)
            self.valuation[str(var)] = col

    # frame interface used by the evaluator
    @property
    def n(self):
        return len(self.worlds)

    @property
    def batch_shape(self):
        return (len(self.worlds),)

    def fuzzy(self):
        return None

    def fuzzy_strict(self):
        return None

    def weak_cut(self, b):
        return self.weak[b]

    def strict_cut(self, b):
        return self.strict[b]

    def evaluator(self):
        from .model import Evaluator
        return Evaluator(self, {k: v[None, :] for k, v in self.valuation.items()})

    def eval_all(self, f) -> list[int]:
        return [int(x) for x in self.evaluator()(f)[0]]

    def eval(self, v, f) -> int:
        i = v if isinstance(v, (int, np.integer)) else self.worlds.index(str(v))
        return self.eval_all(f)[i]

    def submodel(self, keep) -> "LayeredModel":
        keep = np.asarray(keep, dtype=np.int64)
        ix = np.ix_(keep, keep)
        return LayeredModel(
            self.chain, [self.worlds[i] for i in keep],
            {b: m[ix] for b, m in self.weak.items()},
            {b: m[ix] for b, m in self.strict.items()},
            {k: v[keep] for k, v in self.valuation.items()},
        )

    def violations(self) -> list[str]:
        """Every broken layered-model invariant, as readable messages."""
        c, W, out = self.chain, self.worlds, []
        lab = c.labels
        for b in c.elements:
            q = self.weak[b]
            if not np.all(np.diag(q)):
                out.append(f"weak layer {lab[b]} is not reflexive at {W[int(np.flatnonzero(~np.diag(q))[0])]}")
            if not _transitive(q):
                out.append(f"weak layer {lab[b]} is not transitive")
            if b > 0:
                bad = _pairs(self.weak[b] & ~self.weak[b - 1], W)
                if bad:
                    out.append(f"weak layers not nested: {bad[0]} in level {lab[b]} but not {lab[b - 1]}")
        for b in c.positive:
            s = self.strict[b]
            if not _transitive(s):
                out.append(f"strict layer {lab[b]} is not transitive")
            bad = _pairs(s & ~self.weak[b], W)
            if bad:
                out.append(f"strict layer {lab[b]} not included in weak layer: {bad[0]}")
            if b > 1:
                bad = _pairs(s & ~self.strict[b - 1], W)
                if bad:
                    out.append(f"strict layers not nested: {bad[0]} in level {lab[b]} but not {lab[b - 1]}")
        return out

    def __eq__(self, other):
        if not isinstance(other, LayeredModel):
            return NotImplemented
        return (self.chain == other.chain and self.worlds == other.worlds
                and all(np.array_equal(self.weak[b], other.weak[b]) for b in self.weak)
                and all(np.array_equal(self.strict[b], other.strict[b]) for b in self.strict)
                and self.valuation.keys() == other.valuation.keys()
                and all(np.array_equal(self.valuation[k], other.valuation[k]) for k in self.valuation))

    def __repr__(self):
        return f"LayeredModel({list(self.worlds)})"


def derive_layered(m: PreferenceModel) -> LayeredModel:
    """Cut a preference model into its weak cuts and the strict parts of those cuts."""
    P = m.P
    c = m.chain
    weak = {b: P >= b for b in c.elements}
    strict = {b: (P >= b) & (P.T < b) for b in c.positive}
    return LayeredModel(c, m.worlds, weak, strict, dict(m.valuation))


def _cluster_indices(lm: LayeredModel, b: int) -> list[tuple[int, ...]]:
    s = lm.strict[b]
    if lm.n == 0:
        return []
    _, labels = connected_components(csr_matrix(s), directed=True, connection="strong")
    out = []
    for comp in np.unique(labels):
        members = tuple(int(i) for i in np.flatnonzero(labels == comp))
        if len(members) > 1 or s[members[0], members[0]]:
            out.append(members)
    return sorted(out)


def find_clusters(lm: LayeredModel, b) -> list[list[str]]:
    """Strongly connected parts of ``Q^<_b`` that contain a cycle."""
    b = lm.chain.index(b)
    return [[lm.worlds[i] for i in comp] for comp in _cluster_indices(lm, b)]


@dataclass
class BulldozeReport:
    K: int
    clusters: dict[str, list[list[str]]]
    containment: list[tuple[str, int, str, int]]
    orders: dict[tuple[str, int], list[str]]
    origin: dict[str, tuple[str, int | None]] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"copies per clustered world: {self.K}"]
        for level, cl in self.clusters.items():
            for i, members in enumerate(cl):
                order = " < ".join(self.orders[(level, i)])
                lines.append(f"level {level} cluster {i}: {{{', '.join(members)}}} ordered {order}")
        for a, i, b, j in self.containment:
            lines.append(f"level {b} cluster {j} is inside level {a} cluster {i}")
        if not any(self.clusters.values()):
            lines.append("no clusters: the model is returned unchanged")
        lines.append("origins:")
        for new, (src, k) in self.origin.items():
            lines.append(f"  {new} <- {src}" + ("" if k is None else f" copy {k}"))
        return "\n".join(lines) + "\n"


def _precheck(lm: LayeredModel):
    problems = [v for v in lm.violations() if not v.startswith("strict layers not nested")]
    if problems:
        raise LayeredModelError("cannot bulldoze a malformed layered model: " + problems[0])


def bulldoze(lm: LayeredModel, K: int):
    """Unravel every strict cluster into ``K`` ordered copies.

    Returns the new layered model and a :class:`BulldozeReport`. Worlds that
    sit in a cluster at any level are copied ``K`` times as ``"w@n"``; the
    others keep their name. Inside a level-``b`` cluster the copies are
    ordered lexicographically by (copy index, cluster order); every other
    strict edge is inherited from the source world.
    """
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")
    _precheck(lm)
    c = lm.chain
    levels = list(c.positive)
    clusters = {b: _cluster_indices(lm, b) for b in levels}

    # cluster id of every world at every level, or -1
    member = {b: np.full(lm.n, -1, dtype=np.int64) for b in levels}
    for b in levels:
        for i, comp in enumerate(clusters[b]):
            member[b][list(comp)] = i

    memo: dict[tuple[int, int], list[int]] = {}

    def ordering(x: int, j: int) -> list[int]:
        key = (x, j)
        if key in memo:
            return memo[key]
        comp = set(clusters[x][j])
        order = sorted(comp)
        for y in (a for a in levels if a > x):
            subs = [k for k, sub in enumerate(clusters[y]) if set(sub) <= comp]
            if subs:
                blocks = {k: ordering(y, k) for k in subs}
                owner = {w: k for k in subs for w in clusters[y][k]}
                order, done = [], set()
                for w in sorted(comp):
                    k = owner.get(w)
                    if k is None:
                        order.append(w)
                    elif k not in done:
                        done.add(k)
                        order.extend(blocks[k])
                break
        memo[key] = order
        return order

    rank = {b: np.zeros(lm.n, dtype=np.int64) for b in levels}
    for b in levels:
        for j in range(len(clusters[b])):
            for pos, w in enumerate(ordering(b, j)):
                rank[b][w] = pos

    copied = np.zeros(lm.n, dtype=bool)
    for b in levels:
        copied |= member[b] >= 0
    names, base, idx = [], [], []
    origin = {}
    for w, name in enumerate(lm.worlds):
        if copied[w]:
            for k in range(K):
                names.append(f"{name}@{k}")
                base.append(w)
                idx.append(k)
                origin[f"{name}@{k}"] = (name, k)
        else:
            names.append(name)
            base.append(w)
            idx.append(0)
            origin[name] = (name, None)
    base = np.array(base, dtype=np.int64)
    idx = np.array(idx, dtype=np.int64)
    T = len(names)
    same_node = np.eye(T, dtype=bool)

    strict, weak = {}, {0: np.ones((T, T), dtype=bool)}
    # pairs sharing a cluster at this or any lower positive level; their
    # copies are strictly ordered below, so they cannot be indifferent above
    shared = np.zeros((T, T), dtype=bool)
    for b in levels:
        src_s = lm.strict[b][np.ix_(base, base)]
        src_w = lm.weak[b][np.ix_(base, base)]
        cl = member[b][base]
        same = (cl[:, None] == cl[None, :]) & (cl[:, None] >= 0)
        shared |= same
        r = rank[b][base]
        lex = (idx[:, None] < idx[None, :]) | ((idx[:, None] == idx[None, :]) & (r[:, None] < r[None, :]))
        s = np.where(same, lex, src_s)
        indifferent = ~shared & src_w & src_w.T & ~src_s & ~src_s.T
        strict[b] = s
        weak[b] = same_node | s | indifferent

    val = {k: v[base] for k, v in lm.valuation.items()}
    out = LayeredModel(c, names, weak, strict, val)

    lab = c.labels
    containment = []
    for a in levels:
        for i, ca in enumerate(clusters[a]):
            for b in (x for x in levels if x > a):
                for j, cb in enumerate(clusters[b]):
                    if set(cb) <= set(ca):
                        containment.append((lab[a], i, lab[b], j))
    report = BulldozeReport(
        K=int(K),
        clusters={lab[b]: [[lm.worlds[w] for w in comp] for comp in clusters[b]] for b in levels},
        containment=containment,
        orders={(lab[b], j): [lm.worlds[w] for w in ordering(b, j)] for b in levels for j in range(len(clusters[b]))},
        origin=origin,
    )
    return out, report


@dataclass
class StrictPartCheck:
    holds: bool
    counterexample: tuple[str, str, str] | None = None

    def __bool__(self):
        return self.holds


def check_strict_part_condition(lm: LayeredModel) -> StrictPartCheck:
    """``Q^<_b(v,w)`` iff ``Q_b(v,w)`` and not ``Q_b(w,v)``, at every positive level.

    The counterexample is ``(level label, v, w)``.
    """
    for b in lm.chain.positive:
        q = lm.weak[b]
        bad = np.argwhere(lm.strict[b] != (q & ~q.T))
        if len(bad):
            v, w = bad[0]
            return StrictPartCheck(False, (lm.chain.labels[b], lm.worlds[v], lm.worlds[w]))
    return StrictPartCheck(True)


def to_preference_model(lm: LayeredModel) -> PreferenceModel:
    """Collapse the weak layers into one fuzzy preorder."""
    problems = [v for v in lm.violations() if v.startswith("weak")]
    if problems:
        raise ModelError(problems[0])
    if not np.all(lm.weak[0]):
        i, j = np.argwhere(~lm.weak[0])[0]
        raise ModelError(
            f"level-0 layer is not universal: ({lm.worlds[i]}, {lm.worlds[j]}) missing; "
            "restrict to a level-0 class first"
        )
    check = check_strict_part_condition(lm)
    if not check:
        b, v, w = check.counterexample
        raise ModelError(f"strict layer at level {b} is not the strict part of the weak layer at ({v}, {w})")
    cuts = {b: CrispRelation(lm.worlds, m) for b, m in lm.weak.items()}
    rel = reconstruct_from_cuts(cuts, lm.chain.top)
    val = {k: [lm.chain.labels[x] for x in v.tolist()] for k, v in lm.valuation.items()}
    return PreferenceModel(lm.chain, lm.worlds, rel, val)
