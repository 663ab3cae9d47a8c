"""Kripke models over a finite chain and the evaluation of formulas on them.

Evaluation is vectorised: a variable's value is an integer array of shape
``(..., V, n)`` holding ``V`` valuations over ``n`` worlds at once, and the
frame may carry a leading batch of relations as well. That is what the
bounded search needs. Single models simply use ``V = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import syntax as S
from .errors import ModelError, NotAnEquivalence, UnboundVariable, UnsupportedModality, ZeroStrictCut
from .lattice import Chain
from .relation import FuzzyRelation, is_meet_transitive, is_reflexive, strict_part

__all__ = [
    "MatrixFrame", "PreferenceModel", "GeneralModel", "Evaluator",
    "eval", "eval_all", "holds_locally", "LocalResult", "restrict_to_level0_class",
]


class MatrixFrame:
    """Accessibility structure read off a single fuzzy matrix.

    With ``preference=True`` the strict modalities are available: the cut
    versions range over ``(P_b)^<`` and the unsubscripted ones use ``P^<``.
    """

    def __init__(self, chain: Chain, matrix: np.ndarray, preference: bool = True):
        self.chain = chain
        # a single (n, n) matrix, or a batch shaped (R, 1, n, n)
        self.P = matrix
        self.preference = preference
        self._weak: dict[int, np.ndarray] = {}
        self._strict: dict[int, np.ndarray] = {}
        self._Ps = None

    @property
    def n(self):
        return self.P.shape[-1]

    @property
    def batch_shape(self):
        return self.P.shape[:-1]

    def fuzzy(self):
        return self.P

    def fuzzy_strict(self):
        if not self.preference:
            raise UnsupportedModality("strict modalities need a preference model")
        if self._Ps is None:
            self._Ps = np.where(self.P > np.swapaxes(self.P, -1, -2), self.P, 0)
        return self._Ps

    def weak_cut(self, b: int):
        m = self._weak.get(b)
        if m is None:
            m = self._weak[b] = self.P >= b
        return m

    def strict_cut(self, b: int):
        if not self.preference:
            raise UnsupportedModality("strict modalities need a preference model")
        m = self._strict.get(b)
        if m is None:
            m = self._strict[b] = (self.P >= b) & (np.swapaxes(self.P, -1, -2) < b)
        return m


class Evaluator:
    """Evaluate formulas on one frame under a batch of valuations.

    ``env`` maps each variable to an array of shape ``(..., V, n)`` that
    broadcasts against the frame's batch shape. Results are
    memoised per subformula, so formulas evaluated through the same
    evaluator share work.
    """

    def __init__(self, frame, env: Mapping[str, np.ndarray]):
        self.frame = frame
        self.chain: Chain = frame.chain
        self.env = env
        shape = np.broadcast_shapes(frame.batch_shape, *(a.shape for a in env.values()))
        self.shape = shape if len(shape) > 1 else (1,) + shape
        self.memo: dict = {}
        # structurally equal formulas share one integer key; built from the
        # keys of their children so lookups never compare whole trees
        self._ids: dict = {}
        self._keys: dict = {}
        # small chains get int8 tables so batched arrays stay compact
        dt = np.int8 if len(self.chain) <= 127 else np.int64
        self.dtype = dt
        self.mono = self.chain.mono_table.astype(dt)
        self.res = self.chain.res_table.astype(dt)
        self.neg = self.chain.neg_table.astype(dt)
        self.delta = self.chain.delta_table.astype(dt)

    def _key(self, f) -> int:
        seen = self._ids.get(id(f))
        if seen is not None:
            return seen[1]
        parts = (type(f),) + tuple(self._key(v) if isinstance(v, S.Formula) else v
                                   for v in (getattr(f, n) for n in f.field_names))
        k = self._keys.setdefault(parts, len(self._keys))
        self._ids[id(f)] = (f, k)   # holding f keeps its id from being reused
        return k

    def __call__(self, f: S.Formula) -> np.ndarray:
        k = self._key(f)
        hit = self.memo.get(k)
        if hit is None:
            hit = self.memo[k] = self._eval(f)
        return hit

    def _level(self, label):
        return self.chain.index(label)

    def _eval(self, f):
        c = self.chain
        top = c.top
        t = type(f)
        if t is S.Var:
            try:
                return self.env[f.name].astype(self.dtype, copy=False)
            except KeyError:
                raise UnboundVariable(f"variable {f.name!r} has no value in the model") from None
        if t is S.Const:
            return np.full(self.shape, c.index(f.label), dtype=self.dtype)
        if t is S.And:
            return np.minimum(self(f.left), self(f.right))
        if t is S.Or:
            return np.maximum(self(f.left), self(f.right))
        if t is S.Prod:
            return self.mono[self(f.left), self(f.right)]
        if t is S.Implies:
            return self.res[self(f.left), self(f.right)]
        if t is S.Neg:
            return self.neg[self(f.body)]
        if t is S.Delta:
            return self.delta[self(f.body)]
        x = self(f.body)
        if t is S.Univ:
            return np.broadcast_to(x.min(axis=-1, keepdims=True), x.shape)
        if t is S.Exist:
            return np.broadcast_to(x.max(axis=-1, keepdims=True), x.shape)
        # x[..., None, :] lines up target worlds against each source row
        xt = x[..., None, :]
        if t is S.BoxCut:
            mask = self.frame.weak_cut(self._level(f.level))
            return np.where(mask, xt, top).min(axis=-1)
        if t is S.DiaCut:
            mask = self.frame.weak_cut(self._level(f.level))
            return np.where(mask, xt, 0).max(axis=-1)
        if t is S.SBoxCut or t is S.SDiaCut:
            b = self._level(f.level)
            if b == 0:
                raise ZeroStrictCut(f"strict cut at level {f.level} is not in the language")
            mask = self.frame.strict_cut(b)
            if t is S.SBoxCut:
                return np.where(mask, xt, top).min(axis=-1)
            return np.where(mask, xt, 0).max(axis=-1)
        if t is S.Box or t is S.Dia:
            P = self.frame.fuzzy()
            if P is None:
                return self._aggregate(f, x, strict=False)
            if t is S.Box:
                return self.res[P, xt].min(axis=-1)
            return self.mono[P, xt].max(axis=-1)
        if t is S.SBox or t is S.SDia:
            P = self.frame.fuzzy_strict()
            if P is None:
                return self._aggregate(f, x, strict=True)
            if t is S.SBox:
                return self.res[P, xt].min(axis=-1)
            return self.mono[P, xt].max(axis=-1)
        raise ModelError(f"cannot evaluate node {f!r}")

    def _aggregate(self, f, x, strict):
        """Graded modality through its layers: meet of ``b -> box_b`` or join of ``b * dia_b``."""
        c = self.chain
        xt = x[..., None, :]
        box = isinstance(f, (S.Box, S.SBox))
        out = None
        for b in (c.positive if strict else c.elements):
            mask = self.frame.strict_cut(b) if strict else self.frame.weak_cut(b)
            if box:
                part = self.res[b, np.where(mask, xt, c.top).min(axis=-1)]
                out = part if out is None else np.minimum(out, part)
            else:
                part = self.mono[b, np.where(mask, xt, 0).max(axis=-1)]
                out = part if out is None else np.maximum(out, part)
        return out


class _Model:
    """Common part of the single-matrix model classes."""

    preference = True

    def __init__(self, chain: Chain, worlds: Sequence[str], relation, valuation: Mapping):
        self.chain = chain
        self.worlds = tuple(str(w) for w in worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("world names must be distinct")
        if not isinstance(relation, FuzzyRelation):
            relation = FuzzyRelation(self.worlds, relation, chain.top)
        if relation.worlds != self.worlds:
            raise ModelError("relation is over a different world list")
        if relation.top != chain.top:
            raise ModelError("relation was built for a different chain")
        self.relation = relation
        self.valuation = {str(k): self._column(k, v) for k, v in valuation.items()}
        self.frame = MatrixFrame(chain, relation.matrix, preference=self.preference)

    def _column(self, var, values):
        n = len(self.worlds)
        if isinstance(values, Mapping):
            missing = [w for w in self.worlds if w not in values]
            if missing:
                raise UnboundVariable(f"variable {var!r} has no value at world {missing[0]!r}")
            values = [values[w] for w in self.worlds]
        values = list(values)
        if len(values) != n:
            raise UnboundVariable(f"variable {var!r} has {len(values)} values for {n} worlds")
        col = np.array([self.chain.index(x) for x in values], dtype=np.int64)
        col.setflags(write=False)
        return col

    @property
    def P(self) -> np.ndarray:
        return self.relation.matrix

    def evaluator(self) -> Evaluator:
        return Evaluator(self.frame, {k: v[None, :] for k, v in self.valuation.items()})

    def world_index(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            return int(v)
        try:
            return self.worlds.index(str(v))
        except ValueError:
            raise ModelError(f"unknown world {v!r}") from None

    def eval_all(self, f: S.Formula) -> list[int]:
        return [int(x) for x in self.evaluator()(f)[0]]

    def eval(self, v, f: S.Formula) -> int:
        return self.eval_all(f)[self.world_index(v)]

    def eval_labels(self, f: S.Formula) -> list[str]:
        return [self.chain.labels[x] for x in self.eval_all(f)]

    def valuation_labels(self) -> dict[str, dict[str, str]]:
        return {
            var: {w: self.chain.labels[x] for w, x in zip(self.worlds, col.tolist())}
            for var, col in self.valuation.items()
        }

    def __repr__(self):
        return f"{type(self).__name__}({list(self.worlds)}, vars={sorted(self.valuation)})"


class GeneralModel(_Model):
    """A B-valued Kripke model with no constraint on the relation."""

    preference = False


class PreferenceModel(_Model):
    """A B-valued Kripke model whose relation is a reflexive, meet-transitive preorder."""

    def __init__(self, chain, worlds, relation, valuation, *, check: bool = True):
        super().__init__(chain, worlds, relation, valuation)
        if check:
            if not is_reflexive(self.relation):
                bad = [w for w, d in zip(self.worlds, np.diag(self.P)) if d != chain.top]
                raise ModelError(f"relation is not reflexive at world {bad[0]!r}")
            if not is_meet_transitive(self.relation):
                u, v, w = _transitivity_witness(self.P)
                W = self.worlds
                raise ModelError(
                    f"relation is not meet-transitive: min(P({W[u]},{W[v]}), P({W[v]},{W[w]})) > P({W[u]},{W[w]})"
                )

    def strict_relation(self) -> FuzzyRelation:
        return strict_part(self.relation)


def _transitivity_witness(P):
    n = len(P)
    for u in range(n):
        for v in range(n):
            for w in range(n):
                if min(P[u, v], P[v, w]) > P[u, w]:
                    return u, v, w
    return None


# -- module-level API ------------------------------------------------------

def eval(m, v, f: S.Formula) -> int:  # noqa: A001 - the natural name here
    return m.eval(v, f)


def eval_all(m, f: S.Formula) -> list[int]:
    return m.eval_all(f)


@dataclass
class LocalResult:
    holds: bool
    witness: str | None = None

    def __bool__(self):
        return self.holds


def holds_locally(m, premises: Sequence[S.Formula], f: S.Formula) -> LocalResult:
    """Does every world giving all premises the value 1 also give ``f`` the value 1?"""
    ev = m.evaluator()
    top = m.chain.top
    ok = np.ones(len(m.worlds), dtype=bool)
    for g in premises:
        ok &= ev(g)[0] == top
    bad = np.flatnonzero(ok & (ev(f)[0] != top))
    if len(bad):
        return LocalResult(False, m.worlds[bad[0]])
    return LocalResult(True)


def restrict_to_level0_class(lm, v):
    """Submodel of a layered model on the level-0 class of ``v``."""
    q0 = lm.weak[0]
    if not (np.all(np.diag(q0)) and np.array_equal(q0, q0.T)
            and np.all(~((q0.astype(int) @ q0.astype(int)) > 0) | q0)):
        raise NotAnEquivalence("the level-0 relation is not an equivalence relation")
    i = lm.worlds.index(str(v)) if not isinstance(v, (int, np.integer)) else int(v)
    keep = np.flatnonzero(q0[i])
    return lm.submodel(keep)
