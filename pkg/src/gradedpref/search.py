"""Bounded countermodel search.

Models are enumerated world count by world count. For each count every
admissible relation matrix is generated and, in batches, evaluated against
every valuation of the relevant variables at once. A "valid" answer only
means no countermodel exists within the bounds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from . import syntax as S
from .errors import BudgetExceeded
from .lattice import Chain, make_lukasiewicz
from .model import Evaluator, GeneralModel, MatrixFrame, PreferenceModel
from .relation import meet_compose

__all__ = [
    "SearchBounds", "Verdict", "VALID", "COUNTERMODEL",
    "enumerate_models", "relation_matrices", "is_valid_bounded", "consequence_bounded",
    "check_many", "default_pool", "SuiteReport", "axiom_soundness_suite",
]

VALID = "valid-within-bounds"
COUNTERMODEL = "countermodel-found"

# model classes: which relation matrices are admissible
MODEL_CLASSES = ("preference", "general", "crisp")

# cap on R * V * n * n cells per evaluation batch
_BATCH_CELLS = 1 << 19
_GROUP = 48


@dataclass(frozen=True)
class SearchBounds:
    chain: Chain = field(default_factory=lambda: make_lukasiewicz(3))
    max_worlds: int = 3
    variables: tuple[str, ...] | None = None
    enumerate_exhaustively: bool = True
    random_samples: int = 0
    seed: int = 0
    budget: int = 10**9
    model_class: str = "preference"
    sample_max_worlds: int | None = None

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")
        if self.model_class not in MODEL_CLASSES:
            raise ValueError(f"model_class must be one of {MODEL_CLASSES}")

    def with_(self, **kw) -> "SearchBounds":
        return replace(self, **kw)

    def cardinality(self, nvars: int) -> int:
        return len(self.chain) ** (self.max_worlds ** 2 + self.max_worlds * nvars)


@dataclass
class Verdict:
    status: str
    formula: S.Formula | None = None
    countermodel: PreferenceModel | GeneralModel | None = None
    world: str | None = None

    @property
    def valid(self) -> bool:
        return self.status == VALID

    def __bool__(self):
        return self.valid

    def __str__(self):
        head = f"{self.status}: {self.formula}" if self.formula is not None else self.status
        if self.countermodel is not None:
            head += f" (fails at {self.world})"
        return head


# -- enumeration -----------------------------------------------------------

def relation_matrices(chain: Chain, k: int, model_class: str = "preference") -> np.ndarray:
    """All admissible ``k x k`` relation matrices, shape ``(N, k, k)``."""
    top = chain.top
    values = np.array([0, top]) if model_class == "crisp" else np.arange(len(chain))
    if model_class == "preference":
        cells = [(i, j) for i in range(k) for j in range(k) if i != j]
    else:
        cells = [(i, j) for i in range(k) for j in range(k)]
    n_cells = len(cells)
    idx = np.indices((len(values),) * n_cells).reshape(n_cells, -1).T if n_cells else np.zeros((1, 0), dtype=np.int64)
    out = np.full((len(idx), k, k), top, dtype=np.int64)
    for c, (i, j) in enumerate(cells):
        out[:, i, j] = values[idx[:, c]]
    if model_class == "preference" and k > 2:
        comp = np.minimum(out[:, :, :, None], out[:, None, :, :]).max(axis=2)
        out = out[np.all(comp <= out, axis=(1, 2))]
    return out


def _valuations(chain: Chain, k: int, nvars: int) -> np.ndarray:
    """All valuations as an array ``(V, nvars, k)``."""
    cells = nvars * k
    if cells == 0:
        return np.zeros((1, nvars, k), dtype=np.int64)
    grid = np.indices((len(chain),) * cells).reshape(cells, -1).T
    return grid.reshape(-1, nvars, k)


def _check_budget(bounds: SearchBounds, nvars: int):
    if bounds.enumerate_exhaustively:
        card = bounds.cardinality(nvars)
        if card > bounds.budget:
            raise BudgetExceeded(card, bounds.budget)


def _make_model(bounds, matrix, vals, variables):
    k = matrix.shape[0]
    worlds = [f"w{i}" for i in range(k)]
    valuation = {v: [bounds.chain.labels[x] for x in vals[i].tolist()] for i, v in enumerate(variables)}
    if bounds.model_class == "preference":
        return PreferenceModel(bounds.chain, worlds, matrix, valuation)
    return GeneralModel(bounds.chain, worlds, matrix, valuation)


def enumerate_models(bounds: SearchBounds) -> Iterator[PreferenceModel | GeneralModel]:
    variables = list(bounds.variables or ())
    _check_budget(bounds, len(variables))
    for k in range(1, bounds.max_worlds + 1):
        vals = _valuations(bounds.chain, k, len(variables))
        for m in relation_matrices(bounds.chain, k, bounds.model_class):
            for v in vals:
                yield _make_model(bounds, m, v, variables)


def _variables_of(formulas, bounds):
    if bounds.variables is not None:
        return list(bounds.variables)
    return sorted({v for f in formulas for v in S.variables(f)})


def _random_models(bounds: SearchBounds, nvars: int):
    """Yield ``(matrix, valuation)`` pairs; relations are closed, not uniform."""
    rng = np.random.default_rng(bounds.seed)
    hi = bounds.sample_max_worlds or bounds.max_worlds
    n = len(bounds.chain)
    for _ in range(bounds.random_samples):
        k = int(rng.integers(1, hi + 1))
        if bounds.model_class == "crisp":
            m = rng.integers(0, 2, size=(k, k)) * bounds.chain.top
        else:
            m = rng.integers(0, n, size=(k, k))
        if bounds.model_class == "preference":
            np.fill_diagonal(m, bounds.chain.top)
            while True:
                nxt = np.maximum(m, meet_compose(m))
                if np.array_equal(nxt, m):
                    break
                m = nxt
        yield m.astype(np.int64), rng.integers(0, n, size=(nvars, k))


# -- checking --------------------------------------------------------------

def check_many(formulas: Sequence[S.Formula], bounds: SearchBounds,
               premises: Sequence[S.Formula] = ()) -> list[Verdict]:
    """Bounded validity (or local consequence from ``premises``) for each formula.

    Every formula is evaluated on the same enumeration; the first failure in
    enumeration order (world count, relation, valuation, world) is reported.
    """
    formulas = list(formulas)
    variables = _variables_of(list(formulas) + list(premises), bounds)
    _check_budget(bounds, len(variables))
    chain = bounds.chain
    top = chain.top
    found: dict[int, Verdict] = {}
    pending = list(range(len(formulas)))
    preference = bounds.model_class == "preference"

    def scan(P, vals, rel_source, val_source):
        # P: (R, k, k); vals: (V, nvars, k)
        nonlocal pending
        frame = MatrixFrame(chain, P[:, None, :, :].astype(np.int8), preference=preference)
        env = {v: vals[None, :, i, :].astype(np.int8) for i, v in enumerate(variables)}
        ev = Evaluator(frame, env)
        ok = None
        for g in premises:
            g_ok = ev(g) == top
            ok = g_ok if ok is None else ok & g_ok
        still = []
        for i in pending:
            bad = ev(formulas[i]) != top
            if ok is not None:
                bad = bad & ok
            if bad.any():
                r, v, w = np.argwhere(bad)[0]
                model = _make_model(bounds, rel_source(r), val_source(v), variables)
                found[i] = Verdict(COUNTERMODEL, formulas[i], model, model.worlds[w])
            else:
                still.append(i)
        pending = still

    # formulas go through in groups so the per-evaluator memo stays small
    everything = pending
    for start_f in range(0, len(everything), _GROUP):
        pending = everything[start_f:start_f + _GROUP]
        if bounds.enumerate_exhaustively:
            for k in range(1, bounds.max_worlds + 1):
                if not pending:
                    break
                vals = _valuations(chain, k, len(variables))
                rels = relation_matrices(chain, k, bounds.model_class)
                step = max(1, _BATCH_CELLS // (len(vals) * k * k))
                for start in range(0, len(rels), step):
                    if not pending:
                        break
                    chunk = rels[start:start + step]
                    scan(chunk, vals, lambda r, chunk=chunk: chunk[r], lambda v, vals=vals: vals[v])
        for m, val in _random_models(bounds, len(variables)):
            if not pending:
                break
            scan(m[None], val[None], lambda r, m=m: m, lambda v, val=val: val)

    return [found.get(i, Verdict(VALID, formulas[i])) for i in range(len(formulas))]


def is_valid_bounded(f: S.Formula, bounds: SearchBounds | None = None) -> Verdict:
    return check_many([f], bounds or SearchBounds())[0]


def consequence_bounded(premises: Sequence[S.Formula], f: S.Formula,
                        bounds: SearchBounds | None = None) -> Verdict:
    return check_many([f], bounds or SearchBounds(), premises=premises)[0]


# -- axiom suites ----------------------------------------------------------

def default_pool(chain: Chain) -> list[S.Formula]:
    """``p, q, p -> q, p & q`` and one constant per chain element."""
    base = [S.parse(t) for t in ("p", "q", "p -> q", "p & q")]
    return base + [S.Const(lab) for lab in chain.labels]


@dataclass
class SuiteEntry:
    schema: str
    params: dict
    formula: S.Formula
    verdict: Verdict


@dataclass
class SuiteReport:
    system: str
    entries: list[SuiteEntry]

    @property
    def failures(self) -> list[SuiteEntry]:
        return [e for e in self.entries if not e.verdict.valid]

    @property
    def all_valid(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        by_schema: dict[str, list[int]] = {}
        for e in self.entries:
            tally = by_schema.setdefault(e.schema, [0, 0])
            tally[0] += 1
            tally[1] += 0 if e.verdict.valid else 1
        lines = [f"system {self.system}: {len(self.entries)} instances, {len(self.failures)} refuted"]
        for name, (total, bad) in by_schema.items():
            lines.append(f"  {name:<14} {total:>5} instances  {bad:>4} refuted")
        for e in self.failures[:20]:
            lines.append(f"  refuted {e.schema} {e.params}: {e.formula} (at {e.verdict.world})")
        return "\n".join(lines)


def axiom_soundness_suite(system, bounds: SearchBounds | None = None, pool=None,
                          extra: Sequence[tuple[str, dict, S.Formula]] = ()) -> SuiteReport:
    """Instantiate every schema of ``system`` and check each instance.

    The model class follows the system: general models for M, crisp ones
    for CM, preference models otherwise.
    """
    from .proofs import SystemId, model_class_for, instantiate_catalog

    system = SystemId(system)
    bounds = (bounds or SearchBounds()).with_(model_class=model_class_for(system))
    pool = default_pool(bounds.chain) if pool is None else pool
    items = list(instantiate_catalog(system, bounds.chain, pool)) + list(extra)
    verdicts = check_many([f for _, _, f in items], bounds)
    return SuiteReport(system.value, [SuiteEntry(s, p, f, v) for (s, p, f), v in zip(items, verdicts)])


def formula_pool(variables: Sequence[str], chain: Chain, depth: int,
                 modalities: Sequence[str] = ("box", "dia")) -> list[S.Formula]:
    """Small exhaustive-ish pool: atoms, then one connective or modality per level."""
    atoms = [S.Var(v) for v in variables] + [S.Const(chain.labels[0]), S.Const(chain.labels[-1])]
    layer = list(atoms)
    seen = set(layer)
    ctor = {"box": S.Box, "dia": S.Dia, "sbox": S.SBox, "sdia": S.SDia, "A": S.Univ, "E": S.Exist}
    for _ in range(depth):
        nxt = []
        for f in layer:
            for name in modalities:
                nxt.append(ctor[name](f))
        for f, g in itertools.product(layer[:4], atoms[:2]):
            nxt.append(S.Implies(f, g))
            nxt.append(S.Prod(f, g))
        fresh = [f for f in nxt if f not in seen]
        seen.update(fresh)
        layer = fresh
    return sorted(seen, key=lambda f: (S.modal_depth(f), S.to_text(f)))
