"""Hilbert-style proofs: schema catalogs, instance matching and a line checker.

Schemas are written as formula templates. ``phi``, ``psi`` and ``chi`` are
formula metavariables, ``$a``-style labels are level parameters (in a cut
subscript or a constant) and ``$a&$b`` in a subscript is the meet of two
parameters. The propositional layer is handled semantically by the ``taut``
rule: a line is a tautology when, with its modal subformulas replaced by
fresh variables, it takes the top value under every assignment.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import syntax as S
from .errors import ProofFormatError
from .lattice import Chain

__all__ = [
    "SystemId", "Schema", "schema_catalog", "match_schema", "instantiate",
    "instantiate_catalog", "model_class_for",
    "Line", "Proof", "CheckResult", "check_proof", "parse_proof", "prop_taut",
]


class SystemId(str, Enum):
    M = "M"
    CM = "CM"
    mM = "mM"
    mM_minus_plus = "mM_minus_plus"
    P = "P"
    P_delta = "P_delta"


def model_class_for(system) -> str:
    system = SystemId(system)
    return {"M": "general", "CM": "crisp"}.get(system.value, "preference")


_METAS = ("phi", "psi", "chi")


@dataclass(frozen=True)
class Schema:
    """An axiom schema.

    ``params`` maps each level parameter to its domain, ``"B"`` or ``"B+"``;
    ``le`` lists pairs ``(x, y)`` that must satisfy ``x <= y``.
    """

    id: str
    template: S.Formula
    params: tuple[tuple[str, str], ...] = ()
    le: tuple[tuple[str, str], ...] = ()
    text: str = ""

    def admissible(self, binding: dict[str, int]) -> str | None:
        """``None`` when the binding meets the side conditions, else the reason."""
        for name, dom in self.params:
            if name not in binding:
                return f"parameter {name} is unbound"
            if dom == "B+" and binding[name] == 0:
                return f"parameter {name} must be positive"
        for x, y in self.le:
            if binding[x] > binding[y]:
                return f"side condition {x} <= {y} fails"
        return None


def _template(text: str) -> S.Formula:
    f = S.parse(text)

    def meta(g):
        return S.Meta(g.name) if isinstance(g, S.Var) and g.name in _METAS else g

    return S.map_bottom_up(f, meta)


def _schemas_for_box(prefix: str, box: str, dom: str, chain: Chain, crisp: bool, with_k: bool) -> list[Schema]:
    """The minimal modal logic for one box modality.

    ``box`` is a prefix such as ``box``, ``box($i)`` or ``sbox($i)``.
    """
    top, k = chain.labels[-1], chain.labels[-2]
    params = (("i", dom),) if "$i" in box else ()
    rows = [
        ("top", f"{box} #{top}", ()),
        ("MD", f"{box} phi & {box} psi -> {box} (phi & psi)", ()),
        ("Ax", f"({box} (#$c -> phi) -> (#$c -> {box} phi)) * ((#$c -> {box} phi) -> {box} (#$c -> phi))",
         (("c", "B"),)),
    ]
    if crisp:
        rows.append(("C", f"{box} (#{k} | phi) -> #{k} | {box} phi", ()))
    if with_k:
        rows.append(("K", f"{box} (phi -> psi) -> ({box} phi -> {box} psi)", ()))
    return [Schema(prefix + name, _template(t), params + extra, (), t) for name, t, extra in rows]


def _multi_modal(prefix: str, kind: str, dom: str, chain: Chain, reflexive: bool) -> list[Schema]:
    """mM for ``kind`` in ``box``/``sbox`` over levels in ``dom``."""
    out = _schemas_for_box(prefix, f"{kind}($i)", dom, chain, crisp=True, with_k=True)
    rows = [
        ("nest", f"{kind}($a) phi -> {kind}($b) phi", (("a", dom), ("b", dom)), (("a", "b"),)),
        ("4", f"{kind}($a&$b) phi -> {kind}($a) {kind}($b) phi", (("a", dom), ("b", dom)), ()),
    ]
    if reflexive:
        rows.append(("T", f"{kind}($a) phi -> phi", (("a", dom),), ()))
    if dom == "B":
        bot = chain.labels[0]
        rows.append(("B0", f"phi -> {kind}({bot}) dia({bot}) phi", (), ()))
    out += [Schema(prefix + n, _template(t), p, le, t) for n, t, p, le in rows]
    return out


def schema_catalog(system, chain: Chain) -> list[Schema]:
    system = SystemId(system)
    if system is SystemId.M:
        return _schemas_for_box("", "box", "B", chain, crisp=False, with_k=False)
    if system is SystemId.CM:
        return _schemas_for_box("", "box", "B", chain, crisp=True, with_k=True)
    if system is SystemId.mM:
        return _multi_modal("", "box", "B", chain, reflexive=True)
    if system is SystemId.mM_minus_plus:
        return _multi_modal("", "box", "B+", chain, reflexive=False)
    out = _multi_modal("", "box", "B", chain, reflexive=True)
    out += _multi_modal("s.", "sbox", "B+", chain, reflexive=False)
    rows = [
        ("incl", "box($b) phi -> sbox($b) phi", (("b", "B+"),), ()),
        ("I1", "sbox($b) phi -> box($a) sbox($b) phi", (("a", "B+"), ("b", "B+")), (("b", "a"),)),
        ("I2", "sbox($b) phi -> sbox($b) box($a) phi", (("a", "B+"), ("b", "B+")), (("b", "a"),)),
        ("I3", "sbox($b) phi & (psi -> #$a) -> box($b) (phi | (box($b) psi -> #$a))",
         (("a", "B"), ("b", "B+")), ()),
    ]
    if system is SystemId.P_delta:
        rows += [
            ("delta", "delta box($b) phi -> box($b) delta phi", (("b", "B"),), ()),
            ("s.delta", "delta sbox($b) phi -> sbox($b) delta phi", (("b", "B+"),), ()),
        ]
    out += [Schema(n, _template(t), p, le, t) for n, t, p, le in rows]
    return out


def allowed_boxes(system, chain: Chain) -> list[Callable[[S.Formula], bool]]:
    """Predicates recognising the box nodes that Nec and Mon may introduce."""
    system = SystemId(system)
    if system in (SystemId.M, SystemId.CM):
        return [lambda f: isinstance(f, S.Box)]
    lo = 1 if system is SystemId.mM_minus_plus else 0
    out = [lambda f: isinstance(f, S.BoxCut) and chain.index(f.level) >= lo]
    if system in (SystemId.P, SystemId.P_delta):
        out.append(lambda f: isinstance(f, S.SBoxCut) and chain.index(f.level) >= 1)
    return out


def rules_of(system) -> set[str]:
    system = SystemId(system)
    if system is SystemId.M:
        return {"mp", "mon"}
    return {"mp", "mon", "nec"}


# -- matching --------------------------------------------------------------

class _NoMatch(Exception):
    pass


def _bind_level(label: str, value: str, chain: Chain, binding: dict, deferred: list):
    if "&" in label:
        deferred.append((label, value))
        return
    if label.startswith("$"):
        name = label[1:]
        idx = chain.index(value) if value in chain else None
        if idx is None:
            raise _NoMatch()
        if binding.setdefault(name, idx) != idx:
            raise _NoMatch()
    elif label != value:
        raise _NoMatch()


def _unify(t: S.Formula, f: S.Formula, chain, subst, binding, deferred):
    if isinstance(t, S.Meta):
        prev = subst.setdefault(t.name, f)
        if prev != f:
            raise _NoMatch()
        return
    if type(t) is not type(f):
        raise _NoMatch()
    if isinstance(t, S.Var):
        if t != f:
            raise _NoMatch()
    elif isinstance(t, S.Const):
        _bind_level(t.label, f.label, chain, binding, deferred)
    elif isinstance(t, S.Binary):
        _unify(t.left, f.left, chain, subst, binding, deferred)
        _unify(t.right, f.right, chain, subst, binding, deferred)
    else:
        if isinstance(t, S.Cut):
            _bind_level(t.level, f.level, chain, binding, deferred)
        _unify(t.body, f.body, chain, subst, binding, deferred)


@dataclass
class Match:
    subst: dict[str, S.Formula]
    params: dict[str, int]


def match_schema(f: S.Formula, schema: Schema, chain: Chain, fixed: dict[str, int] | None = None):
    """Return a :class:`Match` or the reason for failure as a string."""
    subst: dict = {}
    binding: dict = dict(fixed or {})
    deferred: list = []
    try:
        _unify(schema.template, f, chain, subst, binding, deferred)
    except _NoMatch:
        return "formula is not an instance of the schema"
    except Exception as e:  # unknown labels in f
        return f"formula is not an instance of the schema ({e})"
    for label, value in deferred:
        names = [x[1:] for x in label.split("&")]
        if any(n not in binding for n in names):
            return "meet parameter left unbound"
        if min(binding[n] for n in names) != chain.index(value):
            return f"subscript {value} is not the meet of {', '.join(chain.labels[binding[n]] for n in names)}"
    reason = schema.admissible(binding)
    if reason:
        return reason
    return Match(subst, {k: v for k, v in binding.items()})


def instantiate(schema: Schema, subst: dict[str, S.Formula], params: dict[str, int], chain: Chain) -> S.Formula:
    def level(label):
        if label.startswith("$"):
            return chain.labels[min(params[x[1:]] for x in label.split("&"))]
        return label

    def fill(g):
        if isinstance(g, S.Meta):
            return subst[g.name]
        if isinstance(g, S.Const):
            return S.Const(level(g.label))
        if isinstance(g, S.Cut):
            return type(g)(level(g.level), g.body)
        return g

    return S.map_bottom_up(schema.template, fill)


def instantiate_catalog(system, chain: Chain, pool: Sequence[S.Formula]):
    """Every instance over ``pool`` and every admissible parameter binding.

    Yields ``(schema id, {param: label}, formula)``.
    """
    for schema in schema_catalog(system, chain):
        metas = sorted({g.name for g in S.subformulas(schema.template) if isinstance(g, S.Meta)})
        names = [n for n, _ in schema.params]
        doms = [range(1 if d == "B+" else 0, len(chain)) for _, d in schema.params]
        for values in itertools.product(*doms):
            binding = dict(zip(names, values))
            if schema.admissible(binding):
                continue
            for fs in itertools.product(pool, repeat=len(metas)):
                f = instantiate(schema, dict(zip(metas, fs)), binding, chain)
                yield schema.id, {k: chain.labels[v] for k, v in binding.items()}, f


# -- propositional tautologies ---------------------------------------------

def _abstract(f: S.Formula) -> tuple[S.Formula, dict[str, S.Formula]]:
    """Replace maximal modal subformulas by fresh variables."""
    table: dict[S.Formula, str] = {}
    used = set(S.variables(f))

    def go(g):
        if isinstance(g, S.MODAL_TYPES):
            name = table.get(g)
            if name is None:
                i = len(table)
                while f"_m{i}" in used:
                    i += 1
                name = table[g] = f"_m{i}"
                used.add(name)
            return S.Var(name)
        if isinstance(g, S.Binary):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, S.Unary):
            return g.rebuild(go(g.body))
        return g

    out = go(f)
    return out, {v: k for k, v in table.items()}


@dataclass
class TautResult:
    holds: bool
    assignment: dict[str, str] | None = None
    value: str | None = None

    def __bool__(self):
        return self.holds


def prop_taut(f: S.Formula, chain: Chain, limit: int = 10**7) -> TautResult:
    """Is ``f`` a tautology of the chain once modal subformulas are atoms?"""
    from .model import Evaluator, MatrixFrame

    g, atoms = _abstract(f)
    names = S.variables(g)
    size = len(chain) ** len(names)
    if size > limit:
        raise ProofFormatError(f"tautology check needs {size} assignments, limit is {limit}")
    if names:
        grid = np.indices((len(chain),) * len(names)).reshape(len(names), -1)
    else:
        grid = np.zeros((0, 1), dtype=np.int64)
    frame = MatrixFrame(chain, np.full((1, 1), chain.top, dtype=np.int64))
    env = {v: grid[i][:, None] for i, v in enumerate(names)}
    vals = Evaluator(frame, env)(g)[:, 0]
    bad = np.flatnonzero(vals != chain.top)
    if len(bad):
        j = bad[0]
        assignment = {}
        for i, v in enumerate(names):
            key = S.to_text(atoms[v]) if v in atoms else v
            assignment[key] = chain.labels[grid[i][j]]
        return TautResult(False, assignment, chain.labels[vals[j]])
    return TautResult(True)


# -- proofs ----------------------------------------------------------------

@dataclass
class Line:
    formula: S.Formula
    rule: str                       # premise | ax | taut | mp | nec | mon
    refs: tuple[int, ...] = ()      # 1-based line numbers (or premise number)
    schema: str | None = None
    params: dict[str, str] = field(default_factory=dict)
    level: str | None = None        # explicit level for nec


@dataclass
class Proof:
    lines: list[Line]
    premises: list[S.Formula] = field(default_factory=list)


@dataclass
class CheckResult:
    accepted: bool
    line: int | None = None
    reason: str | None = None
    theorems: list[S.Formula] = field(default_factory=list)

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return "accepted"
        return f"rejected at line {self.line}: {self.reason}"


def _unwrap_box(f: S.Formula, boxes):
    if isinstance(f, S.Unary) and any(ok(f) for ok in boxes):
        return f
    return None


def check_proof(proof: Proof, system, chain: Chain) -> CheckResult:
    """Accept iff every line is justified; report the first bad line otherwise."""
    system = SystemId(system)
    catalog = {s.id: s for s in schema_catalog(system, chain)}
    boxes = allowed_boxes(system, chain)
    rules = rules_of(system)
    tainted: list[bool] = []    # line depends on a premise
    done: list[S.Formula] = []

    def reject(n, why):
        return CheckResult(False, n, why)

    for n, line in enumerate(proof.lines, start=1):
        f = line.formula
        try:
            S.elaborate(f, chain)
        except Exception as e:
            return reject(n, f"bad formula: {e}")
        for r in line.refs if line.rule != "premise" else ():
            if not 1 <= r < n:
                return reject(n, f"reference {r} is not an earlier line")
        rule = line.rule
        if rule in ("mp", "nec", "mon") and rule not in rules:
            return reject(n, f"rule {rule} is not available in {system.value}")
        if rule == "premise":
            (k,) = line.refs
            if not 1 <= k <= len(proof.premises):
                return reject(n, f"there is no premise {k}")
            if proof.premises[k - 1] != f:
                return reject(n, f"line does not match premise {k}")
            tainted.append(True)
        elif rule == "taut":
            res = prop_taut(f, chain)
            if not res:
                return reject(n, f"not a tautology: value {res.value} under {res.assignment}")
            tainted.append(False)
        elif rule == "ax":
            schema = catalog.get(line.schema)
            if schema is None:
                return reject(n, f"no schema {line.schema!r} in {system.value}")
            try:
                fixed = {k: chain.index(v) for k, v in line.params.items()}
            except Exception as e:
                return reject(n, f"bad parameter: {e}")
            m = match_schema(f, schema, chain, fixed)
            if isinstance(m, str):
                return reject(n, f"{line.schema}: {m}")
            tainted.append(False)
        elif rule == "mp":
            i, j = line.refs
            a, b = proof.lines[i - 1].formula, proof.lines[j - 1].formula
            if not ((b == S.Implies(a, f)) or (a == S.Implies(b, f))):
                return reject(n, f"lines {i} and {j} do not give this line by modus ponens")
            tainted.append(tainted[i - 1] or tainted[j - 1])
        elif rule == "nec":
            (i,) = line.refs
            if tainted[i - 1]:
                return reject(n, f"necessitation applied to line {i}, which depends on a premise")
            box = _unwrap_box(f, boxes)
            if box is None or box.body != proof.lines[i - 1].formula:
                return reject(n, f"line is not a necessitation of line {i}")
            if line.level is not None and getattr(box, "level", None) != line.level:
                return reject(n, f"necessitation level {line.level} does not match the line")
            tainted.append(False)
        elif rule == "mon":
            (i,) = line.refs
            if tainted[i - 1]:
                return reject(n, f"monotonicity applied to line {i}, which depends on a premise")
            src = proof.lines[i - 1].formula
            ok = (isinstance(f, S.Implies) and isinstance(src, S.Implies)
                  and type(f.left) is type(f.right)
                  and _unwrap_box(f.left, boxes) is not None
                  and getattr(f.left, "level", None) == getattr(f.right, "level", None)
                  and f.left.body == src.left and f.right.body == src.right)
            if not ok:
                return reject(n, f"line is not obtained from line {i} by monotonicity")
            tainted.append(False)
        else:
            return reject(n, f"unknown justification {rule!r}")
        done.append(f)
    theorems = [ln.formula for ln, t in zip(proof.lines, tainted) if not t]
    return CheckResult(True, theorems=theorems)


# -- proof files -----------------------------------------------------------

_LINE = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*(.*?)\s*$")


def parse_justification(text: str) -> dict:
    parts = text.split()
    if not parts:
        raise ProofFormatError("empty justification")
    head, args = parts[0].lower(), parts[1:]

    def ints(xs):
        try:
            return tuple(int(x) for x in xs)
        except ValueError:
            raise ProofFormatError(f"expected line numbers in {text!r}") from None

    if head == "premise" and len(args) == 1:
        return {"rule": "premise", "refs": ints(args)}
    if head == "taut" and not args:
        return {"rule": "taut"}
    if head == "mp" and len(args) == 2:
        return {"rule": "mp", "refs": ints(args)}
    if head == "mon" and len(args) == 1:
        return {"rule": "mon", "refs": ints(args)}
    if head == "nec" and len(args) in (1, 2):
        level = args[0] if len(args) == 2 else None
        return {"rule": "nec", "refs": ints(args[-1:]), "level": level}
    if head == "ax" and args:
        params = {}
        for a in args[1:]:
            if "=" not in a:
                raise ProofFormatError(f"axiom parameter {a!r} should look like name=level")
            k, v = a.split("=", 1)
            params[k] = v
        return {"rule": "ax", "schema": args[0], "params": params}
    raise ProofFormatError(f"cannot read justification {text!r}")


def parse_proof(text: str, chain: Chain | None = None) -> Proof:
    """Read ``n. formula ; justification`` lines; ``#`` at line start is a comment.

    Lines justified by ``premise k`` declare premise ``k``.
    """
    lines: list[Line] = []
    premises: dict[int, S.Formula] = {}
    for raw_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        m = _LINE.match(raw)
        if m is None:
            raise ProofFormatError(f"line {raw_no}: expected 'n. formula ; justification'")
        num, body, just = int(m.group(1)), m.group(2), m.group(3)
        if num != len(lines) + 1:
            raise ProofFormatError(f"line {raw_no}: expected step {len(lines) + 1}, found {num}")
        f = S.parse(body, chain)
        j = parse_justification(just)
        if j["rule"] == "premise":
            k = j["refs"][0]
            premises.setdefault(k, f)
        lines.append(Line(f, j["rule"], j.get("refs", ()), j.get("schema"), j.get("params", {}), j.get("level")))
    prem = [premises[k] for k in sorted(premises)] if premises else []
    if premises and sorted(premises) != list(range(1, len(premises) + 1)):
        raise ProofFormatError("premises must be numbered 1, 2, ... without gaps")
    return Proof(lines, prem)
