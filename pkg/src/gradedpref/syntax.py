"""Formula syntax: AST, parser, printer and the definability rewrites.

Grammar, loosest to tightest binding::

    formula := imp
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := prod ("&" prod)*
    prod    := unary ("*" unary)*
    unary   := ("~" | "delta" | "A" | "E" | "box" | "dia" | "sbox" | "sdia"
                | "box(" label ")" | "dia(" label ")" | "sbox(" label ")"
                | "sdia(" label ")") unary | atom
    atom    := ident | "#" label | "(" formula ")"

A cut prefix like ``box(0.5)`` must be written without a space before the
parenthesis; ``box (p -> q)`` is the unsubscripted box of a parenthesised
formula.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator

from .errors import FormulaSyntaxError, UnknownElement, ZeroStrictCut

__all__ = [
    "Formula", "Var", "Const", "Meta",
    "And", "Or", "Prod", "Implies", "Neg", "Delta",
    "Box", "Dia", "SBox", "SDia", "Univ", "Exist",
    "BoxCut", "DiaCut", "SBoxCut", "SDiaCut",
    "iff", "approx", "big_and", "big_or",
    "parse", "to_text", "elaborate", "modal_depth", "variables", "subformulas",
    "desugar_dia_from_box", "desugar_box_from_dia", "desugar_graded_from_cuts", "desugar_cuts_via_delta",
    "MODAL_TYPES", "CUT_TYPES",
]


class Formula:
    """Base class of all AST nodes. Nodes are immutable and hash in O(1)."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self):
        return to_text(self)


def _node(cls):
    """Frozen dataclass whose structural hash is computed once."""
    cls = dataclass(frozen=True, eq=True)(cls)
    fields_ = [f.name for f in cls.__dataclass_fields__.values() if f.name != "_h"]

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((cls.__name__,) + tuple(getattr(self, f) for f in fields_)))

    def __hash__(self):
        return self._h

    cls.__post_init__ = __post_init__
    cls.__hash__ = __hash__
    cls.field_names = tuple(fields_)
    return cls


_h = field(default=0, init=False, repr=False, compare=False)


@_node
class Var(Formula):
    name: str
    _h: int = _h


@_node
class Const(Formula):
    label: str
    _h: int = _h


@_node
class Meta(Formula):
    """Schema metavariable; only ever appears inside axiom templates."""
    name: str
    _h: int = _h


class Binary(Formula):
    symbol = ""
    prec = 0

    def children(self):
        return (self.left, self.right)


@_node
class Implies(Binary):
    left: Formula
    right: Formula
    _h: int = _h
    symbol = "->"
    prec = 1


@_node
class Or(Binary):
    left: Formula
    right: Formula
    _h: int = _h
    symbol = "|"
    prec = 2


@_node
class And(Binary):
    left: Formula
    right: Formula
    _h: int = _h
    symbol = "&"
    prec = 3


@_node
class Prod(Binary):
    left: Formula
    right: Formula
    _h: int = _h
    symbol = "*"
    prec = 4


class Unary(Formula):
    keyword = ""

    def children(self):
        return (self.body,)

    def rebuild(self, body):
        return type(self)(body)


@_node
class Neg(Unary):
    body: Formula
    _h: int = _h
    keyword = "~"


@_node
class Delta(Unary):
    body: Formula
    _h: int = _h
    keyword = "delta"


@_node
class Box(Unary):
    body: Formula
    _h: int = _h
    keyword = "box"


@_node
class Dia(Unary):
    body: Formula
    _h: int = _h
    keyword = "dia"


@_node
class SBox(Unary):
    body: Formula
    _h: int = _h
    keyword = "sbox"


@_node
class SDia(Unary):
    body: Formula
    _h: int = _h
    keyword = "sdia"


@_node
class Univ(Unary):
    body: Formula
    _h: int = _h
    keyword = "A"


@_node
class Exist(Unary):
    body: Formula
    _h: int = _h
    keyword = "E"


class Cut(Unary):
    strict = False

    def rebuild(self, body):
        return type(self)(self.level, body)


@_node
class BoxCut(Cut):
    level: str
    body: Formula
    _h: int = _h
    keyword = "box"


@_node
class DiaCut(Cut):
    level: str
    body: Formula
    _h: int = _h
    keyword = "dia"


@_node
class SBoxCut(Cut):
    level: str
    body: Formula
    _h: int = _h
    keyword = "sbox"
    strict = True


@_node
class SDiaCut(Cut):
    level: str
    body: Formula
    _h: int = _h
    keyword = "sdia"
    strict = True


MODAL_TYPES = (Box, Dia, SBox, SDia, Univ, Exist, BoxCut, DiaCut, SBoxCut, SDiaCut)
CUT_TYPES = (BoxCut, DiaCut, SBoxCut, SDiaCut)
_PLAIN_PREFIX = {"~": Neg, "delta": Delta, "A": Univ, "E": Exist,
                 "box": Box, "dia": Dia, "sbox": SBox, "sdia": SDia}
_CUT_PREFIX = {"box": BoxCut, "dia": DiaCut, "sbox": SBoxCut, "sdia": SDiaCut}
KEYWORDS = frozenset(_PLAIN_PREFIX) - {"~"}


# -- helpers ---------------------------------------------------------------

def iff(a: Formula, b: Formula) -> Formula:
    """``a <-> b`` abbreviates ``(a -> b) * (b -> a)``."""
    return Prod(Implies(a, b), Implies(b, a))


def approx(f: Formula, label: str) -> Formula:
    """``f ≈ c`` abbreviates ``delta(f <-> #c)``."""
    return Delta(iff(f, Const(label)))


def big_and(parts) -> Formula:
    return reduce(And, parts)


def big_or(parts) -> Formula:
    return reduce(Or, parts)


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(g.children())


def variables(f: Formula) -> list[str]:
    return sorted({g.name for g in subformulas(f) if isinstance(g, Var)})


def modal_depth(f: Formula) -> int:
    inner = max((modal_depth(c) for c in f.children()), default=0)
    return inner + 1 if isinstance(f, MODAL_TYPES) else inner


def map_bottom_up(f: Formula, fn, _memo=None) -> Formula:
    """Rebuild ``f`` children-first, applying ``fn`` to every rebuilt node.

    Shared subtrees are rewritten once, so the result shares them too.
    """
    memo = {} if _memo is None else _memo
    key = id(f)
    hit = memo.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    if isinstance(f, Binary):
        new = type(f)(map_bottom_up(f.left, fn, memo), map_bottom_up(f.right, fn, memo))
    elif isinstance(f, Unary):
        new = f.rebuild(map_bottom_up(f.body, fn, memo))
    else:
        new = f
    out = fn(new)
    memo[key] = (f, out)
    return out


# -- lexer / parser --------------------------------------------------------

# "$" and "&" only occur in schema templates: "$a" is a level parameter and
# "$a&$b" the meet of two of them
_LABEL = r"[A-Za-z0-9_./$]+"
_CUT_LABEL = r"[A-Za-z0-9_./$&]+"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<cut>(?:sbox|sdia|box|dia)\(\s*{_CUT_LABEL}\s*\))
  | (?P<const>\#{_LABEL})
  | (?P<arrow>->)
  | (?P<op>[|&*~()])
  | (?P<word>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


def _tokens(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            yield kind, m.group(), pos
        pos = m.end()
    yield "end", "", len(text)


class _Parser:
    def __init__(self, text, chain):
        self.text = text
        self.chain = chain
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, pos=None):
        raise FormulaSyntaxError(msg, self.peek()[2] if pos is None else pos, self.text)

    def expect(self, value):
        kind, val, pos = self.peek()
        if val != value:
            self.fail(f"expected {value!r}, found {val or 'end of input'!r}")
        self.advance()

    def check_label(self, label, pos):
        if self.chain is not None and label not in self.chain:
            raise UnknownElement(
                f"unknown element label {label!r} at position {pos}; chain has {list(self.chain.labels)}"
            )

    def formula(self):
        f = self.imp()
        kind, val, pos = self.peek()
        if kind != "end":
            self.fail(f"unexpected {val!r}")
        return f

    def imp(self):
        left = self.binary(2)
        if self.peek()[0] == "arrow":
            self.advance()
            return Implies(left, self.imp())
        return left

    _LEVELS = {2: ("|", Or), 3: ("&", And), 4: ("*", Prod)}

    def binary(self, level):
        if level > 4:
            return self.unary()
        sym, cls = self._LEVELS[level]
        left = self.binary(level + 1)
        while self.peek()[1] == sym:
            self.advance()
            left = cls(left, self.binary(level + 1))
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "cut":
            self.advance()
            word, label = val.split("(", 1)
            label = label[:-1].strip()
            self.check_label(label, pos)
            cls = _CUT_PREFIX[word]
            if cls.strict and self.chain is not None and self.chain.index(label) == 0:
                raise ZeroStrictCut(f"strict cut {word}({label}) at level 0 is not in the language", pos, self.text)
            return cls(label, self.unary())
        if (kind == "op" and val == "~") or (kind == "word" and val in KEYWORDS):
            self.advance()
            return _PLAIN_PREFIX[val](self.unary())
        return self.atom()

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "word":
            return Var(val)
        if kind == "const":
            label = val[1:]
            self.check_label(label, pos)
            return Const(label)
        if val == "(":
            f = self.imp()
            self.expect(")")
            return f
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse(text: str, chain=None) -> Formula:
    """Parse ``text``; labels are checked against ``chain`` when given."""
    return _Parser(text, chain).formula()


def elaborate(f: Formula, chain) -> Formula:
    """Check every label in ``f`` against ``chain``; return ``f`` unchanged."""
    for g in subformulas(f):
        if isinstance(g, Const):
            chain.index(g.label)
        elif isinstance(g, Cut):
            i = chain.index(g.level)
            if g.strict and i == 0:
                raise ZeroStrictCut(f"strict cut at level {g.level} is not in the language")
    return f


# -- printer ---------------------------------------------------------------

_UNARY_PREC = 5


def _prec(f: Formula) -> int:
    return f.prec if isinstance(f, Binary) else _UNARY_PREC


def to_text(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Const):
        return "#" + f.label
    if isinstance(f, Meta):
        return "?" + f.name
    if isinstance(f, Binary):
        left, right = to_text(f.left), to_text(f.right)
        if isinstance(f, Implies):
            # right-associative
            if _prec(f.left) <= f.prec:
                left = f"({left})"
        else:
            if _prec(f.left) < f.prec:
                left = f"({left})"
            if _prec(f.right) <= f.prec:
                right = f"({right})"
        return f"{left} {f.symbol} {right}"
    body = to_text(f.body)
    if _prec(f.body) < _UNARY_PREC:
        body = f"({body})"
    if isinstance(f, Neg):
        return "~" + body
    if isinstance(f, Cut):
        return f"{f.keyword}({f.level}) {body}"
    return f"{f.keyword} {body}"


# -- definability rewrites -------------------------------------------------

def _labels(chain, positive=False):
    return [chain.labels[i] for i in (chain.positive if positive else chain.elements)]


def desugar_dia_from_box(f: Formula, chain) -> Formula:
    """Replace every diamond by ``/\\_c (box(phi -> #c) -> #c)``.

    ``E`` is treated as the diamond of ``A``.
    """
    labels = _labels(chain)
    dual = {Dia: Box, SDia: SBox, Exist: Univ}

    def unfold(g):
        if isinstance(g, (DiaCut, SDiaCut)):
            box = BoxCut if isinstance(g, DiaCut) else SBoxCut
            return big_and(Implies(box(g.level, Implies(g.body, Const(c))), Const(c)) for c in labels)
        cls = dual.get(type(g))
        if cls is not None:
            return big_and(Implies(cls(Implies(g.body, Const(c))), Const(c)) for c in labels)
        return g

    return map_bottom_up(f, unfold)


def desugar_box_from_dia(f: Formula, chain) -> Formula:
    """Replace every box by ``/\\_c (dia(phi -> #c) -> #c)``; ``A`` is the box of ``E``."""
    labels = _labels(chain)
    dual = {Box: Dia, SBox: SDia, Univ: Exist}

    def unfold(g):
        if isinstance(g, (BoxCut, SBoxCut)):
            dia = DiaCut if isinstance(g, BoxCut) else SDiaCut
            return big_and(Implies(dia(g.level, Implies(g.body, Const(c))), Const(c)) for c in labels)
        cls = dual.get(type(g))
        if cls is not None:
            return big_and(Implies(cls(Implies(g.body, Const(c))), Const(c)) for c in labels)
        return g

    return map_bottom_up(f, unfold)


def desugar_graded_from_cuts(f: Formula, chain) -> Formula:
    """Express the unsubscripted modalities through the cut modalities."""
    every, pos = _labels(chain), _labels(chain, positive=True)

    def unfold(g):
        if isinstance(g, Box):
            return big_and(Implies(Const(c), BoxCut(c, g.body)) for c in every)
        if isinstance(g, Dia):
            return big_or(Prod(Const(c), DiaCut(c, g.body)) for c in every)
        if isinstance(g, SBox):
            return big_and(Implies(Const(c), SBoxCut(c, g.body)) for c in pos)
        if isinstance(g, SDia):
            return big_or(Prod(Const(c), SDiaCut(c, g.body)) for c in pos)
        return g

    return map_bottom_up(f, unfold)


def desugar_cuts_via_delta(f: Formula, chain) -> Formula:
    """Express ``box(b)`` / ``sbox(b)`` through ``dia`` / ``sdia`` and delta.

    ``box(b) phi`` becomes ``/\\_a (delta(#b -> dia(phi ≈ #a)) -> #a)``.
    At the bottom level that guard is constantly 1 and the formula collapses
    to ``#0``, so ``box(0)`` is rewritten to ``A`` instead.
    """
    labels = _labels(chain)
    bottom = chain.labels[0]

    def unfold(g):
        if isinstance(g, (BoxCut, SBoxCut)):
            if g.level == bottom and isinstance(g, BoxCut):
                return Univ(g.body)
            dia = Dia if isinstance(g, BoxCut) else SDia
            return big_and(
                Implies(Delta(Implies(Const(g.level), dia(approx(g.body, a)))), Const(a)) for a in labels
            )
        return g

    return map_bottom_up(f, unfold)


def delta_form_literal(level: str, body: Formula, chain, strict=False) -> Formula:
    """The delta definition of a cut box, without the bottom-level special case."""
    dia = SDia if strict else Dia
    return big_and(
        Implies(Delta(Implies(Const(level), dia(approx(body, a)))), Const(a)) for a in chain.labels
    )
