"""Hypothesis strategies for formulas and small models."""
import numpy as np
from hypothesis import strategies as st

from gradedpref import syntax as S
from gradedpref.model import GeneralModel, PreferenceModel

from batch import random_preorder

UNARY = [S.Neg, S.Delta, S.Box, S.Dia, S.SBox, S.SDia, S.Univ, S.Exist]
BINARY = [S.And, S.Or, S.Prod, S.Implies]
CUTS = [S.BoxCut, S.DiaCut, S.SBoxCut, S.SDiaCut]


def formulas(chain, variables=("p", "q"), strict=True, max_leaves=12):
    labels = list(chain.labels)
    leaves = st.one_of(
        st.sampled_from([S.Var(v) for v in variables]),
        st.sampled_from([S.Const(c) for c in labels]),
    )
    unary = UNARY if strict else [u for u in UNARY if u not in (S.SBox, S.SDia)]
    cuts = CUTS if strict else CUTS[:2]

    def extend(children):
        def cut(kind, level, body):
            if kind in (S.SBoxCut, S.SDiaCut) and level == labels[0]:
                level = labels[-1]
            return kind(level, body)

        return st.one_of(
            st.builds(lambda k, a: k(a), st.sampled_from(unary), children),
            st.builds(lambda k, a, b: k(a, b), st.sampled_from(BINARY), children, children),
            st.builds(cut, st.sampled_from(cuts), st.sampled_from(labels), children),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def preference_models(draw, chain, variables=("p", "q"), max_worlds=4):
    k = draw(st.integers(1, max_worlds))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    P = random_preorder(rng, len(chain), k)
    val = {v: rng.integers(0, len(chain), size=k).tolist() for v in variables}
    worlds = [f"w{i}" for i in range(k)]
    return PreferenceModel(chain, worlds, P, val)


@st.composite
def general_models(draw, chain, variables=("p", "q"), max_worlds=4):
    k = draw(st.integers(1, max_worlds))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    R = rng.integers(0, len(chain), size=(k, k))
    val = {v: rng.integers(0, len(chain), size=k).tolist() for v in variables}
    return GeneralModel(chain, [f"w{i}" for i in range(k)], R, val)
