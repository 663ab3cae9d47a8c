"""Many-valued modal preference logic over finite MTL-chains.

Chains, formulas, preference models, bounded countermodel search, a
Hilbert-style proof checker and the bulldozing construction for layered
models.
"""
from .errors import *  # noqa: F401,F403
from .lattice import Chain, chain_from_spec, make_custom, make_godel, make_lukasiewicz
from .syntax import Formula, parse, to_text
from .relation import (
    CrispRelation, FuzzyRelation, cut, cut_of_strict, indifference, meet_transitive_closure,
    reconstruct_from_cuts, strict_of_cut, strict_part,
)
from .model import GeneralModel, PreferenceModel, eval, eval_all, holds_locally
from .transform import LayeredModel, bulldoze, check_strict_part_condition, derive_layered, to_preference_model
from .search import SearchBounds, Verdict, check_many, consequence_bounded, is_valid_bounded
from .proofs import SystemId, check_proof, parse_proof, prop_taut
from .prefs import PrefKind, build_pref, eval_pref
from .modelio import model_from_document, model_to_document, read_model, write_model

__version__ = "0.1.0"
