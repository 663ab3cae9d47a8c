import json

import numpy as np
import pytest
from hypothesis import given

from gradedpref import make_godel, make_lukasiewicz
from gradedpref import syntax as S
from gradedpref.bundled import meal_model
from gradedpref.errors import DocumentError, ModelError
from gradedpref.model import GeneralModel, PreferenceModel
from gradedpref.modelio import dumps, load_document, model_from_document, model_to_document, read_model, write_model
from gradedpref.transform import LayeredModel, bulldoze

from models import clustered_model
from strategies import general_models, preference_models
from pathlib import Path

BUNDLED = Path(__file__).resolve().parent.parent / "src" / "gradedpref" / "data" / "meal_model.json"


def test_bundled_file_is_the_meal_model():
    m = read_model(BUNDLED)
    ref = meal_model()
    assert m.worlds == ref.worlds
    assert np.array_equal(m.P, ref.P)
    assert all(np.array_equal(m.valuation[k], ref.valuation[k]) for k in ref.valuation)


def test_dumps_is_json_with_one_row_per_line():
    text = dumps(meal_model())
    assert json.loads(text)["worlds"] == ["bf", "bm", "cf", "cm"]
    assert '["0.8", "1", "0.6", "0.8"]' in text


@given(preference_models(make_lukasiewicz(4)))
def test_preference_round_trip(m):
    back = model_from_document(dumps(m, witness_world=m.worlds[0]))
    assert isinstance(back, PreferenceModel)
    assert np.array_equal(back.P, m.P) and back.worlds == m.worlds
    assert load_document(dumps(m, m.worlds[0]))["witness_world"] == m.worlds[0]


@given(general_models(make_godel(3)))
def test_general_round_trip(m):
    back = model_from_document(model_to_document(m))
    assert isinstance(back, GeneralModel)
    assert np.array_equal(back.P, m.P)


def test_layered_round_trip(tmp_path):
    out, _ = bulldoze(clustered_model(), 2)
    path = tmp_path / "b.json"
    write_model(out, path)
    back = read_model(path)
    assert isinstance(back, LayeredModel) and back == out
    f = S.parse("sdia(0.5) box(1) p", out.chain)
    assert back.eval_all(f) == out.eval_all(f)


def _doc(**over):
    doc = model_to_document(meal_model())
    doc.update(over)
    return doc


@pytest.mark.parametrize("doc, msg", [
    ("[1, 2]", "JSON object"),
    ("{not json", "not valid JSON"),
    (_doc(lattice={"kind": "weird"}), "lattice"),
    (_doc(worlds=["a", "a", "b", "c"]), "distinct"),
    (_doc(relation=[["1"]]), "4x4"),
    (_doc(relation=[["1", "0.5", "0.5", "0.55"]] * 4), "relation"),
    (_doc(valuation={"p": {"bf": "1"}}), "no value at world"),
    (_doc(valuation={"p": {"bf": "1", "bm": "1", "cf": "1", "cm": "1", "zz": "0"}}), "unknown world"),
    (_doc(**{"class": "tree"}), "unknown model class"),
])
def test_document_errors(doc, msg):
    with pytest.raises(DocumentError, match=msg):
        model_from_document(doc if not isinstance(doc, str) else doc)


def test_missing_field_and_file():
    doc = _doc()
    del doc["worlds"]
    with pytest.raises(DocumentError, match="missing field 'worlds'"):
        model_from_document(doc)
    with pytest.raises(DocumentError, match="cannot read"):
        read_model("/nonexistent/model.json")


def test_non_preorder_rejected_unless_unchecked():
    doc = _doc(relation=[["0.5", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
    with pytest.raises(ModelError, match="reflexive"):
        model_from_document(doc)
    m = model_from_document(doc, check=False)
    assert m.P[0, 0] == 5
