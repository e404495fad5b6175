import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from georeason.core import GeoLabel
from georeason.errors import EmptyInput, SchemaError, UnknownPredictionId, Unresolvable, ValidationError
from georeason.evaluation import (
    EARTH_RADIUS_KM,
    THRESHOLDS_KM,
    Gazetteer,
    evaluate,
    haversine_km,
    resolve,
    threshold_accuracy,
)
from georeason.rewards import ParsedCompletion

from tests.helpers import LONDON, PARIS, cosine_law_km, make_sample


_lat = st.floats(-90, 90)
_lon = st.floats(-180, 180, exclude_min=True)


def test_haversine_examples():
    assert haversine_km(PARIS, PARIS) == 0.0
    d = haversine_km(PARIS, LONDON)
    assert d == pytest.approx(cosine_law_km(PARIS, LONDON), rel=1e-9)
    assert d == pytest.approx(343.5, rel=0.005)
    assert haversine_km((0.0, 0.0), (0.0, 180.0)) == pytest.approx(math.pi * EARTH_RADIUS_KM, rel=1e-12)
    assert math.pi * EARTH_RADIUS_KM == pytest.approx(20015, abs=1)


@given(_lat, _lon, _lat, _lon)
def test_haversine_properties(lat1, lon1, lat2, lon2):
    a, b = (lat1, lon1), (lat2, lon2)
    d = haversine_km(a, b)
    assert d == haversine_km(b, a)
    assert 0 <= d <= math.pi * EARTH_RADIUS_KM + 1e-9
    assert haversine_km(a, a) == 0.0


@pytest.fixture
def gaz():
    g = Gazetteer()
    g.add("France", "Paris", *PARIS)
    g.add("France", "", 46.2276, 2.2137)
    g.add("United Kingdom", "London", *LONDON)
    return g


def test_resolve(gaz):
    assert resolve(ParsedCompletion("", "france", "paris"), gaz) == PARIS
    assert resolve(ParsedCompletion("", "france", "unknownville"), gaz) == (46.2276, 2.2137)
    with pytest.raises(Unresolvable):
        resolve(ParsedCompletion("", "peru", "lima"), gaz)
    assert resolve(GeoLabel("United Kingdom", "London"), gaz) == LONDON


def test_gazetteer_tsv(tmp_path):
    path = tmp_path / "g.tsv"
    path.write_text("# comment\nFrance\tParis\t48.8566\t2.3522\nFrance\t\t46.2\t2.2\n\nJapan\tKyōto\t35.01\t135.77\n",
                    encoding="utf-8")
    gaz = Gazetteer.from_tsv(path)
    assert gaz.entries[("japan", "kyoto")] == (35.01, 135.77)
    assert gaz.country_fallback["france"] == (46.2, 2.2)


@pytest.mark.parametrize("body", ["France\tParis\t48.8\n", "France\tParis\tx\t2\n",
                                  "France\tParis\t95\t2\n",
                                  "France\tParis\t48\t2\nfrance\tparis\t48\t2\n"])
def test_gazetteer_tsv_errors(tmp_path, body):
    path = tmp_path / "g.tsv"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(SchemaError):
        Gazetteer.from_tsv(path)


def test_bundled_gazetteer():
    gaz = Gazetteer.bundled()
    assert ("united states", "columbus") in gaz.entries
    assert "japan" in gaz.country_fallback


def _count_oracle(distances, thresholds):
    return [sum(1 for d in distances if d <= t) / len(distances) for t in thresholds]


def test_threshold_accuracy_examples():
    got = threshold_accuracy([0.5, 30, 3000], THRESHOLDS_KM)
    assert got == _count_oracle([0.5, 30, 3000], THRESHOLDS_KM)
    assert got == [1 / 3, 1 / 3, 2 / 3, 2 / 3, 2 / 3]
    assert threshold_accuracy([0, 0, 0]) == [1.0] * 5
    with pytest.raises(EmptyInput):
        threshold_accuracy([])


def test_threshold_accuracy_boundary_inclusive():
    assert threshold_accuracy([25.0, 25.0000001], [25.0]) == [0.5]


def test_threshold_accuracy_requires_increasing():
    with pytest.raises(ValidationError):
        threshold_accuracy([1.0], [25, 1])


@given(st.lists(st.floats(0, 20000), min_size=1, max_size=50))
def test_threshold_accuracy_monotone(distances):
    acc = threshold_accuracy(distances)
    assert all(a <= b for a, b in zip(acc, acc[1:]))
    assert acc == _count_oracle(distances, THRESHOLDS_KM)


def test_evaluate_exact_match(gaz):
    samples = [make_sample(sid="a")]
    report = evaluate(samples, {"a": ParsedCompletion("", "France", "Paris")}, gaz)
    assert list(report.accuracy.values()) == [1.0] * 5
    assert report.n_evaluated == 1 and report.n_unresolvable == 0


def test_evaluate_unknown_id(gaz):
    with pytest.raises(UnknownPredictionId):
        evaluate([make_sample(sid="a")], {"zzz": ParsedCompletion("", "France", "Paris")}, gaz)


def test_evaluate_mixed_fixture(gaz):
    samples = [
        make_sample(sid="a", scene="urban"),                              # exact: 0 km
        make_sample(sid="b", scene="indoor"),                             # centroid ~ 100s km
        make_sample(sid="c", scene="natural", country="United Kingdom",  # London vs Paris
                    city="London", lat=LONDON[0], lon=LONDON[1]),
        make_sample(sid="d", scene="unknown"),                            # unresolvable
    ]
    preds = {
        "a": ParsedCompletion("", "France", "Paris"),
        "b": ParsedCompletion("", "France", "Nowhere"),
        "c": ParsedCompletion("", "France", "Paris"),
        "d": ParsedCompletion("", "Peru", "Lima"),
    }
    report = evaluate(samples, preds, gaz)
    d_b = cosine_law_km((46.2276, 2.2137), PARIS)
    d_c = cosine_law_km(PARIS, LONDON)
    dists = [0.0, d_b, d_c]
    assert 200 < d_b < 750 and 200 < d_c < 750
    assert list(report.accuracy.values()) == pytest.approx(_count_oracle(dists, THRESHOLDS_KM))
    assert report.n_evaluated == 3 and report.n_unresolvable == 1
    assert report.per_scene["urban"].accuracy["1"] == 1.0
    assert report.per_scene["indoor"].accuracy == {"1": 0.0, "25": 0.0, "200": 0.0, "750": 1.0, "2500": 1.0}
    assert report.per_scene["natural"].accuracy["200"] == 0.0
    assert "unknown" not in report.per_scene
    for tier in report.hits:
        assert report.hits[tier] == sum(s.hits[tier] for s in report.per_scene.values())


def test_evaluate_unparsable_counts_unresolvable(gaz):
    samples = [make_sample(sid="a"), make_sample(sid="b", scene="indoor")]
    report = evaluate(samples, {"a": ParsedCompletion("", "France", "Paris"), "b": None}, gaz)
    assert report.n_unresolvable == 1
    assert report.per_scene["indoor"].n_unresolvable == 1
    assert report.per_scene["indoor"].accuracy["1"] is None


def test_evaluate_all_unresolvable(gaz):
    with pytest.raises(EmptyInput):
        evaluate([make_sample(sid="a")], {"a": None}, gaz)


def test_report_json_field_names(gaz):
    report = evaluate([make_sample(sid="a")], {"a": ParsedCompletion("", "France", "Paris")}, gaz)
    d = report.to_dict()
    assert set(d) == {"thresholds_km", "accuracy", "hits", "n_evaluated", "n_unresolvable", "per_scene"}
    assert list(d["accuracy"]) == ["1", "25", "200", "750", "2500"]
    assert set(d["per_scene"]) == {"indoor", "natural", "urban"}
    assert np.isclose(d["thresholds_km"], THRESHOLDS_KM).all()
