import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from georeason.core import Entity, GeoLabel, ReasoningTrace, VisualElementSet
from georeason.errors import (
    MissingCityLine,
    MissingCountryLine,
    MissingThinkBlock,
    UnknownSampleId,
    ValidationError,
)
from georeason.rewards import (
    CompositeReward,
    LocalizabilityScorer,
    ParsedCompletion,
    RewardWeights,
    composite_reward,
    dump_fixture_scores,
    extract_entities,
    geo_accuracy_reward,
    localizability_reward,
    parse_completion,
    render_completion,
    soft_match,
    visual_grounding_reward,
)

from tests.helpers import make_sample

# -- parsing -----------------------------------------------------------------


def test_parse_template_instance():
    p = parse_completion("<think>red roofs</think><answer>country: France\ncity: Paris</answer>")
    assert p == ParsedCompletion(think="red roofs", country="france", city="paris")


def test_parse_missing_think():
    with pytest.raises(MissingThinkBlock):
        parse_completion("country: Japan\ncity: Kyoto")


def test_parse_unterminated_think():
    with pytest.raises(MissingThinkBlock):
        parse_completion("<think>no end\ncountry: Japan\ncity: Kyoto")


def test_parse_missing_city():
    with pytest.raises(MissingCityLine):
        parse_completion("<think>x</think>country: Brazil")


def test_parse_missing_country():
    with pytest.raises(MissingCountryLine):
        parse_completion("<think>x</think>city: Recife")


def test_parse_takes_last_answer_lines():
    raw = ("<think>Could be\ncountry: Spain\ncity: Madrid\nbut the signs say otherwise</think>\n"
           "<answer>\nCountry: Portugal\nCITY:  Lisboa \n</answer>")
    p = parse_completion(raw)
    assert (p.country, p.city) == ("portugal", "lisboa")
    assert p.think.startswith("Could be")


def test_parse_skips_empty_answer_values():
    p = parse_completion("<think>t</think>country: Chile\ncity: Santiago\ncountry:   \n")
    assert p.country == "chile"


_line_text = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\n\r<>"),
                     min_size=1, max_size=30)


@given(think=st.text(max_size=80), country=_line_text, city=_line_text)
def test_render_parse_round_trip(think, country, city):
    assume("</think>" not in think)
    assume(not any(line.lstrip().lower().startswith(("country", "city")) for line in think.splitlines()))
    try:
        expected = ParsedCompletion(think, country, city)
    except ValidationError:
        return
    assert parse_completion(render_completion(think, country, city)) == expected


# -- soft matching / grounding --------------------------------------------------


def _token_containment_oracle(a: str, b: str) -> bool:
    """Enumerate every contiguous token window of the longer string."""
    ta, tb = a.split(), b.split()
    if len(ta) < len(tb):
        ta, tb = tb, ta
    windows = {tuple(ta[i:j]) for i in range(len(ta)) for j in range(i + 1, len(ta) + 1)}
    return tuple(tb) in windows


def test_soft_match_examples():
    assert soft_match(Entity("stadium"), VisualElementSet(["stadium", "sky"])) == 1
    assert _token_containment_oracle("red brick building", "building")
    assert soft_match(Entity("red brick building"), VisualElementSet(["building"])) == 1
    assert soft_match(Entity("minaret"), VisualElementSet(["sky", "road"])) == 0


def test_soft_match_rules():
    # substring but not whole-token: "sky" inside "skyscraper"
    assert soft_match(Entity("skyscraper"), VisualElementSet(["sky"])) == 0
    # jaccard 2/3 >= 0.5
    assert soft_match(Entity("palm tree row"), VisualElementSet(["palm row"])) == 1
    # jaccard 1/3 < 0.5, no containment
    assert soft_match(Entity("red car"), VisualElementSet(["blue car"])) == 0
    assert soft_match(Entity("stadium"), VisualElementSet()) == 0


_words = st.sampled_from(["sky", "road", "red", "brick", "building", "tree", "palm", "car", "tower"])
_phrase = st.lists(_words, min_size=1, max_size=4).map(" ".join)


@given(a=_phrase, b=_phrase)
def test_soft_match_symmetric_for_singletons(a, b):
    assert soft_match(Entity(a), VisualElementSet([b])) == soft_match(Entity(b), VisualElementSet([a]))


@given(a=_phrase, b=_phrase)
def test_soft_match_agrees_with_rule_oracle(a, b):
    ta, tb = set(a.split()), set(b.split())
    jac = len(ta & tb) / len(ta | tb)
    expected = a == b or _token_containment_oracle(a, b) or jac >= 0.5
    assert soft_match(Entity(a), VisualElementSet([b])) == int(expected)


def test_visual_grounding_reward_examples():
    visual = VisualElementSet(["stadium", "flag"])
    assert visual_grounding_reward([Entity("stadium"), Entity("flag")], visual) == 1.0
    # one of two grounded: (1 + 0) / 2
    assert visual_grounding_reward([Entity("stadium"), Entity("flag")],
                                   VisualElementSet(["stadium"])) == 0.5
    assert visual_grounding_reward([], visual) == 0.0


def test_extract_entities_uses_whole_tokens_and_longest_terms():
    ents = extract_entities("Palm trees line the road; a minaret rises over the skyscrapers.")
    texts = [e.text for e in ents]
    assert texts == ["palm tree", "road", "minaret", "skyscraper"]
    assert "tree" not in texts and "sky" not in texts


# -- geo accuracy ------------------------------------------------------------------


@pytest.mark.parametrize(
    "pred, expected",
    [
        (("france", "paris"), 1.0),
        (("france", "lyon"), 0.5),
        (("spain", "paris"), 0.0),
        (("spain", "madrid"), 0.0),
    ],
)
def test_geo_accuracy_tiers(pred, expected):
    assert geo_accuracy_reward(GeoLabel(*pred), GeoLabel("france", "paris"), 0.5) == expected


@given(alpha=st.floats(0, 1), same_country=st.booleans(), same_city=st.booleans())
def test_geo_accuracy_three_values(alpha, same_country, same_city):
    truth = GeoLabel("france", "paris")
    pred = GeoLabel("france" if same_country else "italy", "paris" if same_city else "rome")
    r = geo_accuracy_reward(pred, truth, alpha)
    assert r in {0.0, 1.0 - alpha, 1.0}
    assert geo_accuracy_reward(truth, truth, alpha) == 1.0


def test_geo_accuracy_rejects_bad_alpha():
    with pytest.raises(ValidationError):
        geo_accuracy_reward(GeoLabel("a", "b"), GeoLabel("a", "b"), 1.5)


# -- localizability --------------------------------------------------------------


def test_fixture_scorer_passthrough():
    scorer = LocalizabilityScorer.fixture({"a": 0.87})
    trace = ReasoningTrace("t", ())
    assert localizability_reward("a", trace, VisualElementSet(), scorer) == 0.87
    with pytest.raises(UnknownSampleId):
        localizability_reward("missing", trace, VisualElementSet(), scorer)


def test_heuristic_scorer_logistic():
    scorer = LocalizabilityScorer.heuristic(-1.0, 0.8, 0.2)
    empty = ReasoningTrace("t", ())
    assert localizability_reward("x", empty, VisualElementSet(), scorer) == pytest.approx(
        1 / (1 + math.exp(1.0)), abs=1e-12)
    assert 1 / (1 + math.exp(1.0)) == pytest.approx(0.2689, abs=1e-4)
    # g=2, u=1: z = -1 + 1.6 - 0.2 = 0.4
    trace = ReasoningTrace("t", (Entity("sky"), Entity("road"), Entity("minaret")))
    got = localizability_reward("x", trace, VisualElementSet(["sky", "road"]), scorer)
    assert got == pytest.approx(1 / (1 + math.exp(-0.4)), abs=1e-12)


def test_fixture_file_round_trip(tmp_path):
    path = tmp_path / "scores.jsonl"
    dump_fixture_scores({"a": 0.25, "b": 1.0}, path)
    scorer = LocalizabilityScorer.from_jsonl(path)
    assert scorer.fixture_table == {"a": 0.25, "b": 1.0}


def test_fixture_rejects_out_of_range():
    with pytest.raises(ValidationError):
        LocalizabilityScorer.fixture({"a": 1.2})


# -- composite -------------------------------------------------------------------


def test_composite_reward_examples():
    default = RewardWeights(0.2, 0.5, 1.0)
    assert composite_reward(1, 1, 1, default) == pytest.approx(1.7, abs=1e-12)
    assert composite_reward(0, 0, 0, default) == 0.0
    assert composite_reward(0.5, 0.5, 0.5, RewardWeights(1, 1, 1)) == 1.5


def test_reward_weights_defaults_and_bounds():
    assert RewardWeights().lambdas == (0.2, 0.5, 1.0)
    assert RewardWeights().alpha == 0.5
    with pytest.raises(ValidationError):
        RewardWeights(lambda_geo=1.5)


@given(r=st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)),
       w=st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)),
       i=st.integers(0, 2), delta=st.floats(0, 1))
def test_composite_linear_and_monotone(r, w, i, delta):
    weights = RewardWeights(*w)
    base = composite_reward(*r, weights)
    bumped = list(r)
    bumped[i] = min(1.0, r[i] + delta)
    after = composite_reward(*bumped, weights)
    assert after >= base - 1e-12
    assert after - base == pytest.approx(w[i] * (bumped[i] - r[i]), abs=1e-12)
    assert 0 <= base <= sum(w) + 1e-12


def test_composite_reward_estimator():
    sample = make_sample(sid="a", segmentation=("stadium", "scoreboard"))
    good = render_completion("a stadium with a scoreboard", "France", "Paris")
    bad = render_completion("a minaret", "Spain", "Madrid")
    est = CompositeReward(scorer=LocalizabilityScorer.fixture({"a": 1.0}))
    out = est.fit().transform([(sample, good), (sample, bad)])
    np.testing.assert_allclose(out[0], [1.0, 1.0, 1.0, 1.7])
    np.testing.assert_allclose(out[1], [1.0, 0.0, 0.0, 0.2])
    assert est.get_params()["lambda_vis"] == 0.5
