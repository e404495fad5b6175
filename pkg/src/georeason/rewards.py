"""Task rewards for geo-localization completions.

Three signals are combined linearly into the scalar reward used for policy
optimization:

* localizability: probability that the image/reasoning pair supports a
  reliable location guess (fixture lookup or a logistic heuristic),
* visual grounding: fraction of reasoning entities that match a visual
  element of the image,
* geo-accuracy: hierarchical country/city correctness.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_unit_interval
from .core import Entity, GeoLabel, ReasoningTrace, Sample, VisualElementSet, iter_jsonl, normalize_place
from .errors import (
    EmptyAfterNormalization,
    MissingCityLine,
    MissingCountryLine,
    MissingThinkBlock,
    SchemaError,
    UnknownSampleId,
    ValidationError,
)

JACCARD_MATCH_MIN = 0.5

# --------------------------------------------------------------------------
# completion parsing

THINK_OPEN, THINK_CLOSE = "<think>", "</think>"
_TAG_RE = re.compile(r"</?(?:think|answer)>", re.IGNORECASE)
_COUNTRY_RE = re.compile(r"^[ \t]*country[ \t]*:(.*)$", re.IGNORECASE | re.MULTILINE)
_CITY_RE = re.compile(r"^[ \t]*city[ \t]*:(.*)$", re.IGNORECASE | re.MULTILINE)


@dataclass(frozen=True)
class ParsedCompletion:
    think: str
    country: str
    city: str

    def __post_init__(self):
        object.__setattr__(self, "country", normalize_place(self.country))
        object.__setattr__(self, "city", normalize_place(self.city))

    @property
    def label(self) -> GeoLabel:
        return GeoLabel(self.country, self.city)


def _last_value(pattern: re.Pattern, text: str) -> Optional[str]:
    found = None
    for match in pattern.finditer(text):
        try:
            found = normalize_place(match.group(1))
        except EmptyAfterNormalization:
            continue
    return found


def parse_completion(raw: str) -> ParsedCompletion:
    """Parse a templated model output into think text, country and city.

    The think block is the text between the first ``<think>`` and the next
    ``</think>``. Answer lines may appear anywhere; the last ``country:`` and
    ``city:`` lines win, since reasoning often names candidates first.
    """
    start = raw.find(THINK_OPEN)
    if start < 0:
        raise MissingThinkBlock("completion has no <think> block")
    end = raw.find(THINK_CLOSE, start + len(THINK_OPEN))
    if end < 0:
        raise MissingThinkBlock("completion has an unterminated <think> block")
    think = raw[start + len(THINK_OPEN):end]

    # tags may share a line with the answer ("<answer>country: X")
    body = _TAG_RE.sub("\n", raw)
    country = _last_value(_COUNTRY_RE, body)
    if country is None:
        raise MissingCountryLine("completion has no 'country:' line")
    city = _last_value(_CITY_RE, body)
    if city is None:
        raise MissingCityLine("completion has no 'city:' line")
    return ParsedCompletion(think=think, country=country, city=city)


def render_completion(think: str, country: str, city: str) -> str:
    """Instantiate the answer template; inverse of :func:`parse_completion`."""
    return f"{THINK_OPEN}{think}{THINK_CLOSE}\n<answer>\ncountry: {country}\ncity: {city}\n</answer>"


# --------------------------------------------------------------------------
# visual grounding


def _tokens(text: str) -> list[str]:
    return text.split()


def _contains_tokens(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    return any(list(haystack[i:i + n]) == list(needle) for i in range(len(haystack) - n + 1))


def token_jaccard(a: str, b: str) -> float:
    """Jaccard similarity of whitespace token sets; 0.0 when both are empty."""
    sa, sb = set(_tokens(a)), set(_tokens(b))
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def set_jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def _element_match(a: str, b: str) -> bool:
    if a == b:
        return True
    ta, tb = _tokens(a), _tokens(b)
    if _contains_tokens(ta, tb) or _contains_tokens(tb, ta):
        return True
    return token_jaccard(a, b) >= JACCARD_MATCH_MIN


def soft_match(entity: Entity, visual: VisualElementSet) -> int:
    """1 if the entity approximately names any visual element, else 0.

    Approximate means exact equality, whole-token containment either way
    ("red brick building" contains "building"), or token Jaccard >= 0.5.
    """
    text = entity.text
    if text in visual:
        return 1
    return int(any(_element_match(text, v) for v in visual))


def visual_grounding_reward(entities: Sequence[Entity], visual: VisualElementSet) -> float:
    if not entities:
        return 0.0
    return sum(soft_match(e, visual) for e in entities) / len(entities)


# Closed vocabulary used to pull entities out of free-form think text when a
# completion does not come with an explicit entity list.
VISUAL_LEXICON: dict[str, str] = {
    **dict.fromkeys(
        ["building", "skyscraper", "tower", "house", "church", "cathedral", "mosque", "minaret",
         "temple", "pagoda", "castle", "palace", "bridge", "stadium", "arena", "seating",
         "wall", "fence", "roof", "red roof", "window", "balcony", "column", "arch", "dome",
         "monument", "statue", "fountain", "lighthouse", "windmill", "pier", "harbor",
         "railway", "station", "platform", "tunnel", "market", "shop", "storefront",
         "restaurant", "cafe", "hotel", "museum", "skyline", "street", "road", "sidewalk",
         "crosswalk", "alley", "square", "plaza", "parking lot", "stairs", "ceiling",
         "floor", "corridor", "escalator"],
        "ARCH",
    ),
    **dict.fromkeys(
        ["sign", "signage", "street sign", "road sign", "billboard", "scoreboard", "banner",
         "flag", "license plate", "poster", "menu", "text", "logo", "traffic light"],
        "SIGN",
    ),
    **dict.fromkeys(
        ["sky", "cloud", "tree", "palm tree", "vegetation", "grass", "forest", "mountain",
         "hill", "rock", "cliff", "sand", "beach", "sea", "ocean", "lake", "river",
         "waterfall", "snow", "glacier", "desert", "field", "flower", "water"],
        "NATURE",
    ),
    **dict.fromkeys(
        ["car", "bus", "truck", "taxi", "tram", "train", "bicycle", "motorcycle", "boat",
         "ship", "airplane", "tuk tuk"],
        "VEHICLE",
    ),
    **dict.fromkeys(
        ["person", "crowd", "spectator", "cheerleader", "marching band", "umbrella",
         "bench", "lamp", "streetlight", "table", "chair", "painting", "artwork"],
        "OBJECT",
    ),
}


def extract_entities(text: str, lexicon: Mapping[str, str] = VISUAL_LEXICON) -> tuple[Entity, ...]:
    """Entities are lexicon terms occurring as whole-token phrases in ``text``.

    Longer terms shadow the shorter terms they contain ("palm tree" suppresses
    "tree"). Output follows first occurrence in the text.
    """
    try:
        tokens = _tokens(normalize_place(text))
    except EmptyAfterNormalization:
        return ()
    # naive plural folding: "towers" also hits "tower"
    folded = [t[:-1] if len(t) > 3 and t.endswith("s") and not t.endswith("ss") else t for t in tokens]
    hits: list[tuple[int, int, str]] = []
    for term in sorted(lexicon, key=lambda t: -len(t.split())):
        term_toks = term.split()
        n = len(term_toks)
        for i in range(len(tokens) - n + 1):
            window = tokens[i:i + n]
            fwindow = folded[i:i + n]
            if window == term_toks or fwindow == term_toks:
                span = (i, i + n)
                if not any(s <= span[0] and span[1] <= e for s, e, _ in hits):
                    hits.append((span[0], span[1], term))
    seen: dict[str, None] = {}
    for _, _, term in sorted(hits):
        seen.setdefault(term, None)
    return tuple(Entity(term, lexicon[term]) for term in seen)


# --------------------------------------------------------------------------
# geo-accuracy / localizability / composite


def geo_accuracy_reward(pred: GeoLabel, truth: GeoLabel, alpha: float = 0.5) -> float:
    """0 for a wrong country, ``1 - alpha`` for right country / wrong city, 1 for both right."""
    alpha = check_unit_interval(alpha, "alpha")
    if pred.country != truth.country:
        return 0.0
    return alpha * float(pred.city == truth.city) + (1.0 - alpha)


def logistic(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@dataclass(frozen=True)
class LocalizabilityScorer:
    """Stand-in for a learned localizability classifier.

    ``fixture`` returns externally produced scores keyed by sample id;
    ``heuristic`` scores ``logistic(w0 + w1*grounded - w2*ungrounded)``
    from the entity grounding counts of the trace.
    """

    kind: str = "heuristic"
    fixture_table: Mapping[str, float] = field(default_factory=dict)
    weights: tuple[float, float, float] = (-1.0, 0.8, 0.2)

    def __post_init__(self):
        if self.kind not in ("fixture", "heuristic"):
            raise ValidationError(f"unknown scorer kind {self.kind!r}")
        table = {str(k): check_unit_interval(v, f"fixture score for {k!r}")
                 for k, v in self.fixture_table.items()}
        object.__setattr__(self, "fixture_table", table)
        if len(self.weights) != 3:
            raise ValidationError("heuristic weights must be (w0, w1, w2)")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @classmethod
    def fixture(cls, table: Mapping[str, float]) -> "LocalizabilityScorer":
        return cls(kind="fixture", fixture_table=table)

    @classmethod
    def heuristic(cls, w0: float = -1.0, w1: float = 0.8, w2: float = 0.2) -> "LocalizabilityScorer":
        return cls(kind="heuristic", weights=(w0, w1, w2))

    @classmethod
    def from_jsonl(cls, path: str | os.PathLike) -> "LocalizabilityScorer":
        """Read a fixture file of ``{"id": str, "score": num}`` lines."""
        table: dict[str, float] = {}
        for lineno, obj in iter_jsonl(path):
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
                raise SchemaError("expected {'id': str, 'score': num}", line=lineno, path=str(path))
            score = obj.get("score")
            if isinstance(score, bool) or not isinstance(score, (int, float)) or not 0 <= score <= 1:
                raise SchemaError("score must be a number in [0, 1]", line=lineno, path=str(path))
            table[obj["id"]] = float(score)
        return cls.fixture(table)

    def score(self, sample_id: str, trace: ReasoningTrace, visual: VisualElementSet) -> float:
        return localizability_reward(sample_id, trace, visual, self)


def localizability_reward(
    sample_id: str,
    trace: ReasoningTrace,
    visual: VisualElementSet,
    scorer: LocalizabilityScorer,
) -> float:
    if scorer.kind == "fixture":
        try:
            return scorer.fixture_table[sample_id]
        except KeyError:
            raise UnknownSampleId(sample_id) from None
    w0, w1, w2 = scorer.weights
    grounded = sum(soft_match(e, visual) for e in trace.entities)
    ungrounded = len(trace.entities) - grounded
    return logistic(w0 + w1 * grounded - w2 * ungrounded)


@dataclass(frozen=True)
class RewardWeights:
    lambda_loc: float = 0.2
    lambda_vis: float = 0.5
    lambda_geo: float = 1.0
    alpha: float = 0.5

    def __post_init__(self):
        for name in ("lambda_loc", "lambda_vis", "lambda_geo", "alpha"):
            object.__setattr__(self, name, check_unit_interval(getattr(self, name), name))

    @property
    def lambdas(self) -> tuple[float, float, float]:
        return (self.lambda_loc, self.lambda_vis, self.lambda_geo)


def composite_reward(r_loc: float, r_vis: float, r_geo: float, w: RewardWeights) -> float:
    return w.lambda_loc * r_loc + w.lambda_vis * r_vis + w.lambda_geo * r_geo


@dataclass(frozen=True)
class RewardBreakdown:
    r_loc: float
    r_vis: float
    r_geo: float
    reward: float


def score_completion(
    sample_id: str,
    parsed: ParsedCompletion,
    truth: GeoLabel,
    visual: VisualElementSet,
    scorer: LocalizabilityScorer,
    weights: RewardWeights,
    entities: Optional[Sequence[Entity]] = None,
) -> RewardBreakdown:
    """All three rewards plus the weighted sum for one parsed completion.

    When ``entities`` is None they are extracted from the think text.
    """
    if entities is None:
        entities = extract_entities(parsed.think)
    trace = ReasoningTrace(parsed.think, tuple(entities))
    r_loc = localizability_reward(sample_id, trace, visual, scorer)
    r_vis = visual_grounding_reward(trace.entities, visual)
    r_geo = geo_accuracy_reward(parsed.label, truth, weights.alpha)
    return RewardBreakdown(r_loc, r_vis, r_geo, composite_reward(r_loc, r_vis, r_geo, weights))


class CompositeReward(BaseEstimator, TransformerMixin):
    """Estimator-style front end to :func:`score_completion`.

    ``transform`` takes a sequence of ``(sample, completion)`` pairs, where a
    completion is a raw string or a :class:`ParsedCompletion`, and returns an
    ``(n, 4)`` array with columns ``r_loc, r_vis, r_geo, reward``.
    """

    def __init__(self, lambda_loc=0.2, lambda_vis=0.5, lambda_geo=1.0, alpha=0.5, scorer=None):
        self.lambda_loc = lambda_loc
        self.lambda_vis = lambda_vis
        self.lambda_geo = lambda_geo
        self.alpha = alpha
        self.scorer = scorer

    def fit(self, X=None, y=None):
        self.weights_ = RewardWeights(self.lambda_loc, self.lambda_vis, self.lambda_geo, self.alpha)
        self.scorer_ = self.scorer if self.scorer is not None else LocalizabilityScorer.heuristic()
        return self

    def transform(self, X: Iterable[tuple[Sample, object]]) -> np.ndarray:
        if not hasattr(self, "weights_"):
            self.fit()
        rows = []
        for sample, completion in X:
            parsed = completion if isinstance(completion, ParsedCompletion) else parse_completion(completion)
            b = score_completion(sample.id, parsed, sample.truth, sample.segmentation,
                                 self.scorer_, self.weights_)
            rows.append((b.r_loc, b.r_vis, b.r_geo, b.reward))
        return np.asarray(rows, dtype=float).reshape(-1, 4)


def dump_fixture_scores(table: Mapping[str, float], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, score in table.items():
            fh.write(json.dumps({"id": key, "score": score}) + "\n")
