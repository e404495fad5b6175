"""Distance-threshold evaluation of place-name predictions.

Predicted (country, city) pairs are geocoded with an offline gazetteer,
compared to the ground-truth coordinate by great-circle distance, and
scored as the fraction of predictions within each radius tier.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ._validation import check_latlon
from .core import SCENE_CLASSES, GeoLabel, Sample, normalize_place
from .errors import EmptyInput, SchemaError, UnknownPredictionId, Unresolvable, ValidationError
from .rewards import ParsedCompletion

EARTH_RADIUS_KM = 6371.0088
THRESHOLDS_KM = (1.0, 25.0, 200.0, 750.0, 2500.0)


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    # clamp: rounding can push h a hair past 1 for antipodes
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(1.0, max(0.0, h))))


@dataclass
class Gazetteer:
    """Offline (country, city) -> coordinate table with country-level fallback.

    File format is UTF-8 TSV ``country<TAB>city<TAB>lat<TAB>lon``; an empty
    city column defines the country fallback. Blank lines and lines starting
    with ``#`` are ignored. Each key may appear once.
    """

    entries: dict[tuple[str, str], tuple[float, float]] = field(default_factory=dict)
    country_fallback: dict[str, tuple[float, float]] = field(default_factory=dict)

    def add(self, country: str, city: str | None, lat: float, lon: float) -> None:
        coord = check_latlon(lat, lon, "gazetteer entry")
        c = normalize_place(country)
        if city is None or not city.strip():
            if c in self.country_fallback:
                raise ValidationError(f"duplicate country fallback for {c!r}")
            self.country_fallback[c] = coord
            return
        key = (c, normalize_place(city))
        if key in self.entries:
            raise ValidationError(f"duplicate gazetteer key {key!r}")
        self.entries[key] = coord

    @classmethod
    def from_tsv(cls, path: str | os.PathLike) -> "Gazetteer":
        gaz = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 4:
                    raise SchemaError(f"expected 4 tab-separated columns, got {len(parts)}",
                                      line=lineno, path=str(path))
                country, city, lat, lon = parts
                try:
                    gaz.add(country, city, float(lat), float(lon))
                except ValueError as exc:
                    raise SchemaError(str(exc), line=lineno, path=str(path)) from exc
        return gaz

    @classmethod
    def bundled(cls) -> "Gazetteer":
        """Small demo table of major cities and country centroids shipped with the package."""
        from importlib.resources import as_file, files

        with as_file(files("georeason") / "data" / "gazetteer_sample.tsv") as path:
            return cls.from_tsv(path)

    def __len__(self) -> int:
        return len(self.entries) + len(self.country_fallback)


def resolve(pred: ParsedCompletion | GeoLabel, gaz: Gazetteer) -> tuple[float, float]:
    """Coordinate for a predicted place: city entry, else country centroid."""
    coord = gaz.entries.get((pred.country, pred.city))
    if coord is not None:
        return coord
    coord = gaz.country_fallback.get(pred.country)
    if coord is not None:
        return coord
    raise Unresolvable(f"cannot geocode {pred.city!r}, {pred.country!r}")


def _check_thresholds(thresholds: Sequence[float]) -> list[float]:
    ts = [float(t) for t in thresholds]
    if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValidationError("thresholds must be non-empty and strictly increasing")
    return ts


def threshold_hits(distances: Sequence[float], thresholds: Sequence[float] = THRESHOLDS_KM) -> list[int]:
    ts = _check_thresholds(thresholds)
    d = np.sort(np.asarray(distances, dtype=float))
    return [int(np.searchsorted(d, t, side="right")) for t in ts]


def threshold_accuracy(distances: Sequence[float],
                       thresholds: Sequence[float] = THRESHOLDS_KM) -> list[float]:
    """Fraction of distances ``<= t`` for every threshold ``t``."""
    if len(distances) == 0:
        raise EmptyInput("no distances to score")
    n = len(distances)
    return [h / n for h in threshold_hits(distances, thresholds)]


def _tier_key(t: float) -> str:
    return f"{t:g}"


@dataclass
class SceneReport:
    accuracy: dict[str, Optional[float]]
    hits: dict[str, int]
    n_evaluated: int
    n_unresolvable: int

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "hits": self.hits,
                "n_evaluated": self.n_evaluated, "n_unresolvable": self.n_unresolvable}


@dataclass
class EvalReport:
    accuracy: dict[str, float]
    hits: dict[str, int]
    n_evaluated: int
    n_unresolvable: int
    per_scene: dict[str, SceneReport]
    thresholds_km: list[float]

    def to_dict(self) -> dict:
        return {
            "thresholds_km": self.thresholds_km,
            "accuracy": self.accuracy,
            "hits": self.hits,
            "n_evaluated": self.n_evaluated,
            "n_unresolvable": self.n_unresolvable,
            "per_scene": {k: v.to_dict() for k, v in self.per_scene.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _summarize(distances: list[float], n_unresolvable: int, ts: list[float]) -> SceneReport:
    hits = threshold_hits(distances, ts)
    n = len(distances)
    return SceneReport(
        accuracy={_tier_key(t): (h / n if n else None) for t, h in zip(ts, hits)},
        hits={_tier_key(t): h for t, h in zip(ts, hits)},
        n_evaluated=n,
        n_unresolvable=n_unresolvable,
    )


def evaluate(
    samples: Sequence[Sample],
    predictions: Mapping[str, Optional[ParsedCompletion]],
    gaz: Gazetteer,
    thresholds: Sequence[float] = THRESHOLDS_KM,
) -> EvalReport:
    """Score predictions against sample truths, overall and per scene.

    A prediction of ``None`` (e.g. an unparsable completion) counts as
    unresolvable. Unresolvable predictions are excluded from accuracy
    denominators. Samples without a prediction are ignored. Samples of the
    ``unknown`` scene count toward the overall figures only.
    """
    ts = _check_thresholds(thresholds)
    by_id = {s.id: s for s in samples}
    for pid in predictions:
        if pid not in by_id:
            raise UnknownPredictionId(pid)

    distances: dict[str, list[float]] = {scene: [] for scene in (*SCENE_CLASSES, "unknown")}
    unresolved: dict[str, int] = dict.fromkeys(distances, 0)
    for sample in samples:
        if sample.id not in predictions:
            continue
        pred = predictions[sample.id]
        try:
            if pred is None:
                raise Unresolvable("no parsable prediction")
            coord = resolve(pred, gaz)
        except Unresolvable:
            unresolved[sample.scene] += 1
            continue
        distances[sample.scene].append(haversine_km(coord, sample.truth.coordinate))

    all_d = [d for ds in distances.values() for d in ds]
    if not all_d:
        raise EmptyInput("no resolvable predictions to evaluate")
    overall = _summarize(all_d, sum(unresolved.values()), ts)
    return EvalReport(
        accuracy=overall.accuracy,
        hits=overall.hits,
        n_evaluated=overall.n_evaluated,
        n_unresolvable=overall.n_unresolvable,
        per_scene={s: _summarize(distances[s], unresolved[s], ts) for s in SCENE_CLASSES},
        thresholds_km=ts,
    )
