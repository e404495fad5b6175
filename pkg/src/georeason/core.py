"""Domain types, place-name normalization and the sample corpus format.

A corpus is a JSON Lines file, one :class:`Sample` per line::

    {"id": "...", "image_path": "...",
     "truth": {"country": "...", "city": "...", "lat": 48.85, "lon": 2.35},
     "scene": "indoor" | "natural" | "urban" | "unknown",
     "segmentation": ["sky", "building"],
     "label_localizable": true,
     "annotations": [{"model_id": "...", "localizable": true,
                      "localizability_score": 0.9,
                      "predicted": {"country": "...", "city": "...", "lat": null, "lon": null},
                      "trace": {"text": "...", "entities": [{"text": "...", "type": "ARCH"}]}}]}

Place names, entity texts and segmentation labels are normalized on load.
:func:`dump_corpus` writes the canonical form, which :func:`load_corpus`
reads back unchanged.
"""

from __future__ import annotations

import json
import os
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from ._validation import check_latlon, check_unit_interval
from .errors import DuplicateId, EmptyAfterNormalization, SchemaError, ValidationError

SCENES = ("indoor", "natural", "urban", "unknown")
SCENE_CLASSES = ("indoor", "natural", "urban")


def normalize_place(raw: str) -> str:
    """Fold a place name or label to its comparison form.

    Lowercases, folds diacritics (NFD, then drop combining marks), turns
    punctuation into spaces and collapses whitespace.

    >>> normalize_place("  São   Paulo ")
    'sao paulo'
    """
    if not isinstance(raw, str):
        raise TypeError(f"expected str, got {type(raw).__name__}")
    text = unicodedata.normalize("NFD", raw.lower())
    chars = []
    for ch in text:
        cat = unicodedata.category(ch)
        if cat.startswith("M"):
            continue
        chars.append(" " if cat.startswith("P") else ch)
    # lower() can expose new decomposable characters; a second pass makes the fold idempotent
    text = unicodedata.normalize("NFD", "".join(chars).lower())
    text = "".join(ch for ch in text if not unicodedata.category(ch).startswith("M"))
    out = " ".join(text.split())
    if not out:
        raise EmptyAfterNormalization(raw)
    return out


@dataclass(frozen=True)
class GeoLabel:
    """A place: normalized country and city plus an optional coordinate."""

    country: str
    city: str
    lat: Optional[float] = None
    lon: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "country", normalize_place(self.country))
        object.__setattr__(self, "city", normalize_place(self.city))
        if (self.lat is None) != (self.lon is None):
            raise ValidationError("lat and lon must be both present or both absent")
        if self.lat is not None:
            lat, lon = check_latlon(self.lat, self.lon, "GeoLabel")
            object.__setattr__(self, "lat", lat)
            object.__setattr__(self, "lon", lon)

    @property
    def has_coordinate(self) -> bool:
        return self.lat is not None

    @property
    def coordinate(self) -> tuple[float, float]:
        if self.lat is None:
            raise ValidationError(f"{self.city}, {self.country} has no coordinate")
        return (self.lat, self.lon)


@dataclass(frozen=True)
class Entity:
    text: str
    type: str = ""

    def __post_init__(self):
        object.__setattr__(self, "text", normalize_place(self.text))


class VisualElementSet:
    """Ordered, duplicate-free set of normalized visual element labels."""

    __slots__ = ("_elements", "_lookup")

    def __init__(self, elements: Iterable[str] = ()):
        seen: dict[str, None] = {}
        for raw in elements:
            seen.setdefault(normalize_place(raw), None)
        self._elements = tuple(seen)
        self._lookup = frozenset(self._elements)

    @property
    def elements(self) -> tuple[str, ...]:
        return self._elements

    def __iter__(self) -> Iterator[str]:
        return iter(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __contains__(self, item: object) -> bool:
        return item in self._lookup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VisualElementSet):
            return NotImplemented
        return self._lookup == other._lookup

    def __hash__(self) -> int:
        return hash(self._lookup)

    def __repr__(self) -> str:
        return f"VisualElementSet({list(self._elements)!r})"

    def union(self, other: Iterable[str]) -> "VisualElementSet":
        return VisualElementSet((*self._elements, *other))


@dataclass(frozen=True)
class ReasoningTrace:
    text: str
    entities: tuple[Entity, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))


@dataclass(frozen=True)
class ModelAnnotation:
    model_id: str
    localizable: bool
    localizability_score: float
    predicted: GeoLabel
    trace: ReasoningTrace

    def __post_init__(self):
        object.__setattr__(
            self,
            "localizability_score",
            check_unit_interval(self.localizability_score, "localizability_score"),
        )


@dataclass(frozen=True)
class Sample:
    id: str
    image_path: str
    truth: GeoLabel
    scene: str = "unknown"
    segmentation: VisualElementSet = field(default_factory=VisualElementSet)
    annotations: tuple[ModelAnnotation, ...] = ()
    label_localizable: bool = True

    def __post_init__(self):
        if not self.truth.has_coordinate:
            raise ValidationError(f"sample {self.id!r}: truth coordinate is required")
        if self.scene not in SCENES:
            raise ValidationError(f"sample {self.id!r}: unknown scene {self.scene!r}")
        if not isinstance(self.segmentation, VisualElementSet):
            object.__setattr__(self, "segmentation", VisualElementSet(self.segmentation))
        object.__setattr__(self, "annotations", tuple(self.annotations))


# --------------------------------------------------------------------------
# (de)serialization


def _require(obj: dict, key: str, kind, ctx: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{ctx} must be an object")
    if key not in obj:
        raise SchemaError(f"missing field {ctx}.{key}")
    value = obj[key]
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise SchemaError(f"field {ctx}.{key} has wrong type {type(value).__name__}")
    return value


def _optional_number(obj: dict, key: str, ctx: str):
    value = obj.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"field {ctx}.{key} must be a number or null")
    return value


def geolabel_from_dict(obj: dict, ctx: str, *, coordinate_required: bool) -> GeoLabel:
    country = _require(obj, "country", str, ctx)
    city = _require(obj, "city", str, ctx)
    if coordinate_required:
        lat = _require(obj, "lat", float, ctx)
        lon = _require(obj, "lon", float, ctx)
    else:
        lat = _optional_number(obj, "lat", ctx)
        lon = _optional_number(obj, "lon", ctx)
    return GeoLabel(country, city, lat, lon)


def entities_from_list(items, ctx: str) -> tuple[Entity, ...]:
    if not isinstance(items, list):
        raise SchemaError(f"{ctx} must be a list")
    out = []
    for i, item in enumerate(items):
        text = _require(item, "text", str, f"{ctx}[{i}]")
        etype = item.get("type", "")
        if not isinstance(etype, str):
            raise SchemaError(f"field {ctx}[{i}].type must be a string")
        out.append(Entity(text, etype))
    return tuple(out)


def _annotation_from_dict(obj: dict, ctx: str) -> ModelAnnotation:
    trace = _require(obj, "trace", dict, ctx)
    return ModelAnnotation(
        model_id=_require(obj, "model_id", str, ctx),
        localizable=_require(obj, "localizable", bool, ctx),
        localizability_score=_require(obj, "localizability_score", float, ctx),
        predicted=geolabel_from_dict(
            _require(obj, "predicted", dict, ctx), f"{ctx}.predicted", coordinate_required=False
        ),
        trace=ReasoningTrace(
            text=_require(trace, "text", str, f"{ctx}.trace"),
            entities=entities_from_list(_require(trace, "entities", list, f"{ctx}.trace"),
                                        f"{ctx}.trace.entities"),
        ),
    )


def sample_from_dict(obj: dict) -> Sample:
    """Build a :class:`Sample` from a decoded JSON object.

    Raises :class:`SchemaError` (without a line number) on any violation.
    """
    if not isinstance(obj, dict):
        raise SchemaError("record must be a JSON object")
    try:
        segmentation = _require(obj, "segmentation", list, "sample")
        if not all(isinstance(s, str) for s in segmentation):
            raise SchemaError("sample.segmentation must be a list of strings")
        annotations = _require(obj, "annotations", list, "sample")
        scene = _require(obj, "scene", str, "sample")
        if scene not in SCENES:
            raise SchemaError(f"sample.scene must be one of {SCENES}, got {scene!r}")
        return Sample(
            id=_require(obj, "id", str, "sample"),
            image_path=_require(obj, "image_path", str, "sample"),
            truth=geolabel_from_dict(
                _require(obj, "truth", dict, "sample"), "truth", coordinate_required=True
            ),
            scene=scene,
            segmentation=VisualElementSet(segmentation),
            annotations=tuple(
                _annotation_from_dict(a, f"annotations[{i}]") for i, a in enumerate(annotations)
            ),
            label_localizable=_require(obj, "label_localizable", bool, "sample"),
        )
    except SchemaError:
        raise
    except ValidationError as exc:
        raise SchemaError(str(exc)) from exc


def geolabel_to_dict(label: GeoLabel) -> dict:
    return {"country": label.country, "city": label.city, "lat": label.lat, "lon": label.lon}


def sample_to_dict(sample: Sample) -> dict:
    return {
        "id": sample.id,
        "image_path": sample.image_path,
        "truth": geolabel_to_dict(sample.truth),
        "scene": sample.scene,
        "segmentation": list(sample.segmentation),
        "label_localizable": sample.label_localizable,
        "annotations": [
            {
                "model_id": a.model_id,
                "localizable": a.localizable,
                "localizability_score": a.localizability_score,
                "predicted": geolabel_to_dict(a.predicted),
                "trace": {
                    "text": a.trace.text,
                    "entities": [{"text": e.text, "type": e.type} for e in a.trace.entities],
                },
            }
            for a in sample.annotations
        ],
    }


def dumps_sample(sample: Sample) -> str:
    return json.dumps(sample_to_dict(sample), ensure_ascii=False)


def iter_jsonl(path: str | os.PathLike) -> Iterator[tuple[int, object]]:
    """Yield ``(line_number, decoded_object)`` for every non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", line=lineno, path=str(path)) from exc


def load_corpus(path: str | os.PathLike) -> list[Sample]:
    samples: list[Sample] = []
    seen: set[str] = set()
    for lineno, obj in iter_jsonl(path):
        try:
            sample = sample_from_dict(obj)
        except SchemaError as exc:
            raise SchemaError(exc.detail, line=lineno, path=str(path)) from exc
        if sample.id in seen:
            raise DuplicateId(sample.id, line=lineno)
        seen.add(sample.id)
        samples.append(sample)
    return samples


def dump_corpus(samples: Iterable[Sample], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(dumps_sample(sample))
            fh.write("\n")
