"""Builders for corpus records used across the test modules."""

import json
import math
import random

from georeason.core import sample_from_dict

PARIS = (48.8566, 2.3522)
LONDON = (51.5074, -0.1278)


def annotation(model_id="qwen", localizable=True, score=0.9, country="France", city="Paris",
               lat=None, lon=None, entities=("stadium",), text="reasoning"):
    return {
        "model_id": model_id,
        "localizable": localizable,
        "localizability_score": score,
        "predicted": {"country": country, "city": city, "lat": lat, "lon": lon},
        "trace": {"text": text, "entities": [{"text": e, "type": "ARCH"} for e in entities]},
    }


def sample_dict(sid="a", country="France", city="Paris", lat=PARIS[0], lon=PARIS[1],
                scene="urban", segmentation=("stadium", "sky"), annotations=None,
                label_localizable=True):
    if annotations is None:
        annotations = [
            annotation("internvl", lat=lat, lon=lon, country=country, city=city),
            annotation("qwen", lat=lat, lon=lon, country=country, city=city),
        ]
    return {
        "id": sid,
        "image_path": f"{sid}.jpg",
        "truth": {"country": country, "city": city, "lat": lat, "lon": lon},
        "scene": scene,
        "segmentation": list(segmentation),
        "label_localizable": label_localizable,
        "annotations": annotations,
    }


def make_sample(**kw):
    return sample_from_dict(sample_dict(**kw))


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


def cosine_law_km(a, b, radius=6371.0088):
    """Great-circle distance by the spherical law of cosines (independent of haversine)."""
    lat1, lon1, lat2, lon2 = map(math.radians, (*a, *b))
    c = math.sin(lat1) * math.sin(lat2) + math.cos(lat1) * math.cos(lat2) * math.cos(lon2 - lon1)
    return radius * math.acos(max(-1.0, min(1.0, c)))


_VOCAB = ("stadium", "scoreboard", "seating", "minaret", "tram", "palm", "flag", "bridge")


def synthetic_corpus(n, seed=0):
    """Random raw sample dicts covering every gate outcome.

    Entities and segmentation labels are single lowercase words so that
    grounding reduces to set membership in the oracle below.
    """
    rng = random.Random(seed)
    out = []
    for i in range(n):
        seg = rng.sample(_VOCAB, rng.randint(2, 6))
        pool = seg if rng.random() < 0.7 else _VOCAB
        shared = rng.sample(pool, min(len(pool), rng.randint(1, 3)))
        anns = []
        for model in rng.sample(["internvl", "qwen", "llava"], rng.choice([1, 2, 2, 2, 2, 3])):
            lat, lon = (PARIS if rng.random() < 0.9 else LONDON) if rng.random() < 0.95 else (None, None)
            ents = list(shared) if rng.random() < 0.8 else rng.sample(_VOCAB, rng.randint(0, 3))
            anns.append(annotation(
                model_id=model,
                localizable=rng.random() < 0.95,
                score=round(rng.uniform(0.2, 1.0), 2),
                country="France" if rng.random() < 0.92 else "Belgium",
                city="Paris" if rng.random() < 0.8 else "Lyon",
                lat=lat, lon=lon,
                entities=tuple(ents),
            ))
        out.append(sample_dict(sid=f"s{i:03d}", scene=rng.choice(["indoor", "natural", "urban", "unknown"]),
                               segmentation=tuple(seg), annotations=anns))
    return out


def oracle_keep(rec, loc_min=0.5, radius=25.0, jac_min=0.3, ground_min=0.5, same_city=False):
    """Brute-force restatement of the four curation predicates on a raw record."""
    anns = rec["annotations"]
    if not all(a["localizable"] for a in anns) or max(a["localizability_score"] for a in anns) < loc_min:
        return False
    pair = sorted(anns, key=lambda a: a["model_id"])[:2]
    truth = (rec["truth"]["lat"], rec["truth"]["lon"])
    for a in pair:
        p = a["predicted"]
        if p["lat"] is None or cosine_law_km((p["lat"], p["lon"]), truth) > radius + 1e-6:
            return False
    if len(pair) < 2:
        return False
    a, b = pair
    if a["predicted"]["country"].lower() != b["predicted"]["country"].lower():
        return False
    if same_city and a["predicted"]["city"].lower() != b["predicted"]["city"].lower():
        return False
    ea = {e["text"] for e in a["trace"]["entities"]}
    eb = {e["text"] for e in b["trace"]["entities"]}
    if not (ea | eb) or len(ea & eb) / len(ea | eb) < jac_min:
        return False
    seg = set(rec["segmentation"])
    for a in pair:
        ents = [e["text"] for e in a["trace"]["entities"]]
        if not ents or sum(e in seg for e in ents) / len(ents) < ground_min:
            return False
    return True


def bandit_prompt(pid="bandit"):
    """Prompt record whose three candidates score composite 1.0, 0.5 and 0.0 under default weights."""
    def cand(country, city):
        return {"completion": f"<think>no visible clues</think>\n<answer>\ncountry: {country}\ncity: {city}\n"
                              "</answer>", "loc_score": 0.0}

    return {"id": pid, "truth": {"country": "France", "city": "Paris"},
            "candidates": [cand("France", "Paris"), cand("France", "Lyon"), cand("Spain", "Madrid")]}
