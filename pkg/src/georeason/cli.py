"""Command-line entry point: ``georeason {curate,reward,train,eval,stats}``.

Exit codes: 0 success, 1 I/O failure, 2 schema/validation error,
3 runtime constraint violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import AppConfig, load_config
from .core import dump_corpus, entities_from_list, iter_jsonl, load_corpus
from .curation import dataset_stats, run_pipeline, write_stats_json
from .errors import (
    ClipBoundaryHit,
    CompletionParseError,
    EmptyInput,
    GeoReasonError,
    GroupConstructionError,
    SchemaError,
    Unresolvable,
    ValidationError,
)
from .evaluation import Gazetteer, evaluate
from .grpo import load_prompts, train, write_policy_json
from .rewards import LocalizabilityScorer, parse_completion, score_completion

log = logging.getLogger("georeason")

EXIT_OK, EXIT_IO, EXIT_SCHEMA, EXIT_RUNTIME = 0, 1, 2, 3

LOG_FILENAME = "training_log.csv"
POLICY_FILENAME = "policy.json"


def _emit(obj: dict, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _config(args) -> AppConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _require(value: Optional[str], flag: str) -> str:
    if not value:
        raise ValidationError(f"{flag} is required for this command")
    return value


def cmd_curate(args) -> int:
    cfg = _config(args)
    corpus = load_corpus(_require(args.input, "--input"))
    out = _require(args.output, "--output")
    gaz = Gazetteer.from_tsv(cfg.paths.gazetteer) if cfg.paths.gazetteer else None
    kept, stats = run_pipeline(corpus, cfg.curation, gaz)
    dump_corpus(kept, out)
    write_stats_json(stats, dataset_stats(kept), f"{out}.stats.json")
    log.info("curated %d of %d samples", stats.retained_count, stats.input_count)
    return EXIT_OK


def _load_completions(path: str) -> list[dict]:
    rows = []
    for lineno, obj in iter_jsonl(path):
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) \
                or not isinstance(obj.get("completion"), str):
            raise SchemaError("expected {'id': str, 'completion': str}", line=lineno, path=path)
        if "entities" in obj:
            try:
                obj["entities"] = entities_from_list(obj["entities"], "entities")
            except ValidationError as exc:
                raise SchemaError(str(exc), line=lineno, path=path) from exc
        rows.append(obj)
    return rows


def cmd_reward(args) -> int:
    cfg = _config(args)
    samples = {s.id: s for s in load_corpus(_require(args.input, "--input"))}
    completions = _load_completions(_require(args.predictions, "--predictions"))
    for row in completions:
        if row["id"] not in samples:
            raise ValidationError(f"completion id {row['id']!r} does not match any sample")
    scorer = cfg.scorer()
    for row in completions:
        sample = samples[row["id"]]
        try:
            parsed = parse_completion(row["completion"])
        except CompletionParseError as exc:
            # malformed outputs earn nothing
            _emit({"id": row["id"], "r_loc": 0.0, "r_vis": 0.0, "r_geo": 0.0, "reward": 0.0,
                   "parse_error": str(exc)})
            continue
        b = score_completion(sample.id, parsed, sample.truth, sample.segmentation, scorer,
                             cfg.weights, row.get("entities"))
        _emit({"id": row["id"], "r_loc": b.r_loc, "r_vis": b.r_vis, "r_geo": b.r_geo,
               "reward": b.reward})
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args)
    # candidates without a loc_score fall back to the heuristic scorer
    heuristic = LocalizabilityScorer.heuristic(*cfg.heuristic_weights)
    prompts = load_prompts(_require(args.input, "--input"), heuristic, cfg.weights)
    out_dir = Path(args.output or cfg.paths.log_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    policy, training_log = train(prompts, cfg.grpo)
    training_log.write_csv(out_dir / LOG_FILENAME)
    write_policy_json(policy, out_dir / POLICY_FILENAME)
    log.info("trained %d prompts for %d steps -> %s", len(prompts), cfg.grpo.steps, out_dir)
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    gaz_path = args.gazetteer or cfg.paths.gazetteer
    if not gaz_path:
        raise ValidationError("no gazetteer configured (paths.gazetteer or --gazetteer)")
    gaz = Gazetteer.from_tsv(gaz_path)
    samples = load_corpus(_require(args.input, "--input"))
    predictions = {}
    for row in _load_completions(_require(args.predictions, "--predictions")):
        try:
            predictions[row["id"]] = parse_completion(row["completion"])
        except CompletionParseError:
            predictions[row["id"]] = None
    report = evaluate(samples, predictions, gaz)
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    corpus = load_corpus(_require(args.input, "--input"))
    text = json.dumps(dataset_stats(corpus).to_dict(), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "curate": (cmd_curate, "filter a corpus through the verification gates"),
    "reward": (cmd_reward, "score completions with the composite reward"),
    "train": (cmd_train, "run group-relative policy optimization on a prompt file"),
    "eval": (cmd_eval, "distance-threshold accuracy of predictions"),
    "stats": (cmd_stats, "print dataset statistics for a corpus"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file (defaults if omitted)")
    common.add_argument("--input", metavar="PATH")
    common.add_argument("--output", metavar="PATH")
    common.add_argument("--predictions", metavar="PATH", help="JSONL of {id, completion}")
    common.add_argument("--seed", type=int, metavar="N", help="override grpo.seed")
    common.add_argument("--gazetteer", metavar="PATH", help="override paths.gazetteer")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="georeason", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (GroupConstructionError, ClipBoundaryHit, EmptyInput, Unresolvable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GeoReasonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
