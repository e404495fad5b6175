"""Group-relative policy optimization on a tabular categorical policy.

Each prompt owns a finite pool of candidate completions whose rewards are
known up front, so the policy is simply one logit vector per prompt. That
keeps every quantity of the objective (likelihood ratios, clipped surrogate,
KL to the reference) exactly computable, including the analytic gradient.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_positive, check_probability_vector, check_reward_vector
from .core import GeoLabel, VisualElementSet, entities_from_list, geolabel_from_dict, iter_jsonl
from .errors import (
    ClipBoundaryHit,
    CompletionParseError,
    GroupConstructionError,
    GroupTooSmall,
    SchemaError,
    SupportMismatch,
    UnknownPrompt,
    ValidationError,
)
from .rewards import (
    LocalizabilityScorer,
    ParsedCompletion,
    RewardWeights,
    composite_reward,
    parse_completion,
    score_completion,
)

LOG_COLUMNS = ("step", "mean_r_loc", "mean_r_vis", "mean_r_geo", "mean_reward", "objective", "mean_kl")


# --------------------------------------------------------------------------
# scalar pieces of the objective


def group_advantages(rewards, sigma_floor: float = 1e-8) -> np.ndarray:
    """Standardize rewards within one group (population std).

    Groups whose std falls below ``sigma_floor`` carry no ranking signal and
    get all-zero advantages.
    """
    r = check_reward_vector(rewards)
    if r.size < 2:
        raise GroupTooSmall(f"a group needs at least 2 rewards, got {r.size}")
    mu = r.mean()
    sigma = math.sqrt(float(np.mean((r - mu) ** 2)))
    if sigma < sigma_floor:
        return np.zeros_like(r)
    return (r - mu) / sigma


def likelihood_ratio(logp_new, logp_old):
    return np.exp(np.asarray(logp_new, dtype=float) - np.asarray(logp_old, dtype=float))


def clipped_term(rho, advantage, epsilon: float):
    rho = np.asarray(rho, dtype=float)
    advantage = np.asarray(advantage, dtype=float)
    return np.minimum(rho * advantage, np.clip(rho, 1.0 - epsilon, 1.0 + epsilon) * advantage)


def clipped_term_slope(rho, advantage, epsilon: float) -> np.ndarray:
    """d/d(rho) of :func:`clipped_term`; zero wherever the clipped branch binds."""
    rho = np.asarray(rho, dtype=float)
    advantage = np.asarray(advantage, dtype=float)
    clipped = ((advantage > 0) & (rho > 1.0 + epsilon)) | ((advantage < 0) & (rho < 1.0 - epsilon))
    return np.where(clipped, 0.0, advantage)


def categorical_kl(p, q) -> float:
    """KL(p || q) for categorical vectors with the 0 * log 0 = 0 convention."""
    p = check_probability_vector(p, "p")
    q = check_probability_vector(q, "q")
    if p.shape != q.shape:
        raise ValidationError("p and q must have the same length")
    support = p > 0
    if np.any(q[support] == 0):
        raise SupportMismatch("q assigns zero mass where p is positive")
    return float(max(np.sum(p[support] * (np.log(p[support]) - np.log(q[support]))), 0.0))


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def log_softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    m = z.max()
    return z - m - math.log(np.exp(z - m).sum())


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Candidate:
    completion: ParsedCompletion
    r_loc: float
    r_vis: float
    r_geo: float


@dataclass(frozen=True)
class Prompt:
    id: str
    candidates: tuple[Candidate, ...]
    truth: GeoLabel

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if len(self.candidates) < 2:
            raise GroupConstructionError(f"prompt {self.id!r} needs at least 2 candidates")

    def component_matrix(self) -> np.ndarray:
        """``(n_candidates, 3)`` array of (r_loc, r_vis, r_geo)."""
        return np.array([(c.r_loc, c.r_vis, c.r_geo) for c in self.candidates], dtype=float)


@dataclass(frozen=True)
class ToyPolicy:
    """One logit vector per prompt id."""

    logits: Mapping[str, np.ndarray]

    def __post_init__(self):
        frozen = {}
        for key, vec in self.logits.items():
            arr = np.array(vec, dtype=float)
            arr.setflags(write=False)
            frozen[key] = arr
        object.__setattr__(self, "logits", frozen)

    @classmethod
    def uniform(cls, prompts: Iterable[Prompt]) -> "ToyPolicy":
        return cls({p.id: np.zeros(len(p.candidates)) for p in prompts})

    def _vec(self, prompt_id: str) -> np.ndarray:
        try:
            return self.logits[prompt_id]
        except KeyError:
            raise UnknownPrompt(prompt_id) from None

    def probs(self, prompt_id: str) -> np.ndarray:
        return softmax(self._vec(prompt_id))

    def log_probs(self, prompt_id: str) -> np.ndarray:
        return log_softmax(self._vec(prompt_id))

    def with_logits(self, prompt_id: str, logits) -> "ToyPolicy":
        updated = dict(self.logits)
        updated[prompt_id] = np.asarray(logits, dtype=float)
        return ToyPolicy(updated)

    def to_dict(self) -> dict:
        return {
            pid: {"logits": [float(x) for x in vec], "probs": [float(x) for x in softmax(vec)]}
            for pid, vec in self.logits.items()
        }


@dataclass(frozen=True)
class GroupBatch:
    prompt_id: str
    sampled_indices: np.ndarray
    rewards: np.ndarray
    logp_new: np.ndarray
    logp_old: np.ndarray
    logp_ref: np.ndarray
    components: Optional[np.ndarray] = None  # (k, 3) r_loc/r_vis/r_geo, for logging

    def __post_init__(self):
        k = len(self.sampled_indices)
        if k < 2:
            raise GroupTooSmall(f"group size must be >= 2, got {k}")
        for name in ("rewards", "logp_new", "logp_old", "logp_ref"):
            if len(getattr(self, name)) != k:
                raise ValidationError(f"{name} has length {len(getattr(self, name))}, expected {k}")

    @property
    def k(self) -> int:
        return len(self.sampled_indices)


@dataclass(frozen=True)
class GrpoConfig:
    """Optimizer settings for the toy policy.

    The defaults are desk-scale values. For a 7B vision-language policy the
    reference fine-tuning setup used learning rate 1e-6 (see
    :data:`georeason.config.LVLM_REFERENCE_HPARAMS`).
    """

    k: int = 8
    epsilon_clip: float = 0.2
    beta_kl: float = 0.04
    learning_rate: float = 0.5
    steps: int = 200
    seed: int = 0
    sigma_floor: float = 1e-8
    weights: RewardWeights = field(default_factory=RewardWeights)
    ref_mode: str = "initial"

    def __post_init__(self):
        check_int(self.k, "k", minimum=2)
        check_positive(self.epsilon_clip, "epsilon_clip")
        check_positive(self.beta_kl, "beta_kl", allow_zero=True)
        # lr = 0 is accepted: it is the documented "no movement" case
        check_positive(self.learning_rate, "learning_rate", allow_zero=True)
        check_int(self.steps, "steps", minimum=0)
        check_int(self.seed, "seed")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")
        check_positive(self.sigma_floor, "sigma_floor")
        if self.ref_mode not in ("initial", "previous"):
            raise ValidationError(f"ref_mode must be 'initial' or 'previous', got {self.ref_mode!r}")


@dataclass
class TrainingLog:
    records: list[dict] = field(default_factory=list)

    def append(self, **record) -> None:
        if self.records and record["step"] <= self.records[-1]["step"]:
            raise ValidationError("training log steps must be strictly increasing")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for rec in self.records:
            writer.writerow([rec["step"]] + [repr(float(rec[c])) for c in LOG_COLUMNS[1:]])
        return buf.getvalue()

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


# --------------------------------------------------------------------------
# sampling, objective, gradient


def make_rng(seed: int) -> np.random.Generator:
    """The single randomness source of a run: PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_indices(probs: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling with replacement: ``k`` uniforms mapped through the CDF."""
    cdf = np.cumsum(probs)
    u = rng.random(k)
    idx = np.searchsorted(cdf, u * cdf[-1], side="right")
    return np.minimum(idx, len(probs) - 1)


def sample_group(
    policy: ToyPolicy,
    prompt: Prompt,
    k: int,
    rng: np.random.Generator,
    *,
    weights: RewardWeights | None = None,
    old_policy: ToyPolicy | None = None,
    ref_policy: ToyPolicy | None = None,
) -> GroupBatch:
    """Draw ``k`` candidates i.i.d. from ``policy`` and record their rewards and log-probs.

    ``old_policy`` and ``ref_policy`` default to ``policy`` itself.
    """
    weights = weights or RewardWeights()
    logp = policy.log_probs(prompt.id)
    if len(logp) != len(prompt.candidates):
        raise GroupConstructionError(
            f"policy has {len(logp)} logits for prompt {prompt.id!r} with {len(prompt.candidates)} candidates"
        )
    idx = sample_indices(np.exp(logp), k, rng)
    comps = prompt.component_matrix()[idx]
    rewards = np.array([composite_reward(*row, weights) for row in comps])
    logp_old = (old_policy or policy).log_probs(prompt.id)
    logp_ref = (ref_policy or policy).log_probs(prompt.id)
    return GroupBatch(
        prompt_id=prompt.id,
        sampled_indices=idx,
        rewards=rewards,
        logp_new=logp[idx],
        logp_old=logp_old[idx],
        logp_ref=logp_ref[idx],
        components=comps,
    )


def _objective_and_grad(batch: GroupBatch, logits: np.ndarray, ref_probs, config: GrpoConfig,
                        need_grad: bool = True):
    ref = check_probability_vector(ref_probs, "ref_probs")
    if ref.shape != logits.shape:
        raise ValidationError("ref_probs length does not match the policy's candidate count")
    idx = np.asarray(batch.sampled_indices)
    if idx.min() < 0 or idx.max() >= len(logits):
        raise ValidationError("sampled index out of range for this prompt")

    adv = group_advantages(batch.rewards, config.sigma_floor)
    logp = log_softmax(logits)
    p = np.exp(logp)
    rho = likelihood_ratio(logp[idx], batch.logp_old)
    surrogate = float(np.mean(clipped_term(rho, adv, config.epsilon_clip)))
    kl = categorical_kl(p, ref)
    value = surrogate - config.beta_kl * kl
    if not need_grad:
        return value, None, rho, kl

    # d log p_a / d z = onehot(a) - p
    coeff = clipped_term_slope(rho, adv, config.epsilon_clip) * rho / batch.k
    grad = np.zeros_like(logits)
    np.add.at(grad, idx, coeff)
    grad -= coeff.sum() * p
    if config.beta_kl:
        support = p > 0
        log_ratio = np.zeros_like(p)
        log_ratio[support] = logp[support] - np.log(ref[support])
        grad -= config.beta_kl * p * (log_ratio - kl)
    return value, grad, rho, kl


def grpo_objective(batch: GroupBatch, policy: ToyPolicy, ref_probs, config: GrpoConfig) -> float:
    """Clipped group-relative surrogate minus ``beta * KL(policy || ref)`` for one group."""
    logits = policy._vec(batch.prompt_id)
    value, _, _, _ = _objective_and_grad(batch, logits, ref_probs, config, need_grad=False)
    return value


def grpo_gradient(batch: GroupBatch, policy: ToyPolicy, ref_probs, config: GrpoConfig) -> np.ndarray:
    """Analytic gradient of :func:`grpo_objective` w.r.t. the prompt's logits."""
    logits = policy._vec(batch.prompt_id)
    return _objective_and_grad(batch, logits, ref_probs, config)[1]


@dataclass(frozen=True)
class StepMetrics:
    objective: float
    mean_r_loc: float
    mean_r_vis: float
    mean_r_geo: float
    mean_reward: float
    mean_kl: float


def policy_step(
    policy: ToyPolicy,
    batches: Sequence[GroupBatch],
    ref: ToyPolicy,
    config: GrpoConfig,
) -> tuple[ToyPolicy, StepMetrics]:
    """One gradient-ascent step on the mean objective over ``batches``.

    ``policy`` is the pre-step (old) snapshot; the returned policy is new.
    Objective and KL in the metrics are measured at the pre-step point.
    """
    if not batches:
        raise ValidationError("policy_step needs at least one batch")
    n = len(batches)
    updated = dict(policy.logits)
    objectives, kls = [], []
    for batch in batches:
        logits = policy._vec(batch.prompt_id)
        value, grad, _, kl = _objective_and_grad(batch, logits, ref.probs(batch.prompt_id), config)
        objectives.append(value)
        kls.append(kl)
        updated[batch.prompt_id] = updated[batch.prompt_id] + config.learning_rate * grad / n

    comps = [b.components for b in batches if b.components is not None]
    if comps:
        means = np.concatenate(comps).mean(axis=0)
    else:
        means = np.full(3, np.nan)
    metrics = StepMetrics(
        objective=float(np.mean(objectives)),
        mean_r_loc=float(means[0]),
        mean_r_vis=float(means[1]),
        mean_r_geo=float(means[2]),
        mean_reward=float(np.mean(np.concatenate([b.rewards for b in batches]))),
        mean_kl=float(np.mean(kls)),
    )
    return ToyPolicy(updated), metrics


def train(
    prompts: Sequence[Prompt],
    config: GrpoConfig,
    init: ToyPolicy | None = None,
) -> tuple[ToyPolicy, TrainingLog]:
    """Run ``config.steps`` rounds of sample-then-update over every prompt.

    With ``ref_mode="initial"`` the reference is frozen at ``init``; with
    ``"previous"`` it is the snapshot taken at the start of each step.

    Reward columns of the log are expectations under the pre-step policy,
    computed exactly over each candidate pool, so the trajectory is free of
    sampling noise. Objective and KL are measured at the same point. The
    sampled group mean is kept in each record as ``sampled_mean_reward``
    (not written to CSV).
    """
    if not prompts:
        raise ValidationError("train needs at least one prompt")
    ids = [p.id for p in prompts]
    if len(set(ids)) != len(ids):
        raise GroupConstructionError("prompt ids must be unique")
    policy = init if init is not None else ToyPolicy.uniform(prompts)
    for p in prompts:
        if len(policy._vec(p.id)) != len(p.candidates):
            raise GroupConstructionError(f"initial policy does not match candidates of {p.id!r}")
    reference = policy
    rng = make_rng(config.seed)
    log = TrainingLog()
    for step in range(config.steps):
        old = policy
        if config.ref_mode == "previous":
            reference = old
        batches = [
            sample_group(policy, p, config.k, rng, weights=config.weights, old_policy=old,
                         ref_policy=reference)
            for p in prompts
        ]
        expected = expected_rewards(policy, prompts, config.weights)
        policy, m = policy_step(policy, batches, reference, config)
        log.append(step=step, mean_r_loc=expected[0], mean_r_vis=expected[1],
                   mean_r_geo=expected[2], mean_reward=expected[3],
                   objective=m.objective, mean_kl=m.mean_kl,
                   sampled_mean_reward=m.mean_reward)
    return policy, log


def expected_rewards(policy: ToyPolicy, prompts: Sequence[Prompt],
                     weights: RewardWeights) -> tuple[float, float, float, float]:
    """Policy-expected (r_loc, r_vis, r_geo, composite), averaged over prompts."""
    comps = np.mean([policy.probs(p.id) @ p.component_matrix() for p in prompts], axis=0)
    return (float(comps[0]), float(comps[1]), float(comps[2]),
            composite_reward(float(comps[0]), float(comps[1]), float(comps[2]), weights))


def gradient_check(policy: ToyPolicy, batch: GroupBatch, ref_probs, config: GrpoConfig,
                   h: float = 1e-5) -> float:
    """Max relative error between the analytic gradient and central differences.

    Relative error per logit is ``|g - fd| / max(|g|, |fd|, 1e-6)``; the floor
    stops round-off in near-zero components from dominating.
    """
    h = check_positive(h, "h")
    logits = np.array(policy._vec(batch.prompt_id), dtype=float)
    _, grad, rho, _ = _objective_and_grad(batch, logits, ref_probs, config)
    eps = config.epsilon_clip
    # a +-h logit nudge moves rho by at most about rho*h
    margin = h * np.maximum(1.0, rho) * 2.0
    if np.any(np.abs(rho - (1.0 + eps)) <= margin) or np.any(np.abs(rho - (1.0 - eps)) <= margin):
        raise ClipBoundaryHit("a likelihood ratio lies within h of 1 +- epsilon")
    fd = np.empty_like(logits)
    for i in range(len(logits)):
        up = logits.copy()
        up[i] += h
        down = logits.copy()
        down[i] -= h
        f_up = _objective_and_grad(batch, up, ref_probs, config, need_grad=False)[0]
        f_down = _objective_and_grad(batch, down, ref_probs, config, need_grad=False)[0]
        fd[i] = (f_up - f_down) / (2 * h)
    denom = np.maximum(np.maximum(np.abs(grad), np.abs(fd)), 1e-6)
    return float(np.max(np.abs(grad - fd) / denom))


# --------------------------------------------------------------------------
# prompt files


def prompt_from_dict(obj: dict, scorer: LocalizabilityScorer | None = None,
                     weights: RewardWeights | None = None) -> Prompt:
    """Build a :class:`Prompt` from one JSONL record, scoring every candidate.

    ``loc_score`` supplies the localizability reward verbatim; when null the
    heuristic scorer is used. Optional ``segmentation`` (prompt level) and
    ``entities`` (candidate level) feed the grounding reward.
    """
    weights = weights or RewardWeights()
    heuristic = scorer or LocalizabilityScorer.heuristic()
    if not isinstance(obj, dict):
        raise SchemaError("prompt record must be an object")
    pid = obj.get("id")
    if not isinstance(pid, str):
        raise SchemaError("prompt.id must be a string")
    if not isinstance(obj.get("truth"), dict):
        raise SchemaError("prompt.truth must be an object")
    try:
        truth = geolabel_from_dict(obj["truth"], "truth", coordinate_required=False)
    except ValidationError as exc:
        raise SchemaError(str(exc)) from exc
    seg = obj.get("segmentation", [])
    if not isinstance(seg, list) or not all(isinstance(s, str) for s in seg):
        raise SchemaError("prompt.segmentation must be a list of strings")
    visual = VisualElementSet(seg)
    cands = obj.get("candidates")
    if not isinstance(cands, list):
        raise SchemaError("prompt.candidates must be a list")
    out = []
    for j, c in enumerate(cands):
        if not isinstance(c, dict) or not isinstance(c.get("completion"), str):
            raise SchemaError(f"candidates[{j}].completion must be a string")
        loc = c.get("loc_score")
        if loc is not None and (isinstance(loc, bool) or not isinstance(loc, (int, float)) or not 0 <= loc <= 1):
            raise SchemaError(f"candidates[{j}].loc_score must be null or a number in [0, 1]")
        entities = None
        if "entities" in c:
            entities = entities_from_list(c["entities"], f"candidates[{j}].entities")
        try:
            parsed = parse_completion(c["completion"])
        except CompletionParseError as exc:
            raise GroupConstructionError(f"prompt {pid!r} candidate {j}: {exc}") from exc
        key = f"{pid}#{j}"
        cand_scorer = LocalizabilityScorer.fixture({key: loc}) if loc is not None else heuristic
        b = score_completion(key, parsed, truth, visual, cand_scorer, weights, entities)
        out.append(Candidate(parsed, b.r_loc, b.r_vis, b.r_geo))
    return Prompt(pid, tuple(out), truth)


def load_prompts(path: str | os.PathLike, scorer: LocalizabilityScorer | None = None,
                 weights: RewardWeights | None = None) -> list[Prompt]:
    prompts = []
    for lineno, obj in iter_jsonl(path):
        try:
            prompts.append(prompt_from_dict(obj, scorer, weights))
        except SchemaError as exc:
            raise SchemaError(exc.detail, line=lineno, path=str(path)) from exc
        except GroupConstructionError as exc:
            raise GroupConstructionError(f"line {lineno}: {exc}") from exc
    return prompts


# --------------------------------------------------------------------------
# estimator front end


class GrpoPolicy(BaseEstimator):
    """Estimator wrapper: ``fit`` trains a tabular policy over prompts.

    After fitting, ``policy_`` holds the trained :class:`ToyPolicy`,
    ``log_`` the :class:`TrainingLog` and ``reference_`` the initial policy.
    """

    def __init__(self, k=8, epsilon_clip=0.2, beta_kl=0.04, learning_rate=0.5, steps=200,
                 seed=0, sigma_floor=1e-8, lambda_loc=0.2, lambda_vis=0.5, lambda_geo=1.0,
                 alpha=0.5, ref_mode="initial"):
        self.k = k
        self.epsilon_clip = epsilon_clip
        self.beta_kl = beta_kl
        self.learning_rate = learning_rate
        self.steps = steps
        self.seed = seed
        self.sigma_floor = sigma_floor
        self.lambda_loc = lambda_loc
        self.lambda_vis = lambda_vis
        self.lambda_geo = lambda_geo
        self.alpha = alpha
        self.ref_mode = ref_mode

    def _config(self) -> GrpoConfig:
        return GrpoConfig(
            k=self.k, epsilon_clip=self.epsilon_clip, beta_kl=self.beta_kl,
            learning_rate=self.learning_rate, steps=self.steps, seed=self.seed,
            sigma_floor=self.sigma_floor,
            weights=RewardWeights(self.lambda_loc, self.lambda_vis, self.lambda_geo, self.alpha),
            ref_mode=self.ref_mode,
        )

    @classmethod
    def from_config(cls, config: GrpoConfig) -> "GrpoPolicy":
        w = config.weights
        return cls(k=config.k, epsilon_clip=config.epsilon_clip, beta_kl=config.beta_kl,
                   learning_rate=config.learning_rate, steps=config.steps, seed=config.seed,
                   sigma_floor=config.sigma_floor, lambda_loc=w.lambda_loc,
                   lambda_vis=w.lambda_vis, lambda_geo=w.lambda_geo, alpha=w.alpha,
                   ref_mode=config.ref_mode)

    def fit(self, X: Sequence[Prompt], y=None):
        prompts = list(X)
        self.config_ = self._config()
        self.reference_ = ToyPolicy.uniform(prompts)
        self.policy_, self.log_ = train(prompts, self.config_, init=self.reference_)
        self.prompt_ids_ = [p.id for p in prompts]
        return self

    def _ids(self, X) -> list[str]:
        return [x.id if isinstance(x, Prompt) else x for x in X]

    def predict_proba(self, X) -> list[np.ndarray]:
        """Candidate distribution per prompt (ragged, hence a list)."""
        check_is_fitted(self, "policy_")
        return [self.policy_.probs(pid) for pid in self._ids(X)]

    def predict(self, X) -> np.ndarray:
        """Index of the most probable candidate per prompt."""
        return np.array([int(np.argmax(p)) for p in self.predict_proba(X)])

    def score(self, X: Sequence[Prompt], y=None) -> float:
        """Expected composite reward under the fitted policy, averaged over prompts."""
        check_is_fitted(self, "policy_")
        w = self.config_.weights
        values = []
        for prompt in X:
            rewards = np.array([composite_reward(*row, w) for row in prompt.component_matrix()])
            values.append(float(self.policy_.probs(prompt.id) @ rewards))
        return float(np.mean(values))

    def reference_kl(self) -> dict[str, float]:
        check_is_fitted(self, "policy_")
        return {pid: categorical_kl(self.policy_.probs(pid), self.reference_.probs(pid))
                for pid in self.prompt_ids_}


def write_policy_json(policy: ToyPolicy, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(policy.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
