"""The four-stage staircase filter applied at the sub-sink.

Stage order is fixed: priority (out-of-band severity) -> opinion
(plausibility + informativeness vs per-source history) -> review (neighbor
consensus) -> sentiment (symbolic rescue rule + linear classifier). Each
stage only ever shrinks its input; a dropped reading is annotated with the
stage that dropped it and never reappears.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Deque, Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (LABEL_DISCARD, LABEL_FORWARD, STAGE_OPINION, STAGE_PRIORITY,
                   STAGE_REVIEW, STAGE_SENTIMENT, SensorReading)
from .errors import EmptyTrainingSet, UntrainedModel
from .topology import Topology, neighbors_in_round

N_FEATURES = 5
PERCEPTRON_EPOCHS = 100


@dataclass(frozen=True)
class PipelineConfig:
    band_lo: float = 20.0
    band_hi: float = 30.0
    theta_p: float = 0.1
    window_w: int = 4
    delta_o: float = 0.5
    range_lo: float = -20.0
    range_hi: float = 70.0
    tau_r: float = 2.0
    quorum_q: float = 0.3
    rescue_score: float = 1.0

    @property
    def band_width(self) -> float:
        return self.band_hi - self.band_lo


@dataclass(frozen=True)
class ClassifierModel:
    weights: Tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} weights")

    def decide(self, x: Sequence[float]) -> bool:
        # Strict inequality: the all-zero model discards everything.
        return sum(w * xi for w, xi in zip(self.weights, x)) > 0


@dataclass
class StageTrace:
    counts: List[Tuple[str, int, int]] = field(default_factory=list)
    drops: List[Tuple[int, int, str]] = field(default_factory=list)
    sentiment_input: Tuple[SensorReading, ...] = ()

    def output_count(self, stage: str) -> int:
        for name, _, n_out in self.counts:
            if name == stage:
                return n_out
        return 0


HistoryIndex = Dict[int, Deque[float]]


def features(r: SensorReading, cfg: PipelineConfig) -> Tuple[float, ...]:
    a = r.annotations
    w = cfg.band_width
    return (a.priority_score, a.opinion_deviation / w, a.consensus_ratio,
            (r.value - cfg.band_lo) / w, 1.0)


def _drop(r: SensorReading, stage: str) -> SensorReading:
    return replace(r, annotations=replace(r.annotations, drop_stage=stage))


def priority_analysis(readings: Sequence[SensorReading], cfg: PipelineConfig):
    kept, dropped = [], []
    w = cfg.band_width
    for r in readings:
        score = max(0.0, (r.value - cfg.band_hi) / w, (cfg.band_lo - r.value) / w)
        r = replace(r, annotations=replace(r.annotations, priority_score=score))
        if score >= cfg.theta_p:
            kept.append(r)
        else:
            dropped.append(_drop(r, STAGE_PRIORITY))
    return kept, dropped


def opinion_analysis(readings: Sequence[SensorReading],
                     history_index: Mapping[int, Sequence[float]],
                     cfg: PipelineConfig):
    kept, dropped = [], []
    for r in readings:
        if not cfg.range_lo <= r.value <= cfg.range_hi:
            # fails the fact check: physically implausible
            dropped.append(_drop(r, STAGE_OPINION))
            continue
        hist = history_index.get(r.source)
        if hist:
            predicted = sum(hist) / len(hist)
            deviation = abs(r.value - predicted)
            ok = deviation >= cfg.delta_o
        else:
            deviation = cfg.band_width  # cold start always passes
            ok = True
        r = replace(r, annotations=replace(r.annotations, opinion_deviation=deviation))
        (kept if ok else dropped).append(r if ok else _drop(r, STAGE_OPINION))
    return kept, dropped


def review_analysis(readings: Sequence[SensorReading],
                    round_context: Sequence[SensorReading],
                    topology: Topology, cfg: PipelineConfig):
    by_source: Dict[int, List[float]] = {}
    for c in round_context:
        by_source.setdefault(c.source, []).append(c.value)
    kept, dropped = [], []
    for r in readings:
        peers = [v for s in neighbors_in_round(topology, r.source)
                 for v in by_source.get(s, ())]
        if peers:
            ratio = sum(1 for v in peers if abs(v - r.value) <= cfg.tau_r) / len(peers)
        else:
            ratio = 1.0  # sparse region: nobody to contradict the reading
        r = replace(r, annotations=replace(r.annotations, consensus_ratio=ratio))
        if ratio >= cfg.quorum_q:
            kept.append(r)
        else:
            dropped.append(_drop(r, STAGE_REVIEW))
    return kept, dropped


def train_classifier(examples: Sequence[Tuple[Sequence[float], str]],
                     epochs: int = PERCEPTRON_EPOCHS) -> ClassifierModel:
    """Classic perceptron: zero init, unit rate, fixed example order,
    stop at the epoch cap or the first update-free epoch."""
    if not examples:
        raise EmptyTrainingSet("no training examples")
    for x, label in examples:
        if len(x) != N_FEATURES:
            raise ValueError(f"feature vector must have {N_FEATURES} entries")
        if label not in (LABEL_FORWARD, LABEL_DISCARD):
            raise ValueError(f"unknown label {label!r}")
    w = [0.0] * N_FEATURES
    for _ in range(epochs):
        updated = False
        for x, label in examples:
            y = 1.0 if label == LABEL_FORWARD else -1.0
            pred = 1.0 if sum(wi * xi for wi, xi in zip(w, x)) > 0 else -1.0
            if pred != y:
                for i in range(N_FEATURES):
                    w[i] += y * x[i]
                updated = True
        if not updated:
            break
    return ClassifierModel(weights=tuple(w))


def training_accuracy(model: ClassifierModel,
                      examples: Sequence[Tuple[Sequence[float], str]]) -> float:
    if not examples:
        raise EmptyTrainingSet("no training examples")
    hits = sum(1 for x, label in examples
               if (LABEL_FORWARD if model.decide(x) else LABEL_DISCARD) == label)
    return hits / len(examples)


def sentiment_classify(readings: Sequence[SensorReading],
                       model: Optional[ClassifierModel], cfg: PipelineConfig,
                       allow_rule_only: bool = True):
    if model is None and not allow_rule_only:
        raise UntrainedModel("no classifier model and rule-only mode disabled")
    kept, dropped = [], []
    for r in readings:
        if r.annotations.priority_score >= cfg.rescue_score:
            forward = True  # symbolic rescue overrides the learner
        elif model is not None:
            forward = model.decide(features(r, cfg))
        else:
            forward = False
        label = LABEL_FORWARD if forward else LABEL_DISCARD
        r = replace(r, annotations=replace(r.annotations, class_label=label))
        if forward:
            kept.append(r)
        else:
            dropped.append(_drop(r, STAGE_SENTIMENT))
    return kept, dropped


def run_pipeline(snapshot, round_context: Sequence[SensorReading],
                 topology: Topology, history_index: HistoryIndex,
                 cfg: PipelineConfig, model: Optional[ClassifierModel] = None,
                 allow_rule_only: bool = True):
    """Apply the four stages in order; returns (survivors, trace).

    Updates history_index with the values of forwarded readings only.
    """
    trace = StageTrace()
    current = list(snapshot.readings)

    kept, dropped = priority_analysis(current, cfg)
    trace.counts.append((STAGE_PRIORITY, len(current), len(kept)))
    trace.drops.extend((r.source, r.round, STAGE_PRIORITY) for r in dropped)
    current = kept

    kept, dropped = opinion_analysis(current, history_index, cfg)
    trace.counts.append((STAGE_OPINION, len(current), len(kept)))
    trace.drops.extend((r.source, r.round, STAGE_OPINION) for r in dropped)
    current = kept

    kept, dropped = review_analysis(current, round_context, topology, cfg)
    trace.counts.append((STAGE_REVIEW, len(current), len(kept)))
    trace.drops.extend((r.source, r.round, STAGE_REVIEW) for r in dropped)
    current = kept
    trace.sentiment_input = tuple(current)

    kept, dropped = sentiment_classify(current, model, cfg, allow_rule_only)
    trace.counts.append((STAGE_SENTIMENT, len(current), len(kept)))
    trace.drops.extend((r.source, r.round, STAGE_SENTIMENT) for r in dropped)

    for r in kept:
        dq = history_index.get(r.source)
        if dq is None:
            dq = deque(maxlen=cfg.window_w)
            history_index[r.source] = dq
        dq.append(r.value)
    return kept, trace


def save_model(model: ClassifierModel, path: str) -> None:
    with open(path, "w") as f:
        for w in model.weights:
            f.write(f"{w!r}\n")


def load_model(path: str) -> ClassifierModel:
    with open(path) as f:
        weights = tuple(float(line) for line in f if line.strip())
    return ClassifierModel(weights=weights)
