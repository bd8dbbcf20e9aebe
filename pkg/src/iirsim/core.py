"""Shared simulator vocabulary: readings, roles, packets, canonical ordering."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

HEADER_BITS = 64
READING_BITS = 64

STAGE_PRIORITY = "priority"
STAGE_OPINION = "opinion"
STAGE_REVIEW = "review"
STAGE_SENTIMENT = "sentiment"
STAGES = (STAGE_PRIORITY, STAGE_OPINION, STAGE_REVIEW, STAGE_SENTIMENT)

LABEL_FORWARD = "forward"
LABEL_DISCARD = "discard"


class NodeRole(str, Enum):
    SENSOR = "sensor"
    AGGREGATOR = "aggregator"
    SUB_SINK = "sub_sink"
    SINK = "sink"


@dataclass(frozen=True)
class StageAnnotation:
    """Scores and verdicts accumulated as a reading moves through the filter."""

    priority_score: float = 0.0
    opinion_deviation: float = 0.0
    consensus_ratio: float = 0.0
    class_label: Optional[str] = None
    drop_stage: Optional[str] = None


@dataclass(frozen=True)
class SensorReading:
    source: int
    round: int
    value: float
    annotations: StageAnnotation = field(default_factory=StageAnnotation)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("reading value must be finite")

    def key(self) -> Tuple[int, int]:
        # (source, round) is unique within an engine run: one sample per
        # sensor per round, duplicates removed before forwarding.
        return (self.source, self.round)


@dataclass(frozen=True)
class Packet:
    src: int
    dst: int
    payload: Tuple[SensorReading, ...]
    bits: int


def packet_bits(n_readings: int, header_bits: int = HEADER_BITS,
                reading_bits: int = READING_BITS) -> int:
    """Size of a packet carrying n_readings samples, in bits."""
    if n_readings < 0:
        raise ValueError("n_readings must be non-negative")
    return header_bits + n_readings * reading_bits


def make_packet(src: int, dst: int, payload: Iterable[SensorReading]) -> Packet:
    payload = tuple(payload)
    if src == dst:
        raise ValueError("packet endpoints must differ")
    return Packet(src=src, dst=dst, payload=payload, bits=packet_bits(len(payload)))


def canonical_order(readings: Sequence[SensorReading]) -> list:
    """Stable sort by (round, source, value); the determinism anchor for
    every operation that iterates over a round's readings."""
    return sorted(readings, key=lambda r: (r.round, r.source, r.value))
