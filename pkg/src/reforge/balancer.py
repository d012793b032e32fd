"""SMOTE-based balancing of advanced-vulnerability subtype counts.

Interpolation happens in generation-parameter space: params are encoded
as [subtype one-hot | normalized knobs], synthetics are interpolated
between minority neighbors, then decoded back to valid GenParams by
rounding and clamping. The decoded params are what the generator renders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .generator import KNOB_RANGES, GenParams
from .rng import Stream
from .taxonomy import Kind, Subtype

SUBTYPE_ORDER = list(Subtype)
# knob order is fixed so vector length is constant across a run
KNOB_ORDER = ["extra_functions", "guard_style", "name_pool", "shuffle"]


class InsufficientSamples(ValueError):
    pass


@dataclass
class FeatureVector:
    values: list[float]
    origin: Optional[GenParams] = None


def featurize(params: GenParams) -> FeatureVector:
    """Encode params as subtype one-hot plus knobs normalized to [0, 1]."""
    onehot = [0.0] * len(SUBTYPE_ORDER)
    if params.subtype is not None:
        onehot[SUBTYPE_ORDER.index(params.subtype)] = 1.0
    ranges = KNOB_RANGES[params.kind]
    knob_block = []
    for name in KNOB_ORDER:
        lo, hi = ranges[name]
        value = params.structural_knobs[name]
        knob_block.append(0.0 if hi == lo else (value - lo) / (hi - lo))
    return FeatureVector(values=onehot + knob_block, origin=params)


def defeaturize(
    vec: FeatureVector,
    kind: Kind = Kind.VULN_ADVANCED,
    seed: Optional[int] = None,
) -> GenParams:
    """Decode a vector back to valid GenParams, rounding and clamping
    knobs. Kind and seed default to the origin params when present."""
    origin = vec.origin
    if origin is not None:
        kind = origin.kind
        if seed is None:
            seed = origin.seed
    if seed is None:
        raise ValueError("seed required when the vector has no origin")
    onehot = vec.values[: len(SUBTYPE_ORDER)]
    subtype = None
    if kind is Kind.VULN_ADVANCED:
        subtype = SUBTYPE_ORDER[max(range(len(onehot)), key=lambda i: onehot[i])]
    ranges = KNOB_RANGES[kind]
    knobs = {}
    for name, x in zip(KNOB_ORDER, vec.values[len(SUBTYPE_ORDER):]):
        lo, hi = ranges[name]
        knobs[name] = min(hi, max(lo, round(lo + x * (hi - lo))))
    for name, (lo, hi) in ranges.items():
        if name not in knobs:
            knobs[name] = lo
    return GenParams(
        seed=seed,
        kind=kind,
        subtype=subtype,
        secure_pattern=origin.secure_pattern if origin else None,
        structural_knobs=knobs,
    )


def _euclidean(a: list[float], b: list[float]) -> float:
    return math.dist(a, b)


def smote(
    minority: list[FeatureVector], k: int, n_new: int, stream: Stream
) -> list[FeatureVector]:
    """Chawla-style oversampling: each synthetic is x + u*(nn - x) for a
    uniform u in [0, 1] and nn among the k nearest neighbors of x."""
    if k < 1:
        raise InsufficientSamples("k must be >= 1")
    if len(minority) <= k:
        raise InsufficientSamples(
            f"need more than k={k} samples, got {len(minority)}"
        )
    # precompute k-NN index lists once; brute force is fine at corpus scale
    neighbors: list[list[int]] = []
    for i, fv in enumerate(minority):
        dists = [
            (_euclidean(fv.values, other.values), j)
            for j, other in enumerate(minority)
            if j != i
        ]
        dists.sort(key=lambda t: (t[0], t[1]))
        neighbors.append([j for _, j in dists[:k]])

    synthetics: list[FeatureVector] = []
    for _ in range(n_new):
        i = stream.randint(0, len(minority) - 1)
        base = minority[i].values
        nn = minority[stream.choice(neighbors[i])].values
        u = stream.uniform()
        synthetics.append(
            FeatureVector(values=[a + u * (b - a) for a, b in zip(base, nn)])
        )
    return synthetics


def rebalance_subtypes(
    counts: dict[Subtype, int], target_total: int
) -> dict[Subtype, int]:
    """Even per-subtype allocation summing to target_total; a remainder r
    gives one extra to the first r subtypes in enum order. Returned counts
    differ pairwise by at most 1."""
    subtypes = [s for s in SUBTYPE_ORDER if s in counts] or SUBTYPE_ORDER
    base, rem = divmod(target_total, len(subtypes))
    return {s: base + (1 if i < rem else 0) for i, s in enumerate(subtypes)}
