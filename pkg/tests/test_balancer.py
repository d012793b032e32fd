"""SMOTE, feature encoding, and subtype rebalancing properties."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reforge.balancer import (
    FeatureVector,
    InsufficientSamples,
    defeaturize,
    featurize,
    rebalance_subtypes,
    smote,
)
from reforge.generator import KNOB_RANGES, draw_params
from reforge.rng import Stream, derive_stream
from reforge.taxonomy import Kind, Subtype


# ---------------------------------------------------------------------------
# featurize / defeaturize


def test_knob_at_range_min_encodes_zero():
    stream = derive_stream(1, 1)
    params = draw_params(Kind.VULN_ADVANCED, 5, stream, subtype=Subtype.READ_ONLY)
    for name, (lo, _) in KNOB_RANGES[Kind.VULN_ADVANCED].items():
        params.structural_knobs[name] = lo
    vec = featurize(params)
    assert all(x == 0.0 for x in vec.values[4:])


def test_knob_at_range_max_encodes_one():
    stream = derive_stream(1, 2)
    params = draw_params(Kind.VULN_ADVANCED, 5, stream, subtype=Subtype.CROSS_CONTRACT)
    for name, (_, hi) in KNOB_RANGES[Kind.VULN_ADVANCED].items():
        params.structural_knobs[name] = hi
    vec = featurize(params)
    assert all(x == 1.0 for x in vec.values[4:])


def test_subtype_one_hot_block():
    stream = derive_stream(1, 3)
    params = draw_params(Kind.VULN_ADVANCED, 5, stream, subtype=Subtype.CROSS_FUNCTION)
    vec = featurize(params)
    assert vec.values[:4] == [0.0, 1.0, 0.0, 0.0]


@given(st.integers(min_value=0, max_value=2**32))
@settings(max_examples=100, deadline=None)
def test_round_trip_random_params(seed):
    stream = Stream(seed)
    subtype = stream.choice(list(Subtype))
    params = draw_params(Kind.VULN_ADVANCED, stream.next_u64(), stream, subtype=subtype)
    assert defeaturize(featurize(params)) == params


# ---------------------------------------------------------------------------
# smote


def _vec(*values):
    return FeatureVector(values=list(values))


def test_smote_identical_points():
    minority = [_vec(2.0, 3.0) for _ in range(6)]
    out = smote(minority, k=2, n_new=10, stream=Stream(5))
    assert len(out) == 10
    for v in out:
        assert v.values == [2.0, 3.0]


def test_smote_interpolation_endpoint():
    class ZeroLambda(Stream):
        def uniform(self):
            return 0.0

    minority = [_vec(0.0, 0.0), _vec(1.0, 0.0), _vec(0.0, 1.0), _vec(1.0, 1.0)]
    out = smote(minority, k=1, n_new=8, stream=ZeroLambda(3))
    bases = [tuple(v.values) for v in minority]
    for v in out:
        assert tuple(v.values) in bases  # u = 0 collapses onto the base point


def test_smote_insufficient_samples():
    with pytest.raises(InsufficientSamples):
        smote([_vec(0.0), _vec(1.0)], k=2, n_new=1, stream=Stream(1))
    with pytest.raises(InsufficientSamples):
        smote([_vec(0.0)] * 10, k=0, n_new=1, stream=Stream(1))


def _brute_force_knn(points, i, k):
    """Independent oracle: explicit all-pairs squared distances."""
    dists = []
    for j, q in enumerate(points):
        if j == i:
            continue
        d2 = sum((a - b) ** 2 for a, b in zip(points[i], q))
        dists.append((d2, j))
    dists.sort()
    return {j for _, j in dists[:k]}


def test_smote_synthetics_lie_on_neighbor_segments():
    stream = Stream(42)
    points = [(stream.uniform() * 10, stream.uniform() * 10) for _ in range(20)]
    minority = [_vec(*p) for p in points]
    out = smote(minority, k=2, n_new=60, stream=Stream(77))
    tol = 1e-9
    for synth in out:
        x, y = synth.values
        on_some_segment = False
        for i, p in enumerate(points):
            for j in _brute_force_knn(points, i, 2):
                q = points[j]
                dx, dy = q[0] - p[0], q[1] - p[1]
                if abs(dx) < tol and abs(dy) < tol:
                    if abs(x - p[0]) < tol and abs(y - p[1]) < tol:
                        on_some_segment = True
                    continue
                # solve for the interpolation parameter on each axis
                if abs(dx) >= abs(dy):
                    u = (x - p[0]) / dx
                else:
                    u = (y - p[1]) / dy
                if -tol <= u <= 1 + tol:
                    ex = p[0] + u * dx
                    ey = p[1] + u * dy
                    if abs(ex - x) < tol and abs(ey - y) < tol:
                        on_some_segment = True
                        break
            if on_some_segment:
                break
        assert on_some_segment, synth.values


def test_smote_deterministic_under_stream():
    minority = [_vec(float(i), float(i % 3)) for i in range(10)]
    a = smote(minority, k=3, n_new=5, stream=Stream(9))
    b = smote(minority, k=3, n_new=5, stream=Stream(9))
    assert [v.values for v in a] == [v.values for v in b]


# ---------------------------------------------------------------------------
# rebalance_subtypes


def test_rebalance_exact_division():
    counts = {
        Subtype.SINGLE_FUNCTION: 100,
        Subtype.CROSS_FUNCTION: 300,
        Subtype.CROSS_CONTRACT: 250,
        Subtype.READ_ONLY: 250,
    }
    allocation = rebalance_subtypes(counts, 900)
    assert all(v == 225 for v in allocation.values())


def test_rebalance_remainder_goes_to_lowest_enum_order():
    allocation = rebalance_subtypes({s: 0 for s in Subtype}, 902)
    assert allocation[Subtype.SINGLE_FUNCTION] == 226
    assert allocation[Subtype.CROSS_FUNCTION] == 226
    assert allocation[Subtype.CROSS_CONTRACT] == 225
    assert allocation[Subtype.READ_ONLY] == 225


@given(st.integers(min_value=0, max_value=2**31), st.integers(min_value=1, max_value=5000))
@settings(max_examples=50, deadline=None)
def test_rebalance_even_within_one(seed, target):
    stream = Stream(seed)
    counts = {s: stream.randint(0, 500) for s in Subtype}
    allocation = rebalance_subtypes(counts, target)
    values = list(allocation.values())
    assert sum(values) == target
    assert max(values) - min(values) <= 1
