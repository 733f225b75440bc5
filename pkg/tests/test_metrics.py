import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ska.metrics import (StepMetrics, TrainingHistory, class_mean_probabilities,
                         cosine_alignment, entropy_vs_norm_series, is_missing)
from ska.tensor import ShapeError


def test_cosine_parallel(rng):
    z = rng.normal(size=(3, 4))
    assert cosine_alignment(z, 2.5 * z) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal():
    assert cosine_alignment(np.array([[1.0, 0.0]]), np.array([[0.0, 3.0]])) == 0.0


def test_cosine_degenerate():
    assert cosine_alignment(np.ones((2, 2)), np.zeros((2, 2))) == 0.0


def test_cosine_matches_loop(rng):
    z, dd = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    a, b = z.ravel().tolist(), dd.ravel().tolist()
    dot = sum(x * y for x, y in zip(a, b))
    expected = dot / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b)))
    assert cosine_alignment(z, dd) == pytest.approx(expected, rel=1e-12)


def test_cosine_shape_mismatch():
    with pytest.raises(ShapeError):
        cosine_alignment(np.zeros((2, 2)), np.zeros((2, 3)))


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.integers(0, 1000))
def test_cosine_scale_invariant(a, b, seed):
    r = np.random.default_rng(seed)
    z, dd = r.normal(size=(3, 3)), r.normal(size=(3, 3))
    assert cosine_alignment(a * z, b * dd) == pytest.approx(cosine_alignment(z, dd), abs=1e-12)


def test_cosine_identity_with_dot(rng):
    z, dd = rng.normal(size=(3, 4)), rng.normal(size=(3, 4))
    c = cosine_alignment(z, dd)
    assert np.sum(z * dd) == pytest.approx(np.linalg.norm(z) * np.linalg.norm(dd) * c, rel=1e-12)


def test_class_means_uniform():
    out = np.full((6, 3), 0.5)
    assert class_mean_probabilities(out, [0, 1, 2, 0, 1, 2], 3) == [0.5, 0.5, 0.5]


def test_class_means_identity_rows():
    out = np.array([[0.9, 0.2], [0.3, 0.8]])
    assert class_mean_probabilities(out, [0, 1], 2) == [0.9, 0.8]


def test_class_means_match_grouping(rng):
    out = rng.uniform(0.01, 0.99, size=(40, 4))
    labels = rng.integers(0, 4, size=40)
    groups = {c: [] for c in range(4)}
    for row, lab in zip(out, labels):
        groups[int(lab)].append(row[lab])
    expected = [sum(v) / len(v) for v in groups.values()]
    got = class_mean_probabilities(out, labels, 4)
    assert got == pytest.approx(expected, rel=1e-12)
    assert all(0 < p < 1 for p in got)


def test_class_means_empty_class_is_missing():
    got = class_mean_probabilities(np.full((2, 3), 0.4), [0, 0], 3)
    assert got[0] == 0.4 and is_missing(got[1]) and is_missing(got[2])


def test_class_means_bad_labels():
    with pytest.raises(ValueError):
        class_mean_probabilities(np.full((2, 2), 0.5), [0, 2], 2)
    with pytest.raises(ShapeError):
        class_mean_probabilities(np.full((2, 2), 0.5), [0], 2)


def _history(n):
    h = TrainingHistory()
    cum = [0.0, 0.0]
    for k in range(1, n + 1):
        delta = [-0.1 * k, -0.2 * k]
        cum = [c + d for c, d in zip(cum, delta)]
        h.append(StepMetrics(k, delta, list(cum), [0.1, 0.2], [float(k), 2.0 * k]))
    return h


def test_network_entropy_is_layer_sum():
    for m in _history(5):
        assert m.network_entropy == m.entropy_cum[0] + m.entropy_cum[1]


def test_entropy_vs_norm_series():
    assert entropy_vs_norm_series(_history(1), 0) == [(1.0, -0.1)]
    h = _history(4)
    pairs = entropy_vs_norm_series(h, 1)
    assert len(pairs) == 4
    assert pairs == [(m.frob_norm[1], m.entropy_cum[1]) for m in h]
    with pytest.raises(IndexError):
        entropy_vs_norm_series(h, 2)
    with pytest.raises(ValueError):
        entropy_vs_norm_series(TrainingHistory(), 0)


def test_history_order_enforced():
    h = _history(2)
    with pytest.raises(ValueError):
        h.append(StepMetrics(2, [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]))


def test_history_dict_round_trip():
    h = _history(3)
    back = TrainingHistory.from_dict(h.to_dict())
    assert back.to_dict() == h.to_dict()
    assert [r.cumulative_h for r in back.entropy_records() if r.layer == 1] == h.series("entropy_cum", 1)
