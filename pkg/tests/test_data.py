import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ska.data import (BadMagicError, CountMismatchError, Dataset, TruncatedError, load_idx,
                      synthetic_blobs, train_test_split, write_idx_images, write_idx_labels)


def write_pair(tmp_path, images, labels):
    ip, lp = tmp_path / "img.idx", tmp_path / "lbl.idx"
    write_idx_images(ip, images)
    write_idx_labels(lp, labels)
    return ip, lp


def test_hand_built_fixture(tmp_path):
    ip, lp = tmp_path / "img", tmp_path / "lbl"
    ip.write_bytes(bytes.fromhex("00000803 00000002 00000002 00000002".replace(" ", ""))
                   + bytes([0, 255, 51, 102, 255, 0, 0, 0]))
    lp.write_bytes(bytes.fromhex("00000801 00000002".replace(" ", "")) + bytes([3, 7]))
    ds = load_idx(ip, lp, n_classes=10)
    assert ds.features.shape == (2, 4)
    assert ds.features.tolist() == [[0.0, 1.0, 0.2, 0.4], [1.0, 0.0, 0.0, 0.0]]
    assert ds.features[0, 1] == 1.0
    assert ds.labels.tolist() == [3, 7]


def test_bad_magic(tmp_path):
    ip, lp = write_pair(tmp_path, np.zeros((1, 2, 2)), [0])
    raw = bytearray(ip.read_bytes())
    raw[3] = 0x01
    ip.write_bytes(bytes(raw))
    with pytest.raises(BadMagicError) as info:
        load_idx(ip, lp)
    assert info.value.offset == 0 and "0x00000801" in str(info.value)


def test_truncated_payload(tmp_path):
    ip, lp = write_pair(tmp_path, np.zeros((2, 3, 3)), [0, 1])
    ip.write_bytes(ip.read_bytes()[:-1])
    with pytest.raises(TruncatedError) as info:
        load_idx(ip, lp)
    assert info.value.offset == 16 + 17


def test_truncated_header(tmp_path):
    ip, lp = write_pair(tmp_path, np.zeros((2, 3, 3)), [0, 1])
    lp.write_bytes(lp.read_bytes()[:6])
    with pytest.raises(TruncatedError):
        load_idx(ip, lp)


def test_count_mismatch(tmp_path):
    ip, lp = write_pair(tmp_path, np.zeros((3, 2, 2)), [0, 1])
    with pytest.raises(CountMismatchError):
        load_idx(ip, lp)


@given(arrays(np.uint8, st.tuples(st.integers(1, 5), st.integers(1, 4), st.integers(1, 4))))
def test_idx_round_trip(tmp_path_factory, images):
    tmp = tmp_path_factory.mktemp("idx")
    labels = np.arange(images.shape[0]) % 3
    ip, lp = write_pair(tmp, images, labels)
    ds = load_idx(ip, lp)
    assert np.array_equal(ds.features, images.reshape(images.shape[0], -1) / 255.0)
    assert ds.labels.tolist() == labels.tolist()
    assert ds.features.min() >= 0 and ds.features.max() <= 1


def test_header_layout(tmp_path):
    ip, _ = write_pair(tmp_path, np.zeros((4, 5, 6)), [0, 0, 0, 0])
    assert struct.unpack(">4I", ip.read_bytes()[:16]) == (0x803, 4, 5, 6)


def test_synthetic_deterministic():
    a, b = synthetic_blobs(4, 5, 7, seed=3), synthetic_blobs(4, 5, 7, seed=3)
    assert np.array_equal(a.features, b.features) and np.array_equal(a.labels, b.labels)


def test_synthetic_counts():
    ds = synthetic_blobs(10, 10, 16, seed=0)
    assert len(ds) == 100
    assert np.bincount(ds.labels).tolist() == [10] * 10
    assert ds.features.min() >= 0 and ds.features.max() <= 1


def test_synthetic_small_spread_collapses_classes():
    ds = synthetic_blobs(3, 4, 5, spread=1e-14, seed=2, normalize=False)
    for c in range(3):
        rows = ds.features[ds.labels == c]
        assert np.max(np.abs(rows - rows[0])) <= 1e-9


@pytest.mark.parametrize("kw", [dict(n_classes=0), dict(per_class=0), dict(dims=0), dict(spread=0.0)])
def test_synthetic_rejects_bad_args(kw):
    with pytest.raises(ValueError):
        synthetic_blobs(**kw)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 3)), np.array([0, 5]), 3)
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 3)), np.array([0]), 3)


def test_split():
    ds = synthetic_blobs(2, 10, 3, seed=0)
    tr, te = train_test_split(ds, 0.25, seed=1)
    assert len(tr) == 15 and len(te) == 5
    assert sorted(tr.features.tolist() + te.features.tolist()) == sorted(ds.features.tolist())
