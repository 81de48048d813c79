import math

import numpy as np
import pytest

from truncarch.refsets import (
    InputSequence,
    build_sequence,
    das_dennis,
    das_dennis_count,
    divisions_for,
    igd_reference_set,
    invert_simplex,
    read_reference_set,
    read_sequence,
    sample_front,
    write_reference_set,
    write_sequence,
)


# -- das_dennis -----------------------------------------------------------------

def test_das_dennis_unit_vectors():
    got = das_dennis(3, 1)
    assert got.shape == (3, 3)
    assert got.tolist() == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]


def test_das_dennis_counts():
    assert len(das_dennis(3, 13)) == 105 == das_dennis_count(3, 13)
    assert das_dennis_count(3, 99) == 5050
    assert len(das_dennis(2, 4)) == 5


def test_das_dennis_rows_sum_to_one_and_lexicographic():
    pts = das_dennis(3, 7)
    assert np.allclose(pts.sum(axis=1), 1.0)
    as_tuples = [tuple(r) for r in pts]
    assert as_tuples == sorted(as_tuples)
    assert len(set(as_tuples)) == len(as_tuples)


def test_divisions_for():
    assert divisions_for(3, 105) == 13
    assert divisions_for(3, 21) == 5
    assert divisions_for(3, 5050) == 99
    with pytest.raises(ValueError):
        divisions_for(3, 106)


def test_invert_simplex():
    pts = das_dennis(3, 13)
    inv = invert_simplex(pts)
    assert np.allclose(inv.sum(axis=1), 2.0)
    assert np.allclose(invert_simplex(inv), pts)


def test_igd_reference_set():
    simplex = igd_reference_set("simplex")
    inverted = igd_reference_set("inverted")
    assert simplex.shape == (5050, 3)
    assert np.allclose(simplex.sum(axis=1), 1.0)
    assert np.allclose(inverted.sum(axis=1), 2.0)
    with pytest.raises(ValueError):
        igd_reference_set("circle")


# -- sample_front ----------------------------------------------------------------

def test_sample_front_constraints():
    pts = sample_front("simplex", 500, seed=3)
    assert pts.shape == (500, 3)
    assert np.allclose(pts.sum(axis=1), 1.0, atol=1e-9)
    assert (pts >= 0).all() and (pts <= 1).all()
    inv = sample_front("inverted", 500, seed=3)
    assert np.allclose(inv.sum(axis=1), 2.0, atol=1e-9)


def test_sample_front_deterministic_and_seed_sensitive():
    a = sample_front("simplex", 100, seed=9)
    b = sample_front("simplex", 100, seed=9)
    c = sample_front("simplex", 100, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_front_uniformity_moments():
    # Dirichlet(1,1,1): each coordinate has mean 1/3 and var 1/18.
    n = 100_000
    pts = sample_front("simplex", n, seed=123)
    se = math.sqrt(1.0 / 18.0 / n)
    assert np.abs(pts.mean(axis=0) - 1.0 / 3.0).max() < 4 * se
    # median of a single coordinate is 1 - sqrt(1/2)
    frac = (pts[:, 0] <= 1.0 - math.sqrt(0.5)).mean()
    assert abs(frac - 0.5) < 4 * math.sqrt(0.25 / n)


def test_sample_front_rejects_bad_args():
    with pytest.raises(ValueError):
        sample_front("triangle", 10, seed=0)
    with pytest.raises(ValueError):
        sample_front("simplex", 0, seed=0)


# -- build_sequence ----------------------------------------------------------------

def test_build_sequence_batch_plans():
    seq = build_sequence("simplex", 6, base_seed=1, shuffle_seed=1, batch_size=2)
    assert [len(b) for b in seq.batches] == [2, 2, 2]
    seq = build_sequence("simplex", 7, base_seed=1, shuffle_seed=1, batch_size=3)
    assert [len(b) for b in seq.batches] == [3, 3, 1]
    seq = build_sequence("simplex", 7, base_seed=1, shuffle_seed=1, batch_size=None)
    assert [len(b) for b in seq.batches] == [7]


def test_build_sequence_full_scale_batching():
    seq = build_sequence("simplex", 5000, base_seed=1, shuffle_seed=4, batch_size=105)
    sizes = [len(b) for b in seq.batches]
    assert len(sizes) == 48
    assert sizes[:47] == [105] * 47 and sizes[47] == 65
    assert seq.n_solutions == 5000


def test_shuffles_share_the_base_set():
    base = sample_front("simplex", 40, seed=5)
    seqs = [
        build_sequence("simplex", 40, base_seed=5, shuffle_seed=5 + k, batch_size=None)
        for k in range(3)
    ]
    for seq in seqs:
        sols = seq.all_solutions()
        assert sorted(s.id for s in sols) == list(range(40))
        for s in sols:  # id == position in the unshuffled base sample
            assert s.objectives == tuple(base[s.id])
    orders = [tuple(s.id for s in seq.all_solutions()) for seq in seqs]
    assert len(set(orders)) == 3  # different shuffles reorder arrivals


def test_shuffle_determinism():
    a = build_sequence("inverted", 50, base_seed=2, shuffle_seed=7, batch_size=10)
    b = build_sequence("inverted", 50, base_seed=2, shuffle_seed=7, batch_size=10)
    assert a == b


# -- file round-trips ---------------------------------------------------------------

def test_sequence_roundtrip_exact(tmp_path):
    seq = build_sequence("simplex", 37, base_seed=11, shuffle_seed=13, batch_size=10)
    p = tmp_path / "seq.csv"
    write_sequence(seq, p)
    back = read_sequence(p)
    assert back.front_kind == "simplex"
    assert [len(b) for b in back.batches] == [len(b) for b in seq.batches]
    for ba, bb in zip(seq.batches, back.batches):
        for sa, sb in zip(ba, bb):
            assert sa.id == sb.id
            assert sa.objectives == sb.objectives  # bit-exact via 17 digits


def test_sequence_roundtrip_inverted(tmp_path):
    seq = build_sequence("inverted", 20, base_seed=3, shuffle_seed=3, batch_size=None)
    p = tmp_path / "seq.csv"
    write_sequence(seq, p)
    assert read_sequence(p).front_kind == "inverted"


def test_read_sequence_rejects_duplicates_and_junk(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("id,f1,f2,f3,batch\n0,0.2,0.3,0.5,0\n0,0.5,0.3,0.2,0\n")
    with pytest.raises(ValueError):
        read_sequence(p)
    p.write_text("nope\n")
    with pytest.raises(ValueError):
        read_sequence(p)
    p.write_text("id,f1,f2,f3,batch\n0,0.9,0.9,0.9,0\n")
    with pytest.raises(ValueError):
        read_sequence(p)  # not on a known front


def test_reference_set_roundtrip(tmp_path):
    pts = np.vstack([das_dennis(3, 6), [[0.1, 1 / 3, 1e-17]]])
    p = tmp_path / "refs.csv"
    write_reference_set(pts, p)
    back = read_reference_set(p)
    assert np.array_equal(back, pts)
