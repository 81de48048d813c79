import numpy as np
import pytest

from truncarch import (
    Archive,
    Solution,
    dominates,
    fast_nondominated_sort,
    nondominated_filter,
    objective_vector,
)


def sols(vectors):
    return [Solution(i, tuple(v)) for i, v in enumerate(vectors)]


# -- independent oracles ------------------------------------------------------

def brute_dominates(a, b):
    return all(x <= y for x, y in zip(a, b)) and tuple(a) != tuple(b)


def brute_filter(solutions):
    out = []
    for s in solutions:
        if not any(
            brute_dominates(t.objectives, s.objectives) for t in solutions if t is not s
        ):
            out.append(s)
    return out


def brute_depth(solutions):
    remaining = list(solutions)
    depth = {}
    rank = 0
    while remaining:
        layer = brute_filter(remaining)
        for s in layer:
            depth[s.id] = rank
        remaining = [s for s in remaining if s not in layer]
        rank += 1
    return depth


# -- dominates ----------------------------------------------------------------

def test_dominates_examples():
    assert dominates((1.0, 2.0, 3.0), (2.0, 2.0, 3.0))
    assert not dominates((1.0, 2.0), (2.0, 1.0))
    assert not dominates((1.0, 2.0), (1.0, 2.0))


def test_dominates_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1.0, 2.0), (1.0, 2.0, 3.0))


def test_dominates_properties_random():
    rng = np.random.default_rng(11)
    for _ in range(300):
        a = rng.random(3)
        b = rng.random(3)
        assert not (dominates(a, b) and dominates(b, a))
        assert not dominates(a, a)
        assert dominates(a, b) == brute_dominates(a, b)
        # transitivity on a constructed chain
        c = a + rng.random(3)  # a dominates c
        d = c + rng.random(3)
        assert dominates(a, c) and dominates(c, d) and dominates(a, d)


# -- objective_vector / Solution / Archive ------------------------------------

def test_objective_vector_validation():
    assert objective_vector([1, 2]) == (1.0, 2.0)
    with pytest.raises(ValueError):
        objective_vector([1.0])
    with pytest.raises(ValueError):
        objective_vector([1.0, float("nan")])
    with pytest.raises(ValueError):
        objective_vector([1.0, float("inf")])


def test_solution_validation():
    s = Solution(3, (0.5, 0.5))
    assert s.id == 3 and s.objectives == (0.5, 0.5)
    with pytest.raises(ValueError):
        Solution(-1, (0.5, 0.5))


def test_archive_capacity():
    members = tuple(sols([(0, 1), (1, 0)]))
    a = Archive(capacity=2, members=members)
    assert len(a) == 2
    with pytest.raises(ValueError):
        Archive(capacity=1, members=members)
    with pytest.raises(ValueError):
        Archive(capacity=0, members=())


# -- nondominated_filter ------------------------------------------------------

def test_filter_example():
    s = sols([(1, 2), (2, 1), (2, 2), (3, 3)])
    kept = nondominated_filter(s)
    assert [x.objectives for x in kept] == [(1.0, 2.0), (2.0, 1.0)]


def test_filter_keeps_duplicates_and_order():
    s = sols([(2, 1), (1, 2), (2, 1), (5, 5)])
    kept = nondominated_filter(s)
    assert [x.id for x in kept] == [0, 1, 2]


def test_filter_empty_and_singleton():
    assert nondominated_filter([]) == []
    s = sols([(1, 1)])
    assert nondominated_filter(s) == s


def test_filter_matches_brute_random():
    rng = np.random.default_rng(7)
    for trial in range(40):
        n = int(rng.integers(1, 30))
        m = int(rng.integers(2, 5))
        pts = rng.integers(0, 5, size=(n, m)).astype(float)  # ints force ties
        s = sols(pts)
        assert nondominated_filter(s) == brute_filter(s)


# -- fast_nondominated_sort ---------------------------------------------------

def test_sort_example_chain():
    s = sols([(1, 1), (2, 2), (3, 3)])
    fronts = fast_nondominated_sort(s)
    assert [f.rank for f in fronts] == [0, 1, 2]
    assert [[m.objectives for m in f.members] for f in fronts] == [
        [(1.0, 1.0)],
        [(2.0, 2.0)],
        [(3.0, 3.0)],
    ]


def test_sort_partition_and_ranks_random():
    rng = np.random.default_rng(23)
    for trial in range(30):
        n = int(rng.integers(1, 40))
        m = int(rng.integers(2, 4))
        pts = rng.integers(0, 6, size=(n, m)).astype(float)
        s = sols(pts)
        fronts = fast_nondominated_sort(s)
        # partition: every solution in exactly one front
        seen = [x.id for f in fronts for x in f.members]
        assert sorted(seen) == list(range(n))
        assert [f.rank for f in fronts] == list(range(len(fronts)))
        expected = brute_depth(s)
        for f in fronts:
            for x in f.members:
                assert expected[x.id] == f.rank
        # rank-0 front == nondominated filter (same order)
        assert list(fronts[0].members) == brute_filter(s)


def test_sort_empty():
    assert fast_nondominated_sort([]) == []


def test_simplex_samples_are_mutually_nondominated():
    rng = np.random.default_rng(5)
    u = np.sort(rng.random((200, 2)), axis=1)
    pts = np.column_stack([u[:, 0], u[:, 1] - u[:, 0], 1.0 - u[:, 1]])
    s = sols(pts)
    assert nondominated_filter(s) == s
    fronts = fast_nondominated_sort(s)
    assert len(fronts) == 1 and fronts[0].rank == 0
