from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordmetrics.core import ElectionError, position_matrix_of
from ordmetrics.positions import (
    PRINTED_ID_ST_BLOCKS,
    block_matrix,
    id_st_block_sizes,
    realize_position_matrix,
    stratification_matrix,
    uniform_matrix,
)


def test_stratification_three_eighths_rounding():
    x = stratification_matrix(3 / 8, 8, 96)
    assert (x[:3, :3] == 32).all()
    lower = x[3:, 3:]
    assert sorted(set(lower.ravel().tolist())) == [19, 20]
    assert (lower.sum(axis=0) == 96).all() and (lower.sum(axis=1) == 96).all()


def test_stratification_one_eighth():
    x = stratification_matrix(1 / 8, 8, 96)
    assert x[0, 0] == 96
    assert sorted(set(x[1:, 1:].ravel().tolist())) == [13, 14]


def test_stratification_rejects_bad_alpha():
    with pytest.raises(ElectionError):
        stratification_matrix(0.3, 8, 96)


def test_printed_id_st_blocks():
    assert PRINTED_ID_ST_BLOCKS[6] == (1, 2, 2, 1, 1, 1)
    assert id_st_block_sizes(4, 8) == (2, 2, 2, 2)
    sizes = id_st_block_sizes(3, 10, np.random.default_rng(0))
    assert sorted(sizes) == [3, 3, 4]


def test_realize_diagonal_permutation():
    perm = np.array([2, 0, 3, 1])
    x = np.zeros((4, 4), dtype=int)
    x[np.arange(4), perm] = 5
    e = realize_position_matrix(x, seed=0)
    assert (e.votes == perm).all()
    assert (position_matrix_of(e) == x).all()


@pytest.mark.parametrize("alpha", [1 / 8, 2 / 8, 3 / 8, 1 / 2])
def test_realize_stratification(alpha):
    x = stratification_matrix(alpha, 8, 96)
    assert (position_matrix_of(realize_position_matrix(x, seed=1)) == x).all()


def test_realize_uniform():
    x = uniform_matrix(8, 96)
    assert (position_matrix_of(realize_position_matrix(x, seed=2)) == 12).all()


def test_realize_rejects_invalid():
    with pytest.raises(ElectionError):
        realize_position_matrix(np.array([[1, 0], [1, 1]]))


@st.composite
def position_matrices(draw):
    m = draw(st.integers(1, 5))
    k = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 10**6))
    rng = np.random.default_rng(seed)
    x = np.zeros((m, m), dtype=int)
    for _ in range(k):
        x[np.arange(m), rng.permutation(m)] += 1
    return x


@settings(max_examples=40, deadline=None)
@given(position_matrices(), st.integers(0, 10**6))
def test_realize_roundtrip(x, seed):
    # every sum of permutation matrices is realizable
    assert (position_matrix_of(realize_position_matrix(x, seed)) == x).all()


def test_block_matrix_sums():
    x = block_matrix([3, 2, 3], 10)
    assert (x.sum(axis=0) == 10).all() and (x.sum(axis=1) == 10).all()
