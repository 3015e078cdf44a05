import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exin import (
    CountingPredictor,
    LinearPredictor,
    build_gram_matrix,
    run_batch,
    sequential_oracle,
)

from conftest import random_regressor, random_row


def test_unigram_matrix_diagonal_zeros():
    batch = build_gram_matrix([5, 6, 7, 8], 1)
    assert batch.rows.tolist() == [
        [0, 6, 7, 8],
        [5, 0, 7, 8],
        [5, 6, 0, 8],
        [5, 6, 7, 0],
    ]


def test_bigram_matrix_band_zeros():
    batch = build_gram_matrix([5, 6, 7, 8], 2)
    assert batch.rows.tolist() == [
        [0, 0, 7, 8],
        [5, 0, 0, 8],
        [5, 6, 0, 0],
    ]


def test_full_gram_single_row():
    batch = build_gram_matrix([5, 6], 2)
    assert batch.rows.tolist() == [[0, 0]]


@pytest.mark.parametrize("g", [0, -1, 5])
def test_rejects_out_of_range_gram(g):
    with pytest.raises(ValueError):
        build_gram_matrix([5, 6, 7, 8], g)


def test_existing_zeros_stay_zero():
    batch = build_gram_matrix([5, 0, 7], 1)
    assert batch.rows.tolist() == [[0, 0, 7], [5, 0, 7], [5, 0, 0]]


def test_run_batch_linear_outputs():
    model = LinearPredictor.regression(0.0, {5: 1.0, 6: 2.0, 7: 3.0, 8: 4.0})
    out = run_batch(build_gram_matrix([5, 6, 7, 8], 1), model)
    assert out.tolist() == [9.0, 8.0, 7.0, 6.0]


def test_run_batch_all_masked_is_bias():
    model = LinearPredictor.regression(0.0, {5: 1.0, 6: 2.0, 7: 3.0, 8: 4.0})
    out = run_batch(build_gram_matrix([5, 6, 7, 8], 4), model)
    assert out.tolist() == [0.0]


def test_run_batch_is_one_invocation():
    model = CountingPredictor(LinearPredictor.regression(0.0, {1: 1.0}))
    run_batch(build_gram_matrix([1, 1, 1, 1, 1], 2), model)
    assert model.invocations == 1
    assert model.rows_predicted == 4


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_batched_equals_sequential_property(data):
    seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 21))
    g = int(rng.integers(1, n + 1))
    model, _, _ = random_regressor(rng, vocab_size=30)
    batch = build_gram_matrix(random_row(rng, n, vocab_size=30), g)
    assert (run_batch(batch, model) == sequential_oracle(batch, model)).all()


def test_single_row_batch_trivially_equal(rng):
    model, _, _ = random_regressor(rng)
    batch = build_gram_matrix(random_row(rng, 6), 6)
    assert (run_batch(batch, model) == sequential_oracle(batch, model)).all()


def test_row_counts_follow_arithmetic_series(rng):
    n = 50
    base = random_row(rng, n)
    total = sum(build_gram_matrix(base, g).num_rows for g in range(1, n + 1))
    assert total == n * (n + 1) // 2 == 1275


def test_rows_differ_from_base_exactly_on_band(rng):
    base = random_row(rng, 15)
    for g in (1, 3, 15):
        batch = build_gram_matrix(base, g)
        for r, row in enumerate(batch.rows):
            band = slice(r, r + g)
            assert (row[band] == 0).all()
            outside = np.ones(15, dtype=bool)
            outside[band] = False
            assert (row[outside] == base[outside]).all()
