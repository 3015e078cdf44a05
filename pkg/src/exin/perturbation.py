"""Sliding-window masking matrices and their batched execution.

For a row of length n and gram size g, the perturbation matrix stacks
n-g+1 copies of the row and zeroes a g-wide band sliding one position per
row. Predicting the whole matrix in a single call is what turns the
per-phrase prediction loop into one invocation per gram size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .predictors import Predictor


@dataclass
class PerturbationBatch:
    """n-g+1 copies of ``base`` with a g-wide zero band at offsets 0..n-g."""

    base: np.ndarray
    gram: int
    rows: np.ndarray

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]


def build_gram_matrix(base, g: int) -> PerturbationBatch:
    """Build the g-gram masking matrix over ``base``.

    Row r equals ``base`` except positions r..r+g-1, which are set to 0.
    Positions already 0 in ``base`` (masked earlier) simply stay 0.
    """
    row = np.asarray(base, dtype=np.int64)
    if row.ndim != 1 or row.size < 1:
        raise ValueError("base must be a non-empty 1-D index row")
    n = row.size
    if not 1 <= g <= n:
        raise ValueError(f"gram size must satisfy 1 <= g <= {n}, got {g}")
    m = n - g + 1
    rows = np.repeat(row[None, :], m, axis=0)
    cols = np.arange(n)
    starts = np.arange(m)
    band = (cols[None, :] >= starts[:, None]) & (cols[None, :] < (starts + g)[:, None])
    rows[band] = 0
    return PerturbationBatch(base=row, gram=g, rows=rows)


def run_batch(batch: PerturbationBatch, predictor: Predictor) -> np.ndarray:
    """Predict every row of the batch in one predictor invocation."""
    return predictor.predict(batch.rows)


def sequential_oracle(batch: PerturbationBatch, predictor: Predictor) -> np.ndarray:
    """Predict the batch one row at a time.

    Test oracle for ``run_batch``: same outputs, m invocations instead of
    one. Never used on the hot path.
    """
    outs = [predictor.predict(row[None, :]) for row in batch.rows]
    return np.concatenate(outs, axis=0)
