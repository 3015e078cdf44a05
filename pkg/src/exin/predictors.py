"""Batch prediction contract and the built-in analytic models.

Every predictor maps a matrix of token-index rows to one output per row:
a scalar for regression, a probability vector for classification. Index 0
in a row means "word absent" and must contribute nothing. Predictors are
required to be pure: identical rows yield identical outputs, in one call
or many.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class ModelSpecError(ValueError):
    """Raised for linear model spec files that violate the format."""


@dataclass(frozen=True)
class Task:
    """Prediction task: regression, or classification over ``num_classes``."""

    kind: str
    num_classes: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("regression", "classification"):
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.kind == "classification":
            if self.num_classes is None or self.num_classes < 2:
                raise ValueError("classification requires num_classes >= 2")
        elif self.num_classes is not None:
            raise ValueError("num_classes is only valid for classification")

    @classmethod
    def regression(cls) -> "Task":
        return cls("regression")

    @classmethod
    def classification(cls, num_classes: int) -> "Task":
        return cls("classification", num_classes)

    @property
    def is_classification(self) -> bool:
        return self.kind == "classification"


def check_rows(rows) -> np.ndarray:
    """Validate and normalize a batch of index rows to a 2-D int64 array."""
    arr = np.asarray(rows, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D batch of rows, got shape {arr.shape}")
    if (arr < 0).any():
        raise ValueError("token indices must be non-negative")
    return arr


class Predictor:
    """Abstract batch predictor.

    Subclasses set ``task`` and implement ``predict``, returning a float64
    array of shape ``(m,)`` for regression or ``(m, num_classes)`` for
    classification, one output per input row, in order. ``concurrent_safe``
    declares whether predict may be called from several threads at once.
    """

    task: Task
    concurrent_safe: bool = False

    def predict(self, rows) -> np.ndarray:
        raise NotImplementedError


class LinearPredictor(Predictor):
    """Analytic linear model over token indices.

    Regression: ``y = bias + sum(coefficients[index])`` over the row, where
    missing indices (including the absence index 0) contribute exactly 0.
    Classification: per-class linear scores passed through a softmax.

    Being analytic, every explanation produced from this model can be
    checked against its coefficients directly, which is what most of the
    test suite does.
    """

    def __init__(
        self,
        task: Task,
        bias: float | None = None,
        coefficients: dict[int, float] | None = None,
        class_biases: list[float] | None = None,
        class_coefficients: list[dict[int, float]] | None = None,
    ):
        self.task = task
        if task.is_classification:
            if class_biases is None or class_coefficients is None:
                raise ValueError("classification needs class_biases and class_coefficients")
            if len(class_biases) != task.num_classes or len(class_coefficients) != task.num_classes:
                raise ValueError("class arrays must have one entry per class")
            self._biases = np.asarray(class_biases, dtype=np.float64)
            self._coeff_maps = [dict(m) for m in class_coefficients]
        else:
            if bias is None or coefficients is None:
                raise ValueError("regression needs bias and coefficients")
            self._biases = np.asarray([bias], dtype=np.float64)
            self._coeff_maps = [dict(coefficients)]
        for m in self._coeff_maps:
            if 0 in m:
                raise ValueError("index 0 is the absence token and cannot carry a coefficient")
        self._dense: np.ndarray | None = None  # (num_maps, vocab_extent) cache

    @classmethod
    def regression(cls, bias: float, coefficients: dict[int, float]) -> "LinearPredictor":
        return cls(Task.regression(), bias=bias, coefficients=coefficients)

    @classmethod
    def classification(
        cls, class_biases: list[float], class_coefficients: list[dict[int, float]]
    ) -> "LinearPredictor":
        task = Task.classification(len(class_biases))
        return cls(task, class_biases=class_biases, class_coefficients=class_coefficients)

    @property
    def bias(self) -> float:
        return float(self._biases[0])

    def coefficient(self, index: int, class_index: int = 0) -> float:
        return self._coeff_maps[class_index].get(index, 0.0)

    def _dense_coeffs(self, extent: int) -> np.ndarray:
        if self._dense is None or self._dense.shape[1] < extent:
            size = max(extent, max((max(m, default=0) for m in self._coeff_maps), default=0) + 1)
            dense = np.zeros((len(self._coeff_maps), size), dtype=np.float64)
            for c, m in enumerate(self._coeff_maps):
                for idx, val in m.items():
                    dense[c, idx] = val
            self._dense = dense
        return self._dense

    def predict(self, rows) -> np.ndarray:
        arr = check_rows(rows)
        dense = self._dense_coeffs(int(arr.max()) + 1)
        # (q, m, n) gather, summed per row; q == 1 for regression
        scores = dense[:, arr].sum(axis=2) + self._biases[:, None]
        if not self.task.is_classification:
            return scores[0]
        logits = scores.T
        shifted = logits - logits.max(axis=1, keepdims=True)
        expd = np.exp(shifted)
        return expd / expd.sum(axis=1, keepdims=True)

    @classmethod
    def from_spec(cls, spec: dict) -> "LinearPredictor":
        """Build from the JSON spec format (see ``from_file``)."""
        has_reg = "bias" in spec or "coefficients" in spec
        has_cls = "class_biases" in spec or "class_coefficients" in spec
        if has_reg and has_cls:
            raise ModelSpecError("spec mixes regression and classification keys")
        if has_cls:
            biases = spec.get("class_biases")
            maps = spec.get("class_coefficients")
            if not isinstance(biases, list) or not isinstance(maps, list):
                raise ModelSpecError("class_biases and class_coefficients must both be arrays")
            if len(biases) != len(maps) or len(biases) < 2:
                raise ModelSpecError("need matching class_biases/class_coefficients for >= 2 classes")
            return cls.classification([float(b) for b in biases], [_parse_coeffs(m) for m in maps])
        if has_reg:
            if "bias" not in spec or "coefficients" not in spec:
                raise ModelSpecError("regression spec needs both 'bias' and 'coefficients'")
            return cls.regression(float(spec["bias"]), _parse_coeffs(spec["coefficients"]))
        raise ModelSpecError("spec has neither regression nor classification keys")

    @classmethod
    def from_file(cls, path: str) -> "LinearPredictor":
        """Load a model spec: ``{"bias": b, "coefficients": {"<index>": w}}``
        for regression, or ``{"class_biases": [...], "class_coefficients":
        [{...}, ...]}`` for classification."""
        with open(path, encoding="utf-8") as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelSpecError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(spec, dict):
            raise ModelSpecError(f"{path}: expected a JSON object")
        return cls.from_spec(spec)


def _parse_coeffs(raw) -> dict[int, float]:
    if not isinstance(raw, dict):
        raise ModelSpecError("coefficients must be an object of index -> number")
    out: dict[int, float] = {}
    for key, val in raw.items():
        try:
            idx = int(key)
        except (TypeError, ValueError):
            raise ModelSpecError(f"coefficient key {key!r} is not an integer index") from None
        if idx <= 0:
            raise ModelSpecError(
                f"coefficient key {key!r}: index 0 is reserved for absence and "
                f"indices must be positive"
            )
        out[idx] = float(val)
    return out


class CountingPredictor(Predictor):
    """Transparent wrapper recording batch invocations and total rows.

    Behaviorally invisible: delegates every call unchanged to the inner
    predictor.
    """

    def __init__(self, inner: Predictor):
        self.inner = inner
        self.task = inner.task
        self.concurrent_safe = inner.concurrent_safe
        self.invocations = 0
        self.rows_predicted = 0

    def predict(self, rows) -> np.ndarray:
        arr = check_rows(rows)
        self.invocations += 1
        self.rows_predicted += arr.shape[0]
        return self.inner.predict(arr)

    def snapshot(self) -> tuple[int, int]:
        return self.invocations, self.rows_predicted

    def reset(self) -> None:
        self.invocations = 0
        self.rows_predicted = 0
