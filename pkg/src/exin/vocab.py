"""Word-level tokenization against a fixed vocabulary.

Index 0 is reserved: it never belongs to any token and means "this word
is absent", which is what the masking machinery writes over excluded
positions. Unknown words map to a dedicated out-of-vocabulary index so
they survive tokenization and can still receive effects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

ABSENT_INDEX = 0


class VocabularyError(ValueError):
    """Raised for vocabulary files or mappings that violate the index contract."""


@dataclass(frozen=True)
class Vocabulary:
    """Immutable token -> index mapping with a reserved OOV index.

    Invariants enforced on construction: no token maps to index 0, indices
    are unique, and ``oov_index`` is positive and collides with no token.
    """

    token_to_index: dict[str, int]
    oov_index: int

    def __post_init__(self) -> None:
        seen: dict[int, str] = {}
        for token, index in self.token_to_index.items():
            if not isinstance(index, int) or isinstance(index, bool) or index <= 0:
                raise VocabularyError(
                    f"token {token!r} has index {index!r}; indices must be positive "
                    f"integers (0 is reserved for absence)"
                )
            if index in seen:
                raise VocabularyError(
                    f"index {index} assigned to both {seen[index]!r} and {token!r}"
                )
            seen[index] = token
        if not isinstance(self.oov_index, int) or isinstance(self.oov_index, bool) or self.oov_index <= 0:
            raise VocabularyError(f"oov_index must be a positive integer, got {self.oov_index!r}")
        if self.oov_index in seen:
            raise VocabularyError(
                f"oov_index {self.oov_index} collides with token {seen[self.oov_index]!r}"
            )

    def index_of(self, token: str) -> int:
        return self.token_to_index.get(token, self.oov_index)

    def __len__(self) -> int:
        return len(self.token_to_index)

    @classmethod
    def from_file(cls, path: str) -> "Vocabulary":
        """Load a vocabulary from a JSON object of token -> index.

        The key ``"oov_index"`` is reserved for the out-of-vocabulary index
        and is not treated as a token.
        """
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise VocabularyError(f"{path}: expected a JSON object")
        if "oov_index" not in raw:
            raise VocabularyError(f"{path}: missing required key 'oov_index'")
        mapping = {k: v for k, v in raw.items() if k != "oov_index"}
        return cls(token_to_index=mapping, oov_index=raw["oov_index"])

    def to_file(self, path: str) -> None:
        payload: dict[str, int] = dict(self.token_to_index)
        payload["oov_index"] = self.oov_index
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
            fh.write("\n")


@dataclass
class TokenizedSentence:
    """Aligned token strings and vocabulary indices for one input text.

    ``indices[k] == 0`` only ever appears after masking; tokenization
    itself never emits 0.
    """

    tokens: list[str]
    indices: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str, vocab: Vocabulary) -> TokenizedSentence:
    """Lowercase, whitespace-split and map ``text`` through ``vocab``.

    Raises ValueError when the text is empty after trimming.
    """
    tokens = text.lower().split()
    if not tokens:
        raise ValueError("cannot tokenize empty text")
    indices = np.array([vocab.index_of(t) for t in tokens], dtype=np.int64)
    return TokenizedSentence(tokens=tokens, indices=indices)


def detokenize_span(sentence: TokenizedSentence, start: int, end: int) -> str:
    """Join the original token strings of ``[start, end)`` with single spaces."""
    n = len(sentence)
    if not (0 <= start < end <= n):
        raise ValueError(f"span [{start}, {end}) out of range for sentence of length {n}")
    return " ".join(sentence.tokens[start:end])
