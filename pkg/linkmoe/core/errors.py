from __future__ import annotations

from enum import StrEnum
from typing import Any, Dict


class ErrorCode(StrEnum):
    # graph / file ingestion
    MALFORMED_LINE = "MALFORMED_LINE"
    SELF_LOOP = "SELF_LOOP"
    NODE_OUT_OF_RANGE = "NODE_OUT_OF_RANGE"
    ROW_COUNT_MISMATCH = "ROW_COUNT_MISMATCH"
    RAGGED_ROW = "RAGGED_ROW"
    NON_FINITE_VALUE = "NON_FINITE_VALUE"
    MISSING_FILE = "MISSING_FILE"
    NEG_COUNT_MISMATCH = "NEG_COUNT_MISMATCH"
    NEGATIVE_OVERLAPS_POSITIVE = "NEGATIVE_OVERLAPS_POSITIVE"
    # heuristics
    SELF_PAIR = "SELF_PAIR"
    # nn
    DIM_MISMATCH = "DIM_MISMATCH"
    TAPE_MISMATCH = "TAPE_MISMATCH"
    BAD_CHECKPOINT = "BAD_CHECKPOINT"
    # experts
    DUPLICATE_NAME = "DUPLICATE_NAME"
    UNKNOWN_HEURISTIC = "UNKNOWN_HEURISTIC"
    CONFLICTING_DUPLICATE = "CONFLICTING_DUPLICATE"
    NON_FINITE_SCORE = "NON_FINITE_SCORE"
    NO_FEATURES = "NO_FEATURES"
    MISSING_SCORE = "MISSING_SCORE"
    EMPTY_REGISTRY = "EMPTY_REGISTRY"
    # gating / ensembles
    MODE_INPUT_MISMATCH = "MODE_INPUT_MISMATCH"
    EMPTY_SPLIT = "EMPTY_SPLIT"
    NO_NEGATIVES = "NO_NEGATIVES"
    # evaluation
    EMPTY_POSITIVES = "EMPTY_POSITIVES"
    EMPTY_NEGATIVES = "EMPTY_NEGATIVES"
    INVALID_GROUPS = "INVALID_GROUPS"
    # cli
    UNKNOWN_SOURCE = "UNKNOWN_SOURCE"
    INVALID_CONFIG = "INVALID_CONFIG"


class LinkMoeError(Exception):
    """Domain error carrying a stable code plus structured context.

    Context keys (path, line_no, node, expert, pair, ...) are kept as a dict so
    the CLI can log them as structured fields and tests can assert on them.
    """

    def __init__(self, code: ErrorCode, message: str | None = None, **context: Any) -> None:
        self.code = ErrorCode(code)
        self.context: Dict[str, Any] = context
        self.detail = message or self.code.value.replace("_", " ").lower()
        super().__init__(self._render())

    @property
    def message(self) -> str:
        if not self.context:
            return self.detail
        ctx = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.detail} ({ctx})"

    def _render(self) -> str:
        return f"{self.code}: {self.message}"
