from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.csr import build_graph
from linkmoe.services.graph_store.types import (
    EdgeSplit,
    FeatureMatrix,
    LinkDataset,
    NegativeMode,
    NegativeSet,
    as_pairs,
    pair_keys,
)
from linkmoe.utils.helpers.file_utils import iter_data_lines, require_file

logger = logging.getLogger(__name__)

SPLIT_FILES = ("train.txt", "valid.txt", "test.txt", "valid_neg.txt", "test_neg.txt")
HEADER_FILE = "graph.txt"


def _parse_pair(text: str, path: Path, line_no: int) -> Tuple[int, int]:
    parts = text.split()
    try:
        if len(parts) != 2:
            raise ValueError(text)
        u, v = int(parts[0]), int(parts[1])
    except ValueError:
        raise LinkMoeError(ErrorCode.MALFORMED_LINE, path=str(path), line_no=line_no) from None
    if u < 0 or v < 0:
        raise LinkMoeError(ErrorCode.MALFORMED_LINE, "negative node id", path=str(path), line_no=line_no)
    if u == v:
        raise LinkMoeError(ErrorCode.SELF_LOOP, path=str(path), line_no=line_no)
    return u, v


def _scan_pairs(path: Path) -> np.ndarray:
    pairs = [_parse_pair(text, path, line_no) for line_no, text in iter_data_lines(path)]
    return as_pairs(pairs)


def load_edge_list(path: str | Path) -> np.ndarray:
    """Parse "u v" lines in file order; no dedup, no symmetrization."""
    p = require_file(path)
    try:
        frame = pd.read_csv(p, sep=r"\s+", comment="#", header=None, dtype=np.int64, engine="c")
    except pd.errors.EmptyDataError:
        return as_pairs([])
    except (ValueError, pd.errors.ParserError):
        return _scan_pairs(p)
    arr = frame.to_numpy(dtype=np.int64, copy=True)
    if arr.ndim != 2 or arr.shape[1] != 2 or (arr < 0).any() or (arr[:, 0] == arr[:, 1]).any():
        # slow path pinpoints the offending line
        return _scan_pairs(p)
    return arr


def write_edge_list(path: str | Path, pairs) -> None:
    arr = as_pairs(pairs)
    with open(path, "w", encoding="utf-8") as f:
        for u, v in arr:
            f.write(f"{int(u)} {int(v)}\n")


def write_negative_set(path: str | Path, negatives: NegativeSet) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if negatives.mode is NegativeMode.SHARED:
            f.write("SHARED\n")
            for u, v in negatives.shared_pairs:
                f.write(f"{int(u)} {int(v)}\n")
            return
        rows = negatives.per_pos_pairs
        f.write(f"PER_POSITIVE {rows.shape[1]}\n")
        for row in rows:
            f.write(" ".join(str(int(t)) for t in row.reshape(-1)) + "\n")


def write_graph_header(path: str | Path, n: int) -> None:
    Path(path).write_text(f"n={int(n)}\n", encoding="utf-8")


def load_graph_header(path: str | Path) -> int:
    p = require_file(path)
    for line_no, text in iter_data_lines(p):
        key, _, value = text.partition("=")
        if key.strip() != "n" or not value.strip().isdigit():
            raise LinkMoeError(ErrorCode.MALFORMED_LINE, "expected n=<count>", path=str(p), line_no=line_no)
        return int(value.strip())
    raise LinkMoeError(ErrorCode.MALFORMED_LINE, "empty graph header", path=str(p), line_no=1)


def _scan_features(path: Path) -> List[List[float]]:
    rows: List[List[float]] = []
    width: Optional[int] = None
    for line_no, text in iter_data_lines(path):
        try:
            row = [float(t) for t in text.split()]
        except ValueError:
            raise LinkMoeError(ErrorCode.MALFORMED_LINE, path=str(path), line_no=line_no) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise LinkMoeError(ErrorCode.RAGGED_ROW, path=str(path), line_no=line_no)
        if not np.all(np.isfinite(row)):
            raise LinkMoeError(ErrorCode.NON_FINITE_VALUE, path=str(path), line_no=line_no)
        rows.append(row)
    return rows


def load_features(path: str | Path, n: int) -> FeatureMatrix:
    p = require_file(path)
    try:
        frame = pd.read_csv(p, sep=r"\s+", comment="#", header=None, dtype=np.float64, float_precision="round_trip")
        rows = frame.to_numpy(dtype=np.float64, copy=True)
        clean = bool(np.isfinite(rows).all())
    except pd.errors.EmptyDataError:
        rows, clean = np.zeros((0, 0)), True
    except (ValueError, pd.errors.ParserError):
        clean = False
    if not clean:
        # NaN may come from a ragged row padded by pandas or a literal nan/inf
        rows = np.asarray(_scan_features(p), dtype=np.float64)
    if rows.shape[0] != n:
        raise LinkMoeError(ErrorCode.ROW_COUNT_MISMATCH, path=str(p), rows=int(rows.shape[0]), n=int(n))
    d = int(rows.shape[1]) if rows.ndim == 2 else 0
    return FeatureMatrix(n=int(n), d=d, rows=rows.reshape(n, d))


def load_negative_set(path: str | Path, positives: np.ndarray) -> NegativeSet:
    p = require_file(path)
    lines = iter_data_lines(p)
    try:
        header_no, header = next(lines)
    except StopIteration:
        raise LinkMoeError(ErrorCode.MALFORMED_LINE, "missing negative-set header", path=str(p), line_no=1)
    tokens = header.split()
    if tokens == ["SHARED"]:
        pairs = [_parse_pair(text, p, line_no) for line_no, text in lines]
        return NegativeSet.shared(pairs)
    if len(tokens) == 2 and tokens[0] == "PER_POSITIVE" and tokens[1].isdigit():
        k = int(tokens[1])
        rows: List[List[int]] = []
        for line_no, text in lines:
            parts = text.split()
            if len(parts) != 2 * k:
                raise LinkMoeError(ErrorCode.MALFORMED_LINE, f"expected {2 * k} ids", path=str(p), line_no=line_no)
            for a in range(0, 2 * k, 2):
                _parse_pair(f"{parts[a]} {parts[a + 1]}", p, line_no)
            rows.append([int(t) for t in parts])
        if len(rows) != positives.shape[0]:
            raise LinkMoeError(
                ErrorCode.NEG_COUNT_MISMATCH, path=str(p), rows=len(rows), positives=int(positives.shape[0])
            )
        return NegativeSet.per_positive(np.asarray(rows, dtype=np.int64).reshape(len(rows), k, 2))
    raise LinkMoeError(ErrorCode.MALFORMED_LINE, "bad negative-set header", path=str(p), line_no=header_no)


def _check_range(pairs: np.ndarray, n: int, name: str) -> None:
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, file=name, n=int(n), max_id=int(pairs.max()))


def _check_disjoint(pos: np.ndarray, neg: NegativeSet, n: int, name: str) -> None:
    overlap = np.intersect1d(pair_keys(pos, n), pair_keys(neg.flat_pairs, n))
    if overlap.size:
        key = int(overlap[0])
        raise LinkMoeError(ErrorCode.NEGATIVE_OVERLAPS_POSITIVE, file=name, pair=(key // n, key % n))


def load_split(dir_path: str | Path, n: Optional[int] = None) -> EdgeSplit:
    root = Path(dir_path)
    for name in SPLIT_FILES:
        if not (root / name).is_file():
            raise LinkMoeError(ErrorCode.MISSING_FILE, f"missing {name}", name=name, path=str(root))
    if n is None:
        n = load_graph_header(root / HEADER_FILE)
    train = load_edge_list(root / "train.txt")
    valid = load_edge_list(root / "valid.txt")
    test = load_edge_list(root / "test.txt")
    valid_neg = load_negative_set(root / "valid_neg.txt", valid)
    test_neg = load_negative_set(root / "test_neg.txt", test)
    for name, arr in (("train.txt", train), ("valid.txt", valid), ("test.txt", test),
                      ("valid_neg.txt", valid_neg.flat_pairs), ("test_neg.txt", test_neg.flat_pairs)):
        _check_range(arr, n, name)
    _check_disjoint(valid, valid_neg, n, "valid_neg.txt")
    _check_disjoint(test, test_neg, n, "test_neg.txt")
    logger.info(
        "Loaded split",
        extra={"split_dir": str(root), "train": len(train), "valid": len(valid), "test": len(test),
               "negative_mode": test_neg.mode.value},
    )
    return EdgeSplit(train_pos=train, valid_pos=valid, test_pos=test, valid_neg=valid_neg, test_neg=test_neg)


def load_dataset(
    split_dir: str | Path,
    header_path: str | Path | None = None,
    features_path: str | Path | None = None,
    include_valid_in_graph: bool = False,
    name: Optional[str] = None,
) -> LinkDataset:
    """Load header, split and optional features; the graph holds training edges only.

    ``include_valid_in_graph`` reproduces the ogbl-collab convention of letting
    validation positives into the inference graph; off by default.
    """
    root = Path(split_dir)
    n = load_graph_header(header_path or root / HEADER_FILE)
    split = load_split(root, n)
    edges = split.train_pos
    if include_valid_in_graph:
        edges = np.concatenate([edges, split.valid_pos], axis=0)
    graph = build_graph(edges, n)
    features = load_features(features_path, n) if features_path else None
    logger.info(
        "Built training graph",
        extra={"n": n, "edges": graph.num_edges, "features": features.d if features else 0,
               "include_valid_in_graph": include_valid_in_graph},
    )
    return LinkDataset(graph=graph, split=split, features=features, name=name)
