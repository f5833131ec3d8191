from pathlib import Path

import orjson
import pandas as pd

from linkmoe.core.errors import ErrorCode, LinkMoeError


def ensure_dir(path: str | Path) -> None:
    Path(path).mkdir(parents=True, exist_ok=True)


def require_file(path: str | Path, name: str | None = None) -> Path:
    p = Path(path)
    if not p.is_file():
        raise LinkMoeError(ErrorCode.MISSING_FILE, f"missing {name or p.name}", path=str(p))
    return p


def iter_data_lines(path: str | Path):
    """Yield (line_no, stripped text) skipping blank and '#' comment lines."""
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            yield line_no, text


def write_json(path: str | Path, payload) -> Path:
    """Deterministic JSON: sorted keys, two-space indent, numpy arrays allowed."""
    target = Path(path)
    target.write_bytes(
        orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)
    )
    return target


def write_frame(path: str | Path, frame: pd.DataFrame) -> Path:
    """CSV with a header row and six-decimal floats."""
    target = Path(path)
    frame.to_csv(target, index=False, float_format="%.6f", lineterminator="\n")
    return target
