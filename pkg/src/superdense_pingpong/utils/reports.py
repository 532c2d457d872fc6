"""Report files.

Tables go through pandas with a fixed column order; JSON is key-sorted and
indented. Nothing time-dependent is written, so a rerun with the same seed
reproduces every byte.
"""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path
import tempfile
from typing import Any, Mapping, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

RUNS = 'runs'
SUMMARY = 'summary'
SWEEP = 'sweep'
CURVE = 'curve'
CAPACITY = 'capacity'
BOUNDS = 'bounds'
FORGERY = 'forgery'
CONFIG = 'config'


def report_path(out_dir: Path, prefix: str, kind: str, fmt: str) -> Path:
    return Path(out_dir) / f"{prefix}_{kind}.{fmt}"


def write_text_atomic(dest_path: Path, text: str) -> None:
    """Write via tempfile + os.replace so dest is never partially written."""
    dest_path = Path(dest_path)
    fd, tmp_name = tempfile.mkstemp(
        prefix=dest_path.name + '.', suffix='.tmp', dir=str(dest_path.parent)
    )
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp_name, str(dest_path))
    except Exception:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _plain(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def to_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=_plain) + "\n"


def frame_to_text(frame: pd.DataFrame, fmt: str) -> str:
    if fmt == 'json':
        records = frame.astype(object).where(frame.notna(), None).to_dict(orient='records')
        return to_json(records)
    return frame.to_csv(index=False, lineterminator="\n")


def write_table(frame: pd.DataFrame, path: Path, fmt: str = 'csv',
                columns: Sequence[str] = None) -> Path:
    """Write ``frame`` as CSV or a JSON list of row objects."""
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    write_text_atomic(path, frame_to_text(frame, fmt))
    logger.info(f"Wrote {path}")
    return Path(path)


def write_json(data: Mapping[str, Any], path: Path) -> Path:
    write_text_atomic(path, to_json(data))
    logger.info(f"Wrote {path}")
    return Path(path)
