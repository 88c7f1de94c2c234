"""
Reading data files and writing result documents

Data files are headered, comma-separated UTF-8 text. Result documents are
JSON; study tables are CSV with shortest round-trip floats and '\\n' line
endings plus a sidecar <output>.meta.json holding the seed and config digest.
"""
import hashlib
import json
from pathlib import Path

import numpy as np
import pandas as pd

from modules.empirical import Sample1D, Sample2D
from utils import __version__ as TOOL_VERSION
from utils.exceptions import DataError
from utils.logger import logger

STUDY_COLUMNS = ["dgp", "n", "scheme", "statistic", "estimator",
                 "rejections", "nsims", "rate", "ci_lo", "ci_hi"]


def load_sample(path, bivariate):
    """
    Read a one- or two-column data file into a sample

    Args:
        path: CSV file with a header row
        bivariate: True for (X, Y) tests, False for goodness of fit

    Returns:
        Sample1D or Sample2D

    Raises:
        DataError: unreadable, wrong shape, non-numeric or empty
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, encoding='utf-8')
    except FileNotFoundError:
        raise DataError(f"Data file not found: {path}") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Cannot parse {path}: {e}") from e

    expected = 2 if bivariate else 1
    if frame.shape[1] != expected:
        raise DataError(f"{path} has {frame.shape[1]} column(s), expected {expected}")
    if frame.shape[0] < 1:
        raise DataError(f"{path} has no data rows")
    try:
        values = frame.apply(pd.to_numeric, errors='raise').to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise DataError(f"{path} contains non-numeric values: {e}") from e
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path} contains missing or non-finite values")

    logger.info(f"Loaded {frame.shape[0]} rows from {path}")
    if bivariate:
        return Sample2D(values[:, 0], values[:, 1])
    return Sample1D(values[:, 0])


def config_digest(doc):
    """SHA-256 of the canonical JSON form of a configuration"""
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def metadata(effective_config, seed):
    return {
        "tool_version": TOOL_VERSION,
        "config_digest": config_digest(effective_config),
        "seed": int(seed),
    }


def write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote {path}")
    return path


def write_result_document(path, result, spec_description, effective_config, seed):
    """JSON record of one TestResult plus reproduction metadata"""
    doc = {
        **metadata(effective_config, seed),
        "test": spec_description,
        "result": result.to_dict(),
    }
    return write_json(path, doc)


def read_result_document(path):
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def rows_to_frame(rows):
    frame = pd.DataFrame([row.to_record() for row in rows], columns=STUDY_COLUMNS)
    return frame.astype({"n": int, "rejections": int, "nsims": int})


def write_study_table(path, rows, effective_config, seed):
    """
    Write StudyRows as CSV plus the <path>.meta.json sidecar

    Returns:
        Path of the CSV
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows_to_frame(rows).to_csv(path, index=False, lineterminator="\n")
    write_json(path.with_name(path.name + ".meta.json"), metadata(effective_config, seed))
    logger.info(f"Wrote {len(rows)} study rows to {path}")
    return path


def read_study_table(path):
    """
    Raises:
        DataError: missing file or columns
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise DataError(f"Study table not found: {path}") from None
    missing = [c for c in STUDY_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"{path} is missing column(s) {missing}")
    return frame


def write_frame(path, frame, index=False):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=index, lineterminator="\n")
    logger.info(f"Wrote {path}")
    return path
