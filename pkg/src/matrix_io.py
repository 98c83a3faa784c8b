"""Matrix Market, JSON report and CSV persistence."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Sequence, Union

import numpy as np
import scipy.io
import scipy.sparse
from pydantic import ValidationError

from .errors import MatrixFileError
from .models import Pattern, Report, as_matrix

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
WriteMode = Literal["dense", "coordinate"]

# shortest decimal that round-trips a double
PRECISION = 17


def read_matrix(path: PathLike) -> np.ndarray:
    """Dense array from an array or coordinate Matrix Market file; symmetry qualifiers are expanded."""
    path = Path(path)
    if not path.is_file():
        raise MatrixFileError(str(path), "no such file")
    try:
        data = scipy.io.mmread(str(path))
    except Exception as exc:
        # mmread backends raise their own parse error types
        raise MatrixFileError(str(path), f"not a valid Matrix Market file: {exc}") from exc
    if scipy.sparse.issparse(data):
        data = data.toarray()
    try:
        matrix = as_matrix(np.asarray(data), str(path))
    except ValueError as exc:
        raise MatrixFileError(str(path), str(exc)) from exc
    logger.debug(f"read {matrix.shape[0]}x{matrix.shape[1]} {matrix.dtype} matrix from {path}")
    return matrix


def _write(path: Path, payload, **kwargs) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with path.open("wb") as handle:
            scipy.io.mmwrite(handle, payload, symmetry="general", **kwargs)
    except (OSError, ValueError) as exc:
        raise MatrixFileError(str(path), f"write failed: {exc}") from exc


def write_matrix(m_, path: PathLike, mode: WriteMode = "coordinate") -> None:
    """Write ``m_`` as an array (``dense``) or coordinate Matrix Market file."""
    m_ = as_matrix(m_)
    path = Path(path)
    if mode == "dense":
        payload = m_
    elif mode == "coordinate":
        payload = scipy.sparse.coo_matrix(m_)
    else:
        raise MatrixFileError(str(path), f"unknown write mode {mode!r}")
    _write(path, payload, precision=PRECISION)
    logger.debug(f"wrote {mode} {m_.shape[0]}x{m_.shape[1]} matrix to {path}")


def read_pattern(path: PathLike) -> Pattern:
    """Pattern from a 0/1 Matrix Market file."""
    values = read_matrix(path)
    if np.iscomplexobj(values) or not np.all((values == 0) | (values == 1)):
        raise MatrixFileError(str(path), "pattern entries must be 0 or 1")
    try:
        return Pattern(mask=values != 0)
    except ValidationError as exc:
        raise MatrixFileError(str(path), str(exc)) from exc


def write_pattern(z: Pattern, path: PathLike) -> None:
    """Coordinate file with value 1 at every free position."""
    _write(Path(path), scipy.sparse.coo_matrix(z.mask.astype(np.int64)), field="integer")


def write_report(report: Report, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")


def _fieldnames(rows: Sequence[Dict[str, object]]) -> List[str]:
    names: List[str] = []
    for row in rows:
        names.extend(key for key in row if key not in names)
    return names


def write_csv(rows: Iterable[Dict[str, object]], path: PathLike) -> None:
    """One header line, then one line per row; keys missing from a row stay empty."""
    rows = list(rows)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=_fieldnames(rows))
        writer.writeheader()
        writer.writerows(rows)
