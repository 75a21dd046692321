# pointset_io.py

import logging
import sys
from pathlib import Path
from typing import Iterable

import chardet
import pandas as pd

from modules.core_order import PointSet
from modules.errors import PointSetParseError

logger = logging.getLogger(__name__)

SPREADSHEET_SUFFIXES = {".xlsx", ".xls"}


def _decode(raw: bytes) -> str:
    result = chardet.detect(raw)
    encoding = result['encoding'] or 'utf-8'
    return raw.decode(encoding, errors='replace')


def _to_coord(token, line: int) -> int:
    if isinstance(token, float) and token.is_integer():
        token = int(token)
    if isinstance(token, bool):
        raise PointSetParseError(line, f"non-integer token {token!r}")
    try:
        value = int(token) if isinstance(token, int) else int(str(token).strip())
    except ValueError:
        raise PointSetParseError(line, f"non-integer token {token!r}") from None
    if value < 0:
        raise PointSetParseError(line, f"negative coordinate {value}")
    return value


def _build(rows: Iterable[tuple[int, list]]) -> PointSet:
    dim = None
    seen = {}
    for line, tokens in rows:
        point = tuple(_to_coord(t, line) for t in tokens)
        if dim is None:
            dim = len(point)
        elif len(point) != dim:
            raise PointSetParseError(line, f"expected {dim} coordinates, got {len(point)}")
        if point in seen:
            raise PointSetParseError(line, f"duplicate point {point} (first on line {seen[point]})")
        seen[point] = line

    if dim is None:
        raise PointSetParseError(0, "no points")
    return PointSet(dim, frozenset(seen))


def parse_pointset(source) -> PointSet:
    """
    Parse the point-set text format: one point per line, coordinates as
    base-10 integers separated by spaces; blank lines and `#` comments are
    skipped. Accepts a str, bytes, or a text/binary stream; bytes are decoded
    with the detected encoding.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        source = _decode(bytes(source))

    def rows():
        for line, text in enumerate(source.splitlines(), start=1):
            text = text.strip()
            if not text or text.startswith("#"):
                continue
            yield line, text.split()

    return _build(rows())


def read_pointset_file(path) -> PointSet:
    if str(path) == "-":
        return parse_pointset(getattr(sys.stdin, "buffer", sys.stdin))

    path = Path(path)
    if path.suffix.lower() in SPREADSHEET_SUFFIXES:
        df = pd.read_excel(path, header=None, dtype=object)
        logger.debug("read %d spreadsheet rows from %s", len(df), path)

        def rows():
            for idx, row in df.iterrows():
                values = [v for v in row.tolist() if not pd.isna(v)]
                if values:
                    yield idx + 1, values

        return _build(rows())

    with open(path, "rb") as fh:
        return parse_pointset(fh)


def format_pointset(A: PointSet) -> str:
    return "".join(" ".join(str(c) for c in p) + "\n" for p in A.sorted_points())
