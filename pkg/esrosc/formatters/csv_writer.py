"""
Shared CSV helpers: fixed 12-significant-digit floats and comment-prefixed metadata.
"""

import csv
import io
import math
from typing import Iterable, List, Optional, Sequence

FLOAT_FORMAT = "%.12g"


def format_float(value: Optional[float]) -> str:
    """Render a float with 12 significant digits; None becomes an empty cell."""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    text = FLOAT_FORMAT % value
    return "0" if text == "-0" else text


def write_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
    comments: Optional[List[str]] = None,
) -> str:
    """
    Render rows as CSV text with "\\n" line endings.

    Args:
        header: Column names
        rows: Cell values; floats are formatted with format_float
        comments: Metadata lines written first, each prefixed with "# "

    Returns:
        CSV document
    """
    buffer = io.StringIO()
    for line in comments or []:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(c) if isinstance(c, float) or c is None else c for c in row])
    return buffer.getvalue()


def read_csv(text: str) -> List[List[str]]:
    """Parse CSV text, skipping "#" comment lines and blank lines."""
    lines = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    return [row for row in csv.reader(lines)]
