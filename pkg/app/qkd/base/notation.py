from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from app.qkd.base.codes import (
    LinearCode,
    from_parity_matrix,
    make_full,
    make_hamming743,
    make_repetition,
    make_single_parity,
)
from app.qkd.base.gf2 import BitMatrix
from app.qkd.errors import CodeFormatError, KeyRateError, ParameterError

FAMILIES: Dict[str, Callable[[int], LinearCode]] = {
    "rep": make_repetition,
    "spc": make_single_parity,
    "full": make_full,
}


def parse_code_text(text: str, label: Optional[str] = None) -> LinearCode:
    """Parses the plain-text code format.

    The first content line is "n k", an optional "d <value>" line may
    follow, then n-k rows of H as strings over {0,1}. Blank lines and lines
    starting with "#" are skipped; errors cite the physical line number.

    Args:
        text: File contents.
        label: Optional display name for the resulting code.

    Returns:
        The parsed LinearCode.
    """
    lines = [
        (number, raw.strip())
        for number, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.strip().startswith("#")
    ]
    if not lines:
        raise CodeFormatError(1, "missing header 'n k'")
    number, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(part.isdigit() for part in parts):
        raise CodeFormatError(number, f"expected 'n k', got {header!r}")
    n, k = int(parts[0]), int(parts[1])
    if n < 1 or not 1 <= k <= n:
        raise CodeFormatError(number, f"invalid dimensions n={n} k={k}")
    body = lines[1:]
    declared_d = None
    if body and body[0][1].startswith("d"):
        number, line = body[0]
        fields = line.split()
        if len(fields) != 2 or fields[0] != "d" or not fields[1].isdigit():
            raise CodeFormatError(number, f"expected 'd <value>', got {line!r}")
        declared_d = int(fields[1])
        body = body[1:]
    if len(body) != n - k:
        where = body[n - k][0] if len(body) > n - k else (body[-1][0] + 1 if body else number + 1)
        raise CodeFormatError(where, f"expected {n - k} parity rows, got {len(body)}")
    rows = []
    for number, line in body:
        if len(line) != n or set(line) - {"0", "1"}:
            raise CodeFormatError(number, f"row must be {n} characters over {{0,1}}, got {line!r}")
        rows.append(line)
    if not rows:
        code = make_full(n)
        return code if label is None else replace(code, label=label)
    try:
        return from_parity_matrix(BitMatrix.from_rows(rows), declared_d=declared_d, label=label)
    except KeyRateError as exc:
        raise CodeFormatError(body[0][0], str(exc)) from exc


def format_code(code: LinearCode) -> str:
    """Renders a code in the plain-text code format."""
    lines = [f"{code.n} {code.k}"]
    if code.d is not None:
        lines.append(f"d {code.d}")
    lines.extend(code.parity_check.row_strings())
    return "\n".join(lines) + "\n"


def load_code_file(path: str) -> LinearCode:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"unreadable_code_file: {path}: {exc.strerror}") from exc
    return parse_code_text(text, label=f"file:{path}")


def _parse_range(text: str) -> List[int]:
    if ".." in text:
        low, _, high = text.partition("..")
        if not (low.isdigit() and high.isdigit()) or int(low) > int(high):
            raise ParameterError(f"invalid_range: {text!r}")
        return list(range(int(low), int(high) + 1))
    if not text.isdigit():
        raise ParameterError(f"invalid_length: {text!r}")
    return [int(text)]


def parse_code_selector(selector: str) -> List[Tuple[str, LinearCode]]:
    """Resolves a command-line code selector into labelled codes.

    Accepted forms are "rep:N", "spc:M", "full:N" (each also as a range
    such as "rep:2..8"), "hamming743" and "file:PATH".

    Args:
        selector: The selector text.

    Returns:
        List of (selector label, code) pairs in ascending length.
    """
    selector = selector.strip()
    if selector == "hamming743":
        return [(selector, make_hamming743())]
    family, sep, rest = selector.partition(":")
    if not sep or not rest:
        raise ParameterError(f"unknown_code: {selector!r}")
    if family == "file":
        return [(selector, load_code_file(rest))]
    if family not in FAMILIES:
        raise ParameterError(f"unknown_code: {selector!r}")
    return [(f"{family}:{size}", FAMILIES[family](size)) for size in _parse_range(rest)]
