"""Input validation helpers shared by the library, the estimator and the CLI."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .exceptions import InvalidInputError

_BITS = frozenset("01")


def as_bitstring(x, n: int | None = None) -> str:
    """Normalise ``x`` (str, bytes, sequence of 0/1 ints, or 1-D array) to a '0'/'1' string."""
    if isinstance(x, bytes):
        x = x.decode("ascii")
    if isinstance(x, str):
        s = x.strip()
    else:
        try:
            vals = [int(v) for v in np.asarray(x).ravel()]
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"cannot interpret {x!r} as a bitstring") from exc
        if any(v not in (0, 1) for v in vals):
            raise InvalidInputError(f"bitstring entries must be 0 or 1, got {x!r}")
        s = "".join(map(str, vals))
    if not s or not set(s) <= _BITS:
        raise InvalidInputError(f"not a nonempty 0/1 string: {x!r}")
    if n is not None and len(s) != n:
        raise InvalidInputError(f"expected length {n}, got {len(s)} for {s!r}")
    return s


def check_candidates(C) -> tuple[str, ...]:
    """Validate a candidate set and return it as a tuple of bitstrings.

    Accepts an iterable of bitstrings or a 2-D 0/1 array (one row per member).
    Members must be distinct and of equal length; order is preserved.
    """
    if isinstance(C, np.ndarray):
        if C.ndim != 2:
            raise InvalidInputError("candidate array must be 2-D")
        rows = [as_bitstring(row) for row in C]
    elif isinstance(C, (str, bytes)):
        raise InvalidInputError("candidate set must be a collection of bitstrings, not a single string")
    else:
        rows = [as_bitstring(c) for c in C]
    if not rows:
        raise InvalidInputError("candidate set is empty")
    n = len(rows[0])
    for c in rows:
        if len(c) != n:
            raise InvalidInputError(f"candidate {c!r} has length {len(c)}, expected {n}")
    if len(set(rows)) != len(rows):
        raise InvalidInputError("candidate set contains duplicates")
    return tuple(rows)


def as_bit_matrix(strings: Sequence[str]) -> np.ndarray:
    """Stack equal-length bitstrings into an ``(M, n)`` uint8 array."""
    if not strings:
        return np.zeros((0, 0), dtype=np.uint8)
    buf = "".join(strings).encode("ascii")
    arr = np.frombuffer(buf, dtype=np.uint8) - ord("0")
    return arr.reshape(len(strings), len(strings[0]))


def parse_candidate_lines(lines: Iterable[str]) -> tuple[str, ...]:
    """Parse the candidate-set text format.

    One bitstring per line; blank lines and lines starting with '#' are ignored.
    Errors carry the 1-based line number.
    """
    rows: list[str] = []
    seen: dict[str, int] = {}
    n = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not set(line) <= _BITS:
            raise InvalidInputError(f"line {lineno}: not a 0/1 string: {line!r}")
        if n is None:
            n = len(line)
        elif len(line) != n:
            raise InvalidInputError(f"line {lineno}: length {len(line)} differs from {n}")
        if line in seen:
            raise InvalidInputError(f"line {lineno}: duplicate of line {seen[line]}")
        seen[line] = lineno
        rows.append(line)
    if not rows:
        raise InvalidInputError("no candidates found")
    return tuple(rows)


def read_candidate_file(path) -> tuple[str, ...]:
    with open(path, encoding="utf-8") as fh:
        return parse_candidate_lines(fh)
