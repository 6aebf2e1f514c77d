"""Reproducible random candidate sets.

Generator: numpy's PCG64 bit generator seeded with the integer seed
(``numpy.random.Generator(numpy.random.PCG64(seed))``), whose stream is
fixed across platforms. When 2^n <= 4M the set is the first M entries of a
permutation of range(2^n); otherwise uniform bit rows are drawn in batches
and the first M distinct rows are kept. The result is sorted.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InvalidInputError


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_candidates(n: int, m: int, seed=None, rng: np.random.Generator | None = None) -> list[str]:
    if n < 1:
        raise InvalidInputError("n must be positive")
    if m < 1 or m > 2 ** n:
        raise InvalidInputError(f"need 1 <= M <= 2^n, got M={m}, n={n}")
    if rng is None:
        rng = rng_for(seed)
    if 2 ** n <= 4 * m:
        vals = rng.permutation(2 ** n)[:m]
        out = [format(int(v), f"0{n}b") for v in vals]
    else:
        seen: dict[str, None] = {}
        while len(seen) < m:
            batch = rng.integers(0, 2, size=(2 * (m - len(seen)) + 8, n), dtype=np.uint8)
            for row in batch:
                seen.setdefault("".join(map(str, row)), None)
                if len(seen) == m:
                    break
        out = list(seen)
    return sorted(out)


def format_candidates(C, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines.extend(C)
    return "\n".join(lines) + "\n"
