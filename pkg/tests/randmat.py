"""Random skew matrices with small-integer linear-form entries."""

from __future__ import annotations

import random

from pfaffrep.coeffring import ZZ
from pfaffrep.pfaffian import LinearForm, SkewMatrix


def random_skew(n: int, rng: random.Random, ring=ZZ, density: float | None = None, bound: int = 3) -> SkewMatrix:
    if density is None:
        density = rng.uniform(0.3, 1.0)
    upper = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rng.random() < density:
                upper[(i, j)] = LinearForm(*(ring.coerce_int(rng.randint(-bound, bound)) for _ in range(3)))
    return SkewMatrix(n, upper, ring)


def random_int_matrix(n: int, rng: random.Random, bound: int = 2) -> list:
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
