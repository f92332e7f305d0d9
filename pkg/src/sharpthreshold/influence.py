"""Coordinate influences (exact and Monte Carlo) and the dyadic replacement of
a biased bit by a block of uniform bits.

A configuration is pivotal at coordinate k when some other value of that
coordinate alone changes the function; on three-point spaces "other value"
ranges over both alternatives. The exact path accumulates fiber masses with
math.fsum, which is exactly rounded, so influences of coordinates that are
equivalent under a symmetry come out bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .boolfn import BooleanFunction, SymmetryGroup
from .errors import SizeLimitError
from .spaces import Space, TwoPointSpace

__all__ = [
    "InfluenceReport",
    "DyadicEmbedding",
    "influence_exact",
    "influence_exact_symmetric",
    "influence_onesided",
    "influence_mc",
    "embed_dyadic",
    "lift_through_embedding",
    "w_embedded",
    "wilson_half_width",
]

MAX_EXACT_STATES = 1 << 22


@dataclass(frozen=True)
class InfluenceReport:
    per_coordinate: tuple[float, ...]
    method: str  # "exact" | "monte_carlo"
    half_width: tuple[float, ...]  # 95% Wilson half-widths; zeros when exact

    def __post_init__(self):
        for v in self.per_coordinate:
            if not (-1e-12 <= v <= 1 + 1e-12):
                raise ValueError(f"influence {v} outside [0,1]")

    @property
    def total(self) -> float:
        """Sum of the coordinate influences (exactly rounded)."""
        return math.fsum(self.per_coordinate)

    @property
    def max_influence(self) -> float:
        return max(self.per_coordinate) if self.per_coordinate else 0.0


def _check_dense(f: BooleanFunction, space: Space) -> np.ndarray:
    if space.n != f.n or space.base != f.base:
        raise ValueError("space does not match function arity/alphabet")
    table = f.dense_table()
    if table.size > MAX_EXACT_STATES:
        raise SizeLimitError("function too large for exact influence")
    return table


def _rest_weights(space: Space, i: int) -> np.ndarray:
    """Measure vector of the product over coordinates != i+1, ordered to match
    the rest-axes of the reshaped table with coordinate i+1's axis removed."""
    out = np.ones(1)
    for j in range(space.n):
        if j == i:
            continue
        out = np.kron(space.marginal(j), out)
    return out


def _fiber_view(table: np.ndarray, base: int, n: int, i: int) -> np.ndarray:
    """(base, base**(n-1)) view: row d = the table slice with coordinate i+1
    at digit d. After the moveaxis the remaining axes keep their original
    descending-coordinate order, so the C-order flatten varies the lowest
    coordinate fastest, which is exactly the rest-rank order _rest_weights
    produces."""
    shaped = table.reshape((base,) * n)
    moved = np.moveaxis(shaped, n - 1 - i, 0)
    return moved.reshape(base, -1)


def influence_exact(f: BooleanFunction, space: Space) -> InfluenceReport:
    """Exact influence of every coordinate under the product measure."""
    table = _check_dense(f, space)
    base, n = space.base, space.n
    per = []
    for i in range(n):
        fibers = _fiber_view(table, base, n, i)
        nonconst = fibers.max(axis=0) != fibers.min(axis=0)
        w = _rest_weights(space, i)
        per.append(math.fsum(w[nonconst].tolist()))
    return InfluenceReport(
        per_coordinate=tuple(per), method="exact", half_width=(0.0,) * n
    )


def influence_exact_symmetric(
    f: BooleanFunction, space: Space, group: SymmetryGroup
) -> InfluenceReport:
    """influence_exact computed once per orbit of a group preserving f.

    Influences are constant on orbits of a preserving group, and with
    per-coordinate marginals equal within each orbit the fsum accumulation
    makes that equality exact, so a single representative suffices.
    """
    table = _check_dense(f, space)
    base, n = space.base, space.n
    per = [0.0] * n
    for orbit in group.orbits:
        i = orbit[0]
        fibers = _fiber_view(table, base, n, i)
        nonconst = fibers.max(axis=0) != fibers.min(axis=0)
        w = _rest_weights(space, i)
        val = math.fsum(w[nonconst].tolist())
        for j in orbit:
            per[j] = val
    return InfluenceReport(
        per_coordinate=tuple(per), method="exact", half_width=(0.0,) * n
    )


def influence_onesided(f: BooleanFunction, space: Space) -> InfluenceReport:
    """Influence via the union of the flip-up and flip-down pivotal sets.

    A point is pivotal-up when raising coordinate k alone can raise f, and
    pivotal-down when lowering it can lower f. For increasing f this union
    has the same measure as the two-sided pivotal set coordinate by
    coordinate; the equality is asserted by the test suite, not here.
    """
    table = _check_dense(f, space)
    base, n = space.base, space.n
    per = []
    for i in range(n):
        fibers = _fiber_view(table, base, n, i).astype(np.int8)
        w = _rest_weights(space, i)
        acc = []
        for d in range(base):
            here = fibers[d]
            up = np.zeros_like(here, dtype=bool)
            down = np.zeros_like(up)
            for e in range(d + 1, base):
                up |= fibers[e] > here
            for e in range(d):
                down |= fibers[e] < here
            mask = up | down
            # mass of configurations with coordinate i+1 at digit d
            pd = float(space.marginal(i)[d])
            acc.extend((w[mask] * pd).tolist())
        per.append(math.fsum(acc))
    return InfluenceReport(
        per_coordinate=tuple(per), method="exact", half_width=(0.0,) * n
    )


def wilson_half_width(successes: int, trials: int, z: float = 1.959963984540054) -> float:
    """Half-width of the 95% Wilson score interval."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return half


def influence_mc(
    f: BooleanFunction, space: Space, seed: int, trials: int
) -> InfluenceReport:
    """Unbiased Monte Carlo influence estimates with Wilson half-widths.

    Each trial samples one configuration and tests, per coordinate, every
    alternative value of that coordinate. Randomness is drawn from a
    counter-based generator keyed by the seed, so results depend only on
    (seed, trials).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if space.n != f.n or space.base != f.base:
        raise ValueError("space does not match function arity/alphabet")
    n, base = space.n, space.base
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random((trials, n))
    if isinstance(space, TwoPointSpace):
        digits = (u < np.asarray(space.probs)).astype(np.int64)
    else:
        digits = np.where(
            u < space.p_plus, 2, np.where(u >= 1.0 - space.p_minus, 0, 1)
        ).astype(np.int64)

    powers = base ** np.arange(n, dtype=np.int64)
    if f.is_dense:
        table = f.dense_table()
        ranks = digits @ powers
        vals = table[ranks]
        counts = np.zeros(n, dtype=np.int64)
        for i in range(n):
            flipped = np.zeros(trials, dtype=bool)
            for d in range(base):
                alt = ranks + (d - digits[:, i]) * powers[i]
                flipped |= table[alt] != vals
            counts[i] = int(flipped.sum())
    else:
        lo = 0 if base == 2 else -1
        counts = np.zeros(n, dtype=np.int64)
        for t in range(trials):
            x = tuple(int(d) + lo for d in digits[t])
            v = f(x)
            for i in range(n):
                for d in range(base):
                    if d + lo == x[i]:
                        continue
                    y = x[:i] + (d + lo,) + x[i + 1 :]
                    if f(y) != v:
                        counts[i] += 1
                        break
    per = tuple(c / trials for c in counts)
    hw = tuple(wilson_half_width(int(c), trials) for c in counts)
    return InfluenceReport(per_coordinate=per, method="monte_carlo", half_width=hw)


# ---------------------------------------------------------------------------
# dyadic embedding


@dataclass(frozen=True)
class DyadicEmbedding:
    """Replacement of a p-biased bit by m uniform bits split in binary order.

    The first (1-p) * 2**m blocks of {0,1}^m (reading bit 1 as the most
    significant digit) map to 0; the last p * 2**m map to 1.
    """

    p: Fraction
    m: int

    def __post_init__(self):
        if not (0 < self.p < 1):
            raise ValueError("p must lie strictly in (0,1)")
        if (self.p * 2**self.m).denominator != 1:
            raise ValueError(f"2**{self.m} * {self.p} is not an integer")

    @property
    def boundary_rank(self) -> int:
        return int((1 - self.p) * 2**self.m)

    def bit_value(self, block_rank: int) -> int:
        """0/1 value assigned to the block whose binary reading is block_rank."""
        if not (0 <= block_rank < 2**self.m):
            raise ValueError("block rank out of range")
        return 1 if block_rank >= self.boundary_rank else 0


def _as_fraction(p: Union[float, Fraction, str]) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, str):
        return Fraction(p)
    return Fraction(p)  # floats convert exactly (binary rationals)


def embed_dyadic(p: Union[float, Fraction, str], m: int | None = None) -> DyadicEmbedding:
    """Embedding for a dyadic rational p = a / 2**m.

    With m omitted the minimal bit count is used; an explicit m is accepted
    whenever 2**m * p is an integer. Non-dyadic p is rejected.
    """
    frac = _as_fraction(p)
    if not (0 < frac < 1):
        raise ValueError("p must lie strictly in (0,1)")
    denom = frac.denominator
    if denom & (denom - 1):
        raise ValueError(f"p = {frac} is not a dyadic rational")
    min_m = denom.bit_length() - 1
    if min_m > 30:
        # floats convert exactly, so 0.3 arrives as a/2**54; treat that as
        # non-dyadic rather than building an absurd embedding
        raise ValueError(f"p = {frac} needs {min_m} bits, limit 30")
    if m is None:
        m = min_m
    elif m < min_m or m > 30:
        raise ValueError(f"m must satisfy {min_m} <= m <= 30 for p = {frac}")
    return DyadicEmbedding(p=frac, m=m)


def _block_values(embedding: DyadicEmbedding) -> np.ndarray:
    """0/1 value per block, indexed by the block's big-endian binary reading."""
    size = 1 << embedding.m
    vals = np.zeros(size, dtype=np.uint8)
    vals[embedding.boundary_rank :] = 1
    return vals


def lift_through_embedding(
    f: BooleanFunction, embedding: DyadicEmbedding
) -> BooleanFunction:
    """The function on the uniform cube {0,1}^(n*m) induced by applying the
    embedding to every coordinate of f.

    Global bit rank is little-endian; bits (i-1)m .. im-1 form coordinate i's
    block, read big-endian within the block (bit (i-1)m is the block's most
    significant digit), matching the embedding's binary order.
    """
    if f.base != 2:
        raise ValueError("embedding lifts are defined for two-point functions")
    n, m = f.n, embedding.m
    total_bits = n * m
    if total_bits > 24:
        raise SizeLimitError(f"lifted cube has {total_bits} bits; limit is 24")
    table = f.dense_table()
    size = 1 << total_bits
    ranks = np.arange(size, dtype=np.int64)
    block_vals = _block_values(embedding)
    orig_rank = np.zeros(size, dtype=np.int64)
    for i in range(n):
        block = np.zeros(size, dtype=np.int64)
        for j in range(m):
            bit = (ranks >> (i * m + j)) & 1
            block = (block << 1) | bit
        orig_rank |= block_vals[block].astype(np.int64) << i
    lifted = table[orig_rank]
    return BooleanFunction(
        n=total_bits, base=2, table=lifted, name=f"{f.name or 'f'}@m{m}"
    )


def w_embedded(f: BooleanFunction, embedding: DyadicEmbedding) -> float:
    """Total influence, on the uniform m-cube, of a single biased coordinate
    pushed through the embedding. f must have arity 1."""
    if f.n != 1:
        raise ValueError("w_embedded expects a single-coordinate function")
    lifted = lift_through_embedding(f, embedding)
    space = TwoPointSpace.uniform(lifted.n, 0.5)
    return influence_exact(lifted, space).total
