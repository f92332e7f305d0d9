"""Walsh analysis on the uniform cube, level spectra of block-embedded
functions, spectral concentration reports, and the discrete-derivative norms.

Characters are chi_S(x) = prod_{i in S} (1 - 2 x_i), coefficients indexed by
the bitmask of S (bit i-1 set means coordinate i belongs to S). Squared
coefficients of a 0/1 table are dyadic rationals, so fsum accumulation keeps
Parseval discrepancies at the last-ulp level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .boolfn import BooleanFunction
from .errors import SizeLimitError
from .influence import DyadicEmbedding, InfluenceReport, lift_through_embedding
from .spaces import TwoPointSpace

__all__ = [
    "ParsevalReport",
    "BlockSpectrum",
    "ConcentrationReport",
    "DeltaNorms",
    "walsh_transform",
    "inverse_walsh",
    "parseval_check",
    "block_spectrum",
    "concentration_report",
    "delta_norms",
]

MAX_TRANSFORM_BITS = 24

_POPCOUNT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


def _popcount(ranks: np.ndarray) -> np.ndarray:
    r = ranks.astype(np.int64)
    return _POPCOUNT16[r & 0xFFFF] + _POPCOUNT16[(r >> 16) & 0xFFFF]


def _as_values(f: Union[BooleanFunction, np.ndarray, Sequence[float]]) -> np.ndarray:
    if isinstance(f, BooleanFunction):
        if f.base != 2:
            raise ValueError("Walsh analysis is defined on two-point alphabets")
        values = f.dense_table().astype(np.float64)
    else:
        values = np.asarray(f, dtype=np.float64)
    size = values.size
    if size == 0 or size & (size - 1):
        raise ValueError("value table length must be a power of two")
    if size > (1 << MAX_TRANSFORM_BITS):
        raise SizeLimitError(f"transform limited to {MAX_TRANSFORM_BITS} bits")
    return values


def walsh_transform(f: Union[BooleanFunction, np.ndarray, Sequence[float]]) -> np.ndarray:
    """Coefficients of f on the uniform cube: out[S] = E[f * chi_S].

    In-place butterfly, O(N 2^N) for N bits.
    """
    values = _as_values(f).copy()
    n = values.size
    h = 1
    while h < n:
        for start in range(0, n, h * 2):
            a = values[start : start + h]
            b = values[start + h : start + 2 * h]
            a[:], b[:] = a + b, a - b
        h *= 2
    return values / n


def inverse_walsh(coeffs: Union[np.ndarray, Sequence[float]]) -> np.ndarray:
    """Value table from a coefficient table; inverse of walsh_transform."""
    coeffs = _as_values(coeffs)
    return walsh_transform(coeffs) * coeffs.size


@dataclass(frozen=True)
class ParsevalReport:
    t: float
    lhs: float  # t(1-t)
    rhs: float  # sum of squared coefficients over nonempty S
    error: float

    @property
    def ok(self) -> bool:
        return self.error <= 1e-12


def parseval_check(
    f: BooleanFunction, where: Union[TwoPointSpace, DyadicEmbedding, None] = None
) -> ParsevalReport:
    """Check t(1-t) against the nonconstant squared-coefficient mass.

    `where` may be omitted or a uniform two-point space (transform f as-is),
    or a DyadicEmbedding (lift every coordinate first, so the check runs on
    the uniform cube that represents V_n(p))."""
    if isinstance(where, DyadicEmbedding):
        g = lift_through_embedding(f, where)
    else:
        if isinstance(where, TwoPointSpace) and any(p != 0.5 for p in where.probs):
            raise ValueError(
                "direct Walsh analysis needs the uniform cube; pass the "
                "embedding for biased p"
            )
        g = f
    table = g.dense_table()
    coeffs = walsh_transform(table)
    t = float(table.mean())
    rhs = math.fsum((coeffs[1:] ** 2).tolist())
    lhs = t * (1.0 - t)
    return ParsevalReport(t=t, lhs=lhs, rhs=rhs, error=abs(lhs - rhs))


@dataclass(frozen=True)
class BlockSpectrum:
    n: int  # coordinate blocks
    m: int  # bits per block
    t: float  # mean of the function
    weights_by_level: tuple[float, ...]  # index s = total degree, length n*m + 1

    def __post_init__(self):
        if len(self.weights_by_level) != self.n * self.m + 1:
            raise ValueError("level table length must be n*m + 1")
        for w in self.weights_by_level:
            if w < -1e-15:
                raise ValueError("negative spectral weight")

    @property
    def weight_nonconstant(self) -> float:
        return math.fsum(self.weights_by_level[1:])

    def mass_at(self, levels) -> float:
        return math.fsum(self.weights_by_level[s] for s in levels)


def block_spectrum(f: BooleanFunction, embedding: DyadicEmbedding) -> BlockSpectrum:
    """Squared-coefficient mass by total degree after embedding every
    coordinate of f into m uniform bits."""
    lifted = lift_through_embedding(f, embedding)
    coeffs = walsh_transform(lifted.dense_table())
    sq = coeffs**2
    levels = _popcount(np.arange(coeffs.size))
    total_bits = f.n * embedding.m
    by_level = [
        math.fsum(sq[levels == s].tolist()) for s in range(total_bits + 1)
    ]
    t = float(lifted.dense_table().mean())
    return BlockSpectrum(
        n=f.n, m=embedding.m, t=t, weights_by_level=tuple(by_level)
    )


@dataclass(frozen=True)
class ConcentrationReport:
    c1_hat: float
    c2_hat: float
    degenerate: bool
    level_cap: float  # degree bound: levels 1 <= s <= level_cap satisfy the first criterion
    decay_rhs: float  # levels with s * 3**-s <= decay_rhs satisfy the second
    mass_level: float
    mass_decay: float
    mass_both: float
    half_variance: float
    witness_level: Optional[int]  # smallest s >= 1 with positive weight meeting both

    @property
    def level_exceeds_half(self) -> bool:
        return self.mass_level > self.half_variance

    @property
    def decay_exceeds_half(self) -> bool:
        return self.mass_decay > self.half_variance

    @property
    def both_exceed_half(self) -> bool:
        return self.mass_both > self.half_variance


def concentration_report(
    spectrum: BlockSpectrum,
    influences: InfluenceReport,
    t: float,
    p: float,
    c1_hat: float,
    c2_hat: float,
) -> ConcentrationReport:
    """Where the nonconstant spectral mass sits relative to two candidate
    cutoffs: a degree cap proportional to the total influence, and a decay
    condition s * 3**-s below a multiple of sum_k delta_k^(3/2).

    delta_k are the biased-cube influences of the unlifted function. A
    degenerate mean (t in {0,1}) yields an empty report.
    """
    if c1_hat <= 0 or c2_hat <= 0:
        raise ValueError("candidate constants must be positive")
    if not (0 < p < 1):
        raise ValueError("p must lie in (0,1)")
    if t <= 0.0 or t >= 1.0:
        return ConcentrationReport(
            c1_hat=c1_hat, c2_hat=c2_hat, degenerate=True, level_cap=0.0,
            decay_rhs=0.0, mass_level=0.0, mass_decay=0.0, mass_both=0.0,
            half_variance=0.0, witness_level=None,
        )
    variance = t * (1.0 - t)
    deltas = influences.per_coordinate
    total = influences.total
    delta_32 = math.fsum(d**1.5 for d in deltas)
    level_cap = 3.0 * c1_hat / variance * p * math.log(1.0 / p) * total
    decay_rhs = delta_32 / (c2_hat * variance)
    top = spectrum.n * spectrum.m
    ok_level = [1 <= s <= level_cap for s in range(top + 1)]
    ok_decay = [s >= 1 and s * 3.0**-s <= decay_rhs for s in range(top + 1)]
    w = spectrum.weights_by_level
    mass_level = math.fsum(w[s] for s in range(top + 1) if ok_level[s])
    mass_decay = math.fsum(w[s] for s in range(top + 1) if ok_decay[s])
    mass_both = math.fsum(
        w[s] for s in range(top + 1) if ok_level[s] and ok_decay[s]
    )
    witness = None
    for s in range(1, top + 1):
        if ok_level[s] and ok_decay[s] and w[s] > 1e-15:
            witness = s
            break
    return ConcentrationReport(
        c1_hat=c1_hat, c2_hat=c2_hat, degenerate=False, level_cap=level_cap,
        decay_rhs=decay_rhs, mass_level=mass_level, mass_decay=mass_decay,
        mass_both=mass_both, half_variance=variance / 2.0, witness_level=witness,
    )


@dataclass(frozen=True)
class DeltaNorms:
    l2: tuple[float, ...]
    l1: tuple[float, ...]

    def __post_init__(self):
        if len(self.l2) != len(self.l1):
            raise ValueError("norm tuples must have equal length")
        for a, b in zip(self.l1, self.l2):
            if a > b + 1e-12:  # Jensen on a probability space
                raise ValueError(f"l1 norm {a} exceeds l2 norm {b}")

    @property
    def n(self) -> int:
        return len(self.l2)


def delta_norms(
    f: Union[BooleanFunction, np.ndarray, Sequence[float]], space: TwoPointSpace
) -> DeltaNorms:
    """Exact L2 and L1 norms of the per-coordinate discrete derivatives.

    The derivative at x scales f(x) - f(flip_i x) by 1-p_i when x_i = 1 and
    by p_i when x_i = 0. Adding a constant to f leaves every norm unchanged,
    so an indicator and its centered version agree.
    """
    if isinstance(f, BooleanFunction):
        if f.base != 2:
            raise ValueError("derivative norms are defined on two-point spaces")
        if f.n != space.n:
            raise ValueError("space does not match function arity")
        values = f.dense_table().astype(np.float64)
    else:
        values = np.asarray(f, dtype=np.float64)
        if values.size != 2**space.n:
            raise ValueError("value table length must be 2**n")
    n = space.n
    if values.size > (1 << MAX_TRANSFORM_BITS):
        raise SizeLimitError("function too large for exact derivative norms")
    l2, l1 = [], []
    for i in range(n):
        shaped = values.reshape((2,) * n)
        moved = np.moveaxis(shaped, n - 1 - i, 0).reshape(2, -1)
        gap = np.abs(moved[1] - moved[0])
        pi = float(space.probs[i])
        w_rest = np.ones(1)
        for j in range(n):
            if j != i:
                w_rest = np.kron(space.marginal(j), w_rest)
        # mass with x_i = 0 carries weight (1-p_i) and scale p_i; vice versa at 1
        sq = w_rest * gap**2 * ((1 - pi) * pi**2 + pi * (1 - pi) ** 2)
        ab = w_rest * gap * (2 * pi * (1 - pi))
        l2.append(math.sqrt(math.fsum(sq.tolist())))
        l1.append(math.fsum(ab.tolist()))
    return DeltaNorms(l2=tuple(l2), l1=tuple(l1))
