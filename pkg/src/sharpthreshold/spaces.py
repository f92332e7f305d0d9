"""Product probability spaces: the weighted cube, its non-uniform variant,
and the three-point space on {-1,0,1}^n.

Configurations are ranked in mixed-radix little-endian order (coordinate 1 is
the least significant digit), so truth tables built on top of these spaces are
portable across implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import SizeLimitError

__all__ = [
    "TwoPointSpace",
    "ThreePointSpace",
    "Configuration",
    "Space",
    "point_mass",
    "sample",
    "perturb",
    "all_configs",
    "measure_vector",
    "digit_matrix",
    "config_rank",
    "rank_config",
]

# Exact enumeration refuses anything bigger than this many configurations.
MAX_ENUM_STATES = 1 << 22


def _check_prob(p: float, name: str) -> None:
    if not (0.0 < p < 1.0):
        raise ValueError(f"{name} must lie strictly in (0,1), got {p!r}")


@dataclass(frozen=True)
class TwoPointSpace:
    """Product of n two-point spaces; coordinate i equals 1 with probability probs[i]."""

    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        for i, p in enumerate(self.probs):
            _check_prob(p, f"probs[{i}]")

    @classmethod
    def uniform(cls, n: int, p: float) -> "TwoPointSpace":
        """The weighted cube: all n coordinates share the same probability p."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        return cls((float(p),) * n)

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def base(self) -> int:
        return 2

    @property
    def alphabet(self) -> tuple[int, ...]:
        return (0, 1)

    def marginal(self, i: int) -> np.ndarray:
        """Probability vector over the alphabet (0, 1) for coordinate i (0-based)."""
        p = self.probs[i]
        return np.array([1.0 - p, p])

    def is_uniform_p(self) -> bool:
        return len(set(self.probs)) <= 1


@dataclass(frozen=True)
class ThreePointSpace:
    """Product space on {-1,0,1}^n; each coordinate is +1 with probability
    p_plus, -1 with probability p_minus, 0 otherwise."""

    n: int
    p_minus: float
    p_plus: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        _check_prob(self.p_minus, "p_minus")
        _check_prob(self.p_plus, "p_plus")
        if self.p_minus + self.p_plus >= 1.0:
            raise ValueError(
                f"p_minus + p_plus must be < 1, got {self.p_minus + self.p_plus}"
            )

    @property
    def pmax(self) -> float:
        return max(self.p_minus, self.p_plus)

    @property
    def base(self) -> int:
        return 3

    @property
    def alphabet(self) -> tuple[int, ...]:
        return (-1, 0, 1)

    def marginal(self, i: int) -> np.ndarray:
        """Probability vector over the alphabet (-1, 0, 1); same for every coordinate."""
        return np.array([self.p_minus, 1.0 - self.p_minus - self.p_plus, self.p_plus])


Space = Union[TwoPointSpace, ThreePointSpace]


@dataclass(frozen=True)
class Configuration:
    """One point of a product space, stored as the raw coordinate values."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def leq(self, other: "Configuration") -> bool:
        """Coordinatewise partial order: self <= other iff every coordinate is."""
        if len(self.values) != len(other.values):
            raise ValueError("configurations have different arity")
        return all(a <= b for a, b in zip(self.values, other.values))


def _as_values(x) -> tuple[int, ...]:
    if isinstance(x, Configuration):
        return x.values
    return tuple(int(v) for v in x)


def _validate_values(space: Space, values: Sequence[int]) -> None:
    if len(values) != space.n:
        raise ValueError(f"expected {space.n} coordinates, got {len(values)}")
    alpha = set(space.alphabet)
    for v in values:
        if v not in alpha:
            raise ValueError(f"value {v} not in alphabet {space.alphabet}")


def point_mass(space: Space, x) -> float:
    """Probability of the single configuration x under the product measure."""
    values = _as_values(x)
    _validate_values(space, values)
    lo = space.alphabet[0]
    out = 1.0
    for i, v in enumerate(values):
        out *= float(space.marginal(i)[v - lo])
    return out


def config_rank(space: Space, x) -> int:
    """Mixed-radix little-endian rank of x (coordinate 1 least significant)."""
    values = _as_values(x)
    _validate_values(space, values)
    lo = space.alphabet[0]
    r = 0
    for v in reversed(values):
        r = r * space.base + (v - lo)
    return r


def rank_config(space: Space, rank: int) -> Configuration:
    """Inverse of config_rank."""
    if not (0 <= rank < space.base**space.n):
        raise ValueError(f"rank {rank} out of range")
    lo = space.alphabet[0]
    vals = []
    for _ in range(space.n):
        rank, d = divmod(rank, space.base)
        vals.append(d + lo)
    return Configuration(tuple(vals))


def digit_matrix(base: int, n: int) -> np.ndarray:
    """(base**n, n) array of digits; row r holds the digits of rank r,
    column i being coordinate i+1. Digits run 0..base-1."""
    if base**n > MAX_ENUM_STATES:
        raise SizeLimitError(f"{base}**{n} states exceed enumeration limit")
    ranks = np.arange(base**n)
    cols = [(ranks // base**i) % base for i in range(n)]
    return np.stack(cols, axis=1) if n else np.zeros((1, 0), dtype=int)


def all_configs(space: Space) -> Iterator[Configuration]:
    """All configurations in rank order."""
    lo = space.alphabet[0]
    for row in digit_matrix(space.base, space.n):
        yield Configuration(tuple(int(d) + lo for d in row))


def measure_vector(space: Space) -> np.ndarray:
    """Point masses of every configuration, indexed by rank.

    Built by Kronecker products of the per-coordinate marginals, so the float
    value of each mass is the same product the naive definition would give.
    """
    if space.base**space.n > MAX_ENUM_STATES:
        raise SizeLimitError("space too large to enumerate")
    out = np.ones(1)
    for i in range(space.n):
        # coordinate i+1 varies faster than i+2: new factor goes on the left
        out = np.kron(space.marginal(i), out)
    return out


def sample(space: Space, seed: int, count: int) -> list[Configuration]:
    """Draw `count` i.i.d. configurations; deterministic in (seed, count)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random((count, space.n))
    if isinstance(space, TwoPointSpace):
        vals = (u < np.asarray(space.probs)).astype(int)
    else:
        # [0, p_plus) -> +1, [1 - p_minus, 1) -> -1, else 0; regions are
        # disjoint because p_minus + p_plus < 1
        vals = np.where(u < space.p_plus, 1, np.where(u >= 1.0 - space.p_minus, -1, 0))
    return [Configuration(tuple(int(v) for v in row)) for row in vals]


def perturb(space: ThreePointSpace, h: float) -> ThreePointSpace:
    """Shift mass from -1 to +1: (p_minus, p_plus) -> (p_minus - h, p_plus + h)."""
    if not isinstance(space, ThreePointSpace):
        raise TypeError("perturb is defined on three-point spaces")
    if h < 0:
        raise ValueError(f"h must be nonnegative, got {h}")
    if h == 0:
        return space
    r_minus = space.p_minus - h
    r_plus = space.p_plus + h
    if r_minus <= 0 or r_plus >= 1:
        raise ValueError(
            f"h={h} leaves the admissible range: would give "
            f"(p_minus, p_plus)=({r_minus}, {r_plus})"
        )
    return ThreePointSpace(space.n, r_minus, r_plus)


def total_mass(space: Space) -> float:
    """Sum of all point masses, accumulated with compensated summation."""
    return math.fsum(measure_vector(space).tolist())
