"""{0,1}-valued functions on product spaces: dense and oracle representations,
monotonicity checking, coordinate symmetry groups, monotone enumeration, and
the named event families used throughout the experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import SizeLimitError
from .spaces import (
    Configuration,
    Space,
    ThreePointSpace,
    TwoPointSpace,
    config_rank,
    digit_matrix,
)

__all__ = [
    "BooleanFunction",
    "SymmetryGroup",
    "evaluate",
    "is_increasing",
    "symmetry_order",
    "enumerate_monotone",
    "dictator",
    "majority",
    "tribes",
    "cyclic_run",
    "at_least_k",
    "from_predicate",
    "serialize_table",
    "parse_table",
    "builtin_function",
]

# enumerate_monotone refuses anything beyond these arities (Dedekind growth)
MAX_MONOTONE_N = {2: 4, 3: 3}


@dataclass(frozen=True)
class BooleanFunction:
    """A {0,1}-valued function of n coordinates over an alphabet of `base` values.

    Dense functions carry a truth table indexed by configuration rank
    (little-endian, coordinate 1 least significant). Oracle functions carry a
    pure callback; operations that need exhaustive access refuse them.
    """

    n: int
    base: int
    table: Optional[np.ndarray] = None
    oracle: Optional[Callable[[tuple[int, ...]], int]] = None
    name: str = ""

    def __post_init__(self):
        if self.base not in (2, 3):
            raise ValueError("base must be 2 or 3")
        if (self.table is None) == (self.oracle is None):
            raise ValueError("exactly one of table/oracle must be given")
        if self.table is not None:
            t = np.asarray(self.table, dtype=np.uint8)
            if t.shape != (self.base**self.n,):
                raise ValueError(
                    f"truth table must have length {self.base ** self.n}, got {t.shape}"
                )
            if not np.isin(t, (0, 1)).all():
                raise ValueError("truth table entries must be 0 or 1")
            t.setflags(write=False)
            object.__setattr__(self, "table", t)

    @property
    def is_dense(self) -> bool:
        return self.table is not None

    def dense_table(self) -> np.ndarray:
        if self.table is None:
            raise SizeLimitError(
                f"{self.name or 'function'} is oracle-backed; exhaustive "
                "operations require a dense truth table"
            )
        return self.table

    @property
    def alphabet(self) -> tuple[int, ...]:
        return (0, 1) if self.base == 2 else (-1, 0, 1)

    def __call__(self, x) -> int:
        values = tuple(x.values if isinstance(x, Configuration) else x)
        if len(values) != self.n:
            raise ValueError(f"arity mismatch: expected {self.n}, got {len(values)}")
        if self.table is not None:
            lo = self.alphabet[0]
            r = 0
            for v in reversed(values):
                d = int(v) - lo
                if not (0 <= d < self.base):
                    raise ValueError(f"value {v} not in alphabet {self.alphabet}")
                r = r * self.base + d
            return int(self.table[r])
        return int(self.oracle(values))


def evaluate(f: BooleanFunction, x) -> int:
    """Evaluate f at configuration x. Deterministic; raises on arity mismatch."""
    return f(x)


def _space_for(f: BooleanFunction) -> Space:
    """A throwaway space with f's alphabet, used for rank bookkeeping only."""
    if f.base == 2:
        return TwoPointSpace.uniform(f.n, 0.5)
    return ThreePointSpace(f.n, 1 / 3, 1 / 3)


def from_predicate(
    n: int, base: int, pred: Callable[[tuple[int, ...]], bool], name: str = ""
) -> BooleanFunction:
    """Materialize a predicate over all base**n configurations into a dense function."""
    if base**n > (1 << 22):
        raise SizeLimitError("predicate too large to materialize")
    lo = 0 if base == 2 else -1
    digits = digit_matrix(base, n)
    table = np.fromiter(
        (1 if pred(tuple(int(d) + lo for d in row)) else 0 for row in digits),
        dtype=np.uint8,
        count=base**n,
    )
    return BooleanFunction(n=n, base=base, table=table, name=name)


# ---------------------------------------------------------------------------
# monotonicity


def is_increasing(f: BooleanFunction, space: Space | None = None):
    """Exhaustively test whether f is increasing for the coordinatewise order.

    Returns (True, None) or (False, (x, x_prime)) with x <= x_prime,
    f(x) = 1, f(x_prime) = 0. Only covering pairs (one coordinate raised by
    one step) need checking; any violation induces one along a covering edge.
    """
    table = f.dense_table()
    if space is not None and (space.n != f.n or space.base != f.base):
        raise ValueError("space does not match function arity/alphabet")
    base, n = f.base, f.n
    shaped = table.reshape((base,) * n) if n else table.reshape(())
    for i in range(n):
        axis = n - 1 - i  # axis for coordinate i+1 under C-order reshape
        lower = np.moveaxis(shaped, axis, 0)[:-1]
        upper = np.moveaxis(shaped, axis, 0)[1:]
        bad = np.nonzero(lower > upper)
        if bad[0].size:
            idx = tuple(int(b[0]) for b in bad)
            # idx is (coordinate value index, rest...) in moved-axis layout
            step, rest = idx[0], idx[1:]
            full = list(rest[:axis]) + [step] + list(rest[axis:])
            lo = f.alphabet[0]
            x = [d + lo for d in reversed(full)]
            x_prime = list(x)
            x_prime[i] += 1
            return False, (Configuration(tuple(x)), Configuration(tuple(x_prime)))
    return True, None


# ---------------------------------------------------------------------------
# symmetry


def _orbits_from_generators(n: int, generators: Sequence[Sequence[int]]) -> list[list[int]]:
    # orbits of the generated group = connected components under all generators
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in generators:
        for i in range(n):
            ra, rb = find(i), find(g[i])
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


@dataclass(frozen=True)
class SymmetryGroup:
    """A coordinate permutation group given by generators (0-based images)."""

    n: int
    generators: tuple[tuple[int, ...], ...]
    orbits: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        gens = tuple(tuple(int(v) for v in g) for g in self.generators)
        for g in gens:
            if sorted(g) != list(range(self.n)):
                raise ValueError(f"generator {g} is not a permutation of range({self.n})")
        object.__setattr__(self, "generators", gens)
        orbits = tuple(tuple(o) for o in _orbits_from_generators(self.n, gens))
        object.__setattr__(self, "orbits", orbits)

    @classmethod
    def trivial(cls, n: int) -> "SymmetryGroup":
        return cls(n, ())

    @classmethod
    def cyclic(cls, n: int) -> "SymmetryGroup":
        """Generated by the full cyclic shift i -> i+1 (mod n)."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(n, (tuple((i + 1) % n for i in range(n)),))

    @property
    def min_orbit_size(self) -> int:
        if not self.orbits:
            return 0
        return min(len(o) for o in self.orbits)


def _permute_table(f: BooleanFunction, perm: Sequence[int]) -> np.ndarray:
    """Truth table of x -> f(y) with y[i] = x[perm[i]]. For a preservation
    check the direction is immaterial: f is fixed by g iff fixed by g^-1."""
    base, n = f.base, f.n
    shaped = f.dense_table().reshape((base,) * n)
    # axis n-1-i holds coordinate i+1; sending coordinate i to perm[i] moves
    # axis n-1-i to axis n-1-perm[i]
    src = [n - 1 - i for i in range(n)]
    dst = [n - 1 - perm[i] for i in range(n)]
    return np.moveaxis(shaped, src, dst).reshape(-1)


def symmetry_order(f: BooleanFunction, group: SymmetryGroup) -> int:
    """Verify every generator preserves f, then return the smallest orbit size.

    Raises ValueError naming the offending generator and a witness
    configuration when f is not preserved.
    """
    if group.n != f.n:
        raise ValueError("group degree does not match function arity")
    table = f.dense_table()
    for g in group.generators:
        permuted = _permute_table(f, g)
        diff = np.nonzero(permuted != table)[0]
        if diff.size:
            space = _space_for(f)
            from .spaces import rank_config

            witness = rank_config(space, int(diff[0]))
            raise ValueError(
                f"function not preserved by generator {g}: differs at {witness.values}"
            )
    if f.n == 0:
        return 1
    return group.min_orbit_size if group.orbits else 0


# ---------------------------------------------------------------------------
# monotone enumeration


def enumerate_monotone(
    space: Space, n: int | None = None, include_constants: bool = True
) -> Iterator[BooleanFunction]:
    """Yield every increasing {0,1}-valued function on the space exactly once.

    Walks configurations in a linear extension (rank order is one: every
    strict predecessor has smaller rank) and branches only where the value is
    not forced by already-assigned predecessors.
    """
    if n is None:
        n = space.n
    base = space.base
    limit = MAX_MONOTONE_N[base]
    if n > limit:
        raise SizeLimitError(
            f"monotone enumeration limited to n <= {limit} for base {base}"
        )
    size = base**n
    digits = digit_matrix(base, n)

    # immediate predecessors: lower one coordinate by one step
    preds: list[list[int]] = [[] for _ in range(size)]
    for r in range(size):
        for i in range(n):
            if digits[r, i] > 0:
                preds[r].append(r - base**i)

    assignment = np.zeros(size, dtype=np.uint8)
    out_count = 0

    def rec(r: int) -> Iterator[np.ndarray]:
        if r == size:
            yield assignment.copy()
            return
        forced_one = any(assignment[p] for p in preds[r])
        if forced_one:
            assignment[r] = 1
            yield from rec(r + 1)
        else:
            for v in (0, 1):
                assignment[r] = v
                yield from rec(r + 1)
        assignment[r] = 0

    for table in rec(0):
        if not include_constants and (table.all() or not table.any()):
            continue
        out_count += 1
        yield BooleanFunction(n=n, base=base, table=table, name=f"monotone#{out_count}")


# ---------------------------------------------------------------------------
# named families


def dictator(n: int, base: int = 2) -> BooleanFunction:
    """1 iff coordinate 1 takes its maximal value."""
    top = max((0, 1) if base == 2 else (-1, 0, 1))
    return from_predicate(n, base, lambda x: x[0] == top, name="dictator")


def majority(n: int, base: int = 2) -> BooleanFunction:
    """1 iff the signed sum of coordinates is positive.

    On {0,1} coordinates count as +-1 via 2x-1, so odd n gives the usual
    majority; ties (even n, or balanced three-point sums) give 0.
    """

    def pred(x):
        if base == 2:
            return sum(2 * v - 1 for v in x) > 0
        return sum(x) > 0

    return from_predicate(n, base, pred, name=f"majority{n}")


def tribes(b: int, w: int, base: int = 2) -> BooleanFunction:
    """OR of b disjoint ANDs of width w (arity b*w). Two-point only."""
    if base != 2:
        raise ValueError("tribes is defined on two-point spaces")
    if b < 1 or w < 1:
        raise ValueError("tribes needs b >= 1 and w >= 1")

    def pred(x):
        return any(all(x[t * w + j] == 1 for j in range(w)) for t in range(b))

    return from_predicate(b * w, 2, pred, name=f"tribes({b},{w})")


def cyclic_run(n: int, run: int, base: int = 2) -> BooleanFunction:
    """1 iff some run of `run` cyclically consecutive coordinates all sit at the
    maximal alphabet value. Symmetric under the full cyclic shift."""
    if not (1 <= run <= n):
        raise ValueError("need 1 <= run <= n")
    top = max((0, 1) if base == 2 else (-1, 0, 1))

    def pred(x):
        return any(
            all(x[(s + j) % n] == top for j in range(run)) for s in range(n)
        )

    return from_predicate(n, base, pred, name=f"cyclic_run({run})")


def at_least_k(n: int, k: int, base: int = 2) -> BooleanFunction:
    """1 iff at least k coordinates take the maximal alphabet value."""
    if k < 0:
        raise ValueError("k must be >= 0")
    top = max((0, 1) if base == 2 else (-1, 0, 1))
    return from_predicate(
        n, base, lambda x: sum(1 for v in x if v == top) >= k, name=f"at_least_k({k})"
    )


# ---------------------------------------------------------------------------
# serialization

_HEADER = "b{base}n{n}:"


def serialize_table(f: BooleanFunction) -> str:
    """Hex-packed truth table with an alphabet/arity header, e.g. 'b2n3:e8'.

    Bit r of the packed integer is f at configuration rank r.
    """
    table = f.dense_table()
    packed = 0
    for r, v in enumerate(table):
        if v:
            packed |= 1 << r
    return _HEADER.format(base=f.base, n=f.n) + format(packed, "x")


def parse_table(text: str) -> BooleanFunction:
    """Inverse of serialize_table."""
    text = text.strip()
    try:
        header, hexpart = text.split(":", 1)
        if not header.startswith("b"):
            raise ValueError
        base_s, n_s = header[1:].split("n", 1)
        base, n = int(base_s), int(n_s)
        packed = int(hexpart, 16) if hexpart else 0
    except ValueError as exc:
        raise ValueError(f"malformed truth-table string {text!r}") from exc
    size = base**n
    if packed >> size:
        raise ValueError("packed table has bits beyond base**n entries")
    table = np.fromiter(((packed >> r) & 1 for r in range(size)), dtype=np.uint8, count=size)
    return BooleanFunction(n=n, base=base, table=table, name="parsed")


def builtin_function(spec: str, n: int, base: int) -> BooleanFunction:
    """Resolve a CLI function spec: a built-in keyword (possibly with
    parenthesized integer arguments) or a serialized truth table."""
    spec = spec.strip()
    if spec.startswith("b") and ":" in spec:
        return parse_table(spec)
    name, args = spec, []
    if "(" in spec and spec.endswith(")"):
        name, argpart = spec[:-1].split("(", 1)
        args = [int(a) for a in argpart.split(",")] if argpart.strip() else []
    name = name.strip()
    if name == "dictator":
        return dictator(n, base)
    if name == "majority":
        return majority(n, base)
    if name == "tribes":
        if len(args) != 2:
            raise ValueError("tribes takes two arguments: tribes(b,w)")
        fn = tribes(args[0], args[1], base)
        if fn.n != n:
            raise ValueError(f"tribes({args[0]},{args[1]}) has arity {fn.n}, not {n}")
        return fn
    if name == "cyclic_run":
        if len(args) != 1:
            raise ValueError("cyclic_run takes one argument: cyclic_run(L)")
        return cyclic_run(n, args[0], base)
    if name == "at_least_k":
        if len(args) != 1:
            raise ValueError("at_least_k takes one argument: at_least_k(k)")
        return at_least_k(n, args[0], base)
    raise ValueError(f"unknown function spec {spec!r}")
