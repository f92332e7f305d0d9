import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpthreshold.boolfn import (
    SymmetryGroup,
    at_least_k,
    dictator,
    enumerate_monotone,
    majority,
    tribes,
)
from sharpthreshold.influence import (
    DyadicEmbedding,
    embed_dyadic,
    influence_exact,
    influence_exact_symmetric,
    influence_mc,
    influence_onesided,
    lift_through_embedding,
    w_embedded,
    wilson_half_width,
)
from sharpthreshold.spaces import ThreePointSpace, TwoPointSpace


def reference_influence_two_point(f, n, p):
    """Raw definition with Fraction weights: flip each coordinate, check."""
    out = []
    for k in range(n):
        total = Fraction(0)
        for x in itertools.product((0, 1), repeat=n):
            y = list(x)
            y[k] ^= 1
            if f(x) != f(tuple(y)):
                w = Fraction(1)
                for xi in x:
                    w *= p if xi else 1 - p
                total += w
        out.append(total)
    return out


def reference_influence_three_point(f, n, pm, pp):
    values = (-1, 0, 1)
    pr = {-1: pm, 0: 1 - pm - pp, 1: pp}
    out = []
    for k in range(n):
        total = Fraction(0)
        for x in itertools.product(values, repeat=n):
            alts = (f(x[:k] + (v,) + x[k + 1:]) for v in values if v != x[k])
            if any(a != f(x) for a in alts):
                w = Fraction(1)
                for xi in x:
                    w *= pr[xi]
                total += w
        out.append(total)
    return out


@pytest.mark.parametrize(
    "fn,p,expect",
    [
        (majority(3), Fraction(1, 4), (Fraction(3, 8),) * 3),
        (majority(3), Fraction(1, 2), (Fraction(1, 2),) * 3),
        (tribes(2, 2), Fraction(1, 2), (Fraction(3, 8),) * 4),
        (tribes(2, 2), Fraction(1, 4), (Fraction(15, 64),) * 4),
        (dictator(3), Fraction(1, 8), (1, 0, 0)),
    ],
)
def test_exact_influence_against_reference(fn, p, expect):
    assert reference_influence_two_point(fn, fn.n, p) == list(map(Fraction, expect))
    space = TwoPointSpace.uniform(fn.n, float(p))
    report = influence_exact(fn, space)
    for got, want in zip(report.per_coordinate, expect):
        assert got == pytest.approx(float(want), abs=1e-15)
    assert report.half_width == (0.0,) * fn.n
    assert report.max_influence == max(report.per_coordinate)
    assert report.total == pytest.approx(float(sum(map(Fraction, expect))), abs=1e-14)


def test_exact_influence_three_point_against_reference():
    event = at_least_k(3, 1, base=3)
    ref = reference_influence_three_point(
        event, 3, Fraction(3, 10), Fraction(1, 10)
    )
    assert ref == [Fraction(81, 100)] * 3
    space = ThreePointSpace(n=3, p_minus=0.3, p_plus=0.1)
    report = influence_exact(event, space)
    for got in report.per_coordinate:
        assert got == pytest.approx(0.81, abs=1e-14)


def test_exact_influence_nonuniform_probabilities():
    f = tribes(2, 2)
    probs = (Fraction(1, 8), Fraction(1, 2), Fraction(1, 4), Fraction(3, 8))

    # per-coordinate probabilities need a custom weight in the reference
    def ref_nonuniform(k):
        total = Fraction(0)
        for x in itertools.product((0, 1), repeat=4):
            y = list(x)
            y[k] ^= 1
            if f(x) != f(tuple(y)):
                w = Fraction(1)
                for xi, pi in zip(x, probs):
                    w *= pi if xi else 1 - pi
                total += w
        return total

    space = TwoPointSpace(tuple(float(p) for p in probs))
    report = influence_exact(f, space)
    for k in range(4):
        assert report.per_coordinate[k] == pytest.approx(
            float(ref_nonuniform(k)), abs=1e-14
        )


def test_symmetric_influence_bitwise_equal_on_cyclic_events():
    for n in (3, 4):
        event = at_least_k(n, 1, base=3)
        space = ThreePointSpace(n=n, p_minus=0.3, p_plus=0.1)
        plain = influence_exact(event, space)
        fast = influence_exact_symmetric(event, space, SymmetryGroup.cyclic(n))
        assert fast.per_coordinate == plain.per_coordinate  # bit for bit
        assert len(set(plain.per_coordinate)) == 1


def test_onesided_equals_twosided_for_increasing():
    # spec'd coincidence: the one-sided pivotal union carries the same mass
    for space in (
        TwoPointSpace.uniform(3, 0.25),
        ThreePointSpace(n=2, p_minus=0.2, p_plus=0.3),
    ):
        for f in enumerate_monotone(space, include_constants=False):
            two = influence_exact(f, space)
            one = influence_onesided(f, space)
            for a, b in zip(one.per_coordinate, two.per_coordinate):
                assert a == pytest.approx(b, abs=1e-12)


def test_onesided_union_on_nonmonotone_function():
    from sharpthreshold.boolfn import from_predicate

    parity = from_predicate(2, 2, lambda x: sum(x) % 2 == 1)
    space = TwoPointSpace.uniform(2, 0.25)
    one = influence_onesided(parity, space)
    two = influence_exact(parity, space)
    # only the aligned flips count: pivotal set {(0,0),(1,0)} has mass 3/4
    assert one.per_coordinate == pytest.approx((0.75, 0.75), abs=1e-15)
    assert two.per_coordinate == pytest.approx((1.0, 1.0), abs=1e-15)
    assert one.per_coordinate[0] < two.per_coordinate[0]


def test_wilson_half_width_reference_values():
    assert wilson_half_width(50, 100) == pytest.approx(
        0.09616846963400436, abs=1e-15
    )
    assert wilson_half_width(0, 100) == pytest.approx(
        0.018496749103492836, abs=1e-15
    )
    assert wilson_half_width(7, 50) == pytest.approx(
        0.09617680141784625, abs=1e-15
    )


def test_mc_influence_deterministic_and_matching():
    f = majority(3)
    space = TwoPointSpace.uniform(3, 0.5)
    a = influence_mc(f, space, seed=7, trials=500)
    b = influence_mc(f, space, seed=7, trials=500)
    assert a.per_coordinate == b.per_coordinate
    assert a.half_width == b.half_width
    c = influence_mc(f, space, seed=8, trials=500)
    assert a.per_coordinate != c.per_coordinate
    assert a.method == "monte_carlo"


def test_mc_influence_wilson_coverage_benchmark():
    # fixed benchmark: interval coverage must beat 93% across seeds
    cases = [
        (majority(3), TwoPointSpace.uniform(3, 0.5)),
        (majority(3), TwoPointSpace.uniform(3, 0.25)),
        (tribes(2, 2), TwoPointSpace.uniform(4, 0.5)),
        (at_least_k(3, 1, base=3), ThreePointSpace(n=3, p_minus=0.3, p_plus=0.1)),
    ]
    hits = 0
    total = 0
    for f, space in cases:
        exact = influence_exact(f, space).per_coordinate
        for seed in range(10):
            est = influence_mc(f, space, seed=seed, trials=400)
            for k in range(space.n):
                total += 1
                if abs(est.per_coordinate[k] - exact[k]) <= est.half_width[k]:
                    hits += 1
    assert hits / total >= 0.93


def test_mc_oracle_function_agrees_with_dense():
    from sharpthreshold.boolfn import BooleanFunction

    dense = majority(3)
    oracle = BooleanFunction(n=3, base=2, oracle=lambda x: dense(x))
    space = TwoPointSpace.uniform(3, 0.25)
    a = influence_mc(dense, space, seed=3, trials=200)
    b = influence_mc(oracle, space, seed=3, trials=200)
    assert a.per_coordinate == b.per_coordinate


# ---------------------------------------------------------------------------
# dyadic embedding


def test_embed_dyadic_minimal_bits():
    e = embed_dyadic(0.5)
    assert (e.m, e.boundary_rank) == (1, 1)
    e = embed_dyadic(0.375)
    assert (e.m, e.boundary_rank) == (3, 5)
    e = embed_dyadic(0.25, m=4)
    assert (e.m, e.boundary_rank) == (4, 12)


def test_embed_dyadic_rejects_bad_inputs():
    with pytest.raises(ValueError):
        embed_dyadic(Fraction(1, 3))
    with pytest.raises(ValueError):
        embed_dyadic(0.3)
    with pytest.raises(ValueError):
        embed_dyadic(0.125, m=2)  # too few bits for 1/8
    with pytest.raises(ValueError):
        embed_dyadic(0.0)


def test_embedding_bit_value_split():
    e = embed_dyadic(0.375)  # first 5 of 8 blocks map to 0
    values = [e.bit_value(r) for r in range(8)]
    assert values == [0, 0, 0, 0, 0, 1, 1, 1]


def test_lift_preserves_mean_exactly_for_dyadic_p():
    f = majority(3)
    p = 0.375
    e = embed_dyadic(p)
    lifted = lift_through_embedding(f, e)
    assert lifted.n == 9 and lifted.base == 2
    lifted_mean = lifted.dense_table().mean()
    # direct mean on the biased cube, all quantities dyadic so exact
    space = TwoPointSpace.uniform(3, p)
    from sharpthreshold.spaces import measure_vector

    direct = math.fsum(
        (measure_vector(space) * f.dense_table()).tolist()
    )
    assert float(lifted_mean) == direct


@given(st.integers(min_value=0, max_value=2**9 - 1))
def test_lift_pointwise_matches_block_reading(rank):
    f = majority(3)
    e = embed_dyadic(0.375)
    lifted = lift_through_embedding(f, e)
    bits = [(rank >> i) & 1 for i in range(9)]
    digits = []
    for block in range(3):
        block_bits = bits[3 * block: 3 * block + 3]
        # big-endian inside the block
        block_rank = (block_bits[0] << 2) | (block_bits[1] << 1) | block_bits[2]
        digits.append(e.bit_value(block_rank))
    assert int(lifted.dense_table()[rank]) == f(tuple(digits))


def test_embedded_influence_exact_values():
    for k in (1, 2, 3, 4):
        p = 2.0**-k
        w = w_embedded(dictator(1), embed_dyadic(p))
        assert w == k * 2.0 ** (1 - k)


def test_embedded_influence_ratio_bound():
    bound = 2.0 / math.log(2.0)
    for k in range(1, 7):
        p = 2.0**-k
        w = w_embedded(dictator(1), embed_dyadic(p))
        assert w / (p * math.log(1.0 / p)) <= bound + 1e-12


def test_w_embedded_requires_single_coordinate():
    with pytest.raises(ValueError):
        w_embedded(majority(3), embed_dyadic(0.5))


def test_size_guards():
    from sharpthreshold.errors import SizeLimitError

    f = majority(3)
    with pytest.raises(SizeLimitError):
        lift_through_embedding(f, embed_dyadic(2.0**-10))  # 30 bits
