import math

import pytest

from sharpthreshold.boolfn import (
    at_least_k,
    dictator,
    enumerate_monotone,
    from_predicate,
    majority,
)
from sharpthreshold.errors import HypothesisError
from sharpthreshold.ineqlab import (
    INEQUALITY_IDS,
    LOWER_BOUND_IDS,
    TWO_POINT_PS,
    check_delta_theorem,
    check_max_influence,
    check_nonuniform,
    check_talagrand,
    check_three_point,
    check_two_point,
    check_two_point_small_max,
    concentration_constants_search,
    constant_search,
    family_from_spec,
)
from sharpthreshold.spaces import ThreePointSpace, TwoPointSpace


def test_registry_contents():
    assert set(INEQUALITY_IDS) == {
        "two_point", "two_point_small_max", "three_point", "nonuniform",
        "talagrand", "delta", "max_influence",
    }
    assert LOWER_BOUND_IDS == set(INEQUALITY_IDS) - {"delta"}


def test_two_point_majority_frozen_values():
    v = check_two_point(majority(3), 0.25, c=0.5)
    assert v.lhs == pytest.approx(1.125, abs=1e-14)  # 3 * 3/8
    assert v.rhs == pytest.approx(-0.4463425179604766, abs=1e-12)
    assert v.passed
    assert v.vacuous  # the probe constant is below 1/y, rhs negative
    assert v.ratio is None
    assert v.hypothesis_ok
    assert v.critical == pytest.approx(7.680153349637049, rel=1e-9)
    assert v.informative  # vacuity at the probe does not hide the crossing


def test_two_point_critical_is_the_pass_fail_boundary():
    v = check_two_point(majority(3), 0.25)
    below = check_two_point(majority(3), 0.25, c=v.critical * (1 - 1e-6))
    above = check_two_point(majority(3), 0.25, c=v.critical * (1 + 1e-6))
    assert below.passed
    assert not above.passed
    # passing is monotone downward in the constant
    half = check_two_point(majority(3), 0.25, c=v.critical / 2)
    assert half.passed


def test_two_point_hypothesis_flag_for_large_p():
    v = check_two_point(majority(3), 0.7)
    assert not v.hypothesis_ok
    assert "p_i > 1/2" in v.note
    assert not v.informative


def test_two_point_rejects_constant_functions():
    with pytest.raises(HypothesisError):
        check_two_point(from_predicate(2, 2, lambda x: True), 0.25)


def test_nonuniform_collapses_to_two_point():
    for n in (1, 2, 3):
        space = TwoPointSpace.uniform(n, 0.5)
        for f in enumerate_monotone(space, include_constants=False):
            for p in TWO_POINT_PS:
                a = check_two_point(f, p)
                b = check_nonuniform(f, (p,) * n)
                assert (a.lhs, a.rhs, a.ratio, a.critical) == (
                    b.lhs, b.rhs, b.ratio, b.critical
                )
                assert (a.passed, a.vacuous, a.hypothesis_ok) == (
                    b.passed, b.vacuous, b.hypothesis_ok
                )
    assert a.inequality_id == "two_point"
    assert b.inequality_id == "nonuniform"


def test_nonuniform_denominator_uses_worst_coordinate():
    f = at_least_k(2, 1)
    v = check_nonuniform(f, (0.125, 0.5))
    assert v.params["denominator"] == pytest.approx(
        0.5 * math.log(2.0), abs=1e-15
    )


def test_nonuniform_delta_hypothesis_flag():
    f = majority(3)
    v = check_nonuniform(f, (0.25,) * 3, delta=0.1)  # max influence is 3/8
    assert not v.hypothesis_ok
    assert "exceeds delta" in v.note


def test_nonuniform_validation():
    with pytest.raises(ValueError):
        check_nonuniform(majority(3), (0.25, 0.25))  # arity mismatch
    with pytest.raises(ValueError):
        check_nonuniform(at_least_k(2, 1, base=3), (0.25, 0.25))


def test_small_max_and3_measured_a():
    f = at_least_k(3, 3)  # conjunction, max influence p**2
    p = 0.125
    v = check_two_point_small_max(f, p)
    scale = (p * math.log(1.0 / p)) ** 2
    assert v.params["a_measured"] == pytest.approx(p**2 / scale, rel=1e-12)
    assert v.params["a_measured"] < 0.5
    assert v.hypothesis_ok
    assert v.informative
    # supplied a at the boundary puts log(2) on the right-hand side
    t = p**3
    vb = check_two_point_small_max(f, p, a=0.5)
    want = t * (1 - t) / (p * math.log(1 / p)) * math.log(2.0)
    assert vb.rhs == pytest.approx(want, rel=1e-12)


def test_small_max_hypothesis_flags():
    f = at_least_k(3, 3)
    beyond = check_two_point_small_max(f, 0.125, a=0.6)
    assert not beyond.hypothesis_ok and "> 1/2" in beyond.note
    too_small = check_two_point_small_max(f, 0.125, a=0.1)
    assert not too_small.hypothesis_ok and "exceeds supplied a" in too_small.note
    bad_p = check_two_point_small_max(f, 0.75)
    assert not bad_p.hypothesis_ok and "outside (0, 1/2]" in bad_p.note


def test_small_max_majority_violates_a_hypothesis_at_half():
    # majority at p = 1/2 has max influence 1/2 over scale log(2)^2 < 1/2
    v = check_two_point_small_max(majority(3), 0.5)
    assert v.params["a_measured"] > 0.5
    assert not v.hypothesis_ok


def test_three_point_all_plus_event():
    f = at_least_k(3, 3, base=3)
    v = check_three_point(f, 0.1, 0.1)
    scale = (0.1 * math.log(10.0)) ** 2
    assert v.params["pref"] == 0.1
    assert v.params["a_measured"] == pytest.approx(0.01 / scale, rel=1e-12)
    assert v.hypothesis_ok
    assert v.informative
    assert v.critical is not None and v.critical > 0


def test_three_point_range_hypothesis():
    f = at_least_k(2, 1, base=3)
    v = check_three_point(f, 0.2, 0.5)  # 0.5 > 1/e
    assert not v.hypothesis_ok
    assert "outside" in v.note


def test_talagrand_eps_one_is_uninformative():
    v = check_talagrand(majority(3), 0.25, eps=1.0)
    assert v.rhs == 0.0
    assert v.passed
    assert v.vacuous
    assert v.critical is None
    assert not v.informative


def test_talagrand_measured_eps():
    f = majority(3)
    p = 0.25
    v = check_talagrand(f, p)
    pq = p * (1 - p)
    eps = pq * 0.375  # max influence of majority(3) at 1/4
    assert v.params["eps_measured"] == pytest.approx(eps, rel=1e-12)
    t = 10 / 64
    want = (
        t * (1 - t) / (pq * math.log(2.0 / pq)) * math.log(1.0 / eps)
    )
    assert v.rhs == pytest.approx(want, rel=1e-12)
    assert v.hypothesis_ok
    v_bad = check_talagrand(f, p, eps=0.01)
    assert not v_bad.hypothesis_ok


def test_delta_theorem_dictator_frozen_criticals():
    v_half = check_delta_theorem(dictator(1), (0.5,))
    assert v_half.critical == pytest.approx(0.48089834696298783, rel=1e-12)
    v_q = check_delta_theorem(dictator(1), (0.25,))
    assert v_q.critical == pytest.approx(0.48321981555893956, rel=1e-12)
    assert v_half.passed  # K = 1 is comfortably above both criticals
    assert not v_half.vacuous


def test_delta_theorem_constant_function_vacuous():
    v = check_delta_theorem(from_predicate(2, 2, lambda x: True), (0.25, 0.5))
    assert v.lhs == 0.0
    assert v.passed
    assert v.vacuous
    assert v.critical is None


def test_delta_theorem_smaller_k_is_stronger():
    f = majority(3)
    v = check_delta_theorem(f, (0.25,) * 3)
    assert v.critical is not None
    ok = check_delta_theorem(f, (0.25,) * 3, big_k=v.critical * (1 + 1e-9))
    bad = check_delta_theorem(f, (0.25,) * 3, big_k=v.critical * (1 - 1e-6))
    assert ok.passed
    assert not bad.passed


def test_max_influence_majority_min_form():
    v = check_max_influence(majority(3), TwoPointSpace.uniform(3, 0.5))
    assert v.lhs == 0.5
    assert v.critical == pytest.approx(2.7307176798805117, rel=1e-12)
    assert v.passed


def test_max_influence_rejects_single_coordinate():
    with pytest.raises(ValueError):
        check_max_influence(dictator(1), TwoPointSpace.uniform(1, 0.5))


def test_constant_search_single_instance_equals_critical():
    v = check_two_point(majority(3), 0.25)
    result = constant_search("two_point", [{"f": majority(3), "p": 0.25}])
    assert result.frontier == v.critical
    assert result.witness_index == 0
    assert result.evaluated == 1
    assert result.excluded == 0


def test_constant_search_order_invariant():
    family = family_from_spec("two_point", "monotone:n=3")
    a = constant_search("two_point", family)
    b = constant_search("two_point", list(reversed(family)))
    assert a.frontier == b.frontier  # bit for bit
    assert a.evaluated == b.evaluated
    # ties may pick different witnesses but both sit on the frontier
    assert a.verdicts[a.witness_index].critical == a.frontier
    assert b.verdicts[b.witness_index].critical == b.frontier


def test_constant_search_excludes_uninformative():
    family = [
        {"f": majority(3), "p": 0.25},
        {"f": majority(3), "p": 0.7},  # hypothesis violated, excluded
    ]
    result = constant_search("two_point", family)
    assert result.evaluated == 1
    assert result.excluded == 1


def test_constant_search_delta_takes_greatest_k():
    family = family_from_spec("delta", "monotone:n=2")
    result = constant_search("delta", family)
    best = max(
        v.critical for v in result.verdicts if v.informative
    )
    assert result.frontier == best


def test_constant_search_errors():
    with pytest.raises(ValueError):
        constant_search("bogus", [{"f": majority(3), "p": 0.25}])
    with pytest.raises(ValueError):
        constant_search("two_point", [])
    with pytest.raises(ValueError):
        constant_search("talagrand", [{"f": majority(3), "p": 0.25, "eps": 1.0}])


def test_family_from_spec_sizes():
    assert len(family_from_spec("two_point", "monotone:n=2")) == 15
    assert len(family_from_spec("nonuniform", "monotone:n=2")) == 20
    one = family_from_spec("two_point", "builtin:majority:n=3:p=0.25")
    assert one == [{"f": one[0]["f"], "p": 0.25}]
    assert one[0]["f"].n == 3
    spaces = family_from_spec("max_influence", "builtin:tribes(2,2):n=4")
    assert len(spaces) == 3
    assert all(isinstance(kw["space"], TwoPointSpace) for kw in spaces)
    three = family_from_spec("three_point", "builtin:at_least_k(1):n=3")
    assert len(three) == 3
    assert {"p_minus", "p_plus", "f"} == set(three[0])


def test_family_from_spec_rejects_unknown():
    with pytest.raises(ValueError):
        family_from_spec("two_point", "wat:n=2")


def test_concentration_search_majority_and_dictator():
    for f, p in ((majority(3), 0.5), (dictator(2), 0.25)):
        search = concentration_constants_search(f, p)
        assert search.report.both_exceed_half
        assert search.report.witness_level >= 1
        assert search.c1_hat == 2.0 ** (search.steps - 1)
        assert search.c2_hat == 2.0 ** -(search.steps - 1)


def test_concentration_search_rejects_degenerate():
    with pytest.raises(HypothesisError):
        concentration_constants_search(
            from_predicate(2, 2, lambda x: True), 0.5
        )
