"""Full-size acceptance battery, one test per criterion.

Each test runs its criterion at full strength (no quick reductions), prints
the one-line verdict, and asserts the pass flag with the detail text in the
failure message. Runtime ceilings are generous versions of the intended
budgets; they catch pathological slowdowns, not normal variance.
"""

import pytest

from sharpthreshold import acceptance


def run(check, budget_seconds):
    result = check(quick=False)
    print(result.line())
    assert result.passed, result.line()
    assert result.seconds <= budget_seconds, (
        f"criterion {result.number} took {result.seconds:.1f}s "
        f"(budget {budget_seconds}s)"
    )
    return result


def test_criterion_1_variance_matches_spectral_mass():
    run(acceptance.check_parseval, 10.0)


def test_criterion_2_derivative_norm_identity():
    run(acceptance.check_delta_identity, 30.0)


def test_criterion_3_slope_dominates_influence():
    run(acceptance.check_russo, 120.0)


def test_criterion_4_embedding_influence_exact():
    run(acceptance.check_embedding, 1.0)


def test_criterion_5_constant_frontiers():
    run(acceptance.check_frontiers, 300.0)


def test_criterion_6_threshold_transfer_certificates():
    run(acceptance.check_certificates, 180.0)


@pytest.mark.slow
def test_criterion_7_tessellation_sharp_threshold():
    run(acceptance.check_jm, 600.0)


def test_criterion_8_spectral_concentration():
    run(acceptance.check_concentration, 60.0)
