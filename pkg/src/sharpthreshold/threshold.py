"""Sharp-threshold engine for increasing events on three-point spaces.

The perturbation path moves mass from -1 to +1: at parameter h the measure
uses (p_minus - h, p_plus + h). Along this path the derivative of the event
probability dominates the total influence, and for events with a symmetry
of order m the logit of the probability climbs fast enough to cross from
eta to 1 - eta within an explicit window. The verifier checks that
implication on concrete instances and records which branch of the
supporting influence bound applied at each sampled h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .boolfn import BooleanFunction, SymmetryGroup, is_increasing, symmetry_order
from .errors import HypothesisError
from .influence import influence_exact, influence_exact_symmetric
from .spaces import ThreePointSpace, measure_vector

__all__ = [
    "CurveSample",
    "ThresholdCurve",
    "RussoCheck",
    "BranchSample",
    "SharpThresholdCertificate",
    "C3SearchResult",
    "g_curve",
    "russo_check",
    "verify_sharp_threshold",
    "min_c3_search",
]

DEFAULT_GRID_POINTS = 33
RUSSO_TOLERANCE = 1e-6


def _logit(g: float) -> Optional[float]:
    if 0.0 < g < 1.0:
        return math.log(g / (1.0 - g))
    return None


def _event_mass(table: np.ndarray, space: ThreePointSpace) -> float:
    w = measure_vector(space)
    return math.fsum(w[table == 1].tolist())


def _g_at(table: np.ndarray, n: int, p_minus: float, p_plus: float, h: float) -> float:
    r_minus = p_minus - h
    r_plus = p_plus + h
    if not (0.0 < r_minus and 0.0 < r_plus and r_minus + r_plus < 1.0):
        raise ValueError(f"h = {h} leaves the admissible parameter range")
    return _event_mass(table, ThreePointSpace(n=n, p_minus=r_minus, p_plus=r_plus))


@dataclass(frozen=True)
class CurveSample:
    h: float
    g: float
    logit: Optional[float]  # None when g hits 0 or 1


@dataclass(frozen=True)
class ThresholdCurve:
    hmax: float  # supremum of admissible h (the -1 probability hits 0 there)
    method: str  # "exact" | "monte_carlo"
    samples: tuple[CurveSample, ...]

    @property
    def hs(self) -> tuple[float, ...]:
        return tuple(s.h for s in self.samples)

    @property
    def gs(self) -> tuple[float, ...]:
        return tuple(s.g for s in self.samples)


def g_curve(
    event: BooleanFunction,
    space: ThreePointSpace,
    h_grid: Optional[Sequence[float]] = None,
    method: str = "exact",
    seed: Optional[int] = None,
    trials: Optional[int] = None,
) -> ThresholdCurve:
    """Event probability along the coupled path, exactly or by Monte Carlo.

    The Monte Carlo path reuses one uniform array across all h values, so the
    per-trial indicators are monotone in h for increasing events.
    """
    if event.base != 3 or event.n != space.n:
        raise ValueError("event must live on the given three-point space")
    hmax = space.p_minus
    if h_grid is None:
        h_grid = np.linspace(0.0, hmax * (1.0 - 1e-9), DEFAULT_GRID_POINTS)
    hs = [float(h) for h in h_grid]
    for h in hs:
        if not (0.0 <= h < hmax):
            raise ValueError(f"h = {h} outside [0, {hmax})")

    if method == "exact":
        table = event.dense_table()
        ok, witness = is_increasing(event)
        if not ok:
            raise HypothesisError(f"event is not increasing; witness pair {witness}")
        samples = []
        for h in hs:
            g = _g_at(table, space.n, space.p_minus, space.p_plus, h)
            samples.append(CurveSample(h=h, g=g, logit=_logit(g)))
        return ThresholdCurve(hmax=hmax, method="exact", samples=tuple(samples))

    if method != "mc":
        raise ValueError("method must be 'exact' or 'mc'")
    if seed is None or trials is None or trials < 1:
        raise ValueError("Monte Carlo mode needs a seed and trials >= 1")
    n = space.n
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random((trials, n))
    powers = 3 ** np.arange(n, dtype=np.int64)
    dense = event.is_dense
    table = event.dense_table() if dense else None
    samples = []
    for h in hs:
        r_plus = space.p_plus + h
        r_minus = space.p_minus - h
        digits = np.where(u < r_plus, 2, np.where(u >= 1.0 - r_minus, 0, 1))
        if dense:
            vals = table[digits @ powers]
        else:
            vals = np.array(
                [event(tuple(int(d) - 1 for d in row)) for row in digits]
            )
        g = float(np.count_nonzero(vals == 1)) / trials
        samples.append(CurveSample(h=h, g=g, logit=_logit(g)))
    return ThresholdCurve(hmax=hmax, method="monte_carlo", samples=tuple(samples))


@dataclass(frozen=True)
class RussoCheck:
    h: float
    dh: float
    slope: float  # central finite difference of g at h
    total_influence: float  # in the perturbed measure at h
    margin: float  # slope - total_influence

    @property
    def ok(self) -> bool:
        return self.margin >= -RUSSO_TOLERANCE


def russo_check(
    event: BooleanFunction, space: ThreePointSpace, h: float, dh: float
) -> RussoCheck:
    """Compare the finite-difference slope of g against the total influence.

    For increasing events the derivative of g equals the total influence in
    the perturbed measure, so the slope should match it up to the O(dh^2)
    curvature error; `ok` allows a 1e-6 shortfall.
    """
    if dh <= 0:
        raise ValueError("dh must be positive")
    ok, witness = is_increasing(event)
    if not ok:
        raise HypothesisError(f"event is not increasing; witness pair {witness}")
    table = event.dense_table()
    n = space.n
    g_lo = _g_at(table, n, space.p_minus, space.p_plus, h - dh)
    g_hi = _g_at(table, n, space.p_minus, space.p_plus, h + dh)
    slope = (g_hi - g_lo) / (2.0 * dh)
    perturbed = ThreePointSpace(
        n=n, p_minus=space.p_minus - h, p_plus=space.p_plus + h
    )
    total = influence_exact(event, perturbed).total
    return RussoCheck(
        h=h, dh=dh, slope=slope, total_influence=total, margin=slope - total
    )


@dataclass(frozen=True)
class BranchSample:
    h: float
    t: float  # g(h)
    max_influence: float
    total_influence: float
    branch: str  # "large_influence" | "small_influence"
    a: Optional[float]  # max influence / (pmax log(1/pmax))^2, small branch only
    need_rhs: float  # 2 t(1-t) log(m) / (c3 pmax log(1/pmax))
    need_ok: bool  # total influence >= need_rhs


@dataclass(frozen=True)
class SharpThresholdCertificate:
    p_minus: float
    p_plus: float
    q_minus: float
    q_plus: float
    eta: float
    c3: float
    n: int
    m: int  # verified symmetry order
    pmax: float  # max(q_plus, p_minus)
    hmax: float  # min(q_plus - p_plus, p_minus - q_minus)
    bound: float  # c3 log(1/eta) pmax log(1/pmax) / log(m)
    lb_ok: bool  # hmax >= bound
    g_start: float
    g_end: float
    logit_start: Optional[float]
    logit_end: Optional[float]
    vacuous: bool  # g_start <= eta, implication holds with no content
    verdict: bool  # g_start > eta implies g_end > 1 - eta
    branch_trace: tuple[BranchSample, ...]


def _check_endpoints(
    p_minus: float, p_plus: float, q_minus: float, q_plus: float, eta: float
) -> None:
    inv_e = 1.0 / math.e
    if not (0.0 < q_minus < p_minus < inv_e):
        raise HypothesisError(
            f"need 0 < q_minus < p_minus < 1/e, got ({q_minus}, {p_minus})"
        )
    if not (0.0 < p_plus < q_plus < inv_e):
        raise HypothesisError(
            f"need 0 < p_plus < q_plus < 1/e, got ({p_plus}, {q_plus})"
        )
    if not (0.0 < eta <= 0.5):
        raise HypothesisError(f"eta must lie in (0, 1/2], got {eta}")


def _verified_order(event: BooleanFunction, group: SymmetryGroup) -> int:
    ok, witness = is_increasing(event)
    if not ok:
        raise HypothesisError(f"event is not increasing; witness pair {witness}")
    try:
        m = symmetry_order(event, group)
    except ValueError as exc:
        raise HypothesisError(str(exc)) from exc
    if m < 2:
        raise HypothesisError(
            "symmetry order 1 makes the window bound infinite (log m = 0)"
        )
    return m


def verify_sharp_threshold(
    event: BooleanFunction,
    group: SymmetryGroup,
    p_minus: float,
    p_plus: float,
    q_minus: float,
    q_plus: float,
    eta: float,
    c3: float,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> SharpThresholdCertificate:
    """Certificate for the threshold-transfer implication on one instance.

    Checks the parameter hypotheses and the event's monotonicity and
    symmetry, then evaluates the exact event probability at both ends of the
    path. The verdict is the implication g(0) > eta => g(hmax) > 1 - eta,
    decided in logit form and cross-checked against the probability form.
    The branch trace records, at each sampled h, whether the max influence
    reaches m**-0.5 (so the symmetry alone forces a large total influence)
    or the small-influence bound applies instead.
    """
    if c3 <= 0:
        raise HypothesisError("c3 must be positive")
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    _check_endpoints(p_minus, p_plus, q_minus, q_plus, eta)
    m = _verified_order(event, group)
    n = event.n
    table = event.dense_table()

    pmax = max(q_plus, p_minus)
    hmax = min(q_plus - p_plus, p_minus - q_minus)
    log_pmax_inv = math.log(1.0 / pmax)
    bound = c3 * math.log(1.0 / eta) * pmax * log_pmax_inv / math.log(m)
    lb_ok = hmax >= bound

    g_start = _g_at(table, n, p_minus, p_plus, 0.0)
    g_end = _g_at(table, n, p_minus, p_plus, hmax)
    logit_start = _logit(g_start)
    logit_end = _logit(g_end)

    vacuous = not (g_start > eta)
    if vacuous:
        verdict = True
    else:
        if logit_end is None:
            conclusion_logit = g_end >= 1.0
        else:
            conclusion_logit = logit_end > math.log((1.0 - eta) / eta)
        conclusion_prob = g_end > 1.0 - eta
        if conclusion_logit != conclusion_prob:
            raise RuntimeError(
                "logit and probability forms of the endpoint comparison "
                f"disagree at g_end = {g_end}, eta = {eta}"
            )
        verdict = conclusion_logit

    trace = []
    sqrt_inv_m = m**-0.5
    for h in np.linspace(0.0, hmax, grid_points):
        h = float(h)
        perturbed = ThreePointSpace(n=n, p_minus=p_minus - h, p_plus=p_plus + h)
        report = influence_exact_symmetric(event, perturbed, group)
        t = _event_mass(table, perturbed)
        max_inf = report.max_influence
        total = report.total
        need_rhs = 2.0 * t * (1.0 - t) * math.log(m) / (c3 * pmax * log_pmax_inv)
        if max_inf >= sqrt_inv_m:
            branch, a = "large_influence", None
        else:
            branch = "small_influence"
            a = max_inf / (pmax * log_pmax_inv) ** 2
        trace.append(
            BranchSample(
                h=h, t=t, max_influence=max_inf, total_influence=total,
                branch=branch, a=a, need_rhs=need_rhs, need_ok=total >= need_rhs,
            )
        )

    return SharpThresholdCertificate(
        p_minus=p_minus, p_plus=p_plus, q_minus=q_minus, q_plus=q_plus,
        eta=eta, c3=c3, n=n, m=m, pmax=pmax, hmax=hmax, bound=bound,
        lb_ok=lb_ok, g_start=g_start, g_end=g_end, logit_start=logit_start,
        logit_end=logit_end, vacuous=vacuous, verdict=verdict,
        branch_trace=tuple(trace),
    )


@dataclass(frozen=True)
class C3SearchResult:
    value: float
    evaluated: int  # instances that constrained the search
    skipped: tuple[int, ...]  # family indices with g(0) <= eta (vacuous)
    at_lower_probe: bool  # every admissible c3 passed; value is the probe floor


def min_c3_search(
    family: Sequence[tuple[BooleanFunction, SymmetryGroup]],
    eta: float,
    p_minus: float,
    p_plus: float,
    q_minus: float,
    q_plus: float,
    lo: float = 1e-6,
    hi: float = 1e6,
    rel_tol: float = 1e-9,
) -> C3SearchResult:
    """Smallest c3 consistent with the transfer claim on a test family.

    An instance is consistent at c3 when either its window fails the lower
    bound at that c3 (the claim is silent) or its endpoint implication is
    true. That predicate is monotone in c3, so bisection applies. Instances
    with g(0) <= eta never constrain anything and are skipped with a notice.
    """
    if not family:
        raise ValueError("family must be nonempty")
    _check_endpoints(p_minus, p_plus, q_minus, q_plus, eta)

    constraints = []  # (hmax, pmax, log m, verdict)
    skipped = []
    hmax = min(q_plus - p_plus, p_minus - q_minus)
    pmax = max(q_plus, p_minus)
    log_eta_inv = math.log(1.0 / eta)
    log_pmax_inv = math.log(1.0 / pmax)
    for idx, (event, group) in enumerate(family):
        m = _verified_order(event, group)
        table = event.dense_table()
        g0 = _g_at(table, event.n, p_minus, p_plus, 0.0)
        if not (g0 > eta):
            skipped.append(idx)
            continue
        g_end = _g_at(table, event.n, p_minus, p_plus, hmax)
        verdict = g_end > 1.0 - eta
        constraints.append((m, verdict))

    def admissible(c3: float) -> bool:
        for m, verdict in constraints:
            bound = c3 * log_eta_inv * pmax * log_pmax_inv / math.log(m)
            if hmax >= bound and not verdict:
                return False
        return True

    if admissible(lo):
        return C3SearchResult(
            value=lo, evaluated=len(constraints), skipped=tuple(skipped),
            at_lower_probe=True,
        )
    if not admissible(hi):
        raise ValueError(f"no admissible c3 up to {hi}")
    a, b = lo, hi
    while b - a > rel_tol * b:
        mid = 0.5 * (a + b)
        if admissible(mid):
            b = mid
        else:
            a = mid
    return C3SearchResult(
        value=b, evaluated=len(constraints), skipped=tuple(skipped),
        at_lower_probe=False,
    )
