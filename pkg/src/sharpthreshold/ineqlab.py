"""Numerical verification bench for the influence lower bounds and the
discrete-derivative upper bound, with empirical constant estimation.

Every check evaluates one inequality instance at a candidate constant and
reports both sides, the pass flag, and the critical constant where the pass
flips. Candidate-range violations of an inequality's hypotheses are flagged
on the verdict, not raised; only a degenerate mean (t in {0,1}) raises.
Vacuous instances (nonpositive right-hand side) pass but are excluded from
frontier computation since they say nothing about constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .boolfn import (
    BooleanFunction,
    builtin_function,
    enumerate_monotone,
    serialize_table,
)
from .errors import HypothesisError
from .influence import embed_dyadic, influence_exact
from .spaces import Space, ThreePointSpace, TwoPointSpace, measure_vector
from .spectrum import (
    ConcentrationReport,
    block_spectrum,
    concentration_report,
    delta_norms,
)

__all__ = [
    "InequalityVerdict",
    "FrontierResult",
    "ConcentrationSearch",
    "check_two_point",
    "check_two_point_small_max",
    "check_three_point",
    "check_nonuniform",
    "check_talagrand",
    "check_delta_theorem",
    "check_max_influence",
    "constant_search",
    "family_from_spec",
    "concentration_constants_search",
    "INEQUALITY_IDS",
]


@dataclass(frozen=True, eq=True)
class InequalityVerdict:
    inequality_id: str
    description: str
    lhs: float
    rhs: float
    ratio: Optional[float]  # lhs / rhs when rhs > 0
    passed: bool
    vacuous: bool  # rhs <= 0; carries no information about the constant
    hypothesis_ok: bool
    note: str
    critical: Optional[float]  # constant where passed flips, when well defined
    params: dict = field(compare=False, default_factory=dict)

    @property
    def informative(self) -> bool:
        """Usable for frontier estimation: the statement's hypotheses hold
        and a finite critical constant exists. A verdict that is vacuous at
        the probed constant still pins down its critical, so the flag does
        not look at `vacuous` (which instances with no critical at any
        constant set alongside critical = None)."""
        return self.hypothesis_ok and self.critical is not None


def _describe(f: BooleanFunction) -> str:
    return f.name if f.name else serialize_table(f)


def _mean(f: BooleanFunction, space: Space) -> float:
    w = measure_vector(space)
    table = f.dense_table()
    return math.fsum(w[table == 1].tolist())


def _require_nondegenerate(t: float, what: str) -> None:
    if t <= 0.0 or t >= 1.0:
        raise HypothesisError(f"degenerate mean t = {t} for {what}")


def _vform(t: float, use_min_form: bool) -> float:
    return min(t, 1.0 - t) if use_min_form else t * (1.0 - t)


def _verdict(
    inequality_id: str,
    description: str,
    lhs: float,
    rhs: float,
    passed: bool,
    hypothesis_ok: bool,
    note: str,
    critical: Optional[float],
    params: dict,
) -> InequalityVerdict:
    vacuous = rhs <= 0.0
    ratio = lhs / rhs if rhs > 0.0 else None
    return InequalityVerdict(
        inequality_id=inequality_id, description=description, lhs=lhs, rhs=rhs,
        ratio=ratio, passed=passed, vacuous=vacuous, hypothesis_ok=hypothesis_ok,
        note=note, critical=critical, params=params,
    )


def _solve_scaled_log(lhs: float, x: float, y: float) -> float:
    """Critical c for rhs(c) = c * x * log(c * y) = lhs, with x, y, lhs > 0.

    rhs vanishes at c = 1/y and increases beyond it, so the crossing is
    unique in (1/y, inf); bracketed bisection to relative 1e-12.
    """
    lo = 1.0 / y
    hi = max(2.0 * lo, 1.0)
    while hi * x * math.log(hi * y) <= lhs:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("no finite critical constant")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * x * math.log(mid * y) <= lhs:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# two-point-space bounds with the influence-dependent log argument


def _nonuniform_core(
    inequality_id: str,
    f: BooleanFunction,
    probs: Sequence[float],
    c: float,
    delta: Optional[float],
    use_min_form: bool,
) -> InequalityVerdict:
    space = TwoPointSpace(tuple(float(p) for p in probs))
    if space.n != f.n or f.base != 2:
        raise ValueError("probability vector does not match the function")
    report = influence_exact(f, space)
    t = _mean(f, space)
    _require_nondegenerate(t, _describe(f))
    notes = []
    hypothesis_ok = True
    if any(p > 0.5 for p in space.probs):
        hypothesis_ok = False
        notes.append("some p_i > 1/2")
    if delta is None:
        delta = report.max_influence
    elif report.max_influence > delta:
        hypothesis_ok = False
        notes.append(f"max influence {report.max_influence} exceeds delta {delta}")
    lhs = report.total
    v = _vform(t, use_min_form)
    denom = max(p * math.log(1.0 / p) for p in space.probs)
    x = v / denom
    y = v / (math.sqrt(delta) * lhs)
    rhs = c * x * math.log(c * y)
    critical = _solve_scaled_log(lhs, x, y)
    return _verdict(
        inequality_id, _describe(f), lhs, rhs, lhs >= rhs, hypothesis_ok,
        "; ".join(notes), critical,
        {"t": t, "delta": delta, "denominator": denom, "c": c},
    )


def check_two_point(
    f: BooleanFunction, p: float, c: float = 1.0, use_min_form: bool = False
) -> InequalityVerdict:
    """Total influence against c * v/(p log(1/p)) * log(c v/(delta^(1/2) I))
    on the weighted cube, v = t(1-t), delta = max influence."""
    return _nonuniform_core(
        "two_point", f, (float(p),) * f.n, c, None, use_min_form
    )


def check_nonuniform(
    f: BooleanFunction,
    probs: Sequence[float],
    c: float = 1.0,
    delta: Optional[float] = None,
    use_min_form: bool = False,
) -> InequalityVerdict:
    """Same bound with per-coordinate probabilities; the denominator takes
    max_i p_i log(1/p_i). With equal probabilities this reproduces
    check_two_point bit for bit."""
    return _nonuniform_core("nonuniform", f, probs, c, delta, use_min_form)


# ---------------------------------------------------------------------------
# small-max-influence variants with the log(1/a) right-hand side


def _small_max_core(
    inequality_id: str,
    f: BooleanFunction,
    space: Space,
    pref: float,
    range_ok: bool,
    range_note: str,
    c: float,
    a: Optional[float],
    use_min_form: bool,
) -> InequalityVerdict:
    report = influence_exact(f, space)
    t = _mean(f, space)
    _require_nondegenerate(t, _describe(f))
    notes = []
    hypothesis_ok = True
    if not range_ok:
        hypothesis_ok = False
        notes.append(range_note)
    scale = (pref * math.log(1.0 / pref)) ** 2
    a_measured = report.max_influence / scale
    if a is None:
        a = a_measured
    elif a_measured > a:
        hypothesis_ok = False
        notes.append(f"measured a {a_measured} exceeds supplied a {a}")
    if a > 0.5:
        hypothesis_ok = False
        notes.append(f"a = {a} > 1/2")
    lhs = report.total
    v = _vform(t, use_min_form)
    slope = v / (pref * math.log(1.0 / pref)) * math.log(1.0 / a)
    rhs = c * slope
    critical = lhs / slope if slope > 0.0 else None
    return _verdict(
        inequality_id, _describe(f), lhs, rhs, lhs >= rhs, hypothesis_ok,
        "; ".join(notes), critical,
        {"t": t, "a": a, "a_measured": a_measured, "pref": pref, "c": c},
    )


def check_two_point_small_max(
    f: BooleanFunction,
    p: float,
    c: float = 1.0,
    a: Optional[float] = None,
    use_min_form: bool = False,
) -> InequalityVerdict:
    """Small-max-influence form on the weighted cube: when every influence
    is at most a (p log(1/p))^2 with a <= 1/2, the total influence should
    beat c * v/(p log(1/p)) * log(1/a). Omitted a means the measured one."""
    space = TwoPointSpace.uniform(f.n, p)
    return _small_max_core(
        "two_point_small_max", f, space, p, 0.0 < p <= 0.5,
        f"p = {p} outside (0, 1/2]", c, a, use_min_form,
    )


def check_three_point(
    f: BooleanFunction,
    p_minus: float,
    p_plus: float,
    c: float = 1.0,
    a: Optional[float] = None,
    use_min_form: bool = False,
) -> InequalityVerdict:
    """Three-point analogue with pmax = max(p_minus, p_plus) in place of p;
    the probability hypotheses require both at most 1/e."""
    space = ThreePointSpace(n=f.n, p_minus=p_minus, p_plus=p_plus)
    inv_e = 1.0 / math.e
    return _small_max_core(
        "three_point", f, space, space.pmax,
        0.0 < p_minus <= inv_e and 0.0 < p_plus <= inv_e,
        f"(p_minus, p_plus) = ({p_minus}, {p_plus}) outside (0, 1/e]^2",
        c, a, use_min_form,
    )


# ---------------------------------------------------------------------------
# remaining bounds


def check_talagrand(
    f: BooleanFunction,
    p: float,
    c: float = 1.0,
    eps: Optional[float] = None,
    use_min_form: bool = False,
) -> InequalityVerdict:
    """Total influence against c*v/(p(1-p) log(2/(p(1-p)))) * log(1/eps)
    under the hypothesis p(1-p) I(i) <= eps for every i. Omitted eps means
    the measured max of p(1-p) I(i)."""
    space = TwoPointSpace.uniform(f.n, p)
    report = influence_exact(f, space)
    t = _mean(f, space)
    _require_nondegenerate(t, _describe(f))
    pq = p * (1.0 - p)
    notes = []
    hypothesis_ok = True
    eps_measured = pq * report.max_influence
    if eps is None:
        eps = eps_measured
    elif eps_measured > eps:
        hypothesis_ok = False
        notes.append(f"measured eps {eps_measured} exceeds supplied eps {eps}")
    lhs = report.total
    v = _vform(t, use_min_form)
    slope = v / (pq * math.log(2.0 / pq)) * math.log(1.0 / eps)
    rhs = c * slope
    critical = lhs / slope if slope > 0.0 else None
    return _verdict(
        "talagrand", _describe(f), lhs, rhs, lhs >= rhs, hypothesis_ok,
        "; ".join(notes), critical,
        {"t": t, "eps": eps, "eps_measured": eps_measured, "p": p, "c": c},
    )


def check_delta_theorem(
    f: BooleanFunction, probs: Sequence[float], big_k: float = 1.0
) -> InequalityVerdict:
    """Upper bound on the centered second moment by the weighted sum of
    squared derivative norms; the constant K multiplies the right-hand side,
    so smaller K is the stronger claim and the critical value is the least
    K that works."""
    space = TwoPointSpace(tuple(float(p) for p in probs))
    if space.n != f.n or f.base != 2:
        raise ValueError("probability vector does not match the function")
    w = measure_vector(space)
    table = f.dense_table().astype(float)
    t = math.fsum(w[table == 1.0].tolist())
    lhs = math.fsum((w * (table - t) ** 2).tolist())
    norms = delta_norms(f, space)
    terms = []
    for l2, l1 in zip(norms.l2, norms.l1):
        if l2 == 0.0:
            continue
        terms.append(l2**2 / math.log(math.e * l2 / l1))
    total = math.fsum(terms)
    if lhs > 0.0 and total == 0.0:
        raise AssertionError("nonzero variance with all derivatives zero")
    log_factor = math.log(2.0 / min(p * (1.0 - p) for p in space.probs))
    slope = log_factor * total
    rhs = big_k * slope
    passed = lhs <= rhs or lhs == 0.0
    critical = lhs / slope if slope > 0.0 else None
    verdict = InequalityVerdict(
        inequality_id="delta", description=_describe(f), lhs=lhs, rhs=rhs,
        ratio=lhs / rhs if rhs > 0.0 else None, passed=passed,
        vacuous=lhs == 0.0, hypothesis_ok=True, note="",
        critical=critical if lhs > 0.0 else None,
        params={"t": t, "K": big_k, "log_factor": log_factor},
    )
    return verdict


def check_max_influence(
    f: BooleanFunction, space: Space, c: float = 1.0, use_min_form: bool = True
) -> InequalityVerdict:
    """Largest single influence against c * min(t, 1-t) * log(n)/n.

    Unlike the other checks this one defaults to the min form, matching the
    statement it verifies; pass the flag for the product form.
    """
    if f.n < 2:
        raise ValueError("needs n >= 2")
    report = influence_exact(f, space)
    t = _mean(f, space)
    _require_nondegenerate(t, _describe(f))
    v = _vform(t, use_min_form)
    slope = v * math.log(f.n) / f.n
    lhs = report.max_influence
    rhs = c * slope
    critical = lhs / slope if slope > 0.0 else None
    return _verdict(
        "max_influence", _describe(f), lhs, rhs, lhs >= rhs, True, "",
        critical, {"t": t, "n": f.n, "c": c},
    )


# ---------------------------------------------------------------------------
# frontier search over instance families

CheckFn = Callable[..., InequalityVerdict]

INEQUALITY_IDS: dict[str, CheckFn] = {
    "two_point": check_two_point,
    "two_point_small_max": check_two_point_small_max,
    "three_point": check_three_point,
    "nonuniform": check_nonuniform,
    "talagrand": check_talagrand,
    "delta": check_delta_theorem,
    "max_influence": check_max_influence,
}

LOWER_BOUND_IDS = frozenset(
    ("two_point", "two_point_small_max", "three_point", "nonuniform",
     "talagrand", "max_influence")
)


@dataclass(frozen=True)
class FrontierResult:
    inequality_id: str
    frontier: float  # largest passing constant (lower bounds) / least K (delta)
    witness_index: int
    witness_description: str
    evaluated: int  # informative instances
    excluded: int  # vacuous or hypothesis-violating instances
    verdicts: tuple[InequalityVerdict, ...]


def constant_search(
    inequality_id: str, family: Sequence[Mapping[str, object]]
) -> FrontierResult:
    """Extremal constant over a family of instance keyword-argument maps.

    For the lower bounds the frontier is the least critical constant (the
    largest candidate every instance still passes); for the derivative-norm
    bound it is the greatest critical K. The reduction is an order-invariant
    min/max over informative instances.
    """
    if inequality_id not in INEQUALITY_IDS:
        raise ValueError(f"unknown inequality id {inequality_id!r}")
    if not family:
        raise ValueError("family must be nonempty")
    check = INEQUALITY_IDS[inequality_id]
    verdicts = [check(**kwargs) for kwargs in family]
    informative = [(i, v) for i, v in enumerate(verdicts) if v.informative]
    if not informative:
        raise ValueError("family contains no informative instances")
    pick = min if inequality_id in LOWER_BOUND_IDS else max
    witness_index, witness = pick(informative, key=lambda item: item[1].critical)
    return FrontierResult(
        inequality_id=inequality_id,
        frontier=witness.critical,
        witness_index=witness_index,
        witness_description=witness.description,
        evaluated=len(informative),
        excluded=len(verdicts) - len(informative),
        verdicts=tuple(verdicts),
    )


TWO_POINT_PS = (0.125, 0.25, 0.5)
THREE_POINT_PAIRS = ((0.1, 0.1), (0.25, 0.1), (0.2, 0.3))
NONUNIFORM_PATTERN = (0.125, 0.5, 0.25, 0.375)


def family_from_spec(inequality_id: str, spec: str) -> list[dict]:
    """Instance family from a compact spec string.

    "monotone:n=K": nonconstant increasing functions of arity 1..K crossed
    with a default parameter grid. "builtin:NAME:n=K[:p=V]": one named
    function at one parameter point.
    """
    parts = spec.split(":")
    kind = parts[0]
    opts = {}
    for part in parts[1:]:
        key, _, value = part.partition("=")
        opts[key] = value
    if kind == "monotone":
        n_top = int(opts.get("n", "3"))
        return _monotone_family(inequality_id, n_top)
    if kind == "builtin":
        name = opts.get("name") or parts[1]
        n = int(opts.get("n", "3"))
        base = 3 if inequality_id == "three_point" else 2
        f = builtin_function(name, n, base)
        out = []
        if inequality_id == "three_point":
            for pm, pp in THREE_POINT_PAIRS:
                out.append({"f": f, "p_minus": pm, "p_plus": pp})
        elif inequality_id in ("nonuniform", "delta"):
            for p in (float(opts["p"]),) if "p" in opts else TWO_POINT_PS:
                out.append({"f": f, "probs": (p,) * n})
        elif inequality_id == "max_influence":
            for p in (float(opts["p"]),) if "p" in opts else TWO_POINT_PS:
                out.append({"f": f, "space": TwoPointSpace.uniform(n, p)})
        else:
            for p in (float(opts["p"]),) if "p" in opts else TWO_POINT_PS:
                out.append({"f": f, "p": p})
        return out
    raise ValueError(f"unknown family spec {spec!r}")


def _monotone_family(inequality_id: str, n_top: int) -> list[dict]:
    out: list[dict] = []
    if inequality_id == "three_point":
        for n in range(1, n_top + 1):
            space = ThreePointSpace(n=n, p_minus=0.2, p_plus=0.2)
            for f in enumerate_monotone(space, include_constants=False):
                for pm, pp in THREE_POINT_PAIRS:
                    out.append({"f": f, "p_minus": pm, "p_plus": pp})
        return out
    for n in range(1, n_top + 1):
        space = TwoPointSpace.uniform(n, 0.5)
        for f in enumerate_monotone(space, include_constants=False):
            if inequality_id in ("two_point", "two_point_small_max", "talagrand"):
                for p in TWO_POINT_PS:
                    out.append({"f": f, "p": p})
            elif inequality_id == "nonuniform":
                probs = NONUNIFORM_PATTERN[:n]
                out.append({"f": f, "probs": probs})
                for p in TWO_POINT_PS:
                    out.append({"f": f, "probs": (p,) * n})
            elif inequality_id == "delta":
                for p in TWO_POINT_PS:
                    out.append({"f": f, "probs": (p,) * n})
                out.append({"f": f, "probs": NONUNIFORM_PATTERN[:n]})
            elif inequality_id == "max_influence":
                if n >= 2:
                    for p in TWO_POINT_PS:
                        out.append({"f": f, "space": TwoPointSpace.uniform(n, p)})
            else:
                raise ValueError(f"unknown inequality id {inequality_id!r}")
    return out


# ---------------------------------------------------------------------------
# spectral concentration constant search


@dataclass(frozen=True)
class ConcentrationSearch:
    c1_hat: float
    c2_hat: float
    steps: int
    report: ConcentrationReport


def concentration_constants_search(
    f: BooleanFunction, p: float, m: Optional[int] = None, max_steps: int = 40
) -> ConcentrationSearch:
    """Geometric ladder for the two concentration cutoffs.

    Doubles the degree-cap constant and halves the decay constant until more
    than half the nonconstant spectral mass satisfies both cutoffs with a
    witness level >= 1. Loosening both monotonically can only grow the
    qualifying mass, so the ladder terminates for nondegenerate f.
    """
    embedding = embed_dyadic(p, m)
    space = TwoPointSpace.uniform(f.n, p)
    influences = influence_exact(f, space)
    t = _mean(f, space)
    _require_nondegenerate(t, _describe(f))
    spec = block_spectrum(f, embedding)
    for step in range(max_steps):
        c1 = float(2**step)
        c2 = float(2.0**-step)
        report = concentration_report(spec, influences, t, p, c1, c2)
        if report.both_exceed_half and report.witness_level is not None:
            return ConcentrationSearch(
                c1_hat=c1, c2_hat=c2, steps=step + 1, report=report
            )
    raise ArithmeticError(
        f"no qualifying constants within {max_steps} doublings for "
        f"{_describe(f)}"
    )
