"""Acceptance battery: eight self-contained checks covering the verification
targets of the library at desk scale. Each check returns a structured result
with a pass flag and a one-line detail; `run_all` prints one line per check.

Quick mode shrinks families and trial counts for a fast smoke signal; the
full mode is what the test suite pins.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, TextIO

import numpy as np

from .boolfn import (
    SymmetryGroup,
    at_least_k,
    cyclic_run,
    dictator,
    enumerate_monotone,
    majority,
    tribes,
)
from .influence import embed_dyadic, influence_exact, influence_exact_symmetric, w_embedded
from .ineqlab import (
    _monotone_family,
    concentration_constants_search,
    constant_search,
)
from .jmperc import default_rect, sweep, transition_window
from .spaces import ThreePointSpace, TwoPointSpace
from .spectrum import delta_norms, parseval_check
from .threshold import min_c3_search, russo_check, verify_sharp_threshold
from .influence import wilson_half_width

__all__ = ["CriterionResult", "run_all", "CRITERIA"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  [{self.number}] {self.name} "
            f"({self.seconds:.1f}s): {self.detail}"
        )


def _builtin_battery():
    fns = [
        dictator(2), dictator(4), majority(3), majority(5),
        tribes(2, 2), tribes(3, 2), cyclic_run(5, 2), at_least_k(4, 2),
    ]
    return fns


def check_parseval(quick: bool = False) -> CriterionResult:
    """Variance equals the nonconstant squared-coefficient mass, <= 1e-12."""
    start = time.perf_counter()
    n_top = 3 if quick else 4
    worst = 0.0
    count = 0
    for f in _builtin_battery():
        worst = max(worst, parseval_check(f).error)
        count += 1
    for n in range(1, n_top + 1):
        space = TwoPointSpace.uniform(n, 0.5)
        for f in enumerate_monotone(space):
            worst = max(worst, parseval_check(f).error)
            count += 1
    passed = worst <= 1e-12
    return CriterionResult(
        1, "variance matches spectral mass", passed,
        f"max discrepancy {worst:.3e} over {count} functions",
        time.perf_counter() - start,
    )


def check_delta_identity(quick: bool = False) -> CriterionResult:
    """Derivative-norm identity |Delta_i f|_q^q = I(i)(p q-mix) to 1e-12."""
    start = time.perf_counter()
    n_top = 3 if quick else 4
    ps = (0.25, 0.5) if quick else (0.125, 0.25, 0.5)
    worst = 0.0
    count = 0
    for n in range(1, n_top + 1):
        for p in ps:
            space = TwoPointSpace.uniform(n, p)
            for f in enumerate_monotone(space):
                norms = delta_norms(f, space)
                infl = influence_exact(f, space).per_coordinate
                for i in range(n):
                    for q, norm in ((1, norms.l1[i]), (2, norms.l2[i])):
                        expect = infl[i] * (
                            p * (1 - p) ** q + (1 - p) * p**q
                        )
                        worst = max(worst, abs(norm**q - expect))
                count += 1
    passed = worst <= 1e-12
    return CriterionResult(
        2, "derivative-norm identity", passed,
        f"max discrepancy {worst:.3e} over {count} function/parameter pairs",
        time.perf_counter() - start,
    )


def check_russo(quick: bool = False) -> CriterionResult:
    """Finite-difference slope of g dominates the total influence - 1e-6."""
    start = time.perf_counter()
    n_top = 2 if quick else 3
    h_values = (0.0, 0.1, 0.2) if quick else (0.0, 0.06, 0.12, 0.18, 0.24)
    space_params = (0.3, 0.2)
    worst = math.inf
    count = 0
    for n in range(1, n_top + 1):
        space = ThreePointSpace(n=n, p_minus=space_params[0], p_plus=space_params[1])
        for f in enumerate_monotone(space):
            for h in h_values:
                chk = russo_check(f, space, h, dh=1e-5)
                worst = min(worst, chk.margin)
                count += 1
                if not chk.ok:
                    return CriterionResult(
                        3, "slope dominates influence", False,
                        f"margin {chk.margin:.3e} at h={h} for event "
                        f"{f.name or 'enumerated'} (n={n})",
                        time.perf_counter() - start,
                    )
    return CriterionResult(
        3, "slope dominates influence", True,
        f"min margin {worst:.3e} over {count} event/h pairs",
        time.perf_counter() - start,
    )


def check_embedding(quick: bool = False) -> CriterionResult:
    """Lifted single-coordinate influence equals k 2^(1-k) exactly."""
    start = time.perf_counter()
    ks = range(1, 5 if quick else 7)
    identity = dictator(1)
    ratios = []
    for k in ks:
        p = 2.0**-k
        w = w_embedded(identity, embed_dyadic(p))
        expect = k * 2.0 ** (1 - k)
        if w != expect:
            return CriterionResult(
                4, "embedding influence exact", False,
                f"w = {w!r} differs from {expect!r} at k = {k}",
                time.perf_counter() - start,
            )
        ratios.append(w / (p * math.log(1.0 / p)))
    bound = 2.0 / math.log(2.0)
    ratio_ok = all(r <= bound + 1e-12 for r in ratios)
    return CriterionResult(
        4, "embedding influence exact", ratio_ok,
        f"exact for k in {list(ks)}; max ratio {max(ratios):.12f} "
        f"<= 2/ln2 = {bound:.12f}",
        time.perf_counter() - start,
    )


FRONTIER_IDS = (
    "two_point", "two_point_small_max", "three_point", "nonuniform",
    "talagrand", "max_influence", "delta",
)


def _frontiers(quick: bool) -> dict[str, float]:
    out = {}
    for ineq_id in FRONTIER_IDS:
        # The small-max hypothesis (a <= 1/2) only starts holding at arity 3
        # (e.g. all-coordinates-high events at small p), so those families
        # cannot shrink below n_top = 3.
        small_max = ineq_id in ("two_point_small_max", "three_point")
        if quick:
            n_top = 3 if small_max else 2
        else:
            n_top = 3 if ineq_id == "three_point" else 4
        family = _monotone_family(ineq_id, n_top)
        out[ineq_id] = constant_search(ineq_id, family).frontier
    return out


def check_frontiers(quick: bool = False) -> CriterionResult:
    """Positive lower-bound frontiers, finite K, bit-identical on re-run."""
    start = time.perf_counter()
    first = _frontiers(quick)
    second = _frontiers(quick)
    problems = []
    for ineq_id, value in first.items():
        if not (value > 0.0 and math.isfinite(value)):
            problems.append(f"{ineq_id} frontier {value}")
        if value != second[ineq_id]:
            problems.append(f"{ineq_id} not reproducible")
    summary = ", ".join(f"{k}={v:.4g}" for k, v in first.items())
    return CriterionResult(
        5, "constant frontiers", not problems,
        "; ".join(problems) if problems else summary,
        time.perf_counter() - start,
    )


CERT_ENDPOINTS = {"p_minus": 0.3, "p_plus": 0.1, "q_minus": 0.05, "q_plus": 0.34}
CERT_ETA = 0.2


def check_certificates(quick: bool = False) -> CriterionResult:
    """Transfer certificates for cyclic any-coordinate-high events."""
    start = time.perf_counter()
    ns = (4,) if quick else (4, 5, 6)
    family = [(at_least_k(n, 1, base=3), SymmetryGroup.cyclic(n)) for n in ns]
    search = min_c3_search(family, CERT_ETA, **CERT_ENDPOINTS)
    problems = []
    for (event, group), n in zip(family, ns):
        cert = verify_sharp_threshold(
            event, group, eta=CERT_ETA, c3=search.value,
            grid_points=9 if quick else 33, **CERT_ENDPOINTS,
        )
        if not cert.verdict or cert.vacuous:
            problems.append(f"n={n} verdict {cert.verdict} vacuous {cert.vacuous}")
        if not cert.lb_ok:
            problems.append(f"n={n} window bound not met at c3={search.value:.3g}")
        plain = influence_exact(event, ThreePointSpace(n=n, **{
            "p_minus": CERT_ENDPOINTS["p_minus"],
            "p_plus": CERT_ENDPOINTS["p_plus"],
        }))
        if len(set(plain.per_coordinate)) != 1:
            problems.append(f"n={n} influences not orbit-constant")
        fast = influence_exact_symmetric(
            event,
            ThreePointSpace(
                n=n, p_minus=CERT_ENDPOINTS["p_minus"],
                p_plus=CERT_ENDPOINTS["p_plus"],
            ),
            group,
        )
        if fast.per_coordinate != plain.per_coordinate:
            problems.append(f"n={n} symmetric path differs from plain path")
    detail = (
        "; ".join(problems) if problems else
        f"c3 frontier {search.value:.3g} "
        f"({'lower probe' if search.at_lower_probe else 'bisection'}), "
        f"all verdicts true, influences orbit-constant bit for bit"
    )
    return CriterionResult(
        6, "threshold transfer certificates", not problems, detail,
        time.perf_counter() - start,
    )


JM_SEED = 20250823


def check_jm(quick: bool = False) -> CriterionResult:
    """Crossing frequencies rise across p = 1/2 with exact coupling, the
    self-dual gap sits inside Monte Carlo error, and the transition window
    narrows with scale."""
    start = time.perf_counter()
    s, trials = (10.0, 60) if quick else (20.0, 400)
    res = sweep(
        s=s, lam=1.0, p_grid=(0.35, 0.5, 0.65), trials=trials, seed=JM_SEED,
        rect=default_rect(s, "square"), direction="horizontal", dual=True,
    )
    problems = []
    if not res.freq[0] < res.freq[2]:
        problems.append(f"freq(0.35)={res.freq[0]} !< freq(0.65)={res.freq[2]}")
    if not np.all(res.indicators[:, :-1] <= res.indicators[:, 1:]):
        problems.append("per-trial coupling monotonicity violated")
    k_mid = int(res.indicators[:, 1].sum())
    hw = wilson_half_width(k_mid, trials)
    gap = abs(res.freq[1] - res.dual_freq[1])
    if gap > 2.0 * hw:
        problems.append(f"self-dual gap {gap:.4f} > 2*half-width {2*hw:.4f}")
    windows = {}
    if not quick:
        grid = tuple(round(0.25 + 0.05 * i, 2) for i in range(11))
        for side, wtrials in ((10.0, 300), (20.0, 300), (40.0, 200)):
            ws = sweep(
                s=side, lam=1.0, p_grid=grid, trials=wtrials,
                seed=JM_SEED + int(side), rect=default_rect(side, "square"),
            )
            windows[side] = transition_window(ws.ps, ws.freq)
        if any(w is None for w in windows.values()):
            problems.append(f"transition window not bracketed: {windows}")
        else:
            sides = sorted(windows)
            if not (windows[sides[0]] > windows[sides[1]] > windows[sides[2]]):
                problems.append(f"window widths not decreasing: {windows}")
    win_txt = (
        ", windows " + ", ".join(f"s={k:g}:{v:.3f}" for k, v in windows.items())
        if windows else ""
    )
    detail = (
        "; ".join(problems) if problems else
        f"freq {res.freq[0]:.3f} -> {res.freq[2]:.3f}, coupling exact, "
        f"dual gap {gap:.4f} <= {2*hw:.4f}{win_txt}"
    )
    return CriterionResult(
        7, "tessellation sharp threshold", not problems, detail,
        time.perf_counter() - start,
    )


def check_concentration(quick: bool = False) -> CriterionResult:
    """For small monotone functions, reported constants put more than half
    the nonconstant spectral mass under both cutoffs with a witness level."""
    start = time.perf_counter()
    count = 0
    for n in (1, 2):
        space = TwoPointSpace.uniform(n, 0.5)
        for f in enumerate_monotone(space, include_constants=False):
            for p in (0.25, 0.5):
                found = concentration_constants_search(f, p)
                rep = found.report
                ok = (
                    rep.both_exceed_half
                    and rep.witness_level is not None
                    and rep.witness_level >= 1
                )
                if not ok:
                    return CriterionResult(
                        8, "spectral concentration", False,
                        f"no qualifying constants for n={n}, p={p}",
                        time.perf_counter() - start,
                    )
                count += 1
    return CriterionResult(
        8, "spectral concentration", True,
        f"witness level >= 1 with majority mass on {count} instances",
        time.perf_counter() - start,
    )


CRITERIA: tuple[tuple[int, Callable[[bool], CriterionResult]], ...] = (
    (1, check_parseval),
    (2, check_delta_identity),
    (3, check_russo),
    (4, check_embedding),
    (5, check_frontiers),
    (6, check_certificates),
    (7, check_jm),
    (8, check_concentration),
)


def run_all(quick: bool = False, stream: Optional[TextIO] = None) -> list[CriterionResult]:
    results = []
    for _, check in CRITERIA:
        result = check(quick)
        results.append(result)
        if stream is not None:
            print(result.line(), file=stream, flush=True)
    return results
