"""Command-line driver: parses experiment configs, dispatches to the library,
and emits deterministic CSV/JSON artifacts.

Conventions shared by every subcommand:
  - numeric output uses 12 significant digits;
  - the resolved configuration is echoed (comment header in CSV, a "config"
    object in JSON) so artifacts are self-describing;
  - files are written atomically (temp file + rename), so failures leave no
    partial output behind;
  - exit codes: 0 ok, 2 bad input, 3 enumeration size refusal, 4 violated
    mathematical hypotheses, 1 anything else.

A JSON config file (--config) supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .acceptance import run_all
from .boolfn import (
    BooleanFunction,
    SymmetryGroup,
    builtin_function,
    parse_table,
    tribes,
)
from .errors import HypothesisError, SizeLimitError
from .influence import embed_dyadic, influence_exact, influence_mc, influence_onesided
from .ineqlab import (
    INEQUALITY_IDS,
    constant_search,
    family_from_spec,
)
from .jmperc import default_rect, rasterize, render_ppm, sample_jm, sweep
from .spaces import Space, ThreePointSpace, TwoPointSpace
from .spectrum import block_spectrum, parseval_check
from .threshold import g_curve, verify_sharp_threshold

__all__ = ["main"]

EXIT_GENERIC = 1
EXIT_SCHEMA = 2
EXIT_SIZE = 3
EXIT_HYPOTHESIS = 4

WORKERS_ENV = "SHARPTHRESHOLD_WORKERS"


# ---------------------------------------------------------------------------
# formatting and atomic emission


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    if isinstance(value, (tuple, list)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _round12(obj: Any) -> Any:
    """Recursively clamp floats to 12 significant digits for JSON output."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round12(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _atomic_write(path: Optional[str], writer: Callable[[str], None]) -> None:
    """Run `writer(tmp_path)` and rename into place; never leave partials."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    suffix = os.path.splitext(path)[1]
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-", suffix=suffix)
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return

    def write(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)

    _atomic_write(path, write)


def _csv_document(
    config: dict,
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    trailer: Sequence[str] = (),
) -> str:
    buf = io.StringIO()
    for key, value in config.items():
        buf.write(f"# {key} = {_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for line in trailer:
        buf.write(line + "\n")
    return buf.getvalue()


def _json_document(config: dict, payload: dict) -> str:
    doc = {"config": _round12(config)}
    doc.update(_round12(payload))
    return json.dumps(doc, indent=2) + "\n"


def _emit(
    args,
    config: dict,
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    payload: Optional[dict] = None,
    trailer: Sequence[str] = (),
) -> None:
    config = {k: v for k, v in config.items() if v is not None}
    fmt = _opt(args, "format", "csv")
    if fmt == "json":
        body = payload if payload is not None else {}
        body.setdefault("columns", list(columns))
        body.setdefault("rows", [list(r) for r in rows])
        text = _json_document(config, body)
    elif fmt == "csv":
        text = _csv_document(config, columns, rows, trailer)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    _emit_text(_opt(args, "out"), text)


# ---------------------------------------------------------------------------
# config-file merge


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _opt(args, dest: str, default: Any = None, required: bool = False) -> Any:
    """CLI flag if given, else config-file entry, else default."""
    value = getattr(args, dest, None)
    if value is None:
        value = getattr(args, "_config", {}).get(dest, default)
    if required and value is None:
        raise ValueError(f"missing required parameter '{dest}'")
    return value


# ---------------------------------------------------------------------------
# spec mini-languages


_FUNC_RE = re.compile(
    r"^(?P<name>[A-Za-z_]+?)(?P<arity>\d+)?(?:\((?P<args>[^)]*)\))?$"
)
_TABLE_RE = re.compile(r"^b\d+n\d+:")


def parse_function_spec(
    spec: str, base: int, n_hint: Optional[int] = None
) -> BooleanFunction:
    """Resolve a function argument: serialized-table file, serialized table,
    or built-in keyword with the arity appended (e.g. "majority3")."""
    spec = spec.strip()
    if os.path.isfile(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            spec = fh.read().strip()
    if _TABLE_RE.match(spec):
        f = parse_table(spec)
        if f.base != base:
            raise ValueError(
                f"table alphabet size {f.base} does not fit this subcommand "
                f"(needs {base})"
            )
        return f
    match = _FUNC_RE.match(spec)
    if not match:
        raise ValueError(f"cannot parse function spec {spec!r}")
    name = match.group("name")
    arity = match.group("arity")
    argtext = match.group("args")
    n = int(arity) if arity else n_hint
    if name == "tribes" and argtext:
        b, w = (int(a) for a in argtext.split(","))
        fn = tribes(b, w, base)
        if n is not None and fn.n != n:
            raise ValueError(f"tribes({b},{w}) has arity {fn.n}, not {n}")
        return fn
    if n is None:
        raise ValueError(
            f"cannot infer the arity of {spec!r}; append it to the name "
            "(e.g. majority3) or give per-coordinate probabilities"
        )
    inner = f"{name}({argtext})" if argtext is not None else name
    return builtin_function(inner, n, base)


def _parse_kv(rest: str) -> dict:
    """key=value pairs separated by commas; bare tokens continue the
    previous value (so probs=0.1,0.2 parses as one entry)."""
    opts: dict[str, str] = {}
    last = None
    for token in rest.split(","):
        if "=" in token:
            key, _, value = token.partition("=")
            opts[key.strip()] = value.strip()
            last = key.strip()
        elif last is not None:
            opts[last] += "," + token.strip()
        elif token.strip():
            raise ValueError(f"stray token {token!r} in spec")
    return opts


def parse_space_spec(spec: str, n_hint: Optional[int] = None) -> Space:
    """Space argument: "v:p=0.5" or "v:probs=0.1,0.25" for the weighted
    cube, "w:p-=0.3,p+=0.1" for the three-point space. Arity comes from the
    probability list or from the function."""
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"space spec {spec!r} needs a 'v:' or 'w:' prefix")
    opts = _parse_kv(rest)
    if kind == "v":
        if "probs" in opts:
            probs = tuple(float(x) for x in opts["probs"].split(","))
            if n_hint is not None and len(probs) != n_hint:
                raise ValueError(
                    f"{len(probs)} probabilities for arity {n_hint}"
                )
            return TwoPointSpace(probs)
        if "p" in opts:
            if n_hint is None:
                raise ValueError("uniform space needs the function's arity")
            return TwoPointSpace.uniform(n_hint, float(opts["p"]))
        raise ValueError("two-point space spec needs p= or probs=")
    if kind == "w":
        pm = opts.get("p-", opts.get("pm", opts.get("p_minus")))
        pp = opts.get("p+", opts.get("pp", opts.get("p_plus")))
        if pm is None or pp is None:
            raise ValueError("three-point space spec needs p-= and p+=")
        if n_hint is None:
            raise ValueError("three-point space needs the function's arity")
        return ThreePointSpace(n=n_hint, p_minus=float(pm), p_plus=float(pp))
    raise ValueError(f"unknown space kind {kind!r} (use 'v' or 'w')")


def _function_arity_hint(spec: str) -> Optional[int]:
    spec = spec.strip()
    if os.path.isfile(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            spec = fh.read().strip()
    m = re.match(r"^b(\d+)n(\d+):", spec)
    if m:
        return int(m.group(2))
    m = _FUNC_RE.match(spec)
    if m and m.group("arity"):
        return int(m.group("arity"))
    if m and m.group("name") == "tribes" and m.group("args"):
        b, w = (int(a) for a in m.group("args").split(","))
        return b * w
    return None


def parse_p_grid(spec: str) -> tuple[float, ...]:
    """"a:b:step" inclusive range, or a comma list, or a single value."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError("p range must look like start:stop:step")
        a, b, step = (float(x) for x in parts)
        if step <= 0 or b < a:
            raise ValueError("p range needs stop >= start and step > 0")
        count = int(round((b - a) / step))
        grid = [round(a + i * step, 12) for i in range(count + 1)]
        if grid[-1] > b + 1e-12:
            grid.pop()
        return tuple(grid)
    return tuple(float(x) for x in spec.split(","))


def parse_rect_spec(spec: str, s: float) -> tuple[float, float, float, float]:
    if spec in ("wide", "thin", "square"):
        return default_rect(s, spec)
    parts = [float(x) for x in spec.split(",")]
    if len(parts) != 4:
        raise ValueError("rect must be a preset name or x0,y0,width,height")
    return (parts[0], parts[1], parts[2], parts[3])


def parse_group_spec(spec: str, n: int) -> SymmetryGroup:
    if spec == "cyclic":
        return SymmetryGroup.cyclic(n)
    if spec == "trivial":
        return SymmetryGroup.trivial(n)
    raise ValueError(f"unknown group spec {spec!r} (use cyclic or trivial)")


# ---------------------------------------------------------------------------
# subcommand handlers


def _space_and_function(args):
    fspec = _opt(args, "function", required=True)
    sspec = _opt(args, "space", required=True)
    n_hint = _function_arity_hint(fspec)
    space = parse_space_spec(sspec, n_hint)
    f = parse_function_spec(fspec, space.base, space.n)
    if f.n != space.n:
        raise ValueError(f"function arity {f.n} != space arity {space.n}")
    return space, f


def cmd_influence(args) -> int:
    space, f = _space_and_function(args)
    trials = _opt(args, "mc")
    seed = _opt(args, "seed", 0)
    onesided = bool(_opt(args, "onesided", False))
    if trials is not None:
        report = influence_mc(f, space, seed=int(seed), trials=int(trials))
    elif onesided:
        report = influence_onesided(f, space)
    else:
        report = influence_exact(f, space)
    config = {
        "subcommand": "influence",
        "function": _opt(args, "function"),
        "space": _opt(args, "space"),
        "method": report.method,
        "trials": trials,
        "seed": seed if trials is not None else None,
        "total": report.total,
        "max_influence": report.max_influence,
    }
    rows = [
        (i + 1, report.per_coordinate[i], report.half_width[i])
        for i in range(space.n)
    ]
    _emit(args, config, ("coordinate", "influence", "half_width"), rows)
    plot = _opt(args, "plot")
    if plot:
        from .plots import plot_influence

        _atomic_write(plot, lambda tmp: plot_influence(report, tmp))
    return 0


def cmd_spectrum(args) -> int:
    space, f = _space_and_function(args)
    if not isinstance(space, TwoPointSpace) or not space.is_uniform_p():
        raise ValueError(
            "spectral analysis runs on the weighted cube with one shared p"
        )
    p = space.probs[0]
    m = _opt(args, "embedding")
    embedding = embed_dyadic(p, int(m) if m is not None else None)
    spec_result = block_spectrum(f, embedding)
    pcheck = parseval_check(f, embedding)
    config = {
        "subcommand": "spectrum",
        "function": _opt(args, "function"),
        "space": _opt(args, "space"),
        "embedding_bits": embedding.m,
        "total_bits": spec_result.n * spec_result.m,
        "mean": spec_result.t,
        "nonconstant_mass": spec_result.weight_nonconstant,
        "parseval_error": pcheck.error,
    }
    rows = [
        (level, weight)
        for level, weight in enumerate(spec_result.weights_by_level)
    ]
    _emit(args, config, ("level", "weight"), rows)
    plot = _opt(args, "plot")
    if plot:
        from .plots import plot_spectrum

        _atomic_write(plot, lambda tmp: plot_spectrum(spec_result, tmp))
    return 0


def _threshold_event(args):
    fspec = _opt(args, "event", required=True)
    n_hint = _function_arity_hint(fspec)
    if n_hint is None:
        raise ValueError("append the arity to the event name (e.g. at_least_k4(1))")
    return parse_function_spec(fspec, 3, n_hint)


def cmd_threshold_curve(args) -> int:
    event = _threshold_event(args)
    p_minus = float(_opt(args, "p_minus", required=True))
    p_plus = float(_opt(args, "p_plus", required=True))
    space = ThreePointSpace(n=event.n, p_minus=p_minus, p_plus=p_plus)
    grid = int(_opt(args, "grid", 33))
    trials = _opt(args, "mc")
    seed = _opt(args, "seed", 0)
    h_grid = np.linspace(0.0, space.p_minus * (1.0 - 1e-9), grid)
    if trials is not None:
        curve = g_curve(
            event, space, h_grid, method="monte_carlo",
            seed=int(seed), trials=int(trials),
        )
    else:
        curve = g_curve(event, space, h_grid)
    config = {
        "subcommand": "threshold curve",
        "event": _opt(args, "event"),
        "p_minus": p_minus,
        "p_plus": p_plus,
        "grid": grid,
        "method": curve.method,
        "trials": trials,
        "seed": seed if trials is not None else None,
    }
    rows = [(s.h, s.g, s.logit) for s in curve.samples]
    _emit(args, config, ("h", "g", "logit"), rows)
    plot = _opt(args, "plot")
    if plot:
        from .plots import plot_threshold_curve

        _atomic_write(plot, lambda tmp: plot_threshold_curve(curve, tmp))
    return 0


def cmd_threshold_verify(args) -> int:
    event = _threshold_event(args)
    group = parse_group_spec(_opt(args, "group", "cyclic"), event.n)
    params = {
        "p_minus": float(_opt(args, "p_minus", required=True)),
        "p_plus": float(_opt(args, "p_plus", required=True)),
        "q_minus": float(_opt(args, "q_minus", required=True)),
        "q_plus": float(_opt(args, "q_plus", required=True)),
        "eta": float(_opt(args, "eta", required=True)),
        "c3": float(_opt(args, "c3", required=True)),
    }
    grid = int(_opt(args, "grid", 33))
    cert = verify_sharp_threshold(event, group, grid_points=grid, **params)
    config = {
        "subcommand": "threshold verify",
        "event": _opt(args, "event"),
        "group": _opt(args, "group", "cyclic"),
        **params,
        "grid": grid,
    }
    scalar_fields = (
        "n", "m", "pmax", "hmax", "bound", "lb_ok", "g_start", "g_end",
        "logit_start", "logit_end", "vacuous", "verdict",
    )
    scalars = {name: getattr(cert, name) for name in scalar_fields}
    trace_cols = (
        "h", "t", "max_influence", "total_influence", "branch", "a",
        "need_rhs", "need_ok",
    )
    trace_rows = [
        tuple(getattr(sample, col) for col in trace_cols)
        for sample in cert.branch_trace
    ]
    fmt = _opt(args, "format", "text")
    if fmt == "json":
        payload = {
            "certificate": scalars,
            "trace_columns": list(trace_cols),
            "trace": [list(r) for r in trace_rows],
        }
        _emit_text(_opt(args, "out"), _json_document(config, payload))
    elif fmt in ("text", "csv"):
        buf = io.StringIO()
        for key, value in config.items():
            buf.write(f"# {key} = {_fmt(value)}\n")
        for name, value in scalars.items():
            buf.write(f"{name} = {_fmt(value)}\n")
        buf.write("trace:\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(trace_cols)
        for row in trace_rows:
            writer.writerow([_fmt(v) for v in row])
        _emit_text(_opt(args, "out"), buf.getvalue())
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    return 0


def _ineq_kwargs(args, ineq_id: str) -> dict:
    if ineq_id not in INEQUALITY_IDS:
        raise ValueError(
            f"unknown inequality id {ineq_id!r}; known: "
            + ", ".join(sorted(INEQUALITY_IDS))
        )
    base = 3 if ineq_id == "three_point" else 2
    fspec = _opt(args, "function", required=True)
    n_hint = _function_arity_hint(fspec)
    probs_opt = _opt(args, "probs")
    probs = (
        tuple(float(x) for x in str(probs_opt).split(","))
        if probs_opt is not None else None
    )
    if n_hint is None and probs is not None:
        n_hint = len(probs)
    f = parse_function_spec(fspec, base, n_hint)
    c = float(_opt(args, "c", 1.0))
    min_form = bool(_opt(args, "min_form", False))
    if ineq_id == "two_point":
        return {"f": f, "p": float(_opt(args, "p", required=True)), "c": c,
                "use_min_form": min_form}
    if ineq_id == "two_point_small_max":
        a = _opt(args, "a")
        return {"f": f, "p": float(_opt(args, "p", required=True)), "c": c,
                "a": float(a) if a is not None else None,
                "use_min_form": min_form}
    if ineq_id == "three_point":
        a = _opt(args, "a")
        return {
            "f": f,
            "p_minus": float(_opt(args, "p_minus", required=True)),
            "p_plus": float(_opt(args, "p_plus", required=True)),
            "c": c, "a": float(a) if a is not None else None,
            "use_min_form": min_form,
        }
    if ineq_id == "nonuniform":
        if probs is None:
            p = float(_opt(args, "p", required=True))
            probs = (p,) * f.n
        return {"f": f, "probs": probs, "c": c, "use_min_form": min_form}
    if ineq_id == "talagrand":
        eps = _opt(args, "eps")
        return {"f": f, "p": float(_opt(args, "p", required=True)), "c": c,
                "eps": float(eps) if eps is not None else None,
                "use_min_form": min_form}
    if ineq_id == "delta":
        if probs is None:
            p = float(_opt(args, "p", required=True))
            probs = (p,) * f.n
        return {"f": f, "probs": probs, "big_k": float(_opt(args, "big_k", 1.0))}
    if ineq_id == "max_influence":
        p = float(_opt(args, "p", required=True))
        return {"f": f, "space": TwoPointSpace.uniform(f.n, p), "c": c,
                "use_min_form": min_form}
    raise ValueError(f"unhandled inequality id {ineq_id!r}")


_VERDICT_COLUMNS = (
    "instance", "lhs", "rhs", "ratio", "critical", "passed", "vacuous",
    "hypothesis_ok", "note",
)


def _verdict_row(v) -> tuple:
    return (
        v.description, v.lhs, v.rhs, v.ratio, v.critical, v.passed,
        v.vacuous, v.hypothesis_ok, v.note,
    )


def cmd_ineq_check(args) -> int:
    ineq_id = _opt(args, "id", required=True)
    kwargs = _ineq_kwargs(args, ineq_id)
    verdict = INEQUALITY_IDS[ineq_id](**kwargs)
    config = {
        "subcommand": "ineq check",
        "id": ineq_id,
        "function": _opt(args, "function"),
    }
    for key, value in kwargs.items():
        if key == "f":
            continue
        if key == "space":
            config["p"] = value.probs[0]
        else:
            config[key] = value
    summary = (
        f"# {'PASS' if verdict.passed else 'FAIL'} ratio = {_fmt(verdict.ratio)} "
        f"critical = {_fmt(verdict.critical)}"
    )
    _emit(
        args, config, _VERDICT_COLUMNS, [_verdict_row(verdict)],
        payload={"summary": {"passed": verdict.passed,
                             "ratio": verdict.ratio,
                             "critical": verdict.critical}},
        trailer=[summary],
    )
    return 0


def cmd_ineq_frontier(args) -> int:
    ineq_id = _opt(args, "id", required=True)
    family_spec = _opt(args, "family", required=True)
    family = family_from_spec(ineq_id, family_spec)
    result = constant_search(ineq_id, family)
    config = {
        "subcommand": "ineq frontier",
        "id": ineq_id,
        "family": family_spec,
        "instances": len(family),
        "evaluated": result.evaluated,
        "excluded": result.excluded,
    }
    rows = []
    for kwargs, v in zip(family, result.verdicts):
        f = kwargs["f"]
        extras = [f"n={f.n}"]
        for key, val in kwargs.items():
            if key == "f":
                continue
            if key == "space":
                extras.append(f"p={_fmt(val.probs[0])}")
            elif key == "probs":
                extras.append("probs=" + "|".join(_fmt(x) for x in val))
            else:
                extras.append(f"{key}={_fmt(val)}")
        rows.append((f"{v.description} {' '.join(extras)}", v.ratio, v.passed))
    summary = (
        f"# frontier = {_fmt(result.frontier)} witness = "
        f"{result.witness_description}"
    )
    _emit(
        args, config, ("instance", "ratio", "verdict"), rows,
        payload={"summary": {
            "frontier": result.frontier,
            "witness": result.witness_description,
            "witness_index": result.witness_index,
        }},
        trailer=[summary],
    )
    return 0


def cmd_jm_sweep(args) -> int:
    s = float(_opt(args, "s", required=True))
    lam = float(_opt(args, "lam", required=True))
    grid_spec = _opt(args, "p", required=True)
    ps = parse_p_grid(str(grid_spec))
    trials = int(_opt(args, "trials", required=True))
    seed = int(_opt(args, "seed", 0))
    resolution = int(_opt(args, "resolution", 8))
    direction = _opt(args, "direction", "horizontal")
    rect = parse_rect_spec(str(_opt(args, "rect", "wide")), s)
    dual = bool(_opt(args, "dual", False))
    result = sweep(
        s=s, lam=lam, p_grid=ps, trials=trials, seed=seed, rect=rect,
        direction=direction, resolution=resolution, dual=dual,
    )
    config = {
        "subcommand": "jm sweep",
        "s": s,
        "lambda": lam,
        "p": grid_spec,
        "trials": trials,
        "seed": seed,
        "resolution": resolution,
        "direction": direction,
        "rect": rect,
        "dual": dual,
    }
    columns = ["p", "crossing_freq", "wilson_low", "wilson_high"]
    rows = []
    for j, p in enumerate(result.ps):
        row = [p, result.freq[j], result.wilson_low[j], result.wilson_high[j]]
        if dual:
            row.append(result.dual_freq[j])
        rows.append(tuple(row))
    if dual:
        columns.append("dual_freq")
    _emit(args, config, columns, rows)
    plot = _opt(args, "plot")
    if plot:
        from .plots import plot_sweep

        _atomic_write(plot, lambda tmp: plot_sweep(result, tmp))
    return 0


def cmd_jm_render(args) -> int:
    s = float(_opt(args, "s", required=True))
    lam = float(_opt(args, "lam", required=True))
    p = float(_opt(args, "p", required=True))
    seed = int(_opt(args, "seed", 0))
    resolution = int(_opt(args, "resolution", 8))
    out = _opt(args, "out")
    if out is None:
        raise ValueError("jm render writes binary output; --out is required")
    config = sample_jm(s=s, lam=lam, color_p=p, seed=seed)
    raster = rasterize(config, resolution)
    _atomic_write(out, lambda tmp: render_ppm(raster, tmp))
    print(
        f"# wrote {out}: s = {_fmt(s)} lambda = {_fmt(lam)} p = {_fmt(p)} "
        f"seed = {seed} resolution = {resolution} seeds = {config.count}"
    )
    plot = _opt(args, "plot")
    if plot:
        from .plots import plot_raster

        _atomic_write(plot, lambda tmp: plot_raster(raster, tmp))
    return 0


def cmd_accept(args) -> int:
    quick = bool(getattr(args, "quick", False))
    results = run_all(quick=quick, stream=sys.stdout)
    passed = sum(r.passed for r in results)
    overall = passed == len(results)
    print(f"{'PASS' if overall else 'FAIL'}  {passed}/{len(results)} criteria"
          f"{' (quick mode)' if quick else ''}")
    return 0 if overall else 1


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sub: argparse.ArgumentParser, formats=("csv", "json")) -> None:
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=formats, help="output format")
    sub.add_argument("--config", help="JSON file with default parameters")


def _add_endpoint_flags(sub: argparse.ArgumentParser, include_q: bool) -> None:
    sub.add_argument("--p-", "--p-minus", dest="p_minus", type=float,
                     help="minus-state probability at h = 0")
    sub.add_argument("--p+", "--p-plus", dest="p_plus", type=float,
                     help="plus-state probability at h = 0")
    if include_q:
        sub.add_argument("--q-", "--q-minus", dest="q_minus", type=float,
                         help="minus-state probability at the far end")
        sub.add_argument("--q+", "--q-plus", dest="q_plus", type=float,
                         help="plus-state probability at the far end")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharpthreshold",
        description=(
            "Influence, spectrum, and threshold experiments on weighted "
            "product spaces, plus a tessellation percolation simulator."
        ),
        allow_abbrev=False,
    )
    subs = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    p_inf = subs.add_parser(
        "influence", help="per-coordinate influences", allow_abbrev=False
    )
    p_inf.add_argument("--function", help="built-in name or table file")
    p_inf.add_argument("--space", help="v:p=0.5 / v:probs=... / w:p-=..,p+=..")
    p_inf.add_argument("--mc", type=int, help="Monte Carlo trials")
    p_inf.add_argument("--seed", type=int)
    p_inf.add_argument("--onesided", action="store_true", default=None,
                       help="count only upward pivotal moves")
    p_inf.add_argument("--plot", help="also render a bar chart to this path")
    _add_common(p_inf)
    p_inf.set_defaults(handler=cmd_influence)

    p_spec = subs.add_parser(
        "spectrum", help="level weights through the dyadic embedding",
        allow_abbrev=False,
    )
    p_spec.add_argument("--function")
    p_spec.add_argument("--space", help="v:p=... with dyadic p")
    p_spec.add_argument("--embedding", type=int, metavar="M",
                        help="bits per coordinate (default: minimal)")
    p_spec.add_argument("--plot")
    _add_common(p_spec)
    p_spec.set_defaults(handler=cmd_spectrum)

    p_thr = subs.add_parser(
        "threshold", help="event probability along the coupled path",
        allow_abbrev=False,
    )
    thr_subs = p_thr.add_subparsers(dest="mode", metavar="MODE")

    p_curve = thr_subs.add_parser("curve", allow_abbrev=False)
    p_curve.add_argument("--event", help="three-point event, arity appended")
    _add_endpoint_flags(p_curve, include_q=False)
    p_curve.add_argument("--grid", type=int, help="number of h samples")
    p_curve.add_argument("--mc", type=int, help="Monte Carlo trials")
    p_curve.add_argument("--seed", type=int)
    p_curve.add_argument("--plot")
    _add_common(p_curve)
    p_curve.set_defaults(handler=cmd_threshold_curve)

    p_verify = thr_subs.add_parser("verify", allow_abbrev=False)
    p_verify.add_argument("--event")
    p_verify.add_argument("--group", choices=("cyclic", "trivial"))
    _add_endpoint_flags(p_verify, include_q=True)
    p_verify.add_argument("--eta", type=float)
    p_verify.add_argument("--c3", type=float)
    p_verify.add_argument("--grid", type=int)
    _add_common(p_verify, formats=("text", "json"))
    p_verify.set_defaults(handler=cmd_threshold_verify)

    p_ineq = subs.add_parser(
        "ineq", help="influence inequality checks", allow_abbrev=False
    )
    ineq_subs = p_ineq.add_subparsers(dest="mode", metavar="MODE")

    p_check = ineq_subs.add_parser("check", allow_abbrev=False)
    p_check.add_argument("--id", help="inequality identifier")
    p_check.add_argument("--function")
    p_check.add_argument("--p", type=float)
    p_check.add_argument("--probs", help="comma list of probabilities")
    _add_endpoint_flags(p_check, include_q=False)
    p_check.add_argument("--c", type=float, help="candidate constant")
    p_check.add_argument("--big-k", dest="big_k", type=float,
                         help="candidate constant for the delta bound")
    p_check.add_argument("--a", type=float, help="max-influence cap")
    p_check.add_argument("--eps", type=float, help="pivotal-probability cap")
    p_check.add_argument("--min-form", dest="min_form", action="store_true",
                         default=None, help="use min(t,1-t) instead of t(1-t)")
    _add_common(p_check)
    p_check.set_defaults(handler=cmd_ineq_check)

    p_front = ineq_subs.add_parser("frontier", allow_abbrev=False)
    p_front.add_argument("--id")
    p_front.add_argument("--family", help="monotone:n=K or builtin:NAME:n=K")
    _add_common(p_front)
    p_front.set_defaults(handler=cmd_ineq_frontier)

    p_jm = subs.add_parser(
        "jm", help="tessellation percolation simulator", allow_abbrev=False
    )
    jm_subs = p_jm.add_subparsers(dest="mode", metavar="MODE")

    p_sweep = jm_subs.add_parser("sweep", allow_abbrev=False)
    p_sweep.add_argument("--s", type=float, help="torus side length")
    p_sweep.add_argument("--lambda", dest="lam", type=float,
                         help="seed intensity per unit volume")
    p_sweep.add_argument("--p", help="color density grid: a:b:step or list")
    p_sweep.add_argument("--trials", type=int)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--rect", help="wide | thin | square | x0,y0,w,h")
    p_sweep.add_argument("--direction", choices=("horizontal", "vertical"))
    p_sweep.add_argument("--resolution", type=int, help="pixels per unit length")
    p_sweep.add_argument("--dual", action="store_true", default=None,
                         help="also score the opposite color's perpendicular crossing")
    p_sweep.add_argument("--plot")
    _add_common(p_sweep)
    p_sweep.set_defaults(handler=cmd_jm_sweep)

    p_render = jm_subs.add_parser("render", allow_abbrev=False)
    p_render.add_argument("--s", type=float)
    p_render.add_argument("--lambda", dest="lam", type=float)
    p_render.add_argument("--p", type=float, help="color density")
    p_render.add_argument("--seed", type=int)
    p_render.add_argument("--resolution", type=int)
    p_render.add_argument("--out", help="output pixmap path (required)")
    p_render.add_argument("--plot", help="also render a figure to this path")
    p_render.add_argument("--config", help="JSON file with default parameters")
    p_render.set_defaults(handler=cmd_jm_render)

    p_acc = subs.add_parser(
        "accept", help="run the acceptance battery", allow_abbrev=False
    )
    p_acc.add_argument("--quick", action="store_true",
                       help="reduced families and trial counts")
    p_acc.set_defaults(handler=cmd_accept)

    return parser


def _check_workers_env() -> None:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {value}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help(file=sys.stderr)
        return EXIT_SCHEMA
    try:
        _check_workers_env()
        args._config = _load_config_file(getattr(args, "config", None))
        return handler(args)
    except SizeLimitError as exc:
        print(f"error[size-limit]: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except HypothesisError as exc:
        print(f"error[hypothesis]: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error[schema]: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ArithmeticError as exc:
        print(f"error[numeric]: {exc}", file=sys.stderr)
        return EXIT_GENERIC
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_GENERIC


if __name__ == "__main__":
    sys.exit(main())
