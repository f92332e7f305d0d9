"""Johnson-Mehl tessellation percolation on a flat torus.

Seeds arrive at Poisson times and grow at unit speed, so a point belongs to
the seed minimizing arrival time plus torus distance (additively weighted
Voronoi). Colors come from per-seed uniform marks compared against a black
probability, which couples all color densities on one seed set: raising p
only turns white cells black, making every crossing indicator monotone.

Rasterization computes exact owners on a pixel grid. Distances are derived
from integer pixel offsets plus the seed's sub-pixel fraction; with a
power-of-two resolution this makes owner maps bitwise invariant under
whole-pixel torus translations of the seed set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .influence import wilson_half_width
from .spaces import ThreePointSpace

__all__ = [
    "JMConfiguration",
    "RasterColoring",
    "DiscreteGrid",
    "SweepResult",
    "sample_jm",
    "translate",
    "rasterize",
    "recolor",
    "crossing",
    "discretize",
    "sweep",
    "transition_window",
    "default_rect",
    "render_ppm",
]

UPPER_BOUND_SEEDS = 128  # earliest arrivals used for the pruning bound
TILE = 32  # pixels per pruning tile edge
PRUNE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class JMConfiguration:
    s: float  # torus side; arrival times live in [0, s]
    lam: float  # space-time Poisson intensity
    color_p: float  # black probability
    xs: np.ndarray
    ys: np.ndarray
    times: np.ndarray
    marks: np.ndarray  # uniform marks; black iff mark < color_p

    def __post_init__(self):
        for arr in (self.xs, self.ys, self.times, self.marks):
            arr.setflags(write=False)
        if not (self.s > 0 and self.lam > 0 and 0.0 <= self.color_p <= 1.0):
            raise ValueError("need s > 0, lam > 0, color_p in [0,1]")

    @property
    def count(self) -> int:
        return self.xs.size

    @property
    def black(self) -> np.ndarray:
        return self.marks < self.color_p

    def with_color_p(self, color_p: float) -> "JMConfiguration":
        """Same seeds and marks, different black probability (coupling)."""
        return JMConfiguration(
            s=self.s, lam=self.lam, color_p=float(color_p),
            xs=self.xs, ys=self.ys, times=self.times, marks=self.marks,
        )

    def seed_tuples(self) -> list[tuple[float, float, float, str]]:
        black = self.black
        return [
            (float(x), float(y), float(t), "black" if b else "white")
            for x, y, t, b in zip(self.xs, self.ys, self.times, black)
        ]


def sample_jm(s: float, lam: float, color_p: float, seed: int) -> JMConfiguration:
    """Poisson(lam * s^3) seeds uniform on the space-time box, with marks."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    count = int(rng.poisson(lam * s**3))
    xs = rng.random(count) * s
    ys = rng.random(count) * s
    times = rng.random(count) * s
    marks = rng.random(count)
    return JMConfiguration(
        s=float(s), lam=float(lam), color_p=float(color_p),
        xs=xs, ys=ys, times=times, marks=marks,
    )


def _sample_trial(s: float, lam: float, seed: int, trial: int) -> JMConfiguration:
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,)))
    )
    count = int(rng.poisson(lam * s**3))
    xs = rng.random(count) * s
    ys = rng.random(count) * s
    times = rng.random(count) * s
    marks = rng.random(count)
    return JMConfiguration(
        s=float(s), lam=float(lam), color_p=0.5,
        xs=xs, ys=ys, times=times, marks=marks,
    )


def _decompose(coords: np.ndarray, resolution: int, width: int):
    """Integer pixel index and sub-pixel fraction of each coordinate."""
    scaled = coords * resolution
    cells = np.floor(scaled).astype(np.int64)
    cells = np.clip(cells, 0, width - 1)
    return cells, scaled - cells


def translate(
    config: JMConfiguration, dx_pixels: int, dy_pixels: int, resolution: int
) -> JMConfiguration:
    """Shift all seeds by whole pixels around the torus.

    With a power-of-two resolution the reconstruction is exact, so the owner
    map of the shifted configuration is the shifted owner map bit for bit.
    """
    width = round(config.s * resolution)
    ax, fx = _decompose(config.xs, resolution, width)
    ay, fy = _decompose(config.ys, resolution, width)
    xs = (((ax + dx_pixels) % width) + fx) / resolution
    ys = (((ay + dy_pixels) % width) + fy) / resolution
    return JMConfiguration(
        s=config.s, lam=config.lam, color_p=config.color_p,
        xs=xs, ys=ys, times=config.times, marks=config.marks,
    )


@dataclass(frozen=True, eq=False)
class RasterColoring:
    s: float
    resolution: int  # pixels per unit length
    owner: np.ndarray  # (width, width) seed index per pixel, row = y
    black: np.ndarray  # color of the owning seed

    def __post_init__(self):
        self.owner.setflags(write=False)
        self.black.setflags(write=False)

    @property
    def width(self) -> int:
        return self.owner.shape[1]


def _torus_delta(a: np.ndarray, b: float, s: float) -> np.ndarray:
    d = np.abs(a - b)
    return np.minimum(d, s - d)


def rasterize(config: JMConfiguration, resolution: int = 8) -> RasterColoring:
    """Exact per-pixel owners under the growth metric t + torus distance.

    A cheap upper bound from the earliest arrivals prunes the seed list per
    pixel tile; the surviving candidates are compared exactly. Ties go to
    the lowest seed index.
    """
    if config.count == 0:
        raise ValueError("empty seed set")
    s = config.s
    width = round(s * resolution)
    if abs(width - s * resolution) > 1e-9:
        raise ValueError("s * resolution must be integral")
    n = config.count
    xs, ys, times = config.xs, config.ys, config.times

    ax, fx = _decompose(xs, resolution, width)
    ay, fy = _decompose(ys, resolution, width)

    # upper bound per pixel from the earliest arrivals
    early = np.argsort(times, kind="stable")[: min(UPPER_BOUND_SEEDS, n)]
    centers = (np.arange(width) + 0.5) / resolution
    dx_e = np.minimum(
        np.abs(centers[:, None] - xs[early][None, :]),
        s - np.abs(centers[:, None] - xs[early][None, :]),
    )
    dy_e = np.minimum(
        np.abs(centers[:, None] - ys[early][None, :]),
        s - np.abs(centers[:, None] - ys[early][None, :]),
    )
    owner = np.empty((width, width), dtype=np.int64)
    half_diag = math.hypot(TILE / 2, TILE / 2) / resolution

    for ty in range(0, width, TILE):
        ys_idx = np.arange(ty, min(ty + TILE, width))
        for tx in range(0, width, TILE):
            xs_idx = np.arange(tx, min(tx + TILE, width))
            # pruning bound: best value any pixel of this tile can see
            bound = np.min(
                times[early][None, None, :]
                + np.hypot(
                    dx_e[xs_idx][None, :, :], dy_e[ys_idx][:, None, :]
                ),
                axis=2,
            )
            u_max = float(bound.max())
            cx = (tx + len(xs_idx) / 2.0) / resolution
            cy = (ty + len(ys_idx) / 2.0) / resolution
            d_center = np.hypot(
                _torus_delta(xs, cx, s), _torus_delta(ys, cy, s)
            )
            cand = np.nonzero(
                times + np.maximum(0.0, d_center - half_diag)
                <= u_max + PRUNE_SLACK
            )[0]
            # exact distances from integer pixel offsets and fractions
            offx = (xs_idx[None, :] - ax[cand][:, None]) % width
            offy = (ys_idx[None, :] - ay[cand][:, None]) % width
            dxv = np.abs((offx + (0.5 - fx[cand])[:, None])) / resolution
            dxv = np.minimum(dxv, s - dxv)
            dyv = np.abs((offy + (0.5 - fy[cand])[:, None])) / resolution
            dyv = np.minimum(dyv, s - dyv)
            val = (
                times[cand][:, None, None]
                + np.hypot(dxv[:, None, :], dyv[:, :, None])
            )
            best = np.argmin(val, axis=0)  # first occurrence = lowest index
            owner[np.ix_(ys_idx, xs_idx)] = cand[best]

    return RasterColoring(
        s=s, resolution=resolution, owner=owner, black=config.black[owner]
    )


def recolor(raster: RasterColoring, config: JMConfiguration, color_p: float) -> np.ndarray:
    """Black mask of the same ownership under a different color density."""
    return (config.marks < color_p)[raster.owner]


def _crossing_mask(
    mask: np.ndarray,
    s: float,
    resolution: int,
    rect: tuple[float, float, float, float],
    direction: str,
) -> bool:
    x0, y0, w, h = rect
    if w <= 0 or h <= 0 or w > s or h > s:
        raise ValueError(f"degenerate rectangle {rect}")
    width = mask.shape[1]
    cols = np.arange(round(x0 * resolution), round((x0 + w) * resolution)) % width
    rows = np.arange(round(y0 * resolution), round((y0 + h) * resolution)) % width
    if cols.size == 0 or rows.size == 0:
        raise ValueError(f"rectangle {rect} covers no pixels")
    sub = mask[np.ix_(rows, cols)]
    labels, _ = ndimage.label(sub)  # default structure: 4-connectivity
    if direction == "horizontal":
        first, last = labels[:, 0], labels[:, -1]
    elif direction == "vertical":
        first, last = labels[0, :], labels[-1, :]
    else:
        raise ValueError("direction must be 'horizontal' or 'vertical'")
    joined = np.intersect1d(first[first > 0], last[last > 0])
    return joined.size > 0


def crossing(
    raster: RasterColoring,
    rect: tuple[float, float, float, float],
    direction: str = "horizontal",
    color: str = "black",
) -> bool:
    """Whether a 4-connected monochromatic pixel path joins the rectangle's
    opposite sides. The rectangle (x0, y0, w, h) is in torus units and may
    wrap around the seam."""
    if color == "black":
        mask = raster.black
    elif color == "white":
        mask = ~raster.black
    else:
        raise ValueError("color must be 'black' or 'white'")
    return _crossing_mask(mask, raster.s, raster.resolution, rect, direction)


# ---------------------------------------------------------------------------
# discretization to the three-point grid


@dataclass(frozen=True, eq=False)
class DiscreteGrid:
    s: float
    delta_box: float
    states: np.ndarray  # (k, k, k) over (x, y, time), values in {-1, 0, 1}
    expected_p_plus: float
    expected_p_minus: float

    def __post_init__(self):
        self.states.setflags(write=False)

    @property
    def k(self) -> int:
        return self.states.shape[0]

    @property
    def box_count(self) -> int:
        return self.k**3

    @property
    def symmetry_order(self) -> int:
        """Spatial translations fix the time axis, so orbits have size k^2."""
        return self.k**2

    def to_space(self) -> ThreePointSpace:
        return ThreePointSpace(
            n=self.box_count,
            p_minus=self.expected_p_minus,
            p_plus=self.expected_p_plus,
        )


def discretize(config: JMConfiguration, delta_box: float) -> DiscreteGrid:
    """State per space-time box: the earliest seed's color, 0 when empty.

    The occupancy probability of one box is 1 - exp(-lam * delta^3), split
    between colors by color_p; those product marginals are reported as the
    matching three-point space parameters.
    """
    k = round(config.s / delta_box)
    if abs(k - config.s / delta_box) > 1e-9 or k < 1:
        raise ValueError("s / delta_box must be a positive integer")
    states = np.zeros((k, k, k), dtype=np.int8)
    if config.count:
        bx = np.minimum((config.xs / delta_box).astype(np.int64), k - 1)
        by = np.minimum((config.ys / delta_box).astype(np.int64), k - 1)
        bt = np.minimum((config.times / delta_box).astype(np.int64), k - 1)
        flat = (bx * k + by) * k + bt
        order = np.argsort(config.times, kind="stable")
        _, first = np.unique(flat[order], return_index=True)
        winners = order[first]
        colors = np.where(config.black[winners], 1, -1).astype(np.int8)
        states.reshape(-1)[flat[winners]] = colors
    occupied = 1.0 - math.exp(-config.lam * delta_box**3)
    return DiscreteGrid(
        s=config.s,
        delta_box=float(delta_box),
        states=states,
        expected_p_plus=config.color_p * occupied,
        expected_p_minus=(1.0 - config.color_p) * occupied,
    )


# ---------------------------------------------------------------------------
# threshold sweeps


def default_rect(s: float, shape: str = "wide") -> tuple[float, float, float, float]:
    """Rectangle presets: "wide" = 3:1 aspect, "thin" = 9:1 strip,
    "square" = half-side square."""
    if shape == "wide":
        return (0.0, 0.0, 3.0 * s / 4.0, s / 4.0)
    if shape == "thin":
        return (0.0, 0.0, 3.0 * s / 4.0, s / 12.0)
    if shape == "square":
        return (0.0, 0.0, s / 2.0, s / 2.0)
    raise ValueError("shape must be 'wide', 'thin', or 'square'")


@dataclass(frozen=True, eq=False)
class SweepResult:
    s: float
    lam: float
    rect: tuple[float, float, float, float]
    direction: str
    trials: int
    seed: int
    resolution: int
    ps: tuple[float, ...]
    freq: tuple[float, ...]
    wilson_low: tuple[float, ...]
    wilson_high: tuple[float, ...]
    indicators: np.ndarray  # (trials, len(ps)) crossing indicators
    dual_freq: Optional[tuple[float, ...]]  # opposite color, perpendicular
    dual_indicators: Optional[np.ndarray]

    def __post_init__(self):
        self.indicators.setflags(write=False)
        if self.dual_indicators is not None:
            self.dual_indicators.setflags(write=False)


def sweep(
    s: float,
    lam: float,
    p_grid: Sequence[float],
    trials: int,
    seed: int,
    rect: Optional[tuple[float, float, float, float]] = None,
    direction: str = "horizontal",
    resolution: int = 8,
    dual: bool = False,
) -> SweepResult:
    """Crossing frequency per color density over a shared seed stream.

    Each trial rasterizes once; colors are re-derived per p from the trial's
    marks, so the per-trial indicator is nondecreasing in p by construction.
    With `dual` the opposite color's perpendicular crossing is also scored.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ps = [float(p) for p in p_grid]
    for p in ps:
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"p = {p} outside [0,1]")
    if rect is None:
        rect = default_rect(s, "wide")
    perp = "vertical" if direction == "horizontal" else "horizontal"
    indicators = np.zeros((trials, len(ps)), dtype=bool)
    dual_ind = np.zeros((trials, len(ps)), dtype=bool) if dual else None
    for trial in range(trials):
        config = _sample_trial(s, lam, seed, trial)
        raster = rasterize(config, resolution)
        for j, p in enumerate(ps):
            black = (config.marks < p)[raster.owner]
            indicators[trial, j] = _crossing_mask(
                black, s, resolution, rect, direction
            )
            if dual:
                dual_ind[trial, j] = _crossing_mask(
                    ~black, s, resolution, rect, perp
                )
    freq = indicators.mean(axis=0)
    lows, highs = [], []
    for j in range(len(ps)):
        k = int(indicators[:, j].sum())
        hw = wilson_half_width(k, trials)
        center = _wilson_center(k, trials)
        lows.append(max(0.0, center - hw))
        highs.append(min(1.0, center + hw))
    return SweepResult(
        s=float(s), lam=float(lam), rect=rect, direction=direction,
        trials=trials, seed=seed, resolution=resolution, ps=tuple(ps),
        freq=tuple(float(v) for v in freq),
        wilson_low=tuple(lows), wilson_high=tuple(highs),
        indicators=indicators,
        dual_freq=tuple(float(v) for v in dual_ind.mean(axis=0)) if dual else None,
        dual_indicators=dual_ind,
    )


def _wilson_center(successes: int, trials: int, z: float = 1.959963984540054) -> float:
    phat = successes / trials
    return (phat + z * z / (2 * trials)) / (1.0 + z * z / trials)


def transition_window(
    ps: Sequence[float], freqs: Sequence[float], lo: float = 0.25, hi: float = 0.75
) -> Optional[float]:
    """Width of the p-interval where the (monotonized) frequency rises from
    lo to hi, by linear interpolation; None when the sweep never brackets
    both levels."""
    ps = np.asarray(ps, dtype=float)
    fs = np.maximum.accumulate(np.asarray(freqs, dtype=float))
    if fs[0] > lo or fs[-1] < hi:
        return None

    def cross(level: float) -> float:
        j = int(np.searchsorted(fs, level, side="left"))
        if j == 0:
            return float(ps[0])
        f0, f1 = fs[j - 1], fs[j]
        if f1 == f0:
            return float(ps[j])
        return float(ps[j - 1] + (ps[j] - ps[j - 1]) * (level - f0) / (f1 - f0))

    return cross(hi) - cross(lo)


def render_ppm(raster: RasterColoring, path: str) -> None:
    """Binary portable pixmap of a coloring, row 0 at the top."""
    width = raster.width
    img = np.empty((width, width, 3), dtype=np.uint8)
    img[raster.black] = (40, 44, 66)
    img[~raster.black] = (233, 229, 220)
    flipped = img[::-1]  # raster row 0 is y=0; image rows go top-down
    with open(path, "wb") as fh:
        fh.write(f"P6 {width} {width} 255\n".encode())
        fh.write(flipped.tobytes())
