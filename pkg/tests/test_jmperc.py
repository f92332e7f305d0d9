import math

import numpy as np
import pytest

from sharpthreshold.jmperc import (
    JMConfiguration,
    RasterColoring,
    crossing,
    default_rect,
    discretize,
    recolor,
    rasterize,
    render_ppm,
    sample_jm,
    sweep,
    transition_window,
    translate,
)


def config_from(xs, ys, times, marks, s=2.0, lam=1.0, color_p=0.5):
    return JMConfiguration(
        s=s, lam=lam, color_p=color_p,
        xs=np.array(xs, dtype=float), ys=np.array(ys, dtype=float),
        times=np.array(times, dtype=float), marks=np.array(marks, dtype=float),
    )


def naive_owner(config, resolution):
    """Direct argmin of time plus torus distance to each pixel center."""
    width = round(config.s * resolution)
    centers = (np.arange(width) + 0.5) / resolution

    def torus(a, b):
        d = np.abs(a - b)
        return np.minimum(d, config.s - d)

    out = np.empty((width, width), dtype=np.int64)
    for yy in range(width):
        for xx in range(width):
            vals = config.times + np.hypot(
                torus(config.xs, centers[xx]), torus(config.ys, centers[yy])
            )
            out[yy, xx] = int(np.argmin(vals))
    return out


def test_sample_jm_deterministic():
    a = sample_jm(4.0, 0.5, 0.3, seed=9)
    b = sample_jm(4.0, 0.5, 0.3, seed=9)
    assert a.count == b.count
    assert np.array_equal(a.xs, b.xs)
    assert np.array_equal(a.marks, b.marks)
    c = sample_jm(4.0, 0.5, 0.3, seed=10)
    assert a.count != c.count or not np.array_equal(a.xs, c.xs)


def test_sample_jm_ranges_and_colors():
    cfg = sample_jm(4.0, 0.5, 0.3, seed=9)
    for arr in (cfg.xs, cfg.ys, cfg.times):
        assert np.all((0.0 <= arr) & (arr < 4.0))
    assert np.all((0.0 <= cfg.marks) & (cfg.marks < 1.0))
    assert np.array_equal(cfg.black, cfg.marks < 0.3)
    tuples = cfg.seed_tuples()
    assert len(tuples) == cfg.count
    assert tuples[0][3] in ("black", "white")


def test_with_color_p_keeps_seeds():
    cfg = sample_jm(4.0, 0.5, 0.3, seed=9)
    hot = cfg.with_color_p(0.9)
    assert hot.xs is cfg.xs
    assert hot.color_p == 0.9
    assert hot.black.sum() >= cfg.black.sum()


def test_configuration_validation():
    with pytest.raises(ValueError):
        config_from([0.5], [0.5], [0.1], [0.5], s=-1.0)
    with pytest.raises(ValueError):
        config_from([0.5], [0.5], [0.1], [0.5], color_p=1.5)


def test_rasterize_matches_naive_argmin():
    cfg = sample_jm(4.0, 0.5, 0.5, seed=123)
    raster = rasterize(cfg, resolution=4)
    assert np.array_equal(raster.owner, naive_owner(cfg, 4))
    assert np.array_equal(raster.black, cfg.black[raster.owner])
    assert raster.width == 16


def test_rasterize_tie_goes_to_lowest_index():
    # equal times, pixel centers equidistant from both seeds
    cfg = config_from([0.25, 1.25], [0.25, 0.25], [0.0, 0.0], [0.1, 0.9])
    raster = rasterize(cfg, resolution=2)
    # columns 0.75 and 1.75 are 0.5 away from both seeds
    assert np.all(raster.owner[:, 1] == 0)
    assert np.all(raster.owner[:, 3] == 0)


def test_rasterize_validation():
    cfg = config_from([], [], [], [])
    with pytest.raises(ValueError):
        rasterize(cfg, resolution=4)
    odd = config_from([0.5], [0.5], [0.0], [0.5], s=1.5)
    with pytest.raises(ValueError):
        rasterize(odd, resolution=3)  # 1.5 * 3 = 4.5 pixels


def test_translate_whole_pixels_is_exact():
    cfg = sample_jm(4.0, 0.4, 0.5, seed=5)
    base = rasterize(cfg, resolution=8)
    moved = rasterize(translate(cfg, 3, 5, 8), resolution=8)
    assert np.array_equal(
        moved.owner, np.roll(base.owner, shift=(5, 3), axis=(0, 1))
    )
    assert np.array_equal(
        moved.black, np.roll(base.black, shift=(5, 3), axis=(0, 1))
    )


def raster_from_mask(mask):
    mask = np.asarray(mask, dtype=bool)
    width = mask.shape[0]
    return RasterColoring(
        s=1.0, resolution=width, owner=np.zeros_like(mask, dtype=np.int64),
        black=mask,
    )


def test_crossing_stripe():
    mask = np.zeros((8, 8), dtype=bool)
    mask[3, :] = True
    raster = raster_from_mask(mask)
    full = (0.0, 0.0, 1.0, 1.0)
    assert crossing(raster, full, "horizontal")
    assert not crossing(raster, full, "vertical")
    assert crossing(raster, full, "vertical", color="white") is False
    # the white complement crosses horizontally
    assert crossing(raster, full, "horizontal", color="white")


def test_crossing_needs_4_connectivity():
    mask = np.eye(8, dtype=bool)[::-1]  # anti-diagonal, corner contacts only
    raster = raster_from_mask(mask)
    assert not crossing(raster, (0.0, 0.0, 1.0, 1.0), "horizontal")


def test_crossing_disconnected_halves():
    mask = np.zeros((8, 8), dtype=bool)
    mask[2, :4] = True
    mask[5, 4:] = True
    raster = raster_from_mask(mask)
    assert not crossing(raster, (0.0, 0.0, 1.0, 1.0), "horizontal")


def test_crossing_wrapping_rectangle():
    mask = np.zeros((8, 8), dtype=bool)
    mask[1, [6, 7, 0, 1]] = True  # segment across the torus seam
    raster = raster_from_mask(mask)
    assert crossing(raster, (0.75, 0.0, 0.5, 0.25), "horizontal")
    assert not crossing(raster, (0.0, 0.0, 0.5, 0.25), "horizontal")


def test_crossing_validation():
    raster = raster_from_mask(np.zeros((8, 8), dtype=bool))
    with pytest.raises(ValueError):
        crossing(raster, (0.0, 0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        crossing(raster, (0.0, 0.0, 1.5, 1.0))
    with pytest.raises(ValueError):
        crossing(raster, (0.0, 0.0, 1.0, 1.0), "diagonal")
    with pytest.raises(ValueError):
        crossing(raster, (0.0, 0.0, 1.0, 1.0), color="red")


def test_recolor_coupling_monotone():
    cfg = sample_jm(4.0, 0.5, 0.5, seed=77)
    raster = rasterize(cfg, resolution=8)
    prev = None
    for p in (0.2, 0.4, 0.6, 0.8):
        mask = recolor(raster, cfg, p)
        assert np.array_equal(mask, (cfg.marks < p)[raster.owner])
        if prev is not None:
            assert np.all(prev <= mask)  # black pixels only accumulate
        prev = mask
    assert np.array_equal(recolor(raster, cfg, 0.5), raster.black)


def test_discretize_earliest_seed_wins():
    cfg = config_from(
        [0.2, 0.3, 1.5], [0.2, 0.1, 1.5], [0.7, 0.2, 1.5],
        [0.9, 0.1, 0.99], s=2.0, lam=1.0, color_p=0.5,
    )
    grid = discretize(cfg, delta_box=1.0)
    assert grid.k == 2
    assert grid.box_count == 8
    assert grid.symmetry_order == 4
    # both early seeds share box (0,0,0); the t=0.2 black one wins
    assert grid.states[0, 0, 0] == 1
    assert grid.states[1, 1, 1] == -1
    assert np.count_nonzero(grid.states) == 2


def test_discretize_expected_marginals():
    cfg = sample_jm(4.0, 0.5, 0.3, seed=2)
    grid = discretize(cfg, delta_box=0.5)
    occupied = 1.0 - math.exp(-0.5 * 0.5**3)
    assert grid.expected_p_plus == pytest.approx(0.3 * occupied, rel=1e-12)
    assert grid.expected_p_minus == pytest.approx(0.7 * occupied, rel=1e-12)
    space = grid.to_space()
    assert space.n == grid.box_count
    assert space.p_plus == grid.expected_p_plus


def test_discretize_requires_integral_split():
    cfg = sample_jm(2.0, 0.5, 0.5, seed=1)
    with pytest.raises(ValueError):
        discretize(cfg, delta_box=0.6)


def test_default_rect_presets():
    assert default_rect(8.0, "wide") == (0.0, 0.0, 6.0, 2.0)
    assert default_rect(12.0, "thin") == (0.0, 0.0, 9.0, 1.0)
    assert default_rect(8.0, "square") == (0.0, 0.0, 4.0, 4.0)
    with pytest.raises(ValueError):
        default_rect(8.0, "round")


def test_transition_window_frozen_synthetic():
    ps = (0.0, 0.25, 0.5, 0.75, 1.0)
    fs = (0.0, 0.2, 0.5, 0.8, 1.0)
    width = transition_window(ps, fs)
    assert width == pytest.approx(5.0 / 12.0, rel=1e-12)


def test_transition_window_unbracketed():
    assert transition_window((0.0, 1.0), (0.3, 1.0)) is None  # starts high
    assert transition_window((0.0, 1.0), (0.0, 0.6)) is None  # ends low


def test_transition_window_monotonizes_dips():
    ps = (0.0, 0.25, 0.5, 0.75, 1.0)
    fs = (0.0, 0.5, 0.4, 0.9, 1.0)  # dip at 0.5 is flattened to 0.5
    width = transition_window(ps, fs)
    assert width == pytest.approx(0.65625 - 0.125, rel=1e-12)


def test_sweep_deterministic_and_coupled():
    kwargs = dict(s=6.0, lam=0.25, p_grid=[0.3, 0.5, 0.7], trials=30, seed=4)
    a = sweep(**kwargs)
    b = sweep(**kwargs)
    assert np.array_equal(a.indicators, b.indicators)
    assert a.freq == b.freq
    assert a.wilson_low == b.wilson_low
    # shared marks couple the densities trial by trial
    assert np.all(a.indicators[:, 0] <= a.indicators[:, 1])
    assert np.all(a.indicators[:, 1] <= a.indicators[:, 2])
    for lo, f, hi in zip(a.wilson_low, a.freq, a.wilson_high):
        assert lo <= f <= hi


def test_sweep_dual_scores_perpendicular_complement():
    result = sweep(
        s=6.0, lam=0.25, p_grid=[0.5], trials=20, seed=4,
        rect=default_rect(6.0, "square"), dual=True,
    )
    assert result.dual_freq is not None
    assert result.dual_indicators.shape == result.indicators.shape
    # on a centered square, white-vertical is the event's planar dual
    assert 0.0 <= result.dual_freq[0] <= 1.0


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep(6.0, 0.25, [0.5], trials=0, seed=1)
    with pytest.raises(ValueError):
        sweep(6.0, 0.25, [1.5], trials=5, seed=1)


def test_sweep_resolution_stability():
    grid = [0.45, 0.55]
    f8 = sweep(8.0, 0.2, grid, trials=60, seed=31, resolution=8).freq
    f16 = sweep(8.0, 0.2, grid, trials=60, seed=31, resolution=16).freq
    assert max(abs(x - y) for x, y in zip(f8, f16)) <= 0.05


def test_render_ppm_bytes(tmp_path):
    mask = np.zeros((8, 8), dtype=bool)
    mask[0, :] = True  # y = 0 row is black
    raster = raster_from_mask(mask)
    path = tmp_path / "img.ppm"
    render_ppm(raster, str(path))
    data = path.read_bytes()
    header = b"P6 8 8 255\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 3 * 8 * 8
    body = data[len(header):]
    # y = 0 lands on the bottom image row; top row is white
    assert body[:3] == bytes((233, 229, 220))
    assert body[-3 * 8:] == bytes((40, 44, 66)) * 8
    render_ppm(raster, str(tmp_path / "img2.ppm"))
    assert (tmp_path / "img2.ppm").read_bytes() == data
