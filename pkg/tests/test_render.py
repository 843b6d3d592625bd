import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiptracks.errors import AllZeroVideo
from shiptracks.render import (accumulate_fixed, normalize_video, rasterize_points, read_pgm,
                               write_pgm)

WIN = (0.0, 0.0, 1.0, 1.0)
GRID = (10, 10)


def test_pixel_mass_oracle():
    # independent oracle: 1-d mass of a centred pixel of half-width 3 sigma, squared
    assert math.erf(3 / math.sqrt(2)) ** 2 == pytest.approx(0.99461, abs=1e-5)
    img = rasterize_points([(0.55, 0.45)], 0.1 / 6, WIN, GRID)
    assert img[5, 5] == pytest.approx(math.erf(3 / math.sqrt(2)) ** 2, abs=1e-9)
    img = rasterize_points([(0.55, 0.45)], 0.1 / 7, WIN, GRID)
    assert img[5, 5] >= 0.997


def test_row_zero_is_top():
    img = rasterize_points([(0.05, 0.95)], 0.0, WIN, GRID)
    assert img[0, 0] == 1.0 and img.sum() == 1.0


def test_empty_is_zero():
    assert not rasterize_points(np.empty((0, 2)), np.empty(0), WIN, GRID).any()


def test_coincident_points_double():
    one = rasterize_points([(0.31, 0.62)], 0.05, WIN, GRID)
    two = rasterize_points([(0.31, 0.62)] * 2, 0.05, WIN, GRID)
    np.testing.assert_array_equal(two, 2 * one)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 0.8), st.floats(0.2, 0.8), st.floats(1e-3, 0.03))
def test_interior_mass_is_one(x, y, s):
    img = rasterize_points([(x, y)], s, WIN, (64, 64))
    assert abs(img.sum() - 1) <= 1e-6


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-0.2, 1.2), st.floats(-0.2, 1.2), st.floats(0, 0.2)),
                min_size=0, max_size=12), st.integers(0, 12))
def test_linearity_is_exact(points, cut):
    pos = np.array([p[:2] for p in points]).reshape(-1, 2)
    sig = np.array([p[2] for p in points])
    a = accumulate_fixed(pos[:cut], sig[:cut], WIN, GRID)
    b = accumulate_fixed(pos[cut:], sig[cut:], WIN, GRID)
    np.testing.assert_array_equal(accumulate_fixed(pos, sig, WIN, GRID), a + b)
    np.testing.assert_array_equal(accumulate_fixed(pos[::-1], sig[::-1], WIN, GRID), a + b)


def test_normalize_video():
    out = normalize_video([np.array([[2.0]]), np.array([[4.0]])])
    assert out[0][0, 0] == 0.5 and out[1][0, 0] == 1.0
    same = normalize_video([np.full((2, 2), 3.0)] * 3)
    assert all(np.array_equal(f, np.ones((2, 2))) for f in same)
    with pytest.raises(AllZeroVideo):
        normalize_video([np.zeros((2, 2))])


def test_pgm_roundtrip(tmp_path):
    img = np.linspace(0, 1, 12).reshape(3, 4)
    path = tmp_path / "f.pgm"
    write_pgm(path, img)
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n4 3\n65535\n")
    np.testing.assert_allclose(read_pgm(path), img, atol=1 / 65535)
