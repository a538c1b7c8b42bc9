"""Voxel-op tests: frozen worked cases plus randomized oracle comparisons."""
from __future__ import annotations

import numpy as np
import pytest

from radagent.errors import EmptyLabelError
from radagent.volume import (
    BBox,
    Mask,
    Volume,
    extract_roi,
    largest_component,
    mask_bounding_box,
    render_slice,
    select_key_slices,
)

from oracles import (
    bbox_oracle,
    key_slices_oracle,
    largest_component_oracle,
    window_pixel_oracle,
)


def make_mask(labels: np.ndarray) -> Mask:
    d, h, w = labels.shape
    return Mask(dims=(w, h, d), labels=labels.astype(np.int32))


def random_mask(seed: int, density: float = 0.3) -> Mask:
    rng = np.random.default_rng(seed)
    d, h, w = (int(rng.integers(3, 11)) for _ in range(3))
    labels = (rng.random((d, h, w)) < density).astype(np.int32)
    if not labels.any():
        labels[d // 2, h // 2, w // 2] = 1
    return make_mask(labels)


def uniform_volume(value: float, dims=(4, 4, 4)) -> Volume:
    w, h, d = dims
    return Volume(
        dims=dims,
        spacing=(1.0, 1.0, 1.0),
        data=np.full((d, h, w), value, dtype=np.float32),
        dtype_tag="float32",
    )


# ---------------------------------------------------------------- bbox

def test_bbox_empty_is_none():
    m = make_mask(np.zeros((3, 3, 3), dtype=np.int32))
    assert mask_bounding_box(m, 1) is None


def test_bbox_single_voxel():
    labels = np.zeros((8, 8, 8), dtype=np.int32)
    labels[5, 4, 3] = 1  # (x, y, z) = (3, 4, 5)
    box = mask_bounding_box(make_mask(labels), 1)
    assert box == BBox(x=(3, 3), y=(4, 4), z=(5, 5))


def test_bbox_matches_scan_oracle():
    for seed in range(60):
        m = random_mask(seed)
        box = mask_bounding_box(m, 1)
        expect = bbox_oracle(m.labels, 1)
        assert expect is not None
        assert (box.x, box.y, box.z) == expect, f"seed {seed}"


# ------------------------------------------------- largest component

def test_largest_component_identity_on_single_blob():
    labels = np.zeros((6, 6, 6), dtype=np.int32)
    labels[2:4, 2:4, 2:4] = 1
    out = largest_component(make_mask(labels), 1)
    assert np.array_equal(out.labels, labels)


def test_largest_component_keeps_9_drops_5():
    labels = np.zeros((10, 10, 10), dtype=np.int32)
    labels[1, 1, 1:6] = 1  # 5-voxel line
    labels[7, 7, 0:9] = 1  # 9-voxel line
    out = largest_component(make_mask(labels), 1)
    assert out.count(1) == 9
    assert out.labels[7, 7, 4] == 1
    assert out.labels[1, 1, 2] == 0


def test_largest_component_tie_takes_smallest_flat_index():
    labels = np.zeros((4, 4, 8), dtype=np.int32)
    labels[0, 0, 5:8] = 1  # flat indices 5..7
    labels[0, 0, 0:3] = 1  # flat indices 0..2, same size, earlier
    out = largest_component(make_mask(labels), 1)
    assert out.labels[0, 0, 0] == 1
    assert out.labels[0, 0, 5] == 0


def test_largest_component_diagonal_not_connected():
    # voxels touching only at a corner are separate under 6-connectivity
    labels = np.zeros((3, 3, 3), dtype=np.int32)
    labels[0, 0, 0] = 1
    labels[1, 1, 1] = 1
    labels[0, 1, 0] = 1  # face-adjacent to (0,0,0) along y
    out = largest_component(make_mask(labels), 1)
    assert out.count(1) == 2
    assert out.labels[1, 1, 1] == 0


def test_largest_component_absent_label_raises():
    m = make_mask(np.zeros((3, 3, 3), dtype=np.int32))
    with pytest.raises(EmptyLabelError):
        largest_component(m, 1)


def test_largest_component_matches_scipy_oracle():
    for seed in range(60):
        m = random_mask(seed, density=0.35)
        out = largest_component(m, 1)
        expect = largest_component_oracle(m.labels, 1)
        assert np.array_equal(out.labels, expect), f"seed {seed}"


# ----------------------------------------------------------- ROI crop

def test_extract_roi_whole_mask_margin0_is_identity():
    rng = np.random.default_rng(0)
    data = rng.integers(-100, 200, size=(5, 6, 7)).astype(np.int16)
    v = Volume(dims=(7, 6, 5), spacing=(1.0, 1.0, 2.0), data=data)
    m = make_mask(np.ones((5, 6, 7), dtype=np.int32))
    roi = extract_roi(v, m, 1, margin=0)
    assert roi == v


def test_extract_roi_margin_grows_box():
    data = np.zeros((8, 8, 8), dtype=np.int16)
    v = Volume(dims=(8, 8, 8), spacing=(1.0, 1.0, 1.0), data=data)
    labels = np.zeros((8, 8, 8), dtype=np.int32)
    labels[2:5, 2:5, 2:5] = 1  # box (2..4) per axis
    roi = extract_roi(v, make_mask(labels), 1, margin=1)
    assert roi.dims == (5, 5, 5)  # (1..5) per axis


def test_extract_roi_clamps_at_zero():
    data = np.arange(64, dtype=np.int16).reshape(4, 4, 4)
    v = Volume(dims=(4, 4, 4), spacing=(1.0, 1.0, 1.0), data=data)
    labels = np.zeros((4, 4, 4), dtype=np.int32)
    labels[0:2, 0:2, 0:2] = 1
    roi = extract_roi(v, make_mask(labels), 1, margin=2)
    assert roi.dims == (4, 4, 4)  # clamped to full volume
    assert np.array_equal(roi.data, data)


def test_extract_roi_content_matches_manual_slice():
    rng = np.random.default_rng(3)
    data = rng.integers(0, 100, size=(8, 8, 8)).astype(np.int16)
    v = Volume(dims=(8, 8, 8), spacing=(1.0, 1.0, 1.0), data=data)
    labels = np.zeros((8, 8, 8), dtype=np.int32)
    labels[3:6, 2:4, 1:7] = 1
    roi = extract_roi(v, make_mask(labels), 1, margin=1)
    assert np.array_equal(roi.data, data[2:7, 1:5, 0:8])


def test_extract_roi_empty_label_raises():
    v = uniform_volume(0.0)
    m = make_mask(np.zeros((4, 4, 4), dtype=np.int32))
    with pytest.raises(EmptyLabelError):
        extract_roi(v, m, 1)


# ------------------------------------------------------- key slices

def test_key_slices_worked_case_10_20():
    labels = np.zeros((40, 4, 4), dtype=np.int32)
    labels[10:21, 1, 1] = 1
    assert select_key_slices(make_mask(labels), 1) == [14, 15, 16]


def test_key_slices_shifted_at_bottom():
    labels = np.zeros((3, 2, 2), dtype=np.int32)
    labels[0, 0, 0] = 1  # extent [0, 0]
    assert select_key_slices(make_mask(labels), 1) == [0, 1, 2]


def test_key_slices_shifted_at_top():
    labels = np.zeros((10, 2, 2), dtype=np.int32)
    labels[9, 0, 0] = 1  # center 9, naive window {8,9,10}
    assert select_key_slices(make_mask(labels), 1) == [7, 8, 9]


def test_key_slices_empty_label_raises():
    m = make_mask(np.zeros((5, 2, 2), dtype=np.int32))
    with pytest.raises(EmptyLabelError):
        select_key_slices(m, 1)


def test_key_slices_depth_below_3_raises():
    labels = np.ones((2, 2, 2), dtype=np.int32)
    with pytest.raises(ValueError):
        select_key_slices(make_mask(labels), 1)


def test_key_slices_explicit_depth_must_match():
    labels = np.ones((5, 2, 2), dtype=np.int32)
    m = make_mask(labels)
    assert select_key_slices(m, 1, depth=5) == select_key_slices(m, 1)
    with pytest.raises(ValueError):
        select_key_slices(m, 1, depth=9)


def test_key_slices_match_window_oracle():
    for seed in range(60):
        m = random_mask(seed)
        got = select_key_slices(m, 1)
        assert got == key_slices_oracle(m.labels, 1), f"seed {seed}"
        assert len(got) == 3
        assert got[0] >= 0 and got[2] < m.dims[2]
        assert got[1] == got[0] + 1 and got[2] == got[1] + 1


# ---------------------------------------------------------- rendering

def test_render_uniform_volume_uniform_image():
    v = uniform_volume(40.0)
    img = render_slice(v, 1, center=40.0, width=400.0)
    assert set(img.pixels) == {128}


def test_render_window_edges_and_center():
    data = np.array([[[-160.0, 240.0, 40.0, -200.0, 300.0]]], dtype=np.float32)
    v = Volume(dims=(5, 1, 1), spacing=(1.0, 1.0, 1.0), data=data, dtype_tag="float32")
    img = render_slice(v, 0, center=40.0, width=400.0)
    px = list(img.pixels)
    assert px[0] == 0  # center - width/2
    assert px[1] == 255  # center + width/2
    assert px[2] == 128  # exactly center, round half-up of 127.5
    assert px[3] == 0  # below window
    assert px[4] == 255  # above window


def test_render_matches_scalar_oracle():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        w, h = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        data = rng.integers(-1024, 2000, size=(2, h, w)).astype(np.int16)
        v = Volume(dims=(w, h, 2), spacing=(1.0, 1.0, 1.0), data=data)
        center = float(rng.integers(-100, 400))
        width = float(rng.integers(1, 800))
        img = render_slice(v, 1, center=center, width=width)
        px = np.frombuffer(img.pixels, dtype=np.uint8).reshape(h, w)
        for y in range(h):
            for x in range(w):
                assert px[y, x] == window_pixel_oracle(
                    float(data[1, y, x]), center, width
                ), f"seed {seed} ({x},{y})"


def test_render_bad_z_raises():
    v = uniform_volume(0.0)
    with pytest.raises(ValueError):
        render_slice(v, 4, center=0.0, width=100.0)
    with pytest.raises(ValueError):
        render_slice(v, -1, center=0.0, width=100.0)


def test_render_nonpositive_width_raises():
    v = uniform_volume(0.0)
    with pytest.raises(ValueError):
        render_slice(v, 0, center=0.0, width=0.0)


def test_image8_pgm_bytes():
    from radagent.volume import Image8

    img = Image8(width=2, height=2, pixels=bytes([0, 128, 255, 7]))
    assert img.to_pgm() == b"P5\n2 2\n255\n" + bytes([0, 128, 255, 7])


def test_volume_data_is_immutable():
    v = uniform_volume(1.0)
    with pytest.raises(ValueError):
        v.data[0, 0, 0] = 5.0
