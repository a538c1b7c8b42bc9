"""NIfTI parse/write tests against an independent reference writer."""
from __future__ import annotations

import gzip

import numpy as np
import pytest

from radagent.errors import (
    NiftiDatatypeError,
    NiftiHeaderError,
    NiftiMagicError,
    NiftiTruncatedError,
)
from radagent.volume import Volume, parse_nifti, write_nifti

from reference_nifti import build_nifti_bytes, write_reference_nifti

# float32-exact spacings so header round-trips are bit-faithful
SPACINGS = [0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0]


def test_parse_reference_2x2x2_int16(tmp_path):
    data = np.arange(8, dtype=np.int16).reshape(2, 2, 2) - 3
    path = write_reference_nifti(tmp_path / "a.nii", data, spacing=(1.5, 1.5, 3.0))
    v = parse_nifti(path)
    assert v.dims == (2, 2, 2)
    assert v.spacing == (1.5, 1.5, 3.0)
    assert v.dtype_tag == "int16"
    assert np.array_equal(v.data, data)


def test_parse_gzip_equals_plain(tmp_path):
    data = np.arange(27, dtype=np.int16).reshape(3, 3, 3)
    plain = write_reference_nifti(tmp_path / "a.nii", data)
    gz = write_reference_nifti(tmp_path / "a.nii.gz", data)
    assert parse_nifti(plain) == parse_nifti(gz)


def test_parse_big_endian(tmp_path):
    data = np.array([[[300, -7], [0, 12]]], dtype=np.int16)
    path = write_reference_nifti(tmp_path / "be.nii", data, byte_order=">")
    v = parse_nifti(path)
    assert np.array_equal(v.data, data)
    assert v.dims == (2, 2, 1)


def test_parse_flat_order_is_x_fastest(tmp_path):
    # payload [0..7] over dims w=2,h=2,d=2: voxel (x,y,z)=(1,0,0) is byte 1
    data = np.arange(8, dtype=np.uint8).reshape(2, 2, 2)
    path = write_reference_nifti(tmp_path / "o.nii", data, dtype_tag="uint8")
    v = parse_nifti(path)
    assert v.data[0, 0, 1] == 1  # x fastest
    assert v.data[0, 1, 0] == 2  # then y
    assert v.data[1, 0, 0] == 4  # then z


def test_parse_respects_vox_offset(tmp_path):
    data = np.full((1, 1, 1), 9, dtype=np.int16)
    path = write_reference_nifti(tmp_path / "v.nii", data, vox_offset=416.0)
    assert parse_nifti(path).data[0, 0, 0] == 9


def test_parse_applies_scale(tmp_path):
    data = np.array([[[10, -4]]], dtype=np.int16)
    path = write_reference_nifti(
        tmp_path / "s.nii", data, scl_slope=2.0, scl_inter=-1.0
    )
    v = parse_nifti(path)
    assert v.dtype_tag == "float32"
    assert np.array_equal(v.data, np.array([[[19.0, -9.0]]], dtype=np.float32))


def test_parse_slope_zero_means_unscaled(tmp_path):
    data = np.array([[[5]]], dtype=np.int16)
    path = write_reference_nifti(tmp_path / "z.nii", data, scl_slope=0.0)
    v = parse_nifti(path)
    assert v.dtype_tag == "int16"
    assert v.data[0, 0, 0] == 5


def test_bad_magic_rejected(tmp_path):
    data = np.zeros((1, 1, 1), dtype=np.int16)
    path = write_reference_nifti(tmp_path / "m.nii", data, magic=b"ni1\x00")
    with pytest.raises(NiftiMagicError):
        parse_nifti(path)


def test_bad_sizeof_hdr_rejected(tmp_path):
    data = np.zeros((1, 1, 1), dtype=np.int16)
    blob = bytearray(build_nifti_bytes(data))
    blob[0:4] = (352).to_bytes(4, "little")
    p = tmp_path / "h.nii"
    p.write_bytes(bytes(blob))
    with pytest.raises(NiftiHeaderError):
        parse_nifti(p)


def test_unsupported_datatype_rejected(tmp_path):
    data = np.zeros((1, 1, 1), dtype=np.int16)
    path = write_reference_nifti(tmp_path / "d.nii", data, datatype_code=64)
    with pytest.raises(NiftiDatatypeError):
        parse_nifti(path)


def test_truncated_payload_rejected(tmp_path):
    data = np.zeros((4, 4, 4), dtype=np.int16)
    blob = build_nifti_bytes(data)
    p = tmp_path / "t.nii"
    p.write_bytes(blob[:-10])
    with pytest.raises(NiftiTruncatedError):
        parse_nifti(p)


def test_short_header_rejected(tmp_path):
    p = tmp_path / "short.nii"
    p.write_bytes(b"\x00" * 100)
    with pytest.raises(NiftiTruncatedError):
        parse_nifti(p)


def test_bad_dim0_rejected(tmp_path):
    data = np.zeros((1, 1, 1), dtype=np.int16)
    path = write_reference_nifti(tmp_path / "n.nii", data, ndim=0)
    with pytest.raises(NiftiHeaderError):
        parse_nifti(path)


def test_roundtrip_1x1x1_uint8(tmp_path):
    v = Volume(
        dims=(1, 1, 1),
        spacing=(1.0, 1.0, 1.0),
        data=np.full((1, 1, 1), 7, dtype=np.uint8),
        dtype_tag="uint8",
    )
    p = tmp_path / "u.nii"
    write_nifti(p, v)
    assert parse_nifti(p) == v


def test_roundtrip_gzip_suffix(tmp_path):
    v = Volume(
        dims=(2, 3, 4),
        spacing=(0.5, 1.0, 2.0),
        data=np.arange(24, dtype=np.int16).reshape(4, 3, 2),
        dtype_tag="int16",
    )
    p = tmp_path / "g.nii.gz"
    write_nifti(p, v)
    assert p.read_bytes()[:2] == b"\x1f\x8b"
    assert parse_nifti(p) == v


def test_roundtrip_100_randomized(tmp_path):
    tags = [("uint8", np.uint8), ("int16", np.int16), ("float32", np.float32)]
    for seed in range(100):
        rng = np.random.default_rng(seed)
        w, h, d = (int(rng.integers(1, 7)) for _ in range(3))
        tag, dt = tags[seed % 3]
        if tag == "uint8":
            data = rng.integers(0, 256, size=(d, h, w)).astype(dt)
        elif tag == "int16":
            data = rng.integers(-1024, 3000, size=(d, h, w)).astype(dt)
        else:
            data = rng.standard_normal((d, h, w)).astype(dt)
        spacing = tuple(float(rng.choice(SPACINGS)) for _ in range(3))
        v = Volume(dims=(w, h, d), spacing=spacing, data=data, dtype_tag=tag)
        suffix = ".nii.gz" if seed % 2 else ".nii"
        p = tmp_path / f"r{seed}{suffix}"
        write_nifti(p, v)
        assert parse_nifti(p) == v, f"seed {seed}"


def test_gzip_container_sniffed_not_named(tmp_path):
    # gzip bytes under a plain .nii name still parse
    data = np.array([[[3]]], dtype=np.int16)
    blob = gzip.compress(build_nifti_bytes(data), mtime=0)
    p = tmp_path / "sneaky.nii"
    p.write_bytes(blob)
    assert parse_nifti(p).data[0, 0, 0] == 3
