"""Minimal NIfTI-1 reader and writer.

Covers the single-file ".nii" layout (header + payload in one stream),
optionally gzip-compressed; the container is sniffed from the first two
bytes, not the filename. Only 3D scalar volumes with datatypes uint8,
int16 and float32 are supported.
"""
from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

from ..errors import (
    NiftiDatatypeError,
    NiftiHeaderError,
    NiftiMagicError,
    NiftiTruncatedError,
)
from .types import SUPPORTED_DTYPES, Volume

HEADER_SIZE = 348
MAGIC_OFFSET = 344
MAGIC_SINGLE = b"n+1\x00"
GZIP_MAGIC = b"\x1f\x8b"

# datatype code <-> dtype tag
DATATYPE_CODES = {2: "uint8", 4: "int16", 16: "float32"}
DATATYPE_TAGS = {v: k for k, v in DATATYPE_CODES.items()}
DATATYPE_BITS = {"uint8": 8, "int16": 16, "float32": 32}

# header field offsets (NIfTI-1)
_OFF_DIM = 40  # short dim[8]
_OFF_DATATYPE = 70  # short
_OFF_BITPIX = 72  # short
_OFF_PIXDIM = 76  # float pixdim[8]
_OFF_VOX_OFFSET = 108  # float
_OFF_SCL_SLOPE = 112  # float
_OFF_SCL_INTER = 116  # float


def _read_raw(path: str | Path) -> bytes:
    blob = Path(path).read_bytes()
    if blob[:2] == GZIP_MAGIC:
        blob = gzip.decompress(blob)
    return blob


def parse_nifti(path: str | Path) -> Volume:
    """Read a .nii or .nii.gz file into a Volume.

    Raises NiftiTruncatedError, NiftiMagicError, NiftiHeaderError or
    NiftiDatatypeError; all are subclasses of NiftiError.
    """
    blob = _read_raw(path)
    if len(blob) < HEADER_SIZE:
        raise NiftiTruncatedError(
            f"file holds {len(blob)} bytes, header needs {HEADER_SIZE}"
        )
    if blob[MAGIC_OFFSET : MAGIC_OFFSET + 4] != MAGIC_SINGLE:
        raise NiftiMagicError(
            f"bad magic {blob[MAGIC_OFFSET:MAGIC_OFFSET + 4]!r}, expected {MAGIC_SINGLE!r}"
        )

    # dim[0] decides byte order: it is the axis count, always 1..7
    (ndim_le,) = struct.unpack_from("<h", blob, _OFF_DIM)
    if 1 <= ndim_le <= 7:
        bo = "<"
        ndim = ndim_le
    else:
        (ndim_be,) = struct.unpack_from(">h", blob, _OFF_DIM)
        if 1 <= ndim_be <= 7:
            bo = ">"
            ndim = ndim_be
        else:
            raise NiftiHeaderError(
                f"dim[0] = {ndim_le} (LE) / {ndim_be} (BE), expected 1..7"
            )

    (sizeof_hdr,) = struct.unpack_from(f"{bo}i", blob, 0)
    if sizeof_hdr != HEADER_SIZE:
        raise NiftiHeaderError(f"sizeof_hdr = {sizeof_hdr}, expected {HEADER_SIZE}")

    dim = struct.unpack_from(f"{bo}8h", blob, _OFF_DIM)
    if ndim > 3 and any(dim[k] > 1 for k in range(4, ndim + 1)):
        raise NiftiHeaderError(f"volume is not 3D: dim = {dim}")
    w = dim[1]
    h = dim[2] if ndim >= 2 else 1
    d = dim[3] if ndim >= 3 else 1
    if min(w, h, d) < 1:
        raise NiftiHeaderError(f"non-positive extent in dim = {dim}")

    (code,) = struct.unpack_from(f"{bo}h", blob, _OFF_DATATYPE)
    if code not in DATATYPE_CODES:
        raise NiftiDatatypeError(f"unsupported datatype code {code}")
    tag = DATATYPE_CODES[code]
    (bitpix,) = struct.unpack_from(f"{bo}h", blob, _OFF_BITPIX)
    if bitpix != DATATYPE_BITS[tag]:
        raise NiftiHeaderError(f"bitpix {bitpix} does not match datatype {tag}")

    pixdim = struct.unpack_from(f"{bo}8f", blob, _OFF_PIXDIM)
    spacing = tuple(abs(float(p)) if p != 0 else 1.0 for p in pixdim[1:4])

    (vox_offset_f,) = struct.unpack_from(f"{bo}f", blob, _OFF_VOX_OFFSET)
    vox_offset = int(vox_offset_f)
    if vox_offset < HEADER_SIZE:
        raise NiftiHeaderError(f"vox_offset {vox_offset_f} below header size")

    slope, inter = struct.unpack_from(f"{bo}2f", blob, _OFF_SCL_SLOPE)
    if slope == 0:  # 0 means "no scaling stored"
        slope = 1.0

    count = w * h * d
    itemsize = DATATYPE_BITS[tag] // 8
    need = vox_offset + count * itemsize
    if len(blob) < need:
        raise NiftiTruncatedError(
            f"payload needs {need} bytes, file holds {len(blob)}"
        )
    raw = np.frombuffer(
        blob, dtype=np.dtype(SUPPORTED_DTYPES[tag]).newbyteorder(bo),
        count=count, offset=vox_offset,
    )
    # NIfTI payload is x-fastest; (d, h, w) in C order matches it directly
    arr = raw.reshape(d, h, w)
    if bo == ">":
        arr = arr.astype(arr.dtype.newbyteorder("<"))
    if (slope, inter) != (1.0, 0.0):
        arr = (arr.astype(np.float32) * np.float32(slope)) + np.float32(inter)
        tag = "float32"
    arr = np.ascontiguousarray(arr)
    return Volume(dims=(w, h, d), spacing=spacing, data=arr, dtype_tag=tag)


def write_nifti(path: str | Path, volume: Volume) -> None:
    """Write a Volume as single-file NIfTI-1, little-endian, no scaling.

    Output is gzip-compressed when the filename ends with ".gz".
    """
    w, h, d = volume.dims
    tag = volume.dtype_tag
    header = bytearray(HEADER_SIZE)
    struct.pack_into("<i", header, 0, HEADER_SIZE)  # sizeof_hdr
    struct.pack_into("<8h", header, _OFF_DIM, 3, w, h, d, 1, 1, 1, 1)
    struct.pack_into("<h", header, _OFF_DATATYPE, DATATYPE_TAGS[tag])
    struct.pack_into("<h", header, _OFF_BITPIX, DATATYPE_BITS[tag])
    struct.pack_into(
        "<8f", header, _OFF_PIXDIM, 1.0, *volume.spacing, 1.0, 1.0, 1.0, 1.0
    )
    struct.pack_into("<f", header, _OFF_VOX_OFFSET, 352.0)
    struct.pack_into("<2f", header, _OFF_SCL_SLOPE, 1.0, 0.0)
    header[MAGIC_OFFSET : MAGIC_OFFSET + 4] = MAGIC_SINGLE

    payload = np.ascontiguousarray(
        volume.data.astype(np.dtype(SUPPORTED_DTYPES[tag]).newbyteorder("<"))
    ).tobytes()
    blob = bytes(header) + b"\x00" * (352 - HEADER_SIZE) + payload

    out = Path(path)
    if out.name.endswith(".gz"):
        # mtime pinned so identical volumes give identical files
        blob = gzip.compress(blob, mtime=0)
    out.write_bytes(blob)
