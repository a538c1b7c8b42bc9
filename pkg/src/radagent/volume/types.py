"""Core voxel-domain types.

Volumes store voxel data in x-fastest order: the backing numpy array has
shape (depth, height, width) in C order, so the flat layout matches the
on-disk NIfTI payload and "linear voxel index" means exactly the C-order
flat index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUPPORTED_DTYPES = {
    "uint8": np.uint8,
    "int16": np.int16,
    "float32": np.float32,
}


@dataclass(frozen=True)
class Volume:
    """A single-channel 3D scalar volume (Hounsfield units for CT)."""

    dims: tuple[int, int, int]  # (width, height, depth)
    spacing: tuple[float, float, float]  # mm per voxel along x, y, z
    data: np.ndarray = field(repr=False)  # shape (depth, height, width)
    dtype_tag: str = "int16"

    def __post_init__(self) -> None:
        w, h, d = self.dims
        if min(w, h, d) < 1:
            raise ValueError(f"all dims must be >= 1, got {self.dims}")
        if min(self.spacing) <= 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if self.dtype_tag not in SUPPORTED_DTYPES:
            raise ValueError(f"unsupported dtype tag {self.dtype_tag!r}")
        if self.data.shape != (d, h, w):
            raise ValueError(
                f"data shape {self.data.shape} does not match dims {self.dims}"
            )
        self.data.setflags(write=False)

    @property
    def width(self) -> int:
        return self.dims[0]

    @property
    def height(self) -> int:
        return self.dims[1]

    @property
    def depth(self) -> int:
        return self.dims[2]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Volume):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.spacing == other.spacing
            and self.dtype_tag == other.dtype_tag
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True)
class Mask:
    """Per-voxel integer labels paired with a Volume; label 0 is background."""

    dims: tuple[int, int, int]
    labels: np.ndarray = field(repr=False)  # shape (depth, height, width)

    def __post_init__(self) -> None:
        w, h, d = self.dims
        if self.labels.shape != (d, h, w):
            raise ValueError(
                f"labels shape {self.labels.shape} does not match dims {self.dims}"
            )
        if not np.issubdtype(self.labels.dtype, np.integer):
            raise ValueError(f"labels must be integer, got {self.labels.dtype}")
        if self.labels.size and int(self.labels.min()) < 0:
            raise ValueError("labels must be non-negative")
        self.labels.setflags(write=False)

    def count(self, label: int) -> int:
        return int(np.count_nonzero(self.labels == label))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.labels, other.labels)


def mask_from_volume(v: Volume) -> Mask:
    """Reinterpret a parsed label volume (e.g. a mask NIfTI file) as a Mask."""
    labels = np.rint(np.asarray(v.data)).astype(np.int32)
    return Mask(dims=v.dims, labels=labels)


@dataclass(frozen=True)
class BBox:
    """Inclusive voxel-index bounds per axis."""

    x: tuple[int, int]
    y: tuple[int, int]
    z: tuple[int, int]

    def __post_init__(self) -> None:
        for lo, hi in (self.x, self.y, self.z):
            if lo > hi:
                raise ValueError(f"min > max in bbox axis ({lo}, {hi})")

    def shape(self) -> tuple[int, int, int]:
        """(width, height, depth) of the box."""
        return (
            self.x[1] - self.x[0] + 1,
            self.y[1] - self.y[0] + 1,
            self.z[1] - self.z[0] + 1,
        )


@dataclass(frozen=True)
class Image8:
    """8-bit grayscale image, row-major pixel bytes."""

    width: int
    height: int
    pixels: bytes = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"pixel count {len(self.pixels)} != {self.width}x{self.height}"
            )

    def to_pgm(self) -> bytes:
        """Binary PGM (P5), maxval 255."""
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.pixels
