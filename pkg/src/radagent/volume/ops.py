"""Voxel-space operations: bounding boxes, connected components, ROI
extraction, key-slice selection and 2D slice rendering."""
from __future__ import annotations

from collections import deque

import numpy as np

from ..errors import EmptyLabelError
from .types import BBox, Image8, Mask, Volume


def mask_bounding_box(mask: Mask, label: int) -> BBox | None:
    """Tight inclusive bounds of all voxels carrying `label`.

    Returns None when the label is unused anywhere in the mask.
    """
    zs, ys, xs = np.nonzero(mask.labels == label)
    if zs.size == 0:
        return None
    return BBox(
        x=(int(xs.min()), int(xs.max())),
        y=(int(ys.min()), int(ys.max())),
        z=(int(zs.min()), int(zs.max())),
    )


def largest_component(mask: Mask, label: int) -> Mask:
    """Binary mask (label 1) of the largest 6-connected component of `label`.

    Ties are broken toward the component containing the smallest linear
    voxel index, which falls out of scanning seeds in flat C order and
    keeping only strictly larger components.
    """
    w, h, d = mask.dims
    flat = (mask.labels == label).reshape(-1)
    if not flat.any():
        raise EmptyLabelError(f"label {label} has no voxels")
    plane = h * w
    visited = np.zeros(flat.shape, dtype=bool)
    best: list[int] = []
    for seed in np.flatnonzero(flat):
        seed = int(seed)
        if visited[seed]:
            continue
        comp = [seed]
        visited[seed] = True
        queue = deque((seed,))
        while queue:
            f = queue.popleft()
            z, rem = divmod(f, plane)
            y, x = divmod(rem, w)
            if x > 0:
                n = f - 1
                if flat[n] and not visited[n]:
                    visited[n] = True
                    comp.append(n)
                    queue.append(n)
            if x < w - 1:
                n = f + 1
                if flat[n] and not visited[n]:
                    visited[n] = True
                    comp.append(n)
                    queue.append(n)
            if y > 0:
                n = f - w
                if flat[n] and not visited[n]:
                    visited[n] = True
                    comp.append(n)
                    queue.append(n)
            if y < h - 1:
                n = f + w
                if flat[n] and not visited[n]:
                    visited[n] = True
                    comp.append(n)
                    queue.append(n)
            if z > 0:
                n = f - plane
                if flat[n] and not visited[n]:
                    visited[n] = True
                    comp.append(n)
                    queue.append(n)
            if z < d - 1:
                n = f + plane
                if flat[n] and not visited[n]:
                    visited[n] = True
                    comp.append(n)
                    queue.append(n)
        if len(comp) > len(best):
            best = comp
    out = np.zeros(flat.shape, dtype=np.int32)
    out[np.array(best, dtype=np.int64)] = 1
    return Mask(dims=mask.dims, labels=out.reshape(d, h, w))


def extract_roi(volume: Volume, mask: Mask, label: int, margin: int = 0) -> Volume:
    """Crop the label's bounding box grown by `margin` per side, clamped
    at the volume bounds; spacing carries over."""
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    if mask.dims != volume.dims:
        raise ValueError(f"mask dims {mask.dims} != volume dims {volume.dims}")
    box = mask_bounding_box(mask, label)
    if box is None:
        raise EmptyLabelError(f"label {label} has no voxels")
    w, h, d = volume.dims
    x0 = max(box.x[0] - margin, 0)
    y0 = max(box.y[0] - margin, 0)
    z0 = max(box.z[0] - margin, 0)
    x1 = min(box.x[1] + margin, w - 1)
    y1 = min(box.y[1] + margin, h - 1)
    z1 = min(box.z[1] + margin, d - 1)
    data = np.ascontiguousarray(volume.data[z0 : z1 + 1, y0 : y1 + 1, x0 : x1 + 1])
    return Volume(
        dims=(x1 - x0 + 1, y1 - y0 + 1, z1 - z0 + 1),
        spacing=volume.spacing,
        data=data,
        dtype_tag=volume.dtype_tag,
    )


def select_key_slices(mask: Mask, label: int, depth: int | None = None) -> list[int]:
    """Three consecutive z indices around the label's axial midpoint.

    The window is centered on floor((zmin + zmax) / 2) and shifted by the
    smallest amount needed to sit inside [0, depth - 1].
    """
    if depth is None:
        depth = mask.dims[2]
    elif depth != mask.dims[2]:
        raise ValueError(f"depth {depth} != mask depth {mask.dims[2]}")
    if depth < 3:
        raise ValueError(f"volume depth {depth} < 3")
    box = mask_bounding_box(mask, label)
    if box is None:
        raise EmptyLabelError(f"label {label} has no voxels")
    center = (box.z[0] + box.z[1]) // 2
    start = min(max(center - 1, 0), depth - 3)
    return [start, start + 1, start + 2]


def render_slice(
    volume: Volume, z: int, center: float, width: float
) -> Image8:
    """Window an axial slice to 8 bits.

    Intensities map through lo = center - width/2, t = (v - lo) / width
    clipped to [0, 1], pixel = floor(t * 255 + 0.5); a voxel equal to
    `center` lands on 128.
    """
    if width <= 0:
        raise ValueError(f"window width must be positive, got {width}")
    if not 0 <= z < volume.depth:
        raise ValueError(f"z = {z} outside [0, {volume.depth - 1}]")
    lo = float(center) - float(width) / 2.0
    t = (volume.data[z].astype(np.float64) - lo) / float(width)
    t = np.clip(t, 0.0, 1.0)
    pixels = np.floor(t * 255.0 + 0.5).astype(np.uint8)
    return Image8(
        width=volume.width, height=volume.height, pixels=pixels.tobytes()
    )
