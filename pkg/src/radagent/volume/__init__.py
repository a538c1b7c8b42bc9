"""Volume IO and voxel-space operations."""
from .nifti import parse_nifti, write_nifti
from .ops import (
    extract_roi,
    largest_component,
    mask_bounding_box,
    render_slice,
    select_key_slices,
)
from .types import BBox, Image8, Mask, Volume, mask_from_volume

__all__ = [
    "BBox",
    "Image8",
    "Mask",
    "Volume",
    "mask_from_volume",
    "parse_nifti",
    "write_nifti",
    "extract_roi",
    "largest_component",
    "mask_bounding_box",
    "render_slice",
    "select_key_slices",
]
