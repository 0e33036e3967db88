"""Binary cleanup chain and anatomical naming of vertebral bodies.

The chain mirrors the post-processing stages applied to a clustered mask:
hole filling, one or more erosions, connected-component analysis, an area
floor, an aspect-ratio band, and finally bottom-up naming L5 through L1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .errors import ConfigError
from .raster import as_mask, relabel_sequential

LUMBAR_NAMES = ("L5", "L4", "L3", "L2", "L1")

_SQUARE = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Component:
    """One connected foreground region and its shape summary.

    The bounding box rows and columns are inclusive; ``aspect_ratio`` is
    bounding-box width over height (columns over rows), the orientation
    under which vertebral bodies in sagittal view land in a narrow band.
    """

    id: int
    area: int
    min_row: int
    min_col: int
    max_row: int
    max_col: int
    centroid_row: float
    centroid_col: float

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        return (self.min_row, self.min_col, self.max_row, self.max_col)

    @property
    def aspect_ratio(self) -> float:
        return (self.max_col - self.min_col + 1) / (self.max_row - self.min_row + 1)


@dataclass(frozen=True)
class MorphoParams:
    erosion_iterations: int = 1
    min_area_fraction: float = 0.005
    aspect_low: float = 1.5
    aspect_high: float = 2.0
    connectivity: int = 8

    def __post_init__(self):
        if int(self.erosion_iterations) != self.erosion_iterations or self.erosion_iterations < 0:
            raise ConfigError(
                f"erosion_iterations must be a non-negative integer, got {self.erosion_iterations}"
            )
        if not 0 <= self.min_area_fraction < 1:
            raise ConfigError(
                f"min_area_fraction must lie in [0, 1), got {self.min_area_fraction}"
            )
        if not 0 < self.aspect_low < self.aspect_high:
            raise ConfigError(
                f"need 0 < aspect_low < aspect_high, got {self.aspect_low}, {self.aspect_high}"
            )
        if self.connectivity not in (4, 8):
            raise ConfigError(f"connectivity must be 4 or 8, got {self.connectivity}")


def _structure(connectivity: int) -> np.ndarray:
    if connectivity == 4:
        return ndimage.generate_binary_structure(2, 1)
    if connectivity == 8:
        return ndimage.generate_binary_structure(2, 2)
    raise ConfigError(f"connectivity must be 4 or 8, got {connectivity}")


def fill_holes(mask) -> np.ndarray:
    """Convert background regions not 4-connected to the border into
    foreground; existing foreground is never removed."""
    m = as_mask(mask)
    return ndimage.binary_fill_holes(m, structure=_structure(4))


def erode(mask, iterations: int = 1) -> np.ndarray:
    """Iterated 3x3 square erosion; off-image neighbors count as background."""
    m = as_mask(mask)
    if int(iterations) != iterations or iterations < 0:
        raise ConfigError(f"iterations must be a non-negative integer, got {iterations}")
    if iterations == 0:
        return m.copy()
    return ndimage.binary_erosion(m, structure=_SQUARE, iterations=int(iterations), border_value=0)


def connected_components(mask, connectivity: int = 8) -> tuple[np.ndarray, list[Component]]:
    """Label maximal foreground regions 1..L in row-major first-encounter
    order and measure each one."""
    m = as_mask(mask)
    raw, count = ndimage.label(m, structure=_structure(connectivity))
    labels = relabel_sequential(raw)
    components: list[Component] = []
    if count == 0:
        return labels.astype(np.int32), components
    areas = np.bincount(labels.ravel())
    rows, cols = np.nonzero(labels)
    values = labels[rows, cols]
    sum_rows = np.bincount(values, weights=rows)
    sum_cols = np.bincount(values, weights=cols)
    boxes = ndimage.find_objects(labels)
    for k in range(1, int(labels.max()) + 1):
        row_slice, col_slice = boxes[k - 1]
        components.append(
            Component(
                id=k,
                area=int(areas[k]),
                min_row=int(row_slice.start),
                min_col=int(col_slice.start),
                max_row=int(row_slice.stop - 1),
                max_col=int(col_slice.stop - 1),
                centroid_row=float(sum_rows[k] / areas[k]),
                centroid_col=float(sum_cols[k] / areas[k]),
            )
        )
    return labels.astype(np.int32), components


def filter_by_area(components, image_area: int, min_area_fraction: float) -> list[Component]:
    """Keep components whose area reaches the given fraction of the image."""
    threshold = min_area_fraction * image_area
    return [c for c in components if c.area >= threshold]


def filter_by_aspect_ratio(components, low: float, high: float) -> list[Component]:
    """Keep components whose width/height ratio lies in [low, high]."""
    if not low < high:
        raise ConfigError(f"need low < high, got {low}, {high}")
    return [c for c in components if low <= c.aspect_ratio <= high]


def label_vertebrae(components) -> dict[int, str]:
    """Name the five most inferior components L5 up to L1.

    Components are ordered by centroid row descending (largest row index
    is lowest in the image); entries beyond the fifth stay unnamed.
    """
    ordered = sorted(components, key=lambda c: -c.centroid_row)
    return {c.id: name for c, name in zip(ordered, LUMBAR_NAMES)}


def run_morphology(
    mask, params: MorphoParams = MorphoParams()
) -> tuple[np.ndarray, list[Component], dict[int, str]]:
    """Full chain from a raw binary mask to named vertebral bodies.

    Returns the relabeled map, its components, and the id-to-name map.
    Components are renumbered by descending centroid row so that named
    vertebrae get stable indices (L5 is 1 through L1 at 5) and any
    unnamed survivors follow.
    """
    m = as_mask(mask)
    filled = fill_holes(m)
    eroded = erode(filled, params.erosion_iterations)
    label_map, components = connected_components(eroded, params.connectivity)
    kept = filter_by_area(components, m.size, params.min_area_fraction)
    kept = filter_by_aspect_ratio(kept, params.aspect_low, params.aspect_high)
    names_by_old_id = label_vertebrae(kept)
    ordered = sorted(kept, key=lambda c: -c.centroid_row)
    relabeled = np.zeros_like(label_map)
    renamed: list[Component] = []
    names: dict[int, str] = {}
    for new_id, component in enumerate(ordered, start=1):
        relabeled[label_map == component.id] = new_id
        renamed.append(replace(component, id=new_id))
        if component.id in names_by_old_id:
            names[new_id] = names_by_old_id[component.id]
    return relabeled, renamed, names


COMPONENT_CSV_HEADER = (
    "id,name,area,min_row,min_col,max_row,max_col,centroid_row,centroid_col,aspect_ratio"
)


def components_to_csv(components, names: dict[int, str] | None = None) -> str:
    """Serialize components to CSV; the name column is empty when unnamed."""
    names = names or {}
    lines = [COMPONENT_CSV_HEADER]
    for c in components:
        lines.append(
            f"{c.id},{names.get(c.id, '')},{c.area},{c.min_row},{c.min_col},"
            f"{c.max_row},{c.max_col},{c.centroid_row:.6g},{c.centroid_col:.6g},"
            f"{c.aspect_ratio:.6g}"
        )
    return "\n".join(lines) + "\n"
