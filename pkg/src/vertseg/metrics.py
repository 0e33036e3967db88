"""Segmentation agreement metrics, descriptive statistics, and timing."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, EmptyInput, EmptyMask
from .raster import as_mask


@dataclass(frozen=True)
class StatsSummary:
    """Sample count, mean, sample standard deviation, and standard error."""

    n: int
    mean: float
    sd: float
    sem: float

    def csv_row(self, label: str) -> str:
        return f"{label},{self.n},{self.mean:.6g},{self.sd:.6g},{self.sem:.6g}"


STATS_CSV_HEADER = "label,n,mean,sd,sem"


@dataclass(frozen=True)
class SegReport:
    """Per-run record of one method's agreement scores and wall time."""

    method: str
    dice: float | None
    hausdorff: float | None
    elapsed_seconds: float

    def csv_row(self) -> str:
        dice = "" if self.dice is None else f"{self.dice:.6g}"
        hausdorff = "" if self.hausdorff is None else f"{self.hausdorff:.6g}"
        return f"{self.method},{dice},{hausdorff},{self.elapsed_seconds:.6g}"


REPORT_CSV_HEADER = "method,dice,hausdorff,elapsed_seconds"


def _check_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    first = as_mask(a)
    second = as_mask(b)
    if first.shape != second.shape:
        raise DimensionMismatch(f"mask shapes differ: {first.shape} vs {second.shape}")
    return first, second


def dice(a, b) -> float:
    """Overlap score 2|A and B| / (|A| + |B|); two empty masks agree at 1."""
    first, second = _check_pair(a, b)
    size_sum = int(first.sum()) + int(second.sum())
    if size_sum == 0:
        return 1.0
    overlap = int(np.logical_and(first, second).sum())
    return 2.0 * overlap / size_sum


def directed_hausdorff(a, b) -> float:
    """Max over foreground of A of the Euclidean distance to the nearest
    foreground pixel of B."""
    first, second = _check_pair(a, b)
    if not first.any() or not second.any():
        raise EmptyMask("both masks must contain foreground")
    nearest = ndimage.distance_transform_edt(~second)
    return float(nearest[first].max())


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance, the larger of the two directed values."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def summarize(values) -> StatsSummary:
    """Mean, sample (n-1) standard deviation, and sd / sqrt(n).

    A single observation has sd and sem defined as 0.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInput("cannot summarize an empty sample")
    n = int(arr.size)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if n > 1 else 0.0
    return StatsSummary(n=n, mean=mean, sd=sd, sem=float(sd / np.sqrt(n)))


def time_call(procedure):
    """Run a zero-argument callable, returning (result, elapsed seconds)
    measured on the monotonic clock."""
    start = time.perf_counter()
    result = procedure()
    return result, time.perf_counter() - start
