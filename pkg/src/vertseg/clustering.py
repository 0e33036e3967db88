"""Intensity clustering engines and mask extraction.

Three estimators share a common shape: :class:`FuzzyCMeans` carries the
soft clustering that drives the segmentation, while :class:`KMeans1D` and
:class:`OtsuThreshold` are the hard baselines it is benchmarked against.
All of them consume scalar intensities, either as a flat vector or as a
single-column matrix, so a raster is clustered via ``image.ravel()``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.exceptions import NotFittedError

from .errors import (
    ConfigError,
    DegenerateData,
    DimensionMismatch,
    IndexOutOfRange,
    SingleClass,
)


def _as_samples(X) -> np.ndarray:
    """Coerce (n,), (n, 1), or nested sequences into a float64 vector."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(
            f"expected a flat intensity vector or a single column, got shape {np.shape(X)}"
        )
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch("intensity values must be finite")
    return arr


def _require_distinct(data: np.ndarray, n_clusters: int) -> None:
    if data.size < n_clusters or np.unique(data).size < n_clusters:
        raise DegenerateData(
            f"need at least {n_clusters} distinct values, got "
            f"{np.unique(data).size} distinct of {data.size} total"
        )


def _quantile_centers(data: np.ndarray, n_clusters: int) -> np.ndarray:
    """Deterministic initialization at the (j + 1/2) / M quantiles.

    Falls back to quantiles of the distinct values when the data quantiles
    collide, which keeps the initial centers strictly increasing.
    """
    probs = (np.arange(n_clusters) + 0.5) / n_clusters
    centers = np.quantile(data, probs)
    if np.unique(centers).size < n_clusters:
        centers = np.quantile(np.unique(data), probs)
    return centers


def _membership_update(data: np.ndarray, centers: np.ndarray, fuzzifier: float) -> np.ndarray:
    """Memberships from inverse-distance weights; exact zeros go hard.

    A sample that coincides with a center gets membership 1 there (lowest
    such center on ties) and 0 elsewhere, the limiting value of the update.
    """
    dist = np.abs(data[:, None] - centers[None, :])
    dmin = dist.min(axis=1, keepdims=True)
    u = np.zeros_like(dist)
    singular = dmin[:, 0] == 0.0
    if np.any(singular):
        u[singular, np.argmin(dist[singular], axis=1)] = 1.0
    regular = ~singular
    if np.any(regular):
        # ratios >= 1, so the powers stay in (0, 1] and cannot overflow
        ratio = dist[regular] / dmin[regular]
        weight = ratio ** (-2.0 / (fuzzifier - 1.0))
        u[regular] = weight / weight.sum(axis=1, keepdims=True)
    return u


def _center_update(
    data: np.ndarray, memberships: np.ndarray, fuzzifier: float, previous: np.ndarray
) -> np.ndarray:
    weights = memberships**fuzzifier
    totals = weights.sum(axis=0)
    centers = previous.copy()
    active = totals > 0.0
    centers[active] = (weights[:, active] * data[:, None]).sum(axis=0)[active] / totals[active]
    return centers


def fcm_objective(data, memberships, centers, fuzzifier: float) -> float:
    """Weighted within-cluster squared distance sum J(U, V)."""
    x = _as_samples(data)
    u = np.asarray(memberships, dtype=np.float64)
    v = np.asarray(centers, dtype=np.float64)
    if u.ndim != 2 or v.ndim != 1 or u.shape != (x.size, v.size):
        raise DimensionMismatch(
            f"memberships {u.shape} do not match {x.size} samples x {v.size} centers"
        )
    if not fuzzifier > 1:
        raise ConfigError(f"fuzzifier must exceed 1, got {fuzzifier}")
    sq = (x[:, None] - v[None, :]) ** 2
    return float(np.sum(u**fuzzifier * sq))


def defuzzify(memberships) -> np.ndarray:
    """Per-row argmax of a membership matrix, ties toward the lower index."""
    u = np.asarray(memberships, dtype=np.float64)
    if u.ndim != 2 or u.size == 0:
        raise DimensionMismatch("membership matrix must be a non-empty 2-D array")
    return np.argmax(u, axis=1)


class FuzzyCMeans(BaseEstimator, ClusterMixin):
    """Fuzzy clustering of scalar intensities by alternating updates.

    Starting from deterministic quantile centers, memberships and centers
    are updated in turn until the largest membership change falls to
    ``tol`` or ``max_iter`` rounds have run. The objective value after
    every full round is non-increasing.

    Parameters
    ----------
    n_clusters : int, default 3
        Number of clusters, at least 2.
    fuzzifier : float, default 2.0
        Membership softness exponent, strictly greater than 1.
    tol : float, default 1e-3
        Convergence threshold on the max absolute membership change,
        strictly between 0 and 1.
    max_iter : int, default 100
        Upper bound on update rounds.
    random_state : int, default 0
        Reserved for randomized initialization; the default quantile
        initialization does not consume it.
    init_centers : array-like of shape (n_clusters,), optional
        Explicit initial centers overriding the quantile rule.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters,)
    membership_ : ndarray of shape (n_samples, n_clusters)
        Rows are non-negative and sum to 1.
    labels_ : ndarray of shape (n_samples,)
        Per-sample argmax of ``membership_``.
    n_iter_ : int
        Full update rounds performed.
    final_shift_ : float
        Max absolute membership change at termination.
    objective_ : float
        Objective value at termination.
    objective_history_ : list of float
        Objective value after each full round.
    """

    def __init__(
        self,
        n_clusters: int = 3,
        fuzzifier: float = 2.0,
        tol: float = 1e-3,
        max_iter: int = 100,
        random_state: int = 0,
        init_centers=None,
    ):
        self.n_clusters = n_clusters
        self.fuzzifier = fuzzifier
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state
        self.init_centers = init_centers

    def _validate_params(self) -> None:
        if int(self.n_clusters) != self.n_clusters or self.n_clusters < 2:
            raise ConfigError(f"n_clusters must be an integer >= 2, got {self.n_clusters}")
        if not self.fuzzifier > 1:
            raise ConfigError(f"fuzzifier must exceed 1, got {self.fuzzifier}")
        if not 0 < self.tol < 1:
            raise ConfigError(f"tol must lie strictly between 0 and 1, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter}")

    def fit(self, X, y=None):
        self._validate_params()
        data = _as_samples(X)
        m = int(self.n_clusters)
        _require_distinct(data, m)
        if self.init_centers is not None:
            centers = np.asarray(self.init_centers, dtype=np.float64).copy()
            if centers.shape != (m,):
                raise ConfigError(
                    f"init_centers must have shape ({m},), got {centers.shape}"
                )
        else:
            centers = _quantile_centers(data, m)
        memberships = _membership_update(data, centers, self.fuzzifier)
        history: list[float] = []
        shift = np.inf
        n_iter = 0
        for n_iter in range(1, int(self.max_iter) + 1):
            centers = _center_update(data, memberships, self.fuzzifier, centers)
            updated = _membership_update(data, centers, self.fuzzifier)
            shift = float(np.max(np.abs(updated - memberships)))
            memberships = updated
            history.append(fcm_objective(data, memberships, centers, self.fuzzifier))
            if shift <= self.tol:
                break
        self.cluster_centers_ = centers
        self.membership_ = memberships
        self.labels_ = defuzzify(memberships)
        self.n_iter_ = n_iter
        self.final_shift_ = shift
        self.objective_ = history[-1]
        self.objective_history_ = history
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "cluster_centers_"):
            raise NotFittedError("call fit before using this estimator")

    def predict_membership(self, X) -> np.ndarray:
        """Membership rows for new intensities under the fitted centers."""
        self._check_fitted()
        return _membership_update(_as_samples(X), self.cluster_centers_, self.fuzzifier)

    def predict(self, X) -> np.ndarray:
        return defuzzify(self.predict_membership(X))


class KMeans1D(BaseEstimator, ClusterMixin):
    """Lloyd iteration on scalar intensities with quantile initialization.

    Assignment ties break toward the lower cluster index; an emptied
    cluster keeps its previous center. Iteration stops when assignments
    stop changing or after ``max_iter`` rounds, and the within-cluster sum
    of squares recorded in ``inertia_history_`` never increases.
    """

    def __init__(self, n_clusters: int = 3, max_iter: int = 100, random_state: int = 0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        if int(self.n_clusters) != self.n_clusters or self.n_clusters < 2:
            raise ConfigError(f"n_clusters must be an integer >= 2, got {self.n_clusters}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter}")
        data = _as_samples(X)
        m = int(self.n_clusters)
        _require_distinct(data, m)
        centers = _quantile_centers(data, m)
        labels = np.argmin(np.abs(data[:, None] - centers[None, :]), axis=1)
        history: list[float] = []
        n_iter = 0
        for n_iter in range(1, int(self.max_iter) + 1):
            for j in range(m):
                members = data[labels == j]
                if members.size:
                    centers[j] = members.mean()
            updated = np.argmin(np.abs(data[:, None] - centers[None, :]), axis=1)
            history.append(float(np.sum((data - centers[updated]) ** 2)))
            if np.array_equal(updated, labels):
                break
            labels = updated
        self.cluster_centers_ = centers
        self.labels_ = labels
        self.n_iter_ = n_iter
        self.inertia_ = history[-1]
        self.inertia_history_ = history
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise NotFittedError("call fit before using this estimator")
        data = _as_samples(X)
        return np.argmin(np.abs(data[:, None] - self.cluster_centers_[None, :]), axis=1)


def otsu_threshold(image) -> int:
    """Threshold in 0..254 maximizing between-class variance.

    Classes are split as (values <= t) versus (values > t) on the 256-bin
    histogram; the smallest maximizing threshold is returned. Foreground
    is the strict upper class.
    """
    arr = np.asarray(image)
    if arr.size == 0:
        raise DimensionMismatch("image must be non-empty")
    if arr.dtype != np.uint8:
        flat = np.asarray(arr, dtype=np.float64).ravel()
        if not np.all(np.isfinite(flat)) or flat.min() < 0 or flat.max() > 255 or np.any(
            flat != np.floor(flat)
        ):
            raise DimensionMismatch("intensities must be integers in [0, 255]")
        arr = flat.astype(np.uint8)
    hist = np.bincount(arr.ravel(), minlength=256).astype(np.int64)
    if np.count_nonzero(hist) < 2:
        raise SingleClass("image holds a single intensity, no threshold separates it")
    weighted = np.arange(256, dtype=np.int64) * hist
    count_low = np.cumsum(hist)[:255]
    sum_low = np.cumsum(weighted)[:255]
    count_high = int(hist.sum()) - count_low
    sum_high = int(weighted.sum()) - sum_low
    variance = np.zeros(255, dtype=np.float64)
    valid = (count_low > 0) & (count_high > 0)
    mean_low = sum_low[valid] / count_low[valid]
    mean_high = sum_high[valid] / count_high[valid]
    variance[valid] = (
        (count_low[valid] * count_high[valid]).astype(np.float64)
        * (mean_low - mean_high) ** 2
    )
    return int(np.argmax(variance))


class OtsuThreshold(BaseEstimator):
    """Estimator facade over :func:`otsu_threshold`.

    ``fit`` learns ``threshold_`` from the supplied intensities and
    ``predict`` marks values strictly above it as foreground.
    """

    def fit(self, X, y=None):
        self.threshold_ = otsu_threshold(X)
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "threshold_"):
            raise NotFittedError("call fit before using this estimator")
        return np.asarray(X) > self.threshold_


def select_vertebra_cluster(centers, policy="brightest") -> int:
    """Pick the cluster treated as bone: the brightest center by default,
    or an explicit index when the policy is an integer."""
    values = np.asarray(centers, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DimensionMismatch("centers must be a non-empty vector")
    if policy == "brightest":
        return int(np.argmax(values))
    index = int(policy)
    if not 0 <= index < values.size:
        raise IndexOutOfRange(f"cluster index {index} outside 0..{values.size - 1}")
    return index


def mask_from_assignment(assignment, cluster: int, width: int, height: int) -> np.ndarray:
    """Boolean (height, width) mask of the samples assigned to one cluster."""
    labels = np.asarray(assignment)
    if labels.ndim != 1 or labels.size != width * height:
        raise DimensionMismatch(
            f"assignment of length {labels.size} does not fill {width}x{height}"
        )
    return (labels == cluster).reshape(height, width)
