import enum
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from . import constants
from .exceptions.custom_exceptions import CodebookException
from .exceptions.error_messages import CodebookErrorMessage, CodebookErrorCode
from .utils.data_validation_utils import DataValidationUtils

logger = logging.getLogger(__name__)


class SplitMethod(str, enum.Enum):
    STDDEV = "stddev"
    HYPERPLANE = "hyperplane"


class DistanceMeasure(str, enum.Enum):
    MAE = "mae"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True, eq=False)
class LinearCodebook:
    centroids: np.ndarray
    size_bits: int
    split_method: SplitMethod = SplitMethod.STDDEV
    training_distortion: float = 0.0
    distance: DistanceMeasure = DistanceMeasure.MAE

    def __post_init__(self):
        object.__setattr__(self, "centroids", np.atleast_2d(np.asarray(self.centroids, dtype=np.float64)))
        object.__setattr__(self, "split_method", SplitMethod(self.split_method))
        object.__setattr__(self, "distance", DistanceMeasure(self.distance))

    @property
    def size(self):
        return len(self.centroids)


class QuantizationResult(NamedTuple):
    nearest_index: int
    distortion: float


def distance_mae(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    DataValidationUtils.check_same_dimension(a, b, "a", "b")
    return float(np.mean(np.abs(a - b)))


def distance_euclidean(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    DataValidationUtils.check_same_dimension(a, b, "a", "b")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def pairwise_distances(vectors, centroids, distance=DistanceMeasure.MAE) -> np.ndarray:
    """(n_vectors, n_centroids) distance matrix; MAE is the cityblock distance over the dimension."""

    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    centroids = np.atleast_2d(np.asarray(centroids, dtype=np.float64))

    if DistanceMeasure(distance) is DistanceMeasure.EUCLIDEAN:
        return cdist(vectors, centroids, metric="euclidean")
    return cdist(vectors, centroids, metric="cityblock") / vectors.shape[1]


def nearest_centroids(vectors, centroids, distance=DistanceMeasure.MAE):
    """
    Nearest centroid of every vector. `argmin` returns the first minimum, so ties go to the lowest index.

    Returns:
        tuple: (indices, distortions) arrays of length n_vectors.
    """

    distances = pairwise_distances(vectors, centroids, distance)
    indices = np.argmin(distances, axis=1)
    return indices, distances[np.arange(len(indices)), indices]


def quantize(v, cb: LinearCodebook) -> QuantizationResult:
    if cb.size == 0:
        raise CodebookException(CodebookErrorMessage.EMPTY_CODEBOOK,
                                CodebookErrorCode.EMPTY_CODEBOOK_CODE)

    indices, distortions = nearest_centroids(np.asarray(v)[np.newaxis, :], cb.centroids, cb.distance)
    return QuantizationResult(int(indices[0]), float(distortions[0]))


def split_stddev(cluster, centroid):
    """
    Perturb `centroid` by +/- 0.1 times the per-dimension standard deviation of `cluster`.
    When every deviation is zero a fixed vector of 1e-4 replaces it.
    """

    cluster = np.atleast_2d(np.asarray(cluster, dtype=np.float64))
    centroid = np.asarray(centroid, dtype=np.float64)

    sigma = np.std(cluster, axis=0) if len(cluster) else np.zeros_like(centroid)
    if not np.any(sigma > 0):
        sigma = np.full_like(centroid, constants.DEGENERATE_SPLIT_VECTOR_VALUE)

    offset = constants.SPLIT_EPSILON * sigma
    return centroid + offset, centroid - offset


def dominant_eigenpair(covariance):
    """
    Largest eigenvalue and its unit eigenvector by power iteration.

    The iteration starts from the covariance column with the largest diagonal entry and stops
    after 100 steps or when the eigenvalue estimate changes by less than 1e-10 (relative).
    The sign is fixed so that the largest-magnitude component is positive.
    """

    covariance = np.asarray(covariance, dtype=np.float64)
    vector = covariance[:, int(np.argmax(np.diag(covariance)))].copy()
    norm = np.linalg.norm(vector)
    if norm == 0:
        return 0.0, np.eye(len(covariance))[0]
    vector /= norm

    eigenvalue = 0.0
    for _ in range(constants.POWER_ITERATION_MAX_ITERATIONS):
        product = covariance @ vector
        estimate = np.linalg.norm(product)
        if estimate == 0:
            return 0.0, vector
        vector = product / estimate
        converged = abs(estimate - eigenvalue) <= constants.POWER_ITERATION_TOLERANCE * estimate
        eigenvalue = estimate
        if converged:
            break

    if vector[np.argmax(np.abs(vector))] < 0:
        vector = -vector
    return float(vector @ covariance @ vector), vector


def split_hyperplane(cluster, centroid):
    """
    Perturb `centroid` along the dominant principal axis of `cluster`:
    centroid +/- 0.1 * sqrt(lambda_max) * u. Falls back to `split_stddev`
    for clusters of fewer than two vectors or a vanishing lambda_max.
    """

    cluster = np.atleast_2d(np.asarray(cluster, dtype=np.float64))
    centroid = np.asarray(centroid, dtype=np.float64)

    if len(cluster) < 2:
        return split_stddev(cluster, centroid)

    covariance = np.cov(cluster, rowvar=False, bias=True)
    covariance = np.atleast_2d(covariance)
    eigenvalue, direction = dominant_eigenpair(covariance)
    if eigenvalue <= constants.MIN_DOMINANT_EIGENVALUE:
        return split_stddev(cluster, centroid)

    offset = constants.SPLIT_EPSILON * np.sqrt(eigenvalue) * direction
    return centroid + offset, centroid - offset


_SPLITTERS = {
    SplitMethod.STDDEV: split_stddev,
    SplitMethod.HYPERPLANE: split_hyperplane
}


def split_centroid(cluster, centroid, split_method):
    return _SPLITTERS[SplitMethod(split_method)](cluster, centroid)


def _mean_distortion(vectors, centroids, distance):
    return float(np.mean(nearest_centroids(vectors, centroids, distance)[1]))


def _cell_distortion(members, point, distance):
    return float(np.sum(pairwise_distances(members, point[np.newaxis, :], distance)))


def _recover_empty_cells(centroids, data, indices, split_method, distance):
    centroids = centroids.copy()
    counts = np.bincount(indices, minlength=len(centroids))
    members_of = {j: data[indices == j] for j in range(len(centroids))}

    for empty in np.flatnonzero(counts == 0):
        donor = int(np.argmax(counts))
        before = _mean_distortion(data, centroids, distance)
        parent = centroids[donor].copy()

        first, second = split_centroid(members_of[donor], parent, split_method)
        candidate = centroids.copy()
        candidate[donor], candidate[empty] = first, second
        if _mean_distortion(data, candidate, distance) > before:
            candidate[donor] = parent
        if _mean_distortion(data, candidate, distance) > before:
            continue
        centroids = candidate

        counts[empty] = counts[donor] // 2
        counts[donor] -= counts[empty]
        logger.info("Recovered empty cell %d by splitting cell %d", empty, donor)

    return centroids


def _lloyd_step(centroids, data, split_method, distance):
    indices, distortions = nearest_centroids(data, centroids, distance)
    updated = centroids.copy()

    for j in range(len(centroids)):
        members = data[indices == j]
        if len(members) == 0:
            continue
        mean = members.mean(axis=0)
        # the mean is not the L1-optimal point of a cell
        if _cell_distortion(members, mean, distance) <= _cell_distortion(members, centroids[j], distance):
            updated[j] = mean

    if np.any(np.bincount(indices, minlength=len(centroids)) == 0):
        updated = _recover_empty_cells(updated, data, indices, split_method, distance)

    return updated, float(np.mean(distortions))


def lloyd_iterate(cb: LinearCodebook, data):
    """
    One Lloyd iteration: nearest-centroid assignment followed by centroid re-estimation.

    Args:
        cb (LinearCodebook): Codebook to refine.
        data (numpy.ndarray): (n, p) training vectors, n > 0.

    Returns:
        tuple: (refined codebook, mean distortion of `data` under the input codebook).
    """

    data = DataValidationUtils.check_array(data, (None, cb.centroids.shape[1]), "data")
    if len(data) == 0:
        raise CodebookException(CodebookErrorMessage.INSUFFICIENT_DATA.format(cb.size_bits, 1, 0),
                                CodebookErrorCode.INSUFFICIENT_DATA_CODE)

    centroids, distortion = _lloyd_step(cb.centroids, data, cb.split_method, cb.distance)
    refined = LinearCodebook(centroids=centroids,
                             size_bits=cb.size_bits,
                             split_method=cb.split_method,
                             training_distortion=_mean_distortion(data, centroids, cb.distance),
                             distance=cb.distance)
    return refined, distortion


def _refine(centroids, data, split_method, distance):
    previous = None
    for iteration in range(constants.LLOYD_MAX_ITERATIONS):
        centroids, distortion = _lloyd_step(centroids, data, split_method, distance)
        logger.debug("Lloyd iteration %d with %d centroids: distortion %.6f", iteration, len(centroids), distortion)
        if (previous is not None) and (previous - distortion <= constants.LLOYD_RELATIVE_TOLERANCE * previous):
            break
        previous = distortion

    for _ in range(constants.EMPTY_CELL_MAX_ROUNDS):
        indices, _ = nearest_centroids(data, centroids, distance)
        if np.all(np.bincount(indices, minlength=len(centroids)) > 0):
            return centroids
        centroids, _ = _lloyd_step(centroids, data, split_method, distance)

    raise CodebookException(CodebookErrorMessage.UNRECOVERABLE_EMPTY_CELL.format(len(centroids), constants.EMPTY_CELL_MAX_ROUNDS),
                            CodebookErrorCode.UNRECOVERABLE_EMPTY_CELL_CODE)


def train_codebook(data, size_bits: int, split_method=SplitMethod.STDDEV,
                   distance=DistanceMeasure.MAE) -> LinearCodebook:
    """
    Train a codebook of 2^size_bits centroids with the splitting algorithm.

    Starting from the global mean, every centroid is split in two with `split_method`
    and the doubled codebook is refined by Lloyd iterations until the relative distortion
    improvement drops below 1e-4 (at most 50 iterations) and no cell is empty.

    Args:
        data (numpy.ndarray): (n, p) training vectors.
        size_bits (int): Codebook size exponent within [0, 10].
        split_method (SplitMethod, str): "stddev" or "hyperplane".
        distance (DistanceMeasure, str): "mae" (default) or "euclidean".

    Raises:
        ValidationException (VALUE_EXCEPTION_CODE: 4003): If `size_bits` is out of range.
        CodebookException (INSUFFICIENT_DATA_CODE: 6001): If fewer than 2^size_bits vectors are given.
        CodebookException (UNRECOVERABLE_EMPTY_CELL_CODE: 6003): If the data has too few distinct vectors.
    """

    DataValidationUtils.validate_train_codebook_parameters(size_bits)
    split_method = SplitMethod(split_method)
    distance = DistanceMeasure(distance)
    data = DataValidationUtils.check_array(data, (None, None), "data")

    target = 2 ** size_bits
    if len(data) < target:
        raise CodebookException(CodebookErrorMessage.INSUFFICIENT_DATA.format(size_bits, target, len(data)),
                                CodebookErrorCode.INSUFFICIENT_DATA_CODE)

    centroids = data.mean(axis=0, keepdims=True)
    while len(centroids) < target:
        indices, _ = nearest_centroids(data, centroids, distance)
        children = []
        for j, centroid in enumerate(centroids):
            children.extend(split_centroid(data[indices == j], centroid, split_method))
        centroids = _refine(np.array(children), data, split_method, distance)
        logger.debug("Codebook grown to %d centroids", len(centroids))

    return LinearCodebook(centroids=centroids,
                          size_bits=size_bits,
                          split_method=split_method,
                          training_distortion=_mean_distortion(data, centroids, distance),
                          distance=distance)
