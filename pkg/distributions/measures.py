#!/usr/bin/env python3
"""
Shannon information measures, in bits, over joint distributions.

All sums are restricted to strictly positive cells, which implements the
0 * log 0 = 0 convention without thresholds.
"""

import math
from typing import Sequence, Union

import numpy as np

from distributions.joint import JointDistribution
from exceptions import InvalidDistributionError

DISTRIBUTION_TOLERANCE = 1e-9


def _entropy_of(p: np.ndarray) -> float:
    positive = p[p > 0]
    return float(-np.sum(positive * np.log2(positive)))


def shannon_entropy(p: Union[np.ndarray, Sequence[float]]) -> float:
    """
    Shannon entropy of a probability vector.

    Args:
        p: Probabilities, non-negative and summing to 1

    Returns:
        Entropy in bits

    Raises:
        InvalidDistributionError: If p has negative entries or does not sum to 1
    """
    vector = np.asarray(p, dtype=float).ravel()
    if vector.size == 0 or np.any(vector < 0):
        raise InvalidDistributionError(float(vector.sum()), "negative or empty probability vector")
    total = math.fsum(vector)
    if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
        raise InvalidDistributionError(total)
    return max(0.0, _entropy_of(vector))


def joint_entropy(j: JointDistribution) -> float:
    """H(X, Y) of a joint distribution."""
    return max(0.0, _entropy_of(j.pxy.ravel()))


def mutual_information(j: JointDistribution) -> float:
    """
    I(X; Y) = sum over the support of P_XY log2(P_XY / (P_X P_Y)).

    Args:
        j: Joint distribution

    Returns:
        Mutual information in bits (never negative)
    """
    rows, cols = np.nonzero(j.pxy > 0)
    cells = j.pxy[rows, cols]
    ratio = cells / (j.px[rows] * j.py[cols])
    return max(0.0, float(np.sum(cells * np.log2(ratio))))


def conditional_entropy(j: JointDistribution) -> float:
    """
    H(X | Y) = -sum over the support of P_XY log2(P_XY / P_Y).

    Args:
        j: Joint distribution

    Returns:
        Posterior uncertainty about the secret in bits
    """
    rows, cols = np.nonzero(j.pxy > 0)
    cells = j.pxy[rows, cols]
    return max(0.0, float(-np.sum(cells * np.log2(cells / j.py[cols]))))
