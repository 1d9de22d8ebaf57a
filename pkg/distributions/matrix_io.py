#!/usr/bin/env python3
"""
CSV import/export of probability matrices.

Layout: the first row holds the observable values, the first column the
secret values, and the top-left cell is the label ``x\\y``.
"""

import csv
import logging
from fractions import Fraction
from typing import Iterable, List, Tuple

import numpy as np

from distributions.joint import JointDistribution
from exceptions import InvalidDistributionError
from resource_managers import atomic_output

logger = logging.getLogger(__name__)

CORNER_LABEL = "x\\y"


def write_matrix_csv(joint: JointDistribution, path: str, precision: int = 17) -> None:
    """
    Write a joint distribution as a CSV matrix.

    Args:
        joint: Joint distribution to export
        path: Destination CSV file
        precision: Significant digits for each cell
    """
    with atomic_output(path) as handle:
        writer = csv.writer(handle)
        writer.writerow([CORNER_LABEL] + [str(y) for y in joint.domain.observables])
        for x, row in zip(joint.domain.secrets, joint.pxy):
            writer.writerow([str(x)] + [f"{value:.{precision}g}" for value in row])
    logger.info(f"Wrote {joint.domain.shape[0]}x{joint.domain.shape[1]} matrix to {path}")


def read_matrix_csv(path: str) -> Tuple[List[int], List[int], np.ndarray]:
    """
    Read a CSV matrix written by write_matrix_csv (or by hand).

    Args:
        path: CSV file path

    Returns:
        (secret values, observable values, matrix)

    Raises:
        InvalidDistributionError: If the file is not a rectangular numeric matrix
    """
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise InvalidDistributionError(0.0, f"{path}: matrix needs a header and one data row")
    try:
        observables = [int(cell) for cell in rows[0][1:]]
        secrets = [int(row[0]) for row in rows[1:]]
        matrix = np.array([[float(cell) for cell in row[1:]] for row in rows[1:]])
    except ValueError as e:
        raise InvalidDistributionError(0.0, f"{path}: non-numeric cell ({e})")
    if matrix.shape != (len(secrets), len(observables)):
        raise InvalidDistributionError(0.0, f"{path}: ragged matrix")
    return secrets, observables, matrix


def read_joint_csv(path: str) -> JointDistribution:
    """Read a CSV file holding a joint distribution."""
    secrets, observables, matrix = read_matrix_csv(path)
    return JointDistribution.from_matrix(matrix, secrets, observables)


def write_trace_csv(outcomes: Iterable[Tuple[int, int, Fraction]], path: str) -> int:
    """
    Dump exact trace outcomes as (secret, observable, probability) rows.

    Probabilities are written as exact fractions.

    Returns:
        Number of rows written
    """
    count = 0
    with atomic_output(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["secret", "observable", "probability"])
        for secret, observable, probability in outcomes:
            writer.writerow([secret, observable, str(probability)])
            count += 1
    logger.info(f"Wrote {count} trace outcomes to {path}")
    return count
