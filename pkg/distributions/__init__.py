#!/usr/bin/env python3
"""
Distributions module for the leakage analyzer.
Provides exact/empirical joint distributions and the information measures on them.
"""

from .joint import (
    JointDistribution,
    SubDistribution,
    ValueDomain,
    compose_joint,
)
from .measures import (
    conditional_entropy,
    joint_entropy,
    mutual_information,
    shannon_entropy,
)
from .matrix_io import read_joint_csv, read_matrix_csv, write_matrix_csv, write_trace_csv

__all__ = [
    'JointDistribution',
    'SubDistribution',
    'ValueDomain',
    'compose_joint',
    'conditional_entropy',
    'joint_entropy',
    'mutual_information',
    'shannon_entropy',
    'read_joint_csv',
    'read_matrix_csv',
    'write_matrix_csv',
    'write_trace_csv',
]
