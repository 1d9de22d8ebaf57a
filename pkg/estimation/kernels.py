#!/usr/bin/env python3
"""
Bias and variance kernels evaluated on the fused empirical joint.

Each function returns the first-order bias of one component and its
"spread" bracket. The variance contribution of the component is
theta^2 * spread / n_i and its allocation weight is theta^2 * spread,
so the estimator and the allocator share one implementation.

Cells whose fused probability is zero are excluded from every sum.
"""

from dataclasses import dataclass
from typing import Dict

import numpy as np

from distributions.joint import JointDistribution
from estimation.components import ComponentKind, ComponentResult


@dataclass(frozen=True)
class FusedArrays:
    """Dense views of the fused joint with masked base-2 logarithms."""

    pxy: np.ndarray
    px: np.ndarray
    py: np.ndarray
    mask: np.ndarray
    log_pxy: np.ndarray
    log_px: np.ndarray
    log_py: np.ndarray

    @classmethod
    def from_joint(cls, joint: JointDistribution) -> "FusedArrays":
        pxy, px, py = joint.pxy, joint.px, joint.py
        mask = pxy > 0
        return cls(
            pxy=pxy,
            px=px,
            py=py,
            mask=mask,
            log_pxy=_masked_log2(pxy),
            log_px=_masked_log2(px),
            log_py=_masked_log2(py),
        )


@dataclass(frozen=True)
class KernelTerms:
    """First-order bias and spread of one component, plus its kernels."""

    bias: float
    spread: float
    kernels: Dict[str, np.ndarray]


def _masked_log2(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values, dtype=float)
    np.log2(values, out=out, where=values > 0)
    return out


def _masked_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(numerator, denominator).shape, dtype=float)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def _spread(weights: np.ndarray, values: np.ndarray) -> float:
    """E[v^2] - E[v]^2 under (possibly sub-normalized) weights."""
    first = float(np.sum(weights * values))
    second = float(np.sum(weights * values * values))
    return max(0.0, second - first * first)


def component_matrix(c: ComponentResult, joint: JointDistribution) -> np.ndarray:
    """
    Empirical joint D_i of a sampled or abstract-sampled component on the fused domain.

    Rows are secrets and columns observables; entries sum to 1.
    """
    domain = joint.domain
    matrix = np.zeros(domain.shape)
    n = c.sample_size
    rows, cols = domain.secret_index, domain.observable_index
    if c.kind is ComponentKind.SAMPLED:
        for (x, y), k in c.counts.items():
            matrix[rows[x], cols[y]] += k / n
    elif c.kind is ComponentKind.ABSTRACT_SAMPLED:
        pi = input_prior_vector(c, joint)
        dy = output_vector(c, joint)
        matrix = np.outer(pi, dy)
    else:
        raise ValueError(f"No joint matrix for {c.kind.value} component {c.component_id}")
    return matrix


def input_prior_vector(c: ComponentResult, joint: JointDistribution) -> np.ndarray:
    pi = np.zeros(joint.domain.shape[0])
    for x, p in c.input_prior.items():
        pi[joint.domain.secret_index[x]] = p
    return pi


def output_vector(c: ComponentResult, joint: JointDistribution) -> np.ndarray:
    """Empirical output distribution D_Yi of an abstract-sampled component."""
    dy = np.zeros(joint.domain.shape[1])
    n = c.sample_size
    for y, k in c.output_counts.items():
        dy[joint.domain.observable_index[y]] += k / n
    return dy


def sampled_terms(d: np.ndarray, theta: float, n: int, f: FusedArrays) -> KernelTerms:
    """Bias (phi kernels) and spread of a standard sampled component."""
    dx = d.sum(axis=1)
    dy = d.sum(axis=0)
    phi_xy = _masked_ratio(d - d * d, f.pxy) * f.mask
    phi_x = _masked_ratio(dx - dx * dx, f.px)
    phi_y = _masked_ratio(dy - dy * dy, f.py)
    bias = theta * theta / (2.0 * n) * (phi_xy.sum() - phi_x.sum() - phi_y.sum())

    level = np.where(f.mask, 1.0 + f.log_px[:, None] + f.log_py[None, :] - f.log_pxy, 0.0)
    spread = _spread(np.where(f.mask, d, 0.0), level)
    return KernelTerms(
        bias=float(bias),
        spread=spread,
        kernels={"phi_xy": phi_xy, "phi_x": phi_x, "phi_y": phi_y, "D": d, "DX": dx, "DY": dy},
    )


def abstract_terms(
    pi: np.ndarray, dy: np.ndarray, theta: float, n: int, f: FusedArrays
) -> KernelTerms:
    """Bias (psi kernel) and spread (gamma kernel) of an abstract-sampled component."""
    d = np.outer(pi, dy)
    psi = _masked_ratio(d * pi[:, None] - d * d, f.pxy) * f.mask
    phi_y = _masked_ratio(dy - dy * dy, f.py)
    bias = theta * theta / (2.0 * n) * (psi.sum() - phi_y.sum())

    gamma = f.log_py - (pi[:, None] * f.log_pxy).sum(axis=0)
    spread = _spread(dy, gamma)
    return KernelTerms(
        bias=float(bias),
        spread=spread,
        kernels={"psi_xy": psi, "phi_y": phi_y, "gamma_y": gamma, "D": d, "DY": dy},
    )


def entropy_terms(dx: np.ndarray, theta: float, n: int, f: FusedArrays) -> KernelTerms:
    """
    Bias and spread of a sampled component for the secret entropy.

    The returned bias is the (negative) expected error of the raw entropy.
    """
    kernel = _masked_ratio(dx * (1.0 - dx), f.px)
    bias = -theta * theta / (2.0 * n) * kernel.sum()
    level = np.where(f.px > 0, 1.0 + f.log_px, 0.0)
    spread = _spread(np.where(f.px > 0, dx, 0.0), level)
    return KernelTerms(bias=float(bias), spread=spread, kernels={"DX": dx})


def known_prior_terms(
    c: ComponentResult, joint: JointDistribution, f: FusedArrays
) -> KernelTerms:
    """
    Bias (M kernel) and per-input spreads of a known-prior component.

    ``kernels["spread_x"][k]`` is the bracket of input k. Unlike the other
    kernels, ``spread`` here is already the variance contribution
    sum_k theta_k^2 * spread_x[k] / n_k, since sizes differ per input.
    """
    domain = joint.domain
    theta = np.zeros(domain.shape[0])
    sizes = np.zeros(domain.shape[0])
    for x, w in c.input_weights.items():
        if x in domain.secret_index:
            theta[domain.secret_index[x]] = float(w)
    for x, s in c.input_sizes.items():
        if x in domain.secret_index:
            sizes[domain.secret_index[x]] = s

    conditional = np.zeros(domain.shape)
    for (x, y), k in c.counts.items():
        i = domain.secret_index[x]
        if sizes[i] > 0:
            conditional[i, domain.observable_index[y]] += k / sizes[i]

    scale = _masked_ratio(theta * theta, sizes)
    m = scale[:, None] * conditional * (1.0 - conditional)
    per_cell = _masked_ratio(m, f.pxy) * f.mask
    per_column = _masked_ratio(m.sum(axis=0), f.py)
    bias = 0.5 * (per_cell.sum() - per_column.sum())

    level = np.where(f.mask, f.log_py[None, :] - f.log_pxy, 0.0)
    weighted = np.where(f.mask, conditional, 0.0)
    first = (weighted * level).sum(axis=1)
    second = (weighted * level * level).sum(axis=1)
    spread_x = np.maximum(0.0, second - first * first)
    variance = float(np.sum(_masked_ratio(theta * theta * spread_x, sizes)))
    return KernelTerms(
        bias=float(bias),
        spread=variance,
        kernels={
            "M": m,
            "D_cond": conditional,
            "theta_x": theta,
            "sizes": sizes,
            "spread_x": spread_x,
        },
    )
