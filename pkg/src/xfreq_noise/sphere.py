"""Quadrature on the unit sphere.

Product rule: Gauss-Legendre nodes in cos(theta) times a uniform azimuthal grid.
Weights are in steradians and sum to 4*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_N_THETA = 64
DEFAULT_N_PHI = 128


@dataclass(frozen=True)
class SphereQuadrature:
    nodes: np.ndarray  # (N, 3) unit vectors
    weights: np.ndarray  # (N,) steradians
    order: int  # exact for spherical polynomials up to this degree

    def __post_init__(self):
        if len(self.weights) == 0:
            raise ValueError("empty quadrature")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        norms = np.linalg.norm(self.nodes, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("quadrature nodes must be unit vectors")

    @property
    def theta(self) -> np.ndarray:
        return np.arccos(np.clip(self.nodes[:, 2], -1.0, 1.0))

    @property
    def phi(self) -> np.ndarray:
        return np.arctan2(self.nodes[:, 1], self.nodes[:, 0])

    def integrate(self, f) -> complex | float:
        vals = evaluate_on_nodes(f, self.nodes)
        return np.dot(self.weights, vals)


def build_product_rule(n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> SphereQuadrature:
    """Gauss-Legendre (in cos theta) x trapezoid (in phi) rule on the sphere.

    Exact for spherical harmonics of degree ``min(2*n_theta - 1, n_phi - 1)``.
    """
    if n_theta < 1 or n_phi < 1:
        raise ValueError(f"node counts must be positive, got n_theta={n_theta}, n_phi={n_phi}")
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1.0 - x * x)
    nodes = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(x, n_phi),
        ],
        axis=1,
    )
    weights = np.repeat(wx, n_phi) * (2 * math.pi / n_phi)
    return SphereQuadrature(nodes=nodes, weights=weights, order=min(2 * n_theta - 1, n_phi - 1))


def evaluate_on_nodes(f, nodes: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an (N, 3) node array, falling back to a per-node loop."""
    try:
        vals = np.asarray(f(nodes))
        if vals.shape == (len(nodes),):
            return vals
    except Exception:
        pass
    return np.array([f(k) for k in nodes])


def sphere_average(f, quad: SphereQuadrature):
    """(4 pi)^-1 times the quadrature sum of ``f`` over the sphere.

    ``f`` receives an (N, 3) array of unit vectors when it supports
    vectorized evaluation, otherwise one vector at a time.
    """
    return quad.integrate(f) / (4 * math.pi)


def polar_angle(khat: np.ndarray) -> np.ndarray:
    khat = np.asarray(khat, dtype=float)
    return np.arccos(np.clip(khat[..., 2], -1.0, 1.0))
