"""Free-space Laplace kernel and its adjoint normal derivative.

Convention pinned once, here: the fundamental solution is

    gamma0(x, y) = (1/2*pi) * log|x - y|

with the *positive* log, and its derivative along the outward normal at x is

    gamma0_dnu(x, nu_x, y) = (x - y) . nu_x / (2*pi |x - y|^2).

On the boundary diagonal the normal-derivative kernel stays bounded for
smooth curves and tends to kappa(t) / (4*pi), with kappa the signed
curvature; that limit supplies the Nystrom diagonal.

All functions broadcast over leading axes; points live in the last axis of
length 2.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularityError
from .geometry import BoundaryCurve

_MIN_SEPARATION = 1e-14


def _diff_and_dist(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = x - y
    dist = np.linalg.norm(diff, axis=-1)
    if np.any(dist < _MIN_SEPARATION):
        raise SingularityError("kernel evaluated at coincident points")
    return diff, dist


def gamma0(x, y) -> np.ndarray:
    """Fundamental solution (1/2*pi) log|x - y|; symmetric in its arguments."""
    _, dist = _diff_and_dist(x, y)
    return np.log(dist) / (2.0 * np.pi)


def gamma0_dnu(x, nu_x, y) -> np.ndarray:
    """Normal derivative of gamma0 in its first argument.

    Parameters
    ----------
    x : array (..., 2)
        Evaluation points (boundary points in the Nystrom context).
    nu_x : array (..., 2)
        Unit outward normals at x.
    y : array (..., 2)
        Source points.

    Returns
    -------
    (x - y) . nu_x / (2*pi |x - y|^2), broadcast over leading axes.
    """
    diff, dist = _diff_and_dist(x, y)
    nu_x = np.asarray(nu_x, dtype=float)
    return np.sum(diff * nu_x, axis=-1) / (2.0 * np.pi * dist**2)


def gamma0_dnu_diagonal_limit(curve: BoundaryCurve, t) -> np.ndarray:
    """Smooth diagonal limit of gamma0_dnu along a curve: kappa(t) / (4*pi)."""
    return curve.curvature(t) / (4.0 * np.pi)
