"""Source fields for the mixed Steklov-Neumann problem.

The field of a unit interior point source is split into the free-space
logarithmic potential plus a harmonic correction.  The correction is
carried by a single-layer density on the boundary; the density solves
the masked boundary-condition system, boundary values come from the
trace of that representation, and interior values reuse the layer
potential.

On curves whose single-layer operator annihilates some density (the
unit circle is the standard example) constants cannot be represented
by the layer alone, so fields carry an explicit additive constant.
Everywhere else that constant is folded back into the density and the
plain single-layer representation is exact.
"""

from __future__ import annotations

import warnings
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import kernels
from .discretization import OperatorSet, PartitionMask, eigen_pencil
from .eigensolver import AccuracyWarning, interiority, solve_spectrum_near
from .errors import (
    ConvergenceError,
    GeometryError,
    PartitionError,
    ResonanceError,
    SingularityError,
)

# refuse to solve when lambda is this close (relatively) to an eigenvalue
RESONANCE_GUARD = 1e-6
# relative linear-system residual accepted after one refinement pass
RESIDUAL_TOL = 1e-10

_CACHE_SLOTS = 8
_SOURCE_CLEARANCE = 1e-8


@dataclass
class GreensField:
    """Solved point-source field on one partition at one spectral parameter.

    Attributes
    ----------
    source : ndarray, shape (2,)
        Interior source location.
    lam : float
        Spectral parameter of the Steklov condition.
    steklov_fraction : ndarray, shape (N,)
        Per-node Steklov coverage of the partition the field was solved on.
    correction_density : ndarray, shape (N,)
        Single-layer density carrying the harmonic correction.
    completion_constant : float
        Additive constant of the representation.  Zero whenever the
        single-layer operator can represent constants itself.
    boundary_values : ndarray, shape (N,)
        Field values at the quadrature nodes.
    nearest_eigenvalue : float
        Closest eigenvalue of the partition found by the guard probe.
    residual : float
        Relative residual of the linear solve.
    condition_estimate : float
        1-norm condition estimate of the solved system.
    """

    source: np.ndarray
    lam: float
    steklov_fraction: np.ndarray
    correction_density: np.ndarray
    completion_constant: float
    boundary_values: np.ndarray
    nearest_eigenvalue: float
    residual: float
    condition_estimate: float


# --- per-operator-set caches -------------------------------------------------

def _ops_cache(ops: OperatorSet, name: str) -> OrderedDict:
    cache = getattr(ops, name, None)
    if cache is None:
        cache = OrderedDict()
        object.__setattr__(ops, name, cache)
    return cache


def _trim(cache: OrderedDict) -> None:
    while len(cache) > _CACHE_SLOTS:
        cache.popitem(last=False)


def _plain_ones_density(ops: OperatorSet) -> np.ndarray:
    """Density whose single-layer trace is the constant one.

    Only defined away from the degenerate-capacity case; used to fold the
    completion constant back into a plain single-layer density.
    """
    cache = _ops_cache(ops, "_greens_ones_cache")
    if "psi" not in cache:
        psi = sla.solve(ops.single_layer, np.ones(len(ops.params)))
        psi.setflags(write=False)
        cache["psi"] = psi
    return cache["psi"]


def nearest_eigenvalue(ops: OperatorSet, mask: PartitionMask, lam: float,
                       count: int = 6) -> float:
    """Eigenvalue of the masked problem closest to ``lam`` (cached probe)."""
    cache = _ops_cache(ops, "_greens_spectrum_cache")
    key = (mask.cache_key(), round(float(lam), 12))
    if key not in cache:
        pairs = solve_spectrum_near(ops, mask, float(lam), count=count)
        values = np.array([p.value for p in pairs])
        cache[key] = float(values[np.argmin(np.abs(values - lam))])
        _trim(cache)
    return cache[key]


def _lu_bundle(ops: OperatorSet, mask: PartitionMask, lam: float):
    """LU factorization of the masked source system, shared across sources."""
    cache = _ops_cache(ops, "_greens_lu_cache")
    key = (mask.cache_key(), round(float(lam), 12))
    if key not in cache:
        A, B = eigen_pencil(ops, mask)
        M = A - lam * B
        anorm = np.linalg.norm(M, 1)
        lu = sla.lu_factor(M)
        rcond = sla.lapack.dgecon(lu[0], anorm, norm="1")[0]
        cond = 1.0 / max(rcond, np.finfo(float).tiny)
        cache[key] = (lu, M, cond)
        _trim(cache)
    return cache[key]


# --- solve --------------------------------------------------------------------

def solve_greens(ops: OperatorSet, mask: PartitionMask, source, lam: float
                 ) -> GreensField:
    """Solve for the field of a point source at ``source``.

    Parameters
    ----------
    ops, mask : OperatorSet, PartitionMask
        Discretized boundary operators and the partition mask.
    source : array_like, shape (2,)
        Strictly interior source location.
    lam : float
        Spectral parameter; must keep a relative distance of at least
        ``RESONANCE_GUARD`` from every eigenvalue of the partition.

    Raises
    ------
    GeometryError
        If the source is not strictly interior.
    ResonanceError
        If ``lam`` is inside the guard band of an eigenvalue; the error
        carries the nearest eigenvalue found.
    ConvergenceError
        If the linear solve cannot reach the residual tolerance.
    """
    source = np.array(source, dtype=float).reshape(2)
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0.0:
        raise ValueError("spectral parameter must be finite and nonnegative")

    dist = np.linalg.norm(ops.points - source, axis=1)
    j = int(np.argmin(dist))
    if dist[j] < _SOURCE_CLEARANCE:
        raise GeometryError("source point sits on the boundary")
    if interiority(ops, source) < 0.5:
        raise GeometryError(
            "source point (%g, %g) is not inside the domain" % tuple(source))
    if dist[j] < ops.weights[j]:
        warnings.warn(
            "source is within one node spacing of the boundary; "
            "the corrected field loses accuracy there", AccuracyWarning)

    near = nearest_eigenvalue(ops, mask, lam)
    if abs(lam - near) <= RESONANCE_GUARD * (1.0 + abs(lam)):
        raise ResonanceError(
            "spectral parameter %.12g is within the guard band of the "
            "eigenvalue %.12g" % (lam, near), nearest_eigenvalue=near)

    lu, M, cond = _lu_bundle(ops, mask, lam)
    g0 = kernels.gamma0(ops.points, source)
    g0n = kernels.gamma0_dnu(ops.points, ops.normals, source)
    rhs = lam * mask.steklov_fraction * g0 - g0n

    rho = sla.lu_solve(lu, rhs)
    rho += sla.lu_solve(lu, rhs - M @ rho)        # one refinement pass
    residual = float(np.max(np.abs(rhs - M @ rho)) / (1.0 + np.max(np.abs(rhs))))
    if residual > RESIDUAL_TOL:
        raise ConvergenceError(
            "source solve stalled at relative residual %.3e "
            "(condition estimate %.3e)" % (residual, cond))

    mass = float(ops.weights @ rho)
    if ops.capacity_degenerate:
        density = rho
        constant = mass
    else:
        density = rho + mass * _plain_ones_density(ops)
        constant = 0.0
    boundary = g0 + ops.single_layer @ density + constant

    source.setflags(write=False)
    density.setflags(write=False)
    boundary.setflags(write=False)
    fraction = mask.steklov_fraction.copy()
    fraction.setflags(write=False)
    return GreensField(
        source=source, lam=lam, steklov_fraction=fraction,
        correction_density=density, completion_constant=constant,
        boundary_values=boundary, nearest_eigenvalue=near,
        residual=residual, condition_estimate=cond)


# --- evaluation ----------------------------------------------------------------

def _fine_geometry(ops: OperatorSet, refine: int):
    cache = _ops_cache(ops, "_greens_fine_cache")
    if refine not in cache:
        n_fine = refine * len(ops.params)
        params = 2.0 * np.pi * np.arange(n_fine) / n_fine
        points = ops.curve.eval(params)
        speeds = ops.curve.speed(params)
        weights = (2.0 * np.pi / n_fine) * speeds
        cache[refine] = (points, weights)
        _trim(cache)
    return cache[refine]


def _fine_density(field: GreensField, refine: int) -> np.ndarray:
    cache = getattr(field, "_fine_density", None)
    if cache is None:
        cache = {}
        object.__setattr__(field, "_fine_density", cache)
    if refine not in cache:
        rho = field.correction_density
        n_fine = refine * len(rho)
        cache[refine] = np.fft.irfft(np.fft.rfft(rho), n_fine) * refine
    return cache[refine]


def eval_greens(field: GreensField, ops: OperatorSet, y, refine: int = 1):
    """Evaluate the field at interior points.

    ``y`` may be a single point or an array of shape (..., 2).  With
    ``refine`` > 1 the layer potential is integrated on a trigonometrically
    upsampled copy of the boundary, which keeps the evaluation usable down
    to a fraction of the coarse node spacing from the boundary.
    """
    y = np.asarray(y, dtype=float)
    single = (y.ndim == 1)
    pts = y.reshape(-1, 2)

    gap = np.linalg.norm(pts - field.source, axis=1)
    if np.any(gap < _SOURCE_CLEARANCE):
        raise SingularityError("evaluation point coincides with the source")

    node_sep = np.linalg.norm(pts[:, None, :] - ops.points, axis=-1)
    nearest = np.argmin(node_sep, axis=1)
    on_node = node_sep[np.arange(len(pts)), nearest] < 1e-12

    vals = np.empty(len(pts))
    vals[on_node] = field.boundary_values[nearest[on_node]]

    off = ~on_node
    if np.any(off):
        sub = pts[off]
        inside = kernels.gamma0_dnu(
            ops.points, ops.normals, sub[:, None, :]) @ ops.weights
        if np.any(inside < 0.5):
            raise GeometryError("evaluation point lies outside the domain")

        if refine > 1:
            lay_pts, lay_w = _fine_geometry(ops, refine)
            lay_rho = _fine_density(field, refine)
        else:
            lay_pts, lay_w = ops.points, ops.weights
            lay_rho = field.correction_density

        sep = np.linalg.norm(sub[:, None, :] - lay_pts, axis=-1)
        spacing = lay_w[np.argmin(sep, axis=1)]
        if np.any(np.min(sep, axis=1) < spacing):
            warnings.warn(
                "evaluation point within one node spacing of the boundary; "
                "layer potential accuracy degrades there", AccuracyWarning)

        vals[off] = (kernels.gamma0(sub, field.source)
                     + kernels.gamma0(sub[:, None, :], lay_pts)
                     @ (lay_w * lay_rho)
                     + field.completion_constant)
    if single:
        return float(vals[0])
    return vals.reshape(y.shape[:-1])


def normal_derivative_stencil(field: GreensField, ops: OperatorSet,
                              node_indices, step: float = 5e-3,
                              refine: int = 8) -> np.ndarray:
    """One-sided second-order normal derivative at boundary nodes.

    Steps into the interior along the inward normal and combines the
    upsampled interior evaluations with the stored boundary value:
    f'(0) = (3 f(0) - 4 f(-h) + f(-2h)) / (2h) + O(h^2).
    """
    idx = np.asarray(node_indices, dtype=int).reshape(-1)
    base = ops.points[idx]
    nu = ops.normals[idx]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        f1 = eval_greens(field, ops, base - step * nu, refine=refine)
        f2 = eval_greens(field, ops, base - 2.0 * step * nu, refine=refine)
    f0 = field.boundary_values[idx]
    return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * step)


# --- derived quantities ---------------------------------------------------------

def boundary_product_profile(field_x: GreensField, field_y: GreensField
                             ) -> np.ndarray:
    """Pointwise product of two fields' boundary values.

    Both fields must be solved on the same partition at the same spectral
    parameter; the profile drives the arc-placement selection.
    """
    if field_x.lam != field_y.lam:
        raise ValueError(
            "boundary product needs equal spectral parameters, got "
            "%g and %g" % (field_x.lam, field_y.lam))
    if (field_x.steklov_fraction.shape != field_y.steklov_fraction.shape
            or not np.array_equal(field_x.steklov_fraction,
                                  field_y.steklov_fraction)):
        raise PartitionError("boundary product needs fields solved "
                             "on the same partition")
    return field_x.boundary_values * field_y.boundary_values


def reporting_offset(ops: OperatorSet, field: GreensField) -> float:
    """Constant removed from reported source-field values.

    On degenerate-capacity curves the representable fields are only
    determined up to the constant the layer cannot carry; reported values
    are therefore taken relative to the boundary average.  Elsewhere the
    offset is zero and reported values equal raw values.
    """
    if not ops.capacity_degenerate:
        return 0.0
    w = ops.weights
    return float((w @ field.boundary_values) / np.sum(w))


def reported_value(ops: OperatorSet, field: GreensField, values):
    """Shift raw field values into the reporting convention."""
    offset = reporting_offset(ops, field)
    out = np.asarray(values, dtype=float) - offset
    if out.ndim == 0:
        return float(out)
    return out
