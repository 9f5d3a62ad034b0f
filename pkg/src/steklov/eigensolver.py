"""Generalized eigensolver for the discretized mixed spectral problem.

The pencil is A phi = lambda B phi with A = -I/2 + K (normal derivative of
the single-layer ansatz) and B the fraction-scaled completed trace map; see
:mod:`steklov.discretization`.  B is rank deficient by construction (Neumann
rows vanish), so the QZ sweep emits infinite and wildly spurious eigenvalues
that have to be filtered, and eigenvalues come back with minuscule imaginary
parts that are projected away.

Two solve paths:

* :func:`solve_spectrum` -- dense QZ, the whole (filtered) spectrum; used for
  full spectra, bounds checks and moderate N.
* :func:`solve_spectrum_near` -- shift-invert Arnoldi around a target, built
  from one dense LU plus ARPACK in standard mode; ARPACK's generalized mode
  needs a definite right-hand matrix which this pencil does not have.  Used
  by the optimizer loop and the resonance guard at large N.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from . import kernels
from .discretization import OperatorSet, PartitionMask, eigen_pencil, l2_inner_product
from .errors import ClusterError, EigenSolveError, GeometryError
from .geometry import STEKLOV, TWO_PI

#: eigenvalues below this are treated as numerically negative garbage
_NEGATIVE_TOL = 1e-6


class AccuracyWarning(UserWarning):
    """Evaluation requested in a region where the quadrature degrades."""


@dataclass(frozen=True)
class EigenPair:
    """One computed mode: value, layer density, boundary trace, cluster id."""

    value: float
    density: np.ndarray
    trace: np.ndarray
    cluster_id: int


@dataclass(frozen=True)
class SpectrumRequest:
    count: int = 10
    cluster_tol: float = 1e-6
    spurious_cutoff: float = 1e6

    def __post_init__(self):
        if self.count < 1:
            raise EigenSolveError("request needs count >= 1")
        if self.cluster_tol <= 0:
            raise EigenSolveError("cluster_tol must be positive")


def _realize_vector(v: np.ndarray) -> np.ndarray:
    """Rotate a complex eigenvector of a real pencil onto the real axis."""
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if pivot != 0:
        v = v * (np.conj(pivot) / abs(pivot))
    return np.real(v)


def _assign_clusters(values: np.ndarray, cluster_tol: float) -> np.ndarray:
    ids = np.zeros(len(values), dtype=int)
    for i in range(1, len(values)):
        gap = values[i] - values[i - 1]
        ids[i] = ids[i - 1] + (0 if gap <= cluster_tol * (1.0 + abs(values[i])) else 1)
    return ids


def _build_pairs(values, vectors, ops: OperatorSet, mask: PartitionMask,
                 cluster_tol: float) -> list[EigenPair]:
    """Sort, cluster, normalize and sign-fix accepted eigenpairs."""
    order = np.argsort(values)
    values = np.asarray(values)[order]
    vectors = [vectors[i] for i in order]
    ids = _assign_clusters(values, cluster_tol)
    sw = mask.steklov_weights
    pairs = []
    for lam, vec, cid in zip(values, vectors, ids):
        density = _realize_vector(vec)
        trace = ops.trace_map @ density
        norm = float(np.sqrt(np.sum(sw * trace * trace)))
        if norm < 1e-12:  # defensive; a genuine mode cannot vanish on Gamma_S
            norm = float(np.linalg.norm(trace)) or 1.0
        density = density / norm
        trace = trace / norm
        k = int(np.argmax(np.abs(trace)))
        if trace[k] < 0:
            density, trace = -density, -trace
        pairs.append(EigenPair(float(lam), density, trace, int(cid)))
    return pairs


def _filter_eigenvalues(w: np.ndarray, cutoff: float) -> np.ndarray:
    """Indices of eigenvalues that represent genuine finite modes."""
    keep = np.isfinite(w)
    keep &= np.abs(w.imag) <= 1e-6 * (1.0 + np.abs(w.real))
    keep &= np.abs(w.real) <= cutoff
    keep &= w.real >= -_NEGATIVE_TOL
    return np.nonzero(keep)[0]


def solve_spectrum(ops: OperatorSet, mask: PartitionMask,
                   req: SpectrumRequest = SpectrumRequest()) -> list[EigenPair]:
    """Lowest eigenpairs of the mixed problem, sorted ascending and clustered."""
    a, b = eigen_pencil(ops, mask)
    try:
        w, v = sla.eig(a, b, right=True)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise EigenSolveError(f"generalized eigensolve failed: {exc}") from exc
    idx = _filter_eigenvalues(w, req.spurious_cutoff)
    if len(idx) == 0:
        raise EigenSolveError("all eigenvalues were filtered as spurious")
    idx = idx[np.argsort(w.real[idx])][: req.count]
    pairs = _build_pairs(w.real[idx], [v[:, i] for i in idx], ops, mask,
                         req.cluster_tol)
    return pairs


def solve_spectrum_near(ops: OperatorSet, mask: PartitionMask, sigma: float,
                        count: int = 6,
                        req: SpectrumRequest = SpectrumRequest()) -> list[EigenPair]:
    """Eigenpairs nearest the shift sigma via dense-LU shift-invert Arnoldi.

    Deterministic: the Arnoldi start vector is fixed.  The shift is nudged
    when it lands exactly on an eigenvalue (singular factorization).
    """
    a, b = eigen_pencil(ops, mask)
    n = ops.n_nodes
    shift = float(sigma)
    lu = None
    for attempt in range(4):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                lu = sla.lu_factor(a - shift * b)
            break
        except (sla.LinAlgWarning, np.linalg.LinAlgError):
            shift += 1e-8 * (1.0 + abs(shift)) * (10.0**attempt)
    if lu is None:
        raise EigenSolveError(f"shift-invert factorization failed near {sigma}")

    op = spla.LinearOperator((n, n), matvec=lambda x: sla.lu_solve(lu, b @ x))
    k = min(count, n - 2)
    v0 = np.full(n, 1.0 / np.sqrt(n))
    try:
        mu, vecs = spla.eigs(op, k=k, which="LM", v0=v0, maxiter=600)
    except spla.ArpackNoConvergence as exc:
        if len(exc.eigenvalues) == 0:
            raise EigenSolveError(f"Arnoldi did not converge near {sigma}") from exc
        mu, vecs = exc.eigenvalues, exc.eigenvectors
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = shift + 1.0 / mu
    idx = _filter_eigenvalues(lam, req.spurious_cutoff)
    if len(idx) == 0:
        raise EigenSolveError(f"no genuine eigenvalues found near {sigma}")
    return _build_pairs(lam.real[idx], [vecs[:, i] for i in idx], ops, mask,
                        req.cluster_tol)


def cluster_members(pairs: list[EigenPair], cluster_id: int) -> list[EigenPair]:
    return [p for p in pairs if p.cluster_id == cluster_id]


def orthonormalize_cluster(pairs: list[EigenPair], ops: OperatorSet,
                           mask: PartitionMask) -> list[EigenPair]:
    """Modified Gram-Schmidt on the traces in the Steklov inner product.

    The same combinations are applied to densities, so trace remains the
    completed image of density for every returned pair.
    """
    if not pairs:
        return []
    if len({p.cluster_id for p in pairs}) != 1:
        raise ClusterError("pairs do not share a cluster id")
    sw = mask.steklov_weights

    def dot(f, g):
        return float(np.sum(sw * f * g))

    traces = [p.trace.copy() for p in pairs]
    densities = [p.density.copy() for p in pairs]
    out = []
    for i, pair in enumerate(pairs):
        t_i, d_i = traces[i], densities[i]
        base = np.sqrt(dot(t_i, t_i))
        for q_t, q_d in out:
            c = dot(t_i, q_t)
            t_i = t_i - c * q_t
            d_i = d_i - c * q_d
        norm = np.sqrt(dot(t_i, t_i))
        if norm < 1e-8 * max(base, 1.0):
            raise ClusterError("cluster traces are numerically dependent")
        out.append((t_i / norm, d_i / norm))

    result = []
    for pair, (t_i, d_i) in zip(pairs, out):
        k = int(np.argmax(np.abs(t_i)))
        if t_i[k] < 0:
            t_i, d_i = -t_i, -d_i
        result.append(replace(pair, density=d_i, trace=t_i))
    return result


# ---------------------------------------------------------------------------
# eigenfunction reconstruction
# ---------------------------------------------------------------------------

def interiority(ops: OperatorSet, x) -> float:
    """Discrete Gauss integral at x: ~1 inside the curve, ~0 outside."""
    vals = kernels.gamma0_dnu(ops.points, ops.normals, np.asarray(x, dtype=float))
    return float(np.sum(ops.weights * vals))


def evaluate_layer_potential(ops: OperatorSet, density: np.ndarray, x) -> float:
    """Completed single-layer potential of `density` at the interior point x."""
    g = kernels.gamma0(np.asarray(x, dtype=float), ops.points)
    return float(np.sum(ops.weights * density * g) + np.sum(ops.weights * density))


def eval_eigenfunction_at(pair: EigenPair, ops: OperatorSet, x) -> float:
    """Value of the eigenfunction at a strictly interior point.

    Warns (AccuracyWarning) when x comes within one node spacing of the
    boundary, where the plain quadrature of the layer potential loses
    accuracy.
    """
    x = np.asarray(x, dtype=float)
    if interiority(ops, x) < 0.5:
        raise GeometryError(f"point {x.tolist()} is not inside '{ops.curve.name}'")
    dists = np.linalg.norm(ops.points - x[None, :], axis=-1)
    j = int(np.argmin(dists))
    spacing = TWO_PI / ops.n_nodes * ops.speeds[j]
    if dists[j] < spacing:
        warnings.warn(
            f"evaluation point within one node spacing of the boundary "
            f"(distance {dists[j]:.2e})", AccuracyWarning, stacklevel=2)
    return evaluate_layer_potential(ops, pair.density, x)


def steklov_trace_norm(trace: np.ndarray, ops: OperatorSet,
                       mask: PartitionMask) -> float:
    return float(np.sqrt(l2_inner_product(trace, trace, ops, mask, STEKLOV)))
