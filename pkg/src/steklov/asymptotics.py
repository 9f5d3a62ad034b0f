"""First-order predictors for flipping a short Steklov arc to Neumann.

When a small arc of arclength 2*eps centered at c is removed from the
Steklov part (covered, i.e. turned Neumann), the tracked eigenvalue moves by

    lambda_eps - lambda_0 = 2 * eps * lambda_0 * sum_i u_i(c)^2 + O(eps^2),

the sum running over an L2(Gamma_S)-orthonormal basis of the eigenvalue's
cluster, and the Green's function at fixed interior points moves by

    S_eps(x, y) - S(x, y) = 2 * lambda * eps * S(x, c) * S(y, c) + O(eps^2).

Everything here is a pure formula over values the caller supplies; no
solves are triggered, so the optimizer can call these inside its loop and
decide for itself what to recompute.  Orthonormality of a supplied cluster
is *checked* (when the quadrature weights are passed in), never silently
restored: the formulas presuppose an orthonormal basis and renormalizing
behind the caller's back would hide real bugs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ClusterError, StagnationError

_ORTHONORMAL_TOL = 1e-8


# ---------------------------------------------------------------------------
# prediction record
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationPrediction:
    """Predicted eigenvalue after covering a short arc, with its inputs.

    ``epsilon`` is the arclength *half*-length of the covered arc, and
    ``eigenfunction_values_at_center`` the orthonormal cluster's values at
    the arc center.
    """

    base_eigenvalue: float
    predicted_eigenvalue: float
    eigenfunction_values_at_center: np.ndarray
    epsilon: float
    order_note: str = field(default="O(eps^2)")

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("arc half-length epsilon must be >= 0")
        center = np.atleast_1d(np.asarray(
            self.eigenfunction_values_at_center, dtype=float))
        center.setflags(write=False)
        object.__setattr__(self, "eigenfunction_values_at_center", center)
        if self.predicted_eigenvalue < self.base_eigenvalue - 1e-12:
            raise ValueError("covering part of the Steklov boundary cannot "
                             "lower the tracked eigenvalue")

    @property
    def shift(self) -> float:
        return self.predicted_eigenvalue - self.base_eigenvalue


# ---------------------------------------------------------------------------
# predictors
# ---------------------------------------------------------------------------

def predict_eigenvalue_shift(lambda0: float, center_values, epsilon: float) -> float:
    """Predicted eigenvalue lambda0 + 2*eps*lambda0*sum(u(c)^2).

    ``center_values`` are the values at the arc center of an
    L2(Gamma_S)-orthonormal basis of the tracked cluster; ``epsilon`` is the
    arc's arclength half-length.
    """
    if lambda0 < 0:
        raise ValueError("base eigenvalue must be >= 0")
    if epsilon < 0:
        raise ValueError("arc half-length epsilon must be >= 0")
    center = np.atleast_1d(np.asarray(center_values, dtype=float))
    return float(lambda0 + 2.0 * epsilon * lambda0 * np.sum(center ** 2))


def eigenvalue_prediction(lambda0: float, center_values,
                          epsilon: float) -> PerturbationPrediction:
    """Bundle :func:`predict_eigenvalue_shift` with its inputs."""
    predicted = predict_eigenvalue_shift(lambda0, center_values, epsilon)
    center = np.atleast_1d(np.asarray(center_values, dtype=float))
    note = "O(eps^2)"
    if not np.any(center):
        note = "o(eps^2): cluster vanishes at the arc center"
    return PerturbationPrediction(float(lambda0), predicted, center,
                                  float(epsilon), note)


def verify_orthonormal(cluster_traces, steklov_weights,
                       tol: float = _ORTHONORMAL_TOL) -> None:
    """Raise unless the rows of ``cluster_traces`` are L2(Gamma_S)-orthonormal.

    ``steklov_weights`` are the quadrature weights restricted to the Steklov
    part (``mask.steklov_weights``), so the Gram matrix is
    traces @ diag(w) @ traces^T.
    """
    traces = np.atleast_2d(np.asarray(cluster_traces, dtype=float))
    w = np.asarray(steklov_weights, dtype=float)
    gram = (traces * w) @ traces.T
    defect = float(np.max(np.abs(gram - np.eye(len(traces)))))
    if defect > tol:
        raise ClusterError(
            f"cluster is not orthonormal on the Steklov part "
            f"(Gram defect {defect:.3e}); orthonormalize before predicting")


def predict_eigenfunction_limit(cluster_traces, center_values, query_values,
                                steklov_weights=None):
    """Limit of the tracked eigenfunction as the covered arc shrinks.

    Returns sum_i q_i * u_i(c) / sqrt(sum_i u_i(c)^2), where ``q_i`` are the
    cluster's values at the query location(s): scalars give a scalar, full
    trace rows give the combined trace.  The combination has unit
    L2(Gamma_S) norm when the cluster is orthonormal; passing
    ``steklov_weights`` enforces that instead of trusting the caller.
    """
    center = np.atleast_1d(np.asarray(center_values, dtype=float))
    norm2 = float(np.sum(center ** 2))
    if norm2 <= 0.0:
        raise StagnationError(
            "every cluster member vanishes at the arc center; "
            "the eigenfunction limit is undefined there")
    if steklov_weights is not None:
        verify_orthonormal(cluster_traces, steklov_weights)
    query = np.atleast_1d(np.asarray(query_values, dtype=float))
    if query.shape[0] != center.shape[0]:
        raise ClusterError(
            f"{query.shape[0]} query rows for a cluster of {center.shape[0]}")
    combined = np.tensordot(center, query, axes=(0, 0)) / np.sqrt(norm2)
    return float(combined) if combined.ndim == 0 else combined


def predict_greens_perturbation(s_xy: float, s_xc: float, s_yc: float,
                                lam: float, epsilon: float) -> float:
    """Predicted Green's value after covering the arc: s_xy + 2*lam*eps*s_xc*s_yc.

    ``s_xc`` and ``s_yc`` are the unperturbed boundary values at the arc
    center for sources x and y; the caller must keep ``lam`` away from the
    eigenvalues of both partitions (the solve itself guards that).
    """
    return float(s_xy + 2.0 * lam * epsilon * s_xc * s_yc)
