"""Dense Nystrom discretization of the boundary operators.

On N equispaced parameter nodes t_j = 2*pi*j/N (N even, N = 2n) the module
assembles

* ``single_layer``        S_ij ~ integral of gamma0(x_i, .) against densities,
* ``adjoint_double_layer``K_ij ~ integral of gamma0_dnu(x_i, nu_i, .),
* ``weights``             w_j = (2*pi/N) |x'(t_j)| for boundary inner products.

The logarithmic singularity of the single layer is resolved with the
classical trigonometric product quadrature: the kernel is split as

    (1/2*pi) log|x(t)-x(tau)|
        = (1/4*pi) log(4 sin^2((t-tau)/2)) + M(t, tau),

where M is smooth with diagonal M(t,t) = (1/2*pi) log|x'(t)|.  The singular
factor is integrated *exactly* against trigonometric polynomials through the
weights

    R_k = -(2*pi/n) sum_{m=1}^{n-1} cos(m k pi / n)/m - (pi/n^2) (-1)^k,

and the smooth remainder by the plain trapezoidal rule, which is itself
spectrally accurate on periodic integrands.  The adjoint double layer has a
smooth kernel whose diagonal is the curvature limit kappa/(4*pi).

Capacity completion
-------------------
On curves of logarithmic capacity one (the unit circle!) the single layer
annihilates constants, so the plain ansatz u = S[phi] cannot represent the
constant eigenfunction of the zero eigenvalue.  All downstream solvers
therefore use the completed representation

    u = S[phi] + integral of phi  (a constant),

whose discrete trace map is ``trace_map = S + 1 w^T``.  The completion does
not change normal derivatives (constants are harmonic with zero flux), is
invertible for every catalog curve, and coincides with the plain map up to
the induced reparametrization of densities whenever S itself is invertible.

Partition masks additionally carry a per-node *Steklov coverage fraction*:
the fraction of the node's quadrature cell [t_i - h/2, t_i + h/2) covered by
Steklov arcs.  Spectral quantities become continuous functions of the arc
endpoints this way, instead of jumping each time an endpoint crosses a node.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import GeometryError, MaskError
from .geometry import (
    NEUMANN,
    STEKLOV,
    TWO_PI,
    BoundaryCurve,
    BoundaryPartition,
    point_normal_speed,
)

_ROBIN_DEGENERATE_TOL = 1e-8


class OperatorSet:
    """Immutable bundle of discretized boundary operators on N nodes.

    Build through :func:`assemble`.  All arrays are read-only views; the
    completed trace map and the Robin constant are computed lazily and
    cached.
    """

    def __init__(self, curve: BoundaryCurve, params, points, normals, speeds,
                 weights, single_layer, adjoint_double_layer):
        self.curve = curve
        self.params = params
        self.points = points
        self.normals = normals
        self.speeds = speeds
        self.weights = weights
        self.single_layer = single_layer
        self.adjoint_double_layer = adjoint_double_layer
        for arr in (params, points, normals, speeds, weights,
                    single_layer, adjoint_double_layer):
            arr.setflags(write=False)
        self._trace_map: np.ndarray | None = None
        self._robin: float | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.params)

    @property
    def trace_map(self) -> np.ndarray:
        """Completed boundary trace of the single-layer ansatz: S + 1 w^T."""
        if self._trace_map is None:
            tm = self.single_layer + np.outer(np.ones(self.n_nodes), self.weights)
            tm.setflags(write=False)
            self._trace_map = tm
        return self._trace_map

    @property
    def robin_constant(self) -> float:
        """Boundary value V of the equilibrium single-layer potential.

        Solves S[psi] = V, integral of psi = 1 through the bordered system;
        V = log(capacity)/(2*pi) vanishes exactly when the curve has
        logarithmic capacity one.
        """
        if self._robin is None:
            n = self.n_nodes
            lhs = np.zeros((n + 1, n + 1))
            lhs[:n, :n] = self.single_layer
            lhs[:n, n] = -1.0
            lhs[n, :n] = self.weights
            rhs = np.zeros(n + 1)
            rhs[n] = 1.0
            sol = np.linalg.solve(lhs, rhs)
            self._robin = float(sol[n])
        return self._robin

    @property
    def capacity_degenerate(self) -> bool:
        """True when the plain single layer (numerically) kills constants."""
        return abs(self.robin_constant) < _ROBIN_DEGENERATE_TOL


def log_quadrature_weights(n: int) -> np.ndarray:
    """Exact trigonometric quadrature weights for log(4 sin^2((t - tau)/2)).

    Returns R_k for node offsets k = 0 .. 2n-1; the rule integrates the
    singular factor exactly against trigonometric polynomials of degree < n.
    """
    k = np.arange(2 * n)
    m = np.arange(1, n)
    cosines = np.cos(np.pi * np.outer(k, m) / n) / m
    return -(2.0 * np.pi / n) * cosines.sum(axis=1) - (np.pi / n**2) * (-1.0) ** k


def assemble(curve: BoundaryCurve, n_nodes: int) -> OperatorSet:
    """Assemble the dense operator set on n_nodes equispaced parameter nodes."""
    N = int(n_nodes)
    if N % 2 != 0:
        raise GeometryError("node count must be even for the log quadrature")
    if N < 16:
        raise GeometryError("node count must be at least 16")
    n = N // 2
    t = TWO_PI * np.arange(N) / N
    pts, nus, sps = point_normal_speed(curve, t)
    w = (TWO_PI / N) * sps

    # --- single layer ------------------------------------------------------
    # smooth remainder M_ij = gamma0(x_i, x_j) - (1/4 pi) log(4 sin^2(..));
    # the diagonal is patched afterwards, so displace it before calling the
    # kernel (which rejects coincident points)
    rows = pts[:, None, :]
    cols = np.broadcast_to(pts[None, :, :], (N, N, 2)).copy()
    idx = np.arange(N)
    cols[idx, idx, 0] += 1.0  # unit displacement; diagonal overwritten below
    g0 = kernels.gamma0(rows, cols)
    sin2 = 4.0 * np.sin((t[:, None] - t[None, :]) / 2.0) ** 2
    np.fill_diagonal(sin2, 1.0)
    M = g0 - np.log(sin2) / (4.0 * np.pi)
    np.fill_diagonal(M, np.log(sps) / (2.0 * np.pi))
    R = log_quadrature_weights(n)[np.abs(np.subtract.outer(idx, idx))]
    single = (R / (4.0 * np.pi) + (TWO_PI / N) * M) * sps[None, :]

    # --- adjoint double layer ------------------------------------------------
    kst = kernels.gamma0_dnu(rows, np.broadcast_to(nus[:, None, :], (N, N, 2)), cols)
    np.fill_diagonal(kst, kernels.gamma0_dnu_diagonal_limit(curve, t))
    adjoint = (TWO_PI / N) * kst * sps[None, :]

    return OperatorSet(curve, t, pts, nus, sps, w, single, adjoint)


# ---------------------------------------------------------------------------
# partition masks
# ---------------------------------------------------------------------------

class PartitionMask:
    """Node labels and Steklov coverage fractions induced by a partition.

    ``is_steklov`` holds the binary containment labels required by the
    discrete contracts; ``steklov_fraction`` refines them to the covered
    fraction of each node's quadrature cell and drives all quadrature-level
    restrictions (eigen pencil, Green's right-hand sides, inner products).
    """

    def __init__(self, ops: OperatorSet, partition: BoundaryPartition,
                 is_steklov: np.ndarray, steklov_fraction: np.ndarray):
        self.ops = ops
        self.partition = partition
        self.is_steklov = is_steklov
        self.steklov_fraction = steklov_fraction
        for arr in (is_steklov, steklov_fraction):
            arr.setflags(write=False)

    @property
    def steklov_weights(self) -> np.ndarray:
        """Quadrature weights of the Steklov part: w_i * fraction_i."""
        return self.ops.weights * self.steklov_fraction

    def cache_key(self) -> tuple:
        return (id(self.ops), self.steklov_fraction.tobytes())


def mask_from_partition(ops: OperatorSet, partition: BoundaryPartition) -> PartitionMask:
    """Label the operator nodes by the arcs containing them."""
    if partition.curve is not ops.curve and partition.curve.name != ops.curve.name:
        raise MaskError("partition belongs to a different curve")
    t = ops.params
    n = len(t)
    h = TWO_PI / n
    labels = np.fromiter(
        (partition.label_at(ti) == STEKLOV for ti in t), dtype=bool, count=n
    )
    frac = np.fromiter(
        (partition.covered_measure(STEKLOV, ti - h / 2.0, ti + h / 2.0) / h for ti in t),
        dtype=float,
        count=n,
    )
    frac = np.clip(frac, 0.0, 1.0)
    # snap away interval-arithmetic rounding so fully covered/uncovered cells
    # carry exact 0/1 fractions
    frac[frac > 1.0 - 1e-9] = 1.0
    frac[frac < 1e-9] = 0.0
    if not labels.any() or not np.any(frac > 0):
        raise MaskError("partition leaves no Steklov node")
    return PartitionMask(ops, partition, labels, frac)


def l2_inner_product(f, g, ops: OperatorSet, mask: PartitionMask | None = None,
                     label: str | None = None) -> float:
    """Discrete L^2 boundary inner product, optionally restricted by label.

    Without a mask (or with label None) integrates over the whole boundary;
    with label 'steklov'/'neumann' the weights are scaled by the node
    coverage fractions of that part.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    w = ops.weights
    if label is not None:
        if mask is None:
            raise MaskError("label restriction requires a mask")
        if label == STEKLOV:
            w = mask.steklov_weights
        elif label == NEUMANN:
            w = ops.weights * (1.0 - mask.steklov_fraction)
        else:
            raise MaskError(f"unknown restriction label '{label}'")
    return float(np.sum(w * f * g))


def eigen_pencil(ops: OperatorSet, mask: PartitionMask) -> tuple[np.ndarray, np.ndarray]:
    """Matrices (A, B) of the generalized eigenproblem A phi = lambda B phi.

    A = -I/2 + adjoint_double_layer realizes the normal derivative of the
    single-layer ansatz; B row i is the completed boundary trace scaled by
    the node's Steklov coverage fraction (zero on Neumann nodes).
    """
    n = ops.n_nodes
    a = -0.5 * np.eye(n) + ops.adjoint_double_layer
    b = mask.steklov_fraction[:, None] * ops.trace_map
    return a, b
