"""Resonance tuning by growing a Neumann arc on the boundary.

The driver targets a prescribed eigenvalue lambda_star: starting from the
all-Steklov boundary it picks one boundary node from the product of two
point-source fields, plants a zero-length Neumann marker there, and then
repeatedly widens the arc by the half-length suggested by first-order
perturbation theory,

    eps = f * (lambda_star - lam0) / (2 * lam0 * sum_i u_i(L)^2),

where the u_i are the tracked eigenvalue's cluster orthonormalized on the
current Steklov part and evaluated at the insertion node L.  Trials that
overshoot the target are rolled back and the damping factor f is reduced;
accepted trials reset f to one.  The tracked eigenvalue is continued
through partition changes by trace overlap, not by index, so crossings
with unrelated modes do not derail the run.

Source fields enter twice: the insertion point comes from the boundary
profile of the two fields solved at lambda_star on the uncovered boundary,
and the final report compares the field value at the receiver before and
after covering (both in the mean-free convention of `greens.reported_value`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .discretization import OperatorSet, PartitionMask, assemble, mask_from_partition
from .eigensolver import (
    EigenPair,
    cluster_members,
    orthonormalize_cluster,
    solve_spectrum_near,
)
from .errors import (
    ClusterError,
    ConfigError,
    ConvergenceError,
    EigenSolveError,
    RequirementError,
    StagnationError,
)
from .geometry import (
    NEUMANN,
    ArcSpec,
    BoundaryCurve,
    BoundaryPartition,
    arclength_of,
    extend_neumann_arc,
    insert_neumann_arc,
)
from .greens import (
    GreensField,
    boundary_product_profile,
    eval_greens,
    reported_value,
    reporting_offset,
    solve_greens,
)

TWO_PI = 2.0 * np.pi

DAMPING_CONSTANT = "constant"
DAMPING_GAP_RATIO = "gap-ratio"

# below this cluster weight at the insertion node the predicted step diverges
_WEIGHT_FLOOR = 1e-12
# minimum squared trace overlap accepted as an unambiguous continuation
_OVERLAP_FLOOR = 0.5
# eigenvalues below this are treated as the constant mode
_ZERO_MODE_TOL = 1e-8


# ---------------------------------------------------------------------------
# configuration and trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    """Inputs of one tuning run.

    ``source`` and ``receiver`` must be distinct interior points
    and distinct.  ``lambda_star`` is the eigenvalue target, which must not
    lie below the first nonzero eigenvalue of the uncovered boundary (that
    is checked against the spectrum when the run starts, not here).
    ``damping_mode`` selects how f shrinks after a rejected trial: the
    default multiplies by ``damping``; "gap-ratio" uses the overshoot ratio
    (lambda_star - lam0) / (lam - lam0) instead.
    """

    curve: BoundaryCurve
    source: np.ndarray
    receiver: np.ndarray
    lambda_star: float
    C_tol: float = 1e-3
    damping: float = 0.8
    max_iterations: int = 200
    n_nodes: int = 256
    damping_mode: str = DAMPING_CONSTANT
    spectrum_count: int = 12

    def __post_init__(self):
        src = np.array(self.source, dtype=float).reshape(2)
        rcv = np.array(self.receiver, dtype=float).reshape(2)
        src.setflags(write=False)
        rcv.setflags(write=False)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "receiver", rcv)
        if np.array_equal(src, rcv):
            raise ConfigError("source and receiver must be distinct points")
        if not (self.lambda_star > 0.0 and np.isfinite(self.lambda_star)):
            raise ConfigError("eigenvalue target must be positive and finite")
        if not (self.C_tol > 0.0):
            raise ConfigError("convergence tolerance must be positive")
        if not (0.0 < self.damping < 1.0):
            raise ConfigError("damping factor must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ConfigError("at least one trial is required")
        if self.n_nodes < 32:
            raise ConfigError("discretization needs at least 32 nodes")
        if self.damping_mode not in (DAMPING_CONSTANT, DAMPING_GAP_RATIO):
            raise ConfigError(f"unknown damping mode '{self.damping_mode}'")
        if self.spectrum_count < 4:
            raise ConfigError("continuation window needs at least 4 eigenvalues")


@dataclass(frozen=True)
class IterationRecord:
    """One trial of the growth loop.

    ``half_length`` is the candidate arc's arclength half-width (cumulative,
    not the increment); for rejected trials the candidate is rolled back and
    the value is informational only.
    """

    index: int
    epsilon_delta: float
    f: float
    eigenvalue: float
    accepted: bool
    arc_start: float
    arc_end: float
    half_length: float


@dataclass
class OptimizerTrace:
    """Everything a finished (or aborted) run has to say for itself."""

    records: list[IterationRecord] = field(default_factory=list)
    insertion_index: int = -1
    insertion_parameter: float = np.nan
    initial_eigenvalue: float = np.nan
    cluster_size: int = 0
    converged: bool = False
    final_eigenvalue: float = np.nan
    final_partition: BoundaryPartition | None = None
    s_steklov: float = np.nan
    s_end: float = np.nan

    def accepted_eigenvalues(self) -> list[float]:
        return [r.eigenvalue for r in self.records if r.accepted]

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def amplification(self) -> float:
        """|field after covering / field before covering| at the receiver."""
        return abs(self.s_end / self.s_steklov)

    @property
    def neumann_length(self) -> float:
        if self.final_partition is None:
            return 0.0
        return self.final_partition.length_of(NEUMANN)

    @property
    def neumann_center_parameter(self) -> float:
        """Parameter of the covered arc's arclength midpoint, in [0, 2*pi)."""
        if self.final_partition is None:
            return np.nan
        intervals = self.final_partition.neumann_intervals()
        if not intervals:
            return np.nan
        t_lo, t_hi = intervals[0]
        curve = self.final_partition.curve
        s_mid = float(curve.arclength(t_lo)) + 0.5 * arclength_of(curve, t_lo, t_hi)
        return float(curve.parameter_at_arclength(s_mid)) % TWO_PI


# ---------------------------------------------------------------------------
# spectral bookkeeping
# ---------------------------------------------------------------------------

def _largest_at_or_below(ops: OperatorSet, mask: PartitionMask,
                         lambda_star: float) -> tuple[float, list[EigenPair]]:
    """Largest eigenvalue <= lambda_star with its multiplicity cluster."""
    equal_tol = 1e-9 * (1.0 + abs(lambda_star))
    pairs: list[EigenPair] = []
    for count in (12, 24, 48):
        pairs = solve_spectrum_near(ops, mask, lambda_star, count=count)
        below = [p for p in pairs if p.value <= lambda_star + equal_tol]
        if below:
            break
    else:
        raise EigenSolveError(
            f"found no eigenvalue at or below {lambda_star:g} in the "
            f"continuation window")
    best = max(below, key=lambda p: p.value)
    if best.value < _ZERO_MODE_TOL:
        above = sorted(p.value for p in pairs if p.value >= _ZERO_MODE_TOL)
        hint = f"; the first nonzero eigenvalue is {above[0]:.6g}" if above else ""
        raise RequirementError(
            f"target {lambda_star:g} admits only the constant mode below "
            f"it{hint}")
    return best.value, cluster_members(pairs, best.cluster_id)


def next_lower_steklov_eigenvalue(
    curve: BoundaryCurve, n_nodes: int, lambda_star: float,
    *, ops: OperatorSet | None = None,
) -> tuple[float, list[EigenPair]]:
    """Largest uncovered-boundary eigenvalue at or below the target.

    Returns the eigenvalue together with every pair in its multiplicity
    cluster (raw, not orthonormalized).  Raises ``RequirementError`` when
    only the constant mode lies below the target, i.e. the target cannot
    be reached by covering boundary.
    """
    if not (lambda_star > 0.0 and np.isfinite(lambda_star)):
        raise ConfigError("eigenvalue target must be positive and finite")
    if ops is None:
        ops = assemble(curve, n_nodes)
    mask = mask_from_partition(ops, BoundaryPartition.all_steklov(curve))
    return _largest_at_or_below(ops, mask, lambda_star)


def _normalized_combination(ortho: Sequence[EigenPair], node: int,
                            weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Cluster combination concentrated at a node, plus the cluster weight.

    The weight is sum_i u_i(node)^2 for the orthonormalized cluster; the
    returned trace is sum_i u_i(node) u_i / sqrt(weight), the member of the
    eigenspace that first-order theory moves when the arc grows there.
    """
    at_node = np.array([p.trace[node] for p in ortho])
    weight = float(at_node @ at_node)
    if weight < _WEIGHT_FLOOR:
        raise StagnationError(
            f"cluster weight {weight:.3e} at the insertion node is too small "
            f"to move the eigenvalue at first order")
    combo = np.zeros_like(ortho[0].trace)
    for coeff, pair in zip(at_node, ortho):
        combo = combo + coeff * pair.trace
    combo = combo / np.sqrt(weight)
    norm = np.sqrt(float(np.sum(weights * combo * combo)))
    return combo / norm, weight


def _best_continuation(pairs: Sequence[EigenPair], reference: np.ndarray,
                       weights: np.ndarray) -> tuple[EigenPair, float]:
    """Pair whose normalized trace has the largest squared overlap."""
    best, best_score = None, -1.0
    for p in pairs:
        norm2 = float(np.sum(weights * p.trace * p.trace))
        if norm2 <= 0.0:
            continue
        score = float(np.sum(weights * p.trace * reference)) ** 2 / norm2
        if score > best_score:
            best, best_score = p, score
    if best is None:
        raise ClusterError("continuation window contained no usable trace")
    return best, best_score


# ---------------------------------------------------------------------------
# insertion point
# ---------------------------------------------------------------------------

def select_insertion_point(field_x: GreensField, field_y: GreensField,
                           s_xy: float, ops: OperatorSet | None = None) -> int:
    """Node index where covering the boundary helps the receiver most.

    Takes the two source fields on the uncovered boundary and their value
    ``s_xy`` at the receiver: the node is the argmax of the pointwise
    product of the boundary profiles when ``s_xy`` is nonnegative and the
    argmin otherwise (ties resolve to the smallest index).  When ``ops``
    is given the profiles are shifted into the mean-free reporting
    convention first; on curves without the capacity degeneracy this is a
    no-op.
    """
    profile = boundary_product_profile(field_x, field_y)
    if ops is not None:
        off_x = reporting_offset(ops, field_x)
        off_y = reporting_offset(ops, field_y)
        if off_x != 0.0 or off_y != 0.0:
            profile = ((field_x.boundary_values - off_x)
                       * (field_y.boundary_values - off_y))
    if s_xy >= 0.0:
        return int(np.argmax(profile))
    return int(np.argmin(profile))


# ---------------------------------------------------------------------------
# the growth loop
# ---------------------------------------------------------------------------

def _shrink_f(config: OptimizerConfig, f: float, lam0: float,
              lam_rejected: float) -> float:
    if config.damping_mode == DAMPING_GAP_RATIO:
        gap = lam_rejected - lam0
        if gap > config.lambda_star - lam0 > 0.0:
            return f * (config.lambda_star - lam0) / gap
    return f * config.damping


def run(config: OptimizerConfig,
        observer: Callable[[IterationRecord], None] | None = None
        ) -> OptimizerTrace:
    """Grow a Neumann arc until the tracked eigenvalue reaches the target.

    One operator set serves the whole run; only the partition masks change
    between trials.  Each trial extends the arc by the first-order step,
    recomputes the tracked eigenvalue on the candidate partition, and
    either keeps the candidate (resetting f to one) or rolls back to the
    previous partition object and shrinks f.  Every trial is appended to
    the trace and handed to ``observer`` when given.

    Raises ``RequirementError`` when the target lies below the first
    nonzero eigenvalue, ``StagnationError`` when the eigenspace vanishes
    at the insertion node, ``ClusterError`` when no candidate trace
    continues the tracked one unambiguously, ``PartitionError`` when the
    arc would swallow the whole boundary, and ``ConvergenceError`` when
    the trial budget runs out.
    """
    curve = config.curve
    ops = assemble(curve, config.n_nodes)
    uncovered = BoundaryPartition.all_steklov(curve)
    mask0 = mask_from_partition(ops, uncovered)

    lam0, cluster = _largest_at_or_below(ops, mask0, config.lambda_star)

    field_x = solve_greens(ops, mask0, config.source, config.lambda_star)
    field_y = solve_greens(ops, mask0, config.receiver, config.lambda_star)
    s_steklov = reported_value(ops, field_x, eval_greens(field_x, ops, config.receiver))
    node = select_insertion_point(field_x, field_y, s_steklov, ops=ops)

    trace = OptimizerTrace(
        insertion_index=node,
        insertion_parameter=float(ops.params[node]),
        initial_eigenvalue=lam0,
        cluster_size=len(cluster),
        s_steklov=s_steklov,
    )

    partition = insert_neumann_arc(uncovered, ArcSpec(trace.insertion_parameter, 0.0))
    mask = mask_from_partition(ops, partition)
    tracked = cluster
    f = 1.0

    for index in range(config.max_iterations):
        ortho = orthonormalize_cluster(tracked, ops, mask)
        reference, weight = _normalized_combination(ortho, node,
                                                    mask.steklov_weights)
        eps = 0.5 * f * (config.lambda_star - lam0) / (lam0 * weight)

        arc_id = partition.neumann_arc_ids()[0]
        candidate = extend_neumann_arc(partition, arc_id, eps)
        candidate_mask = mask_from_partition(ops, candidate)

        predicted = lam0 + f * (config.lambda_star - lam0)
        sigma = 0.5 * (lam0 + predicted)
        pairs = solve_spectrum_near(ops, candidate_mask, sigma,
                                    count=config.spectrum_count)
        chosen, score = _best_continuation(pairs, reference,
                                           candidate_mask.steklov_weights)
        if score < _OVERLAP_FLOOR:
            pairs = solve_spectrum_near(ops, candidate_mask, sigma,
                                        count=2 * config.spectrum_count)
            chosen, score = _best_continuation(pairs, reference,
                                               candidate_mask.steklov_weights)
        if score < _OVERLAP_FLOOR:
            raise ClusterError(
                f"eigenvalue continuation is ambiguous at trial {index}: "
                f"best squared trace overlap {score:.3f}")
        lam = chosen.value

        t_lo, t_hi = candidate.neumann_intervals()[0]
        done = abs(lam - config.lambda_star) <= config.C_tol
        accepted = done or lam < config.lambda_star - config.C_tol
        record = IterationRecord(
            index=index, epsilon_delta=eps, f=f, eigenvalue=lam,
            accepted=accepted, arc_start=t_lo, arc_end=t_hi,
            half_length=0.5 * arclength_of(curve, t_lo, t_hi))
        trace.records.append(record)
        if observer is not None:
            observer(record)

        if accepted:
            partition = candidate
            mask = candidate_mask
            tracked = cluster_members(pairs, chosen.cluster_id)
            lam0 = lam
            f = 1.0
            if done:
                break
        else:
            f = _shrink_f(config, f, lam0, lam)
    else:
        raise ConvergenceError(
            f"target {config.lambda_star:g} not reached within "
            f"{config.max_iterations} trials (last eigenvalue {lam0:.9g})")

    field_end = solve_greens(ops, mask, config.source, config.lambda_star)
    trace.s_end = reported_value(ops, field_end,
                                 eval_greens(field_end, ops, config.receiver))
    trace.converged = True
    trace.final_eigenvalue = lam0
    trace.final_partition = partition
    return trace
