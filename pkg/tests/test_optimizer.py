"""Arc-growth driver: step control, continuation, insertion choice, reports."""

import warnings

import numpy as np
import pytest

from steklov.discretization import assemble, mask_from_partition
from steklov.eigensolver import AccuracyWarning, EigenPair
from steklov.errors import (
    ClusterError,
    ConfigError,
    ConvergenceError,
    RequirementError,
    ResonanceError,
    StagnationError,
)
from steklov.geometry import BoundaryPartition, circle, kite
from steklov.greens import (
    GreensField,
    eval_greens,
    reported_value,
    solve_greens,
)
from steklov.optimizer import (
    DAMPING_GAP_RATIO,
    OptimizerConfig,
    OptimizerTrace,
    _best_continuation,
    _normalized_combination,
    next_lower_steklov_eigenvalue,
    run,
    select_insertion_point,
)

warnings.simplefilter("ignore", AccuracyWarning)

# Largest kite eigenvalue below 2.5, frozen from 256/512-node runs that
# agree to 2e-7 (simple, between the cluster at 2.0885 and the next above).
KITE_NEXT_LOWER = 2.273680

# Reported source-field value on the uncovered kite at 2.5 for the
# source/receiver pair used below; certified against a 1536-node run.
KITE_SOURCE_VALUE = -0.055148

DISK = circle()


def disk_config(**kw):
    base = dict(curve=DISK, source=(-0.9, 0.0), receiver=(0.0, 0.9), lambda_star=2.5,
                C_tol=1e-3, n_nodes=128)
    base.update(kw)
    return OptimizerConfig(**base)


@pytest.fixture(scope="module")
def disk_run():
    return run(disk_config())


@pytest.fixture(scope="module")
def table_run():
    return run(disk_config(n_nodes=256))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kw", [
    dict(source=(0.1, 0.1), receiver=(0.1, 0.1)),
    dict(lambda_star=0.0),
    dict(lambda_star=-2.0),
    dict(lambda_star=np.inf),
    dict(C_tol=0.0),
    dict(C_tol=-1e-3),
    dict(damping=0.0),
    dict(damping=1.0),
    dict(max_iterations=0),
    dict(n_nodes=8),
    dict(damping_mode="random-restart"),
    dict(spectrum_count=2),
])
def test_config_rejects_bad_values(kw):
    with pytest.raises(ConfigError):
        disk_config(**kw)


def test_config_normalizes_points():
    cfg = disk_config(source=[-0.9, 0.0], receiver=(0.0, 0.9))
    assert isinstance(cfg.source, np.ndarray) and cfg.source.shape == (2,)
    assert not cfg.source.flags.writeable and not cfg.receiver.flags.writeable


# ---------------------------------------------------------------------------
# next lower eigenvalue
# ---------------------------------------------------------------------------

def test_next_lower_disk_double():
    lam, cluster = next_lower_steklov_eigenvalue(DISK, 128, 2.5)
    assert lam == pytest.approx(2.0, abs=1e-8)
    assert len(cluster) == 2
    assert all(p.value == pytest.approx(2.0, abs=1e-8) for p in cluster)


def test_next_lower_accepts_target_on_eigenvalue():
    lam, cluster = next_lower_steklov_eigenvalue(DISK, 128, 1.0)
    assert lam == pytest.approx(1.0, abs=1e-8)
    assert len(cluster) == 2


def test_next_lower_below_first_nonzero():
    with pytest.raises(RequirementError, match="constant mode"):
        next_lower_steklov_eigenvalue(DISK, 128, 0.5)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
def test_next_lower_validates_target(bad):
    with pytest.raises(ConfigError):
        next_lower_steklov_eigenvalue(DISK, 128, bad)


def test_next_lower_kite_true_value():
    lam, cluster = next_lower_steklov_eigenvalue(kite(), 256, 2.5)
    assert lam == pytest.approx(KITE_NEXT_LOWER, abs=2e-4)
    assert len(cluster) == 1


def test_next_lower_reuses_operator_set():
    ops = assemble(DISK, 128)
    lam, _ = next_lower_steklov_eigenvalue(DISK, 128, 2.5, ops=ops)
    assert lam == pytest.approx(2.0, abs=1e-8)


# ---------------------------------------------------------------------------
# insertion point
# ---------------------------------------------------------------------------

def synthetic_field(values, lam=2.5):
    values = np.asarray(values, dtype=float)
    n = len(values)
    return GreensField(
        source=np.array([0.1, 0.0]), lam=lam,
        steklov_fraction=np.ones(n), correction_density=np.zeros(n),
        completion_constant=0.0, boundary_values=values,
        nearest_eigenvalue=2.0, residual=0.0, condition_estimate=1.0)


def test_insertion_argmax_for_nonnegative_value():
    fx = synthetic_field([1.0, 3.0, -2.0, 0.5])
    fy = synthetic_field([1.0, 2.0, -1.0, 0.5])
    assert select_insertion_point(fx, fy, 1.0) == 1
    assert select_insertion_point(fx, fy, 0.0) == 1


def test_insertion_argmin_for_negative_value():
    fx = synthetic_field([1.0, 3.0, -2.0, 0.5])
    fy = synthetic_field([1.0, 2.0, 1.0, 0.5])
    assert select_insertion_point(fx, fy, -1.0) == 2


def test_insertion_tie_takes_smallest_index():
    fx = synthetic_field([2.0, 1.0, 2.0, 1.0])
    fy = synthetic_field([1.0, 1.0, 1.0, 1.0])
    assert select_insertion_point(fx, fy, 1.0) == 0
    assert select_insertion_point(fx, fy, -1.0) == 1


def test_insertion_rejects_parameter_mismatch():
    fx = synthetic_field([1.0, 2.0], lam=2.5)
    fy = synthetic_field([1.0, 2.0], lam=2.6)
    with pytest.raises(ValueError):
        select_insertion_point(fx, fy, 1.0)


def test_insertion_disk_matches_published_angle():
    """Receiver at (0, 0.75): the chosen node sits near 1.96*pi.

    The mean-free shift matters here: the raw product profile peaks in a
    different quadrant.
    """
    ops = assemble(DISK, 256)
    mask = mask_from_partition(ops, BoundaryPartition.all_steklov(DISK))
    fx = solve_greens(ops, mask, (-0.9, 0.0), 2.5)
    fy = solve_greens(ops, mask, (0.0, 0.75), 2.5)
    s_xy = reported_value(ops, fx, eval_greens(fx, ops, np.array([0.0, 0.75])))
    assert s_xy < 0.0
    node = select_insertion_point(fx, fy, s_xy, ops=ops)
    assert ops.params[node] / np.pi == pytest.approx(1.96, abs=0.1)


# ---------------------------------------------------------------------------
# step-control helpers
# ---------------------------------------------------------------------------

def basis_pair(trace, value=2.0, cluster_id=0):
    trace = np.asarray(trace, dtype=float)
    return EigenPair(value=value, density=trace.copy(), trace=trace,
                     cluster_id=cluster_id)


def test_combination_stagnates_on_vanishing_cluster():
    pair = basis_pair([1.0, 0.0, 0.0, 1.0])
    with pytest.raises(StagnationError):
        _normalized_combination([pair], 1, np.ones(4))


def test_combination_concentrates_at_node():
    pairs = [basis_pair([1.0, 0.0, 0.0, 0.0]), basis_pair([0.0, 1.0, 0.0, 0.0])]
    combo, weight = _normalized_combination(pairs, 0, np.ones(4))
    assert weight == pytest.approx(1.0)
    assert combo == pytest.approx(np.array([1.0, 0.0, 0.0, 0.0]))


def test_continuation_prefers_aligned_trace():
    ref = np.array([1.0, 0.0, 0.0, 0.0])
    good = basis_pair([0.9, 0.1, 0.0, 0.0], value=2.3, cluster_id=1)
    bad = basis_pair([0.0, 0.0, 1.0, 0.0], value=2.0, cluster_id=0)
    chosen, score = _best_continuation([bad, good], ref, np.ones(4))
    assert chosen is good and score > 0.9


def test_continuation_needs_a_usable_trace():
    ref = np.array([1.0, 0.0])
    with pytest.raises(ClusterError):
        _best_continuation([basis_pair([0.0, 0.0])], ref, np.ones(2))


# ---------------------------------------------------------------------------
# the growth loop
# ---------------------------------------------------------------------------

def test_run_reaches_target(disk_run):
    assert disk_run.converged
    assert abs(disk_run.final_eigenvalue - 2.5) <= 1e-3
    assert disk_run.initial_eigenvalue == pytest.approx(2.0, abs=1e-8)
    assert disk_run.cluster_size == 2
    assert disk_run.trials < 50


def test_run_first_step_uses_first_order_prediction(disk_run):
    # Uncovered-disk cluster weight at any node is 1/pi, so the first
    # half-length is (lam* - lam0) / (2 * lam0 / pi) = pi/8.
    first = disk_run.records[0]
    assert first.f == 1.0
    assert first.epsilon_delta == pytest.approx(np.pi / 8.0, abs=1e-6)


def test_run_accepted_sequence_increases_to_target(disk_run):
    accepted = disk_run.accepted_eigenvalues()
    assert accepted, "no accepted trials"
    assert all(a < b for a, b in zip(accepted, accepted[1:]))
    assert all(v <= 2.5 + 1e-3 for v in accepted)
    assert accepted[-1] == disk_run.final_eigenvalue


def test_run_rejections_shrink_f_and_restore_arc(disk_run):
    cfg_damping = 0.8
    records = disk_run.records
    assert any(not r.accepted for r in records), "no rejected trials to check"
    for prev, cur in zip(records, records[1:]):
        if prev.accepted:
            assert cur.f == 1.0
        else:
            assert cur.f == pytest.approx(cfg_damping * prev.f, rel=1e-12)
    # every candidate grows from the last *accepted* half-length, so a
    # rejected trial leaves no footprint on the partition
    grown = 0.0
    for r in records:
        assert r.half_length == pytest.approx(grown + r.epsilon_delta, abs=1e-9)
        if r.accepted:
            grown = r.half_length


def test_run_is_deterministic():
    cfg = disk_config()
    a, b = run(cfg), run(cfg)
    assert a.records == b.records
    assert a.s_steklov == b.s_steklov and a.s_end == b.s_end
    assert a.final_eigenvalue == b.final_eigenvalue


def test_run_streams_records_to_observer():
    seen = []
    trace = run(disk_config(), observer=seen.append)
    assert seen == trace.records


def test_run_exhausts_trial_budget():
    with pytest.raises(ConvergenceError, match="not reached"):
        run(disk_config(max_iterations=3))


def test_run_requires_reachable_target():
    with pytest.raises(RequirementError):
        run(disk_config(lambda_star=0.5))


def test_run_gap_ratio_damping_converges_faster(disk_run):
    trace = run(disk_config(damping_mode=DAMPING_GAP_RATIO))
    assert trace.converged
    assert abs(trace.final_eigenvalue - 2.5) <= 1e-3
    assert trace.trials <= disk_run.trials


def test_run_target_on_eigenvalue_ends_resonant():
    # The marker alone already satisfies the tolerance, so the run
    # converges with zero covered length; the closing field evaluation
    # then sits exactly on the eigenvalue and refuses to solve.
    with pytest.raises(ResonanceError):
        run(disk_config(lambda_star=3.0))


def test_run_arc_stays_centered_on_insertion(disk_run):
    assert disk_run.neumann_center_parameter == pytest.approx(
        disk_run.insertion_parameter % (2 * np.pi), abs=1e-9)
    last_accepted = [r for r in disk_run.records if r.accepted][-1]
    assert disk_run.neumann_length == pytest.approx(
        2.0 * last_accepted.half_length, abs=1e-12)


def test_run_disk_reproduces_published_row(table_run):
    assert table_run.converged and abs(table_run.final_eigenvalue - 2.5) <= 1e-3
    assert table_run.s_steklov == pytest.approx(-0.492, abs=5e-3)
    assert abs(table_run.neumann_length / np.pi - 0.36) <= 0.05
    assert 407.0 / 2.0 <= table_run.amplification <= 407.0 * 2.0


def test_run_kite_converges_on_true_spectrum():
    trace = run(OptimizerConfig(curve=kite(), source=(-1.25, 1.25),
                                receiver=(-1.25, -1.25), lambda_star=2.5,
                                n_nodes=256))
    assert trace.converged
    assert abs(trace.final_eigenvalue - 2.5) <= 1e-3
    assert trace.initial_eigenvalue == pytest.approx(KITE_NEXT_LOWER, abs=2e-4)
    assert trace.cluster_size == 1
    assert trace.s_steklov == pytest.approx(KITE_SOURCE_VALUE, abs=1e-3)
    assert trace.amplification > 50.0


def test_trace_defaults_are_inert():
    trace = OptimizerTrace()
    assert trace.trials == 0
    assert trace.accepted_eigenvalues() == []
    assert trace.neumann_length == 0.0
    assert np.isnan(trace.neumann_center_parameter)
