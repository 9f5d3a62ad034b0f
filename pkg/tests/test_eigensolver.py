"""Spectrum solves on the catalog curves, clustering, traces, interior values."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from steklov.discretization import assemble, l2_inner_product, mask_from_partition
from steklov.eigensolver import (
    AccuracyWarning,
    EigenPair,
    SpectrumRequest,
    cluster_members,
    eval_eigenfunction_at,
    interiority,
    orthonormalize_cluster,
    solve_spectrum,
    solve_spectrum_near,
)
from steklov.errors import ClusterError, EigenSolveError, GeometryError
from steklov.geometry import (
    STEKLOV,
    TWO_PI,
    BoundaryPartition,
    circle,
    kite,
)


def steklov_setup(curve, n):
    ops = assemble(curve, n)
    mask = mask_from_partition(ops, BoundaryPartition.all_steklov(curve))
    return ops, mask


def half_neumann_setup(n):
    c = circle()
    ops = assemble(c, n)
    part = BoundaryPartition.from_neumann_intervals(c, [(0.0, np.pi)])
    return ops, mask_from_partition(ops, part)


# ---------------------------------------------------------------------------
# pure Steklov spectra
# ---------------------------------------------------------------------------

def test_disk_spectrum_first_nine():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=9))
    values = [p.value for p in pairs]
    assert_allclose(values, [0, 1, 1, 2, 2, 3, 3, 4, 4], atol=1e-8)


def test_disk_cluster_ids_follow_multiplicities():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=9))
    assert [p.cluster_id for p in pairs] == [0, 1, 1, 2, 2, 3, 3, 4, 4]


def test_scaled_disk_spectrum():
    # radius 1+eps: every eigenvalue scales by 1/(1+eps)
    eps = 0.1
    ops, mask = steklov_setup(circle(1 + eps), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=5))
    expected = np.array([0, 1, 1, 2, 2]) / (1 + eps)
    assert_allclose([p.value for p in pairs], expected, atol=1e-8)


def test_weyl_pairing_on_circle():
    ops, mask = steklov_setup(circle(), 128)
    count = 2 * (128 // 16) + 1
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=count))
    lam = np.array([p.value for p in pairs])
    per = TWO_PI
    for j in range(1, 128 // 16):
        weyl = TWO_PI * j / per
        assert abs(lam[2 * j - 1] - weyl) <= 1e-3 * weyl
        assert abs(lam[2 * j] - weyl) <= 1e-3 * weyl


def test_kite_spectrum_has_simple_low_modes():
    ops, mask = steklov_setup(kite(), 256)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=5))
    lam = [p.value for p in pairs]
    assert lam[0] == pytest.approx(0.0, abs=1e-8)
    # all positive eigenvalues of the kite near the bottom are simple
    assert np.all(np.diff(lam[1:]) > 1e-3)


# ---------------------------------------------------------------------------
# mixed partitions
# ---------------------------------------------------------------------------

def test_mixed_spectrum_respects_upper_bound():
    ops, mask = half_neumann_setup(128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=6))
    gamma_s = np.pi
    for j, p in enumerate(pairs, start=1):
        assert p.value <= TWO_PI * (j - 1) / gamma_s + 1e-6


def test_zero_mode_present_with_constant_steklov_trace():
    ops, mask = half_neumann_setup(128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=3))
    assert abs(pairs[0].value) <= 1e-8
    tr = pairs[0].trace[mask.steklov_fraction == 1.0]
    assert np.max(np.abs(tr - np.mean(tr))) <= 1e-6 * abs(np.mean(tr))


def test_sorted_eigenvalues_nondecreasing_as_neumann_grows():
    c = circle()
    ops = assemble(c, 128)
    prev = None
    for half in (0.2, 0.5, 1.0):
        part = BoundaryPartition.from_neumann_intervals(
            c, [(np.pi - half, np.pi + half)]
        )
        pairs = solve_spectrum(ops, mask_from_partition(ops, part),
                               SpectrumRequest(count=5))
        lam = np.array([p.value for p in pairs])
        if prev is not None:
            assert np.all(lam >= prev - 1e-8)
        prev = lam


def test_trace_is_completed_single_layer_image():
    ops, mask = half_neumann_setup(64)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=4))
    for p in pairs:
        reconstructed = ops.trace_map @ p.density
        assert_allclose(p.trace, reconstructed, atol=1e-10)


# ---------------------------------------------------------------------------
# shift-invert path
# ---------------------------------------------------------------------------

def test_shift_invert_matches_dense_near_target():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum_near(ops, mask, sigma=2.4, count=6)
    by_distance = sorted((p.value for p in pairs), key=lambda v: abs(v - 2.4))
    # nearest eigenvalues around 2.4 are 2, 2, then 3, 3
    assert_allclose(by_distance[:2], [2, 2], atol=1e-8)
    assert_allclose(by_distance[2:4], [3, 3], atol=1e-8)


def test_shift_invert_is_deterministic():
    ops, mask = steklov_setup(circle(), 64)
    a = solve_spectrum_near(ops, mask, sigma=1.6, count=4)
    b = solve_spectrum_near(ops, mask, sigma=1.6, count=4)
    assert [p.value for p in a] == [p.value for p in b]
    for pa, pb in zip(a, b):
        assert np.array_equal(pa.trace, pb.trace)


def test_shift_invert_survives_shift_on_eigenvalue():
    ops, mask = steklov_setup(circle(), 64)
    pairs = solve_spectrum_near(ops, mask, sigma=2.0, count=4)
    assert min(abs(p.value - 2.0) for p in pairs) < 1e-8


def test_request_validation():
    with pytest.raises(EigenSolveError):
        SpectrumRequest(count=0)
    with pytest.raises(EigenSolveError):
        SpectrumRequest(cluster_tol=0.0)


# ---------------------------------------------------------------------------
# orthonormalization
# ---------------------------------------------------------------------------

def test_orthonormalize_double_cluster_on_circle():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=3))
    cluster = cluster_members(pairs, pairs[1].cluster_id)
    assert len(cluster) == 2
    ortho = orthonormalize_cluster(cluster, ops, mask)
    gram = np.array([
        [l2_inner_product(a.trace, b.trace, ops, mask, STEKLOV) for b in ortho]
        for a in ortho
    ])
    assert_allclose(gram, np.eye(2), atol=1e-8)
    # span check: traces must lie in span{cos t, sin t} sampled on the nodes
    basis = np.stack([np.cos(ops.params), np.sin(ops.params)], axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, np.stack([p.trace for p in ortho], axis=1),
                                 rcond=None)
    resid = basis @ coeffs - np.stack([p.trace for p in ortho], axis=1)
    assert np.max(np.abs(resid)) < 1e-6


def test_orthonormalize_simple_mode_normalizes():
    ops, mask = steklov_setup(circle(), 64)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=1))
    (one,) = orthonormalize_cluster([pairs[0]], ops, mask)
    norm = l2_inner_product(one.trace, one.trace, ops, mask, STEKLOV)
    assert norm == pytest.approx(1.0, abs=1e-10)


def test_orthonormalize_rejects_duplicates_and_mixed_clusters():
    ops, mask = steklov_setup(circle(), 64)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=3))
    dup = [pairs[1], pairs[1]]
    with pytest.raises(ClusterError):
        orthonormalize_cluster(dup, ops, mask)
    with pytest.raises(ClusterError):
        orthonormalize_cluster([pairs[0], pairs[1]], ops, mask)


# ---------------------------------------------------------------------------
# interior evaluation
# ---------------------------------------------------------------------------

def test_interiority_classifier():
    ops = assemble(kite(), 128)
    assert interiority(ops, (-0.5, 0.0)) > 0.99
    assert abs(interiority(ops, (3.0, 3.0))) < 1e-2


def test_eigenfunction_of_first_mode_vanishes_at_origin():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=3))
    lam1 = pairs[1]
    assert eval_eigenfunction_at(lam1, ops, (0.0, 0.0)) == pytest.approx(0.0, abs=1e-10)


def test_eigenfunction_radial_power_scaling():
    # modes of the disk behave like r^lam along rays
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=5))
    for pair in (pairs[1], pairs[3]):  # lam = 1 and lam = 2 members
        p = round(pair.value)
        direction = np.array([np.cos(0.3), np.sin(0.3)])
        u1 = eval_eigenfunction_at(pair, ops, 0.25 * direction)
        u2 = eval_eigenfunction_at(pair, ops, 0.5 * direction)
        if abs(u2) > 1e-8:
            assert u1 / u2 == pytest.approx(0.5**p, abs=1e-6)


def test_eigenfunction_matches_boundary_trace_near_node():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=2))
    pair = pairs[1]
    p = 1
    j = 17
    direction = ops.points[j]
    val = eval_eigenfunction_at(pair, ops, 0.5 * direction)
    assert val == pytest.approx(0.5**p * pair.trace[j], abs=1e-6)


def test_eigenfunction_is_harmonic_inside():
    ops, mask = steklov_setup(circle(), 128)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=4))
    pair = pairs[3]
    x0 = np.array([0.2, -0.1])
    h = 1e-3
    stencil = (
        eval_eigenfunction_at(pair, ops, x0 + [h, 0])
        + eval_eigenfunction_at(pair, ops, x0 - [h, 0])
        + eval_eigenfunction_at(pair, ops, x0 + [0, h])
        + eval_eigenfunction_at(pair, ops, x0 - [0, h])
        - 4 * eval_eigenfunction_at(pair, ops, x0)
    )
    assert abs(stencil) / h**2 < 1e-4


def test_eval_outside_raises_and_near_boundary_warns():
    ops, mask = steklov_setup(circle(), 64)
    pairs = solve_spectrum(ops, mask, SpectrumRequest(count=1))
    with pytest.raises(GeometryError):
        eval_eigenfunction_at(pairs[0], ops, (2.0, 0.0))
    with pytest.warns(AccuracyWarning):
        eval_eigenfunction_at(pairs[0], ops, (0.9999, 0.0))
