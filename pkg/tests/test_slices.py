"""Slice membership, bounds, kernel directions, stepping and compression."""

import math

import numpy as np
import pytest

from stable_slices import (
    CompressOptions,
    Poly,
    Slice,
    alternated_cofactor,
    augment,
    compactness_bounds,
    compress,
    eval_poly,
    hurwitz_kernel_direction,
    kernel_direction,
    max_stable_step,
    sample_slice_section,
    slice_contains,
    vieta_from_roots,
)
from stable_slices.errors import DimensionMismatch, NonRealInput
from stable_slices.slices import membership_tolerance

FLAGSHIP_ROOTS = [-20 + 1j, 1j, 20 + 1j, 20j]
FLAGSHIP_PINS = [23j, -463.0, -8461j]


def proj_slice(n, rows, targets, field="complex"):
    """Slice pinning the listed coordinates (0-based) to the given values."""
    L = np.zeros((len(rows), n))
    for i, r in enumerate(rows):
        L[i, r] = 1.0
    return Slice.from_arrays(L, targets, field=field)


class TestSliceContains:
    def test_three_pin_member(self):
        S = proj_slice(4, [0, 1, 2], FLAGSHIP_PINS)
        assert slice_contains(S, vieta_from_roots(FLAGSHIP_ROOTS))

    def test_off_slice(self):
        S = proj_slice(4, [0, 1, 2], FLAGSHIP_PINS)
        assert not slice_contains(S, vieta_from_roots([1j, 2j, 3j, 4j]))

    def test_on_slice_but_unstable(self):
        # z = (0, 1) satisfies the pin but the roots are +-i
        S = proj_slice(2, [0], [0.0])
        assert not slice_contains(S, vieta_from_roots([1j, -1j]))

    def test_explicit_tolerance(self):
        S = proj_slice(2, [0], [3j])
        p = vieta_from_roots([1j, 2j + 1e-6])
        assert not slice_contains(S, p)
        assert slice_contains(S, p, tol=1e-3)


class TestCompactnessBounds:
    def test_flagship_pins(self):
        b = compactness_bounds(23j, -463.0, 4)
        assert b is not None
        assert b.im_lo == pytest.approx(0.0)
        assert b.im_hi == pytest.approx(23.0)
        assert b.re_sq_bound == pytest.approx(2513.0)
        # the known member sits well inside
        re_sq = sum(r.real**2 for r in FLAGSHIP_ROOTS)
        assert re_sq == pytest.approx(800.0)
        assert re_sq <= b.re_sq_bound
        for r in FLAGSHIP_ROOTS:
            assert b.im_lo - 1e-12 <= r.imag <= b.im_hi + 1e-12

    def test_zero_pins_pin_everything(self):
        b = compactness_bounds(0j, 0j, 3)
        assert b is not None
        assert (b.im_lo, b.im_hi, b.re_sq_bound) == (0.0, 0.0, 0.0)

    def test_empty_slice(self):
        # roots i*(1 +- sqrt(11)); one of them has negative imaginary part,
        # so no stable monic quadratic has e1 = 2i, e2 = 10
        assert compactness_bounds(2j, 10.0, 2) is None
        lo = 1.0 - math.sqrt(11.0)
        assert lo < 0

    def test_small_quadratic_bound(self):
        b = compactness_bounds(2j, -10.0, 2)
        assert b is not None
        assert b.im_hi == pytest.approx(2.0)
        assert b.re_sq_bound == pytest.approx(24.0)

    def test_bounds_hold_on_random_stable_sets(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            roots = [complex(rng.normal(0, 2.0), abs(rng.normal(0, 1.5)))
                     for _ in range(n)]
            a1 = sum(roots)
            a2 = sum(roots[i] * roots[j]
                     for i in range(n) for j in range(i + 1, n))
            b = compactness_bounds(a1, a2, n)
            assert b is not None
            slack = 1e-9 * (1.0 + abs(a1) + abs(a2))
            for r in roots:
                assert b.im_lo - slack <= r.imag <= b.im_hi + slack
            assert sum(r.real**2 for r in roots) <= b.re_sq_bound + slack


class TestAugment:
    def test_coordinate_prefix_unchanged(self):
        S = proj_slice(3, [0, 1], [1.0, 2.0])
        A = augment(S, (1.0, 2.0, 5.0))
        assert A.k == 2
        assert np.allclose(np.asarray(A.matrix), np.asarray(S.matrix))
        assert np.allclose(np.asarray(A.target_vector), [1.0, 2.0])

    def test_third_coordinate_gets_two_rows(self):
        S = proj_slice(4, [2], [4.0])
        z0 = (1.0, 2.0, 4.0, 8.0)
        A = augment(S, z0)
        assert A.k == 3
        # z1 and z2 are pinned to their values at the base point
        assert np.allclose(np.asarray(A.target_vector), [4.0, 1.0, 2.0])
        r = A.residual(np.asarray(z0, dtype=complex))
        assert r <= membership_tolerance(A.target_vector)

    def test_first_coordinate_gets_second_row(self):
        S = proj_slice(3, [0], [6.0])
        A = augment(S, (6.0, 11.0, 6.0))
        assert A.k == 2
        assert np.allclose(np.asarray(A.target_vector), [6.0, 11.0])

    def test_base_point_stays_on_augmented_slice(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            k = int(rng.integers(1, n))
            L = rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n))
            z0 = rng.normal(size=n) + 1j * rng.normal(size=n)
            S = Slice.from_arrays(L, L @ z0)
            A = augment(S, z0)
            assert A.k >= S.k
            assert A.residual(z0) <= membership_tolerance(A.target_vector)


class TestKernelDirection:
    def test_single_frozen_root_hand_example(self):
        # n = 3, L pins z1, one frozen simple root at 1, two mover slots.
        # h = 1 works: the perturbation 1 * (T - 1) leaves z1 alone.
        S = proj_slice(3, [0], [0.0])
        cof = alternated_cofactor([1.0])
        kd = kernel_direction(S, cof, 2, mode="complex")
        assert kd is not None
        assert np.allclose(kd.b, (0.0, 1.0))
        assert np.allclose(kd.c, (0.0, 1.0, 1.0))

    def test_direction_is_multiplier_times_cofactor(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(3, 8))
            m = int(rng.integers(1, n))
            frozen = [complex(rng.normal(), abs(rng.normal()) + 0.1)
                      for _ in range(n - m)]
            k = int(rng.integers(1, m + 1)) if m > 1 else 1
            if k >= m:
                k = m - 1
            if k < 1:
                continue
            L = rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n))
            S = Slice.from_arrays(L, np.zeros(k))
            cof = alternated_cofactor(frozen)
            kd = kernel_direction(S, cof, m, mode="complex")
            if kd is None:
                continue
            c = np.asarray(kd.c)
            assert np.convolve(np.asarray(kd.b), cof) == pytest.approx(c)
            scale = np.max(np.abs(L)) * max(np.max(np.abs(c)), 1e-30)
            assert np.max(np.abs(L @ c)) <= 1e-9 * scale

    def test_direction_preserves_frozen_roots(self):
        # moving along c multiplies in a polynomial divisible by (T - x0),
        # so the frozen root survives any step size
        S = proj_slice(3, [0], [0.0])
        cof = alternated_cofactor([1.0])
        kd = kernel_direction(S, cof, 2, mode="complex")
        z = np.asarray(vieta_from_roots([1.0, 0.5 + 1j, -0.5 + 1j]).z)
        for eps in (0.1, 1.0, 17.0):
            moved = Poly(tuple(z + eps * np.asarray(kd.c)))
            assert abs(eval_poly(moved, 1.0)) < 1e-10

    def test_full_rank_constraints_block_direction(self):
        S = proj_slice(3, [0, 1, 2], [0.0, 0.0, 0.0])
        assert kernel_direction(S, alternated_cofactor([1.0]), 2,
                                mode="complex") is None


class TestHurwitzKernelDirection:
    def test_even_position_entries_vanish(self):
        # m = 5 movers, no frozen factor, two real constraints
        L = np.array([[1.0, 2.0, 3.0, 4.0, 5.0],
                      [0.0, 1.0, 0.0, 1.0, 0.0]])
        S = Slice.from_arrays(L, [0.0, 0.0], field="real")
        kd = hurwitz_kernel_direction(S, [1.0], 5)
        assert kd is not None
        b = np.asarray(kd.b)
        assert abs(b[0]) == 0.0 and abs(b[2]) == 0.0
        assert np.max(np.abs(b.imag)) == 0.0
        c = np.asarray(kd.c)
        assert np.max(np.abs(L @ c)) <= 1e-9 * np.max(np.abs(L)) * np.max(np.abs(c))

    def test_blocked_when_free_positions_are_pinned(self):
        # constraints cover exactly the free entries b2, b4, b5
        S = proj_slice(5, [1, 3, 4], [0.0, 0.0, 0.0], field="real")
        assert hurwitz_kernel_direction(S, [1.0], 5) is None

    def test_rejects_complex_slice(self):
        S = proj_slice(3, [0], [0.0])
        with pytest.raises(NonRealInput):
            hurwitz_kernel_direction(S, [1.0], 3)

    def test_rejects_complex_cofactor(self):
        S = proj_slice(3, [0], [0.0], field="real")
        with pytest.raises(NonRealInput):
            hurwitz_kernel_direction(S, [1.0, 1j], 2)


class TestMaxStableStep:
    def test_root_reaches_axis(self):
        # roots i and 2i; pushing e2 up drives the lower root to 0 at eps = 2
        res = max_stable_step((3j, -2.0), (0.0, 1.0))
        assert res.event == "root-hit-boundary"
        assert res.epsilon == pytest.approx(2.0, abs=1e-5)
        assert min(r.imag for r in res.roots) == pytest.approx(0.0, abs=1e-6)

    def test_direction_never_leaves(self):
        res = max_stable_step((3j, -2.0), (0.0, -1.0), cap=1e6)
        assert res.event == "direction-unbounded"
        assert res.epsilon == 1e6

    def test_boundary_root_pushed_out_immediately(self):
        res = max_stable_step((0j,), (-1j,))
        assert res.event == "root-hit-boundary"
        assert res.epsilon <= 1e-6

    def test_real_roots_collide(self):
        # roots of T^2 - 1 + eps meet at the origin when eps reaches 1
        res = max_stable_step((0.0, -1.0), (0.0, 1.0))
        assert res.event == "real-roots-merged"
        assert res.epsilon == pytest.approx(1.0, abs=1e-5)

    def test_unstable_base_rejected(self):
        with pytest.raises(ValueError):
            max_stable_step((-1j,), (1.0,))


class TestCompress:
    def test_real_triple_pins_select_double_root(self):
        # e1 = 6 with e2 = 11 picked up from the start point; the terminal
        # states are double+simple pairs a, a, 6-2a with 3a^2 - 12a + 11 = 0
        st = compress(vieta_from_roots([1.0, 2.0, 3.0]),
                      proj_slice(3, [0], [6.0]))
        z = np.asarray(st.final_z.z)
        assert z[0] == pytest.approx(6.0, abs=1e-9)
        assert z[1] == pytest.approx(11.0, abs=1e-9)
        assert z[2].real == pytest.approx(6.0 + 2.0 / (3.0 * math.sqrt(3.0)),
                                          abs=1e-9)
        assert st.measure == (0, 2)
        assert st.checkpoints == ((0, 3), (0, 2))
        assert st.targets == (2, 2)
        assert not st.cap_reached and not st.stalled

    def test_interior_start_lands_one_root(self):
        st = compress(vieta_from_roots([1j, 2j, 3j]),
                      proj_slice(3, [0], [6j]))
        z = np.asarray(st.final_z.z)
        assert z[0] == pytest.approx(6j, abs=1e-9)
        assert z[1] == pytest.approx(-11.0, abs=1e-8)
        assert st.measure == (2, 1)

    def test_already_within_targets_is_a_fixed_point(self):
        p0 = vieta_from_roots([2.0, 2.0, 3.0])
        st = compress(p0, proj_slice(3, [0], [7.0]))
        assert st.iterations == 0
        assert len(st.steps) == 0
        assert np.allclose(np.asarray(st.final_z.z), np.asarray(p0.z))

    def test_step_invariants_on_mixed_instance(self):
        roots = [1.0, -1.0, 2.5, 0.5 + 1j, -0.5 + 1j, 3j]
        S = proj_slice(6, [0, 1], [sum(roots),
                                   sum(roots[i] * roots[j]
                                       for i in range(6)
                                       for j in range(i + 1, 6))])
        st = compress(vieta_from_roots(roots), S)
        assert not st.cap_reached and not st.stalled
        mem_tol = membership_tolerance(S.target_vector)
        for step in st.steps:
            assert step.stable
            assert step.membership_residual <= mem_tol
        for before, after in zip(st.checkpoints, st.checkpoints[1:]):
            assert after < before
        ti, tb = st.targets
        fi, fb = st.measure
        assert fi <= ti and fb <= tb

    def test_random_instances_meet_bounds(self):
        rng = np.random.default_rng(20260826)
        for _ in range(10):
            n = int(rng.integers(3, 7))
            k = int(rng.integers(1, min(3, n - 1) + 1))
            roots = []
            for _ in range(n):
                if rng.random() < 0.35:
                    roots.append(complex(rng.normal(0, 1.5), 0.0))
                else:
                    roots.append(complex(rng.normal(0, 1.5),
                                         abs(rng.normal(0, 1.0)) + 1e-3))
            p = vieta_from_roots(roots)
            z = np.asarray(p.z)
            if rng.random() < 0.5:
                rows = rng.choice(n, size=k, replace=False)
                L = np.zeros((k, n), dtype=complex)
                for i, r in enumerate(rows):
                    L[i, r] = 1.0
            else:
                L = rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n))
            S = Slice.from_arrays(L, L @ z)
            st = compress(p, S)
            assert not st.cap_reached
            ti, tb = st.targets
            fi, fb = st.measure
            assert fi <= ti and fb <= tb
            assert S.residual(np.asarray(st.final_z.z)) <= \
                membership_tolerance(S.target_vector)


class TestSampleSliceSection:
    def test_window_below_axis_is_empty(self):
        # e2 pinned to -1; any member needs Im e1 >= 0
        S = proj_slice(2, [1], [-1.0])
        g = sample_slice_section(S, None, (0, 1), (-1, 1, -5, -2), (4, 3))
        assert len(g.xs) == 4 and len(g.ys) == 3
        assert not any(v for row in g.members for v in row)

    def test_member_cell_found(self):
        S = proj_slice(2, [1], [-1.0])
        g = sample_slice_section(S, None, (0, 1), (-1, 1, -1, 1), (5, 5))
        # centre cell is z = (0, -1), i.e. T^2 - 1 with real roots +-1
        assert g.members[2][2]

    def test_grid_axes_span_window(self):
        S = proj_slice(2, [1], [-1.0])
        g = sample_slice_section(S, None, (0, 1), (-2, 2, 0, 1), (3, 2))
        assert g.xs == (-2.0, 0.0, 2.0)
        assert g.ys == (0.0, 1.0)

    def test_pinned_axis_rejected(self):
        S = proj_slice(2, [1], [-1.0])
        with pytest.raises(DimensionMismatch):
            sample_slice_section(S, None, (2, 3), (-1, 1, -1, 1), (2, 2))
