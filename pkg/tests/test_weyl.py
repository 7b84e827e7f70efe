import numpy as np
import pytest

from kakopt.weyl import (
    OrbitType,
    generate_orbit,
    linprog_eq,
    majorized,
    min_time,
    reachable,
    two_qubit_min_time_grid,
)

RNG = np.random.default_rng(42)


class TestOrbits:
    def test_two_qubit_single_axis(self):
        o = generate_orbit([1, 0, 0], OrbitType.TWO_QUBIT_24)
        assert len(o.points) == 6

    def test_bn_two_dim_generic(self):
        o = generate_orbit([0.3, 0.2], OrbitType.BN_SIGNED)
        assert len(o.points) == 8  # the eight signed/permuted images

    def test_sn_symmetric_base_collapses(self):
        o = generate_orbit([0.7, 0.7, 0.7], OrbitType.SN_PERMUTATION)
        assert len(o.points) == 1

    def test_counts_bounded(self):
        o = generate_orbit(RNG.standard_normal(3), OrbitType.TWO_QUBIT_24)
        assert len(o.points) <= 24
        o = generate_orbit(RNG.standard_normal(3), OrbitType.BN_SIGNED)
        assert len(o.points) <= 48

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            generate_orbit([1, 0], OrbitType.TWO_QUBIT_24)


class TestSimplex:
    def test_matches_reference_solver(self):
        from scipy.optimize import linprog as scipy_lp

        for _ in range(50):
            m = int(RNG.integers(2, 5))
            n = int(RNG.integers(3, 10))
            a = RNG.standard_normal((m, n))
            b = a @ RNG.uniform(0, 1, n)
            c = RNG.uniform(0, 2, n)
            feas, x, obj, _ = linprog_eq(c, a, b)
            ref = scipy_lp(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
            assert feas == ref.success
            if feas:
                assert abs(obj - ref.fun) < 1e-7
                assert np.all(x >= -1e-12)
                assert np.abs(a @ x - b).max() < 1e-8

    def test_infeasible(self):
        feas, *_ = linprog_eq(np.zeros(2), np.array([[1.0, 1.0]]), np.array([-1.0]))
        assert not feas


class TestMajorized:
    def test_base_itself(self):
        o = generate_orbit([1, -1, 0, 0], OrbitType.SN_PERMUTATION)
        cert = majorized([1, -1, 0, 0], o)
        assert cert.feasible and cert.residual <= 1e-9

    def test_explicit_combination(self):
        o = generate_orbit([1, -1, 0, 0], OrbitType.SN_PERMUTATION)
        cert = majorized([0.5, -0.5, 0, 0], o)
        assert cert.feasible
        assert np.linalg.norm(o.points.T @ cert.weights - [0.5, -0.5, 0, 0]) <= 1e-9
        assert abs(cert.weights.sum() - 1) <= 1e-12

    def test_outside_hull(self):
        o = generate_orbit([1, -1, 0, 0], OrbitType.SN_PERMUTATION)
        cert = majorized([1.01, -1, 0, -0.01], o)
        assert not cert.feasible


class TestMinTime:
    def test_target_equals_drift(self):
        t, w = min_time([0.4, 0.1, -0.05], [0.4, 0.1, -0.05], OrbitType.TWO_QUBIT_24)
        assert abs(t - 1.0) <= 1e-9

    def test_single_axis_tight(self):
        t, _ = min_time([np.pi / 4, 0, 0], [1, 0, 0], OrbitType.TWO_QUBIT_24)
        assert abs(t - np.pi / 4) <= 1e-9

    def test_three_axis_target(self):
        t, w = min_time([1, 1, 1], [1, 0, 0], OrbitType.TWO_QUBIT_24)
        assert abs(t - 3.0) <= 1e-9

    def test_scaling_homogeneity(self):
        tgt = RNG.uniform(-1, 1, 3)
        drf = RNG.uniform(-1, 1, 3)
        t1, _ = min_time(tgt, drf, OrbitType.TWO_QUBIT_24)
        for s in (0.5, 2.0, 7.3):
            t2, _ = min_time(s * tgt, drf, OrbitType.TWO_QUBIT_24)
            assert abs(t2 - s * t1) <= 1e-9

    def test_orbit_invariance_of_drift(self):
        tgt = RNG.uniform(-1, 1, 3)
        drf = np.array([0.9, 0.4, -0.2])
        t1, _ = min_time(tgt, drf, OrbitType.TWO_QUBIT_24)
        o = generate_orbit(drf, OrbitType.TWO_QUBIT_24)
        for p in o.points[:6]:
            t2, _ = min_time(tgt, p, OrbitType.TWO_QUBIT_24)
            assert abs(t2 - t1) <= 1e-9

    def test_grid_oracle_agreement(self):
        for _ in range(20):
            tgt = RNG.uniform(-1, 1, 3)
            drf = RNG.uniform(-1, 1, 3)
            t, _ = min_time(tgt, drf, OrbitType.TWO_QUBIT_24)
            tg = two_qubit_min_time_grid(tgt, drf)
            assert abs(t - tg) <= 2e-3

    def test_infeasible_zero_drift(self):
        with pytest.raises(ValueError):
            min_time([1, 0, 0], [0, 0, 0], OrbitType.TWO_QUBIT_24)


class TestReachable:
    def test_at_min_time(self):
        tgt = np.array([0.5, 0.3, 0.1])
        drf = np.array([1.0, 0.4, 0.0])
        t, _ = min_time(tgt, drf, OrbitType.TWO_QUBIT_24)
        cert = reachable(tgt, drf, t, OrbitType.TWO_QUBIT_24)
        assert cert.feasible

    def test_below_min_time(self):
        tgt = np.array([0.5, 0.3, 0.1])
        drf = np.array([1.0, 0.4, 0.0])
        t, _ = min_time(tgt, drf, OrbitType.TWO_QUBIT_24)
        cert = reachable(tgt, drf, t - 1e-3, OrbitType.TWO_QUBIT_24)
        assert not cert.feasible

    def test_zero_target_always_reachable(self):
        for t in (0.1, 1.0, 10.0):
            cert = reachable(np.zeros(3), [0.8, 0.2, 0.1], t, OrbitType.TWO_QUBIT_24)
            assert cert.feasible
