import numpy as np
import pytest

from kakopt.flow import (
    ControlSchedule,
    DegenerateChartError,
    check_reachable,
    drift_coords,
    projection_flow,
    random_schedule,
    second_order_reduce,
    simulate,
    two_qubit_slack,
)
from kakopt.kak import Family
from kakopt.linalg import dagger, expm_skew, frob, haar_su, spin_op
from kakopt.roots import builtin_ordering, builtin_pair, compute_roots
from kakopt.twoqubit import coupling_generator

RNG = np.random.default_rng(2024)


def random_p_element(n, rng, family=Family.SUN_SON):
    if family is Family.SUN_SON:
        s = rng.standard_normal((n, n))
        s = s + s.T
        s -= np.trace(s) / n * np.eye(n)
        return 1j * s
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    x = np.zeros((2 * n, 2 * n), dtype=complex)
    x[:n, n:] = z
    x[n:, :n] = -z.conj().T
    return x


class TestSimulate:
    def test_empty_schedule(self):
        d = random_p_element(4, RNG)
        p = simulate(d, ControlSchedule(()), Family.SUN_SON)
        assert frob(p - np.eye(4)) == 0.0

    def test_identity_control(self):
        d = random_p_element(4, RNG)
        sched = ControlSchedule(((np.eye(4, dtype=complex), 0.7),))
        p = simulate(d, sched, Family.SUN_SON)
        assert frob(p - expm_skew(0.7 * d)) < 1e-12

    def test_refinement_exactness(self):
        d = random_p_element(4, RNG)
        sched = random_schedule(Family.SUN_SON, 4, 5, seed=3)
        halved = ControlSchedule(
            tuple((k, tau / 2) for k, tau in sched.segments for _ in range(2))
        )
        p1 = simulate(d, sched, Family.SUN_SON)
        p2 = simulate(d, halved, Family.SUN_SON)
        assert frob(p1 - p2) < 1e-12

    def test_endpoint_special_unitary(self):
        for family, n in ((Family.SUN_SON, 4), (Family.SU2N_BLOCK, 2)):
            d = random_p_element(n if family is Family.SUN_SON else 2, RNG, family)
            sched = random_schedule(family, n if family is Family.SUN_SON else 2, 6, 9)
            p = simulate(d, sched, family)
            assert frob(p @ dagger(p) - np.eye(p.shape[0])) < 1e-10 * 6
            assert abs(np.linalg.det(p) - 1) < 1e-10 * 6

    def test_rejects_bad_drift(self):
        with pytest.raises(ValueError):
            simulate(np.eye(4, dtype=complex), ControlSchedule(()), Family.SUN_SON)

    def test_rejects_bad_control(self):
        d = random_p_element(4, RNG)
        k = haar_su(4, RNG)  # not real orthogonal
        with pytest.raises(ValueError):
            simulate(d, ControlSchedule(((k, 1.0),)), Family.SUN_SON)

    def test_rejects_nonpositive_duration(self):
        with pytest.raises(ValueError):
            ControlSchedule(((np.eye(4, dtype=complex), 0.0),))


class TestCheckReachable:
    def test_pure_drift_weight_one(self):
        lam = np.array([0.9, 0.3, -0.4, -0.8])
        d = -1j * np.diag(lam).astype(complex)
        p = expm_skew(0.5 * d)
        cert, slack = check_reachable(p, d, 0.5, Family.SUN_SON)
        assert cert.feasible and slack >= -1e-7
        assert cert.weights.max() >= 1 - 1e-8

    def test_overtime_infeasible(self):
        lam = np.array([0.9, 0.3, -0.4, -0.8])
        d = -1j * np.diag(lam).astype(complex)
        p = expm_skew(1.1 * d)
        cert, slack = check_reachable(p, d, 1.0, Family.SUN_SON)
        assert not cert.feasible
        assert slack < -1e-4

    @pytest.mark.parametrize("family,n", [(Family.SUN_SON, 4), (Family.SU2N_BLOCK, 2)])
    def test_random_schedules_reachable(self, family, n):
        dim = n if family is Family.SUN_SON else n
        for seed in range(40):
            rng = np.random.default_rng(1000 + seed)
            d = random_p_element(dim, rng, family)
            d /= np.abs(drift_coords(d, family)).max()
            sched = random_schedule(family, dim, int(rng.integers(1, 7)), seed, 0.05)
            p = simulate(d, sched, family)
            cert, slack = check_reachable(p, d, sched.total_time, family)
            assert cert.feasible
            assert slack >= -1e-7

    def test_two_qubit_inequalities(self):
        for seed in range(40):
            rng = np.random.default_rng(4000 + seed)
            triple = rng.uniform(-1, 1, 3)
            drift = coupling_generator(triple)
            t = 0.0
            p = np.eye(4, dtype=complex)
            for _ in range(int(rng.integers(1, 6))):
                k = np.kron(haar_su(2, rng), haar_su(2, rng))
                tau = rng.exponential(0.08) + 1e-6
                p = expm_skew(tau * (k @ drift @ dagger(k))) @ p
                t += tau
            assert two_qubit_slack(p, triple, t) >= -1e-7

    def test_two_qubit_slack_negative_below_min_time(self):
        drift = coupling_generator([1.0, 0.0, 0.0])
        p = expm_skew(0.5 * drift)
        assert two_qubit_slack(p, [1.0, 0.0, 0.0], 0.4) < -1e-3
        assert two_qubit_slack(p, [1.0, 0.0, 0.0], 0.5) >= -1e-10


@pytest.fixture(scope="module")
def twospin_system():
    return compute_roots(builtin_pair("twospin"), builtin_ordering("twospin"))


def random_split_element(system, rng, a_scale=0.2, bc_scale=0.05):
    pair = system.pair
    x = sum(c * f for c, f in zip(a_scale * rng.standard_normal(3), system.a_frame))
    for root in system.positive:
        for y, xk in root.pairs:
            x = x + bc_scale * rng.standard_normal() * y
            x = x + bc_scale * rng.standard_normal() * xk
    return x


class TestSecondOrderReduce:
    def test_pure_cartan_is_fixed(self, twospin_system):
        sys_ = twospin_system
        coords = np.array([0.3, -0.1, 0.25])
        x = sum(c * f for c, f in zip(coords, sys_.a_frame))
        tr = second_order_reduce(sys_, x, 1e-2)
        assert len(tr.iterates) == 1  # converged before any sandwich step
        assert np.abs(tr.final_a - coords * 1e-2).max() < 1e-14

    def test_contraction_and_reconstruction(self, twospin_system):
        sys_ = twospin_system
        for seed in range(25):
            rng = np.random.default_rng(seed)
            x = random_split_element(sys_, rng)
            for delta in (1e-2, 1e-3):
                tr = second_order_reduce(sys_, x, delta)
                assert tr.ratio <= 0.5
                assert tr.residual <= 1e-10
                lhs = tr.k_left @ expm_skew(x * delta) @ tr.k_right
                a_mat = sum(c * f for c, f in zip(tr.final_a, sys_.a_frame))
                assert frob(lhs - expm_skew(a_mat)) <= 1e-10

    def test_constant_stable_under_halving(self, twospin_system):
        sys_ = twospin_system
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            x = random_split_element(sys_, rng)
            c1 = second_order_reduce(sys_, x, 1e-2).constant
            c2 = second_order_reduce(sys_, x, 5e-3).constant
            assert c2 <= 4 * c1 + 1e-9 and c1 <= 4 * c2 + 1e-9

    def test_second_order_in_delta(self, twospin_system):
        sys_ = twospin_system
        x = random_split_element(sys_, np.random.default_rng(7))
        for delta in (1e-2, 1e-3):
            tr = second_order_reduce(sys_, x, delta)
            a0 = np.array([sys_.pair.ip(f, x) for f in sys_.a_frame])
            assert np.linalg.norm(tr.final_a - a0 * delta) <= 10 * delta**2

    def test_rejects_irregular_reference(self, twospin_system):
        x = random_split_element(twospin_system, np.random.default_rng(0))
        with pytest.raises(ValueError):
            second_order_reduce(twospin_system, x, 1e-2, a_ref=np.zeros(3))


class TestProjectionFlow:
    def test_identity_control_exact(self):
        lam = np.array([0.8, 0.1, -0.3, -0.6])
        d = -1j * np.diag(lam).astype(complex)
        sched = ControlSchedule(((np.eye(4, dtype=complex), 0.5),))
        tr = projection_flow(d, sched, step=1e-2)
        assert tr.max_deviation < 1e-10
        assert np.allclose(tr.a_integrated[-1], lam * 0.5, atol=1e-10)

    def test_convergence_order(self):
        lam = np.array([0.9, 0.2, -0.4, -0.7])
        d = -1j * np.diag(lam).astype(complex)
        sched = random_schedule(Family.SUN_SON, 4, 3, seed=5, mean_tau=0.15)
        dev1 = projection_flow(d, sched, step=2e-2, hull_stride=5).max_deviation
        dev2 = projection_flow(d, sched, step=1e-2, hull_stride=5).max_deviation
        assert dev2 <= 0.75 * dev1 + 1e-12

    def test_velocities_in_hull(self):
        lam = np.array([0.9, 0.2, -0.4, -0.7])
        d = -1j * np.diag(lam).astype(complex)
        sched = random_schedule(Family.SUN_SON, 4, 2, seed=11, mean_tau=0.1)
        tr = projection_flow(d, sched, step=1e-2)
        assert tr.hull_max_residual <= 1e-9

    def test_degenerate_chart_aborts(self):
        # repeated drift coordinates keep the chart degenerate for all t > 0
        lam = np.array([0.5, 0.5, -0.3, -0.7])
        d = -1j * np.diag(lam).astype(complex)
        sched = random_schedule(Family.SUN_SON, 4, 1, seed=2, mean_tau=0.2)
        with pytest.raises(DegenerateChartError):
            projection_flow(d, sched, step=5e-3)
