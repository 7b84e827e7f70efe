import numpy as np
import pytest

from kakopt.linalg import dagger, expm_skew, frob, haar_su, spin_op
from kakopt.twoqubit import (
    canonical_params,
    canonical_reconstruct,
    conjugator_for,
    conjugator_table,
    coupling_generator,
    coupling_hamiltonian,
    diagonalize_coupling,
    is_local,
    kron_factor,
    lambda_to_triple,
    magic_basis,
    reduce_triple,
    signed_singular_values,
    triple_to_lambda,
    weyl_group_24,
)

RNG = np.random.default_rng(77)


def haar_local(rng):
    return np.kron(haar_su(2, rng), haar_su(2, rng))


class TestMagicBasis:
    def test_unitary(self):
        w = magic_basis()
        assert frob(w @ dagger(w) - np.eye(4)) < 1e-12

    def test_maps_local_algebra_to_so4(self):
        w = magic_basis()
        x = w @ (-1j * spin_op("Iz")) @ dagger(w)
        assert frob(x.imag) < 1e-12
        assert frob(x.real + x.real.T) < 1e-12

    def test_maps_coupling_to_symmetric(self):
        w = magic_basis()
        x = w @ (-1j * spin_op("IzSz")) @ dagger(w)
        h = (1j * x)
        assert frob(h.imag) < 1e-12
        assert frob(h.real - h.real.T) < 1e-12
        assert abs(np.trace(h)) < 1e-12


class TestLambdaMap:
    def test_zero(self):
        assert np.allclose(lambda_to_triple(np.zeros(4)), np.zeros(3))

    def test_known_example(self):
        lam = triple_to_lambda([1, 2, 3])
        assert np.allclose(lam, [4, 0, -6, 2])
        assert np.allclose(lambda_to_triple(lam), [1, 2, 3])

    def test_random_round_trip(self):
        for _ in range(20):
            lam = RNG.standard_normal(4)
            lam -= lam.mean()
            assert np.allclose(triple_to_lambda(lambda_to_triple(lam)), lam, atol=1e-12)

    def test_rejects_nonzero_sum(self):
        with pytest.raises(ValueError):
            lambda_to_triple(np.array([1.0, 0, 0, 0]))


class TestWeylGroup24:
    def test_size_and_parity(self):
        g24 = weyl_group_24()
        assert len(g24) == 24
        for g in g24:
            assert np.count_nonzero(g < 0) % 2 == 0

    def test_conjugators_are_local_and_correct(self):
        t = np.array([0.4, 0.25, -0.1])
        for g in weyl_group_24():
            wg = conjugator_for(g)
            assert is_local(wg)
            lhs = wg @ expm_skew(coupling_generator(t)) @ dagger(wg)
            rhs = expm_skew(coupling_generator(g @ t))
            assert frob(lhs - rhs) < 1e-10

    def test_reduce_triple_chamber(self):
        for _ in range(50):
            t = RNG.standard_normal(3)
            r, g = reduce_triple(t)
            assert r[0] >= r[1] >= abs(r[2]) - 1e-12
            assert np.allclose(g @ t, r)


class TestCanonicalParams:
    def test_identity(self):
        t, k1, k2 = canonical_params(np.eye(4, dtype=complex))
        assert frob(t) < 1e-12

    def test_reconstruction(self):
        for _ in range(20):
            u = haar_su(4, RNG)
            t, k1, k2 = canonical_params(u)
            assert frob(canonical_reconstruct(t, k1, k2) - u) <= 1e-8
            assert is_local(k1) and is_local(k2)

    def test_local_invariance(self):
        u = haar_su(4, RNG)
        t0, _, _ = canonical_params(u)
        for _ in range(10):
            t1, _, _ = canonical_params(haar_local(RNG) @ u @ haar_local(RNG))
            assert np.abs(t1 - t0).max() <= 1e-9

    def test_cnot_equivalent_to_xx(self):
        cnot = np.diag([1, 1, 0, 0]).astype(complex)
        cnot[2, 3] = cnot[3, 2] = 1
        cnot *= np.exp(1j * np.pi / 4)  # phase into SU(4)
        t_cnot, _, _ = canonical_params(cnot)
        t_xx, _, _ = canonical_params(expm_skew(-1j * np.pi * spin_op("IxSx")))
        assert np.abs(t_cnot - t_xx).max() <= 1e-9

    def test_rejects_non_special(self):
        with pytest.raises(ValueError):
            canonical_params(np.diag([1j, 1, 1, 1]).astype(complex))


class TestKronFactor:
    def test_exact_product(self):
        u = haar_local(RNG)
        a, b, resid = kron_factor(u)
        assert resid < 1e-12
        assert frob(np.kron(a, b) - u) < 1e-12

    def test_nonlocal_detected(self):
        assert not is_local(expm_skew(-1j * np.pi * spin_op("IxSx")))


class TestDiagonalizeCoupling:
    def test_already_canonical(self):
        k, t = diagonalize_coupling(np.diag([1.0, 0, 0]))
        assert np.allclose(t, [1, 0, 0], atol=1e-10)

    def test_rotated_diagonal(self):
        from scipy.stats import special_ortho_group

        r1 = special_ortho_group.rvs(3, random_state=11)
        r2 = special_ortho_group.rvs(3, random_state=12)
        j = r1 @ np.diag([3.0, 2.0, 1.0]) @ r2.T
        _, t = diagonalize_coupling(j)
        assert np.allclose(t, [3, 2, 1], atol=1e-9)

    def test_random_matches_signed_svd(self):
        for _ in range(30):
            j = RNG.standard_normal((3, 3))
            k, t = diagonalize_coupling(j)
            assert np.abs(t - signed_singular_values(j)).max() <= 1e-9
            out = k @ (-1j * coupling_hamiltonian(j)) @ dagger(k)
            tgt = -1j * coupling_hamiltonian(np.diag(t))
            assert frob(out - tgt) <= 1e-8
            assert is_local(k)
