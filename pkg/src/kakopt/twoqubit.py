"""Canonical decomposition of two-qubit gates.

Every U in SU(4) factors as K1 exp(-i(a_x IxSx + a_y IySy + a_z IzSz)) K2
with K1, K2 local (tensor-product) unitaries and the triple reduced to the
chamber a_x >= a_y >= |a_z|.  The workhorse is the fixed "magic" conjugation
W that maps the local algebra onto so(4) and the coupling algebra onto
-i * (real symmetric traceless), turning the problem into the SU(n)/SO(n)
KAK decomposition.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .kak import kak_sun_son
from .linalg import dagger, expm_skew, frob, is_special, is_unitary, spin_op

_AX = "xyz"


@lru_cache(maxsize=1)
def magic_basis() -> np.ndarray:
    """The fixed 4x4 unitary W = exp(-i pi IySy) exp(-i pi/2 Iz)."""
    w = expm_skew(-1j * np.pi * spin_op("IySy")) @ expm_skew(
        -1j * (np.pi / 2) * spin_op("Iz")
    )
    # self-test: Ad_W maps the local algebra into real skew-symmetric matrices
    for name in ("Ix", "Iy", "Iz", "Sx", "Sy", "Sz"):
        x = w @ (-1j * spin_op(name)) @ dagger(w)
        if frob(x.imag) + frob(x.real + x.real.T) > 1e-12:
            raise RuntimeError("magic basis self-test failed on the local algebra")
    return w


def lambda_to_triple(lam: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Invert (l1,l2,l3,l4) = (ay+az-ax, ax+ay-az, -(ax+ay+az), ax+az-ay)."""
    lam = np.asarray(lam, dtype=float)
    if abs(lam.sum()) > tol:
        raise ValueError("lambda vector must sum to zero")
    ax = (lam[1] + lam[3]) / 2
    ay = (lam[0] + lam[1]) / 2
    az = (lam[0] + lam[3]) / 2
    return np.array([ax, ay, az])


def triple_to_lambda(t) -> np.ndarray:
    ax, ay, az = t
    return np.array([ay + az - ax, ax + ay - az, -(ax + ay + az), ax + az - ay])


def coupling_generator(t) -> np.ndarray:
    """-i (a_x IxSx + a_y IySy + a_z IzSz) for a triple."""
    return -1j * sum(t[i] * spin_op(f"I{c}S{c}") for i, c in enumerate(_AX))


@lru_cache(maxsize=1)
def weyl_group_24() -> tuple[np.ndarray, ...]:
    """Signed 3x3 permutation matrices with an even number of -1 entries."""
    out = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            if np.prod(signs) < 0:
                continue
            m = np.zeros((3, 3))
            for i, j in enumerate(perm):
                m[i, j] = signs[i]
            out.append(m)
    assert len(out) == 24
    return tuple(out)


def _su2_from_rotation(r: np.ndarray, spin: str) -> np.ndarray:
    """Single-spin unitary whose conjugation rotates that spin's operators by r."""
    from scipy.spatial.transform import Rotation

    vec = Rotation.from_matrix(r).as_rotvec()
    gen = -1j * sum(vec[i] * spin_op(spin + c) for i, c in enumerate(_AX))
    u = expm_skew(gen)
    # verify the convention: Ad_u(spin_a) = sum_b r[b,a] spin_b
    for a, ca in enumerate(_AX):
        img = u @ spin_op(spin + ca) @ dagger(u)
        want = sum(r[b, a] * spin_op(spin + cb) for b, cb in enumerate(_AX))
        if frob(img - want) > 1e-12:
            raise RuntimeError("rotation lift convention broken")
    return u


@lru_cache(maxsize=1)
def conjugator_table() -> dict[bytes, np.ndarray]:
    """Local unitary realizing each of the 24 signed permutations of the triple.

    Conjugating the coupling basis by ra (x) rb transforms the coupling matrix
    J as Ra J Rb^T, so a signed permutation g = D P of the diagonal triple is
    realized by Ra = D1 P, Rb = D2 P with D1 D2 = D and both in SO(3); each
    SO(3) factor is lifted to SU(2) and the product verified by conjugation
    before admission.
    """
    table: dict[bytes, np.ndarray] = {}
    t_probe = np.array([0.31, 0.17, 0.05])
    for g in weyl_group_24():
        d = np.diag(np.sign(np.where(np.abs(g.sum(axis=1)) > 0, g.sum(axis=1), 1)))
        p = d @ g  # pure permutation part
        if np.linalg.det(p) > 0:
            d1 = d
            d2 = np.eye(3)
        else:
            d1 = d @ np.diag([-1.0, 1.0, 1.0])
            d2 = np.diag([-1.0, 1.0, 1.0])
        ra = d1 @ p
        rb = d2 @ p
        ua = _su2_from_rotation(ra, "I")
        ub = _su2_from_rotation(rb, "S")
        wg = ua @ ub  # commute; product is the tensor-product local unitary
        lhs = wg @ expm_skew(coupling_generator(t_probe)) @ dagger(wg)
        rhs = expm_skew(coupling_generator(g @ t_probe))
        if frob(lhs - rhs) > 1e-10:
            raise RuntimeError("conjugator verification failed")
        table[g.astype(np.int8).tobytes()] = wg
    assert len(table) == 24
    return table


def conjugator_for(g: np.ndarray) -> np.ndarray:
    key = np.round(g).astype(np.int8).tobytes()
    return conjugator_table()[key]


def reduce_triple(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Chamber representative a_x >= a_y >= |a_z| and the group element used."""
    best = None
    best_g = None
    for g in weyl_group_24():
        cand = g @ t
        if cand[0] >= cand[1] - 1e-15 and cand[1] >= abs(cand[2]) - 1e-15:
            key = tuple(np.round(cand, 12))
            if best is None or key > tuple(np.round(best, 12)):
                best, best_g = cand, g
    assert best is not None
    return best, best_g


def kron_factor(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Nearest Kronecker factorization u ~ a (x) b with a fixed phase gauge.

    Returns (a, b, residual); residual is the Frobenius distance between u
    and the rank-1 reassembly.
    """
    m = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    uu, ss, vv = np.linalg.svd(m)
    a = (uu[:, 0] * np.sqrt(ss[0])).reshape(2, 2)
    b = (np.sqrt(ss[0]) * vv[0, :]).reshape(2, 2)
    # gauge: largest entry of a positive real
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    ph = a[idx] / abs(a[idx])
    a = a / ph
    b = b * ph
    resid = frob(np.kron(a, b) - u)
    return a, b, resid


def is_local(u: np.ndarray, tol: float = 1e-8) -> bool:
    return kron_factor(u)[2] <= tol


def canonical_params(
    u: np.ndarray, tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Triple (a_x, a_y, a_z) in the chamber and local factors K1, K2 with
    U = K1 exp(-i(a_x IxSx + a_y IySy + a_z IzSz)) K2."""
    if u.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if not is_unitary(u, tol) or not is_special(u, tol):
        raise ValueError("input is not special unitary")
    w = magic_basis()
    f = kak_sun_son(w @ u @ dagger(w))
    lam = f.cartan.values
    triple = lambda_to_triple(4.0 * lam, tol=1e-8)
    k1 = dagger(w) @ f.k_left @ w
    k2 = dagger(w) @ f.k_right @ w

    t_red, g = reduce_triple(triple)
    wg = conjugator_for(g)
    k1 = k1 @ dagger(wg)
    k2 = wg @ k2
    for k in (k1, k2):
        if not is_local(k):
            raise RuntimeError("extracted K factor is not a tensor product")
    return t_red, k1, k2


def canonical_reconstruct(triple, k1, k2) -> np.ndarray:
    return k1 @ expm_skew(coupling_generator(triple)) @ k2


# ---------------------------------------------------------------------------
# Coupling Hamiltonians

def coupling_hamiltonian(j: np.ndarray) -> np.ndarray:
    """H_c = sum_ab J_ab Ia Sb (Hermitian)."""
    j = np.asarray(j, dtype=float)
    h = np.zeros((4, 4), dtype=complex)
    for a, ca in enumerate(_AX):
        for b, cb in enumerate(_AX):
            h += j[a, b] * spin_op(f"I{ca}S{cb}")
    return h


def diagonalize_coupling(j: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local unitary K and chamber triple with K (-i H_c) K^dag canonical."""
    j = np.asarray(j, dtype=float)
    if j.shape != (3, 3) or not np.all(np.isfinite(j)):
        raise ValueError("J must be a finite real 3x3 matrix")
    w = magic_basis()
    x = w @ (-1j * coupling_hamiltonian(j)) @ dagger(w)
    h = (1j * x).real  # real symmetric traceless
    h = 0.5 * (h + h.T)
    d, theta = np.linalg.eigh(h)
    if np.linalg.det(theta) < 0:
        theta = theta.copy()
        theta[:, 0] = -theta[:, 0]
    if abs(d.sum()) > 1e-9 * max(1.0, np.abs(d).max()):
        raise RuntimeError("coupling image not traceless")
    d = d - d.sum() / 4
    triple = lambda_to_triple(4.0 * d, tol=1e-7)
    k = dagger(w) @ theta.T.astype(complex) @ w
    t_red, g = reduce_triple(triple)
    k = conjugator_for(g) @ k
    if not is_local(k):
        raise RuntimeError("diagonalizing factor is not a tensor product")
    return k, t_red


def signed_singular_values(j: np.ndarray) -> np.ndarray:
    """Singular values of J, descending, sign of the smallest set by det J."""
    j = np.asarray(j, dtype=float)
    sv = np.linalg.svd(j, compute_uv=False)
    sv = np.sort(sv)[::-1]
    if np.linalg.det(j) < 0:
        sv = sv.copy()
        sv[-1] = -sv[-1]
    return sv
