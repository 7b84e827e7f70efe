"""Constructive KAK decompositions U = K1 exp(a) K2.

Two families:

* SUN_SON — U in SU(n) factored as Theta1 exp(-i diag(lambda)) Theta2 with
  Theta1, Theta2 in SO(n) and sum(lambda) = 0.  Built from an
  eigendecomposition of the symmetric unitary U U^T.

* SU2N_BLOCK — U in SU(2n) factored as K1 A K2 where K1, K2 are
  block-diagonal special unitaries (two n x n blocks, overall det 1) and
  A = exp(sum phi_j (E_{j,n+j} - E_{n+j,j})) rotates the halves pairwise.
  Built from the eigenstructure of M = U S U^dag S with S = diag(I, -I),
  which equals K1 R(2 phi) K1^dag.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import (
    dagger,
    expm_skew,
    frob,
    is_special,
    is_unitary,
    unitary_eig,
)


class Family(Enum):
    SUN_SON = "sun-son"
    SU2N_BLOCK = "su2n"


@dataclass(frozen=True)
class CartanCoords:
    family: Family
    values: np.ndarray


@dataclass(frozen=True)
class KakFactors:
    k_left: np.ndarray
    cartan: CartanCoords
    k_right: np.ndarray
    family: Family


def cartan_embed(coords: CartanCoords) -> np.ndarray:
    """Skew-Hermitian matrix whose exponential is the middle KAK factor."""
    v = np.asarray(coords.values, dtype=float)
    if coords.family is Family.SUN_SON:
        return -1j * np.diag(v).astype(complex)
    n = len(v)
    x = np.zeros((2 * n, 2 * n), dtype=complex)
    x[:n, n:] = np.diag(v)
    x[n:, :n] = -np.diag(v)
    return x


def reconstruct(f: KakFactors) -> np.ndarray:
    return f.k_left @ expm_skew(cartan_embed(f.cartan)) @ f.k_right


def _cluster_phases(phases: np.ndarray, tol: float) -> list[list[int]]:
    """Group indices whose unit-circle points e^{i phase} lie within tol."""
    m = len(phases)
    pts = np.exp(1j * phases)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(pts[i] - pts[j]) < tol:
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[pi] = pj
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _real_orthonormal_basis(vcols: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Real orthonormal basis of a conjugation-invariant complex column space.

    Eigenspaces of a complex-symmetric matrix are closed under entrywise
    conjugation, so real and imaginary parts of the columns together span a
    real space of the same dimension.
    """
    d = vcols.shape[1]
    stacked = np.hstack([vcols.real, vcols.imag])
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > tol))
    if rank != d:
        raise RuntimeError(f"real basis extraction failed: rank {rank} != dim {d}")
    return u[:, :d]


def _shift_pi(lam: np.ndarray, v: np.ndarray, k: int) -> None:
    """In-place: lam[k] += +-pi and flip row k of v, keeping Theta e^{-i lam} V."""
    lam[k] += -np.pi if lam[k] > 0 else np.pi
    v[k, :] = -v[k, :]


def kak_sun_son(u: np.ndarray, tol: float = 1e-10) -> KakFactors:
    """Factor U in SU(n) as Theta1 exp(-i diag(lambda)) Theta2, Thetas in SO(n)."""
    n = u.shape[0]
    if not is_unitary(u, tol):
        raise ValueError("input is not unitary")
    if not is_special(u, tol):
        raise ValueError("input determinant is not 1")

    m = u @ u.T  # symmetric unitary: M = Theta1 exp(-2i lambda) Theta1^T
    phases, vecs = unitary_eig(m)

    theta = np.empty((n, n))
    j = 0
    for group in _cluster_phases(phases, 1e-8):
        block = _real_orthonormal_basis(vecs[:, group])
        theta[:, j : j + block.shape[1]] = block
        j += block.shape[1]

    if np.linalg.det(theta) < 0:
        theta[:, 0] = -theta[:, 0]

    s = np.angle(np.diag(theta.T @ m @ theta))
    lam = -s / 2.0
    v_c = np.exp(1j * lam)[:, None] * (theta.T @ u)
    im_resid = frob(v_c.imag)
    if im_resid > 1e-6:
        raise RuntimeError(f"right factor not real (residual {im_resid:.2e})")
    v = v_c.real.copy()

    if np.linalg.det(v) < 0:
        _shift_pi(lam, v, int(np.argmax(lam)))

    # det U = 1 forces sum(lam) = 2 pi m; cancel it by pi-shifts in pairs
    # (each pi-shift flips one row sign of V, pairs keep det V = 1)
    mshift = round(lam.sum() / (2 * np.pi))
    for _ in range(2 * abs(mshift)):
        if lam.sum() > np.pi:
            _shift_pi(lam, v, int(np.argmax(lam)))
        else:
            _shift_pi(lam, v, int(np.argmin(lam)))
    lam = lam - lam.sum() / n  # kill roundoff in the sum exactly

    # deterministic ordering: lambda descending, permutation absorbed
    order = np.argsort(-lam)
    lam = lam[order]
    theta = theta[:, order]
    v = v[order, :]
    if np.linalg.det(theta) < 0:  # odd permutation: flip a matched pair
        theta[:, 0] = -theta[:, 0]
        v[0, :] = -v[0, :]

    coords = CartanCoords(Family.SUN_SON, lam)
    return KakFactors(theta.astype(complex), coords, v.astype(complex), Family.SUN_SON)


# ---------------------------------------------------------------------------
# SU(2n) over the block-diagonal subgroup

def s_matrix(n: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def _split_top_bottom(cols: np.ndarray, n: int):
    """Orthonormal top-half / bottom-half bases of an S-invariant column space."""
    dim = cols.shape[1]
    out = []
    for rows in (slice(0, n), slice(n, 2 * n)):
        block = cols[rows, :]
        u_b, s_b, _ = np.linalg.svd(block, full_matrices=False)
        rank = int(np.sum(s_b > 1e-6))
        part = np.zeros((2 * n, rank), dtype=complex)
        part[rows, :] = u_b[:, :rank]
        out.append(part)
    top, bot = out
    if top.shape[1] + bot.shape[1] != dim:
        raise RuntimeError("S-invariant eigenspace failed to split cleanly")
    if top.shape[1] != bot.shape[1]:
        raise RuntimeError("unbalanced top/bottom split in a +-1 eigenspace")
    return top, bot


def kak_su2n(u: np.ndarray, tol: float = 1e-10) -> KakFactors:
    """Factor U in SU(2n) as K1 exp(pairwise rotations) K2, K's block diagonal."""
    nn = u.shape[0]
    if nn % 2 != 0:
        raise ValueError("dimension must be even")
    n = nn // 2
    if not is_unitary(u, tol):
        raise ValueError("input is not unitary")
    if not is_special(u, tol):
        raise ValueError("input determinant is not 1")

    s_mat = s_matrix(n)
    m = u @ s_mat @ dagger(u) @ s_mat  # = K1 R(2 phi) K1^dag
    phases, vecs = unitary_eig(m)

    kl = np.zeros((2 * n, 2 * n), dtype=complex)
    phi_vec = np.zeros(n)
    slot = 0
    snap = 1e-8  # eigenvalues this close to +-1 treated as exact

    # +-1 eigenspaces are S-invariant: split into top/bottom columns directly
    pts = np.exp(1j * phases)
    idx_plus = [i for i in range(2 * n) if abs(pts[i] - 1) < snap]
    idx_minus = [i for i in range(2 * n) if abs(pts[i] + 1) < snap]
    for idx, phi in ((idx_plus, 0.0), (idx_minus, np.pi / 2)):
        if not idx:
            continue
        top, bot = _split_top_bottom(vecs[:, idx], n)
        for k in range(top.shape[1]):
            kl[:, slot] = top[:, k]
            kl[:, n + slot] = bot[:, k]
            phi_vec[slot] = phi
            slot += 1

    # rotation pairs: each eigenvector z at e^{i theta}, theta in (0, pi),
    # pairs with S z at e^{-i theta}; (z + Sz)/sqrt2 is top-supported and
    # -i (z - Sz)/sqrt2 bottom-supported, carrying angle phi = theta/2
    for i in range(2 * n):
        th = phases[i]
        if th <= 0 or abs(pts[i] - 1) < snap or abs(pts[i] + 1) < snap:
            continue
        z = vecs[:, i]
        sz = s_mat @ z
        uu = (z + sz) / np.sqrt(2)
        ww = -1j * (z - sz) / np.sqrt(2)
        if np.linalg.norm(uu[n:]) > 1e-6 or np.linalg.norm(ww[:n]) > 1e-6:
            raise RuntimeError("eigenvector pairing failed (S-symmetry broken)")
        uu[n:] = 0
        ww[:n] = 0
        kl[:, slot] = uu
        kl[:, n + slot] = ww
        phi_vec[slot] = th / 2.0
        slot += 1
    if slot != n:
        raise RuntimeError("slot bookkeeping failed")
    if frob(dagger(kl) @ kl - np.eye(2 * n)) > 1e-8:
        raise RuntimeError("assembled left factor is not unitary")

    # A = R(phi); V = A^dag K1^dag U is exactly block diagonal in theory
    a = expm_skew(cartan_embed(CartanCoords(Family.SU2N_BLOCK, phi_vec)))
    v = dagger(a) @ dagger(kl) @ u
    off = max(frob(v[:n, n:]), frob(v[n:, :n]))
    if off > 1e-6:
        raise RuntimeError(f"right factor not block diagonal (off-block {off:.2e})")
    v[:n, n:] = 0
    v[n:, :n] = 0

    # scalar phase transfer makes both K factors special (det A = 1 already)
    gamma = np.angle(np.linalg.det(kl)) / (2 * n)
    kl = kl * np.exp(-1j * gamma)
    v = v * np.exp(1j * gamma)

    # deterministic ordering: phi descending via blockdiag(P, P), which
    # commutes with the rotation structure
    order = np.argsort(-phi_vec)
    perm = np.eye(n)[:, order]
    p2 = np.zeros((2 * n, 2 * n))
    p2[:n, :n] = perm
    p2[n:, n:] = perm
    phi_vec = phi_vec[order]
    kl = kl @ p2
    v = p2.T @ v

    coords = CartanCoords(Family.SU2N_BLOCK, phi_vec)
    return KakFactors(kl, coords, v, Family.SU2N_BLOCK)


def is_block_diagonal(x: np.ndarray, tol: float = 1e-10) -> bool:
    n = x.shape[0] // 2
    return frob(x[:n, n:]) <= tol and frob(x[n:, :n]) <= tol
