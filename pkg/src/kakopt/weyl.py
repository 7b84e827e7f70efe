"""Weyl orbits, majorization certificates, and the minimum-time LP.

Orbits are finite point sets: coordinate permutations (SN_PERMUTATION),
signed permutations (BN_SIGNED), or the 24 even-sign-flip images of a
two-qubit triple (TWO_QUBIT_24).  Membership in the convex hull of an orbit
(majorization) and the minimum-time program min sum(t_k) over nonnegative
segment durations are both solved by a small dense two-phase simplex with
Bland's rule, so results are deterministic with no external solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .twoqubit import weyl_group_24

FEAS_TOL = 1e-9
WEIGHT_TRUNC = 1e-12
DEDUP_TOL = 1e-10


class OrbitType(Enum):
    SN_PERMUTATION = "sn"
    BN_SIGNED = "bn"
    TWO_QUBIT_24 = "two-qubit"


@dataclass(frozen=True)
class WeylOrbit:
    orbit_type: OrbitType
    base: np.ndarray
    points: np.ndarray  # shape (count, dim)


@dataclass(frozen=True)
class MajorizationCert:
    feasible: bool
    weights: np.ndarray | None
    residual: float


def generate_orbit(base, orbit_type: OrbitType) -> WeylOrbit:
    base = np.asarray(base, dtype=float)
    if not np.all(np.isfinite(base)):
        raise ValueError("base vector must be finite")
    n = len(base)
    pts = []
    if orbit_type is OrbitType.SN_PERMUTATION:
        for perm in itertools.permutations(range(n)):
            pts.append(base[list(perm)])
    elif orbit_type is OrbitType.BN_SIGNED:
        for perm in itertools.permutations(range(n)):
            for signs in itertools.product((1.0, -1.0), repeat=n):
                pts.append(np.array(signs) * base[list(perm)])
    elif orbit_type is OrbitType.TWO_QUBIT_24:
        if n != 3:
            raise ValueError("two-qubit orbits act on 3-vectors")
        for g in weyl_group_24():
            pts.append(g @ base)
    else:
        raise ValueError(f"unknown orbit type {orbit_type}")
    uniq: list[np.ndarray] = []
    for p in pts:
        if not any(np.abs(p - q).max() < DEDUP_TOL for q in uniq):
            uniq.append(p)
    return WeylOrbit(orbit_type, base, np.array(uniq))


# ---------------------------------------------------------------------------
# Dense two-phase simplex with Bland's rule

def _pivot(t: np.ndarray, basis: list[int], row: int, col: int) -> None:
    t[row] = t[row] / t[row, col]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] = t[r] - t[r, col] * t[row]
    basis[row] = col


def _run_simplex(
    t: np.ndarray, basis: list[int], ncols: int, tol: float, piv_tol: float = 1e-9
) -> None:
    """Minimize the objective in the last tableau row over columns < ncols."""
    for _ in range(20000):
        # Bland: entering = lowest-index improving column that also has a
        # usable pivot element (tiny-pivot columns are numerical noise on
        # highly degenerate instances and are skipped)
        enter = -1
        worst = 0.0
        for j in range(ncols):
            if t[-1, j] < -tol:
                worst = min(worst, t[-1, j])
                if np.any(t[:-1, j] > piv_tol):
                    enter = j
                    break
        if enter < 0:
            if worst < -1e-6:
                raise RuntimeError("LP unbounded")
            return
        leave, best = -1, np.inf
        for r in range(t.shape[0] - 1):
            if t[r, enter] > piv_tol:
                ratio = t[r, -1] / t[r, enter]
                if ratio < best - 1e-15 or (
                    abs(ratio - best) <= 1e-15
                    and (leave < 0 or basis[r] < basis[leave])
                ):
                    best, leave = ratio, r
        _pivot(t, basis, leave, enter)
    raise RuntimeError("simplex iteration budget exceeded")


def linprog_eq(c: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float = FEAS_TOL):
    """min c.x subject to a x = b, x >= 0.

    Returns (feasible, x, objective, phase1_residual).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    a = a.copy()
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1

    # phase 1: artificials with identity basis
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n : n + m] = np.eye(m)
    t[:m, -1] = b
    t[-1, :n] = -a.sum(axis=0)
    t[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    _run_simplex(t, basis, n, tol=1e-12)
    resid = -t[-1, -1]
    if resid > tol:
        return False, None, np.inf, resid

    # drive any remaining artificials out of the basis
    for r in range(m):
        if basis[r] >= n:
            piv = next((j for j in range(n) if abs(t[r, j]) > 1e-9), None)
            if piv is not None:
                _pivot(t, basis, r, piv)
            # else: redundant row, leave the artificial at value ~0

    # phase 2
    t[-1, :] = 0.0
    t[-1, :n] = c
    for r in range(m):
        if basis[r] < n:
            t[-1] -= t[-1, basis[r]] * t[r]
    t[:, n : n + m] = 0.0  # forbid artificials from re-entering
    _run_simplex(t, basis, n, tol=1e-12)
    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = t[r, -1]
    return True, x, float(c @ x), resid


# ---------------------------------------------------------------------------

def majorized(mu, orbit: WeylOrbit) -> MajorizationCert:
    """Is mu in the convex hull of the orbit points?"""
    mu = np.asarray(mu, dtype=float)
    pts = orbit.points
    if mu.shape != (pts.shape[1],):
        raise ValueError("dimension mismatch between mu and orbit")
    k = pts.shape[0]
    a = np.vstack([pts.T, np.ones((1, k))])
    b = np.concatenate([mu, [1.0]])
    feasible, w, _, resid = linprog_eq(np.zeros(k), a, b)
    if not feasible:
        return MajorizationCert(False, None, resid)
    w = np.where(w < WEIGHT_TRUNC, 0.0, w)
    w = w / w.sum()
    resid = float(np.linalg.norm(pts.T @ w - mu))
    return MajorizationCert(True, w, resid)


def min_time(target, drift, orbit_type: OrbitType):
    """Smallest T with target = sum t_k p_k over the drift orbit, t_k >= 0.

    Returns (T, weights) with weights = t / T summing to 1 (empty target
    gives T = 0 and zero weights).  Raises ValueError when infeasible.
    """
    target = np.asarray(target, dtype=float)
    orbit = generate_orbit(drift, orbit_type)
    pts = orbit.points
    k = pts.shape[0]
    feasible, tvec, obj, resid = linprog_eq(np.ones(k), pts.T, target)
    if not feasible:
        raise ValueError(f"target unreachable from drift orbit (residual {resid:.2e})")
    tvec = np.where(tvec < WEIGHT_TRUNC, 0.0, tvec)
    total = float(tvec.sum())
    if total <= 0.0:
        return 0.0, np.zeros(k)
    return total, tvec / total


def reachable(target, drift, t_total: float, orbit_type: OrbitType) -> MajorizationCert:
    """Closure membership of target in the time-t_total reachable coordinates."""
    if t_total <= 0:
        raise ValueError("time must be positive")
    drift = np.asarray(drift, dtype=float)
    orbit = generate_orbit(t_total * drift, orbit_type)
    return majorized(target, orbit)


def two_qubit_min_time_grid(target, drift, step: float = 1e-3) -> float:
    """Independent brute-force oracle for the two-qubit minimum time.

    Scans T on a grid and returns the first T satisfying the closed-form
    chamber inequalities  alpha <= a_x T  and  alpha+beta+-gamma <=
    (a_x + a_y +- a_z) T  for the chamber-reduced target (alpha, beta, gamma)
    and drift (a_x, a_y, a_z).
    """
    from .twoqubit import reduce_triple

    tgt, _ = reduce_triple(np.asarray(target, dtype=float))
    drf, _ = reduce_triple(np.asarray(drift, dtype=float))
    al, be, ga = tgt
    ax, ay, az = drf
    if ax <= 0:
        if np.linalg.norm(tgt) == 0:
            return 0.0
        raise ValueError("zero drift cannot reach a nonzero target")

    def ok(tt):
        return (
            al <= ax * tt + 1e-12
            and al + be + ga <= (ax + ay + az) * tt + 1e-12
            and al + be - ga <= (ax + ay - az) * tt + 1e-12
        )

    tt = 0.0
    while not ok(tt):
        tt += step
        if tt > 1e4:
            raise RuntimeError("grid search failed to terminate")
    return tt
