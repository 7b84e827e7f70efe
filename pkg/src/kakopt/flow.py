"""Piecewise-constant simulation of dP/dt = Ad_K(t)(X_d) P and its checks.

The endpoint of a piecewise-constant schedule is the exact product
prod_i exp(Ad_{K_i}(X_d) tau_i) (earliest factor rightmost), so simulation
has no integration error.  Three verification tools accompany it:

* check_reachable — extracts Cartan coordinates of the endpoint and tests
  the majorization certificate against the orbit of T * (drift coordinates),
  with a closed-form partial-sum slack as an independent second route.
* second_order_reduce — the sandwiching iteration that strips the
  off-Cartan components of a small algebra element, exp(k1) exp(x Delta)
  exp(k2) = exp(a Delta + O(Delta^2)), with measured contraction.
* projection_flow — explicit-Euler integration of da/dt = P_a(Ad_Kbar(X_d))
  cross-checked against the exact product's KAK coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kak import Family, is_block_diagonal, kak_su2n, kak_sun_son
from .linalg import dagger, expm_skew, frob, logm_unitary
from .roots import RootSystem, is_regular, regular_element
from .weyl import OrbitType, MajorizationCert, generate_orbit, majorized

DEGENERATE_TOL = 1e-6
SIN_CUTOFF = 1e-8


class DegenerateChartError(RuntimeError):
    """The coordinate chart failed at a non-regular Cartan point."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class ControlSchedule:
    """Ordered (subgroup element, positive duration) segments."""

    segments: tuple[tuple[np.ndarray, float], ...]

    def __post_init__(self):
        for _, tau in self.segments:
            if not tau > 0:
                raise ValueError("segment durations must be positive")

    @property
    def total_time(self) -> float:
        return float(sum(tau for _, tau in self.segments))


def _check_in_p(drift: np.ndarray, family: Family) -> None:
    drift = np.asarray(drift)
    if frob(drift + dagger(drift)) > 1e-10 or abs(np.trace(drift)) > 1e-10:
        raise ValueError("drift must be skew-Hermitian and traceless")
    if family is Family.SUN_SON:
        if frob(drift - drift.T) > 1e-10:
            raise ValueError("drift must be complex symmetric (i * real symmetric)")
    else:
        n = drift.shape[0] // 2
        if frob(drift[:n, :n]) > 1e-10 or frob(drift[n:, n:]) > 1e-10:
            raise ValueError("drift must have zero diagonal blocks")


def _check_in_subgroup(k: np.ndarray, family: Family) -> None:
    if frob(k @ dagger(k) - np.eye(k.shape[0])) > 1e-10:
        raise ValueError("schedule element is not unitary")
    if abs(np.linalg.det(k) - 1) > 1e-10:
        raise ValueError("schedule element is not special")
    if family is Family.SUN_SON:
        if frob(k.imag) > 1e-10:
            raise ValueError("schedule element is not real orthogonal")
    elif not is_block_diagonal(k, tol=1e-10):
        raise ValueError("schedule element is not block diagonal")


def simulate(drift: np.ndarray, schedule: ControlSchedule, family: Family) -> np.ndarray:
    """Endpoint prod_i exp(Ad_{K_i}(drift) tau_i), earliest segment first."""
    drift = np.asarray(drift, dtype=complex)
    _check_in_p(drift, family)
    p = np.eye(drift.shape[0], dtype=complex)
    for k, tau in schedule.segments:
        _check_in_subgroup(np.asarray(k), family)
        p = expm_skew(tau * (k @ drift @ dagger(k))) @ p
    return p


def random_schedule(
    family: Family, n: int, segments: int, seed: int, mean_tau: float = 0.1
) -> ControlSchedule:
    """Haar-random subgroup elements with exponential-mean durations."""
    from .linalg import haar_so, haar_su

    rng = np.random.default_rng(seed)
    segs = []
    for _ in range(segments):
        if family is Family.SUN_SON:
            k = haar_so(n, rng).astype(complex)
        else:
            u1, u2 = haar_su(n, rng), haar_su(n, rng)
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            k = np.zeros((2 * n, 2 * n), dtype=complex)
            k[:n, :n] = phase * u1
            k[n:, n:] = phase.conj() * u2
        tau = float(rng.exponential(mean_tau)) + 1e-6
        segs.append((k, tau))
    return ControlSchedule(tuple(segs))


def drift_coords(drift: np.ndarray, family: Family) -> np.ndarray:
    """Cartan coordinates of an element of p, sorted decreasing."""
    drift = np.asarray(drift, dtype=complex)
    _check_in_p(drift, family)
    if family is Family.SUN_SON:
        return np.sort(np.linalg.eigvalsh(1j * drift))[::-1]
    n = drift.shape[0] // 2
    return np.sort(np.linalg.svd(drift[:n, n:], compute_uv=False))[::-1]


def endpoint_coords(p: np.ndarray, family: Family) -> np.ndarray:
    """Weyl-reduced KAK coordinates of a special unitary endpoint."""
    if family is Family.SUN_SON:
        return kak_sun_son(p).cartan.values
    return kak_su2n(p).cartan.values


def _partial_sum_slack(mu: np.ndarray, nu: np.ndarray, family: Family) -> float:
    """Closed-form hull slack: min over the defining partial-sum inequalities.

    For the permutation orbit of a traceless vector the hull is cut out by
    sum-equality plus top-k partial sums; for the signed-permutation orbit by
    top-k partial sums of absolute values.
    """
    if family is Family.SUN_SON:
        mu_s = np.sort(mu)[::-1]
        nu_s = np.sort(nu)[::-1]
        gaps = np.cumsum(nu_s)[:-1] - np.cumsum(mu_s)[:-1]
        return float(min(gaps.min(), -abs(mu.sum() - nu.sum())))
    mu_s = np.sort(np.abs(mu))[::-1]
    nu_s = np.sort(np.abs(nu))[::-1]
    return float((np.cumsum(nu_s) - np.cumsum(mu_s)).min())


def check_reachable(
    p: np.ndarray, drift: np.ndarray, t_total: float, family: Family
) -> tuple[MajorizationCert, float]:
    """Certificate that the endpoint is reachable in time t_total.

    Returns the LP hull certificate for the endpoint's Weyl-reduced
    coordinates against the orbit of t_total * (drift coordinates), plus the
    closed-form partial-sum slack (negative slack means infeasible).  Valid
    while coordinates stay inside the principal branch (short total times).
    """
    mu = endpoint_coords(np.asarray(p, dtype=complex), family)
    nu = t_total * drift_coords(drift, family)
    orbit_type = (
        OrbitType.SN_PERMUTATION if family is Family.SUN_SON else OrbitType.BN_SIGNED
    )
    cert = majorized(mu, generate_orbit(nu, orbit_type))
    return cert, _partial_sum_slack(mu, nu, family)


def two_qubit_slack(p: np.ndarray, drift_triple, t_total: float) -> float:
    """Slack of the two-qubit reachability inequalities for endpoint p.

    With chamber-reduced endpoint triple (al, be, ga) and drift triple
    (ax, ay, az), feasibility requires al <= ax * T and
    al + be +- ga <= (ax + ay +- az) * T; returns the minimum margin.
    """
    from .twoqubit import canonical_params, reduce_triple

    triple, _, _ = canonical_params(np.asarray(p, dtype=complex))
    al, be, ga = triple
    ax, ay, az = reduce_triple(np.asarray(drift_triple, dtype=float))[0]
    return float(
        min(
            ax * t_total - al,
            (ax + ay + az) * t_total - (al + be + ga),
            (ax + ay - az) * t_total - (al + be - ga),
        )
    )


# ---------------------------------------------------------------------------
# Second-order reduction iteration

@dataclass(frozen=True)
class ReductionTrace:
    iterates: tuple[tuple[float, float, float], ...]  # (|a|, |b|, |c|) per step
    final_a: np.ndarray  # Cartan coordinates of log(U_final)
    residual: float  # final |b| + |c|
    ratio: float  # max observed contraction ratio of |b| + |c|
    constant: float  # ||final_a - a0 * Delta|| / Delta^2
    k_left: np.ndarray  # accumulated left factor L with L exp(x Delta) R = exp(final_a)
    k_right: np.ndarray


def second_order_reduce(
    system: RootSystem,
    x: np.ndarray,
    delta: float,
    a_ref: np.ndarray | None = None,
    max_iter: int = 200,
    tol: float = 1e-12,
) -> ReductionTrace:
    """Strip the off-Cartan part of exp(x * delta) by sandwiching.

    Iterates U <- exp(-(c + cbar) delta) U exp(-b delta + cbar delta) where
    x splits into Cartan (a), root-space (b, coefficients beta_i on the root
    p-vectors), and subgroup (c) components; cbar = sum beta_i cot(l_i) X_i
    solves the conjugated-subgroup equation at the regular reference point
    a_ref (root values l_i), excluding near-degenerate directions with
    |sin l_i| below a cutoff.  Converges to exp(a0 delta + O(delta^2)).
    """
    pair = system.pair
    if system.zero_dim != 0:
        raise ValueError("reduction requires a trivial centralizer beyond the Cartan")
    if a_ref is None:
        a_ref = regular_element(system)
    elif not is_regular(system, a_ref):
        raise ValueError("reference point must be regular")

    ys, xs, lams = [], [], []
    for root in system.positive:
        lam = root.value_on(a_ref)
        for y, xk in root.pairs:
            ys.append(y)
            xs.append(xk)
            lams.append(lam)
    lams = np.array(lams)
    a_frame = system.a_frame

    def split(mat):
        a_vec = np.array([pair.ip(f, mat) for f in a_frame])
        beta = np.array([pair.ip(y, mat) for y in ys])
        c_mat = mat - sum(v * f for v, f in zip(a_vec, a_frame))
        c_mat = c_mat - sum(b * y for b, y in zip(beta, ys))
        pair.k_basis.coords(c_mat)  # raises if the remainder left p + k
        return a_vec, beta, c_mat

    x = np.asarray(x, dtype=complex)
    a0, _, _ = split(x)
    u = expm_skew(x * delta)
    dim = u.shape[0]
    k_left = np.eye(dim, dtype=complex)
    k_right = np.eye(dim, dtype=complex)

    # all bookkeeping is on log(U) itself (exponent units), so the noise
    # floor of the matrix log does not get amplified by 1/delta
    iterates: list[tuple[float, float, float]] = []
    ratio = 0.0
    prev = None
    for _ in range(max_iter):
        xc = logm_unitary(u)
        a_vec, beta, c_mat = split(xc)
        b_norm = float(np.linalg.norm(beta))
        c_norm = float(np.sqrt(max(0.0, pair.ip(c_mat, c_mat))))
        iterates.append((float(np.linalg.norm(a_vec)), b_norm, c_norm))
        size = b_norm + c_norm
        if size <= tol:
            break
        if prev is not None:
            r = size / prev
            ratio = max(ratio, r)
            if r >= 1.0:
                raise RuntimeError(
                    f"iteration failed to contract at delta={delta} (ratio {r:.3f})"
                )
        prev = size
        sin_l = np.sin(lams)
        bad = np.abs(sin_l) < SIN_CUTOFF
        if np.any(bad & (np.abs(beta) > 1e-10)):
            raise RuntimeError(
                "root direction with sin(value) ~ 0 carries weight; "
                "choose a different reference point"
            )
        cbar = sum(
            b / np.tan(l) * xk
            for b, l, xk, skip in zip(beta, lams, xs, bad)
            if not skip
        )
        if isinstance(cbar, int):  # all directions excluded
            cbar = np.zeros_like(c_mat)
        b_mat = sum(b * y for b, y in zip(beta, ys))
        left = expm_skew(-(c_mat + cbar))
        right = expm_skew(-b_mat + cbar)
        u = left @ u @ right
        k_left = left @ k_left
        k_right = k_right @ right
    else:
        raise RuntimeError("reduction did not converge within the iteration budget")

    xf = logm_unitary(u)
    final_a = np.array([pair.ip(f, xf) for f in a_frame])
    off = frob(xf - sum(v * f for v, f in zip(final_a, a_frame)))
    constant = float(np.linalg.norm(final_a - a0 * delta) / delta**2)
    residual = max(iterates[-1][1] + iterates[-1][2], float(off))
    return ReductionTrace(
        tuple(iterates), final_a, residual, ratio, constant, k_left, k_right
    )


# ---------------------------------------------------------------------------
# Projection-flow cross-check (SU(n)/SO(n) family)

@dataclass(frozen=True)
class FlowTrace:
    times: np.ndarray
    a_integrated: np.ndarray  # Euler trajectory, shape (steps + 1, n)
    a_exact: np.ndarray  # KAK coordinates of the exact product
    max_deviation: float
    hull_max_residual: float  # worst per-step hull-membership residual


def projection_flow(
    drift: np.ndarray,
    schedule: ControlSchedule,
    step: float = 1e-2,
    hull_stride: int = 1,
) -> FlowTrace:
    """Integrate da/dt = P_a(Ad_Kbar(drift)) against the exact coordinates.

    Explicit Euler with fixed substeps; Kbar = K1(t)^{-1} K(t) from the KAK
    factorization of the exact product P(t).  Aborts when the coordinate
    chart degenerates (two coordinates of a(t) closer than DEGENERATE_TOL).
    Each sampled velocity is also certified to lie in the convex hull of the
    permutation orbit of the drift coordinates.
    """
    drift = np.asarray(drift, dtype=complex)
    _check_in_p(drift, Family.SUN_SON)
    n = drift.shape[0]
    d = drift_coords(drift, Family.SUN_SON)
    orbit = generate_orbit(d, OrbitType.SN_PERMUTATION)

    p = np.eye(n, dtype=complex)
    a_int = np.zeros(n)
    times = [0.0]
    a_int_hist = [a_int.copy()]
    a_exact_hist = [np.zeros(n)]
    t = 0.0
    max_dev = 0.0
    hull_resid = 0.0
    count = 0
    for k, tau in schedule.segments:
        _check_in_subgroup(np.asarray(k), Family.SUN_SON)
        xk = k @ drift @ dagger(k)
        nsub = max(1, int(np.ceil(tau / step)))
        dt = tau / nsub
        for _ in range(nsub):
            if t == 0.0:
                k1 = np.eye(n, dtype=complex)  # P(0) = I: take K1 = I exactly
            else:
                factors = kak_sun_son(p)
                lam = factors.cartan.values
                gaps = np.abs(lam[:, None] - lam[None, :])[np.triu_indices(n, 1)]
                if gaps.min() < DEGENERATE_TOL:
                    raise DegenerateChartError(
                        f"coordinate chart degenerate at t={t:.6f}", t
                    )
                k1 = factors.k_left
            omega = dagger(k1) @ xk @ k1
            vel = np.real(np.diag(1j * omega))
            if count % hull_stride == 0:
                cert = majorized(vel, orbit)
                if not cert.feasible:
                    raise RuntimeError(f"velocity left the drift hull at t={t:.6f}")
                hull_resid = max(hull_resid, cert.residual)
            a_int = a_int + vel * dt
            p = expm_skew(dt * xk) @ p
            t += dt
            count += 1
            lam_now = kak_sun_son(p).cartan.values
            dev = np.abs(np.sort(a_int)[::-1] - lam_now).max()
            max_dev = max(max_dev, dev)
            times.append(t)
            a_int_hist.append(a_int.copy())
            a_exact_hist.append(lam_now)
    return FlowTrace(
        np.array(times),
        np.array(a_int_hist),
        np.array(a_exact_hist),
        float(max_dev),
        float(hull_resid),
    )
