"""Numeric root systems for a matrix Cartan pair.

Roots are computed by simultaneously diagonalizing ad_a^2 on the coupling
subspace p for every element of a commuting basis of the Cartan subalgebra a
(refined by a generic combination to split accidental coincidences).  Each
joint eigenvector Y pairs with X = [a, Y]/|[a, Y]| in k, giving
[a, Y] = v(a) X and [a, X] = -v(a) Y; the value functional v doubles as the
root's representative vector in orthonormal a-coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import AlgebraBasis, commutator, dagger, frob, spin_op

ROOT_TOL = 1e-8


@dataclass(frozen=True)
class CartanPair:
    name: str
    g_basis: AlgebraBasis
    k_basis: AlgebraBasis
    p_basis: AlgebraBasis
    a_basis: AlgebraBasis
    inner: str = "standard"  # "standard" | "killing"

    def __post_init__(self):
        for i, x in enumerate(self.a_basis.elements):
            self.p_basis.coords(x)  # a inside span(p)
            for y in self.a_basis.elements[i + 1 :]:
                if frob(commutator(x, y)) > 1e-10:
                    raise ValueError("Cartan subalgebra basis does not commute")
        # bracket closure: [k,k] in k, [k,p] in p, [p,p] in k
        for x in self.k_basis.elements:
            for y in self.k_basis.elements:
                self.k_basis.coords(commutator(x, y))
            for y in self.p_basis.elements:
                self.p_basis.coords(commutator(x, y))
        for x in self.p_basis.elements:
            for y in self.p_basis.elements:
                self.k_basis.coords(commutator(x, y))

    def ip(self, x: np.ndarray, y: np.ndarray) -> float:
        if self.inner == "standard":
            return float(np.real(np.trace(dagger(x) @ y)))
        from .linalg import killing_form

        return -killing_form(x, y, self.g_basis)


@dataclass(frozen=True)
class RootDatum:
    p_part: np.ndarray
    k_part: np.ndarray
    rep: np.ndarray  # value functional == representative, orthonormal a-coords
    multiplicity: int
    # every orthonormal (p, k) pair of the root space; length == multiplicity
    pairs: tuple[tuple[np.ndarray, np.ndarray], ...] = ()

    def value_on(self, a_ortho_coords: np.ndarray) -> float:
        return float(self.rep @ a_ortho_coords)


@dataclass(frozen=True)
class RootSystem:
    pair: CartanPair
    a_frame: tuple[np.ndarray, ...]  # orthonormal basis of a
    positive: tuple[RootDatum, ...]
    zero_dim: int  # dimension of the centralizer part of p beyond a

    def a_coords(self, a_elem: np.ndarray) -> np.ndarray:
        return np.array([self.pair.ip(f, a_elem) for f in self.a_frame])


def _orthonormal_frame(pair: CartanPair, basis: AlgebraBasis) -> list[np.ndarray]:
    elems = list(basis.elements)
    gram = np.array([[pair.ip(x, y) for y in elems] for x in elems])
    w, v = np.linalg.eigh(gram)
    if w.min() <= 1e-12:
        raise ValueError("degenerate inner product on basis")
    # symmetric orthonormalization
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    out = []
    for col in inv_sqrt.T:
        out.append(sum(c * e for c, e in zip(col, elems)))
    return out


def compute_roots(pair: CartanPair, ordering: np.ndarray | None = None) -> RootSystem:
    """Positive roots of the pair.

    `ordering` (an element of the Cartan subalgebra) fixes the positive
    system: a root is positive when its value on `ordering` is positive.
    It must be regular; omitted, a fixed pseudorandom regular element is used.
    """
    p_frame = _orthonormal_frame(pair, pair.p_basis)
    a_frame = _orthonormal_frame(pair, pair.a_basis)
    rank = len(a_frame)
    dim_p = len(p_frame)

    rng = np.random.default_rng(20240817)
    coeffs = rng.standard_normal(rank)
    a_gen = sum(c * f for c, f in zip(coeffs, a_frame))
    if ordering is None:
        z = coeffs
    else:
        z = np.array([pair.ip(f, ordering) for f in a_frame])
        resid = frob(sum(c * f for c, f in zip(z, a_frame)) - ordering)
        if resid > 1e-8 * max(1.0, frob(ordering)):
            raise ValueError("ordering element lies outside the Cartan subalgebra")

    def op_matrix(a):
        """ad_a^2 restricted to p, in p_frame coordinates (symmetric)."""
        m = np.empty((dim_p, dim_p))
        for j, pj in enumerate(p_frame):
            img = commutator(a, commutator(a, pj))
            m[:, j] = [pair.ip(pi, img) for pi in p_frame]
        return 0.5 * (m + m.T)

    # multi-index simultaneous diagonalization: refine eigenspaces of each
    # ad_{a_i}^2 in turn, plus a generic combination to split coincidences
    subspaces = [np.eye(dim_p)]
    for a in list(a_frame) + [a_gen]:
        m = op_matrix(a)
        refined = []
        for sub in subspaces:
            proj = sub.T @ m @ sub
            w, v = np.linalg.eigh(proj)
            scale = max(1.0, np.abs(w).max())
            start = 0
            for k in range(1, len(w) + 1):
                if k == len(w) or w[k] - w[start] > ROOT_TOL * scale:
                    refined.append(sub @ v[:, start:k])
                    start = k
        subspaces = refined

    roots: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    zero_dim = 0
    for sub in subspaces:
        # representative eigen-matrix for each column of the subspace
        for col in sub.T:
            y = sum(c * f for c, f in zip(col, p_frame))
            bracket = commutator(a_gen, y)
            lam = np.sqrt(pair.ip(bracket, bracket))
            if lam < 1e-7:
                zero_dim += 1
                continue
            x = bracket / lam
            v = np.array([pair.ip(x, commutator(a, y)) for a in a_frame])
            # sign convention: positive value on the ordering element
            zval = v @ z
            if abs(zval) < 1e-8 * np.linalg.norm(v) * np.linalg.norm(z):
                raise ValueError("ordering element is not regular for this pair")
            if zval < 0:
                v = -v
                x = -x
            for a, vi in zip(a_frame, v):
                if frob(commutator(a, y) - vi * x) > ROOT_TOL:
                    raise RuntimeError("root relation [a, p] = v k violated")
                if frob(commutator(a, x) + vi * y) > ROOT_TOL:
                    raise RuntimeError("root relation [a, k] = -v p violated")
            roots.append((v, y, x))

    # a itself sits in the zero eigenspace; exclude it from the reported count
    zero_dim -= rank
    if zero_dim < 0:
        raise RuntimeError("centralizer bookkeeping failed")

    # group identical value vectors into multiplicities
    grouped: list[RootDatum] = []
    used = [False] * len(roots)
    for i, (v, y, x) in enumerate(roots):
        if used[i]:
            continue
        pairs = [(y, x)]
        for j in range(i + 1, len(roots)):
            if not used[j] and np.abs(roots[j][0] - v).max() < 1e-6:
                used[j] = True
                pairs.append((roots[j][1], roots[j][2]))
        used[i] = True
        grouped.append(RootDatum(y, x, v, len(pairs), tuple(pairs)))

    n_pos = sum(r.multiplicity for r in grouped)
    if dim_p != rank + zero_dim + n_pos:
        raise RuntimeError(
            f"dimension check failed: {dim_p} != {rank} + {zero_dim} + {n_pos}"
        )
    grouped.sort(key=lambda r: tuple(-np.round(r.rep, 9)))
    return RootSystem(pair, tuple(a_frame), tuple(grouped), zero_dim)


def regular_element(system: RootSystem, trials: int = 200) -> np.ndarray:
    """Coordinates (orthonormal a-frame) of an element no root vanishes on."""
    rng = np.random.default_rng(7)
    best, best_min = None, -1.0
    rank = len(system.a_frame)
    for _ in range(trials):
        c = rng.standard_normal(rank)
        c /= np.linalg.norm(c)
        mn = min(abs(r.rep @ c) for r in system.positive)
        if mn > best_min:
            best, best_min = c, mn
    if best_min < 1e-6:
        raise RuntimeError("no regular element found")
    return best


def is_regular(system: RootSystem, coords: np.ndarray, tol: float = 1e-6) -> bool:
    return min(abs(r.rep @ coords) for r in system.positive) >= tol


def reflect(v: np.ndarray, root: RootDatum) -> np.ndarray:
    m = root.rep
    denom = m @ m
    if denom < 1e-14:
        raise ValueError("zero root representative")
    return v - 2.0 * (m @ v) / denom * m


def reduce_to_chamber(v, system: RootSystem):
    """Reflect into the closed chamber where all positive roots are >= 0.

    Returns (reduced vector, list of root indices used, per-step distances to
    a fixed interior reference, which decrease strictly).
    """
    v = np.asarray(v, dtype=float).copy()
    ref = sum(r.rep for r in system.positive)
    ref = ref / np.linalg.norm(ref)  # interior direction of the chamber
    word: list[int] = []
    dists = [float(np.linalg.norm(v - np.linalg.norm(v) * ref))]
    limit = 10000  # |Weyl group| bounds the true word length
    while True:
        vals = np.array([r.rep @ v for r in system.positive])
        i = int(np.argmin(vals))
        if vals[i] >= -1e-12:
            return v, word, dists
        v = reflect(v, system.positive[i])
        word.append(i)
        dists.append(float(np.linalg.norm(v - np.linalg.norm(v) * ref)))
        if len(word) > limit:
            raise RuntimeError("chamber reduction failed to terminate")


def weyl_closure(system: RootSystem) -> list[np.ndarray]:
    """All elements of the group generated by the root reflections."""
    rank = len(system.a_frame)
    gens = []
    for r in system.positive:
        m = r.rep / np.linalg.norm(r.rep)
        gens.append(np.eye(rank) - 2.0 * np.outer(m, m))
    elems = [np.eye(rank)]
    frontier = [np.eye(rank)]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                cand = g @ e
                if not any(np.abs(cand - h).max() < 1e-8 for h in elems):
                    elems.append(cand)
                    nxt.append(cand)
        frontier = nxt
        if len(elems) > 5000:
            raise RuntimeError("reflection group appears infinite")
    return elems


def cartan_integers(system: RootSystem):
    """Matrix n_ab = 2<a,b>/<b,b> (integral) and the 4cos^2 angle classes."""
    reps = [r.rep for r in system.positive]
    k = len(reps)
    nmat = np.zeros((k, k), dtype=int)
    classes = np.zeros((k, k), dtype=int)
    for i, j in itertools.product(range(k), range(k)):
        val = 2.0 * (reps[i] @ reps[j]) / (reps[j] @ reps[j])
        if abs(val - round(val)) > 1e-6:
            raise RuntimeError(f"non-integral Cartan number {val}")
        nmat[i, j] = round(val)
        cosq = (reps[i] @ reps[j]) ** 2 / ((reps[i] @ reps[i]) * (reps[j] @ reps[j]))
        cls = 4.0 * cosq
        if abs(cls - round(cls)) > 1e-6 or round(cls) not in (0, 1, 2, 3, 4):
            raise RuntimeError(f"inadmissible root angle class {cls}")
        classes[i, j] = round(cls)
    return nmat, classes


def fundamental_roots(system: RootSystem) -> list[int]:
    """Indices of positive roots that are not sums of two positive roots."""
    reps = [r.rep for r in system.positive]
    out = []
    for i, r in enumerate(reps):
        is_sum = any(
            np.abs(reps[a] + reps[b] - r).max() < ROOT_TOL
            for a in range(len(reps))
            for b in range(len(reps))
        )
        if not is_sum:
            out.append(i)
    # consistency: pairwise non-acute and linearly independent
    for a, b in itertools.combinations(out, 2):
        if reps[a] @ reps[b] > 1e-10:
            raise RuntimeError("fundamental roots not pairwise non-acute")
    mat = np.array([reps[i] for i in out])
    if np.linalg.matrix_rank(mat, tol=1e-8) != len(out):
        raise RuntimeError("fundamental roots linearly dependent")
    return out


# ---------------------------------------------------------------------------
# Built-in pairs

def _su_basis(n: int) -> AlgebraBasis:
    elems, labels = [], []
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1
            e[j, i] = -1
            elems.append(e)
            labels.append(f"r{i}{j}")
            f = np.zeros((n, n), dtype=complex)
            f[i, j] = 1j
            f[j, i] = 1j
            elems.append(f)
            labels.append(f"s{i}{j}")
    for i in range(n - 1):
        d = np.zeros((n, n), dtype=complex)
        d[i, i] = 1j
        d[i + 1, i + 1] = -1j
        elems.append(d)
        labels.append(f"d{i}")
    return AlgebraBasis(tuple(elems), tuple(labels))


def builtin_pair(name: str, inner: str = "standard") -> CartanPair:
    """Built-in Cartan pairs: twospin, epr, sun-son:<n>, su2n:<n>."""
    if name == "twospin":
        from .linalg import spin_operators

        g, k, p = spin_operators()
        a = AlgebraBasis(
            tuple(-1j * spin_op(f"I{c}S{c}") for c in "xyz"),
            ("IxSx", "IySy", "IzSz"),
        )
        return CartanPair("twospin", g, k, p, a, inner)
    if name == "epr":
        from .linalg import spin_operators

        g, _, _ = spin_operators()
        k_elems = [-1j * spin_op("Iz")]
        k_labels = ["Iz"]
        for c in "xyz":
            k_elems.append(-1j * spin_op(f"S{c}"))
            k_labels.append(f"S{c}")
            k_elems.append(-1j * spin_op(f"IzS{c}"))
            k_labels.append(f"IzS{c}")
        p_elems, p_labels = [], []
        for h in "xy":
            p_elems.append(-1j * spin_op(f"I{h}"))
            p_labels.append(f"I{h}")
            for c in "xyz":
                p_elems.append(-1j * spin_op(f"I{h}S{c}"))
                p_labels.append(f"I{h}S{c}")
        k_b = AlgebraBasis(tuple(k_elems), tuple(k_labels))
        p_b = AlgebraBasis(tuple(p_elems), tuple(p_labels))
        a_b = AlgebraBasis(
            (-1j * spin_op("Ix"), -1j * 2.0 * spin_op("IxSz")), ("Ix", "2IxSz")
        )
        return CartanPair("epr", g, k_b, p_b, a_b, inner)
    if name.startswith("sun-son:"):
        n = int(name.split(":")[1])
        g = _su_basis(n)
        k_elems = tuple(e for e, l in zip(g.elements, g.labels) if l.startswith("r"))
        k_lab = tuple(l for l in g.labels if l.startswith("r"))
        p_elems = tuple(
            e for e, l in zip(g.elements, g.labels) if not l.startswith("r")
        )
        p_lab = tuple(l for l in g.labels if not l.startswith("r"))
        a_elems, a_lab = [], []
        for i in range(n - 1):
            d = np.zeros((n, n), dtype=complex)
            d[i, i] = 1j
            d[i + 1, i + 1] = -1j
            a_elems.append(d)
            a_lab.append(f"d{i}")
        return CartanPair(
            name,
            g,
            AlgebraBasis(k_elems, k_lab),
            AlgebraBasis(p_elems, p_lab),
            AlgebraBasis(tuple(a_elems), tuple(a_lab)),
            inner,
        )
    if name.startswith("su2n:"):
        n = int(name.split(":")[1])
        g = _su_basis(2 * n)
        k_elems, k_lab = [], []
        for half, off in (("t", 0), ("b", n)):
            sub = _su_basis(n)
            for e, l in zip(sub.elements, sub.labels):
                big = np.zeros((2 * n, 2 * n), dtype=complex)
                big[off : off + n, off : off + n] = e
                k_elems.append(big)
                k_lab.append(half + l)
        u1 = np.diag(
            np.concatenate([np.full(n, 1j), np.full(n, -1j)])
        )
        k_elems.append(u1)
        k_lab.append("u1")
        p_elems, p_lab = [], []
        for i in range(n):
            for j in range(n):
                for ph, tag in ((1.0, "re"), (1j, "im")):
                    z = np.zeros((2 * n, 2 * n), dtype=complex)
                    z[i, n + j] = ph
                    z[n + j, i] = -np.conj(ph)
                    p_elems.append(z)
                    p_lab.append(f"{tag}{i}{j}")
        a_elems, a_lab = [], []
        for i in range(n):
            z = np.zeros((2 * n, 2 * n), dtype=complex)
            z[i, n + i] = 1.0
            z[n + i, i] = -1.0
            a_elems.append(z)
            a_lab.append(f"a{i}")
        return CartanPair(
            name,
            g,
            AlgebraBasis(tuple(k_elems), tuple(k_lab)),
            AlgebraBasis(tuple(p_elems), tuple(p_lab)),
            AlgebraBasis(tuple(a_elems), tuple(a_lab)),
            inner,
        )
    raise ValueError(f"unknown pair name {name!r}")


def builtin_ordering(name: str) -> np.ndarray:
    """Ordering element fixing the conventional positive system per pair."""
    if name == "twospin":
        return -1j * (
            1.0 * spin_op("IxSx") + 2.0 * spin_op("IySy") + 3.0 * spin_op("IzSz")
        )
    if name == "epr":
        return 2.0 * (-1j * spin_op("Ix")) + 1.0 * (-1j * 2.0 * spin_op("IxSz"))
    if name.startswith("sun-son:"):
        n = int(name.split(":")[1])
        lam = np.arange(n, 0, -1, dtype=float)
        lam -= lam.mean()
        return -1j * np.diag(lam).astype(complex)
    if name.startswith("su2n:"):
        n = int(name.split(":")[1])
        z = np.zeros((2 * n, 2 * n), dtype=complex)
        for i in range(n):
            z[i, n + i] = n - i
            z[n + i, i] = -(n - i)
        return z
    raise ValueError(f"unknown pair name {name!r}")
