"""Dense complex linear algebra and spin-operator constructors.

Everything downstream works with plain complex128 ndarrays.  Matrices are
small (n <= ~12) and normal, so exponentials and logarithms go through
eigendecompositions rather than scaling-and-squaring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# Default tolerances, overridable per call.
UNITARY_TOL = 1e-10
RECON_TOL = 1e-8
MEMBER_TOL = 1e-8


class BranchAmbiguityError(ValueError):
    """Principal-log branch is ill-defined: an eigenphase sits at -pi."""


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    n = u.shape[0]
    return frob(u @ dagger(u) - np.eye(n)) <= tol * max(1.0, np.sqrt(n))


def is_special(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return abs(np.linalg.det(u) - 1.0) <= tol * 10


def is_skew_hermitian(x: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return frob(x + dagger(x)) <= tol * max(1.0, frob(x))


def assert_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix contains NaN/Inf entries")


# ---------------------------------------------------------------------------
# Pauli / spin operators

def pauli() -> dict[str, np.ndarray]:
    """Spin-1/2 operators sigma_x, sigma_y, sigma_z (eigenvalues +-1/2)."""
    sx = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
    sy = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = 0.5 * np.array([[1, 0], [0, -1]], dtype=complex)
    return {"x": sx, "y": sy, "z": sz}


@dataclass(frozen=True)
class AlgebraBasis:
    """Ordered basis of skew-Hermitian traceless matrices with labels."""

    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(
                self, "labels", tuple(f"e{i}" for i in range(len(self.elements)))
            )
        for e in self.elements:
            if not is_skew_hermitian(e, 1e-12):
                raise ValueError("basis element not skew-Hermitian")
            if abs(np.trace(e)) > 1e-12:
                raise ValueError("basis element not traceless")
        g = self.gram()
        if abs(np.linalg.det(g)) < 1e-12:
            raise ValueError("basis elements linearly dependent")

    def __len__(self) -> int:
        return len(self.elements)

    def gram(self) -> np.ndarray:
        """Gram matrix under the standard inner product tr(x' y)."""
        n = len(self.elements)
        g = np.empty((n, n))
        for i, x in enumerate(self.elements):
            for j, y in enumerate(self.elements):
                g[i, j] = np.real(np.trace(dagger(x) @ y))
        return g

    def coords(self, x: np.ndarray, tol: float = MEMBER_TOL) -> np.ndarray:
        """Expand x in this basis; raises if x lies outside the span."""
        rhs = np.array(
            [np.real(np.trace(dagger(e) @ x)) for e in self.elements]
        )
        c = np.linalg.solve(self.gram(), rhs)
        resid = frob(self.combine(c) - x)
        if resid > tol * max(1.0, frob(x)):
            raise ValueError(f"element outside basis span (residual {resid:.2e})")
        return c

    def combine(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros_like(self.elements[0])
        for ci, e in zip(c, self.elements):
            out = out + ci * e
        return out


def spin_operators() -> tuple[AlgebraBasis, AlgebraBasis, AlgebraBasis]:
    """su(4) basis from two coupled spins.

    Returns (g, k, p) where g is the full 15-element basis
    -i{I_a, S_b, I_a S_b}, k = -i{I_a, S_b} the local sub-basis and
    p = -i{I_a S_b} the coupling sub-basis.
    """
    s = pauli()
    one = np.eye(2, dtype=complex)
    k_elems, k_labels = [], []
    for ax in "xyz":
        k_elems.append(-1j * np.kron(s[ax], one))
        k_labels.append(f"I{ax}")
    for ax in "xyz":
        k_elems.append(-1j * np.kron(one, s[ax]))
        k_labels.append(f"S{ax}")
    p_elems, p_labels = [], []
    for a in "xyz":
        for b in "xyz":
            p_elems.append(-1j * np.kron(s[a], s[b]))
            p_labels.append(f"I{a}S{b}")
    g = AlgebraBasis(tuple(k_elems + p_elems), tuple(k_labels + p_labels))
    k = AlgebraBasis(tuple(k_elems), tuple(k_labels))
    p = AlgebraBasis(tuple(p_elems), tuple(p_labels))
    return g, k, p


def spin_op(name: str) -> np.ndarray:
    """Single product operator, e.g. 'Iz', 'Sx', 'IzSz' (Hermitian, no -i)."""
    s = pauli()
    one = np.eye(2, dtype=complex)
    if len(name) == 2 and name[0] == "I":
        return np.kron(s[name[1]], one)
    if len(name) == 2 and name[0] == "S":
        return np.kron(one, s[name[1]])
    if len(name) == 4 and name[0] == "I" and name[2] == "S":
        return np.kron(s[name[1]], s[name[3]])
    raise ValueError(f"unknown operator name {name!r}")


# ---------------------------------------------------------------------------
# Exponential / logarithm for normal matrices

def expm_skew(x: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """exp(X) for skew-Hermitian X, via eigendecomposition of iX."""
    assert_finite(x)
    if not is_skew_hermitian(x, tol):
        raise ValueError("input is not skew-Hermitian")
    h = 1j * x  # Hermitian
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w)) @ dagger(v)


def logm_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """Principal log of a unitary: skew-Hermitian with eigenphases in (-pi, pi].

    Raises BranchAmbiguityError when an eigenphase sits within 1e-12 of -pi.
    """
    assert_finite(u)
    if not is_unitary(u, tol):
        raise ValueError("input is not unitary")
    # Complex Schur of a normal matrix: T is diagonal up to roundoff and Z
    # gives orthonormal eigenvectors even for degenerate spectra.
    t, z = scipy.linalg.schur(u.astype(complex), output="complex")
    phases = np.angle(np.diag(t))
    if np.any(np.pi - np.abs(phases) < 1e-12):
        raise BranchAmbiguityError("eigenphase at the -pi branch cut")
    x = (z * (1j * phases)) @ dagger(z)
    return 0.5 * (x - dagger(x))


def unitary_eig(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases (in (-pi, pi]) and orthonormal eigenvectors of a unitary."""
    t, z = scipy.linalg.schur(u.astype(complex), output="complex")
    return np.angle(np.diag(t)), z


# ---------------------------------------------------------------------------
# Adjoint representation and Killing form

def ad_matrix(x: np.ndarray, basis: AlgebraBasis) -> np.ndarray:
    """Matrix of ad_x over the given algebra basis."""
    cols = [basis.coords(commutator(x, e)) for e in basis.elements]
    return np.array(cols).T


def killing_form(x: np.ndarray, y: np.ndarray, basis: AlgebraBasis) -> float:
    """tr(ad_x ad_y) computed over the basis; x, y must lie in its span."""
    basis.coords(x)
    basis.coords(y)
    ax = ad_matrix(x, basis)
    ay = ad_matrix(y, basis)
    return float(np.trace(ax @ ay))


def standard_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Standard inner product tr(x' y) (real for skew-Hermitian pairs)."""
    return float(np.real(np.trace(dagger(x) @ y)))


def haar_su(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random special unitary."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    det = np.linalg.det(q)
    return q * det ** (-1.0 / n)


def haar_so(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random special orthogonal matrix."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
