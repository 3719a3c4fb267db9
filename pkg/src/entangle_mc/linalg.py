"""Fixed-size (4x4) complex matrix kernel.

Every routine accepts a single ``(4, 4)`` array or a stack ``(..., 4, 4)``
and works on the whole stack at once. The Hermitian eigensolver is a cyclic
Jacobi iteration vectorised over the stack, which is what lets the Monte
Carlo estimators diagonalise millions of states without a Python loop.
"""

from itertools import combinations

import numpy as np

from .errors import NotHermitian, NotPSD

DIM = 4

HERMITIAN_TOL = 1e-10
CLAMP_TOL = 1e-10
PSD_HARD_TOL = 1e-8
JACOBI_TOL = 1e-14
MAX_SWEEPS = 50
# batch slice size; small enough to stay cache resident
CHUNK = 4096

# off-diagonal magnitude below which no rotation is applied (avoids denormals)
_NEGLIGIBLE = 1e-200
_PAIRS = tuple(combinations(range(DIM), 2))
_OFFDIAG = ~np.eye(DIM, dtype=bool)


class Spectrum4:
    """Eigen-decomposition of a Hermitian 4x4 matrix (or a stack of them).

    ``values[..., k]`` pairs with the column ``vectors[..., :, k]``;
    values are sorted in decreasing order.
    """

    __slots__ = ("values", "vectors")

    def __init__(self, values, vectors):
        self.values = values
        self.vectors = vectors

    def __iter__(self):
        yield self.values
        yield self.vectors

    def __repr__(self):
        return f"Spectrum4(values={self.values!r})"

    def reconstruct(self):
        return from_spectrum(self.values, self.vectors)


def _as_stack(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.shape[-2:] != (DIM, DIM):
        raise ValueError(f"expected trailing shape (4, 4), got {a.shape}")
    return a


def matmul(a, b):
    """Matrix product, broadcasting over leading axes."""
    return np.matmul(_as_stack(a), _as_stack(b))


def adjoint(a):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(_as_stack(a), -1, -2))


def hermitian_defect(h):
    """Max entrywise ``|h - h^dagger|`` per matrix."""
    h = _as_stack(h)
    return np.max(np.abs(h - adjoint(h)), axis=(-2, -1))


def from_spectrum(values, vectors):
    """Rebuild ``V diag(values) V^dagger``."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    values = np.asarray(values)
    return np.matmul(vectors * values[..., None, :], adjoint(vectors))


def _jacobi_sweep(a, v):
    """One cyclic sweep of complex Jacobi rotations, in place.

    ``a`` and ``v`` use the batch-last layout ``(4, 4, n)`` so that every
    row/column slice is contiguous. For the pair (p, q) the rotation is
    ``J = diag(1, conj(phase)) R`` where ``phase = a_pq / |a_pq|`` and ``R``
    is the real rotation annihilating the now-real off-diagonal element.
    """
    for p, q in _PAIRS:
        apq = a[p, q]
        mag = np.abs(apq)
        live = mag > _NEGLIGIBLE
        if not live.any():
            continue
        safe = np.where(live, mag, 1.0)
        phase = apq / safe
        phase[~live] = 1.0
        app = a[p, p].real.copy()
        aqq = a[q, q].real.copy()
        tau = (aqq - app) / (2.0 * safe)
        t = np.copysign(1.0, tau) / (np.abs(tau) + np.hypot(1.0, tau))
        t[~live] = 0.0
        c = 1.0 / np.sqrt(1.0 + t * t)
        s = t * c
        s_conj = s * np.conj(phase)
        c_conj = c * np.conj(phase)
        s_ph = s * phase
        c_ph = c * phase

        # A <- A J
        col_p = a[:, p].copy()
        col_q = a[:, q]
        a[:, p] = c * col_p - s_conj * col_q
        a[:, q] = s * col_p + c_conj * col_q
        # A <- J^dagger A
        row_p = a[p].copy()
        row_q = a[q]
        a[p] = c * row_p - s_ph * row_q
        a[q] = s * row_p + c_ph * row_q
        if v is not None:
            # V <- V J
            vp = v[:, p].copy()
            vq = v[:, q]
            v[:, p] = c * vp - s_conj * vq
            v[:, q] = s * vp + c_conj * vq

        a[p, p] = app - t * mag
        a[q, q] = aqq + t * mag
        a[p, q] = 0.0
        a[q, p] = 0.0


def _jacobi_chunk(h, want_vectors):
    """Diagonalise a flat ``(n, 4, 4)`` Hermitian stack; returns batch-first."""
    a = np.ascontiguousarray(h.transpose(1, 2, 0))
    v = None
    if want_vectors:
        v = np.zeros_like(a)
        for i in range(DIM):
            v[i, i] = 1.0
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(0, 1))))
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[_OFFDIAG]) ** 2, axis=0))
        if np.all(off < JACOBI_TOL * scale):
            break
        _jacobi_sweep(a, v)
    else:
        off = np.sqrt(np.sum(np.abs(a[_OFFDIAG]) ** 2, axis=0))
        if np.any(off > 1e-12 * scale):
            raise ArithmeticError("Jacobi iteration did not converge")
    w = np.ascontiguousarray(np.diagonal(a).real)
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if v is not None:
        v = np.take_along_axis(v.transpose(2, 0, 1), order[:, None, :], axis=2)
    return w, v


def _jacobi(h, want_vectors=True):
    n = h.shape[0]
    w = np.empty((n, DIM))
    v = np.empty((n, DIM, DIM), dtype=np.complex128) if want_vectors else None
    for lo in range(0, n, CHUNK):
        wc, vc = _jacobi_chunk(h[lo:lo + CHUNK], want_vectors)
        w[lo:lo + CHUNK] = wc
        if want_vectors:
            v[lo:lo + CHUNK] = vc
    return w, v


def _prepare(h, check):
    h = _as_stack(h)
    if check:
        defect = hermitian_defect(h)
        if np.any(defect > HERMITIAN_TOL) or not np.all(np.isfinite(h)):
            raise NotHermitian(f"max |h - h^dagger| = {np.max(defect):.3e}")
    flat = h.reshape(-1, DIM, DIM)
    return h.shape[:-2], 0.5 * (flat + adjoint(flat))


def hermitian_eigen(h, check=True):
    """Eigen-decomposition of Hermitian 4x4 matrices.

    Parameters
    ----------
    h : array_like, shape (..., 4, 4)
        Hermitian matrix or stack of matrices.
    check : bool
        Raise :class:`NotHermitian` if any matrix deviates from its adjoint
        by more than ``1e-10`` entrywise.

    Returns
    -------
    Spectrum4
        ``values`` with shape ``(..., 4)`` in decreasing order and matching
        orthonormal eigenvector columns in ``vectors``.
    """
    lead, flat = _prepare(h, check)
    w, v = _jacobi(flat)
    return Spectrum4(w.reshape(lead + (DIM,)), v.reshape(lead + (DIM, DIM)))


def eigvalsh(h, check=True):
    """Eigenvalues only, decreasing (skips eigenvector accumulation)."""
    lead, flat = _prepare(h, check)
    w, _ = _jacobi(flat, want_vectors=False)
    return w.reshape(lead + (DIM,))


def clamp_spectrum(values, tol=CLAMP_TOL, hard_tol=PSD_HARD_TOL):
    """Zero out round-off negatives; raise NotPSD below ``-hard_tol``."""
    values = np.asarray(values, dtype=float)
    low = np.min(values) if values.size else 0.0
    if low < -hard_tol:
        raise NotPSD(f"eigenvalue {low:.3e} below -{hard_tol:g}")
    return np.where(values < tol, np.maximum(values, 0.0), values)


def psd_sqrt(p):
    """Principal square root of a Hermitian PSD matrix (or stack)."""
    w, v = hermitian_eigen(p)
    w = clamp_spectrum(w)
    return from_spectrum(np.sqrt(w), v)
