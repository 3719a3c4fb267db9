"""Scalar functionals of two-qubit states.

All functions accept a :class:`~entangle_mc.states.DensityMatrix` (returning a
Python float or bool) or a raw array of shape ``(..., 4, 4)`` (returning an
array over the leading axes).
"""

import numpy as np

from . import linalg
from .errors import DomainError, InvariantViolation
from .linalg import adjoint, hermitian_eigen
from .states import DensityMatrix, as_matrix, partial_transpose, purity

LN2 = np.log(2.0)
DOMAIN_SLACK = 1e-12
PPT_TOL = 1e-10

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def _spectrum(rho):
    """Clamped eigenvalues and eigenvectors."""
    if isinstance(rho, DensityMatrix):
        return rho.spectrum.values, rho.spectrum.vectors
    w, v = hermitian_eigen(as_matrix(rho))
    return linalg.clamp_spectrum(w), v


def spin_flip(rho):
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)`` in the product basis."""
    return YY @ np.conj(as_matrix(rho)) @ YY


def concurrence_from_spectrum(weights, vectors):
    """Concurrence of ``rho = V diag(w) V^dagger``.

    The square roots of the eigenvalues of ``rho rho~`` equal those of the
    Hermitian PSD matrix ``sqrt(rho) rho~ sqrt(rho)``. In the eigenbasis of
    ``rho`` that matrix is ``A A^dagger`` with
    ``A = sqrt(W) V^dagger YY V* sqrt(W)``, which is PSD by construction.
    """
    weights = np.asarray(weights, dtype=float)
    vectors = np.asarray(vectors, dtype=np.complex128)
    t = adjoint(vectors) @ YY @ np.conj(vectors)
    sw = np.sqrt(np.maximum(weights, 0.0))
    a = sw[..., :, None] * t * sw[..., None, :]
    m = a @ adjoint(a)
    mu = linalg.eigvalsh(m, check=False)
    if mu.size and mu.min() < -linalg.PSD_HARD_TOL:
        raise InvariantViolation(f"auxiliary matrix eigenvalue {mu.min():.3e} < 0")
    lam = np.sqrt(np.maximum(mu, 0.0))
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.clip(c, 0.0, 1.0)


def concurrence(rho):
    """Wootters concurrence in [0, 1]."""
    w, v = _spectrum(rho)
    return _scalar(concurrence_from_spectrum(w, v))


def concurrence_pure(amplitudes):
    """Concurrence ``2|ad - bc|`` of pure states given as ``(..., 4)`` amplitudes."""
    amp = np.asarray(amplitudes, dtype=np.complex128)
    c = 2.0 * np.abs(amp[..., 0] * amp[..., 3] - amp[..., 1] * amp[..., 2])
    return _scalar(np.clip(c, 0.0, 1.0))


def _entropy_small(y):
    """Binary entropy (bits) for ``0 <= y <= 1/2``, accurate as ``y -> 0``."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(y > 0.0, -y * np.log(y), 0.0)
    return (term - (1.0 - y) * np.log1p(-y)) / LN2


def binary_entropy(x):
    """``-x log2 x - (1-x) log2 (1-x)`` with ``0 log 0 = 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < -DOMAIN_SLACK) or np.any(x > 1.0 + DOMAIN_SLACK):
        raise DomainError("binary entropy needs 0 <= x <= 1")
    x = np.clip(x, 0.0, 1.0)
    y = np.minimum(x, 1.0 - x)
    return _scalar(np.clip(_entropy_small(y), 0.0, 1.0))


def eof_from_concurrence(c):
    """Entanglement of formation as a function of concurrence.

    Evaluates ``h((1 + sqrt(1 - C^2)) / 2)`` through the small argument
    ``(1 - sqrt(1 - C^2)) / 2 = C^2 / (2 (1 + sqrt(1 - C^2)))`` so that
    ``E > 0`` for every ``C > 0`` representable in floating point.
    """
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    root = np.sqrt(1.0 - c * c)
    y = c * c / (2.0 * (1.0 + root))
    return _scalar(np.clip(_entropy_small(y), 0.0, 1.0))


def concurrence_for_eof(e):
    """Inverse of :func:`eof_from_concurrence` (bisection; E is increasing in C)."""
    if not 0.0 <= e <= 1.0:
        raise DomainError("entanglement must lie in [0, 1]")
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if eof_from_concurrence(mid) < e:
            lo = mid
        else:
            hi = mid
    return hi


def max_concurrence_for_spectrum(weights):
    """Largest concurrence reachable from a spectrum by any global unitary.

    ``max(0, w1 - w3 - 2 sqrt(w2 w4))`` with weights sorted decreasingly
    (Verstraete, Audenaert and De Moor, 2001).
    """
    w = -np.sort(-np.asarray(weights, dtype=float), axis=-1)
    w = np.maximum(w, 0.0)
    c = w[..., 0] - w[..., 2] - 2.0 * np.sqrt(w[..., 1] * w[..., 3])
    return _scalar(np.clip(c, 0.0, 1.0))


def entanglement_of_formation(rho):
    """Entanglement of formation in ebits, in [0, 1]."""
    return eof_from_concurrence(concurrence(rho))


def participation_ratio(rho):
    """``1 / Tr rho^2``: 1 for pure states up to 4 for ``I/4``."""
    return _scalar(1.0 / purity(rho))


def von_neumann_entropy(rho):
    """``-Tr rho ln rho`` (natural log) from the spectrum."""
    w, _ = _spectrum(rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0.0, -w * np.log(w), 0.0)
    return _scalar(np.maximum(terms.sum(axis=-1), 0.0))


def q_moment(rho, q):
    """``Tr rho^q`` for ``q > 0``."""
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    w, _ = _spectrum(rho)
    with np.errstate(divide="ignore"):
        terms = np.where(w > 0.0, np.power(w, q), 0.0)
    return _scalar(terms.sum(axis=-1))


def min_pt_eigenvalue(rho):
    """Smallest eigenvalue of the partial transpose."""
    pt = partial_transpose(rho)
    return _scalar(linalg.eigvalsh(pt)[..., -1])


def is_ppt_separable(rho):
    """Peres-Horodecki verdict; exact separability test for two qubits."""
    return _scalar(np.asarray(min_pt_eigenvalue(rho)) >= -PPT_TOL)
