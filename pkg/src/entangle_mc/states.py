"""Two-qubit pure states and density matrices.

Basis order is fixed everywhere as |00>, |01>, |10>, |11>, first label being
the first (control) qubit.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InvalidState, NotNormalized
from .linalg import DIM, Spectrum4

NORM_TOL = 1e-9
TRACE_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised amplitudes ``(a, b, c, d)`` on |00>, |01>, |10>, |11>."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _frozen(self.amplitudes)
        if amp.shape != (DIM,):
            raise ValueError(f"pure state needs 4 amplitudes, got shape {amp.shape}")
        norm = np.linalg.norm(amp)
        if not np.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"norm {norm!r} deviates from 1")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_vector(cls, vec):
        """Normalise an arbitrary nonzero 4-vector."""
        vec = np.asarray(vec, dtype=np.complex128)
        return cls(vec / np.linalg.norm(vec))

    @classmethod
    def product(cls, first, second):
        """Tensor product of two single-qubit vectors (normalised each)."""
        first = np.asarray(first, dtype=np.complex128)
        second = np.asarray(second, dtype=np.complex128)
        return cls(np.kron(first / np.linalg.norm(first), second / np.linalg.norm(second)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated two-qubit density matrix.

    Construction checks Hermiticity, unit trace and positivity; the
    eigen-decomposition is cached (eigenvalues clamped at zero) because
    concurrence, entropy and purity all need it.
    """

    matrix: np.ndarray
    _spectrum: Spectrum4 = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (DIM, DIM):
            raise InvalidState("shape", f"expected (4, 4), got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidState("non-finite")
        defect = float(linalg.hermitian_defect(m))
        if defect > linalg.HERMITIAN_TOL:
            raise InvalidState("non-hermitian", f"max |rho - rho^dagger| = {defect:.3e}")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState("trace", f"trace = {tr!r}")
        object.__setattr__(self, "matrix", _frozen(m))
        if self._spectrum is None:
            w, v = linalg.hermitian_eigen(m, check=False)
            if w[-1] < -linalg.CLAMP_TOL:
                raise InvalidState("negative-eigenvalue", f"min eigenvalue {w[-1]:.3e}")
            object.__setattr__(self, "_spectrum", Spectrum4(np.maximum(w, 0.0), v))

    @classmethod
    def _trusted(cls, matrix, spectrum):
        """Build without re-validating (for products of valid inputs)."""
        obj = object.__new__(cls)
        m = np.asarray(matrix, dtype=np.complex128)
        object.__setattr__(obj, "matrix", _frozen(0.5 * (m + m.conj().T)))
        object.__setattr__(obj, "_spectrum", spectrum)
        return obj

    @property
    def spectrum(self):
        return self._spectrum

    @property
    def eigenvalues(self):
        return self._spectrum.values

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def density_from_pure(psi):
    """Projector ``|psi><psi|`` as a :class:`DensityMatrix`."""
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    amp = psi.amplitudes
    vectors = np.empty((DIM, DIM), dtype=np.complex128)
    # complete psi to an orthonormal basis; only the first column matters
    q, _ = np.linalg.qr(np.column_stack([amp, np.eye(DIM, dtype=np.complex128)[:, :3]]))
    vectors[:] = q
    vectors[:, 0] = amp
    values = np.array([1.0, 0.0, 0.0, 0.0])
    return DensityMatrix._trusted(np.outer(amp, amp.conj()), Spectrum4(values, vectors))


def validate(rho):
    """Return a :class:`DensityMatrix` or raise :class:`InvalidState`."""
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho)


def as_matrix(rho):
    """Raw ``(..., 4, 4)`` complex array for a state or stack of states."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    if isinstance(rho, PureState):
        return np.outer(rho.amplitudes, rho.amplitudes.conj())
    return np.asarray(rho, dtype=np.complex128)


def partial_transpose(rho):
    """Transpose on the second qubit: ``((i,j),(k,l)) -> ((i,l),(k,j))``."""
    m = as_matrix(rho)
    lead = m.shape[:-2]
    t = m.reshape(lead + (2, 2, 2, 2)).swapaxes(-3, -1)
    return t.reshape(lead + (DIM, DIM))


def purity(rho):
    """``Tr rho^2`` from the matrix entries (works on stacks)."""
    m = as_matrix(rho)
    return np.sum(np.abs(m) ** 2, axis=(-2, -1))


# -- text serialisation ---------------------------------------------------


class StateParseError(ValueError):
    """Malformed serialised state; carries 1-based line and column."""

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


def dumps_state(rho):
    """One line of 32 comma-separated numbers: re,im per entry, row-major."""
    m = as_matrix(rho)
    parts = []
    for z in m.reshape(-1):
        parts.append(repr(float(z.real)))
        parts.append(repr(float(z.imag)))
    return ",".join(parts)


def _parse_line(text, lineno):
    values = []
    col = 1
    for token in text.split(","):
        stripped = token.strip()
        lead = len(token) - len(token.lstrip())
        try:
            values.append(float(stripped))
        except ValueError:
            raise StateParseError(lineno, col + lead, f"bad number {stripped!r}") from None
        col += len(token) + 1
    if len(values) != 2 * DIM * DIM:
        raise StateParseError(lineno, 1, f"expected 32 numbers, found {len(values)}")
    arr = np.array(values).reshape(DIM * DIM, 2)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(DIM, DIM)


def loads_states(text):
    """Parse every non-blank, non-``#`` line into a raw 4x4 matrix."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        out.append((lineno, _parse_line(line.rstrip("\n"), lineno)))
    return out


def loads_state(text):
    """Parse a single serialised state and validate it."""
    states = loads_states(text)
    if not states:
        raise StateParseError(1, 1, "no state found")
    lineno, m = states[0]
    try:
        return DensityMatrix(m)
    except InvalidState as exc:
        raise StateParseError(lineno, 1, f"invalid state ({exc})") from exc


def dump_states(path, states):
    with open(path, "w") as fh:
        for rho in states:
            fh.write(dumps_state(rho) + "\n")


def load_states(path):
    """Read and validate every state in a file."""
    with open(path) as fh:
        text = fh.read()
    result = []
    for lineno, m in loads_states(text):
        try:
            result.append(DensityMatrix(m))
        except InvalidState as exc:
            raise StateParseError(lineno, 1, f"invalid state ({exc})") from exc
    return result


def bell_state():
    """(|00> + |11>)/sqrt(2) as a :class:`PureState`."""
    return PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))


def maximally_mixed():
    return DensityMatrix(np.eye(DIM) / DIM)
