"""Two-qubit gates and the entanglement change they produce."""

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError
from .linalg import DIM, Spectrum4
from .measures import entanglement_of_formation
from .states import DensityMatrix, validate

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Gate:
    """A 4x4 unitary with a symbolic name such as ``"cnot"`` or ``"theta:pi/4"``.

    ``kind`` is one of ``"cnot"``, ``"theta"``, ``"identity"``, ``"custom"``;
    ``theta`` is set only for the rotation family.
    """

    matrix: np.ndarray
    kind: str = "custom"
    theta: float = None
    name: str = "custom"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (DIM, DIM):
            raise ValueError(f"gate must be 4x4, got {m.shape}")
        err = np.max(np.abs(m @ m.conj().T - np.eye(DIM)))
        if not err < UNITARY_TOL:
            raise ValueError(f"gate is not unitary (max |UU^dagger - I| = {err:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def slug(self):
        """Filesystem-safe version of ``name``."""
        return re.sub(r"[^A-Za-z0-9.]+", "_", self.name).strip("_")

    @property
    def is_identity(self):
        return bool(np.array_equal(self.matrix, np.eye(DIM)))

    def __repr__(self):
        return f"Gate({self.name!r})"


def cnot():
    """Controlled-NOT with the first qubit as control."""
    m = np.eye(DIM)
    m[2:, 2:] = [[0.0, 1.0], [1.0, 0.0]]
    return Gate(m, kind="cnot", name="cnot")


def u_theta(theta, name=None):
    """Identity on the control-0 block, rotation ``[[c, s], [-s, c]]`` on control-1."""
    c, s = math.cos(theta), math.sin(theta)
    m = np.eye(DIM)
    m[2:, 2:] = [[c, s], [-s, c]]
    return Gate(m, kind="theta", theta=float(theta), name=name or f"theta:{theta!r}")


def identity():
    return Gate(np.eye(DIM), kind="identity", name="identity")


def custom(matrix, name="custom"):
    return Gate(matrix, kind="custom", name=name)


_PI_RE = re.compile(r"^\s*([+-]?)\s*(\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(text):
    """Parse ``"0.3"``, ``"pi"``, ``"pi/4"``, ``"3pi/4"``, ``"-2*pi/3"``, ``"1/3"``.

    Multiples of pi are handled as exact fractions before conversion.
    """
    text = text.strip().lower()
    m = _PI_RE.match(text)
    if m:
        sign, num, den = m.groups()
        frac = Fraction(int(num) if num else 1, int(den) if den else 1)
        if sign == "-":
            frac = -frac
        return float(frac) * math.pi
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse angle {text!r}") from None


def parse_gate(spec):
    """Gate from the CLI grammar: ``cnot``, ``identity``, ``theta:<angle>``."""
    text = spec.strip().lower()
    if text == "cnot":
        return cnot()
    if text in ("identity", "id"):
        return identity()
    if text.startswith("theta:"):
        angle = text.split(":", 1)[1]
        try:
            theta = parse_angle(angle)
        except ValueError as exc:
            raise ConfigError("gate", str(exc)) from None
        return u_theta(theta, name=f"theta:{angle.strip().replace(' ', '')}")
    raise ConfigError("gate", f"unknown gate {spec!r} (expected cnot, identity or theta:<angle>)")


def apply(gate, rho):
    """``U rho U^dagger``; the cached spectrum is carried over as ``(w, U V)``."""
    rho = validate(rho)
    u = gate.matrix
    w, v = rho.spectrum
    return DensityMatrix._trusted(u @ rho.matrix @ u.conj().T, Spectrum4(w, u @ v))


def apply_pure(gate, amplitudes):
    """Gate action on pure-state amplitudes ``(..., 4)``."""
    return np.asarray(amplitudes) @ gate.matrix.T


@dataclass(frozen=True)
class DeltaE:
    e_initial: float
    e_final: float
    delta: float


def delta_e(gate, rho):
    """Entanglement of formation before and after the gate."""
    rho = validate(rho)
    e0 = entanglement_of_formation(rho)
    ef = entanglement_of_formation(apply(gate, rho))
    return DeltaE(e0, ef, ef - e0)
