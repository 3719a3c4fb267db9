"""Random two-qubit states.

Mixed states follow the product measure: Haar-distributed eigenvectors times
a uniformly distributed eigenvalue simplex. Pure states follow the unitarily
invariant (Fubini-Study) measure. Everything is vectorised: the ``*_batch``
samplers return :class:`MixedBatch` / :class:`PureBatch` containers that know
how to compute their own concurrence, before or after a gate.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RejectionBudgetExceeded
from .gates import Gate
from .linalg import DIM, Spectrum4, from_spectrum
from .measures import (
    concurrence_for_eof,
    concurrence_from_spectrum,
    concurrence_pure,
    eof_from_concurrence,
    max_concurrence_for_spectrum,
)
from .states import DensityMatrix, PureState

DEFAULT_MAX_ATTEMPTS = 10**7


@dataclass(frozen=True)
class RngStream:
    """Reproducible, independent random stream.

    ``(seed, stream_id, channel)`` feeds a :class:`numpy.random.SeedSequence`
    spawn key, so distinct ids give statistically independent PCG64 streams
    and equal ids give bit-identical sequences.
    """

    seed: int
    stream_id: int = 0
    channel: int = 0

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.channel, self.stream_id))
        return np.random.Generator(np.random.PCG64(ss))


def _rng(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def haar_unitary(rng, size=None):
    """Haar-random U(4) matrix (or ``size`` of them).

    Ginibre matrix, QR, then each column of Q is multiplied by the phase of
    the matching diagonal entry of R so the triangular factor is unique.
    """
    rng = _rng(rng)
    n = 1 if size is None else size
    z = (rng.standard_normal((n, DIM, DIM)) + 1j * rng.standard_normal((n, DIM, DIM))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    q = q * (d / np.abs(d))[:, None, :]
    return q[0] if size is None else q


def uniform_simplex(rng, size=None):
    """Uniform point(s) on the probability simplex (Dirichlet(1, 1, 1, 1))."""
    rng = _rng(rng)
    n = 1 if size is None else size
    e = rng.standard_exponential((n, DIM))
    w = e / e.sum(axis=1, keepdims=True)
    return w[0] if size is None else w


def _gate_matrix(gate):
    if gate is None:
        return None
    if isinstance(gate, Gate):
        return gate.matrix
    return np.asarray(gate, dtype=np.complex128)


@dataclass
class MixedBatch:
    """States ``V diag(w) V^dagger`` stored by their spectral factors."""

    weights: np.ndarray
    vectors: np.ndarray
    _c0: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.weights)

    def matrices(self, gate=None):
        v = self.vectors
        u = _gate_matrix(gate)
        if u is not None:
            v = u @ v
        return from_spectrum(self.weights, v)

    def concurrence(self, gate=None):
        u = _gate_matrix(gate)
        if u is None:
            if self._c0 is None:
                self._c0 = concurrence_from_spectrum(self.weights, self.vectors)
            return self._c0
        if np.array_equal(u, np.eye(DIM)):
            return self.concurrence()
        return concurrence_from_spectrum(self.weights, u @ self.vectors)

    def purity(self):
        return np.sum(self.weights**2, axis=1)

    def take(self, idx):
        c0 = None if self._c0 is None else self._c0[idx]
        return MixedBatch(self.weights[idx], self.vectors[idx], c0)

    @staticmethod
    def concat(parts):
        c0 = None
        if all(p._c0 is not None for p in parts):
            c0 = np.concatenate([p._c0 for p in parts])
        return MixedBatch(
            np.concatenate([p.weights for p in parts]),
            np.concatenate([p.vectors for p in parts]),
            c0,
        )

    def state(self, i):
        order = np.argsort(-self.weights[i], kind="stable")
        w = self.weights[i][order]
        v = self.vectors[i][:, order]
        return DensityMatrix(from_spectrum(w, v), Spectrum4(w, v))


@dataclass
class PureBatch:
    """Pure states as rows of amplitudes."""

    amplitudes: np.ndarray
    _c0: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.amplitudes)

    def matrices(self, gate=None):
        a = self.amplitudes
        u = _gate_matrix(gate)
        if u is not None:
            a = a @ u.T
        return a[:, :, None] * np.conj(a[:, None, :])

    def concurrence(self, gate=None):
        u = _gate_matrix(gate)
        if u is None or np.array_equal(u, np.eye(DIM)):
            if self._c0 is None:
                self._c0 = concurrence_pure(self.amplitudes)
            return self._c0
        return concurrence_pure(self.amplitudes @ u.T)

    def purity(self):
        return np.ones(len(self))

    def take(self, idx):
        c0 = None if self._c0 is None else self._c0[idx]
        return PureBatch(self.amplitudes[idx], c0)

    @staticmethod
    def concat(parts):
        c0 = None
        if all(p._c0 is not None for p in parts):
            c0 = np.concatenate([p._c0 for p in parts])
        return PureBatch(np.concatenate([p.amplitudes for p in parts]), c0)

    def state(self, i):
        return PureState(self.amplitudes[i])


def sample_mixed_batch(rng, n):
    rng = _rng(rng)
    u = haar_unitary(rng, n)
    w = uniform_simplex(rng, n)
    return MixedBatch(w, u)


def sample_mixed(rng):
    """One product-measure density matrix."""
    return sample_mixed_batch(rng, 1).state(0)


def sample_pure_batch(rng, n):
    rng = _rng(rng)
    z = rng.standard_normal((n, DIM)) + 1j * rng.standard_normal((n, DIM))
    return PureBatch(z / np.linalg.norm(z, axis=1, keepdims=True))


def sample_pure(rng):
    """One Fubini-Study random pure state."""
    return sample_pure_batch(rng, 1).state(0)


def sample_batch(rng, kind, n):
    if kind == "pure":
        return sample_pure_batch(rng, n)
    if kind in ("mixed", "all"):
        return sample_mixed_batch(rng, n)
    raise ConfigError("ensemble", f"unknown ensemble {kind!r} (expected pure or all)")


# -- conditioning ------------------------------------------------------------


@dataclass(frozen=True)
class Band:
    """Acceptance region: ``E`` or ``R`` in ``[lo, hi]``, or exactly ``E = 0``."""

    quantity: str
    lo: float = 0.0
    hi: float = 0.0
    exact_zero: bool = False

    @classmethod
    def separable(cls):
        return cls("E", 0.0, 0.0, exact_zero=True)

    @classmethod
    def around(cls, quantity, center, half_width):
        return cls(quantity, center - half_width, center + half_width)

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def accepts(self, concurrence, purity):
        if self.exact_zero:
            return concurrence == 0.0
        if self.quantity == "E":
            value = eof_from_concurrence(concurrence)
        else:
            value = 1.0 / purity
        value = np.asarray(value)
        return (value >= self.lo) & (value <= self.hi)

    def __str__(self):
        if self.exact_zero:
            return "E=0"
        return f"{self.quantity} in [{self.lo!r},{self.hi!r}]"


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_BAND_RE = re.compile(rf"^\s*([ER])\s+in\s*\[\s*({_NUM})\s*,\s*({_NUM})\s*\]\s*$", re.I)
_ZERO_RE = re.compile(r"^\s*E\s*=\s*0(?:\.0*)?\s*$", re.I)


def parse_band(text):
    """Parse ``"E=0"``, ``"E in [a,b]"`` or ``"R in [a,b]"``."""
    if _ZERO_RE.match(text):
        return Band.separable()
    m = _BAND_RE.match(text)
    if not m:
        raise ConfigError("band", f"cannot parse band {text!r}")
    q, lo, hi = m.group(1).upper(), float(m.group(2)), float(m.group(3))
    if lo > hi:
        raise ConfigError("band", f"empty band {text!r}")
    return Band(q, lo, hi)


def _chunk(needed, rate, remaining_budget):
    size = int(math.ceil(1.2 * needed / max(rate, 1e-6))) + 16
    return max(1, min(size, 1 << 15, remaining_budget))


def _budget_error(band, got, n, attempts):
    return RejectionBudgetExceeded(f"band {band} accepted {got}/{n} after {attempts} attempts")


def _conditioned_simplex(rng, band, n, max_attempts):
    """Rejection on the eigenvalue simplex alone; purity depends only on it."""
    kept = []
    got = attempts = 0
    while got < n:
        budget = max_attempts - attempts
        if budget <= 0:
            raise _budget_error(band, got, n, attempts)
        size = _chunk(n - got, (got + 1) / (attempts + 2), budget)
        w = uniform_simplex(rng, size)
        hits = np.flatnonzero(band.accepts(None, np.sum(w**2, axis=1)))
        if len(hits) >= n - got:
            hits = hits[: n - got]
            attempts += int(hits[-1]) + 1
        else:
            attempts += size
        kept.append(w[hits])
        got += len(hits)
    return np.concatenate(kept), attempts


def _screen(band, cand, c_floor):
    """Acceptance mask and concurrences (NaN where never computed).

    For mixed candidates and a band bounded away from zero, states whose
    spectrum cannot reach concurrence ``c_floor`` under any unitary are
    rejected without diagonalising anything.
    """
    if c_floor > 0.0 and isinstance(cand, MixedBatch):
        reach = max_concurrence_for_spectrum(cand.weights)
        idx = np.flatnonzero(reach >= c_floor)
        conc = np.full(len(cand), np.nan)
        ok = np.zeros(len(cand), dtype=bool)
        if idx.size:
            sub = cand.take(idx)
            conc[idx] = sub.concurrence()
            ok[idx] = band.accepts(conc[idx], sub.purity())
        return ok, conc
    conc = cand.concurrence()
    return band.accepts(conc, cand.purity()), conc


def _concurrence_floor(band):
    if band.exact_zero or band.quantity != "E" or band.lo <= 0.0:
        return 0.0
    # small safety margin: this only decides which candidates get diagonalised
    return max(concurrence_for_eof(min(band.lo, 1.0)) - 1e-9, 0.0)


def sample_conditioned_batch(rng, kind, band, n, max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Draw ``n`` states satisfying ``band`` by rejection.

    Returns ``(batch, attempts)`` where ``attempts`` counts candidates drawn
    up to and including the ``n``-th acceptance. Accepted states keep draw
    order, so the result is a deterministic function of the generator.
    Raises :class:`RejectionBudgetExceeded` once ``max_attempts`` candidates
    have been drawn without filling the quota.
    """
    rng = _rng(rng)
    if isinstance(band, str):
        band = parse_band(band)
    if n == 0:
        return sample_batch(rng, kind, 0), 0
    if kind in ("mixed", "all") and band.quantity == "R" and not band.exact_zero:
        w, attempts = _conditioned_simplex(rng, band, n, max_attempts)
        u = haar_unitary(rng, len(w))
        return MixedBatch(w, u), attempts

    c_floor = _concurrence_floor(band)
    parts = []
    got = attempts = 0
    while got < n:
        budget = max_attempts - attempts
        if budget <= 0:
            raise _budget_error(band, got, n, attempts)
        size = _chunk(n - got, (got + 1) / (attempts + 2), budget)
        cand = sample_batch(rng, kind, size)
        ok, conc = _screen(band, cand, c_floor)
        hits = np.flatnonzero(ok)
        if len(hits) >= n - got:
            hits = hits[: n - got]
            attempts += int(hits[-1]) + 1
        else:
            attempts += size
        if hits.size:
            accepted = cand.take(hits)
            accepted._c0 = conc[hits]
            parts.append(accepted)
            got += len(hits)
    return parts[0].concat(parts), attempts


def sample_conditioned(rng, kind, band, max_attempts=DEFAULT_MAX_ATTEMPTS):
    """A single state (PureState or DensityMatrix) satisfying ``band``."""
    batch, _ = sample_conditioned_batch(rng, kind, band, 1, max_attempts)
    return batch.state(0)
