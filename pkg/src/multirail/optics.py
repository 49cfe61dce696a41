"""Multiphoton evolution through single-party linear optics networks.

A mode unitary ``U`` acts on creation operators as
``a_m^dag -> sum_m' U[m', m] a_m'^dag``.  On Fock states this gives the
familiar permanent formula

    <out|U|in> = perm(U[out|in]) / sqrt(out! in!)

where ``U[out|in]`` repeats row ``m'`` ``out[m']`` times and column ``m``
``in[m]`` times.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .fock import PRUNE_THRESHOLD, BasisState, FockVector, SparseState, enumerate_basis, factorial_product, subspace

UNITARY_TOLERANCE = 1e-10


def permanent(matrix) -> complex:
    """Permanent of a square matrix by Ryser's formula with Gray-code ordering.

    Runs in ``O(2**n * n)``.  The empty matrix has permanent 1.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(a[0, 0])
    row_sums = np.zeros(n, dtype=complex)
    in_subset = [False] * n
    size = 0
    total = 0j
    for step in range(1, 1 << n):
        # Gray code: consecutive subsets differ in exactly one column
        col = (step & -step).bit_length() - 1
        if in_subset[col]:
            row_sums -= a[:, col]
            size -= 1
        else:
            row_sums += a[:, col]
            size += 1
        in_subset[col] = not in_subset[col]
        term = np.prod(row_sums)
        total += -term if size & 1 else term
    return complex(-total if n & 1 else total)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOLERANCE) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u @ u.conj().T, np.eye(u.shape[0]), atol=tol, rtol=0
    )


def hadamard_matrix(modes: int, j: int) -> np.ndarray:
    """Generalized Hadamard mode unitary whose columns are the ``Lambda_j`` eigenmodes.

    Entry ``(m, s)`` is ``tau**(-(M - m) m j) * omega**(-m s) / sqrt(M)`` with
    ``tau = exp(i pi / M)`` the fixed square root of ``omega``.  Column ``s``
    carries the single-photon eigenvalue ``tau**(j (M - 1)) * omega**s``, so
    for ``j = 0`` this is the inverse discrete Fourier matrix and measuring
    after ``H^dag`` reads off ``Lambda`` eigenphases as clock labels.
    """
    j %= modes
    m = np.arange(modes).reshape(-1, 1)
    s = np.arange(modes).reshape(1, -1)
    tau = cmath.exp(1j * math.pi / modes)
    quad = np.array([tau ** (-((modes - mm) * mm * j)) for mm in range(modes)]).reshape(-1, 1)
    return quad * np.exp(-2j * math.pi * m * s / modes) / math.sqrt(modes)


def lambda_matrix(modes: int, j: int) -> np.ndarray:
    """Single-photon matrix of ``Lambda_j = X Z^j`` (columns are input modes)."""
    w = cmath.exp(2j * math.pi / modes)
    out = np.zeros((modes, modes), dtype=complex)
    for m in range(modes):
        out[(m + 1) % modes, m] = w ** (j * m)
    return out


def _repeat_indices(occupation: FockVector) -> list[int]:
    return [m for m, k in enumerate(occupation) for _ in range(k)]


def transition_matrix(u: np.ndarray, photons: int) -> np.ndarray:
    """Matrix of ``U`` restricted to the ``photons``-photon subspace (canonical order)."""
    u = np.asarray(u, dtype=complex)
    return _transition_matrix(u.tobytes(), u.shape[0], photons).copy()


@lru_cache(maxsize=256)
def _transition_matrix(buf: bytes, modes: int, photons: int) -> np.ndarray:
    u = np.frombuffer(buf, dtype=complex).reshape(modes, modes)
    basis = enumerate_basis(modes, photons)
    cols = [_repeat_indices(v) for v in basis]
    norms = [math.sqrt(factorial_product(v)) for v in basis]
    out = np.empty((len(basis), len(basis)), dtype=complex)
    for a, rows in enumerate(cols):
        sub_rows = u[rows, :]
        for b, cidx in enumerate(cols):
            out[a, b] = permanent(sub_rows[:, cidx]) / (norms[a] * norms[b])
    return out


def apply_local_unitary(state: SparseState, party: int, u: np.ndarray) -> SparseState:
    """Send one party's modes through the mode unitary ``u``."""
    shape = state.shape
    if not 0 <= party < shape.parties:
        raise IndexError(f"party index {party} out of range for {shape.parties} parties")
    u = np.asarray(u, dtype=complex)
    if u.shape != (shape.modes, shape.modes):
        raise ValueError(f"unitary of shape {u.shape} does not act on {shape.modes} modes")
    return SparseState.from_vector(shape, _apply_local(state.to_vector(), shape, party, u))


def _apply_local(vec: np.ndarray, shape, party: int, u: np.ndarray) -> np.ndarray:
    sub = subspace(shape)
    t = transition_matrix(u, shape.photons[party])
    tensor = vec.reshape(sub.party_dims)
    tensor = np.moveaxis(np.tensordot(t, tensor, axes=([1], [party])), 0, party)
    return tensor.reshape(-1)


@dataclass(frozen=True)
class MeasurementSetting:
    """Either the computational basis or the ``Lambda_{j_i l}`` eigenbasis.

    The latter is realized by applying ``H_{j_i l}^dag`` on each party
    before photon counting.
    """

    kind: str = "computational"
    l: int = 0
    indices: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("computational", "hadamard"):
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        object.__setattr__(self, "indices", tuple(int(v) for v in self.indices))

    @classmethod
    def hadamard(cls, l: int, indices: Sequence[int]) -> MeasurementSetting:
        return cls("hadamard", int(l), tuple(indices))

    def party_unitaries(self, modes: int, parties: int) -> list[np.ndarray]:
        if self.kind == "computational":
            return [np.eye(modes, dtype=complex)] * parties
        if len(self.indices) != parties:
            raise ValueError(f"need {parties} HW indices for the Hadamard setting, got {len(self.indices)}")
        if not 0 <= self.l < modes:
            raise ValueError(f"measurement label l={self.l} must lie in [0, {modes})")
        return [hadamard_matrix(modes, (j * self.l) % modes) for j in self.indices]


def measured_vector(state: SparseState, setting: MeasurementSetting) -> np.ndarray:
    """Amplitudes in the measurement basis, canonical order."""
    vec = state.to_vector()
    if setting.kind == "computational":
        return vec
    shape = state.shape
    for i, h in enumerate(setting.party_unitaries(shape.modes, shape.parties)):
        vec = _apply_local(vec, shape, i, h.conj().T)
    return vec


def outcome_distribution(state: SparseState, setting: MeasurementSetting) -> dict[BasisState, float]:
    """Outcome probabilities in canonical order; outcomes below 1e-28 are dropped."""
    probs = np.abs(measured_vector(state, setting)) ** 2
    sub = subspace(state.shape)
    keep = np.flatnonzero(probs >= PRUNE_THRESHOLD**2)
    return {sub.states[i]: float(probs[i]) for i in keep}


def hadamard_label_offset(shape, indices: Sequence[int], l: int) -> int:
    """Shift between the summed clock label of a Hadamard outcome and its eigenphase.

    Each party's Hadamard outcome carries the eigenvalue
    ``tau**(J (M - 1) N) * omega**mu`` with ``J = j l mod M``; the product of
    the ``tau`` factors is ``+-1`` under the index condition, and ``-1`` is the
    clock shift ``M / 2`` (only possible for even M).
    """
    modes = shape.modes
    exponent = (modes - 1) * sum(((j * l) % modes) * n for j, n in zip(indices, shape.photons))
    half_turns = exponent % (2 * modes)
    if half_turns == 0:
        return 0
    if half_turns == modes:
        return modes // 2
    raise ValueError("HW indices violate the index condition; eigenphases are not clock labels")


def s_lambda_hadamard(state: SparseState, indices: Sequence[int], l: int, m: int) -> float:
    """Probability that the ``l`` Hadamard measurement yields summed clock label ``m``.

    This is the measurement-side evaluation of the stabilizer projector
    ``S_Lambda(l, m)``: outcomes ``n`` with ``sum_i mu(n_i) + offset = m``.
    """
    shape = state.shape
    setting = MeasurementSetting.hadamard(l % shape.modes, indices)
    probs = np.abs(measured_vector(state, setting)) ** 2
    sub = subspace(shape)
    offset = hadamard_label_offset(shape, indices, l)
    labels = (sub.clock_labels.sum(axis=1) + offset) % shape.modes
    return float(probs[labels == m % shape.modes].sum())


def sample_outcomes(distribution: Mapping[BasisState, float], count: int, seed: int) -> list[BasisState]:
    """Draw ``count`` i.i.d. outcomes; deterministic for a given seed."""
    if not distribution:
        raise ValueError("cannot sample from an empty distribution")
    outcomes = list(distribution)
    p = np.array([distribution[o] for o in outcomes], dtype=float)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(outcomes), size=count, p=p)
    return [outcomes[i] for i in picks]
