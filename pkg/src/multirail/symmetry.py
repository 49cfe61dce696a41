"""Heisenberg-Weyl actions on multi-rail Fock states.

``X`` moves every photon from mode ``m`` to mode ``m + 1 (mod M)``; ``Z`` gives a
photon in mode ``m`` the phase ``omega**m``.  Their products ``Lambda_j = X Z^j``
map Fock states to Fock states up to a phase, so everything here is exact
permutation-and-phase bookkeeping; no permanents are involved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .fock import BasisState, FockVector, SparseState, SystemShape, enumerate_basis, subspace


def _is_fock_vector(obj) -> bool:
    return isinstance(obj, tuple) and all(isinstance(v, (int, np.integer)) for v in obj)


def _shift_vector(n: FockVector, power: int) -> FockVector:
    size = len(n)
    p = power % size
    if p == 0:
        return tuple(n)
    return tuple(n[-p:]) + tuple(n[:-p])


def mode_shift(obj: Union[FockVector, BasisState, SparseState], power: int = 1):
    """Apply the cyclic mode shift ``X**power`` (simultaneously on all parties).

    Works on a single Fock vector, a multipartite basis state, or a
    :class:`SparseState`.  No phases are introduced.
    """
    if isinstance(obj, SparseState):
        return SparseState(
            obj.shape, {tuple(_shift_vector(p, power) for p in b): a for b, a in obj.amplitudes.items()}
        )
    if _is_fock_vector(obj):
        return _shift_vector(obj, power)
    return tuple(_shift_vector(p, power) for p in obj)


def clock_label(n: FockVector, modes: int | None = None) -> int:
    """``sum_m m * n_m`` reduced mod M (M defaults to ``len(n)``)."""
    modes = len(n) if modes is None else modes
    return sum(m * v for m, v in enumerate(n)) % modes


def joint_clock_label(basis: BasisState, j: Sequence[int], modes: int | None = None) -> int:
    """j-weighted label ``sum_i j_i * mu(n_i)`` mod M."""
    modes = len(basis[0]) if modes is None else modes
    return sum(ji * clock_label(part, modes) for ji, part in zip(j, basis)) % modes


def apply_phase_shift(state: SparseState, j_powers: Sequence[int]) -> SparseState:
    """Apply ``Z**j_1 (x) ... (x) Z**j_P``."""
    shape = state.shape
    if len(j_powers) != shape.parties:
        raise ValueError(f"need {shape.parties} phase powers, got {len(j_powers)}")
    w = shape.omega
    return SparseState(
        shape,
        {b: a * w ** joint_clock_label(b, j_powers, shape.modes) for b, a in state.amplitudes.items()},
    )


def lambda_power(basis: BasisState, j: Sequence[int], power: int, modes: int) -> tuple[int, BasisState]:
    """Action of ``(Lambda_{j_1} (x) ... (x) Lambda_{j_P})**power`` on a basis state.

    Returns ``(e, image)`` with the operator mapping ``|basis>`` to
    ``omega**e |image>``.
    """
    if power < 0:
        power %= modes
    exponent = 0
    current = basis
    for _ in range(power):
        exponent += joint_clock_label(current, j, modes)
        current = tuple(_shift_vector(p, 1) for p in current)
    return exponent % modes, current


def apply_lambda(state: SparseState, j: Sequence[int], power: int = 1) -> SparseState:
    shape = state.shape
    w = shape.omega
    out = {}
    for b, a in state.amplitudes.items():
        e, image = lambda_power(b, j, power, shape.modes)
        out[image] = a * w**e
    return SparseState(shape, out)


@dataclass(frozen=True)
class XClass:
    """Orbit of a Fock vector (or joint basis state) under the cyclic shift."""

    representative: Union[FockVector, BasisState]
    cardinality: int
    members: tuple

    def __contains__(self, item):
        return item in self.members


def x_class_of(obj: Union[FockVector, BasisState]) -> XClass:
    """Orbit of ``obj`` under ``X`` (or ``X`` on every party at once)."""
    modes = len(obj) if _is_fock_vector(obj) else len(obj[0])
    members = []
    for m in range(modes):
        image = mode_shift(obj, m)
        if image in members:
            break
        members.append(image)
    rep = min(members)
    return XClass(rep, len(members), tuple(members))


def orbit_size(n: FockVector) -> int:
    """Cardinality of the X-orbit of one Fock vector: its smallest cyclic period."""
    size = len(n)
    for p in range(1, size + 1):
        if size % p == 0 and _shift_vector(n, p) == tuple(n):
            return p
    return size  # pragma: no cover


def joint_classes(shape: SystemShape) -> list[XClass]:
    """All joint X-orbits of the subspace, in order of first appearance."""
    seen: set = set()
    out = []
    for b in subspace(shape).states:
        if b in seen:
            continue
        cls = x_class_of(b)
        seen.update(cls.members)
        out.append(cls)
    return out


def allowed_k(cardinality: int, modes: int) -> list[int]:
    """X-eigenphase indices available in an orbit of the given size (0 included)."""
    step = modes // cardinality
    return list(range(0, modes, step))


def build_Ek_state(xclass: XClass, k: int, shape: SystemShape | None = None) -> SparseState:
    """Uniform Fourier superposition of a joint orbit with X-eigenphase ``omega**k``."""
    rep = xclass.representative
    if _is_fock_vector(rep):
        rep = (rep,)
    modes = len(rep[0])
    if shape is None:
        shape = SystemShape(len(rep), modes, tuple(sum(p) for p in rep))
    k %= modes
    if (k * xclass.cardinality) % modes != 0:
        raise ValueError(
            f"k={k} is not a multiple of M/|X| = {modes // xclass.cardinality}; the superposition vanishes"
        )
    w = cmath.exp(2j * math.pi / modes)
    amps: dict = {}
    for m in range(modes):
        image = tuple(_shift_vector(p, m) for p in rep)
        amps[image] = amps.get(image, 0j) + w ** (-k * m)
    scale = math.sqrt(xclass.cardinality) / modes
    return SparseState(shape, {b: a * scale for b, a in amps.items()})


def check_hw_indices(shape: SystemShape, j: Sequence[int]):
    """Raise ``ValueError`` unless ``sum_i j_i N_i == 0 (mod M)``."""
    if len(j) != shape.parties:
        raise ValueError(f"need {shape.parties} HW indices, got {len(j)}")
    total = sum(ji * ni for ji, ni in zip(j, shape.photons))
    if total % shape.modes != 0:
        raise ValueError(
            f"HW indices j={tuple(j)} violate the index condition sum_i j_i N_i = 0 (mod M): "
            f"sum = {total}, M = {shape.modes}"
        )


def check_complementary_set(
    shape: SystemShape,
    j: Sequence[int],
    L: Iterable[int],
    support: Iterable[Sequence[int]],
) -> bool:
    """Whether the measurement labels ``L`` are mutually complementary.

    ``support`` holds per-party orbit cardinalities ``(|X_{n_1}|, ..., |X_{n_P}|)``
    of the basis states carrying non-zero probability.  Every distinct pair
    ``l, l'`` must satisfy ``gcd(j_i (l - l') N_i |X| / M, |X|) == 1`` for every
    party and supported cardinality.  ``gcd(0, x)`` is ``x``.
    """
    labels = sorted(set(int(l) % shape.modes for l in L))
    if len(labels) <= 1:
        return True
    per_party = [set() for _ in range(shape.parties)]
    for cards in support:
        for i, c in enumerate(cards):
            per_party[i].add(int(c))
    for a_idx, l in enumerate(labels):
        for lp in labels[a_idx + 1 :]:
            for i in range(shape.parties):
                for card in per_party[i]:
                    num = j[i] * (l - lp) * shape.photons[i] * card
                    if num % shape.modes:
                        # only reachable for inconsistent support data
                        return False
                    if math.gcd(abs(num // shape.modes), card) != 1:
                        return False
    return True


def support_cardinalities(state: SparseState) -> set[tuple[int, ...]]:
    """Per-party orbit cardinalities of every basis state in the support."""
    return {tuple(orbit_size(p) for p in b) for b in state.amplitudes}


@lru_cache(maxsize=64)
def party_orbit_sizes(shape: SystemShape) -> np.ndarray:
    """(D, P) array of per-party orbit cardinalities over the canonical basis."""
    sub = subspace(shape)
    table = [
        {v: orbit_size(v) for v in enumerate_basis(shape.modes, n)} for n in shape.photons
    ]
    return np.array([[table[i][p] for i, p in enumerate(b)] for b in sub.states], dtype=np.int64).reshape(
        len(sub), shape.parties
    )
