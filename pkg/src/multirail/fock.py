"""Fock-basis combinatorics and sparse multipartite state vectors.

A party's occupation pattern is a plain tuple of ints (a "Fock vector"), and a
multipartite basis state is a tuple of such tuples, one per party.  States live
in the subspace of fixed local photon numbers ``(N_1, ..., N_P)``.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

FockVector = tuple[int, ...]
BasisState = tuple[FockVector, ...]

PRUNE_THRESHOLD = 1e-14
NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SystemShape:
    """P parties of M modes each, with fixed local photon numbers."""

    parties: int
    modes: int
    photons: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "photons", tuple(int(n) for n in self.photons))
        if self.parties < 1:
            raise ValueError(f"need at least one party, got {self.parties}")
        if self.modes < 2:
            raise ValueError(f"need at least two modes per party, got {self.modes}")
        if len(self.photons) != self.parties:
            raise ValueError(
                f"photons has {len(self.photons)} entries but there are {self.parties} parties"
            )
        if any(n < 0 for n in self.photons):
            raise ValueError(f"photon numbers must be non-negative, got {self.photons}")

    @property
    def total_photons(self) -> int:
        return sum(self.photons)

    @property
    def omega(self) -> complex:
        """Primitive M-th root of unity exp(2 pi i / M)."""
        return cmath.exp(2j * math.pi / self.modes)

    @property
    def dimension(self) -> int:
        return math.prod(math.comb(n + self.modes - 1, self.modes - 1) for n in self.photons)

    def contains(self, basis: BasisState) -> bool:
        return (
            len(basis) == self.parties
            and all(len(part) == self.modes for part in basis)
            and all(sum(part) == n for part, n in zip(basis, self.photons))
        )


def enumerate_basis(modes: int, photons: int) -> list[FockVector]:
    """All occupation tuples of ``modes`` modes holding ``photons`` photons.

    Ordered lexicographically descending, so ``(1, 0)`` precedes ``(0, 1)``.
    """
    return list(_enumerate_basis(modes, photons))


@lru_cache(maxsize=None)
def _enumerate_basis(modes: int, photons: int) -> tuple[FockVector, ...]:
    if modes < 1 or photons < 0:
        raise ValueError(f"invalid subspace: modes={modes}, photons={photons}")
    if modes == 1:
        return ((photons,),)
    out = []
    for first in range(photons, -1, -1):
        for rest in _enumerate_basis(modes - 1, photons - first):
            out.append((first,) + rest)
    return tuple(out)


def factorial_product(n: Sequence[int]) -> int:
    """Exact product of factorials ``prod_m n_m!``."""
    if any(v < 0 for v in n):
        raise ValueError(f"occupations must be non-negative, got {tuple(n)}")
    return math.prod(math.factorial(v) for v in n)


def total_vector(basis: BasisState) -> FockVector:
    """Mode-wise sum of the parties' occupations (the pre-splitter pattern)."""
    return tuple(sum(col) for col in zip(*basis))


def multinomial(basis: BasisState) -> int:
    """Exact ratio ``n_tot! / (n_1! ... n_P!)`` with vector factorials.

    Each factor ``v!`` of a Fock vector means the product of its entries'
    factorials; the ratio is always an integer.
    """
    num = factorial_product(total_vector(basis))
    den = math.prod(factorial_product(part) for part in basis)
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def as_float(value: int) -> float:
    """Convert an exact combinatorial integer to float, refusing silent overflow."""
    try:
        out = float(value)
    except OverflowError as exc:
        raise OverflowError(f"combinatorial factor {value} exceeds float range") from exc
    return out


class Subspace:
    """Canonically ordered basis of a :class:`SystemShape` with index lookup.

    Joint basis order is the Cartesian product of each party's canonical
    order, first party slowest.  Instances are cached per shape; use
    :func:`subspace`.
    """

    def __init__(self, shape: SystemShape):
        self.shape = shape
        self.party_bases = [enumerate_basis(shape.modes, n) for n in shape.photons]
        self.party_dims = tuple(len(b) for b in self.party_bases)
        self.states: list[BasisState] = list(product(*self.party_bases))
        self.index = {b: i for i, b in enumerate(self.states)}

    def __len__(self):
        return len(self.states)

    @cached_property
    def party_indices(self) -> np.ndarray:
        """(D, P) array of each basis state's per-party index."""
        return np.array(list(np.ndindex(*self.party_dims)), dtype=np.int64).reshape(
            len(self.states), self.shape.parties
        )

    @cached_property
    def occupations(self) -> np.ndarray:
        """(D, P, M) integer occupation array."""
        return np.array(self.states, dtype=np.int64).reshape(
            len(self.states), self.shape.parties, self.shape.modes
        )

    @cached_property
    def total_occupations(self) -> np.ndarray:
        """(D, M) pre-splitter occupation patterns."""
        return self.occupations.sum(axis=1)

    @cached_property
    def clock_labels(self) -> np.ndarray:
        """(D, P) per-party values of sum_m m * n_m, reduced mod M."""
        m = np.arange(self.shape.modes)
        return (self.occupations * m).sum(axis=2) % self.shape.modes

    @cached_property
    def shift_image(self) -> np.ndarray:
        """Index of the simultaneous one-step cyclic mode shift of each state."""
        shifted = np.roll(self.occupations, 1, axis=2)
        return np.array(
            [self.index[tuple(map(tuple, s))] for s in shifted.tolist()], dtype=np.int64
        )

    @cached_property
    def multinomials(self) -> np.ndarray:
        return np.array([as_float(multinomial(b)) for b in self.states])

    @cached_property
    def inv_sqrt_factorials(self) -> np.ndarray:
        """1 / sqrt(prod_i n_i!) for every basis state."""
        return np.array(
            [1.0 / math.sqrt(as_float(math.prod(factorial_product(p) for p in b))) for b in self.states]
        )


@lru_cache(maxsize=64)
def subspace(shape: SystemShape) -> Subspace:
    return Subspace(shape)


class SparseState:
    """Complex amplitudes over the fixed-photon-number basis of ``shape``.

    Immutable once built.  Amplitudes with modulus below ``1e-14`` are dropped.
    """

    __slots__ = ("shape", "_amps")

    def __init__(self, shape: SystemShape, amplitudes: Mapping[BasisState, complex]):
        clean = {}
        for basis, amp in amplitudes.items():
            basis = tuple(tuple(int(v) for v in part) for part in basis)
            if not shape.contains(basis):
                raise ValueError(f"basis state {basis} does not match shape {shape}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[basis] = clean.get(basis, 0j) + amp
        self.shape = shape
        self._amps = MappingProxyType(clean)

    @property
    def amplitudes(self) -> Mapping[BasisState, complex]:
        return self._amps

    def __len__(self):
        return len(self._amps)

    def __repr__(self):
        return f"SparseState({self.shape}, {len(self)} amplitudes)"

    def __getitem__(self, basis: BasisState) -> complex:
        return self._amps.get(basis, 0j)

    @property
    def is_empty(self) -> bool:
        return not self._amps

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def normalized(self) -> SparseState:
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero state")
        return SparseState(self.shape, {b: a / nrm for b, a in self._amps.items()})

    def is_normalized(self, tol: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def probabilities(self) -> dict[BasisState, float]:
        return {b: abs(a) ** 2 for b, a in self.sorted_items()}

    def sorted_items(self) -> list[tuple[BasisState, complex]]:
        """Items in canonical basis order."""
        index = subspace(self.shape).index
        return sorted(self._amps.items(), key=lambda kv: index[kv[0]])

    def to_vector(self) -> np.ndarray:
        sub = subspace(self.shape)
        vec = np.zeros(len(sub), dtype=complex)
        for b, a in self._amps.items():
            vec[sub.index[b]] = a
        return vec

    @classmethod
    def from_vector(cls, shape: SystemShape, vector: np.ndarray) -> SparseState:
        sub = subspace(shape)
        vector = np.asarray(vector)
        if vector.shape != (len(sub),):
            raise ValueError(f"vector of length {vector.shape} does not match dimension {len(sub)}")
        nz = np.flatnonzero(np.abs(vector) >= PRUNE_THRESHOLD)
        return cls(shape, {sub.states[i]: vector[i] for i in nz})

    @classmethod
    def basis(cls, shape: SystemShape, basis: BasisState) -> SparseState:
        return cls(shape, {basis: 1.0})

    def to_json(self) -> dict:
        return {
            "parties": self.shape.parties,
            "modes": self.shape.modes,
            "photons": list(self.shape.photons),
            "amplitudes": [
                {"basis": [list(p) for p in b], "re": a.real, "im": a.imag}
                for b, a in self.sorted_items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> SparseState:
        try:
            shape = SystemShape(int(data["parties"]), int(data["modes"]), tuple(data["photons"]))
            amps = {
                tuple(tuple(p) for p in e["basis"]): complex(float(e["re"]), float(e["im"]))
                for e in data["amplitudes"]
            }
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed state document: {exc}") from exc
        return cls(shape, amps)

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> SparseState:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValueError(f"cannot read state file {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"state file {path} is not valid JSON: {exc}") from exc
        return cls.from_json(data)


def inner_product(a: SparseState, b: SparseState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for basis in small.amplitudes:
        total += a[basis].conjugate() * b[basis]
    return total


def norm(state: SparseState) -> float:
    return math.sqrt(max(inner_product(state, state).real, 0.0))


def random_state(shape: SystemShape, rng: np.random.Generator) -> SparseState:
    """Haar-like random normalized state over the full subspace."""
    dim = len(subspace(shape))
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return SparseState.from_vector(shape, vec / np.linalg.norm(vec))


def states_close(a: SparseState, b: SparseState, tol: float = 1e-10, up_to_phase: bool = False) -> bool:
    if a.shape != b.shape:
        return False
    va, vb = a.to_vector(), b.to_vector()
    if up_to_phase:
        overlap = np.vdot(va, vb)
        if abs(overlap) > 0:
            vb = vb * (abs(overlap) / overlap)
    return bool(np.max(np.abs(va - vb), initial=0.0) <= tol)
