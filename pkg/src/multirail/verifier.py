"""Stabilizer projectors, the GME verifier and its biproducible bound.

For HW indices ``j`` satisfying the index condition, a measurement label set
``L`` and a target symmetry ``(k, kappa)`` the verifier is

    V = (S_Z(kappa) + sum_{l in L} S_Lambda(l, k + kappa l)) / (1 + |L|)

``S_Z(m)`` projects on computational states with j-weighted clock label ``m``;
``S_Lambda(l, m)`` projects on the ``omega**m`` eigenspace of
``Lambda_{j_1 l} (x) ... (x) Lambda_{j_P l}``.  Expectations of the latter are
evaluated from the phase sum over Lambda powers, which only permutes basis
states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .fock import SparseState, SystemShape, subspace
from .symmetry import (
    check_complementary_set,
    check_hw_indices,
    joint_classes,
    joint_clock_label,
    mode_shift,
    orbit_size,
    party_orbit_sizes,
    support_cardinalities,
    x_class_of,
)

DETECTION_MARGIN = 1e-9


@dataclass(frozen=True)
class VerifierSpec:
    """HW indices, measurement labels and the target symmetry ``(k, kappa)``."""

    indices: tuple[int, ...]
    L: tuple[int, ...]
    k: int = 0
    kappa: int = 0

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(v) for v in self.indices))
        labels = []
        for l in self.L:
            if int(l) not in labels:
                labels.append(int(l))
        object.__setattr__(self, "L", tuple(labels))

    def validate(self, shape: SystemShape):
        check_hw_indices(shape, self.indices)
        bad = [l for l in self.L if not 0 <= l < shape.modes]
        if bad:
            raise ValueError(f"measurement labels {bad} must lie in [0, {shape.modes})")


@dataclass
class BoundReport:
    d_expectation: float
    bound: float
    verifier_value: float
    verdict: str
    per_kappa: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "d_expectation": self.d_expectation,
            "bound": self.bound,
            "verifier_value": self.verifier_value,
            "verdict": self.verdict,
            "per_kappa": self.per_kappa,
        }


@lru_cache(maxsize=256)
def _lambda_tables(shape: SystemShape, js: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Images and phase exponents of every power of ``(x)_i Lambda_{js_i}``.

    ``images[p, b]`` is the basis index reached from ``b`` after ``p`` steps and
    ``exps[p, b]`` the accumulated phase exponent, using
    ``Lambda_J**p |n> = omega**(J (p mu + N p (p - 1) / 2)) |X**p n>``.
    """
    sub = subspace(shape)
    modes = shape.modes
    mu = sub.clock_labels
    n_party = np.array(shape.photons, dtype=np.int64)
    jv = np.array(js, dtype=np.int64)
    images = np.empty((modes, len(sub)), dtype=np.int64)
    exps = np.empty((modes, len(sub)), dtype=np.int64)
    current = np.arange(len(sub))
    for p in range(modes):
        images[p] = current
        exps[p] = ((jv * (p * mu + n_party * (p * (p - 1) // 2))).sum(axis=1)) % modes
        current = sub.shift_image[current]
    return images, exps


@lru_cache(maxsize=256)
def _joint_labels(shape: SystemShape, j: tuple[int, ...]) -> np.ndarray:
    sub = subspace(shape)
    return (sub.clock_labels * np.array(j, dtype=np.int64)).sum(axis=1) % shape.modes


def sz_distribution(vec: np.ndarray, shape: SystemShape, j: Sequence[int]) -> np.ndarray:
    """``<S_Z(m)>`` for every ``m`` at once."""
    labels = _joint_labels(shape, tuple(int(v) for v in j))
    return np.bincount(labels, weights=np.abs(vec) ** 2, minlength=shape.modes)


def s_lambda_distribution(vec: np.ndarray, shape: SystemShape, j: Sequence[int], l: int) -> np.ndarray:
    """``<S_Lambda(l, m)>`` for every ``m`` at once."""
    modes = shape.modes
    js = tuple((int(v) * l) % modes for v in j)
    images, exps = _lambda_tables(shape, js)
    w = np.exp(2j * np.pi * exps / modes)
    # <psi| Lambda**p |psi> for p = 0..M-1
    g = np.einsum("pb,pb,b->p", vec[images].conj(), w, vec)
    s = np.fft.fft(g) / modes
    return s.real


def sz_expectation(state: SparseState, indices: Sequence[int], m: int) -> float:
    shape = state.shape
    return float(sz_distribution(state.to_vector(), shape, indices)[m % shape.modes])


def s_lambda_expectation(state: SparseState, indices: Sequence[int], l: int, m: int) -> float:
    """``<S_Lambda(l, m)>`` from the phase sum over powers of the joint Lambda operator."""
    shape = state.shape
    return float(s_lambda_distribution(state.to_vector(), shape, indices, l)[m % shape.modes])


def verifier_values(vec: np.ndarray, shape: SystemShape, indices: Sequence[int], L: Sequence[int], k: int = 0) -> np.ndarray:
    """``<V_{k, kappa}>`` for every ``kappa`` (no validity checks)."""
    modes = shape.modes
    kappas = np.arange(modes)
    total = sz_distribution(vec, shape, indices).copy()
    for l in L:
        s = s_lambda_distribution(vec, shape, indices, l)
        total += s[(k + kappas * l) % modes]
    return total / (1 + len(L))


def _require_complementary(state: SparseState, spec: VerifierSpec):
    spec.validate(state.shape)
    if not check_complementary_set(state.shape, spec.indices, spec.L, support_cardinalities(state)):
        raise ValueError(
            f"measurement labels L={spec.L} are not mutually complementary on the state's support "
            f"(gcd(j_i (l - l') N_i |X| / M, |X|) = 1 fails); the biproducible bound would not hold"
        )


def verifier_expectation(state: SparseState, spec: VerifierSpec) -> float:
    _require_complementary(state, spec)
    values = verifier_values(state.to_vector(), state.shape, spec.indices, spec.L, spec.k)
    return float(values[spec.kappa % state.shape.modes])


def d_expectation(state_or_probs, shape: SystemShape | None = None) -> float:
    """``<D>``: probability-weighted ``1 / min_i |X_{n_i}|`` over the computational basis."""
    if isinstance(state_or_probs, SparseState):
        shape = state_or_probs.shape
        probs = np.abs(state_or_probs.to_vector()) ** 2
    else:
        probs = np.asarray(state_or_probs, dtype=float)
    sizes = party_orbit_sizes(shape).min(axis=1)
    return float((probs / sizes).sum())


def bound_from_d(d: float, n_labels: int) -> float:
    return (1 + d * n_labels) / (1 + n_labels)


def prime_mode_bound(modes: int, n_labels: int) -> float:
    """Closed form of the bound when every orbit has size M (prime M, N_i not multiples of M)."""
    return (modes + n_labels) / (modes * (n_labels + 1))


def verdict(value: float, bound: float) -> str:
    return "GME-detected" if value > bound + DETECTION_MARGIN else "not-detected"


def biproducible_bound(state: SparseState, spec: VerifierSpec) -> BoundReport:
    _require_complementary(state, spec)
    shape = state.shape
    d = d_expectation(state)
    bound = bound_from_d(d, len(spec.L))
    values = verifier_values(state.to_vector(), shape, spec.indices, spec.L, spec.k)
    value = float(values[spec.kappa % shape.modes])
    rows = [
        {"kappa": kappa, "expectation": float(v), "verdict": verdict(float(v), bound)}
        for kappa, v in enumerate(values)
    ]
    return BoundReport(d, bound, value, verdict(value, bound), rows)


def kappa_decomposition(state: SparseState, indices: Sequence[int]) -> np.ndarray:
    """Weights ``|c_{k, kappa}|**2`` as an ``(M, M)`` array indexed ``[k, kappa]``.

    Each weight sums ``|<E_k(X)|psi>|**2`` over joint orbits ``X`` whose
    j-weighted clock label is ``kappa``.
    """
    shape = state.shape
    check_hw_indices(shape, indices)
    modes = shape.modes
    vec = state.to_vector()
    sub = subspace(shape)
    out = np.zeros((modes, modes))
    m = np.arange(modes)
    for cls in joint_classes(shape):
        kappa = joint_clock_label(cls.representative, indices, modes)
        orbit = [sub.index[b] for b in _orbit_sequence(cls.representative, modes)]
        amps = vec[orbit]
        for k in range(0, modes, modes // cls.cardinality):
            phases = np.exp(2j * np.pi * k * m / modes)
            overlap = math.sqrt(cls.cardinality) / modes * np.sum(phases * amps)
            out[k, kappa] += abs(overlap) ** 2
    return out


def _orbit_sequence(rep, modes):
    return [mode_shift(rep, p) for p in range(modes)]


def local_class_components(state: SparseState) -> list[tuple[float, SparseState]]:
    """Split a state over products of per-party X-orbits.

    Returns ``(probability, normalized component)`` pairs, one per product
    ``span(X_1) (x) ... (x) span(X_P)`` carrying weight.
    """
    groups: dict = {}
    for b, a in state.amplitudes.items():
        key = tuple(x_class_of(p).representative for p in b)
        groups.setdefault(key, {})[b] = a
    out = []
    for key in sorted(groups):
        comp = SparseState(state.shape, groups[key])
        nrm = comp.norm()
        out.append((nrm**2, comp.normalized()))
    return out


def min_orbit_size(basis) -> int:
    return min(orbit_size(p) for p in basis)
