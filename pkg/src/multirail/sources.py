"""Multi-rail state generation from M identical single-mode sources.

Each of the M sources feeds one P-output splitter that sends mode ``m`` to
the uniform superposition ``(a_{1,m} + ... + a_{P,m}) / sqrt(P)``.
Postselecting on the local photon numbers ``(N_1, ..., N_P)`` leaves

    |Phi> ~ sum_n c(n_tot) sqrt(n_tot! / (n_1! ... n_P!)) / sqrt(P**N_tot) |n_1, ..., n_P>

with ``c(v) = prod_m c(v_m)`` the product of the per-source photon-number
amplitudes and ``n_tot`` the mode-wise sum over parties.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fock import SparseState, SystemShape, subspace
from .symmetry import check_complementary_set, check_hw_indices, party_orbit_sizes
from .verifier import bound_from_d, verifier_values


@dataclass(frozen=True)
class SourceSpec:
    """One copy of the single-mode input fed to every splitter."""

    kind: str
    nu: int = 1
    alpha: complex = 0j
    r: float = 0.0
    x: float = 0.0

    def __post_init__(self):
        if self.kind not in ("single_photon", "fock", "coherent", "squeezed"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "fock" and self.nu < 1:
            raise ValueError(f"Fock source needs at least one photon, got nu={self.nu}")
        if self.kind == "squeezed" and not self.r > 0:
            raise ValueError(
                f"squeezed source needs r > 0 (got r={self.r}); "
                "use a coherent source for the unsqueezed limit"
            )

    @classmethod
    def single_photon(cls) -> SourceSpec:
        return cls("single_photon", nu=1)

    @classmethod
    def fock(cls, nu: int) -> SourceSpec:
        return cls("fock", nu=int(nu))

    @classmethod
    def coherent(cls, alpha: complex) -> SourceSpec:
        return cls("coherent", alpha=complex(alpha))

    @classmethod
    def squeezed(cls, r: float, x: float = 0.0) -> SourceSpec:
        return cls("squeezed", r=float(r), x=float(x))

    def with_x(self, x: float) -> SourceSpec:
        return SourceSpec(self.kind, self.nu, self.alpha, self.r, float(x))


@dataclass(frozen=True)
class SqueezedParams:
    gamma: float
    zeta: float


def squeezed_params(r: float) -> SqueezedParams:
    """``gamma = tanh(r)`` and the displacement scale ``zeta = 1 / sqrt(1 - exp(-4 r))``."""
    if not r > 0:
        raise ValueError(f"squeezing factor must be positive, got {r}")
    return SqueezedParams(math.tanh(r), 1.0 / math.sqrt(-math.expm1(-4.0 * r)))


def db_to_r(db: float) -> float:
    """Squeezing in decibels to the squeezing factor r."""
    return db * math.log(10.0) / 20.0


def hermite(n: int, x: float) -> float:
    """Probabilists' Hermite polynomial ``He_n(x)`` by upward recurrence."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    prev, cur = 1.0, x
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur


def hermite_table(nmax: int, x) -> np.ndarray:
    """``He_0(x) ... He_nmax(x)`` stacked along the first axis (``x`` may be an array)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(1, nmax):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def _squeezed_amplitudes(r: float, x: float, cutoff: int) -> np.ndarray:
    p = squeezed_params(r)
    y = 2.0 * p.zeta * x
    # g_n = sqrt(gamma**n / n!) He_n(y), built directly to avoid overflow
    g = np.empty(cutoff + 1)
    g[0] = 1.0
    if cutoff >= 1:
        g[1] = math.sqrt(p.gamma) * y
    for n in range(1, cutoff):
        g[n + 1] = math.sqrt(p.gamma / (n + 1)) * (y * g[n] - math.sqrt(n * p.gamma) * g[n - 1])
    pref = (1.0 - p.gamma**2) ** 0.25 * math.exp(-2.0 * p.gamma * (p.zeta * x) ** 2 / (1.0 + p.gamma))
    return pref * g


def source_amplitudes(spec: SourceSpec, cutoff: int) -> np.ndarray:
    """Photon-number amplitudes ``c(0) ... c(cutoff)`` of one source copy."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be non-negative, got {cutoff}")
    out = np.zeros(cutoff + 1, dtype=complex)
    if spec.kind in ("single_photon", "fock"):
        if spec.nu <= cutoff:
            out[spec.nu] = 1.0
    elif spec.kind == "coherent":
        a = spec.alpha
        out[0] = cmath.exp(-abs(a) ** 2 / 2)
        for n in range(1, cutoff + 1):
            out[n] = out[n - 1] * a / math.sqrt(n)
    else:
        out[:] = _squeezed_amplitudes(spec.r, spec.x, cutoff)
    return out


@dataclass
class GenerationResult:
    """Postselected state with its success probability.

    ``normalization`` is the squared norm of the unnormalized amplitudes in the
    reduced form used for the source (Hermite products for squeezed input,
    the postselection probability otherwise).  An impossible photon pattern
    gives ``postselect_probability == 0`` and an empty ``state``.
    """

    state: SparseState
    postselect_probability: float
    normalization: float

    @property
    def is_empty(self) -> bool:
        return self.postselect_probability == 0.0


def postselected_amplitudes(shape: SystemShape, c: np.ndarray) -> np.ndarray:
    """Unnormalized postselected amplitudes (squared norm = success probability)."""
    sub = subspace(shape)
    t = sub.total_occupations
    cprod = np.prod(c[t], axis=1)
    return cprod * np.sqrt(sub.multinomials) / math.sqrt(shape.parties**shape.total_photons)


def squeezed_state_vector(shape: SystemShape, y) -> tuple[np.ndarray, np.ndarray]:
    """Normalized squeezed-input states for one or many Hermite arguments ``y = 2 zeta x``.

    Amplitudes are ``prod_m He_{n_tot,m}(y) / sqrt(prod_i n_i!)``.  Returns the
    state vectors (last axis = basis) and their squared norms before
    normalization.
    """
    sub = subspace(shape)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    table = hermite_table(shape.total_photons, y)  # (N+1, G)
    t = sub.total_occupations  # (D, M)
    amps = np.prod(table[t], axis=1).T * sub.inv_sqrt_factorials  # (G, D)
    norms = np.einsum("gd,gd->g", amps, amps)
    return amps / np.sqrt(norms)[:, None], norms


def generate_postselected(shape: SystemShape, spec: SourceSpec) -> GenerationResult:
    c = source_amplitudes(spec, shape.total_photons)
    amps = postselected_amplitudes(shape, c)
    p = float(np.vdot(amps, amps).real)
    if p == 0.0:
        return GenerationResult(SparseState(shape, {}), 0.0, 0.0)
    if spec.kind == "squeezed":
        zeta = squeezed_params(spec.r).zeta
        vec, norms = squeezed_state_vector(shape, 2.0 * zeta * spec.x)
        state = SparseState.from_vector(shape, vec[0])
        normalization = float(norms[0])
    else:
        state = SparseState.from_vector(shape, amps / math.sqrt(p))
        normalization = p
    return GenerationResult(state, min(p, 1.0), normalization)


@dataclass(frozen=True)
class SweepRow:
    x: float
    kappa: int
    expectation: float
    bound: float


def support_of(vec: np.ndarray, shape: SystemShape) -> set[tuple[int, ...]]:
    sizes = party_orbit_sizes(shape)
    return {tuple(row) for row in sizes[np.abs(vec) ** 2 > 0].tolist()}


def evaluate_vector(vec: np.ndarray, shape: SystemShape, indices, L, k: int = 0) -> tuple[np.ndarray, float]:
    """Verifier values over all kappa and the adaptive biproducible bound for one state."""
    if not check_complementary_set(shape, indices, L, support_of(vec, shape)):
        raise ValueError(f"measurement labels L={tuple(L)} are not mutually complementary on this state")
    probs = np.abs(vec) ** 2
    d = float((probs / party_orbit_sizes(shape).min(axis=1)).sum())
    return verifier_values(vec, shape, indices, L, k), bound_from_d(d, len(L))


def sweep_displacement(
    shape: SystemShape,
    r: float,
    x_grid: Sequence[float],
    indices: Sequence[int],
    L: Sequence[int],
    k: int = 0,
    threads: int | None = None,
) -> list[SweepRow]:
    """Verifier expectations for every kappa along a displacement grid.

    The squeezing only enters through ``zeta(r)``, which rescales ``x``.
    Rows come out in grid order, kappa ascending.
    """
    check_hw_indices(shape, indices)
    xs = [float(x) for x in x_grid]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("displacement grid must be sorted ascending")
    zeta = squeezed_params(r).zeta

    def point(x):
        vec, _ = squeezed_state_vector(shape, 2.0 * zeta * x)
        values, bound = evaluate_vector(vec[0], shape, indices, L, k)
        return [SweepRow(x, kappa, float(v), bound) for kappa, v in enumerate(values)]

    return _ordered_map(point, xs, threads)


def _ordered_map(fn, items: Iterable, threads: int | None):
    items = list(items)
    if threads is None or threads <= 1 or len(items) < 2:
        chunks = [fn(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(fn, items))
    return [row for chunk in chunks for row in chunk]
