"""Uniform photon loss on the source modes, as a mixture over lost-photon patterns.

Every source mode meets a beam splitter that reflects a photon into an
inaccessible environment mode with probability ``epsilon``.  Losses commute
to the input side, so the postselected state is a mixture over the lost
pattern ``nu`` (one entry per source mode) of pure conditional states.

For source amplitudes ``c(n)``, losing ``nu_m`` photons out of ``t_m + nu_m``
in mode ``m`` contributes the binomial branch amplitude

    c(t_m + nu_m) sqrt(binom(t_m + nu_m, nu_m)) (1 - eps)**(t_m / 2) eps**(nu_m / 2)

before the splitter; the splitter and postselection then act as in the
lossless case.  The weight of a pattern is the squared norm of its branch,
divided by the total postselection probability summed over every pattern.
That total only needs the thinned photon-number distribution of one source,
``q(t) = sum_nu |c(t + nu)|**2 binom(t + nu, nu) (1 - eps)**t eps**nu``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import comb

from .fock import FockVector, SparseState, SystemShape, enumerate_basis, subspace
from .sources import (
    SourceSpec,
    _ordered_map,
    evaluate_vector,
    hermite_table,
    source_amplitudes,
    squeezed_params,
)
from .symmetry import check_hw_indices

RETAINED_WARNING = 0.5
TAIL_TOLERANCE = 1e-16
MAX_SOURCE_PHOTONS = 400


@dataclass(frozen=True)
class LossChannel:
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"loss rate must lie in [0, 1), got {self.epsilon}")


@dataclass
class LossComponent:
    """Conditional pure state given ``nu_tot`` photons lost from the source modes."""

    nu_tot: FockVector
    probability: float
    state: SparseState


@dataclass
class LossyResult:
    """Verifier values of a cutoff loss mixture.

    ``per_kappa`` is renormalized over the retained components; ``per_kappa_raw``
    is the plain convex sum with the original weights.
    """

    value: float
    per_kappa: list[float]
    per_kappa_raw: list[float]
    retained_probability: float
    bound: float
    warnings: list[str] = field(default_factory=list)


def loss_patterns(modes: int, cutoff: int) -> list[FockVector]:
    """All lost-photon patterns with at most ``cutoff`` photons, fewest first."""
    out = []
    for total in range(cutoff + 1):
        out.extend(enumerate_basis(modes, total))
    return out


def _source_series(spec: SourceSpec, minimum: int) -> np.ndarray:
    """Source amplitudes long enough that the neglected tail is below ``TAIL_TOLERANCE``."""
    if spec.kind in ("single_photon", "fock"):
        return source_amplitudes(spec, max(minimum, spec.nu))
    n = max(minimum, 16)
    while True:
        c = source_amplitudes(spec, n)
        tail = 1.0 - float(np.sum(np.abs(c) ** 2))
        if tail < TAIL_TOLERANCE or n >= MAX_SOURCE_PHOTONS:
            return c
        n *= 2


def thinned_distribution(c: np.ndarray, epsilon: float, tmax: int) -> np.ndarray:
    """Photon-number distribution ``q(0) ... q(tmax)`` of one source after loss."""
    weights = np.abs(c) ** 2
    q = np.zeros(tmax + 1)
    total = len(c) - 1
    for t in range(tmax + 1):
        nu = np.arange(0, total - t + 1)
        q[t] = np.sum(weights[t + nu] * comb(t + nu, nu) * (1 - epsilon) ** t * epsilon**nu)
    return q


def _branch_factors(c: np.ndarray, epsilon: float, nmax: int, numax: int) -> np.ndarray:
    """``f[t, nu] = c(t + nu) sqrt(binom(t + nu, nu)) (1 - eps)**(t/2) eps**(nu/2)``."""
    f = np.zeros((nmax + 1, numax + 1), dtype=complex)
    for t in range(nmax + 1):
        for nu in range(numax + 1):
            if t + nu < len(c):
                f[t, nu] = (
                    c[t + nu]
                    * math.sqrt(math.comb(t + nu, nu))
                    * math.sqrt(1 - epsilon) ** t
                    * math.sqrt(epsilon) ** nu
                )
    return f


def _postselection_total(shape: SystemShape, c: np.ndarray, epsilon: float) -> float:
    sub = subspace(shape)
    q = thinned_distribution(c, epsilon, shape.total_photons)
    t = sub.total_occupations
    return float(np.sum(np.prod(q[t], axis=1) * sub.multinomials) / shape.parties**shape.total_photons)


def _component_amplitudes(shape: SystemShape, c: np.ndarray, epsilon: float, patterns) -> np.ndarray:
    """(len(patterns), D) unnormalized branch amplitudes."""
    sub = subspace(shape)
    numax = max((max(p) for p in patterns), default=0)
    f = _branch_factors(c, epsilon, shape.total_photons, numax)
    t = sub.total_occupations  # (D, M)
    nus = np.array(patterns, dtype=np.int64)  # (C, M)
    amps = np.prod(f[t[None, :, :], nus[:, None, :]], axis=2)  # (C, D)
    return amps * np.sqrt(sub.multinomials) / math.sqrt(shape.parties**shape.total_photons)


def _check_source(spec: SourceSpec):
    if spec.kind not in ("squeezed", "coherent"):
        raise ValueError(
            "loss mixtures apply to squeezed or coherent sources; postselecting Fock-state "
            "inputs on the full photon number already excludes loss events"
        )


def pattern_probabilities(
    shape: SystemShape, spec: SourceSpec, channel: LossChannel, patterns: Sequence[FockVector]
) -> tuple[np.ndarray, np.ndarray]:
    """Conditional probabilities of the given loss patterns and their branch amplitudes.

    Returns ``(probabilities, amplitudes)`` where ``amplitudes[c]`` is the
    unnormalized postselected branch of pattern ``c``.
    """
    _check_source(spec)
    eps = channel.epsilon
    numax = max((sum(p) for p in patterns), default=0)
    c = _source_series(spec, shape.total_photons + numax)
    total = _postselection_total(shape, c, eps)
    amps = _component_amplitudes(shape, c, eps, patterns)
    weights = np.einsum("cd,cd->c", amps.conj(), amps).real
    if total == 0.0:
        return np.zeros(len(patterns)), amps
    return weights / total, amps


def lossy_mixture(
    shape: SystemShape, spec: SourceSpec, channel: LossChannel, cutoff: int = 3
) -> list[LossComponent]:
    """Components with at most ``cutoff`` lost photons, in canonical pattern order.

    Probabilities are conditional on the postselection and exact (they sum to
    one only without a cutoff).  A retained total below 0.5 raises a warning.
    """
    _check_source(spec)
    if cutoff < 0:
        raise ValueError(f"cutoff must be non-negative, got {cutoff}")
    if channel.epsilon == 0.0:
        cutoff = 0
    patterns = loss_patterns(shape.modes, cutoff)
    probs, amps = pattern_probabilities(shape, spec, channel, patterns)
    out = []
    for nu, p, amp in zip(patterns, probs, amps):
        if p <= 0.0:
            continue
        state = SparseState.from_vector(shape, amp / np.linalg.norm(amp))
        out.append(LossComponent(nu, float(p), state))
    retained = sum(comp.probability for comp in out)
    if out and retained < RETAINED_WARNING:
        warnings.warn(f"loss cutoff {cutoff} retains only {retained:.3f} of the probability", stacklevel=2)
    return out


def lossy_verifier_expectation(
    components: Sequence[LossComponent], indices: Sequence[int], L: Sequence[int], k: int = 0, kappa: int = 0
) -> LossyResult:
    """Convex combination of the components' verifier values, for every kappa."""
    if not components:
        raise ValueError("no loss components to evaluate")
    shape = components[0].state.shape
    check_hw_indices(shape, indices)
    weights = np.array([comp.probability for comp in components])
    values = []
    bounds = []
    for comp in components:
        v, b = evaluate_vector(comp.state.to_vector(), shape, indices, L, k)
        values.append(v)
        bounds.append(b)
    values = np.array(values)
    retained = float(weights.sum())
    raw = weights @ values
    renorm = raw / retained
    bound = float(weights @ np.array(bounds)) / retained
    notes = []
    if retained < RETAINED_WARNING:
        notes.append(f"retained probability {retained:.3f} is below {RETAINED_WARNING}")
    return LossyResult(
        float(renorm[kappa % shape.modes]), renorm.tolist(), raw.tolist(), retained, bound, notes
    )


@dataclass(frozen=True)
class LossSweepRow:
    x: float
    kappa: int
    epsilon: float
    expectation: float
    bound: float
    retained_probability: float


@lru_cache(maxsize=8)
def _pattern_table(modes: int, cutoff: int) -> tuple[FockVector, ...]:
    return tuple(loss_patterns(modes, cutoff))


def component_values(shape: SystemShape, r: float, x: float, patterns, indices, L, k: int = 0):
    """Verifier values and bounds of each loss component's conditional state.

    For squeezed input the conditional state of pattern ``nu`` has amplitudes
    ``prod_m He_{t_m + nu_m}(2 zeta x) / sqrt(prod_i n_i!)``; it does not depend
    on the loss rate.
    """
    sub = subspace(shape)
    y = 2.0 * squeezed_params(r).zeta * x
    nus = np.array(patterns, dtype=np.int64)
    table = hermite_table(shape.total_photons + int(nus.max(initial=0)), y)
    amps = np.prod(table[sub.total_occupations[None, :, :] + nus[:, None, :]], axis=2)
    amps = amps * sub.inv_sqrt_factorials
    values, bounds = [], []
    for amp in amps:
        nrm = np.linalg.norm(amp)
        if nrm == 0.0:
            values.append(np.full(shape.modes, np.nan))
            bounds.append(np.nan)
            continue
        v, b = evaluate_vector(amp / nrm, shape, indices, L, k)
        values.append(v)
        bounds.append(b)
    return np.array(values), np.array(bounds)


def sweep_lossy(
    shape: SystemShape,
    r: float,
    x_grid: Sequence[float],
    epsilons: Sequence[float],
    indices: Sequence[int],
    L: Sequence[int],
    cutoff: int = 3,
    k: int = 0,
    threads: int | None = None,
) -> list[LossSweepRow]:
    """Loss-averaged verifier values over a displacement grid and several loss rates.

    Rows are ordered by x, then epsilon (as given), then kappa.  Reported
    expectations are renormalized over the retained patterns.
    """
    check_hw_indices(shape, indices)
    for eps in epsilons:
        LossChannel(eps)
    xs = [float(x) for x in x_grid]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("displacement grid must be sorted ascending")
    patterns = _pattern_table(shape.modes, cutoff)

    def point(x):
        spec = SourceSpec.squeezed(r, x)
        values, bounds = component_values(shape, r, x, patterns, indices, L, k)
        rows = []
        for eps in epsilons:
            w, _ = pattern_probabilities(shape, spec, LossChannel(eps), patterns)
            keep = w > 0
            retained = float(w.sum())
            mix = w[keep] @ values[keep] / retained
            bound = float(w[keep] @ bounds[keep]) / retained
            rows.extend(LossSweepRow(x, kappa, eps, float(v), bound, retained) for kappa, v in enumerate(mix))
        return rows

    return _ordered_map(point, xs, threads)
