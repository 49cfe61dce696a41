"""Slow, independent reference implementations used only by the tests."""

import itertools
import math

import numpy as np

from multirail.fock import SparseState, SystemShape


def brute_permanent(a):
    a = np.asarray(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    return sum(np.prod([a[i, s[i]] for i in range(n)]) for s in itertools.permutations(range(n)))


def create(state, coeffs, limits=None):
    """Apply the creation operator ``sum_v coeffs[v] a_v^dag`` to a dict state.

    Keys are occupation tuples over all modes.  Entries whose occupations
    exceed ``limits`` are dropped (creation never lowers them again).
    """
    out = {}
    for occ, amp in state.items():
        for v, c in enumerate(coeffs):
            if c == 0:
                continue
            new = list(occ)
            new[v] += 1
            if limits is not None and new[v] > limits[v]:
                continue
            key = tuple(new)
            out[key] = out.get(key, 0) + amp * c * math.sqrt(new[v])
    return out


def expand_unitary(u, occupation):
    """``U`` acting on one Fock vector through ``a_m^dag -> sum_m' U[m', m] a_m'^dag``."""
    modes = len(occupation)
    state = {(0,) * modes: 1.0 + 0j}
    for m, count in enumerate(occupation):
        for _ in range(count):
            state = create(state, u[:, m])
        state = {k: v / math.sqrt(math.factorial(count)) for k, v in state.items()}
    return {k: v for k, v in state.items() if abs(v) > 1e-15}


def apply_unitary_oracle(state: SparseState, party: int, u) -> SparseState:
    out = {}
    for basis, amp in state.amplitudes.items():
        for occ, c in expand_unitary(u, basis[party]).items():
            key = basis[:party] + (occ,) + basis[party + 1 :]
            out[key] = out.get(key, 0) + amp * c
    return SparseState(state.shape, out)


def environment_loss_oracle(shape: SystemShape, c, epsilon):
    """Explicit-environment model of lossy generation.

    Source mode ``m`` holds ``sum_n c[n] (a_m^dag)**n / sqrt(n!) |0>`` and
    ``a_m^dag -> sqrt(1 - eps) / sqrt(P) sum_i a_{i,m}^dag + sqrt(eps) e_m^dag``.
    Returns ``{nu: (probability, normalized vector)}`` conditional on the
    local photon numbers, with ``nu`` the environment occupations.
    """
    P, M = shape.parties, shape.modes
    coeffs = [math.sqrt(1 - epsilon) / math.sqrt(P)] * P + [math.sqrt(epsilon)]
    limits = list(shape.photons) + [len(c)]
    per_mode = {}
    power = {(0,) * (P + 1): 1.0 + 0j}
    for n, cn in enumerate(c):
        if n:
            power = create(power, coeffs, limits)
        for occ, amp in power.items():
            per_mode[occ] = per_mode.get(occ, 0) + cn * amp / math.sqrt(math.factorial(n))
    items = list(per_mode.items())
    branches = {}
    for combo in itertools.product(items, repeat=M):
        counts = [sum(occ[i] for occ, _ in combo) for i in range(P)]
        if tuple(counts) != tuple(shape.photons):
            continue
        nu = tuple(occ[P] for occ, _ in combo)
        basis = tuple(tuple(occ[i] for occ, _ in combo) for i in range(P))
        amp = np.prod([a for _, a in combo])
        branches.setdefault(nu, {})
        branches[nu][basis] = branches[nu].get(basis, 0) + amp
    weights = {nu: sum(abs(a) ** 2 for a in b.values()) for nu, b in branches.items()}
    total = sum(weights.values())
    out = {}
    for nu, b in branches.items():
        vec = SparseState(shape, b).to_vector()
        if not np.any(vec):
            continue
        out[nu] = (weights[nu] / total, vec / np.linalg.norm(vec))
    return out
