"""Reference values computed independently of the package under test.

Each oracle takes a different route from the implementation: scipy
entropies instead of hand-written logs, singular values instead of
eigenvalues, explicit projector expectations instead of vector slicing.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize, special, stats


def phi(z: float) -> float:
    return float((special.xlogy(1 + z, 1 + z) + special.xlogy(1 - z, 1 - z)) / math.log(2))


def h2(p: float) -> float:
    return float(stats.entropy([p, 1 - p], base=2))


def eve_error(d: float) -> float:
    return 0.5 - math.sqrt(d * (1 - d))


def raw_key_rate(d: float) -> float:
    return h2(eve_error(d)) - h2(d)


def threshold_root(lo: float = 0.1, hi: float = 0.2) -> float:
    return optimize.brentq(raw_key_rate, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def trace_distance(rho0: np.ndarray, rho1: np.ndarray) -> float:
    return 0.5 * float(np.linalg.svd(rho0 - rho1, compute_uv=False).sum())


def helstrom_from_overlap(overlap: complex) -> float:
    return 0.5 * (1 + math.sqrt(1 - abs(overlap) ** 2))


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def partial_trace_first_qubit(state: np.ndarray) -> np.ndarray:
    """``Tr_A |s><s|`` for an 8-vector with the qubit most significant."""
    rho = np.outer(state, state.conj()).reshape(2, 4, 2, 4)
    return np.einsum("aiaj->ij", rho)


def optimal_x_state_product_form(d_xy: float, d_uv: float) -> np.ndarray:
    """``(sqrt(1-D)|00> + sqrt(D)|11>) x (D+|0> + D-|1>)`` with explicit entries."""
    ab = np.array([math.sqrt(1 - d_xy), 0, 0, math.sqrt(d_xy)])
    plus = (math.sqrt(1 - d_uv) + math.sqrt(d_uv)) / math.sqrt(2)
    minus = (math.sqrt(1 - d_uv) - math.sqrt(d_uv)) / math.sqrt(2)
    return np.kron(ab, np.array([plus, minus])).astype(complex)


def born_table(images, bob_basis: np.ndarray, eve_dirs: np.ndarray) -> np.ndarray:
    """``P[a, b, lam] = <S_a| (|b><b| x |M_lam><M_lam|) |S_a>`` using full 8x8 projectors."""
    out = np.zeros((2, 2, 4))
    for a, s in enumerate(images):
        for b in range(2):
            pb = np.outer(bob_basis[:, b], bob_basis[:, b].conj())
            for lam in range(4):
                pe = np.outer(eve_dirs[:, lam], eve_dirs[:, lam].conj())
                out[a, b, lam] = np.vdot(s, np.kron(pb, pe) @ s).real
    return out


def chsh_from_correlations(d: float) -> float:
    # E(A_i, B_j) on Phi+ for unit vectors in the x-z plane is their dot product
    a = [np.array([0, 1.0]), np.array([1.0, 0])]
    r = 1 / math.sqrt(2)
    b = [np.array([r, r]), np.array([-r, r])]
    e = [[(1 - 2 * d) * float(a[i] @ b[j]) for j in range(2)] for i in range(2)]
    return e[0][0] + e[0][1] + e[1][0] - e[1][1]
