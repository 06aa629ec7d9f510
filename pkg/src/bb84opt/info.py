"""Closed-form information quantities for the optimal symmetric attack.

All logarithms are base 2 and ``0 log 0 = 0``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2 * SQRT2
CSV_FIELDS = ("d", "ig_star", "mi_ab", "mi_ae", "key_rate", "chsh", "shrink")


def _check_range(x: float, lo: float, hi: float, name: str) -> float:
    x = float(x)
    if not (lo - 1e-15 <= x <= hi + 1e-15) or math.isnan(x):
        raise ValueError(f"{name}={x} outside [{lo}, {hi}]")
    return min(max(x, lo), hi)


def _xlog2x(x: float) -> float:
    return 0.0 if x <= 0 else x * math.log2(x)


def phi(z: float) -> float:
    """``(1+z) log2(1+z) + (1-z) log2(1-z)`` on ``[0, 1]``."""
    z = _check_range(z, 0.0, 1.0, "z")
    return _xlog2x(1 + z) + _xlog2x(1 - z)


def binary_entropy(p: float) -> float:
    p = _check_range(p, 0.0, 1.0, "p")
    return -_xlog2x(p) - _xlog2x(1 - p)


def ig_star(d: float) -> float:
    """Largest information gain compatible with disturbance ``d``."""
    d = _check_range(d, 0.0, 0.5, "d")
    return 2 * math.sqrt(d * (1 - d))


def eve_error(d: float) -> float:
    """Eve's bit error ``1/2 - sqrt(d(1-d))`` under the optimal attack."""
    return 0.5 - 0.5 * ig_star(d)


def mi_curves(d: float) -> tuple[float, float]:
    """``(MI_AB, MI_AE)`` at disturbance ``d``."""
    d = _check_range(d, 0.0, 0.5, "d")
    mi_ab = 0.5 * phi(1 - 2 * d)
    if abs(mi_ab - (1 - binary_entropy(d))) > 1e-12:  # pragma: no cover - identity
        raise ArithmeticError("inconsistent mutual information forms")
    return mi_ab, 0.5 * phi(ig_star(d))


def key_rate(d: float) -> float:
    """One-way key rate ``max(0, H(D_E) - H(d))``."""
    d = _check_range(d, 0.0, 0.5, "d")
    return max(0.0, binary_entropy(eve_error(d)) - binary_entropy(d))


def qber_threshold() -> float:
    """Disturbance at which Bob and Eve hold equal information."""
    return 0.5 * (1 - 1 / SQRT2)


def helstrom_fidelity(d_conjugate: float) -> float:
    """Eve's best bit-guess probability, ``1/2 + sqrt(d(1-d))``."""
    d = _check_range(d_conjugate, 0.0, 0.5, "d")
    return 0.5 + math.sqrt(d * (1 - d))


def chsh_sum(d: float) -> float:
    d = _check_range(d, 0.0, 0.5, "d")
    return (1 - 2 * d) * TSIRELSON


def bloch_shrink(d: float) -> float:
    d = _check_range(d, 0.0, 0.5, "d")
    return 1 - 2 * d


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def bob_density(ket: np.ndarray, d: float) -> np.ndarray:
    """``F |a><a| + D |a'><a'|`` for a qubit ket and its orthogonal partner."""
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    perp = np.array([-ket[1].conjugate(), ket[0].conjugate()])
    return (1 - d) * np.outer(ket, ket.conj()) + d * np.outer(perp, perp.conj())


def secrecy_bound(i_ab: float, i_ae: float, i_eb: float) -> float:
    """Lower bound on the secrecy capacity; may be negative."""
    return max(i_ab - i_ae, i_ab - i_eb)


@dataclass(frozen=True)
class RateCurvePoint:
    d: float
    ig_star: float
    mi_ab: float
    mi_ae: float
    key_rate: float
    chsh: float
    shrink: float

    @classmethod
    def at(cls, d: float) -> "RateCurvePoint":
        mi_ab, mi_ae = mi_curves(d)
        return cls(d, ig_star(d), mi_ab, mi_ae, key_rate(d), chsh_sum(d), bloch_shrink(d))

    def row(self) -> list[str]:
        return [f"{v:.12g}" for v in asdict(self).values()]


def grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid; the point count is ``round((stop - start)/step) + 1``."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    if start > stop:
        raise ValueError("grid start exceeds stop")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def sweep(start: float = 0.0, stop: float = 0.25, step: float = 0.005) -> list[RateCurvePoint]:
    return [RateCurvePoint.at(min(float(d), 0.5)) for d in grid(start, stop, step)]


def sweep_csv(points: list[RateCurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for p in points:
        w.writerow(p.row())
    return buf.getvalue()


def bisect_threshold(lo: float = 0.1, hi: float = 0.2, tol: float = 1e-13) -> float:
    """Smallest ``d`` in ``[lo, hi]`` where the key rate vanishes."""
    if key_rate(lo) <= 0 or key_rate(hi) > 0:
        raise ValueError("interval does not bracket the key-rate zero")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if key_rate(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
