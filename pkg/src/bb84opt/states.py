"""Encodings, amplitudes, interaction vectors and joint states of the attack.

Tensor order is Alice (A) then Eve's two ancilla qubits (E1, E2), so a
joint state index is ``4 * alice_bit + 2 * e1 + e2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    HADAMARD,
    TOL_NORM,
    TOL_UNITARY,
    as_cmat,
    as_cvec,
    basis_vector,
    complex_to_pairs,
    frozen,
    gram,
    haar_random_unitary,
    max_abs,
    pairs_to_complex,
)

# below this, a sqrt(rate) prefactor is treated as zero
DEGENERATE = 1e-12


class Basis(enum.Enum):
    COMPUTATIONAL = "xy"
    HADAMARD = "uv"

    @property
    def conjugate(self) -> "Basis":
        return Basis.HADAMARD if self is Basis.COMPUTATIONAL else Basis.COMPUTATIONAL

    @property
    def labels(self) -> tuple[str, str]:
        return ("x", "y") if self is Basis.COMPUTATIONAL else ("u", "v")

    @classmethod
    def parse(cls, tag) -> "Basis":
        if isinstance(tag, Basis):
            return tag
        key = str(tag).lower()
        aliases = {
            "xy": cls.COMPUTATIONAL, "computational": cls.COMPUTATIONAL, "+": cls.COMPUTATIONAL,
            "0": cls.COMPUTATIONAL,
            "uv": cls.HADAMARD, "hadamard": cls.HADAMARD, "×": cls.HADAMARD, "1": cls.HADAMARD,
        }
        if key not in aliases:
            raise ValueError(f"unknown basis tag {tag!r}")
        return aliases[key]


def _check_probability(d: float, name: str = "d") -> float:
    d = float(d)
    if not (0.0 <= d <= 0.5) or math.isnan(d):
        raise ValueError(f"{name}={d} outside [0, 1/2]")
    return d


@dataclass(frozen=True)
class ErrorRates:
    """Per-basis disturbance (QBER) pair."""

    d_xy: float
    d_uv: float

    def __post_init__(self):
        object.__setattr__(self, "d_xy", _check_probability(self.d_xy, "d_xy"))
        object.__setattr__(self, "d_uv", _check_probability(self.d_uv, "d_uv"))

    @classmethod
    def symmetric(cls, d: float) -> "ErrorRates":
        return cls(d, d)

    def disturbance(self, basis: Basis) -> float:
        return self.d_xy if basis is Basis.COMPUTATIONAL else self.d_uv

    def fidelity(self, basis: Basis) -> float:
        return 1.0 - self.disturbance(basis)

    @property
    def is_degenerate(self) -> bool:
        return any(d < DEGENERATE or d > 0.5 - DEGENERATE for d in (self.d_xy, self.d_uv))


def encode(bit: int, basis: Basis) -> np.ndarray:
    """Alice's qubit ``H^beta |bit>``."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    e = basis_vector(bit, 2)
    return HADAMARD @ e if Basis.parse(basis) is Basis.HADAMARD else e


def delta_pm(d: float) -> tuple[float, float]:
    """Amplitudes ``((sqrt(1-d) + sqrt(d))/sqrt2, (sqrt(1-d) - sqrt(d))/sqrt2)``."""
    d = _check_probability(d)
    f, s = math.sqrt(1.0 - d), math.sqrt(d)
    return (f + s) / math.sqrt(2.0), (f - s) / math.sqrt(2.0)


def delta_kets(d: float) -> tuple[np.ndarray, np.ndarray]:
    """``(|Delta>, |Delta^H>)`` with ``|Delta> = sqrt(1-d)|0> + sqrt(d)|1>``."""
    d = _check_probability(d)
    plus, minus = delta_pm(d)
    return (
        np.array([math.sqrt(1.0 - d), math.sqrt(d)], dtype=complex),
        np.array([plus, minus], dtype=complex),
    )


STANDARD_SIGNS = (1, -1, 1, -1)


@dataclass(frozen=True)
class MeasurementSetup:
    """Eve's ordered orthonormal 4-outcome measurement for one encoding basis.

    ``directions`` holds the basis vectors as columns. A ``+1`` sign means
    Eve bets on bit 0 for that outcome.
    """

    directions: np.ndarray
    basis: Basis = Basis.COMPUTATIONAL
    signs: tuple[int, ...] = STANDARD_SIGNS

    def __post_init__(self):
        m = as_cmat(self.directions, 4, 4)
        object.__setattr__(self, "directions", frozen(m))
        object.__setattr__(self, "basis", Basis.parse(self.basis))
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != 4 or any(s not in (1, -1) for s in signs) or sum(signs) != 0:
            raise ValueError(f"signs must hold two +1 and two -1 entries, got {signs}")
        object.__setattr__(self, "signs", signs)
        defect = max_abs(m.conj().T @ m - np.eye(4))
        if defect > TOL_UNITARY:
            raise ValueError(f"measurement directions are not orthonormal (defect {defect:.2e})")

    def direction(self, k: int) -> np.ndarray:
        return self.directions[:, k]

    @property
    def plus(self) -> list[int]:
        return [k for k, s in enumerate(self.signs) if s > 0]

    @property
    def minus(self) -> list[int]:
        return [k for k, s in enumerate(self.signs) if s < 0]

    def canonical(self) -> "MeasurementSetup":
        """Equivalent setup reordered so that signs read (+, -, +, -)."""
        if self.signs == STANDARD_SIGNS:
            return self
        p, m = self.plus, self.minus
        order = [p[0], m[0], p[1], m[1]]
        return MeasurementSetup(self.directions[:, order], self.basis, STANDARD_SIGNS)

    def guess(self, outcome: int) -> int:
        """Eve's bet on Alice's bit for an outcome."""
        return 0 if self.signs[outcome] > 0 else 1

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.value,
            "signs": list(self.signs),
            "directions": [complex_to_pairs(self.directions[:, k]) for k in range(4)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MeasurementSetup":
        cols = [pairs_to_complex(v) for v in data["directions"]]
        return cls(np.column_stack(cols), Basis.parse(data.get("basis", "xy")),
                   tuple(data.get("signs", STANDARD_SIGNS)))


def computational_setup(basis: Basis = Basis.COMPUTATIONAL) -> MeasurementSetup:
    """Directions |00>, |01>, |10>, |11>."""
    return MeasurementSetup(np.eye(4, dtype=complex), basis)


FUCHS_ORDER = (0, 3, 2, 1)


def fuchs_setup(basis: Basis = Basis.COMPUTATIONAL) -> MeasurementSetup:
    """Directions |00>, |11>, |10>, |01>."""
    return MeasurementSetup(np.eye(4, dtype=complex)[:, list(FUCHS_ORDER)], basis)


def random_setup(seed, basis: Basis = Basis.COMPUTATIONAL) -> MeasurementSetup:
    return MeasurementSetup(haar_random_unitary(4, seed), basis)


# columns give F_lambda in terms of E_0..E_3
CONJUGATE_MAP = 0.5 * np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, -1, 1],
        [1, -1, 1, -1],
    ],
    dtype=complex,
).T


def conjugate_setup(e: MeasurementSetup) -> MeasurementSetup:
    """Optimal measurement for the conjugate encoding basis.

    ``2F_0 = E_0+E_1+E_2+E_3``, ``2F_1 = E_0+E_1-E_2-E_3``,
    ``2F_2 = E_0-E_1-E_2+E_3``, ``2F_3 = E_0-E_1+E_2-E_3``, with the E's
    taken in canonical (+, -, +, -) order.
    """
    e = e.canonical()
    return MeasurementSetup(e.directions @ CONJUGATE_MAP, e.basis.conjugate)


@dataclass(frozen=True)
class InteractionVectors:
    """Eve's fidelity (xi) and disturbed (zeta) ancilla states for one basis.

    Construction does not enforce the optimality invariants so that
    arbitrary (perturbed, non-optimal) candidates can be certified;
    ``defects`` reports them.
    """

    xi_0: np.ndarray
    xi_1: np.ndarray
    zeta_0: np.ndarray
    zeta_1: np.ndarray
    basis: Basis = Basis.COMPUTATIONAL

    def __post_init__(self):
        for name in ("xi_0", "xi_1", "zeta_0", "zeta_1"):
            object.__setattr__(self, name, frozen(as_cvec(getattr(self, name), 4)))
        object.__setattr__(self, "basis", Basis.parse(self.basis))

    @property
    def xi(self) -> tuple[np.ndarray, np.ndarray]:
        return self.xi_0, self.xi_1

    @property
    def zeta(self) -> tuple[np.ndarray, np.ndarray]:
        return self.zeta_0, self.zeta_1

    def as_matrix(self) -> np.ndarray:
        """Columns (xi_0, xi_1, zeta_0, zeta_1)."""
        return np.column_stack([self.xi_0, self.xi_1, self.zeta_0, self.zeta_1])

    def transformed(self, local: np.ndarray) -> "InteractionVectors":
        """Apply a 4x4 operator on Eve's space to all four vectors."""
        return InteractionVectors(*(local @ v for v in (self.xi_0, self.xi_1, self.zeta_0, self.zeta_1)),
                                  basis=self.basis)

    def defects(self) -> dict[str, float]:
        vecs = (self.xi_0, self.xi_1, self.zeta_0, self.zeta_1)
        g = gram(vecs)
        return {
            "norm": float(np.max(np.abs(np.diag(g) - 1))),
            "fidelity_vs_disturbed": float(np.max(np.abs(g[:2, 2:]))),
        }

    def is_valid(self, tol: float = 1e-9) -> bool:
        return max(self.defects().values()) <= tol

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.value,
            "xi_0": complex_to_pairs(self.xi_0),
            "xi_1": complex_to_pairs(self.xi_1),
            "zeta_0": complex_to_pairs(self.zeta_0),
            "zeta_1": complex_to_pairs(self.zeta_1),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InteractionVectors":
        return cls(*(pairs_to_complex(data[k]) for k in ("xi_0", "xi_1", "zeta_0", "zeta_1")),
                   basis=Basis.parse(data.get("basis", "xy")))


def optimal_ivs(basis: Basis, rates: ErrorRates, m: MeasurementSetup) -> InteractionVectors:
    """Optimal IVs for encoding ``basis`` expressed in Eve's measurement ``m``.

    Amplitudes come from the conjugate basis' error rate. Directions are
    paired by sign: with canonical signs this is
    ``xi_0 = D+ M_0 + D- M_1``, ``xi_1 = D- M_0 + D+ M_1`` and the same on
    ``M_2, M_3`` for the zetas.
    """
    basis = Basis.parse(basis)
    if m.basis is not basis:
        raise ValueError(f"measurement serves basis {m.basis.value}, IVs requested for {basis.value}")
    plus, minus = delta_pm(rates.disturbance(basis.conjugate))
    p, n = m.plus, m.minus
    e = m.directions
    return InteractionVectors(
        plus * e[:, p[0]] + minus * e[:, n[0]],
        minus * e[:, p[0]] + plus * e[:, n[0]],
        plus * e[:, p[1]] + minus * e[:, n[1]],
        minus * e[:, p[1]] + plus * e[:, n[1]],
        basis=basis,
    )


@dataclass(frozen=True)
class Pijs:
    """Post-interaction joint states ``|S_0>, |S_1>`` (Alice x Eve) for one encoding basis."""

    x_state: np.ndarray
    y_state: np.ndarray
    rates: ErrorRates
    measurement: MeasurementSetup
    basis: Basis = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "x_state", frozen(as_cvec(self.x_state, 8)))
        object.__setattr__(self, "y_state", frozen(as_cvec(self.y_state, 8)))
        basis = self.measurement.basis if self.basis is None else Basis.parse(self.basis)
        object.__setattr__(self, "basis", basis)

    @property
    def states(self) -> tuple[np.ndarray, np.ndarray]:
        return self.x_state, self.y_state

    def defects(self) -> dict[str, float]:
        return {
            "norm": max(abs(np.vdot(s, s).real - 1) for s in self.states),
            "overlap": abs(np.vdot(self.x_state, self.y_state)),
        }


def pijs_from_ivs(basis: Basis, rates: ErrorRates, ivs: InteractionVectors, m: MeasurementSetup) -> Pijs:
    """``|S_a> = sqrt(F)|a>|xi_a> + sqrt(D)|a-bar>|zeta_a>`` in encoding ``basis``."""
    basis = Basis.parse(basis)
    if ivs.basis is not basis:
        raise ValueError(f"IVs are for basis {ivs.basis.value}, joint state requested for {basis.value}")
    f, d = math.sqrt(rates.fidelity(basis)), math.sqrt(rates.disturbance(basis))
    states = []
    for a, (xi, zeta) in enumerate(zip(ivs.xi, ivs.zeta)):
        states.append(f * np.kron(encode(a, basis), xi) + d * np.kron(encode(1 - a, basis), zeta))
    return Pijs(states[0], states[1], rates, m, basis)


def optimal_pijs(basis: Basis, rates: ErrorRates, m: MeasurementSetup) -> Pijs:
    return pijs_from_ivs(basis, rates, optimal_ivs(basis, rates, m), m)


def bob_projection(state: np.ndarray, bob_ket: np.ndarray) -> np.ndarray:
    """``(<b| x I_E) |state>`` for a joint 8-vector."""
    return np.conj(bob_ket) @ np.asarray(state, dtype=complex).reshape(2, 4)


def ivs_from_pijs(pijs: Pijs) -> InteractionVectors:
    """Schmidt split of joint states back into Eve's four vectors.

    A component whose prefactor ``sqrt(F)`` or ``sqrt(D)`` is below 1e-12
    carries no information; it is returned as the zero vector.
    """
    basis = pijs.basis
    f, d = math.sqrt(pijs.rates.fidelity(basis)), math.sqrt(pijs.rates.disturbance(basis))
    xi, zeta = [], []
    for a, s in enumerate(pijs.states):
        same = bob_projection(s, encode(a, basis))
        flipped = bob_projection(s, encode(1 - a, basis))
        xi.append(same / f if f > DEGENERATE else np.zeros(4, dtype=complex))
        zeta.append(flipped / d if d > DEGENERATE else np.zeros(4, dtype=complex))
    return InteractionVectors(xi[0], xi[1], zeta[0], zeta[1], basis=basis)


class DegenerateRateError(ValueError):
    """A conjugate-basis component is undefined because its rate vanishes."""


def conjugate_ivs(ivs: InteractionVectors, rates: ErrorRates) -> InteractionVectors:
    """IVs of the conjugate encoding basis implied by the same interaction.

    ``2 sqrt(F') xi'_0 = sqrt(F)(xi_0 + xi_1) + sqrt(D)(zeta_0 + zeta_1)``
    ``2 sqrt(F') xi'_1 = sqrt(F)(xi_0 + xi_1) - sqrt(D)(zeta_0 + zeta_1)``
    ``2 sqrt(D') zeta'_0 = sqrt(F)(xi_0 - xi_1) + sqrt(D)(zeta_1 - zeta_0)``
    ``2 sqrt(D') zeta'_1 = sqrt(F)(xi_0 - xi_1) - sqrt(D)(zeta_1 - zeta_0)``

    Primed quantities belong to the conjugate basis. The same formula maps
    both ways.
    """
    src, dst = ivs.basis, ivs.basis.conjugate
    f, d = math.sqrt(rates.fidelity(src)), math.sqrt(rates.disturbance(src))
    f2, d2 = math.sqrt(rates.fidelity(dst)), math.sqrt(rates.disturbance(dst))
    if d2 < DEGENERATE:
        raise DegenerateRateError(
            f"disturbed states of basis {dst.value} are undefined at zero error rate"
        )
    xi_sum = f * (ivs.xi_0 + ivs.xi_1)
    zeta_sum = d * (ivs.zeta_0 + ivs.zeta_1)
    xi_diff = f * (ivs.xi_0 - ivs.xi_1)
    zeta_diff = d * (ivs.zeta_1 - ivs.zeta_0)
    return InteractionVectors(
        (xi_sum + zeta_sum) / (2 * f2),
        (xi_sum - zeta_sum) / (2 * f2),
        (xi_diff + zeta_diff) / (2 * d2),
        (xi_diff - zeta_diff) / (2 * d2),
        basis=dst,
    )


def ivs_uv_from_xy(ivs_xy: InteractionVectors, rates: ErrorRates) -> InteractionVectors:
    if ivs_xy.basis is not Basis.COMPUTATIONAL:
        raise ValueError("expected computational-basis IVs")
    return conjugate_ivs(ivs_xy, rates)


def ivs_xy_from_uv(ivs_uv: InteractionVectors, rates: ErrorRates) -> InteractionVectors:
    if ivs_uv.basis is not Basis.HADAMARD:
        raise ValueError("expected Hadamard-basis IVs")
    return conjugate_ivs(ivs_uv, rates)


def conjugate_pijs(pijs: Pijs, measurement: MeasurementSetup | None = None) -> Pijs:
    """Joint states for the conjugate encoding of the same interaction.

    By linearity ``|S'_0> = (|S_0> + |S_1>)/sqrt2`` and
    ``|S'_1> = (|S_0> - |S_1>)/sqrt2``.
    """
    if measurement is None:
        measurement = conjugate_setup(pijs.measurement)
    s0, s1 = pijs.states
    r = 1 / math.sqrt(2)
    return Pijs(r * (s0 + s1), r * (s0 - s1), pijs.rates, measurement, pijs.basis.conjugate)


def phi_plus_d(d: float) -> np.ndarray:
    """``sqrt(1-d)|00> + sqrt(d)|11>`` on (A, E1)."""
    d = _check_probability(d)
    return np.array([math.sqrt(1 - d), 0, 0, math.sqrt(d)], dtype=complex)


def psi_plus_d(d: float) -> np.ndarray:
    """``sqrt(1-d)|10> + sqrt(d)|01>`` on (A, E1)."""
    d = _check_probability(d)
    return np.array([0, math.sqrt(d), math.sqrt(1 - d), 0], dtype=complex)


def check_normalized(v, tol: float = TOL_NORM) -> bool:
    return abs(np.vdot(v, v).real - 1) <= tol
