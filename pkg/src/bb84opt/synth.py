"""Optimal 8x8 attack unitaries and the rules that transport them.

An attack unitary acts on Alice (most significant qubit) and Eve's 4-dim
ancilla. Columns 0-3 form ``U_x`` (Alice sent 0), columns 4-7 form ``U_y``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    HADAMARD,
    I2,
    SIGMA_X,
    SIGMA_Z,
    TOL_UNITARY,
    as_cmat,
    as_cvec,
    basis_vector,
    complete_orthonormal_basis,
    completion_matrix,
    complex_to_pairs,
    frozen,
    kron,
    max_abs,
    pairs_to_complex,
    unitarity_defect,
)
from .states import (
    Basis,
    ErrorRates,
    MeasurementSetup,
    Pijs,
    computational_setup,
    delta_kets,
    encode,
    optimal_pijs,
)

I4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class AttackUnitary:
    """An interaction together with the ancilla state and measurement it is optimal for."""

    u: np.ndarray
    initial_state: np.ndarray
    measurement: MeasurementSetup
    rates: ErrorRates

    def __post_init__(self):
        object.__setattr__(self, "u", frozen(as_cmat(self.u, 8, 8)))
        object.__setattr__(self, "initial_state", frozen(as_cvec(self.initial_state, 4)))

    def anchors(self) -> Pijs:
        """Target joint states for xy encoding."""
        return optimal_pijs(Basis.COMPUTATIONAL, self.rates, self.measurement)

    def images(self, basis: Basis = Basis.COMPUTATIONAL) -> tuple[np.ndarray, np.ndarray]:
        return tuple(self.u @ np.kron(encode(a, basis), self.initial_state) for a in (0, 1))

    def joint_states(self, basis: Basis = Basis.COMPUTATIONAL,
                     measurement: MeasurementSetup | None = None) -> Pijs:
        """What the unitary actually produces for an encoding basis."""
        from .states import conjugate_setup

        if measurement is None:
            measurement = self.measurement if basis is Basis.COMPUTATIONAL else conjugate_setup(self.measurement)
        s0, s1 = self.images(basis)
        return Pijs(s0, s1, self.rates, measurement, basis)

    def anchor_defect(self) -> float:
        target = self.anchors()
        got = self.images()
        return max(max_abs(got[0] - target.x_state), max_abs(got[1] - target.y_state))

    def unitarity_defect(self) -> float:
        return unitarity_defect(self.u)

    def validate(self, tol_unitary: float = TOL_UNITARY, tol_anchor: float = 1e-9) -> "AttackUnitary":
        du, da = self.unitarity_defect(), self.anchor_defect()
        if du > tol_unitary:
            raise ValueError(f"attack matrix is not unitary (defect {du:.2e})")
        if da > tol_anchor:
            raise ValueError(f"attack does not produce the optimal joint states (defect {da:.2e})")
        return self

    def with_u(self, u, **changes) -> "AttackUnitary":
        fields = {"u": u, "initial_state": self.initial_state, "measurement": self.measurement,
                  "rates": self.rates}
        fields.update(changes)
        return AttackUnitary(**fields)

    def nonzero_count(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(np.abs(self.u) > tol))

    def to_dict(self) -> dict:
        return {
            "u": complex_to_pairs(self.u),
            "initial_state": complex_to_pairs(self.initial_state),
            "measurement": self.measurement.to_dict(),
            "rates": {"d_xy": self.rates.d_xy, "d_uv": self.rates.d_uv},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AttackUnitary":
        return cls(
            pairs_to_complex(data["u"]),
            pairs_to_complex(data["initial_state"]),
            MeasurementSetup.from_dict(data["measurement"]),
            ErrorRates(**data["rates"]),
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        """8 rows of 16 columns: re, im interleaved per entry."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"{p}{j}" for j in range(8) for p in ("re", "im")])
        for row in self.u:
            w.writerow([f"{x:.12g}" for z in row for x in (z.real, z.imag)])
        return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))[1:]
    vals = np.array([[float(x) for x in r] for r in rows if r])
    return vals[:, 0::2] + 1j * vals[:, 1::2]


@dataclass(frozen=True)
class Factorization:
    """``U = U_XY (I2 x W^dagger)`` with ``W = [psi_0 psi_1 psi_2 psi_3]``."""

    u_xy: np.ndarray
    w: np.ndarray

    def recompose(self) -> np.ndarray:
        return self.u_xy @ np.kron(I2, self.w.conj().T)


# E1 x E2 maps used by the divide-and-conquer construction (rows: A E1, cols: E1)
_W_X = np.zeros((4, 2), dtype=complex)
_W_X[0, 0] = _W_X[3, 1] = 1  # |00><0| + |11><1|
_W_Y = np.zeros((4, 2), dtype=complex)
_W_Y[2, 0] = _W_Y[1, 1] = 1  # |10><0| + |01><1|


def delta_hadamard_state(rates: ErrorRates) -> np.ndarray:
    """``|Delta_xy>_{E1} |Delta^H_uv>_{E2}``."""
    return np.kron(delta_kets(rates.d_xy)[0], delta_kets(rates.d_uv)[1])


def delta_state(rates: ErrorRates) -> np.ndarray:
    """``|Delta_xy>_{E1} |Delta_uv>_{E2}``."""
    return np.kron(delta_kets(rates.d_xy)[0], delta_kets(rates.d_uv)[0])


def synth_delta_hadamard(rates: ErrorRates) -> AttackUnitary:
    """``U = [U_x | U_y]`` with ``U_x = (|00> |11>) x I2`` and ``U_y = (|10> |01>) x sigma_x``.

    The matrix is a permutation, independent of the rates; only the initial
    ancilla state carries them. Optimal for the computational measurement.
    """
    u = np.hstack([np.kron(_W_X, I2), np.kron(_W_Y, SIGMA_X)])
    return AttackUnitary(u, delta_hadamard_state(rates), computational_setup(), rates)


def synth_by_basis_completion(pijs: Pijs, psi0) -> AttackUnitary:
    """``U = sum_i (|X_i><0| + |Y_i><1|) <psi_i|`` from completed bases.

    ``psi_1..3`` complete ``psi0`` and ``X_1..3, Y_1..3`` complete the
    target pair, both by the deterministic standard-basis sweep.
    """
    if pijs.basis is not Basis.COMPUTATIONAL:
        raise ValueError("basis completion expects computational-basis joint states")
    psi0 = as_cvec(psi0, 4)
    if abs(np.vdot(psi0, psi0).real - 1) > 1e-10:
        raise ValueError("initial state is not normalized")
    psi = complete_orthonormal_basis([psi0], 4)
    out = complete_orthonormal_basis([pijs.x_state, pijs.y_state], 8)
    xs = [out[0]] + out[2:5]
    ys = [out[1]] + out[5:8]
    u = np.zeros((8, 8), dtype=complex)
    for i in range(4):
        u += np.outer(xs[i], np.kron(basis_vector(0, 2), psi[i]).conj())
        u += np.outer(ys[i], np.kron(basis_vector(1, 2), psi[i]).conj())
    return AttackUnitary(u, psi0, pijs.measurement, pijs.rates)


def factorize(a: AttackUnitary) -> Factorization:
    w = completion_matrix(a.initial_state)
    return Factorization(a.u @ np.kron(I2, w), w)


def _require_unitary(m: np.ndarray, name: str):
    d = unitarity_defect(m)
    if d > TOL_UNITARY:
        raise ValueError(f"{name} is not unitary (defect {d:.2e})")


def alternate_via_is_subspace(a: AttackUnitary, t_perp) -> AttackUnitary:
    """``U' = U (I2 x Gamma)``, Gamma = identity on the initial state and
    ``t_perp^dagger`` on the completion directions psi_1..psi_3."""
    t_perp = as_cmat(t_perp, 3, 3)
    _require_unitary(t_perp, "t_perp")
    w = completion_matrix(a.initial_state)
    # written as U + U(I x W(Gamma - I)W^dagger) so an identity t_perp returns U exactly
    shift = np.zeros((4, 4), dtype=complex)
    shift[1:, 1:] = t_perp.conj().T - np.eye(3)
    return a.with_u(a.u + a.u @ np.kron(I2, w @ shift @ w.conj().T))


def alternate_via_pijs_subspace(f: Factorization, gamma_x, gamma_y, pijs: Pijs) -> AttackUnitary:
    """``U' = U_XY diag(Gamma_X, Gamma_Y) (I2 x W^dagger)``.

    Each Gamma must fix its block's first column, the optimal joint state.
    """
    blocks = []
    for name, g in (("gamma_x", gamma_x), ("gamma_y", gamma_y)):
        g = as_cmat(g, 4, 4)
        _require_unitary(g, name)
        if max_abs(g[:, 0] - basis_vector(0, 4)) > 1e-9:
            raise ValueError(f"{name} does not leave the optimal joint state direction fixed")
        blocks.append(g)
    gamma = np.zeros((8, 8), dtype=complex)
    gamma[:4, :4], gamma[4:, 4:] = blocks
    u = f.u_xy @ gamma @ np.kron(I2, f.w.conj().T)
    return AttackUnitary(u, f.w[:, 0], pijs.measurement, pijs.rates)


def change_initial_state(a: AttackUnitary, t_ef) -> AttackUnitary:
    """Transport to ancilla state ``|f> = T|e>`` via ``U_f = U_e (I2 x T^dagger)``."""
    t_ef = as_cmat(t_ef, 4, 4)
    _require_unitary(t_ef, "t_ef")
    return a.with_u(a.u @ np.kron(I2, t_ef.conj().T), initial_state=t_ef @ a.initial_state)


def change_measurement(a: AttackUnitary, m_new: MeasurementSetup) -> AttackUnitary:
    """``U^M = (I2 x M) U^C``; a non-computational source is first rotated back."""
    if m_new.basis is not Basis.COMPUTATIONAL:
        raise ValueError("attack unitaries are indexed by their xy-basis measurement")
    m_new = m_new.canonical()
    pivot = m_new.directions @ a.measurement.canonical().directions.conj().T
    return a.with_u(np.kron(I2, pivot) @ a.u, measurement=m_new)


def amplitude_rotation(d: float) -> np.ndarray:
    """``sqrt(1-d) sigma_z + sqrt(d) sigma_x``; maps ``|Delta_d>`` to ``|0>``."""
    return math.sqrt(1 - d) * SIGMA_Z + math.sqrt(d) * SIGMA_X


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
# |00> -> (|00> + |11>)/sqrt2 on (E1, E2)
BELL_PREP = CNOT @ np.kron(HADAMARD, I2)
PHI_PLUS = BELL_PREP[:, 0].copy()


def to_delta(a: AttackUnitary) -> AttackUnitary:
    """From ancilla ``|Delta^H>`` to ``|Delta>`` via ``T = I2 x H``."""
    return change_initial_state(a, np.kron(I2, HADAMARD))


def to_zero(a: AttackUnitary) -> AttackUnitary:
    """From ancilla ``|Delta>`` to ``|00>`` via ``T = A_xy x A_uv``."""
    return change_initial_state(a, kron(amplitude_rotation(a.rates.d_xy), amplitude_rotation(a.rates.d_uv)))


def to_custom(a: AttackUnitary, target) -> AttackUnitary:
    """From ancilla ``|00>`` to any normalized ``target``."""
    if max_abs(a.initial_state - basis_vector(0, 4)) > 1e-9:
        raise ValueError("custom initial states are reached from the |00> solution")
    return change_initial_state(a, completion_matrix(as_cvec(target, 4)))


INITIAL_STATES = ("delta_hadamard", "delta", "zero", "bell")


def synth_chain(rates: ErrorRates, initial_state: str | np.ndarray = "delta_hadamard",
                measurement: MeasurementSetup | None = None) -> AttackUnitary:
    """Scripted route: divide-and-conquer solution, then ancilla and measurement transport."""
    a = synth_delta_hadamard(rates)
    if isinstance(initial_state, str):
        if initial_state not in INITIAL_STATES:
            raise ValueError(f"unknown initial state {initial_state!r}")
        steps = INITIAL_STATES.index(initial_state)
        if steps >= 1:
            a = to_delta(a)
        if steps >= 2:
            a = to_zero(a)
        if steps >= 3:
            a = change_initial_state(a, BELL_PREP)
    else:
        a = to_custom(to_zero(to_delta(a)), initial_state)
    if measurement is not None:
        a = change_measurement(a, measurement)
    return a
