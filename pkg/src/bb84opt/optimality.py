"""Numeric certificates for optimality of an interaction.

Every checker returns an :class:`NscReport` whose residuals are absolute
defects of the corresponding equalities. Ratio conditions are tested in
cross-multiplied form so vanishing overlaps never divide.

All checks are written for IVs of an arbitrary encoding basis ``b``: the
"conjugate" quantities (rate, joint states, IVs) then refer to ``b.conjugate``.
For computational-basis IVs this reads exactly as the textbook xy-basis
conditions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_cmat, expm_hermitian, gram, max_abs, random_hermitian
from .states import (
    DEGENERATE,
    Basis,
    DegenerateRateError,
    ErrorRates,
    InteractionVectors,
    MeasurementSetup,
    Pijs,
    conjugate_ivs,
    conjugate_pijs,
    delta_pm,
    encode,
    pijs_from_ivs,
)

DEFAULT_TOL = 1e-9

# permutation (1 3 2 4): swaps the middle two columns
SWAP_MIDDLE = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass
class NscReport:
    """Residuals of one or more optimality conditions."""

    per_condition: dict[str, float]
    tol: float = DEFAULT_TOL
    vacuous: set[str] = field(default_factory=set)

    @property
    def max_residual(self) -> float:
        return max(self.per_condition.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def condition_passed(self, key: str) -> bool:
        return self.per_condition[key] <= self.tol

    def merge(self, other: "NscReport") -> "NscReport":
        return NscReport(
            {**self.per_condition, **other.per_condition},
            min(self.tol, other.tol),
            self.vacuous | other.vacuous,
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tol,
            "per_condition": dict(self.per_condition),
            "vacuous": sorted(self.vacuous),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _conjugate_amplitudes(basis: Basis, rates: ErrorRates) -> tuple[float, float]:
    return delta_pm(rates.disturbance(basis.conjugate))


def lemma1_residual(ivs: InteractionVectors, rates: ErrorRates) -> float:
    """``|(1-D)<xi_0|xi_1> + D<zeta_0|zeta_1> - 2 D+ D-|``.

    D is the error rate of the IVs' own basis, the amplitudes come from the
    conjugate one. Vanishes for every genuine unitary interaction.
    """
    d = rates.disturbance(ivs.basis)
    plus, minus = _conjugate_amplitudes(ivs.basis, rates)
    lhs = (1 - d) * np.vdot(ivs.xi_0, ivs.xi_1) + d * np.vdot(ivs.zeta_0, ivs.zeta_1)
    return float(abs(lhs - 2 * plus * minus))


def check_fuchs_nsc(pijs_conj: Pijs, e_setup: MeasurementSetup, rates: ErrorRates,
                    tol: float = DEFAULT_TOL) -> NscReport:
    """Parallelism test on the joint Bob-Eve space.

    ``pijs_conj`` are the joint states for the basis conjugate to the one
    ``e_setup`` serves (|U>, |V> when certifying xy-basis optimality). With
    ``|W_{l a}> = (B_a x E_l)|W>`` the conditions are
    ``sqrt(D')|S0_{l 0}> = eps_l sqrt(1-D')|S1_{l 0}>`` and
    ``sqrt(D')|S1_{l 1}> = eps_l sqrt(1-D')|S0_{l 1}>``.
    The inner products of each parallel pair must also be real with sign eps_l.
    """
    conj = pijs_conj.basis
    if conj is not e_setup.basis.conjugate:
        raise ValueError("joint states must belong to the basis conjugate to the measurement")
    labels = conj.labels
    keys = (f"fuchs_{labels[0]}", f"fuchs_{labels[1]}")
    sd = math.sqrt(rates.disturbance(conj))
    sf = math.sqrt(rates.fidelity(conj))
    if sd < DEGENERATE or sf < DEGENERATE:
        return NscReport({keys[0]: 0.0, keys[1]: 0.0}, tol, set(keys))

    s = pijs_conj.states
    residuals = [0.0, 0.0]
    for a in (0, 1):
        bob = encode(a, conj)
        # first/second member of the parallel pair for this Bob projector
        lead, other = (s[0], s[1]) if a == 0 else (s[1], s[0])
        for lam in range(4):
            direction = e_setup.direction(lam)
            eps = e_setup.signs[lam]
            ket = np.kron(bob, direction)
            lead_c = np.vdot(ket, lead)
            other_c = np.vdot(ket, other)
            defect = max_abs((sd * lead_c - eps * sf * other_c) * ket)
            overlap = np.conj(lead_c) * other_c
            defect = max(defect, abs(overlap.imag))
            if abs(overlap) > DEGENERATE and np.sign(overlap.real) != eps:
                defect = max(defect, abs(overlap.real))
            residuals[a] = max(residuals[a], float(defect))
    return NscReport({keys[0]: residuals[0], keys[1]: residuals[1]}, tol)


def check_condition1(ivs_conj: InteractionVectors, e_setup: MeasurementSetup,
                     tol: float = DEFAULT_TOL) -> NscReport:
    """``<E_l|xi'_0> = eps_l <E_l|zeta'_1>`` and ``<E_l|xi'_1> = eps_l <E_l|zeta'_0>``.

    ``ivs_conj`` are the IVs of the basis conjugate to ``e_setup.basis``.
    """
    if ivs_conj.basis is not e_setup.basis.conjugate:
        raise ValueError("condition 1 pairs measurement directions with conjugate-basis IVs")
    e = e_setup.directions
    eps = np.array(e_setup.signs)
    c = e.conj().T @ ivs_conj.as_matrix()  # rows: lambda, cols: xi0, xi1, zeta0, zeta1
    r = max(max_abs(c[:, 0] - eps * c[:, 3]), max_abs(c[:, 1] - eps * c[:, 2]))
    return NscReport({"cond1": r}, tol)


def check_corollary_overlaps(ivs: InteractionVectors, rates: ErrorRates,
                             tol: float = DEFAULT_TOL) -> NscReport:
    """``<xi_0|xi_1> = <zeta_0|zeta_1> = 1 - 2 D'`` with D' the conjugate-basis rate.

    Involves Eve's space only. Any imaginary part counts as a defect.
    """
    target = 1 - 2 * rates.disturbance(ivs.basis.conjugate)
    r = max(abs(np.vdot(ivs.xi_0, ivs.xi_1) - target), abs(np.vdot(ivs.zeta_0, ivs.zeta_1) - target))
    return NscReport({"corollary": float(r)}, tol)


def check_condition2(ivs: InteractionVectors, e_setup: MeasurementSetup, rates: ErrorRates,
                     tol: float = DEFAULT_TOL) -> NscReport:
    """Overlap ratios ``<E_l|s_0>/<E_l|s_1> = (D+/D-)^eps_l`` for s in {xi, zeta}.

    Tested as ``D-^... <E_l|s_0> - D+^... <E_l|s_1> = 0`` together with the
    cross product between the xi and zeta ratios.
    """
    if ivs.basis is not e_setup.basis:
        raise ValueError("condition 2 pairs IVs with the measurement of the same basis")
    plus, minus = _conjugate_amplitudes(ivs.basis, rates)
    c = e_setup.directions.conj().T @ ivs.as_matrix()
    r = 0.0
    vacuous = True
    for lam, eps in enumerate(e_setup.signs):
        num, den = (plus, minus) if eps > 0 else (minus, plus)
        xi0, xi1, z0, z1 = c[lam]
        r = max(r, abs(den * xi0 - num * xi1), abs(den * z0 - num * z1), abs(xi0 * z1 - xi1 * z0))
        if max(abs(xi0), abs(xi1), abs(z0), abs(z1)) > DEGENERATE:
            vacuous = False
    return NscReport({"cond2": float(r)}, tol, {"cond2"} if vacuous else set())


def decompose_condition3(ivs: InteractionVectors, rates: ErrorRates) -> tuple[list[np.ndarray], float]:
    """Recover ``(E+_xi, E-_xi, E+_zeta, E-_zeta)`` with
    ``xi_0 = D+ E+_xi + D- E-_xi``, ``xi_1 = D- E+_xi + D+ E-_xi`` (same for zeta).

    Returns the four vectors and the orthonormality defect of the set.
    """
    plus, minus = _conjugate_amplitudes(ivs.basis, rates)
    det = plus * plus - minus * minus
    if det < DEGENERATE:
        raise DegenerateRateError("amplitudes coincide; the 2x2 system is singular")
    out = []
    for v0, v1 in (ivs.xi, ivs.zeta):
        out.append((plus * v0 - minus * v1) / det)
        out.append((plus * v1 - minus * v0) / det)
    residual = max_abs(gram(out) - np.eye(4))
    return out, residual


def check_condition3(ivs: InteractionVectors, e_setup: MeasurementSetup, rates: ErrorRates,
                     tol: float = DEFAULT_TOL) -> NscReport:
    """Recovered vectors must be orthonormal, with the + pair inside the span of
    the +outcome directions and the - pair inside the -outcome span."""
    if ivs.basis is not e_setup.basis:
        raise ValueError("condition 3 pairs IVs with the measurement of the same basis")
    try:
        vecs, r = decompose_condition3(ivs, rates)
    except DegenerateRateError:
        return NscReport({"cond3": 0.0}, tol, {"cond3"})
    e = e_setup.directions
    plus_dirs, minus_dirs = e[:, e_setup.plus], e[:, e_setup.minus]
    for k, v in enumerate(vecs):
        wrong = minus_dirs if k % 2 == 0 else plus_dirs
        r = max(r, float(np.linalg.norm(wrong.conj().T @ v)))
    return NscReport({"cond3": float(r)}, tol)


def old_new_equivalence(ivs: InteractionVectors, e_setup: MeasurementSetup,
                        rates: ErrorRates) -> tuple[np.ndarray, float]:
    """Block unitary ``R = diag(R+, R-)`` with ``M_new = M_old S_w R S_w``.

    ``M_old`` is the canonical (+,-,+,-) setup, ``M_new`` the condition-3
    basis recovered from ``ivs``. The residual collects the reconstruction
    defect, the off-block leakage of R and the unitarity defect of each block.
    """
    vecs, r_decomp = decompose_condition3(ivs, rates)
    m_old = e_setup.canonical().directions
    m_new = np.column_stack(vecs)
    r = SWAP_MIDDLE @ m_old.conj().T @ m_new @ SWAP_MIDDLE
    blocks = (r[:2, :2], r[2:, 2:])
    residual = max(
        r_decomp,
        max_abs(m_new - m_old @ SWAP_MIDDLE @ r @ SWAP_MIDDLE),
        max_abs(r[:2, 2:]),
        max_abs(r[2:, :2]),
        *(max_abs(b.conj().T @ b - np.eye(2)) for b in blocks),
    )
    return r, float(residual)


def ivs_from_rotated_setup(e_setup: MeasurementSetup, rates: ErrorRates,
                           r_plus, r_minus) -> InteractionVectors:
    """Optimal IVs in the condition-3 form, built from ``e_setup`` with its
    (+) directions mixed by ``r_plus`` and (-) directions by ``r_minus``."""
    e = e_setup.canonical()
    r = np.zeros((4, 4), dtype=complex)
    r[:2, :2] = as_cmat(r_plus, 2, 2)
    r[2:, 2:] = as_cmat(r_minus, 2, 2)
    m_new = e.directions @ SWAP_MIDDLE @ r @ SWAP_MIDDLE
    plus, minus = _conjugate_amplitudes(e.basis, rates)
    return InteractionVectors(
        plus * m_new[:, 0] + minus * m_new[:, 1],
        minus * m_new[:, 0] + plus * m_new[:, 1],
        plus * m_new[:, 2] + minus * m_new[:, 3],
        minus * m_new[:, 2] + plus * m_new[:, 3],
        basis=e.basis,
    )


def nsc_battery(ivs: InteractionVectors, e_setup: MeasurementSetup, rates: ErrorRates,
                tol: float = DEFAULT_TOL) -> NscReport:
    """Run the Fuchs condition, conditions 1-3 and the overlap corollary together."""
    basis = ivs.basis
    pijs = pijs_from_ivs(basis, rates, ivs, e_setup)
    report = check_fuchs_nsc(conjugate_pijs(pijs), e_setup, rates, tol)
    try:
        report = report.merge(check_condition1(conjugate_ivs(ivs, rates), e_setup, tol))
    except DegenerateRateError:
        report = report.merge(NscReport({"cond1": 0.0}, tol, {"cond1"}))
    report = report.merge(check_condition2(ivs, e_setup, rates, tol))
    report = report.merge(check_condition3(ivs, e_setup, rates, tol))
    report = report.merge(check_corollary_overlaps(ivs, rates, tol))
    return report


def perturb_ivs(ivs: InteractionVectors, theta: float, seed) -> InteractionVectors:
    """Rotate Eve's bit-1 states by ``exp(i theta K)`` for a random Hermitian K.

    Norms and the xi_1/zeta_1 orthogonality survive; the overlap law does not.
    """
    rng = np.random.default_rng(seed)
    u = expm_hermitian(random_hermitian(4, rng), theta)
    return InteractionVectors(ivs.xi_0, u @ ivs.xi_1, ivs.zeta_0, u @ ivs.zeta_1, basis=ivs.basis)
