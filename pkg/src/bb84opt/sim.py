"""Exact and sampled statistics of BB84 under an attack unitary.

Sampling is split into fixed-size chunks, each with its own
``SeedSequence`` child, so the result does not depend on how many worker
threads process the chunks.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import SIGMA_X, SIGMA_Z, haar_random_unitaries, max_abs
from .states import Basis, ErrorRates, MeasurementSetup, Pijs, conjugate_setup, encode
from .synth import AttackUnitary

CHUNK = 1 << 16
BASES = (Basis.COMPUTATIONAL, Basis.HADAMARD)


def exact_joint_distribution(attack: AttackUnitary, basis: Basis, eve_setup: MeasurementSetup) -> np.ndarray:
    """``P[a, b, lam]`` for Alice's bit ``a``, Bob's result ``b`` and Eve's outcome ``lam``.

    Bob measures in the encoding basis. Each ``P[a]`` sums to one.
    """
    basis = Basis.parse(basis)
    table = np.empty((2, 2, 4))
    m = eve_setup.directions
    for a, s in enumerate(attack.images(basis)):
        s = s.reshape(2, 4)
        for b in range(2):
            eve = encode(b, basis).conj() @ s
            table[a, b] = np.abs(m.conj().T @ eve) ** 2
    return table


def guess_table(eve_setup: MeasurementSetup) -> np.ndarray:
    return np.array([eve_setup.guess(k) for k in range(4)])


def eve_accuracy_exact(table: np.ndarray, eve_setup: MeasurementSetup) -> float:
    """Success of Eve's sign strategy at equal prior on Alice's bit."""
    g = guess_table(eve_setup)
    return 0.5 * sum(table[a, :, g == a].sum() for a in range(2))


def mutual_information(joint: np.ndarray) -> float:
    """Plug-in mutual information of a 2-D joint table (counts or probabilities)."""
    joint = np.asarray(joint, dtype=float)
    total = joint.sum()
    if total <= 0:
        return 0.0
    p = joint / total
    outer = p.sum(axis=1, keepdims=True) * p.sum(axis=0, keepdims=True)
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / outer[mask])))


@dataclass
class SimConfig:
    rates: ErrorRates
    n_rounds: int
    seed: int
    attack: AttackUnitary
    eve_setups: dict = field(default=None)
    workers: int = 1

    def __post_init__(self):
        if self.n_rounds <= 0:
            raise ValueError("n_rounds must be positive")
        if self.eve_setups is None:
            xy = self.attack.measurement
            self.eve_setups = {Basis.COMPUTATIONAL: xy, Basis.HADAMARD: conjugate_setup(xy)}


@dataclass
class SimStats:
    n_rounds: int
    sifted: int
    sift_rate: float
    qber: dict
    eve_accuracy: float
    eve_accuracy_by_basis: dict
    mi_ab_hat: float
    mi_ae_hat: float
    mi_eb_hat: float
    bob_z_expectation: float
    counts: list

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _sample_chunk(tables: np.ndarray, n: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    """Histogram ``[beta, a, b, lam]`` of sifted rounds in one chunk."""
    rng = np.random.default_rng(seed_seq)
    a = rng.integers(0, 2, n)
    beta = rng.integers(0, 2, n)
    beta_bob = rng.integers(0, 2, n)
    keep = beta == beta_bob
    a, beta = a[keep], beta[keep]
    u = rng.random(a.shape[0])
    # joint (b, lam) outcome per round by inverse-CDF on the 8 cells
    cdf = np.cumsum(tables.reshape(2, 2, 8), axis=-1)
    cdf[..., -1] = 1.0
    cell = np.empty(a.shape[0], dtype=np.int64)
    for bb in range(2):
        for aa in range(2):
            sel = (beta == bb) & (a == aa)
            cell[sel] = np.searchsorted(cdf[bb, aa], u[sel], side="right")
    flat = (beta * 2 + a) * 8 + cell
    return np.bincount(flat, minlength=32).reshape(2, 2, 2, 4)


def run_pm(config: SimConfig) -> SimStats:
    """Prepare-and-measure rounds with sifting and Eve's sign strategy."""
    tables = np.stack([
        exact_joint_distribution(config.attack, b, config.eve_setups[b]) for b in BASES
    ])
    sizes = [CHUNK] * (config.n_rounds // CHUNK)
    if config.n_rounds % CHUNK:
        sizes.append(config.n_rounds % CHUNK)
    seeds = [np.random.SeedSequence(config.seed, spawn_key=(i,)) for i in range(len(sizes))]
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            parts = list(pool.map(lambda args: _sample_chunk(tables, *args), zip(sizes, seeds)))
    else:
        parts = [_sample_chunk(tables, n, s) for n, s in zip(sizes, seeds)]
    counts = np.sum(parts, axis=0)
    return stats_from_counts(counts, config)


def stats_from_counts(counts: np.ndarray, config: SimConfig) -> SimStats:
    sifted = int(counts.sum())
    qber, acc = {}, {}
    hits = 0
    for i, b in enumerate(BASES):
        c = counts[i]
        n_b = c.sum()
        qber[b.value] = float((c[0, 1].sum() + c[1, 0].sum()) / n_b) if n_b else 0.0
        g = guess_table(config.eve_setups[b])
        right = sum(c[a][:, g == a].sum() for a in range(2))
        acc[b.value] = float(right / n_b) if n_b else 0.0
        hits += right
    ab = counts.sum(axis=3).sum(axis=0)
    ae = counts.sum(axis=2).sum(axis=0)
    eb = counts.sum(axis=1).sum(axis=0).T
    xy0 = counts[0, 0].sum(axis=1)
    z_hat = float((xy0[0] - xy0[1]) / xy0.sum()) if xy0.sum() else 0.0
    return SimStats(
        n_rounds=config.n_rounds,
        sifted=sifted,
        sift_rate=sifted / config.n_rounds,
        qber=qber,
        eve_accuracy=float(hits / sifted) if sifted else 0.0,
        eve_accuracy_by_basis=acc,
        mi_ab_hat=mutual_information(ab),
        mi_ae_hat=mutual_information(ae),
        mi_eb_hat=mutual_information(eb),
        bob_z_expectation=z_hat,
        counts=counts.tolist(),
    )


def cell_comparison_csv(stats: SimStats, config: SimConfig) -> str:
    """Exact vs empirical conditional probabilities ``P(b, lam | basis, a)``."""
    counts = np.asarray(stats.counts)
    lines = ["basis,a,b,lambda,exact,empirical,n"]
    for i, basis in enumerate(BASES):
        table = exact_joint_distribution(config.attack, basis, config.eve_setups[basis])
        for a in range(2):
            n = counts[i, a].sum()
            for b in range(2):
                for lam in range(4):
                    emp = counts[i, a, b, lam] / n if n else 0.0
                    lines.append(f"{basis.value},{a},{b},{lam},{table[a, b, lam]:.12g},{emp:.12g},{n}")
    return "\n".join(lines) + "\n"


# entanglement-based CHSH test

CHSH_ALICE = (SIGMA_Z, SIGMA_X)
CHSH_BOB = ((SIGMA_Z + SIGMA_X) / math.sqrt(2), (SIGMA_Z - SIGMA_X) / math.sqrt(2))
CHSH_SIGNS = np.array([[1, 1], [1, -1]])


def noisy_bell_density(d: float) -> np.ndarray:
    """``Phi+`` with Bob's Bloch components contracted by ``1 - 2d``."""
    eta = 1 - 2 * d
    phi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    pure = np.outer(phi, phi.conj())
    return eta * pure + (1 - eta) * np.eye(4) / 4


def _outcome_probs(rho: np.ndarray, a_obs: np.ndarray, b_obs: np.ndarray) -> np.ndarray:
    """Probabilities of (+,+), (+,-), (-,+), (-,-) for two +-1 observables."""
    out = []
    for sa in (1, -1):
        pa = (np.eye(2) + sa * a_obs) / 2
        for sb in (1, -1):
            pb = (np.eye(2) + sb * b_obs) / 2
            out.append(np.trace(rho @ np.kron(pa, pb)).real)
    p = np.clip(np.array(out), 0, None)
    return p / p.sum()


def chsh_exact(d: float) -> float:
    rho = noisy_bell_density(d)
    s = 0.0
    for i in range(2):
        for j in range(2):
            p = _outcome_probs(rho, CHSH_ALICE[i], CHSH_BOB[j])
            s += CHSH_SIGNS[i, j] * (p[0] - p[1] - p[2] + p[3])
    return float(s)


def run_eb_chsh_detail(d: float, n_rounds: int, seed: int) -> tuple[float, float]:
    """``(S estimate, standard error)`` from ``n_rounds`` uniformly chosen setting pairs."""
    if not 0 <= d <= 0.5:
        raise ValueError(f"d={d} outside [0, 1/2]")
    rng = np.random.default_rng(seed)
    rho = noisy_bell_density(d)
    per_setting = rng.multinomial(n_rounds, [0.25] * 4)
    s, var = 0.0, 0.0
    for k, n in enumerate(per_setting):
        i, j = divmod(k, 2)
        if n == 0:
            raise ValueError("too few rounds to populate every setting pair")
        c = rng.multinomial(n, _outcome_probs(rho, CHSH_ALICE[i], CHSH_BOB[j]))
        e = (c[0] - c[1] - c[2] + c[3]) / n
        s += CHSH_SIGNS[i, j] * e
        var += (1 - e * e) / n
    return float(s), math.sqrt(var)


def run_eb_chsh(d: float, n_rounds: int, seed: int) -> float:
    return run_eb_chsh_detail(d, n_rounds, seed)[0]


# information-gain oracle

def check_density(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density, got shape {rho.shape}")
    if max_abs(rho - rho.conj().T) > tol:
        raise ValueError("density is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValueError("density does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density is not positive semidefinite")
    return rho


def eigen_ig(rho_0: np.ndarray, rho_1: np.ndarray) -> float:
    """Statistical distance reached by measuring the eigenbasis of ``rho_0 - rho_1``."""
    return 0.5 * float(np.abs(np.linalg.eigvalsh(rho_0 - rho_1)).sum())


def brute_force_ig(rho_0, rho_1, n_povms: int, seed: int, batch: int = 2000) -> tuple[float, float]:
    """Best statistical distance over Haar-random 4-outcome projective measurements."""
    rho_0, rho_1 = check_density(rho_0), check_density(rho_1)
    delta = rho_0 - rho_1
    best = 0.0
    ss = np.random.SeedSequence(seed)
    for start, child in zip(range(0, n_povms, batch), ss.spawn(-(-n_povms // batch))):
        us = haar_random_unitaries(4, min(batch, n_povms - start), np.random.default_rng(child))
        # diff[k, lam] = <u_lam| delta |u_lam>
        diff = np.einsum("kil,ij,kjl->kl", us.conj(), delta, us).real
        best = max(best, float(0.5 * np.abs(diff).sum(axis=1).max()))
    return best, eigen_ig(rho_0, rho_1)


def eve_reduced_density(pijs: Pijs, bit: int) -> np.ndarray:
    """Eve's state ``Tr_B |S_bit><S_bit|``."""
    s = pijs.states[bit].reshape(2, 4)
    return s.T @ s.conj()


__all__ = [
    "SimConfig", "SimStats", "exact_joint_distribution", "eve_accuracy_exact", "mutual_information",
    "run_pm", "cell_comparison_csv", "run_eb_chsh", "run_eb_chsh_detail", "chsh_exact",
    "brute_force_ig", "eigen_ig", "eve_reduced_density", "check_density",
]
