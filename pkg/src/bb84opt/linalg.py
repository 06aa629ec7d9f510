"""Small dense complex linear algebra used by every other module.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
Alice's qubit is always the most significant tensor factor.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

TOL_NORM = 1e-10
TOL_UNITARY = 1e-9

# residual norm below which a standard basis vector is treated as dependent
_COMPLETION_THRESHOLD = 1e-6

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = (SIGMA_Z + SIGMA_X) / np.sqrt(2)


def as_cvec(v, dim: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a 1-D complex array, optionally checking its length."""
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected a vector of dimension {dim}, got {arr.shape[0]}")
    return arr


def as_cmat(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if rows is not None and arr.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {arr.shape[0]}")
    if cols is not None and arr.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {arr.shape[1]}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``arr``."""
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def basis_vector(index: int, dim: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


def kron(*factors) -> np.ndarray:
    """Kronecker product of any number of vectors or matrices, left factor most significant."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def inner(u, v) -> complex:
    """``<u|v>``, conjugate-linear in the first argument."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def dagger(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        return m.conj()
    return m.conj().T


def norm(v) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=complex)))


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def unitarity_defect(m) -> float:
    """``max |(m^dagger m - I)_ij|`` for a square matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"unitarity is defined for square matrices, got shape {m.shape}")
    return max_abs(m.conj().T @ m - np.eye(m.shape[0]))


def is_unitary(m, tol: float = TOL_UNITARY) -> bool:
    return unitarity_defect(m) <= tol


def gram(vectors: Sequence) -> np.ndarray:
    """Gram matrix ``G_ij = <v_i|v_j>``."""
    cols = np.column_stack([np.asarray(v, dtype=complex) for v in vectors])
    return cols.conj().T @ cols


def complete_orthonormal_basis(seed_vecs: Sequence, dim: int, tol: float = TOL_NORM) -> list[np.ndarray]:
    """Extend orthonormal ``seed_vecs`` to an orthonormal basis of ``C^dim``.

    The seeds are returned unmodified as the leading entries. The remaining
    vectors come from sweeping the standard basis e_0 ... e_{dim-1} in index
    order, orthogonalising each against everything accepted so far (two
    passes), and keeping it when the residual norm exceeds 1e-6.
    """
    seeds = [as_cvec(v, dim) for v in seed_vecs]
    if len(seeds) > dim:
        raise ValueError(f"{len(seeds)} seed vectors cannot fit in dimension {dim}")
    if seeds and max_abs(gram(seeds) - np.eye(len(seeds))) > tol:
        raise ValueError("seed vectors are not orthonormal")

    basis = [s.copy() for s in seeds]
    for k in range(dim):
        if len(basis) == dim:
            break
        w = basis_vector(k, dim)
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        r = np.linalg.norm(w)
        if r > _COMPLETION_THRESHOLD:
            basis.append(w / r)
    if len(basis) != dim:  # pragma: no cover - unreachable for orthonormal seeds
        raise RuntimeError("basis completion failed")
    return basis


def completion_matrix(first: np.ndarray) -> np.ndarray:
    """Unitary whose columns are ``complete_orthonormal_basis([first])``."""
    first = as_cvec(first)
    return np.column_stack(complete_orthonormal_basis([first], first.shape[0]))


def haar_random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary, deterministic for a fixed ``seed``."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    if dim == 1:
        rng = np.random.default_rng(seed)
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return np.asarray(unitary_group.rvs(dim, random_state=seed), dtype=complex)


def haar_random_unitaries(dim: int, count: int, seed) -> np.ndarray:
    """Stack of ``count`` Haar unitaries, shape ``(count, dim, dim)``."""
    out = unitary_group.rvs(dim, size=count, random_state=seed)
    return np.asarray(out, dtype=complex).reshape(count, dim, dim)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian matrix with unit operator norm, drawn from the GUE and rescaled."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    return h / np.max(np.abs(np.linalg.eigvalsh(h)))


def expm_hermitian(h: np.ndarray, theta: float) -> np.ndarray:
    """``exp(i theta h)`` for Hermitian ``h``."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * theta * w)) @ v.conj().T


def equal_up_to_phase(u, v, tol: float = 1e-9) -> bool:
    """True when ``u == exp(i t) v`` for some real t, within ``tol`` entrywise."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        return False
    flat_v = v.reshape(-1)
    k = int(np.argmax(np.abs(flat_v)))
    if abs(flat_v[k]) < tol:
        return max_abs(u) <= tol
    phase = u.reshape(-1)[k] / flat_v[k]
    if abs(abs(phase) - 1) > tol:
        return False
    return max_abs(u - phase * v) <= tol


# JSON wire format: complex numbers as [re, im] pairs, matrices row-major.

def complex_to_pairs(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_pairs(x) for x in arr]


def pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
