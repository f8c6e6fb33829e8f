"""Complex matrix plumbing and elementary polarization-optics operators.

Conventions used throughout the package: the polarization basis is ordered
(H, V), path states are ordered (|0> = lower output port, |1> = upper), and
every matrix is a dense complex128 numpy array. All tolerances are absolute
and entrywise, which is adequate here because every matrix in scope has
entries of magnitude <= 1.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "HERMITIAN_ATOL",
    "TRACE_ATOL",
    "EIGENVALUE_FLOOR",
    "CPTP_ATOL",
    "UNITARY_ATOL",
    "CptpCheck",
    "as_complex_matrix",
    "mat_mul",
    "adjoint",
    "trace",
    "kron",
    "partial_trace",
    "beamsplitter",
    "phase_shifter",
    "rotated_basis",
    "half_waveplate",
    "maximally_mixed",
    "validate_cptp",
    "validate_density_matrix",
]

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
CPTP_ATOL = 1e-10
UNITARY_ATOL = 1e-10


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce input to a 2-d complex128 array, rejecting empty or non-finite data."""
    arr = np.array(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-d matrix with at least one row and column, "
                         f"got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def mat_mul(a, b) -> np.ndarray:
    """Matrix product a @ b with an explicit inner-dimension check."""
    am = as_complex_matrix(a, "a")
    bm = as_complex_matrix(b, "b")
    if am.shape[1] != bm.shape[0]:
        raise ValueError(f"dimension mismatch: cannot multiply {am.shape} by {bm.shape}")
    return am @ bm


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(a).conj().T


def trace(a) -> complex:
    """Trace of a square matrix."""
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"trace requires a square matrix, got shape {m.shape}")
    return complex(np.trace(m))


def kron(a, b) -> np.ndarray:
    """Tensor product with the row-major block convention (left factor varies slowly)."""
    return np.kron(as_complex_matrix(a, "a"), as_complex_matrix(b, "b"))


def partial_trace(state, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced matrix of ``state`` over the tensor factors listed in ``keep``.

    Parameters
    ----------
    state : array_like
        Square matrix on the tensor product of factors with dimensions ``dims``.
    dims : sequence of int
        Dimension of each factor, in kron order (left factor first).
    keep : iterable of int
        Indices of the factors to keep; the rest are traced out. Kept factors
        stay in their original relative order.
    """
    rho = as_complex_matrix(state, "state")
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValueError("all factor dimensions must be >= 1")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"state shape {rho.shape} does not match factor dimensions {dims}")
    n = len(dims)
    keep = sorted({int(k) for k in keep})
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} factors")

    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many tensor factors")
    row = list(letters[:n])
    col = []
    j = n
    for i in range(n):
        if i in keep:
            col.append(letters[j])
            j += 1
        else:
            col.append(row[i])  # repeated index: traced out
    subscript = "".join(row) + "".join(col) + "->" + \
        "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum(subscript, rho.reshape(dims + dims))
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def beamsplitter() -> np.ndarray:
    """50/50 beamsplitter unitary on the path qubit, (1/sqrt2) [[1, 1], [-1, 1]]."""
    return np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / np.sqrt(2.0)


def phase_shifter(phi: float) -> np.ndarray:
    """Phase plate diag(1, e^{i phi}) on the path qubit."""
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * phi)]], dtype=complex)


def rotated_basis(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal polarization pair at angle theta from horizontal.

    Returns (ket_o, ket_e) with ket_o = (cos t, sin t) and ket_e = (-sin t, cos t)
    in the (H, V) basis.
    """
    c, s = np.cos(theta), np.sin(theta)
    ket_o = np.array([c, s], dtype=complex)
    ket_e = np.array([-s, c], dtype=complex)
    return ket_o, ket_e


def half_waveplate(theta: float) -> np.ndarray:
    """Jones matrix of a half-wave plate with fast axis at ``theta``.

    Reflection about the axis, [[cos 2t, sin 2t], [sin 2t, -cos 2t]]; the
    conventional -i global phase is dropped.
    """
    c, s = np.cos(2.0 * theta), np.sin(2.0 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def maximally_mixed(d: int) -> np.ndarray:
    """The maximally mixed state I/d."""
    d = int(d)
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return np.eye(d, dtype=complex) / d


class CptpCheck(NamedTuple):
    passed: bool
    residual: float


def validate_cptp(operators: Sequence[np.ndarray], atol: float = CPTP_ATOL) -> CptpCheck:
    """Check trace preservation of a Kraus set: sum K^dag K == identity.

    Returns the max-entry residual of |sum K^dag K - I|; passes iff it is
    within ``atol``.
    """
    ops = [as_complex_matrix(k, f"operators[{i}]") for i, k in enumerate(operators)]
    if not ops:
        raise ValueError("Kraus set must contain at least one operator")
    d = ops[0].shape[0]
    for i, k in enumerate(ops):
        if k.shape != (d, d):
            raise ValueError(f"operators[{i}] has shape {k.shape}, expected ({d}, {d})")
    acc = np.zeros((d, d), dtype=complex)
    for k in ops:
        acc += k.conj().T @ k
    residual = float(np.max(np.abs(acc - np.eye(d))))
    return CptpCheck(residual <= atol, residual)


def validate_density_matrix(rho, name: str = "rho") -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite.

    Raises ValueError naming the violated property; returns the validated
    complex array on success.
    """
    arr = as_complex_matrix(rho, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    herm_resid = float(np.max(np.abs(arr - arr.conj().T)))
    if herm_resid > HERMITIAN_ATOL:
        raise ValueError(f"{name} is not Hermitian (residual {herm_resid:.3e})")
    tr = complex(np.trace(arr))
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"{name} trace is {tr}, expected 1")
    eigs = np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))
    if float(eigs.min()) < EIGENVALUE_FLOOR:
        raise ValueError(f"{name} has a negative eigenvalue ({eigs.min():.3e})")
    return arr
