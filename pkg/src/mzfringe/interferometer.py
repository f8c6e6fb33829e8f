"""Mach-Zehnder fringes for two arm channels sharing one time-bin environment.

The interference contrast is the complex number C whose magnitude is the
fringe visibility and whose argument sets the fringe phase. With a shared
environment, C sums Tr[u^dag v rho] over pairs of upper-arm and lower-arm
Kraus operators whose time-bin delays coincide; delays differing by more than
the coherence criterion contribute nothing (orthogonal bins). The dilation
oracle reproduces the same fringe by brute force: it evolves the full
path (x) polarization (x) time-bin state through beamsplitter, phase plate and
the controlled arm dilations, then projects the path onto the lower port.

Time-bin orthogonality is binary here: delays matching within
``DELAY_MERGE_TOL`` interfere fully, all others not at all. Partial wavepacket
overlap is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arms import ArmSpec, DELAY_MERGE_TOL, compose_arm, kraus_dilation
from .core import validate_density_matrix

__all__ = [
    "ORACLE_DIM_LIMIT",
    "InterferometerSpec",
    "FringeResult",
    "contrast_shared_env",
    "contrast_independent_env",
    "output_probability",
    "oracle_probabilities",
    "oracle_probability",
    "oracle_contrast",
    "output_polarization_state",
]

# Joint path x polarization x time-bin dimension beyond which the oracle
# refuses to run.
ORACLE_DIM_LIMIT = 4096


@dataclass
class InterferometerSpec:
    """Two arms, an input polarization state, and the (informational)
    wavepacket coherence length in micrometers."""

    upper: ArmSpec
    lower: ArmSpec
    input_state: np.ndarray
    coherence_length: float = 150.0

    def __post_init__(self):
        state = validate_density_matrix(self.input_state, "input_state")
        if state.shape != (2, 2):
            raise ValueError(f"input_state must be 2x2, got shape {state.shape}")
        self.input_state = state


@dataclass(frozen=True)
class FringeResult:
    contrast: complex
    visibility: float
    fringe_phase: float


def _fringe(c: complex) -> FringeResult:
    c = complex(c)
    return FringeResult(c, abs(c), float(np.angle(c)))


def contrast_shared_env(spec: InterferometerSpec) -> FringeResult:
    """Interference contrast when both arms disturb the same environment.

    C = sum of Tr[u^dag v rho] over delay-matched Kraus pairs (u from the
    upper arm, v from the lower).
    """
    upper = compose_arm(spec.upper)
    lower = compose_arm(spec.lower)
    rho = spec.input_state
    c = 0.0 + 0.0j
    for u in upper:
        for v in lower:
            if abs(u.delay - v.delay) <= DELAY_MERGE_TOL:
                c += np.trace(u.op.conj().T @ v.op @ rho)
    return _fringe(c)


def contrast_independent_env(upper: ArmSpec, lower: ArmSpec, rho) -> FringeResult:
    """Interference contrast when each arm carries its own environment.

    Only the undisturbed components interfere: C = Tr[u0^dag v0 rho] with u0,
    v0 the zero-delay Kraus operator of each arm (the zero matrix if an arm
    has none).
    """
    rho = validate_density_matrix(rho)
    u0 = _zero_delay_op(compose_arm(upper))
    v0 = _zero_delay_op(compose_arm(lower))
    return _fringe(np.trace(u0.conj().T @ v0 @ rho))


def _zero_delay_op(kraus) -> np.ndarray:
    for dk in kraus:
        if abs(dk.delay) <= DELAY_MERGE_TOL:
            return dk.op
    return np.zeros((2, 2), dtype=complex)


def output_probability(f: FringeResult, phi: float) -> float:
    """Lower-port detection probability P(phi) = (1 + Re[e^{i phi} C]) / 2."""
    p = 0.5 * (1.0 + (np.exp(1j * phi) * f.contrast).real)
    if abs(p - 0.5) > 0.5 + 1e-9:
        raise RuntimeError(f"probability {p} outside [0, 1]: contrast {f.contrast} "
                           "exceeds unit magnitude")
    if -1e-12 <= p < 0.0:
        p = 0.0
    elif 1.0 < p <= 1.0 + 1e-12:
        p = 1.0
    return float(p)


def _union_bins(upper, lower) -> list[float]:
    """Sorted joint time-bin delays: zero (the input bin) plus every arm
    delay, clustered within the merge tolerance."""
    delays = sorted([0.0] + [dk.delay for dk in upper] + [dk.delay for dk in lower])
    bins: list[float] = []
    for d in delays:
        if not bins or d - bins[-1] > DELAY_MERGE_TOL:
            bins.append(d)
    return bins


class _OraclePieces:
    """Phase-independent part of the dilation-oracle evolution.

    The joint state starts as |0>_path (x) rho (x) |bin_0><bin_0| with rho
    factored into scaled eigenvector columns. The first beamsplitter sends
    |0> to (|0> - |1>)/sqrt2, the phase plate multiplies the lower-arm path
    component by e^{i phi}, the controlled-arm step applies each arm's
    dilation unitary on its own path, and the closing beamsplitter is the
    inverse of the first. Worked through the 2x2 path algebra, the port
    columns become

        out_lower(phi) = (D_up + e^{i phi} D_low) A / 2
        out_upper(phi) = (D_up - e^{i phi} D_low) A / 2

    where A holds the input columns on polarization (x) bins. Only the path
    factor is treated analytically; the dilations act as explicit matrices.
    """

    def __init__(self, spec: InterferometerSpec):
        upper = compose_arm(spec.upper)
        lower = compose_arm(spec.lower)
        bins = _union_bins(upper, lower)
        n = len(bins)
        if 4 * n > ORACLE_DIM_LIMIT:
            raise ValueError(f"resource limit: joint dimension {4 * n} exceeds "
                             f"{ORACLE_DIM_LIMIT}")
        d_up = kraus_dilation(upper, bins, 0)
        d_low = kraus_dilation(lower, bins, 0)

        evals, evecs = np.linalg.eigh(spec.input_state)
        cols = evecs * np.sqrt(np.clip(evals, 0.0, None))
        a = np.zeros((2 * n, 2), dtype=complex)
        a[[0, n], :] = cols  # rows (p, bin_0) in pol-major indexing
        self.n = n
        self.bins = bins
        self.upper_cols = d_up @ a
        self.lower_cols = d_low @ a

    def port_columns(self, phi: float) -> tuple[np.ndarray, np.ndarray]:
        w = np.exp(1j * phi)
        out0 = 0.5 * (self.upper_cols + w * self.lower_cols)
        out1 = 0.5 * (self.upper_cols - w * self.lower_cols)
        return out0, out1


def oracle_probabilities(spec: InterferometerSpec, phi: float) -> tuple[float, float]:
    """Both port probabilities (lower, upper) from the dilation oracle."""
    out0, out1 = _OraclePieces(spec).port_columns(phi)
    return float(np.sum(np.abs(out0) ** 2)), float(np.sum(np.abs(out1) ** 2))


def oracle_probability(spec: InterferometerSpec, phi: float) -> float:
    """Lower-port detection probability from the dilation oracle."""
    return oracle_probabilities(spec, phi)[0]


def oracle_contrast(spec: InterferometerSpec, n_phases: int = 16) -> complex:
    """Complex contrast extracted from the oracle fringe.

    Samples P(phi) on a uniform phase grid and returns its unit-frequency
    Fourier component, C = 4 <P(phi_k) e^{-i phi_k}>. Requires n_phases >= 3
    so the conjugate component aliases to zero.
    """
    if n_phases < 3:
        raise ValueError("need at least 3 phases to extract the contrast")
    pieces = _OraclePieces(spec)
    phis = 2.0 * np.pi * np.arange(n_phases) / n_phases
    acc = 0.0 + 0.0j
    for phi in phis:
        out0, _ = pieces.port_columns(phi)
        acc += np.sum(np.abs(out0) ** 2) * np.exp(-1j * phi)
    return complex(4.0 * acc / n_phases)


def output_polarization_state(spec: InterferometerSpec, phi: float) -> np.ndarray:
    """Conditional polarization state in the lower port, post-selected on
    detection at phase ``phi``."""
    pieces = _OraclePieces(spec)
    out0, _ = pieces.port_columns(phi)
    p = float(np.sum(np.abs(out0) ** 2))
    if p < 1e-12:
        raise RuntimeError(f"degenerate post-selection: detection probability {p:.3e}")
    n = pieces.n
    block = out0 @ out0.conj().T  # on polarization (x) bins
    rho_pol = block.reshape(2, n, 2, n).trace(axis1=1, axis2=3)
    return rho_pol / p
