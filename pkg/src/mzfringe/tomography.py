"""Single-qubit process tomography and the tomography-blindness demonstration.

Linear-inversion tomography in the Pauli basis {I, X, Y, Z}: probing a channel
with the four states {H, V, D, R} determines it completely, and the process
matrix chi satisfies channel(rho) = sum_mn chi[m, n] sigma_m rho sigma_n. A
trace-preserving channel has Tr chi = 1, so the identity channel reads
diag(1, 0, 0, 0).

The blindness demonstration builds two interferometer configurations whose
arms have identical per-arm process matrices for every crystal angle beta, yet
whose shared-environment fringe visibilities differ. The per-arm channel
traces out arrival time, so it cannot see which crystal length sits where;
the interferometer can.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import validate_density_matrix

__all__ = [
    "PAULIS",
    "PROBE_STATES",
    "qpt",
    "apply_chi",
    "chi_distance",
    "BlindnessReport",
    "blindness_demo",
]

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_KET_H = np.array([1.0, 0.0], dtype=complex)
_KET_V = np.array([0.0, 1.0], dtype=complex)
_KET_D = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_KET_R = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)

# Minimal informationally complete probe set (fixed).
PROBE_STATES = tuple(np.outer(k, k.conj()) for k in (_KET_H, _KET_V, _KET_D, _KET_R))


def qpt(channel: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Process matrix of a linear trace-preserving qubit channel.

    Probes the channel with {H, V, D, R}, validates each output as a density
    matrix, reconstructs the channel's action on the elementary matrix units
    by linearity, and projects onto the Pauli basis. Returns the 4x4 chi.
    """
    outs = []
    for i, probe in enumerate(PROBE_STATES):
        out = channel(probe)
        try:
            out = validate_density_matrix(out, f"channel output {i}")
        except ValueError as exc:
            raise ValueError(f"invalid channel: {exc}") from exc
        if out.shape != (2, 2):
            raise ValueError(f"invalid channel: output {i} has shape {out.shape}")
        outs.append(out)
    o_h, o_v, o_d, o_r = outs

    # Action on matrix units E_jk via D and R combinations:
    #   E01 = D + iR - (1+i)/2 (H + V),   E10 = D - iR - (1-i)/2 (H + V)
    action = {
        (0, 0): o_h,
        (1, 1): o_v,
        (0, 1): o_d + 1j * o_r - 0.5 * (1 + 1j) * (o_h + o_v),
        (1, 0): o_d - 1j * o_r - 0.5 * (1 - 1j) * (o_h + o_v),
    }
    # Row-major transfer matrix: vec(A rho B) = (A kron B^T) vec(rho).
    transfer = np.zeros((4, 4), dtype=complex)
    for (j, k), out in action.items():
        transfer[:, 2 * j + k] = out.reshape(4)

    chi = np.empty((4, 4), dtype=complex)
    for m in range(4):
        for n in range(4):
            basis = np.kron(PAULIS[m], PAULIS[n].T)
            chi[m, n] = np.trace(basis.conj().T @ transfer) / 4.0
    return chi


def apply_chi(chi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Apply a Pauli-basis process matrix to a state."""
    out = np.zeros((2, 2), dtype=complex)
    for m in range(4):
        for n in range(4):
            out += chi[m, n] * (PAULIS[m] @ rho @ PAULIS[n])
    return out


def chi_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of the difference of two process matrices."""
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


@dataclass(frozen=True)
class BlindnessReport:
    chi_distance_upper: float
    chi_distance_lower: float
    visibility_a: float
    visibility_b: float
    visibility_gap: float


def blindness_demo(beta: float) -> BlindnessReport:
    """Identical per-arm tomography, different fringes, at one crystal angle.

    Builds the first and third standard configurations at the same beta (they
    share per-arm angle sequences and differ only in which crystal length sits
    in which position), runs process tomography on all four arm channels, and
    reports the chi distances between corresponding arms next to the two
    shared-environment visibilities.
    """
    from .arms import arm_channel_apply
    from .experiments import standard_config
    from .interferometer import contrast_shared_env

    spec_a = standard_config("a", beta)
    spec_b = standard_config("c", beta)

    def chi_of(arm):
        return qpt(lambda rho: arm_channel_apply(arm, rho))

    d_upper = chi_distance(chi_of(spec_a.upper), chi_of(spec_b.upper))
    d_lower = chi_distance(chi_of(spec_a.lower), chi_of(spec_b.lower))
    vis_a = contrast_shared_env(spec_a).visibility
    vis_b = contrast_shared_env(spec_b).visibility
    return BlindnessReport(d_upper, d_lower, vis_a, vis_b, abs(vis_a - vis_b))
