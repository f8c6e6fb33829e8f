"""Delay-tagged Kraus operators for birefringent interferometer arms.

A birefringent crystal splits polarization into its ordinary and
extraordinary components and retards the extraordinary one, entangling the
polarization qubit with photon arrival time. An arm is an ordered list of
optical elements in traversal order; composing it yields one 2x2 Kraus
operator per distinct accumulated delay. Delays are stored in micrometers of
o/e wavepacket separation. Only delay differences are observable, so the
o-ray carries zero delay by convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from .core import UNITARY_ATOL, as_complex_matrix, rotated_basis, validate_density_matrix

__all__ = [
    "DELAY_MERGE_TOL",
    "ZERO_OP_TOL",
    "Crystal",
    "Waveplate",
    "RawUnitary",
    "ArmElement",
    "ArmSpec",
    "DelayedKraus",
    "crystal_kraus",
    "compose_arm",
    "arm_dilation",
    "arm_channel_apply",
    "kraus_dilation",
]

# Delays in scope are exact sums of configuration constants, so this tolerance
# only merges genuinely equal sums.
DELAY_MERGE_TOL = 1e-9
# Entrywise threshold below which a composed branch operator is dropped as an
# exact-orthogonality artifact.
ZERO_OP_TOL = 1e-14


@dataclass(frozen=True)
class Crystal:
    """Birefringent crystal: fast axis at ``axis_angle`` (radians from
    horizontal), o/e separation ``delay`` in micrometers."""

    axis_angle: float
    delay: float

    def __post_init__(self):
        if not np.isfinite(self.delay) or self.delay < 0:
            raise ValueError(f"crystal delay must be finite and >= 0, got {self.delay}")


@dataclass(frozen=True)
class Waveplate:
    """Half-wave plate with fast axis at ``axis_angle`` (radians)."""

    axis_angle: float


@dataclass(frozen=True)
class RawUnitary:
    """An arbitrary 2x2 unitary element acting on polarization alone."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, "matrix")
        if m.shape != (2, 2):
            raise ValueError(f"RawUnitary must be 2x2, got shape {m.shape}")
        resid = float(np.max(np.abs(m.conj().T @ m - np.eye(2))))
        if resid > UNITARY_ATOL:
            raise ValueError(f"RawUnitary is not unitary (residual {resid:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


ArmElement = Union[Crystal, Waveplate, RawUnitary]
ArmSpec = Sequence[ArmElement]


@dataclass(frozen=True)
class DelayedKraus:
    """A 2x2 polarization operator tagged with its time-bin delay (micrometers)."""

    op: np.ndarray
    delay: float


def crystal_kraus(c: Crystal) -> list[DelayedKraus]:
    """Kraus pair of a single crystal: the o-ray projector at delay 0 and the
    e-ray projector at the crystal's delay."""
    ket_o, ket_e = rotated_basis(c.axis_angle)
    return [
        DelayedKraus(np.outer(ket_o, ket_o.conj()), 0.0),
        DelayedKraus(np.outer(ket_e, ket_e.conj()), float(c.delay)),
    ]


def _element_branches(elem: ArmElement) -> list[tuple[np.ndarray, float]]:
    from .core import half_waveplate  # local import keeps module init light

    if isinstance(elem, Crystal):
        return [(dk.op, dk.delay) for dk in crystal_kraus(elem)]
    if isinstance(elem, Waveplate):
        return [(half_waveplate(elem.axis_angle), 0.0)]
    if isinstance(elem, RawUnitary):
        return [(np.array(elem.matrix), 0.0)]
    raise ValueError(f"unknown arm element {elem!r}")


def compose_arm(arm: ArmSpec) -> list[DelayedKraus]:
    """Delay-tagged Kraus operators of a whole arm.

    Expands all per-element branches in traversal order (later elements
    left-multiplied), sums the branch delays, coherently merges branches whose
    total delays coincide within ``DELAY_MERGE_TOL``, and drops operators that
    vanish entrywise below ``ZERO_OP_TOL``. The result is sorted by delay.
    """
    branches: list[tuple[np.ndarray, float]] = [(np.eye(2, dtype=complex), 0.0)]
    for elem in arm:
        branches = [
            (op_e @ op_b, d_b + d_e)
            for (op_e, d_e) in _element_branches(elem)
            for (op_b, d_b) in branches
        ]
    branches.sort(key=lambda t: t[1])

    merged: list[tuple[np.ndarray, float]] = []
    for op, d in branches:
        if merged and d - merged[-1][1] <= DELAY_MERGE_TOL:
            merged[-1] = (merged[-1][0] + op, merged[-1][1])
        else:
            merged.append((op.copy(), d))

    return [
        DelayedKraus(op, d)
        for op, d in merged
        if float(np.max(np.abs(op))) >= ZERO_OP_TOL
    ]


def kraus_dilation(kraus_ops: Sequence[DelayedKraus], bins: Sequence[float],
                   input_bin: int = 0) -> np.ndarray:
    """Unitary on polarization (x) time bins whose ``input_bin`` column blocks
    are the given Kraus operators.

    The joint space is indexed pol-major (row = p * nbins + bin). The two
    columns at (q, input_bin) carry K at each operator's bin; the remaining
    columns are an orthonormal completion, so the block at (bin_k, input_bin)
    reproduces the Kraus operator with delay bins[k].
    """
    n = len(bins)
    if n < 1:
        raise ValueError("need at least one time bin")
    big = 2 * n
    v = np.zeros((big, 2), dtype=complex)
    for dk in kraus_ops:
        k = _bin_index(bins, dk.delay)
        for p in range(2):
            for q in range(2):
                v[p * n + k, q] += dk.op[p, q]
    u = np.zeros((big, big), dtype=complex)
    in_cols = [0 * n + input_bin, 1 * n + input_bin]
    u[:, in_cols[0]] = v[:, 0]
    u[:, in_cols[1]] = v[:, 1]
    if big > 2:
        comp = scipy.linalg.null_space(v.conj().T)
        rest = [c for c in range(big) if c not in in_cols]
        u[:, rest] = comp
    return u


def _bin_index(bins: Sequence[float], delay: float) -> int:
    for i, b in enumerate(bins):
        if abs(b - delay) <= DELAY_MERGE_TOL:
            return i
    raise ValueError(f"delay {delay} not found in bins {list(bins)}")


def arm_dilation(arm: ArmSpec) -> tuple[np.ndarray, list[float]]:
    """Exact unitary dilation of an arm on polarization (x) time bins.

    Returns (unitary, bins) with bins the sorted distinct total delays of the
    arm. Extracting the block at (bin_k, bin_0) recovers the composed Kraus
    operator at bins[k].
    """
    kraus = compose_arm(arm)
    bins = [dk.delay for dk in kraus]
    return kraus_dilation(kraus, bins, 0), bins


def arm_channel_apply(arm: ArmSpec, rho) -> np.ndarray:
    """Polarization channel of an arm with the time bins traced out:
    sum_k K rho K^dag over the composed Kraus set."""
    rho = validate_density_matrix(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"arm channels act on 2x2 states, got shape {rho.shape}")
    out = np.zeros((2, 2), dtype=complex)
    for dk in compose_arm(arm):
        out += dk.op @ rho @ dk.op.conj().T
    return out
