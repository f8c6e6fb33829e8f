"""Standard interferometer configurations, visibility sweeps, photon-count
simulation, fringe fitting, and the unbalanced-interferometer key-distribution
reduction.

Four built-in configurations (tags "a" through "d") pair two-crystal arms, or
half-wave-plate arms for "d", against each other with the maximally mixed
input. The crystal o/e separations are 150 um (short) and 310 um (long). Each
configuration has a closed-form contrast in the crystal angle beta; the sweep
table puts the closed form, the shared-environment simulation, and the
dilation oracle side by side.

Photon counting is modeled as independent Poisson draws per phase point from a
deterministic, documented sampler (see ``poisson_fringe``), and fringes are
recovered by a Gauss-Newton least-squares fit of A (1 + v cos(phi + psi)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .arms import ArmElement, Crystal, RawUnitary, Waveplate
from .core import maximally_mixed, validate_density_matrix
from .interferometer import (
    InterferometerSpec,
    contrast_shared_env,
    oracle_contrast,
    output_probability,
)

__all__ = [
    "SHORT_CRYSTAL_UM",
    "LONG_CRYSTAL_UM",
    "VARIANTS",
    "standard_config",
    "closed_form_contrast",
    "predicted_visibility",
    "SweepRow",
    "sweep",
    "default_beta_grid",
    "CountRecord",
    "poisson_fringe",
    "FitResult",
    "fit_fringe",
    "QkdSpec",
    "qkd_visibility",
    "random_arm",
    "random_interferometer_spec",
]

SHORT_CRYSTAL_UM = 150.0
LONG_CRYSTAL_UM = 310.0

VARIANTS = ("a", "b", "c", "d")


def standard_config(variant: str, beta: float) -> InterferometerSpec:
    """One of the four standard configurations at crystal angle ``beta``.

    Arms list crystals in traversal order, second-position crystal first. The
    "d" variant replaces the crystals with one half-wave plate per arm, fixed
    at pi/8 in the upper arm and at beta in the lower.
    """
    l1, l2 = SHORT_CRYSTAL_UM, LONG_CRYSTAL_UM
    if variant == "a":
        upper = [Crystal(0.0, l2), Crystal(beta, l1)]
        lower = [Crystal(beta, l1), Crystal(0.0, l2)]
    elif variant == "b":
        upper = [Crystal(beta, l2), Crystal(0.0, l1)]
        lower = [Crystal(beta, l1), Crystal(0.0, l2)]
    elif variant == "c":
        upper = [Crystal(0.0, l1), Crystal(beta, l2)]
        lower = [Crystal(beta, l1), Crystal(0.0, l2)]
    elif variant == "d":
        upper = [Waveplate(np.pi / 8.0)]
        lower = [Waveplate(beta)]
    else:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    return InterferometerSpec(upper=upper, lower=lower, input_state=maximally_mixed(2))


def closed_form_contrast(variant: str, beta: float) -> float:
    """Signed closed-form contrast of a configuration.

    A negative value means a pi-shifted fringe; its magnitude is the
    visibility. Variant "d" uses the polarization-rotation-doubling half-wave
    plate convention, cos(2 (beta - pi/8)).
    """
    if variant == "a":
        return 1.0 - np.sin(2.0 * beta) ** 2 / 2.0
    if variant == "b":
        return np.cos(beta) ** 2
    if variant == "c":
        return np.cos(beta) ** 2 * np.cos(2.0 * beta)
    if variant == "d":
        return float(np.cos(2.0 * (beta - np.pi / 8.0)))
    raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")


def predicted_visibility(variant: str, beta: float) -> float:
    """Closed-form fringe visibility |C| of a configuration."""
    return abs(closed_form_contrast(variant, beta))


@dataclass(frozen=True)
class SweepRow:
    beta: float
    v_closed_form: float  # signed
    v_simulated: float
    v_oracle: float


def default_beta_grid(points: int = 25) -> np.ndarray:
    """Evenly spaced crystal angles over [0, pi/2]."""
    return np.linspace(0.0, np.pi / 2.0, points)


def sweep(variant: str, betas: Sequence[float]) -> list[SweepRow]:
    """Closed-form, simulated, and oracle visibilities over a beta grid.

    The closed-form column keeps its sign; the simulated and oracle columns
    are contrast magnitudes.
    """
    rows = []
    for beta in betas:
        spec = standard_config(variant, beta)
        rows.append(SweepRow(
            beta=float(beta),
            v_closed_form=float(closed_form_contrast(variant, beta)),
            v_simulated=contrast_shared_env(spec).visibility,
            v_oracle=abs(oracle_contrast(spec)),
        ))
    return rows


@dataclass(frozen=True)
class CountRecord:
    phi: float
    counts: int
    expected: float


def _sample_poisson(lam: float, rng: np.random.Generator) -> int:
    """Deterministic Poisson draw from a single uniform variate.

    CDF inversion below mean 30; above that, a normal approximation with
    continuity correction, k = max(0, floor(lam + sqrt(lam) z + 1/2)). Both
    branches consume exactly one uniform, keeping streams aligned and
    platform-independent.
    """
    if lam <= 0.0:
        return 0
    u = float(rng.random())
    u = min(max(u, 1e-300), 1.0 - 1e-16)
    if lam < 30.0:
        p = np.exp(-lam)
        cdf = p
        k = 0
        limit = int(lam + 20.0 * np.sqrt(lam) + 20.0)
        while u > cdf and k < limit:
            k += 1
            p *= lam / k
            cdf += p
        return k
    z = float(ndtri(u))
    return max(0, int(np.floor(lam + np.sqrt(lam) * z + 0.5)))


def poisson_fringe(spec: InterferometerSpec, phis: Sequence[float],
                   mean_total: int, seed: int) -> list[CountRecord]:
    """Simulated coincidence counts along a fringe.

    Per phase point, the expectation is mean_total * P(phi) and the count is
    one Poisson draw. Each point draws from its own PCG64 generator seeded
    with (seed, point index), so results do not depend on evaluation order,
    and identical (spec, phis, mean_total, seed) reproduce identical counts.
    """
    if mean_total < 1:
        raise ValueError("mean_total must be >= 1")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    fringe = contrast_shared_env(spec)
    records = []
    for i, phi in enumerate(phis):
        expected = mean_total * output_probability(fringe, phi)
        rng = np.random.default_rng([int(seed), i])
        records.append(CountRecord(float(phi), _sample_poisson(expected, rng),
                                   float(expected)))
    return records


@dataclass(frozen=True)
class FitResult:
    amplitude: float
    visibility_hat: float
    phase_hat: float
    stderr_visibility: float
    iterations: int
    converged: bool


def _fringe_model(phis, amp, vis, psi):
    return amp * (1.0 + vis * np.cos(phis + psi))


def fit_fringe(records: Sequence[CountRecord]) -> FitResult:
    """Least-squares fringe fit of A (1 + v cos(phi + psi)) to count records.

    Initializes from the unit-frequency discrete Fourier component, then
    refines with Gauss-Newton under Poisson weights (variance taken as the
    model value, floored at one count) for at most 100 iterations or until the
    step norm drops below 1e-10. The visibility standard error comes from the
    weighted Jacobian at the optimum. Counts are treated as real-valued
    measurements, so exactly noiseless synthetic fringes are recovered to
    numerical precision.
    """
    if len(records) < 4:
        raise ValueError("need at least 4 records to fit a fringe")
    phis = np.array([r.phi for r in records], dtype=float)
    counts = np.array([r.counts for r in records], dtype=float)
    if phis.max() - phis.min() <= np.pi:
        raise ValueError("records must span more than half a fringe period")

    amp = float(counts.mean())
    if amp <= 0.0:
        return FitResult(0.0, 0.0, 0.0, 0.0, 0, False)
    z = np.mean(counts * np.exp(-1j * phis))
    psi = float(np.angle(z))
    vis = float(min(2.0 * abs(z) / amp, 1.0))

    theta = np.array([amp, vis, psi], dtype=float)
    iterations = 0
    converged = False
    for _ in range(100):
        iterations += 1
        model = _fringe_model(phis, *theta)
        w = 1.0 / np.maximum(model, 1.0)
        sw = np.sqrt(w)
        resid = counts - model
        jac = np.column_stack([
            1.0 + theta[1] * np.cos(phis + theta[2]),
            theta[0] * np.cos(phis + theta[2]),
            -theta[0] * theta[1] * np.sin(phis + theta[2]),
        ])
        step, *_ = np.linalg.lstsq(sw[:, None] * jac, sw * resid, rcond=None)
        theta = theta + step
        if float(np.linalg.norm(step)) < 1e-10:
            converged = True
            break

    amp, vis, psi = (float(t) for t in theta)
    if vis < 0.0:  # fold the (v, psi) -> (-v, psi + pi) symmetry
        vis, psi = -vis, psi + np.pi
    psi = float(np.arctan2(np.sin(psi), np.cos(psi)))
    vis = min(vis, 1.0)

    model = _fringe_model(phis, amp, vis, psi)
    w = 1.0 / np.maximum(model, 1.0)
    jac = np.column_stack([
        1.0 + vis * np.cos(phis + psi),
        amp * np.cos(phis + psi),
        -amp * vis * np.sin(phis + psi),
    ])
    normal = jac.T @ (w[:, None] * jac)
    cov = np.linalg.pinv(normal)
    stderr = float(np.sqrt(max(cov[1, 1].real, 0.0)))
    return FitResult(amp, vis, psi, stderr, iterations, converged)


@dataclass
class QkdSpec:
    """Four channel segments of an unbalanced-interferometer key link.

    Segments u1, u2 lie on one of the two interfering path combinations
    through the linked interferometers, u3, u4 on the other. With an identity
    channel between the two unbalanced interferometers, the link reduces to a
    single balanced interferometer with u1+u2 as the upper arm and u3+u4 as
    the lower.
    """

    u1: Sequence[ArmElement]
    u2: Sequence[ArmElement]
    u3: Sequence[ArmElement]
    u4: Sequence[ArmElement]
    input_state: np.ndarray

    def __post_init__(self):
        self.input_state = validate_density_matrix(self.input_state, "input_state")


def random_arm(rng: np.random.Generator, max_elements: int = 3,
               delays: Sequence[float] = (0.0, 75.0, 150.0, 310.0)) -> list[ArmElement]:
    """A random arm for cross-checking the simulator against the oracle.

    Draws up to ``max_elements`` elements: crystals with angles uniform in
    [0, pi) and delays from the given set, half-wave plates, and Haar-ish
    random unitaries.
    """
    elements: list[ArmElement] = []
    for _ in range(int(rng.integers(0, max_elements + 1))):
        kind = rng.random()
        if kind < 0.5:
            elements.append(Crystal(float(rng.uniform(0.0, np.pi)),
                                    float(rng.choice(delays))))
        elif kind < 0.75:
            elements.append(Waveplate(float(rng.uniform(0.0, np.pi))))
        else:
            gauss = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            q, r = np.linalg.qr(gauss)
            q = q * (np.diag(r) / np.abs(np.diag(r)))
            elements.append(RawUnitary(q))
    return elements


def random_interferometer_spec(rng: np.random.Generator,
                               max_elements: int = 3) -> InterferometerSpec:
    """A random two-arm spec with a random mixed input state."""
    gauss = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = gauss @ gauss.conj().T
    rho = rho / np.trace(rho)
    return InterferometerSpec(
        upper=random_arm(rng, max_elements),
        lower=random_arm(rng, max_elements),
        input_state=rho,
    )


def qkd_visibility(spec: QkdSpec) -> tuple[float, float]:
    """Fringe visibility and qubit error rate of the reduced key link.

    QBER is modeled as (1 - visibility) / 2: at unit visibility the wrong
    port never fires, at zero visibility it fires half the time.
    """
    mzi = InterferometerSpec(
        upper=list(spec.u1) + list(spec.u2),
        lower=list(spec.u3) + list(spec.u4),
        input_state=spec.input_state,
    )
    vis = contrast_shared_env(mzi).visibility
    return vis, (1.0 - vis) / 2.0
