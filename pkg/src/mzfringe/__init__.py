"""Single-photon Mach-Zehnder interference of polarization channels that share
a time-bin environment: delay-tagged Kraus composition, fringe contrast and
visibility, a brute-force dilation oracle, process-tomography blindness, and
count-level fringe statistics."""

from .arms import (
    ArmElement,
    ArmSpec,
    Crystal,
    DelayedKraus,
    RawUnitary,
    Waveplate,
    arm_channel_apply,
    arm_dilation,
    compose_arm,
    crystal_kraus,
)
from .core import (
    CptpCheck,
    adjoint,
    beamsplitter,
    half_waveplate,
    kron,
    mat_mul,
    maximally_mixed,
    partial_trace,
    phase_shifter,
    rotated_basis,
    trace,
    validate_cptp,
    validate_density_matrix,
)
from .experiments import (
    CountRecord,
    FitResult,
    QkdSpec,
    SweepRow,
    closed_form_contrast,
    standard_config,
    default_beta_grid,
    fit_fringe,
    poisson_fringe,
    predicted_visibility,
    qkd_visibility,
    sweep,
)
from .interferometer import (
    FringeResult,
    InterferometerSpec,
    contrast_independent_env,
    contrast_shared_env,
    oracle_contrast,
    oracle_probabilities,
    oracle_probability,
    output_polarization_state,
    output_probability,
)
from .tomography import (
    BlindnessReport,
    apply_chi,
    blindness_demo,
    chi_distance,
    qpt,
)

__version__ = "0.1.0"
