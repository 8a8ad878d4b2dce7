"""polsim: degree of polarization of two superposed, induced-coherent
signal beams, with erasable (rotation) and inerasable (idler transmission)
which-path marking, plus simulated tomography of the result."""

from .elements import (
    attenuator,
    beam_splitter,
    polarization_rotation,
    polarizer_jones,
    waveplate_jones,
)
from .errors import (
    ConfigError,
    ConfigRangeError,
    IllPosedError,
    ParameterError,
    PolsimError,
    RegistryError,
    ZeroTraceError,
)
from .fock import (
    FockState,
    ModeExpr,
    ModeId,
    ModeRegistry,
    apply_annihilation,
    apply_creation,
    apply_expr,
    inner_product,
    pair_expectation,
    unit_expr,
    vacuum,
)
from .gedanken import (
    GedankenConfig,
    degree_of_polarization_gedanken,
    detection_probability,
    extremal_probabilities,
    monte_carlo_detection,
)
from .kernels import active_backend
from .tomography import (
    DEFAULT_SETTINGS,
    DetectorModel,
    MeasurementSetting,
    TomographyRun,
    background_correct,
    expected_counts,
    mle_reconstruct,
    p_from_run,
    projector_from_setting,
    read_counts_table,
    reconstruct_run,
    simulate_counts,
    write_counts_table,
)
from .zwm import (
    CoherenceMatrix,
    ImperfectionConfig,
    ZwmConfig,
    analytic_p_general,
    analytic_p_special,
    beta,
    build_state,
    coherence_matrix,
    config_with,
    degree_of_polarization,
    numeric_degree_of_polarization,
    output_fields,
    stokes_parameters,
    zwm_registry,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
