"""Desk-scale simulator of GHZ-state preparation on trapped-ion optical qubits."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    CalibrationError,
    CircuitParseError,
    FitError,
    GhzSimError,
    QubitIndexError,
    SizeError,
    ValidationError,
)
from .qstate import (  # noqa: E402
    DensityMatrix,
    Outcome,
    StateVector,
    apply_kraus,
    apply_unitary,
    ground_state,
    probabilities,
    sample_shots,
)
from .gates import ms_xx, r_phi, r_x, r_y, r_z  # noqa: E402
from .noise import (  # noqa: E402
    ConfusionMatrix,
    KrausChannel,
    NoiseSpec,
    amplitude_damping,
    apply_spam,
    calibrate_depolarizing,
    collective_dephasing,
    depolarizing,
    invert_spam,
)
from .circuit import (  # noqa: E402
    Circuit,
    Instruction,
    decompose_cx,
    decompose_h,
    fold_virtual_rz,
    parse_circuit,
    phase_insensitive_distance,
    transpile,
    unitary_of_circuit,
)
from .ghz import GhzSpec, build_ghz_circuit, ideal_ghz_state  # noqa: E402
from .simulator import simulate, simulate_statevector  # noqa: E402
from .experiments import (  # noqa: E402
    CALIBRATED_NOISE,
    MEASURED_GHZ_FIDELITIES,
    calibrate_noise_to_table1,
    direct_fidelity,
    fidelity_and_witness,
    fit_parity,
    ghz_fidelity,
    parity_of_distribution,
    parity_scan,
    population_experiment,
)
