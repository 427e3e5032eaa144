"""Weak values, Bohm variables and Wigner-Moyal phase space on periodic 1-D grids."""

from .clifford import (
    IdealElement,
    Multivector,
    clifford_density,
    complex_trace,
    density_kernel,
    epsilon,
    grade,
    ideal_to_spinor,
    matrix_representation,
    product,
    reverse,
    spinor_to_ideal,
    trace,
)
from .exceptions import (
    GridError,
    NodeError,
    NormalizationWarning,
    OperatorError,
    OrthogonalPostSelectionError,
    RepresentationError,
)
from .grid import (
    Grid,
    GridField,
    PolarField,
    build_grid,
    interpolate,
    node_mask,
    phase_gradient,
    polar_decompose,
    spectral_derivative,
    to_momentum,
    to_position,
)
from .moyal import (
    WignerTable,
    baker_bracket,
    bohm_momentum_moyal,
    cross_wigner,
    kinetic_baker,
    kinetic_moyal,
    marginal_p,
    marginal_x,
    moment_point_split,
    moyal_bracket,
    osmotic_moyal,
    star_left_p,
    star_left_p2,
    star_right_p,
    star_right_p2,
    wigner,
    wigner_momentum_route,
    wigner_point,
)
from .pauli import (
    CayleyKleinFields,
    SpinorField,
    bohm_momentum_pauli,
    bst_momentum,
    cayley_klein_compose,
    cayley_klein_decompose,
    cayley_klein_state,
    pauli_kinetic,
    pauli_quantum_potential,
    pauli_wigner,
    pauli_wigner_trace,
)
from .scenarios import Scenario, ScenarioError, default_scenarios
from .states import gaussian, plane_wave, random_smooth_state, two_gaussian
from .verify import VerificationReport, run_verify
from .weak import (
    BohmRecord,
    OperatorDescriptor,
    bohm_momentum,
    bohm_record,
    expectation,
    forward_backward_velocities,
    hamiltonian,
    momentum,
    osmotic_momentum,
    osmotic_velocity,
    polar_momenta,
    position,
    potential,
    quantum_potential,
    weak_value,
    weak_value_field,
    weak_value_position,
    wiseman_velocity,
)

__version__ = "0.1.0"

__all__ = [
    "baker_bracket",
    "bohm_momentum",
    "bohm_momentum_moyal",
    "bohm_momentum_pauli",
    "bohm_record",
    "BohmRecord",
    "bst_momentum",
    "build_grid",
    "cayley_klein_compose",
    "cayley_klein_decompose",
    "cayley_klein_state",
    "CayleyKleinFields",
    "clifford_density",
    "complex_trace",
    "cross_wigner",
    "default_scenarios",
    "density_kernel",
    "epsilon",
    "expectation",
    "forward_backward_velocities",
    "gaussian",
    "grade",
    "Grid",
    "GridError",
    "GridField",
    "hamiltonian",
    "ideal_to_spinor",
    "IdealElement",
    "interpolate",
    "kinetic_baker",
    "kinetic_moyal",
    "marginal_p",
    "marginal_x",
    "matrix_representation",
    "moment_point_split",
    "momentum",
    "moyal_bracket",
    "Multivector",
    "node_mask",
    "NodeError",
    "NormalizationWarning",
    "OperatorDescriptor",
    "OperatorError",
    "OrthogonalPostSelectionError",
    "osmotic_momentum",
    "osmotic_moyal",
    "osmotic_velocity",
    "pauli_kinetic",
    "pauli_quantum_potential",
    "pauli_wigner",
    "pauli_wigner_trace",
    "phase_gradient",
    "plane_wave",
    "polar_decompose",
    "polar_momenta",
    "PolarField",
    "position",
    "potential",
    "product",
    "quantum_potential",
    "random_smooth_state",
    "RepresentationError",
    "reverse",
    "run_verify",
    "Scenario",
    "ScenarioError",
    "spectral_derivative",
    "spinor_to_ideal",
    "SpinorField",
    "star_left_p",
    "star_left_p2",
    "star_right_p",
    "star_right_p2",
    "to_momentum",
    "to_position",
    "trace",
    "two_gaussian",
    "VerificationReport",
    "weak_value",
    "weak_value_field",
    "weak_value_position",
    "wigner",
    "wigner_momentum_route",
    "wigner_point",
    "WignerTable",
    "wiseman_velocity",
    "__version__",
]
