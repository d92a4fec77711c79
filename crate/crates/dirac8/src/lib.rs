//! Eight-component Dirac-type equation toolkit.

pub mod classify;
pub mod clifford;
pub mod error;
pub mod evolve;
pub mod fft;
pub mod field;
pub mod grid;
pub mod matrix;
pub mod operator;
pub mod poincare;
pub mod projector;
pub mod sampling;
pub mod scalar;
pub mod symmetry;
pub mod verify;

pub use classify::{
    classify_modes, dirac_reduction_report, klein_gordon_residual, modified_equation_kernel,
    rep_label, KernelReport, PlaneWaveMode, RepLabel,
};
pub use clifford::{build_gamma_set, clifford_residual, monomial_basis, spin_generator, GammaSet};
pub use error::{Dirac8Error, Result};
pub use evolve::{
    constraint_drift, evolve, gaussian_packet, observables, EvolutionModel, ModeTable,
    ObservableRecord, ObservableSeries,
};
pub use field::{localized_packet, SpinorField};
pub use grid::Grid;
pub use matrix::{Matrix8, Vector8};
pub use operator::{apply, commutator_residual, generator, FieldOperator};
pub use poincare::{expected_bracket, hamiltonian_matrix, GeneratorId};
pub use projector::{
    apply_projector, epsilon_hat_matrix, generator_commutation_residual, projector_matrix,
    ProjectorSpec,
};
pub use scalar::Real;
pub use symmetry::{
    check_coupling_scheme, find_intertwiners, induced_label_map, CouplingSchemeReport,
    IntertwinerResult, SymmetryContract,
};
pub use verify::{run_suite, CheckResult, VerifyReport, VerifySettings};

/// Concrete f64 instantiations (the default working precision).
pub type Mat8 = Matrix8<f64>;
pub type Vec8 = Vector8<f64>;
pub type GammaSet64 = GammaSet<f64>;
