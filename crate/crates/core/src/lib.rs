//! HP lattice proteins as pseudo-Boolean energy functions: encoding,
//! quadratization, adiabatic spectra and classical reference solvers.

pub mod adiabatic;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod oracle;
pub mod pbf;
pub mod presets;
pub mod quadratize;
pub mod resources;

pub use adiabatic::{spectrum_trace, to_spin_hamiltonian, SpectrumTrace, SpinHamiltonian};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_protein, build_protein_default, ContactMatrix, PenaltyWeights, ProteinHamiltonian,
};
pub use lattice::{InstanceSpec, LatticeInstance, Point, Residue};
pub use oracle::{brute_force_minimum, enumerate_native, hp_energy, Conformation};
pub use pbf::{Monomial, PseudoBooleanFunction, Var};
pub use quadratize::{
    quadratize, quadratize_with, verify_reduction, QuadratizationResult, SubstitutionOrder,
};
pub use resources::{resource_report, table1_counts, ResourceReport};
