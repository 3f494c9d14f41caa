//! Exact diagonalization of open-boundary Heisenberg chains (spin-1/2 and
//! spin-1) and their nearest-neighbour entanglement in eigenstates and in
//! thermal equilibrium.
//!
//! The pipeline is
//! [`hilbert`] → [`hamiltonian`] → [`spectra`] → [`observables`] →
//! [`entanglement`] / [`thermal`]; [`cli`] wraps it into reproducible CSV and
//! JSON artifacts.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod observables;
pub mod output;
pub mod spectra;
pub mod thermal;

pub use entanglement::{bond_profile, EntanglementProfile, Measure};
pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, BlockOperator};
pub use hilbert::{ChainBasis, ChainSpec, SpinKind};
pub use observables::{BondExpectations, QuantumState, TwoSiteRdm};
pub use spectra::{diagonalize, group_levels, EnergyLevel, SolvedChain, Spectrum};
pub use thermal::{threshold_temperature, GibbsEnsemble, ThermalChain, ThresholdResult};
