//! Single-excitation simulations of atoms coupled to structured photonic
//! baths: bath-graph construction, exact diagonalization, vacancy-seeded
//! dressed states, photon currents, effective atom-atom couplings and
//! topological invariants.

pub mod graph;
mod linalg;
pub mod models;
pub mod observables;
pub mod operator;
pub mod spectra;
pub mod topo;
pub mod vds;

pub mod eff;

pub mod config;
pub mod io;
pub mod scenarios;

pub use graph::{AtomSpec, BathGraph, BathMeta, Boundary, SiteId, SiteLabel, Sublattice, VacancyBath};
pub use models::{analytic_gap, bloch_gap, build_model, chain_dispersion, ModelParams};
pub use operator::{assemble_bath, assemble_full, boundary_element, HermitianOperator};
pub use spectra::{diagonalize, find_gaps, find_ingap_states, EigenSystem, GapInfo};
pub use vds::{make_vds, verify_vds, DressedState};
