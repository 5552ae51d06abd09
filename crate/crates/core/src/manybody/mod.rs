//! Many-body density matrices: field-operator reduced density matrices on
//! fixed-particle-number Fock spaces, and spin density matrices on spin-½
//! lattices.

pub mod fock;
pub mod spin;

pub use fock::{
    condensate, fermi_sea, measure_reduced, nonentangling_reduced, reduced_dm, FockSpace, ReducedDensityMatrix,
};
pub use spin::{
    heisenberg_hamiltonian, infinite_temperature, measure_spin, polarized, spin_density_matrix, total_sz, Axis,
    CouplingRange, SpinDensityMatrix,
};
