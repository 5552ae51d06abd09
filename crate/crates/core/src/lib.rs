//! Operator-based entanglement measure for finite multipartite systems.
//!
//! For an operator `A` on a composite space `H = ⊗ H_i` the crate builds the
//! nonentangling counterpart `A⊗` from the single-part reductions of `A` and
//! evaluates
//!
//! ```text
//! ε(A) = log( ‖A‖_D / ‖A⊗‖_D )
//! ```
//!
//! where `‖·‖_D` is the supremum of `|⟨f|A|f⟩|` over normalized product
//! states `f`. The restricted norm is computed by alternating spectral
//! iteration over the product factors ([`norms`]).
//!
//! Modules:
//! - [`tensor`]: composite spaces, states, operators, partial traces.
//! - [`states`]: named states (EPR, Bell, GHZ, multicat, multimode,
//!   Hartree–Fock, Gibbs).
//! - [`norms`]: full and restricted operator norms.
//! - [`measure`]: the entanglement measure and operator order index.
//! - [`manybody`]: field-operator and spin density matrices.
//! - [`properties`]: randomized property audits of the measure.

pub mod error;
pub mod manybody;
pub mod measure;
pub mod norms;
pub mod properties;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use measure::{entanglement, nonentangling, order_index, LogBase, MeasureResult};
pub use norms::{NormMode, NormOptions, NormResult};
pub use tensor::{Operator, ProductState, PureState, SpaceShape};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
