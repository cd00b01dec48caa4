//! Local densities of hermitian lattices over the ring of integers of a
//! ramified quadratic extension E = Q₂(π), π² = 2δ.
//!
//! The pipeline is: exact arithmetic ([`dyadic`]) → Gram matrices and Jordan
//! normal forms ([`gram`], [`jordan`]) → type data ([`profile`]) → closed
//! density formula ([`density`]), cross-checked by two counting oracles
//! ([`naive`], [`fiber`]).

pub mod density;
pub mod dyadic;
pub mod error;
pub mod fiber;
pub mod gram;
pub mod jordan;
pub mod matrix;
pub mod naive;
pub mod poly;
pub mod profile;
pub mod residue;
pub mod sublattice;

pub use density::{local_density, DensityReport};
pub use dyadic::{RamifiedElem, Ring};
pub use error::{ArithError, Error, Result};
pub use gram::HermitianGram;
pub use jordan::{jordan_split, JordanComponent, JordanDecomposition, Tail};
pub use matrix::Mat;
pub use profile::{TypeProfile, TypeTag};
pub use residue::{FieldElem, ResidueField};
