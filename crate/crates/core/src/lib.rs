//! Continuous-time quantum walks on graphs with an involution and a double-well
//! potential: spectra, transfer probabilities, walk generating functions and
//! certified lower bounds on transfer fidelity.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod bounds;
pub mod complex;
pub mod error;
pub mod graph;
pub mod hamiltonian;
mod jacobi;
pub mod matrix;
pub mod oracle;
pub mod spectral;
pub mod walks;
pub mod well;

pub use bounds::{certify, BoundCheck, BoundReport};
pub use complex::Complex;
pub use error::{Error, Result};
pub use graph::{mirror_build, partition_vertices, validate_involution, Graph, Involution, VertexPartition};
pub use hamiltonian::{assemble_hamiltonian, block_reduce, BlockReduction, Hamiltonian, Sector};
pub use matrix::Matrix;
pub use spectral::{eig_symmetric, tagged_spectrum, transfer_probability, Spectrum};
pub use well::DoubleWell;
