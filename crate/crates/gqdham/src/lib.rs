//! Constructive Hamiltonian double rays and Hamiltonian circles in Cayley
//! graphs of two-ended generalized quasi-dihedral groups.

pub mod abelian_core;
pub mod cayley;
pub mod error;
pub mod gqd_group;
pub mod hamilton;
pub mod verify;
pub mod walls;

pub use error::{Error, Result};
