//! Quantum-domino spin chains: reachable-sector enumeration, sparse sector
//! Hamiltonians, exact and Krylov time evolution, and a discrete-WKB
//! eigensolver for sectors whose dimension grows linearly with the chain
//! length.
//!
//! The model is a chain of N spins with a Hamiltonian that flips only spins
//! adjacent to a domain wall. Starting from a single flipped spin the wall
//! propagates like falling dominoes, and the set of configurations reachable
//! from the seed forms an invariant subspace whose size and character depend
//! strongly on how (and whether) the chain is closed to a ring.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod basis;
pub mod dynamics;
pub mod hamiltonian;
pub mod oracle;
pub mod semiclassics;
pub mod spin;

mod error;

pub use error::Error;

/// Largest sector the breadth-first enumeration will build before bailing out.
pub const DEFAULT_SECTOR_CAP: usize = 10_000_000;

/// Largest dimension handled by dense diagonalization; above this the
/// propagator switches to the Krylov path.
pub const DEFAULT_DENSE_CAP: usize = 4000;
