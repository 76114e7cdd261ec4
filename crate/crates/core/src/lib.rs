//! Executable small-cancellation and coarse-geometry toolkit for finitely
//! presented groups.
//!
//! The crate is organised bottom-up: [`freeword`] handles words in free
//! groups, [`presentation`] parses presentations and runs coset enumeration,
//! [`cancellation`] and [`dehn`] implement small-cancellation checks and
//! Dehn's algorithm, [`cayley`] builds exact finite balls of Cayley graphs,
//! [`probes`] and [`certifier`] measure them, and [`zoo`] generates the
//! example families.

pub mod cancellation;
pub mod cayley;
pub mod certifier;
pub mod dehn;
pub mod freeword;
pub mod presentation;
pub mod probes;
pub mod rational;
pub mod zoo;

pub use freeword::{symmetrize, Alphabet, Letter, SymmetrizedSet, Word, WordError};
pub use presentation::Presentation;
pub use rational::Rational;
