//! Sieves, Grothendieck topologies and the lattice of subtoposes of a
//! presheaf topos, computed exactly on small finite categories.
//!
//! A category is given by its composition table ([`fincat`]). All sieves on
//! all objects are enumerated once into a [`Universe`]; topologies are then
//! per-object sets of covering sieves ([`topology`]). On top of that sit the
//! local operators ([`localop`]), the open, closed and quasi-closed
//! subtoposes of subterminals ([`subtopos`]) and a small proof system whose
//! theorems are exactly the generated topology ([`proofsys`]).

pub mod cli;
pub mod error;
pub mod fincat;
pub mod localop;
pub mod proofsys;
pub mod sieve;
pub mod subtopos;
pub mod suite;
pub mod topology;
pub mod universe;

pub use error::{Error, Result};
pub use fincat::{builtin, Arrow, CategoryDoc, FinCat, Obj};
pub use sieve::Sieve;
pub use topology::{SieveFamily, Topology};
pub use universe::{Guard, Universe};
