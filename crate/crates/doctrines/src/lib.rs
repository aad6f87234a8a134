//! Finite doctrine windows: elementary doctrines over finite category fragments, their
//! free completions, and exhaustive checks of the laws they are meant to satisfy.

pub mod completions;
pub mod doctrine;
pub mod fincat;
pub mod fixtures;
pub mod infsl;
pub mod logic;
pub mod mutants;
pub mod report;
pub mod verify;
