//! Computations with filtered F2[C2]-modules and their bounded homotopy categories.

pub mod chains;
pub mod filtmod;
pub mod functors;
pub mod gen;
pub mod gf2;
pub mod motives;
pub mod shell;
pub mod spectrum;
