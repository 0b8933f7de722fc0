//! Exact Penrose substitution tilings and the composite prototiles built on them.
//!
//! Points live on the ring of integers of the tenth cyclotomic field, so every
//! vertex, rotation, reflection and φ-scaling is computed without rounding.

pub mod derive;
pub mod golden;
pub mod io;
pub mod subst;
pub mod tiles;
pub mod verify;
