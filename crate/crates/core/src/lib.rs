//! Strong-field limit of a charged particle: field-strength foliations,
//! constraint classification, Dirac brackets and weighted Fock quantization.

pub mod cli;
pub mod constraints;
pub mod fock;
pub mod foliation;
pub mod geometry;
pub mod quadrature;
pub mod special;
pub mod verify;
