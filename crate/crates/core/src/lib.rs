//! Classical electrodynamics of a point charge in six-dimensional Minkowski
//! space.
//!
//! The crate evaluates retarded potentials and fields of an arbitrarily moving
//! charge, splits the field stress-energy into bound and radiative parts,
//! integrates their fluxes through world tubes and hyperplanes, and checks the
//! resulting balance equations for a rigid particle whose momentum depends on
//! acceleration. Every closed form is paired with an independent numerical
//! route so that the two can be compared.

pub mod balance;
pub mod error;
pub mod fd;
pub mod flux;
pub mod tensor6;
pub mod lw_field;
pub mod stress_energy;
pub mod worldline;

pub use error::{Error, Result};
pub use tensor6::{
    apply_lorentz, apply_lorentz2, mclf_boost, minkowski_dot, wedge, AntisymTensor2, LorentzMap,
    Rank2Tensor, SixVector,
};
