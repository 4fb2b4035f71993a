//! Exact arithmetic for Drinfeld modular forms over A = F_q[t].
//!
//! Layers, bottom up: finite fields ([`fq`]), A and F = F_q(t) ([`poly`]),
//! the coefficient field k0 ([`coeff`]), the C_∞ model ([`tail`]), lattices
//! and period points ([`lattice`]), Goss polynomials ([`goss`]), Eisenstein
//! series ([`eisenstein`]), additive polynomials and coefficient forms
//! ([`drinfeld`]), the level-t ring ([`ring`]), Hecke combinatorics
//! ([`hecke`]), dimension formulas ([`dims`]) and the verification suite
//! ([`suite`]).

pub mod algebra;
pub mod coeff;
pub mod dims;
pub mod drinfeld;
pub mod eisenstein;
pub mod error;
pub mod fq;
pub mod goss;
pub mod hecke;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod ring;
pub mod suite;
pub mod tail;

pub use error::{Error, Result};
