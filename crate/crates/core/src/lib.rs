//! Unimodular matrix ciphers with built-in error detection and correction.
//!
//! A plaintext block of four symbols is arranged into a 2×2 matrix `P` and
//! encrypted as `C = P·Mₙ`, where the coding matrix `Mₙ = Uⁿ·M₀` is generated
//! from a non-negative unimodular key matrix `U` and a seed pair `(A₀, B₀)`.
//! The columns of `Mₙ` hold consecutive terms of two sequences sharing the
//! recurrence `Xₙ₊₁ = t·Xₙ − d·Xₙ₋₁` (`t = tr U`, `d = det U`), which gives the
//! receiver two kinds of free checks on every ciphertext:
//!
//! * the determinant identity `det C = μ·dⁿ·det P` with `μ = det M₀`, and
//! * the row-ratio interval: every row ratio of `C` lies between
//!   `Aₙ₊₁/Aₙ` and `Bₙ₊₁/Bₙ`.
//!
//! The golden (`U = [[1,1],[1,0]]`) and k-golden ciphers are special cases.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod attack;
pub mod cipher;
pub mod coding;
pub mod correction;
pub mod diophantine;
mod error;
pub mod matrix;
pub mod ratio;
pub mod text;

pub use error::{Error, Result};
pub use matrix::Mat2;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
