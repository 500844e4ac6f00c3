//! Exact, desk-scale experiments on growth of product sets relative to
//! parabolic subgroups of `SL_n(F_p)`, non-abelian Fourier analysis on the
//! affine group `Aff(F_p)`, and continued fractions with partial quotients
//! drawn from a finite alphabet, including the search for `a/q` with
//! `q ≡ 0 (mod p)`.
//!
//! Modules, bottom-up:
//!
//! * [`ff`]: prime fields, primitive roots, discrete logs, characters.
//! * [`matgrp`]: `SL_n(F_p)` elements, standard subgroups, Weyl group,
//!   Bruhat normal form.
//! * [`setops`]: product-set algebra and the inequality verifiers.
//! * [`fourier`]: Fourier transform on `Aff(F_p)` and the Borel embedding.
//! * [`cfrac`]: expansions, continuants, enumeration of bounded-quotient
//!   fractions, the modular search, and the matrix sets mod `p`.

// row reductions index two rows at once
#![allow(clippy::needless_range_loop)]

pub mod cfrac;
pub mod error;
pub mod ff;
pub mod fourier;
pub mod matgrp;
pub mod random;
pub mod setops;

pub use error::{Error, Result};
pub use ff::{FieldElem, PrimeField};
pub use matgrp::{GroupElem, SlGroup, WeylElem};
pub use setops::ElemSet;

/// Default cap on the number of group elements any enumeration may produce.
pub const DEFAULT_BUDGET: u128 = 10_000_000;
