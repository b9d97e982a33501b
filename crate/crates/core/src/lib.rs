//! Exact counting of restricted linear congruences
//!
//! ```text
//! a₁ˢx₁ + … + aₖˢxₖ ≡ b (mod nˢ),   (xᵢ, nˢ)ₛ = tᵢˢ
//! ```
//!
//! where `(x, y)ₛ` is the largest `s`-th power dividing both `x` and `y`.
//!
//! The crate is layered:
//!
//! - [`arith`]: factorization of integers below `2¹²⁸`, Möbius, Jordan
//!   totients and generalized gcds.
//! - [`fourier`]: generalized Ramanujan sums, `(r, s)`-even functions, their
//!   finite Fourier transform and Cauchy products.
//! - [`congruence`]: the closed-form counts.
//! - [`oracle`]: brute-force ground truth by convolution of indicator
//!   vectors.
//! - [`fuzz`]: campaigns comparing every closed form with the oracle.
//! - [`json`]: the JSON documents used by the command line tool.
//!
//! ```
//! use rescong::{count_general, CongruenceInstance};
//!
//! // x₁ + x₂ ≡ 3 (mod 4) with x₁ a unit and (x₂, 4) = 2
//! let inst = CongruenceInstance::from_ints(&[1, 1], 3, 4, 1, &[1, 2])?;
//! assert_eq!(count_general(&inst)?.count, 1u32.into());
//! # Ok::<(), rescong::Error>(())
//! ```

pub mod arith;
pub mod congruence;
mod error;
pub mod fourier;
pub mod fuzz;
pub mod json;
pub mod oracle;

pub use arith::{
    divisors, factorize, gcd_s, jordan_totient, mobius, Factorization, Factorizer, GcdS,
};
pub use congruence::{
    count_general, count_general_with, count_units_style, lehmer_count, single_var, ArgConvention,
    CongruenceInstance, Counter, Reason, SolvabilityReport,
};
pub use error::{Error, Result};
pub use fourier::{
    cauchy_product, dft, dft_even, generalized_ramanujan_sum, ramanujan_sum, PeriodicFunction,
};
pub use fuzz::{fuzz_campaign, FuzzDomain, FuzzReport, FuzzSummary, Sampling};
pub use oracle::{oracle_count, oracle_enumerate, OracleBounds};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/ramanujan-sums.md")]
    mod ramanujan_sums {}
    #[doc = include_str!("../../../book/src/even-functions.md")]
    mod even_functions {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
