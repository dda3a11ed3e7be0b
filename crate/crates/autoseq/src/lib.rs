//! Analysis toolkit for automatic and morphic sequences.
//!
//! The crate answers one question about an infinite sequence presented either
//! as the coded fixed point of a morphism or as a built-in arithmetic
//! sequence: is it q-automatic, and if not, what machine-checkable evidence
//! rules automaticity out?  The pieces are organised the way the underlying
//! mathematics splits:
//!
//! * [`words`] — alphabets, morphisms, lazy fixed-point expansion, return
//!   words and height.
//! * [`matrix`] — integer transition matrices and primitivity.
//! * [`poly`] — exact integer polynomials, Sturm chains, factorization.
//! * [`algebra`] — algebraic numbers, dominant eigenvalues, Perron vectors,
//!   multiplicative dependence, and coboundary lattice constraints.
//! * [`kernel`] — q-kernel lower bounds, targeted subsequence families, and
//!   DFAO construction/minimization for uniform morphisms.
//! * [`stats`] — block complexity, block morphisms, and letter/block
//!   frequencies.
//! * [`gaps_runs`] — occurrence gap tests (Cobham-style), the Minsky–Papert
//!   ratio test, and run-length statistics.
//! * [`dynamical`] — Host-style return-word length profiles and dynamical
//!   eigenvalue obstructions.
//! * [`seqlib`] — sieved arithmetic sequences and characteristic sequences.
//! * [`strategy`] — the decision pipeline that combines everything into a
//!   [`strategy::Verdict`] with a cited evidence chain.
//! * [`report`] — the serializable report emitted by the CLI.
//!
//! Exact conclusions (integer/rational linear algebra, Sturm counts, witnessed
//! kernel distinctness) are graded `certified`; anything extrapolated from a
//! finite prefix is graded `advisory` and never upgraded.

pub mod algebra;
pub mod catalogue;
pub mod dynamical;
pub mod report;
pub mod strategy;
mod error;
pub mod gaps_runs;
pub mod kernel;
pub mod matrix;
pub mod poly;
pub mod seqlib;
pub mod stats;
pub mod words;

pub use error::Error;

/// Shorthand used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;
