//! Exact arithmetic for discrepancy paths of irrational rotations.
//!
//! For an irrational `α` and a rational window `c = h/k ∈ (0,1)`, the local
//! discrepancy path is
//!
//! ```text
//! D_n = #{ 1 ≤ j ≤ n : {jα} < c } − n·c,
//! ```
//!
//! where `{x}` is the fractional part. Every value `k·D_n` is an integer, and
//! this crate computes those integers exactly — no floating point is involved
//! anywhere in a path or a verdict.
//!
//! The crate is organized by role:
//!
//! * [`numkernel`] — exact rationals, quadratic surds, continued fractions,
//!   convergent tables.
//! * [`orbit`] — exact order queries on the rotation orbit `{jα}` and the
//!   combinatorics of its return times.
//! * [`discrepancy`] — the path itself, by direct summation and by a fast
//!   level-by-level recursion, with internal self-checks.
//! * [`patterns`] — the finite algebra of partial-quotient patterns modulo
//!   `k` (characters, null/elementary/prime patterns, decomposition).
//! * [`classify`] — the boundedness verdict (`above` / `below` /
//!   `unbounded`), membership construction, and a certified bound for the
//!   crossing point of the associated dimension function.
//! * [`verify`] — seeded self-check suites shared by the CLI and the test
//!   harness.

mod error;
pub mod classify;
pub mod discrepancy;
pub mod numkernel;
pub mod orbit;
pub mod patterns;
pub mod verify;

pub use error::{Error, Result};
