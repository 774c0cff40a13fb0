//! Quantitative first Borel–Cantelli bounds.
//!
//! Given a family of events `(E_n)` whose probabilities are summable, the
//! overlap count `O = Σ 1{E_n}` is almost surely finite. This crate computes
//! explicit upper bounds on polynomial and exponential moments (and tails) of
//! `O` from the decay of `P(E_n)`, and checks those bounds against exact
//! Poisson-binomial oracles and a reproducible Monte-Carlo engine.
//!
//! Layout:
//!
//! * [`series`]: decay models, weight sequences and the certified series and
//!   special-function primitives (Hurwitz zeta, Faulhaber sums, Lambert W).
//! * [`bounds`]: moment and tail bounds for general, nested and independent
//!   families, plus the exact distribution of `O` for finite independent families.
//! * [`mc`]: the deterministic, replication-parallel simulation engine.
//! * [`apps`]: mean-deviation-frequency applications (Glivenko–Cantelli,
//!   strong law, Cramér/Sanov rates, VC bounds, iterated logarithm, rare segments).
//! * [`sde`]: explicit order-1.5 strong scheme for scalar SDEs and its error study.

// negated float comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod bounds;
pub mod error;
pub mod mc;
pub mod optimize;
pub mod sde;
pub mod series;

pub use error::{Error, Result};
