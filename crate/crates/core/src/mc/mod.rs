//! Replicated simulation of overlap counts and empirical moments.

mod family;
mod moment;
mod rng;
mod simulate;

pub use family::{choose_truncation, EventFamilySpec, FamilyKind, DEFAULT_TAIL_TOLERANCE};
pub use moment::{empirical_moment, empirical_tail, moment_of_counts, EmpiricalMoment, Functional};
pub use rng::{map_replications, stream_rng, with_threads, StreamRng};
pub use simulate::{simulate_overlap, OverlapSample};
