//! Per-replication random streams and thread-pool control.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// The generator behind every simulation.
pub type StreamRng = ChaCha8Rng;

/// Independent substream `stream` of the generator keyed by `seed`.
///
/// ChaCha is counter based, so replication `i` can be generated on any
/// worker without touching the state of other replications.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(rep, rng)` for every replication in parallel and returns the
/// results in replication order.
pub fn map_replications<T, F>(reps: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> T + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep);
            f(rep, &mut rng)
        })
        .collect()
}

/// Runs `f` inside a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Input(format!("cannot build a pool of {threads} threads: {e}")))?;
    Ok(pool.install(f))
}
