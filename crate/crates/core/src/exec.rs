//! Deterministic data parallelism.
//!
//! Every parallel loop in the crate goes through [`map_chunks`]: the work is
//! split at fixed chunk boundaries, each chunk produces an independent
//! output, and the caller reassembles outputs in chunk order. No reduction
//! ever happens inside the parallel region, so results are bit-identical
//! whether the `parallel` feature is on or off and however many worker
//! threads rayon happens to own.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use std::ops::Range;

/// Apply `f` to the index ranges `[0, chunk)`, `[chunk, 2*chunk)`, ... of a
/// logical collection of length `n`, returning the chunk outputs in order.
pub fn map_chunks<O, F>(n: usize, chunk: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(Range<usize>) -> O + Sync + Send,
{
    assert!(chunk > 0, "chunk size must be positive");
    let ranges: Vec<Range<usize>> = (0..n)
        .step_by(chunk)
        .map(|lo| lo..usize::min(lo + chunk, n))
        .collect();

    #[cfg(feature = "parallel")]
    {
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).collect()
    }
}
