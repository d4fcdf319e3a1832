use std::time::Instant;

use rand::Rng;

use super::{Budget, Estimate, EstimateError};
use crate::graph::AccessStats;
use crate::rng::{fork_key, substream, StreamRng};

/// Median of `repeats` independent runs of `inner`, run `j` on substream `j`.
///
/// Runs with `success = false` are left out of the median. Access counts and
/// times are summed over all runs. With an even number of successful runs the
/// lower median is returned. The result is flagged unsuccessful when more
/// than half of the runs failed.
pub fn median_boost<R, F>(mut inner: F, repeats: usize, rng: &mut R) -> Result<Estimate, EstimateError>
where
    R: Rng + ?Sized,
    F: FnMut(&mut StreamRng) -> Result<Estimate, EstimateError>,
{
    if repeats == 0 || repeats.is_multiple_of(2) {
        return Err(EstimateError::InvalidParameter(format!(
            "repeats must be odd, got {repeats}"
        )));
    }
    let started = Instant::now();
    let key = fork_key(rng);
    let mut runs = Vec::with_capacity(repeats);
    let mut access = AccessStats::default();
    for j in 0..repeats {
        let est = inner(&mut substream(key, j as u64))?;
        access += est.access;
        runs.push(est);
    }
    if repeats == 1 {
        let mut only = runs.pop().expect("one run");
        only.elapsed = started.elapsed();
        return Ok(only);
    }

    let mut good: Vec<Estimate> = runs.iter().filter(|e| e.success).cloned().collect();
    if good.is_empty() {
        return Err(EstimateError::NoSuccessfulRepeat);
    }
    good.sort_by(|a, b| a.value.total_cmp(&b.value));
    let successful = good.len();
    let mid = good.swap_remove((successful - 1) / 2);
    Ok(Estimate {
        value: mid.value,
        success: 2 * successful > repeats,
        successes: mid.successes,
        capped_walks: runs.iter().map(|e| e.capped_walks).sum(),
        capped_flag: runs.iter().any(|e| e.capped_flag),
        access,
        elapsed: started.elapsed(),
        budget: Budget::Median { repeats, successful },
        params_used: mid.params_used,
        note: (2 * successful <= repeats).then(|| format!("only {successful} of {repeats} repeats succeeded")),
    })
}
