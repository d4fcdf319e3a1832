use std::time::Instant;

use rand::Rng;

use super::budget::{commute_walks, edge_walks};
use super::{endpoint_degrees, Budget, Estimate, EstimateError, EstimatorParams};
use crate::graph::{AdjacencyList, CountingOracle};
use crate::rng::fork_key;
use crate::walker::{walks_until, WalkOutcome};

/// Share of capped walks above which an estimate is flagged.
const CAPPED_FLAG_FRACTION: f64 = 0.01;

struct Tally {
    successes: u64,
    capped: u64,
}

/// Runs `walks` open-ended walks from `s`, walk `j` on substream `j`, counting
/// the ones whose predicate stopped with `true`.
fn tally<G, R, S, F>(g: &G, s: usize, walks: u64, cap: u64, rng: &mut R, make_stop: F) -> Result<Tally, EstimateError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
    S: FnMut(usize, usize, u64) -> Option<bool>,
    F: FnMut() -> S,
{
    let key = fork_key(rng);
    let mut out = Tally {
        successes: 0,
        capped: 0,
    };
    walks_until(g, s, walks, key, cap, make_stop, |_, outcome| match outcome {
        WalkOutcome::Stopped { payload: true, .. } => out.successes += 1,
        WalkOutcome::Stopped { payload: false, .. } => {}
        WalkOutcome::Capped { .. } => out.capped += 1,
    })?;
    Ok(out)
}

/// Orders the pair so that `deg(s) <= deg(t)`.
fn lower_degree_first(s: usize, t: usize, ds: usize, dt: usize) -> (usize, usize, usize) {
    if ds > dt {
        (t, s, dt)
    } else {
        (s, t, ds)
    }
}

/// Commute-time estimate of `R(s, t)`.
///
/// Each of `N0` walks from `s` (the endpoint of lower degree) stops on its
/// first return to `s`. It succeeds if it visited `t` on the way. The success
/// probability is `1 / (R deg(s))`, so the estimate is `N0 / (deg(s) X)`.
/// Accurate to a factor `1 ± ε` when `R <= γ`.
///
/// If no walk succeeds the estimate is `+∞` with `success = false`.
pub fn est_mc<G, R>(g: &G, s: usize, t: usize, p: &EstimatorParams, rng: &mut R) -> Result<Estimate, EstimateError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    p.check_epsilon()?;
    p.check_gamma()?;
    let started = Instant::now();
    let oracle = CountingOracle::new(g);
    let (ds, dt) = endpoint_degrees(&oracle, s, t)?;
    let (s, t, ds) = lower_degree_first(s, t, ds, dt);

    let walks = p
        .overrides
        .commute_walks
        .unwrap_or_else(|| commute_walks(p.gamma, ds, p.epsilon))
        .max(1);
    let cap = p.resolved_step_cap(oracle.edge_count());
    let counts = tally(&oracle, s, walks, cap, rng, || {
        let mut seen_t = false;
        move |_, current, _| {
            if current == t {
                seen_t = true;
            }
            (current == s).then_some(seen_t)
        }
    })?;

    let (value, success, note) = if counts.successes == 0 {
        (
            f64::INFINITY,
            false,
            Some("no s->t->s commute observed; R likely exceeds gamma".to_string()),
        )
    } else {
        (walks as f64 / (ds as f64 * counts.successes as f64), true, None)
    };
    Ok(Estimate {
        value,
        success,
        successes: Some(counts.successes),
        capped_walks: counts.capped,
        capped_flag: counts.capped as f64 > CAPPED_FLAG_FRACTION * walks as f64,
        access: oracle.stats(),
        elapsed: started.elapsed(),
        budget: Budget::Commute { walks, step_cap: cap },
        params_used: p.clone(),
        note,
    })
}

/// First-arrival estimate of `R(s, t)` for an edge `(s, t)`.
///
/// `R(s, t)` equals the probability that a walk from `s` first reaches `t`
/// through an `s`–`t` edge. `M0` walks from `s` (the endpoint of lower
/// degree) run until they first hit `t`; the estimate is the fraction that
/// arrived from `s`. Accurate to a factor `1 ± ε` when `R > γ`.
///
/// Each of `k` parallel `s`–`t` edges carries the arrival with probability
/// `R`, so with `k > 1` the fraction is divided by `k`.
pub fn est_mc2<G, R>(g: &G, s: usize, t: usize, p: &EstimatorParams, rng: &mut R) -> Result<Estimate, EstimateError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    p.check_epsilon()?;
    p.check_gamma()?;
    p.check_delta()?;
    let started = Instant::now();
    let oracle = CountingOracle::new(g);
    let (ds, dt) = endpoint_degrees(&oracle, s, t)?;
    let (s, t, ds) = lower_degree_first(s, t, ds, dt);
    let mut multiplicity = 0u64;
    for i in 0..ds {
        if oracle.neighbor(s, i)? == t {
            multiplicity += 1;
        }
    }
    if multiplicity == 0 {
        return Err(EstimateError::NotAdjacent { s, t });
    }

    let walks = p
        .overrides
        .edge_walks
        .unwrap_or_else(|| edge_walks(p.delta, p.epsilon, p.gamma))
        .max(1);
    let cap = p.resolved_step_cap(oracle.edge_count());
    let counts = tally(&oracle, s, walks, cap, rng, || {
        move |previous, current, _| (current == t).then_some(previous == s)
    })?;

    Ok(Estimate {
        value: counts.successes as f64 / (multiplicity * walks) as f64,
        success: true,
        successes: Some(counts.successes),
        capped_walks: counts.capped,
        capped_flag: counts.capped as f64 > CAPPED_FLAG_FRACTION * walks as f64,
        access: oracle.stats(),
        elapsed: started.elapsed(),
        budget: Budget::FirstArrival { walks, step_cap: cap },
        params_used: p.clone(),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{complete, path};
    use crate::rng::master;

    fn params(walks: u64) -> EstimatorParams {
        let mut p = EstimatorParams {
            epsilon: 0.2,
            gamma: 1.0,
            ..EstimatorParams::default()
        };
        p.overrides.commute_walks = Some(walks);
        p.overrides.edge_walks = Some(walks);
        p
    }

    #[test]
    fn mc_walk_count_from_formula() {
        let g = path(3);
        let p = EstimatorParams {
            epsilon: 0.2,
            gamma: 1.0,
            ..EstimatorParams::default()
        };
        // The swap puts the degree-1 end first; deg = 1 gives ⌈134.38⌉.
        let est = est_mc(&g, 1, 0, &p, &mut master(0)).unwrap();
        assert_eq!(
            est.budget,
            Budget::Commute {
                walks: 135,
                step_cap: 40
            }
        );
    }

    #[test]
    fn mc_on_k2_always_commutes() {
        let g = complete(2);
        let est = est_mc(&g, 0, 1, &params(50), &mut master(1)).unwrap();
        assert_eq!(est.successes, Some(50));
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn mc_success_rate_on_k3() {
        // p = 1/(R deg s) = 3/4.
        let g = complete(3);
        let est = est_mc(&g, 0, 1, &params(20_000), &mut master(2)).unwrap();
        let rate = est.successes.unwrap() as f64 / 20_000.0;
        assert!((0.73..=0.77).contains(&rate), "{rate}");
    }

    #[test]
    fn mc_without_success_reports_failure() {
        // A cap of one step never completes a round trip.
        let g = complete(3);
        let mut p = params(10);
        p.step_cap = Some(1);
        let est = est_mc(&g, 0, 1, &p, &mut master(3)).unwrap();
        assert!(!est.success);
        assert_eq!(est.value, f64::INFINITY);
        assert!(est.capped_flag);
        assert_eq!(est.capped_walks, 10);
        assert!(est.note.unwrap().contains("commute"));
    }

    #[test]
    fn mc2_on_k2_is_exact() {
        let g = complete(2);
        let est = est_mc2(&g, 1, 0, &params(100), &mut master(4)).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn mc2_rejects_non_edges() {
        let g = path(3);
        assert!(matches!(
            est_mc2(&g, 0, 2, &params(10), &mut master(5)),
            Err(EstimateError::NotAdjacent { .. })
        ));
    }

    #[test]
    fn mc2_on_k3_edge() {
        let g = complete(3);
        let est = est_mc2(&g, 0, 2, &params(100_000), &mut master(6)).unwrap();
        assert!((0.655..=0.678).contains(&est.value), "{}", est.value);
        assert!(!est.capped_flag);
    }

    #[test]
    fn mc2_walk_count_from_formula() {
        let g = complete(2);
        let p = EstimatorParams {
            epsilon: 0.1,
            gamma: 0.1,
            delta: 1.0 / 3.0,
            ..EstimatorParams::default()
        };
        let est = est_mc2(&g, 0, 1, &p, &mut master(7)).unwrap();
        assert_eq!(
            est.budget,
            Budget::FirstArrival {
                walks: 3_296,
                step_cap: 20
            }
        );
    }
}
