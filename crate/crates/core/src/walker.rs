//! Random-walk engines over the adjacency-list query model.
//!
//! Fixed-length batches come in two flavours that produce endpoint tallies
//! with the same distribution:
//!
//! * [`WalkEngine::PerWalk`] simulates every walk step by step on its own
//!   substream. It spends exactly one degree and one neighbor query per step.
//! * [`WalkEngine::Aggregated`] moves the whole batch level by level: the `c`
//!   walkers sitting on `v` are split among `v`'s neighbor slots with a
//!   multinomial draw. Query cost scales with the number of occupied
//!   vertices rather than with the number of walks.

use std::collections::BTreeMap;
use std::thread;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::graph::{AdjacencyList, GraphError};
use crate::rng::{fork_key, substream, StreamRng};

/// How fixed-length walk batches are simulated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WalkEngine {
    #[default]
    PerWalk,
    Aggregated,
}

/// Endpoint tallies of a batch of fixed-length walks from one start vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkBatchResult {
    pub endpoint_counts: BTreeMap<usize, u64>,
    pub walks: u64,
    pub length: usize,
    pub total_steps: u64,
}

impl WalkBatchResult {
    fn stationary(start: usize, walks: u64, length: usize) -> Self {
        WalkBatchResult {
            endpoint_counts: BTreeMap::from([(start, walks)]),
            walks,
            length,
            total_steps: 0,
        }
    }

    pub fn count(&self, v: usize) -> u64 {
        self.endpoint_counts.get(&v).copied().unwrap_or(0)
    }

    pub fn fraction(&self, v: usize) -> f64 {
        self.count(v) as f64 / self.walks as f64
    }
}

/// One simple-walk step: a degree query, then a uniform neighbor query.
#[inline]
pub fn step<G, R>(g: &G, v: usize, rng: &mut R) -> Result<usize, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    let d = g.degree(v)?;
    if d == 0 {
        return Err(GraphError::Isolated(v));
    }
    g.neighbor(v, rng.gen_range(0..d))
}

pub fn simple_walk<G, R>(g: &G, start: usize, length: usize, rng: &mut R) -> Result<usize, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    let mut v = start;
    for _ in 0..length {
        v = step(g, v, rng)?;
    }
    Ok(v)
}

/// Walk that holds its position with probability 1/2 at every step.
pub fn lazy_walk<G, R>(g: &G, start: usize, length: usize, rng: &mut R) -> Result<usize, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    let mut v = start;
    for _ in 0..length {
        if rng.gen::<bool>() {
            v = step(g, v, rng)?;
        }
    }
    Ok(v)
}

/// `walks` independent simple walks of `length` steps from `start`, walk `i`
/// driven by substream `i` of a key drawn from `rng`.
pub fn batch_endpoints<G, R>(
    g: &G,
    start: usize,
    length: usize,
    walks: u64,
    rng: &mut R,
) -> Result<WalkBatchResult, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    let key = fork_key(rng);
    if length == 0 {
        return Ok(WalkBatchResult::stationary(start, walks, 0));
    }
    let mut counts = BTreeMap::new();
    for i in 0..walks {
        let end = simple_walk(g, start, length, &mut substream(key, i))?;
        *counts.entry(end).or_insert(0) += 1;
    }
    Ok(WalkBatchResult {
        endpoint_counts: counts,
        walks,
        length,
        total_steps: walks * length as u64,
    })
}

/// [`batch_endpoints`] split over `threads` worker threads. The tallies are
/// identical to the sequential version for the same `rng` state.
pub fn batch_endpoints_parallel<G, R>(
    g: &G,
    start: usize,
    length: usize,
    walks: u64,
    rng: &mut R,
    threads: usize,
) -> Result<WalkBatchResult, GraphError>
where
    G: AdjacencyList + Sync + ?Sized,
    R: Rng + ?Sized,
{
    let key = fork_key(rng);
    if length == 0 {
        return Ok(WalkBatchResult::stationary(start, walks, 0));
    }
    let threads = threads.max(1) as u64;
    let chunk = walks.div_ceil(threads);
    let partials: Vec<Result<BTreeMap<usize, u64>, GraphError>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let lo = (w * chunk).min(walks);
                let hi = ((w + 1) * chunk).min(walks);
                scope.spawn(move || {
                    let mut counts = BTreeMap::new();
                    for i in lo..hi {
                        let end = simple_walk(g, start, length, &mut substream(key, i))?;
                        *counts.entry(end).or_insert(0u64) += 1;
                    }
                    Ok(counts)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("walk worker panicked"))
            .collect()
    });
    let mut counts = BTreeMap::new();
    for part in partials {
        for (v, c) in part? {
            *counts.entry(v).or_insert(0) += c;
        }
    }
    Ok(WalkBatchResult {
        endpoint_counts: counts,
        walks,
        length,
        total_steps: walks * length as u64,
    })
}

/// Level-by-level multinomial simulation of a batch. Same endpoint law as
/// [`batch_endpoints`]; far fewer queries when `walks` exceeds the number of
/// vertices the batch can reach.
pub fn batch_endpoints_aggregated<G, R>(
    g: &G,
    start: usize,
    length: usize,
    walks: u64,
    rng: &mut R,
) -> Result<WalkBatchResult, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    let mut current = BTreeMap::from([(start, walks)]);
    for _ in 0..length {
        let mut next = BTreeMap::new();
        for (&v, &c) in &current {
            let d = g.degree(v)?;
            if d == 0 {
                return Err(GraphError::Isolated(v));
            }
            if c <= d as u64 {
                for _ in 0..c {
                    let u = g.neighbor(v, rng.gen_range(0..d))?;
                    *next.entry(u).or_insert(0) += 1;
                }
                continue;
            }
            // Sequential conditional binomials give a multinomial split over slots.
            let mut remaining = c;
            for slot in 0..d {
                if remaining == 0 {
                    break;
                }
                let here = if slot + 1 == d {
                    remaining
                } else {
                    let p = 1.0 / (d - slot) as f64;
                    Binomial::new(remaining, p).expect("valid binomial").sample(rng)
                };
                if here > 0 {
                    let u = g.neighbor(v, slot)?;
                    *next.entry(u).or_insert(0) += here;
                    remaining -= here;
                }
            }
        }
        current = next;
    }
    Ok(WalkBatchResult {
        endpoint_counts: current,
        walks,
        length,
        total_steps: walks * length as u64,
    })
}

/// Dispatches a fixed-length batch to the chosen engine.
pub fn run_batch<G, R>(
    engine: WalkEngine,
    g: &G,
    start: usize,
    length: usize,
    walks: u64,
    rng: &mut R,
) -> Result<WalkBatchResult, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
{
    match engine {
        WalkEngine::PerWalk => batch_endpoints(g, start, length, walks, rng),
        WalkEngine::Aggregated => batch_endpoints_aggregated(g, start, length, walks, rng),
    }
}

/// How an open-ended walk ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkOutcome<P> {
    Stopped { steps: u64, payload: P },
    Capped { steps: u64 },
}

impl<P> WalkOutcome<P> {
    pub fn steps(&self) -> u64 {
        match self {
            WalkOutcome::Stopped { steps, .. } | WalkOutcome::Capped { steps } => *steps,
        }
    }
}

/// Walks from `start` until `stop(previous, current, step)` returns a payload,
/// or until `cap` steps have been taken.
///
/// The predicate sees the traversed edge, not just the vertex reached.
pub fn walk_until<G, R, P, F>(
    g: &G,
    start: usize,
    mut stop: F,
    cap: u64,
    rng: &mut R,
) -> Result<WalkOutcome<P>, GraphError>
where
    G: AdjacencyList + ?Sized,
    R: Rng + ?Sized,
    F: FnMut(usize, usize, u64) -> Option<P>,
{
    let mut current = start;
    for steps in 1..=cap {
        let next = step(g, current, rng)?;
        if let Some(payload) = stop(current, next, steps) {
            return Ok(WalkOutcome::Stopped { steps, payload });
        }
        current = next;
    }
    Ok(WalkOutcome::Capped { steps: cap })
}

/// Open-ended walks advanced in lockstep by [`walks_until`].
pub const LANES: usize = 16;

/// Runs `walks` open-ended walks from `start`, walk `j` on substream `j` of
/// `key` with its own predicate from `make_stop`, and passes each outcome to
/// `done(j, outcome)` as the walk ends.
///
/// Up to [`LANES`] walks take turns stepping so that their memory accesses
/// overlap. Every walk's outcome equals that of [`walk_until`] on its own
/// substream; only the order of the `done` calls depends on the interleaving.
pub fn walks_until<G, P, S, M, D>(
    g: &G,
    start: usize,
    walks: u64,
    key: u64,
    cap: u64,
    mut make_stop: M,
    mut done: D,
) -> Result<(), GraphError>
where
    G: AdjacencyList + ?Sized,
    S: FnMut(usize, usize, u64) -> Option<P>,
    M: FnMut() -> S,
    D: FnMut(u64, WalkOutcome<P>),
{
    struct Lane<S> {
        index: u64,
        rng: StreamRng,
        current: usize,
        steps: u64,
        stop: S,
    }

    if cap == 0 {
        (0..walks).for_each(|j| done(j, WalkOutcome::Capped { steps: 0 }));
        return Ok(());
    }
    let mut launch = |index: u64| Lane {
        index,
        rng: substream(key, index),
        current: start,
        steps: 0,
        stop: make_stop(),
    };
    let mut lanes: Vec<Lane<S>> = (0..walks.min(LANES as u64)).map(&mut launch).collect();
    let mut next = lanes.len() as u64;
    while !lanes.is_empty() {
        let mut i = 0;
        while i < lanes.len() {
            let lane = &mut lanes[i];
            let to = step(g, lane.current, &mut lane.rng)?;
            lane.steps += 1;
            let outcome = match (lane.stop)(lane.current, to, lane.steps) {
                Some(payload) => WalkOutcome::Stopped {
                    steps: lane.steps,
                    payload,
                },
                None if lane.steps == cap => WalkOutcome::Capped { steps: cap },
                None => {
                    lane.current = to;
                    i += 1;
                    continue;
                }
            };
            done(lane.index, outcome);
            if next < walks {
                lanes[i] = launch(next);
                next += 1;
                i += 1;
            } else {
                lanes.swap_remove(i);
            }
        }
    }
    Ok(())
}
