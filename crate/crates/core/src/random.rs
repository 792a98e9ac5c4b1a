// SPDX-License-Identifier: Apache-2.0

//! Random instances for the verification suites and benchmarks.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::bits::{BitVec, Tick};
use crate::boolfn::{parallel_fn, GeneratorFn};
use crate::error::Result;
use crate::signals::{ProgressiveFunction, Signal};

/// A uniformly random generator function.
pub fn phi(rng: &mut impl Rng, n: usize, m: usize) -> Result<GeneratorFn> {
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let table = (0..1usize << (n + m))
        .map(|_| rng.random::<u64>() & mask)
        .collect();
    GeneratorFn::from_table(n, m, table)
}

/// A random permutation of `1..=n`.
pub fn permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    p.shuffle(rng);
    p
}

/// `Phi' || Phi''` with coordinates shuffled, and the (sorted) positions where
/// the `n1` coordinates of `Phi'` ended up.
pub fn separable(
    rng: &mut impl Rng,
    n1: usize,
    n2: usize,
    m: usize,
) -> Result<(GeneratorFn, Vec<usize>)> {
    let joined = parallel_fn(&phi(rng, n1, m)?, &phi(rng, n2, m)?)?;
    let perm = permutation(rng, n1 + n2);
    let block = (1..=n1 + n2).filter(|&k| perm[k - 1] <= n1).collect();
    Ok((joined.permuted(&perm)?, block))
}

/// Sorted distinct ticks drawn from `lo..=hi`, `len` of them (capped by the range).
pub fn grid(rng: &mut impl Rng, lo: i64, hi: i64, len: usize) -> Vec<Tick> {
    let span = (hi - lo + 1).max(0) as usize;
    let mut picks: Vec<usize> = index::sample(rng, span, len.min(span)).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|k| Tick(lo + k as i64)).collect()
}

/// A random signal with at most `max_events` events in `0..=horizon`.
pub fn signal(rng: &mut impl Rng, m: usize, max_events: usize, horizon: Tick) -> Result<Signal> {
    let len = rng.random_range(0..=max_events);
    let events = grid(rng, 0, horizon.get(), len)
        .into_iter()
        .map(|t| (t, bits(rng, m)))
        .collect();
    Signal::new(bits(rng, m), events, horizon)
}

pub fn bits(rng: &mut impl Rng, width: usize) -> BitVec {
    let mask = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
    BitVec::new(width, rng.random::<u64>() & mask).expect("masked to width")
}

/// A prefix-progressive schedule on a nonempty subset of `ticks`: random
/// firing vectors, patched so that every coordinate fires at least once.
pub fn schedule(
    rng: &mut impl Rng,
    n: usize,
    ticks: &[Tick],
    horizon: Tick,
) -> Result<ProgressiveFunction> {
    assert!(!ticks.is_empty(), "a schedule needs at least one tick");
    let len = rng.random_range(1..=ticks.len());
    let mut chosen: Vec<Tick> = index::sample(rng, ticks.len(), len)
        .into_iter()
        .map(|k| ticks[k])
        .collect();
    chosen.sort_unstable();
    let mut alphas: Vec<u64> = chosen.iter().map(|_| bits(rng, n).bits()).collect();
    for i in 0..n {
        if alphas.iter().all(|a| a >> i & 1 == 0) {
            let k = rng.random_range(0..alphas.len());
            alphas[k] |= 1 << i;
        }
    }
    let events = chosen
        .into_iter()
        .zip(alphas)
        .map(|(t, a)| (t, BitVec::new(n, a).expect("masked to width")))
        .collect();
    ProgressiveFunction::new(n, events, horizon)
}

/// Two grids in `1..=hi` that differ as tick sets.
pub fn distinct_grids(rng: &mut impl Rng, hi: i64, len: usize) -> (Vec<Tick>, Vec<Tick>) {
    loop {
        let (la, lb) = (rng.random_range(1..=len), rng.random_range(1..=len));
        let a = grid(rng, 1, hi, la);
        let b = grid(rng, 1, hi, lb);
        if a != b {
            return (a, b);
        }
    }
}

/// Two prefix-progressive schedules whose firing ticks differ as sets.
pub fn schedule_pair(
    rng: &mut impl Rng,
    widths: (usize, usize),
    horizon: Tick,
    max_events: usize,
) -> Result<(ProgressiveFunction, ProgressiveFunction)> {
    loop {
        let (g1, g2) = distinct_grids(rng, horizon.get(), max_events);
        let a = schedule(rng, widths.0, &g1, horizon)?;
        let b = schedule(rng, widths.1, &g2, horizon)?;
        let ticks = |r: &ProgressiveFunction| r.events().iter().map(|e| e.0).collect::<Vec<_>>();
        if ticks(&a) != ticks(&b) {
            return Ok((a, b));
        }
    }
}
