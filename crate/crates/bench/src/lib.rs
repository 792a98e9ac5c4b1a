// SPDX-License-Identifier: Apache-2.0

//! Seeded fixtures shared by the benchmarks.

use asyncdec_core::random;
use asyncdec_core::{BitVec, GeneratorFn, ProgressiveFunction, RegularSystem, Signal, Tick};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A separable function on `n1 + n2` shuffled coordinates.
pub fn separable_fn(n1: usize, n2: usize, m: usize) -> GeneratorFn {
    random::separable(&mut rng(1), n1, n2, m).expect("fixture sizes are valid").0
}

pub fn dense_fn(n: usize, m: usize) -> GeneratorFn {
    random::phi(&mut rng(2), n, m).expect("fixture sizes are valid")
}

/// A single-run workload: initial state, input and a schedule with `events` firings.
pub struct RunCase {
    pub phi: GeneratorFn,
    pub mu: BitVec,
    pub u: Signal,
    pub rho: ProgressiveFunction,
}

pub fn run_case(n: usize, m: usize, horizon: i64, events: usize) -> RunCase {
    let mut r = rng(3);
    let h = Tick(horizon);
    let phi = random::phi(&mut r, n, m).expect("fixture sizes are valid");
    let mu = random::bits(&mut r, n);
    let u = random::signal(&mut r, m, 16, h).expect("events lie in the horizon");
    let ticks = random::grid(&mut r, 1, horizon, events);
    let rho = random::schedule(&mut r, n, &ticks, h).expect("progressive by construction");
    RunCase { phi, mu, u, rho }
}

/// A system over a separable function with `inits` initial states and
/// `schedules` schedules per initial state, for one input.
pub fn system(n1: usize, n2: usize, inits: usize, schedules: usize) -> RegularSystem {
    let mut r = rng(4);
    let h = Tick(32);
    let (phi, _) = random::separable(&mut r, n1, n2, 1).expect("fixture sizes are valid");
    let n = n1 + n2;
    let u = random::signal(&mut r, 1, 6, h).expect("events lie in the horizon");
    let mut b = RegularSystem::builder(phi).input("u", u);
    let mut mus: Vec<BitVec> = Vec::new();
    while mus.len() < inits.min(1 << n) {
        let mu = random::bits(&mut r, n);
        if !mus.contains(&mu) {
            mus.push(mu);
        }
    }
    for mu in mus {
        b = b.initial("u", mu);
        let mut seen = Vec::new();
        while seen.len() < schedules {
            let len = r.random_range(2..=12);
            let ticks = random::grid(&mut r, 1, 32, len);
            let rho = random::schedule(&mut r, n, &ticks, h).expect("progressive by construction");
            if !seen.contains(&rho) {
                seen.push(rho.clone());
                b = b.schedule("u", mu, rho);
            }
        }
    }
    b.build().expect("fixture is well formed")
}
