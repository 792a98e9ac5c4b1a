// SPDX-License-Identifier: Apache-2.0

//! Seeded property suites over random instances.
//!
//! Every suite draws from its own `ChaCha8Rng`, seeded from the user seed and the
//! suite name, so a suite's outcome does not depend on which other suites run.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{BitVec, Tick};
use crate::boolfn::{
    finest_partition, is_separated, parallel_fn, partial_derivative, separated_by_flips,
    separated_by_recomposition, split_fn, GeneratorFn, Partition,
};
use crate::error::{Error, Result};
use crate::random;
use crate::semantics::{delay_admits, delay_bounds, run};
use crate::signals::{ProgressiveFunction, Signal};
use crate::systems::{
    decompose_system, parallel_system, realize, RegularSystem, Status, SystemBuilder,
};

/// Failures recorded in full per suite; the rest are only counted.
const MAX_WITNESSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// Parallel composition leaves cross-block derivatives and flips inert.
    Composition,
    /// Runs of `Phi' || Phi''` along `rho' x rho''` are products of factor runs.
    Simulation,
    /// Flip invariance, derivative nullity and split-recompose agree.
    Separation,
    /// Splitting at a separated block recomposes to the original.
    Recomposition,
    /// System decomposition: containment, equality in product form, strictness.
    Decomposition,
    /// The bounded-delay envelope of a rising step.
    Delay,
    /// Products of progressive schedules are progressive.
    ScheduleProduct,
    /// All-ones schedules reduce to synchronous iteration.
    Synchronous,
    /// The finest partition against brute force over all partitions.
    Minimality,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Composition,
        Suite::Simulation,
        Suite::Separation,
        Suite::Recomposition,
        Suite::Decomposition,
        Suite::Delay,
        Suite::ScheduleProduct,
        Suite::Synchronous,
        Suite::Minimality,
    ];

    /// The name accepted on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Composition => "26",
            Suite::Simulation => "27",
            Suite::Separation => "30",
            Suite::Recomposition => "32",
            Suite::Decomposition => "34",
            Suite::Delay => "example1",
            Suite::ScheduleProduct => "lemma1",
            Suite::Synchronous => "sync",
            Suite::Minimality => "minimality",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Suite::Composition => "parallel composition separates coordinates",
            Suite::Simulation => "parallel runs are products of factor runs",
            Suite::Separation => "three separation tests agree",
            Suite::Recomposition => "split then recompose is the identity",
            Suite::Decomposition => "system decomposition containment and equality",
            Suite::Delay => "bounded-delay envelope of a rising step",
            Suite::ScheduleProduct => "schedule products stay progressive",
            Suite::Synchronous => "all-ones schedules iterate synchronously",
            Suite::Minimality => "finest partition is the unique finest",
        }
    }

    pub fn default_cases(self) -> usize {
        match self {
            Suite::Composition => 1000,
            Suite::Simulation => 1000,
            Suite::Separation => 2000,
            Suite::Recomposition => 500,
            Suite::Decomposition => 200,
            Suite::Delay => 3,
            Suite::ScheduleProduct => 1000,
            Suite::Synchronous => 500,
            Suite::Minimality => 2000,
        }
    }

    /// Parses a suite name, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }

    fn seed(self, seed: u64) -> u64 {
        // FNV-1a over the name, mixed with the user seed
        let h = self
            .name()
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
                (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
            });
        h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub title: String,
    pub cases: usize,
    pub passed: usize,
    /// The first few failures, described.
    pub witnesses: Vec<String>,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.passed == self.cases
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn holds(&self) -> bool {
        self.suites.iter().all(SuiteReport::holds)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        for s in &self.suites {
            writeln!(
                f,
                "{} {:<10} {:>5}/{:<5} {}",
                if s.holds() { "PASS" } else { "FAIL" },
                s.suite,
                s.passed,
                s.cases,
                s.title
            )?;
            for w in &s.witnesses {
                writeln!(f, "    witness: {w}")?;
            }
        }
        writeln!(
            f,
            "verdict: {}",
            if self.holds() { "holds" } else { "violated" }
        )
    }
}

struct Tally {
    cases: usize,
    passed: usize,
    witnesses: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            passed: 0,
            witnesses: Vec::new(),
        }
    }

    fn record(&mut self, outcome: Result<Option<String>>) {
        self.cases += 1;
        match outcome {
            Ok(None) => self.passed += 1,
            Ok(Some(w)) => self.witness(w),
            Err(e) => self.witness(format!("error: {e}")),
        }
    }

    fn witness(&mut self, w: String) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(format!("case {}: {w}", self.cases));
        }
    }

    fn into_report(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite: suite.name().to_string(),
            title: suite.title().to_string(),
            cases: self.cases,
            passed: self.passed,
            witnesses: self.witnesses,
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed(seed));
    let mut tally = Tally::new();
    let case: fn(&mut ChaCha8Rng, usize) -> Result<Option<String>> = match suite {
        Suite::Composition => composition_case,
        Suite::Simulation => simulation_case,
        Suite::Separation => separation_case,
        Suite::Recomposition => recomposition_case,
        Suite::Decomposition => decomposition_case,
        Suite::Delay => delay_case,
        Suite::ScheduleProduct => schedule_product_case,
        Suite::Synchronous => synchronous_case,
        Suite::Minimality => minimality_case,
    };
    for k in 0..cases {
        tally.record(case(&mut rng, k));
    }
    tally.into_report(suite)
}

/// Runs `suites` in order; `cases` overrides each suite's default.
pub fn run_suites(suites: &[Suite], seed: u64, cases: Option<usize>) -> Report {
    Report {
        seed,
        suites: suites
            .iter()
            .map(|&s| run_suite(s, seed, cases.unwrap_or_else(|| s.default_cases())))
            .collect(),
    }
}

fn composition_case(rng: &mut ChaCha8Rng, _: usize) -> Result<Option<String>> {
    let (n1, n2, m) = (
        rng.random_range(1..=3),
        rng.random_range(1..=3),
        rng.random_range(0..=2),
    );
    let phi = parallel_fn(&random::phi(rng, n1, m)?, &random::phi(rng, n2, m)?)?;
    let n = n1 + n2;
    let cross = |i: usize, j: usize| (i <= n1) != (j <= n1);
    for i in 1..=n {
        for j in (1..=n).filter(|&j| cross(i, j)) {
            if let Some((mu, lambda)) = partial_derivative(&phi, i, j)?.first_one() {
                return Ok(Some(format!(
                    "dPhi_{i}/dmu_{j} = 1 at mu={mu} lambda={lambda} (n'={n1}, n''={n2})"
                )));
            }
        }
    }
    for row in 0..phi.rows() {
        let (mu, lambda) = phi.point(row);
        let base = phi.eval(&mu, &lambda)?;
        for j in 1..=n {
            let flipped = phi.eval(&mu.flipped(j)?, &lambda)?;
            for i in (1..=n).filter(|&i| cross(i, j)) {
                if base.get(i)? != flipped.get(i)? {
                    return Ok(Some(format!(
                        "flipping mu_{j} changes Phi_{i} at mu={mu} lambda={lambda}"
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn simulation_case(rng: &mut ChaCha8Rng, _: usize) -> Result<Option<String>> {
    let h = Tick(50);
    let (n1, n2, m) = (
        rng.random_range(1..=3),
        rng.random_range(1..=3),
        rng.random_range(1..=2),
    );
    let (p1, p2) = (random::phi(rng, n1, m)?, random::phi(rng, n2, m)?);
    let u = random::signal(rng, m, 8, h)?;
    let (r1, r2) = random::schedule_pair(rng, (n1, n2), h, 12)?;
    let (mu1, mu2) = (random::bits(rng, n1), random::bits(rng, n2));
    let joint = run(
        &parallel_fn(&p1, &p2)?,
        &mu1.concat(&mu2)?,
        &u,
        &r1.product(&r2)?,
    )?
    .signal;
    let apart = run(&p1, &mu1, &u, &r1)?
        .signal
        .product(&run(&p2, &mu2, &u, &r2)?.signal)?;
    Ok((joint != apart).then(|| {
        format!("u={u}; rho'={r1}; rho''={r2}; joint={joint}; product={apart}")
    }))
}

fn random_block(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let mask: u64 = rng.random_range(1..(1u64 << n) - 1);
        let block: Vec<usize> = (1..=n).filter(|k| mask >> (k - 1) & 1 == 1).collect();
        if !block.is_empty() && block.len() < n {
            return block;
        }
    }
}

fn separation_case(rng: &mut ChaCha8Rng, k: usize) -> Result<Option<String>> {
    let (phi, block) = if k % 2 == 0 {
        let n1 = rng.random_range(1..=2);
        let n2 = rng.random_range(1..=2);
        let m = rng.random_range(0..=2);
        random::separable(rng, n1, n2, m)?
    } else {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(0..=2);
        let phi = random::phi(rng, n, m)?;
        let block = random_block(rng, n);
        (phi, block)
    };
    let verdicts = [
        separated_by_flips(&phi, &block)?,
        is_separated(&phi, &block)?,
        separated_by_recomposition(&phi, &block)?,
    ];
    Ok((verdicts[0] != verdicts[1] || verdicts[1] != verdicts[2]).then(|| {
        format!(
            "block {block:?}: flips={}, derivatives={}, recomposition={} for {phi:?}",
            verdicts[0], verdicts[1], verdicts[2]
        )
    }))
}

fn recomposition_case(rng: &mut ChaCha8Rng, _: usize) -> Result<Option<String>> {
    let n = rng.random_range(2..=6);
    let n1 = rng.random_range(1..n);
    let m = rng.random_range(0..=2);
    let (phi, block) = random::separable(rng, n1, n - n1, m)?;
    let split = split_fn(&phi, &block)?;
    let joined = parallel_fn(&split.first, &split.second)?;
    let perm = split.partition.permutation();
    for row in 0..phi.rows() {
        let (mu, lambda) = phi.point(row);
        let want = phi.eval(&mu, &lambda)?.select(perm)?;
        let got = joined.eval(&mu.select(perm)?, &lambda)?;
        if want != got {
            return Ok(Some(format!(
                "block {block:?}: row mu={mu} lambda={lambda} gives {got}, expected {want}"
            )));
        }
    }
    Ok(None)
}

fn random_system(
    rng: &mut ChaCha8Rng,
    phi: GeneratorFn,
    inputs: &[Signal],
    grid_hi: i64,
) -> Result<RegularSystem> {
    let n = phi.n();
    let h = inputs[0].horizon();
    let mut b: SystemBuilder = RegularSystem::builder(phi);
    for (k, u) in inputs.iter().enumerate() {
        b = b.input(format!("u{}", k + 1), u.clone());
    }
    for k in 0..inputs.len() {
        let name = format!("u{}", k + 1);
        let count = rng.random_range(1..=(1usize << n).min(3));
        let initials: Vec<BitVec> = rand::seq::index::sample(rng, 1 << n, count)
            .into_iter()
            .map(|b| BitVec::new(n, b as u64).expect("index below 2^n"))
            .collect();
        for mu in initials {
            b = b.initial(&name, mu);
            for _ in 0..rng.random_range(1..=3) {
                let len = rng.random_range(1..=4);
                let g = random::grid(rng, 1, grid_hi, len);
                b = b.schedule(&name, mu, random::schedule(rng, n, &g, h)?);
            }
        }
    }
    b.build()
}

fn random_inputs(rng: &mut ChaCha8Rng, m: usize, h: Tick) -> Result<Vec<Signal>> {
    let mut out: Vec<Signal> = Vec::new();
    for _ in 0..rng.random_range(1..=2) {
        let u = random::signal(rng, m, 3, h)?;
        if !out.contains(&u) {
            out.push(u);
        }
    }
    Ok(out)
}

fn decomposition_case(rng: &mut ChaCha8Rng, _: usize) -> Result<Option<String>> {
    let h = Tick(12);
    let m = rng.random_range(1..=2);
    let inputs = random_inputs(rng, m, h)?;

    // containment for an arbitrary system over a separated Phi
    let (n1, n2) = (rng.random_range(1..=2), rng.random_range(1..=2));
    let (phi, block) = random::separable(rng, n1, n2, m)?;
    let sys = random_system(rng, phi, &inputs, 8)?;
    let d = decompose_system(&sys, &block)?;
    let hull = realize(&parallel_system(&d.first, &d.second)?)?;
    for entry in realize(&sys)?.entries() {
        let relabelled = entry.states.project(d.partition.permutation())?;
        let Some(h) = hull.get(&entry.name) else {
            return Ok(Some(format!("input {} lost", entry.name)));
        };
        if !relabelled.is_subset(h) {
            return Ok(Some(format!(
                "f({}) not contained in the parallel hull",
                entry.name
            )));
        }
    }

    // equality when the system is built in product form
    let (p1, p2) = (random::phi(rng, n1, m)?, random::phi(rng, n2, m)?);
    let first = random_system(rng, p1, &inputs, 8)?;
    let second = random_system(rng, p2, &inputs, 8)?;
    let joined = parallel_system(&first, &second)?;
    let head: Vec<usize> = (1..=n1).collect();
    let d = decompose_system(&joined, &head)?;
    if d.status != Status::Equal {
        return Ok(Some(format!(
            "product-form system reported {} ({:?})",
            d.status, d.product_condition.witness
        )));
    }
    let again = realize(&parallel_system(&d.first, &d.second)?)?;
    if again != realize(&joined)? {
        return Ok(Some("product-form realization changed".into()));
    }

    // the diagonal initial-state set is never a product
    let rr = ProgressiveFunction::new(2, vec![(Tick(1), BitVec::ones(2))], h)?;
    let diag = RegularSystem::builder(GeneratorFn::identity(2, m)?)
        .input("u", inputs[0].clone())
        .initial("u", BitVec::zeros(2))
        .initial("u", BitVec::ones(2))
        .schedule("u", BitVec::zeros(2), rr.clone())
        .schedule("u", BitVec::ones(2), rr)
        .build()?;
    let d = decompose_system(&diag, &[1])?;
    if d.status != Status::StrictSubset || d.sizes[0].hull <= d.sizes[0].original {
        return Ok(Some(format!("diagonal system reported {}", d.status)));
    }
    Ok(None)
}

fn delay_case(rng: &mut ChaCha8Rng, k: usize) -> Result<Option<String>> {
    let tau = match k {
        0 => 1,
        1 => 2,
        2 => 5,
        _ => rng.random_range(1..=8),
    };
    let h = Tick(tau + 8);
    let u = Signal::step(Tick(0), h)?;
    for t in -3..=tau + 5 {
        let want = (t >= tau, t > 0);
        let got = delay_bounds(&u, tau, Tick(t))?;
        if got != want {
            return Ok(Some(format!(
                "tau={tau}, t={t}: envelope {got:?}, expected {want:?}"
            )));
        }
    }
    // every scalar signal switching only on ticks -1..=tau+1
    let ticks: Vec<i64> = (-1..=tau + 1).collect();
    for code in 0..1u64 << ticks.len() {
        let value = |k: usize| BitVec::new(1, code >> k & 1).expect("one bit");
        let events = (1..ticks.len()).map(|k| (Tick(ticks[k]), value(k))).collect();
        let x = Signal::new(value(0), events, h)?;
        let expected = ticks.iter().enumerate().all(|(k, &t)| {
            let v = code >> k & 1 == 1;
            if t <= 0 {
                !v
            } else if t >= tau {
                v
            } else {
                true
            }
        });
        if delay_admits(&u, tau, &x)? != expected {
            return Ok(Some(format!(
                "tau={tau}: x={x} admitted={}, expected {expected}",
                !expected
            )));
        }
    }
    Ok(None)
}

fn schedule_product_case(rng: &mut ChaCha8Rng, _: usize) -> Result<Option<String>> {
    let h = Tick(40);
    let (n1, n2) = (rng.random_range(1..=4), rng.random_range(1..=4));
    let (r1, r2) = random::schedule_pair(rng, (n1, n2), h, 10)?;
    let p = r1.product(&r2)?;
    let counts_kept = (1..=n1).all(|i| p.firings(i) == r1.firings(i))
        && (1..=n2).all(|i| p.firings(n1 + i) == r2.firings(i));
    Ok((!(p.width() == n1 + n2 && p.is_prefix_progressive() && counts_kept))
        .then(|| format!("rho'={r1}; rho''={r2}; product={p}")))
}

fn synchronous_case(rng: &mut ChaCha8Rng, _: usize) -> Result<Option<String>> {
    let h = Tick(30);
    let n = rng.random_range(1..=4);
    let m = rng.random_range(0..=2);
    let phi = random::phi(rng, n, m)?;
    let mu = random::bits(rng, n);
    let u = random::signal(rng, m, 8, h)?;
    let len = rng.random_range(1..=20);
    let g = random::grid(rng, 0, h.get(), len);
    let rho = ProgressiveFunction::new(n, g.iter().map(|&t| (t, BitVec::ones(n))).collect(), h)?;
    let traj = run(&phi, &mu, &u, &rho)?;
    let mut omega = mu;
    for (k, &t) in g.iter().enumerate() {
        omega = phi.eval(&omega, &u.value_at(t)?)?;
        if traj.states[k] != (t, omega) {
            return Ok(Some(format!(
                "step {k} at t={t}: run gives {}, iteration gives {omega}",
                traj.states[k].1
            )));
        }
    }
    Ok(None)
}

/// Every set partition of `1..=n`, blocks ordered by first member.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn grow(k: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if k > n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(k);
            grow(k + 1, n, current, out);
            current[b].pop();
        }
        current.push(vec![k]);
        grow(k + 1, n, current, out);
        current.pop();
    }
    let mut out = Vec::new();
    grow(1, n, &mut Vec::new(), &mut out);
    out
}

fn minimality_case(rng: &mut ChaCha8Rng, k: usize) -> Result<Option<String>> {
    let phi = if k % 2 == 0 {
        random::phi(rng, 3, 1)?
    } else {
        let n1 = rng.random_range(1..=2);
        random::separable(rng, n1, 3 - n1, 1)?.0
    };
    let separated = |blocks: &[Vec<usize>]| -> Result<bool> {
        if blocks.len() == 1 {
            return Ok(true);
        }
        for b in blocks {
            if !separated_by_flips(&phi, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut valid = Vec::new();
    for p in all_partitions(3) {
        if separated(&p)? {
            valid.push(Partition::new(p, 3)?);
        }
    }
    let finest: Vec<&Partition> = valid
        .iter()
        .filter(|p| valid.iter().all(|q| p.refines(q)))
        .collect();
    let got = finest_partition(&phi)?;
    match finest.as_slice() {
        [unique] if **unique == got => Ok(None),
        [unique] => Ok(Some(format!(
            "finest_partition gave {got}, brute force {unique} for {phi:?}"
        ))),
        _ => Ok(Some(format!(
            "{} finest candidates for {phi:?}",
            finest.len()
        ))),
    }
}
