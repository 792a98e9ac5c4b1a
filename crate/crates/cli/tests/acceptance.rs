// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Oracles here work on raw tables (`Vec<u64>`, row `mu | lambda << n`) and
//! sampled trajectories, independent of the library's simulator and analysis.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use asyncdec_core::boolfn::{
    finest_partition, is_separated, parallel_fn, partial_derivative, separated_by_flips,
    separated_by_recomposition, split_fn, GeneratorFn,
};
use asyncdec_core::semantics::{delay_admits, delay_bounds, run};
use asyncdec_core::systems::{decompose_system, parallel_system, RegularSystem, Status};
use asyncdec_core::{BitVec, ProgressiveFunction, Signal, Tick};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

// ---- raw-table oracles --------------------------------------------------

fn mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

fn random_table(r: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<u64> {
    (0..1usize << (n + m)).map(|_| r.random::<u64>() & mask(n)).collect()
}

fn to_fn(n: usize, m: usize, table: &[u64]) -> GeneratorFn {
    GeneratorFn::from_table(n, m, table.to_vec()).unwrap()
}

/// `Phi'(mu', l) ++ Phi''(mu'', l)` built row by row.
fn joined_table(t1: &[u64], n1: usize, t2: &[u64], n2: usize, m: usize) -> Vec<u64> {
    let n = n1 + n2;
    (0..1u64 << (n + m))
        .map(|row| {
            let mu = row & mask(n);
            let l = row >> n;
            let a = t1[((mu & mask(n1)) | l << n1) as usize];
            let b = t2[((mu >> n1) | l << n2) as usize];
            a | b << n1
        })
        .collect()
}

/// Relabels so that new coordinate `k` is old coordinate `perm[k - 1]`.
fn permute_table(t: &[u64], n: usize, m: usize, perm: &[usize]) -> Vec<u64> {
    let to_old = |v: u64| {
        perm.iter()
            .enumerate()
            .fold(0, |acc, (k, &c)| acc | (v >> k & 1) << (c - 1))
    };
    let to_new = |v: u64| {
        perm.iter()
            .enumerate()
            .fold(0, |acc, (k, &c)| acc | (v >> (c - 1) & 1) << k)
    };
    (0..1u64 << (n + m))
        .map(|row| {
            let mu = to_old(row & mask(n));
            to_new(t[(mu | (row >> n) << n) as usize])
        })
        .collect()
}

/// `depends[i][j]`: output `i` changes when input state `j` flips somewhere.
fn depends(t: &[u64], n: usize) -> Vec<Vec<bool>> {
    let mut d = vec![vec![false; n]; n];
    for (row, &out) in t.iter().enumerate() {
        for (j, dj) in (0..n).map(|j| (j, 1usize << j)) {
            let diff = out ^ t[row ^ dj];
            for (i, di) in d.iter_mut().enumerate() {
                di[j] |= diff >> i & 1 == 1;
            }
        }
    }
    d
}

fn block_separated(d: &[Vec<bool>], block: &[usize]) -> bool {
    let n = d.len();
    let inside = |c: usize| block.contains(&(c + 1));
    (0..n).all(|i| (0..n).all(|j| inside(i) == inside(j) || !d[i][j]))
}

/// A sampled run: the state on `[t, t + 1)` for `t` in `-1..=h`.
type Samples = Vec<u64>;

struct Wave {
    init: u64,
    events: Vec<(i64, u64)>,
}

impl Wave {
    fn at(&self, t: i64) -> u64 {
        self.events
            .iter()
            .take_while(|(s, _)| *s <= t)
            .last()
            .map_or(self.init, |e| e.1)
    }

    fn of_signal(x: &Signal) -> Wave {
        Wave {
            init: x.initial_value().bits(),
            events: x.events().iter().map(|(t, v)| (t.get(), v.bits())).collect(),
        }
    }
}

fn schedule_events(rho: &ProgressiveFunction) -> Vec<(i64, u64)> {
    rho.events().iter().map(|(t, a)| (t.get(), a.bits())).collect()
}

/// Tick-by-tick masked iteration. All events lie in `0..=h`.
fn brute_run(t: &[u64], n: usize, mu: u64, u: &Wave, rho: &[(i64, u64)], h: i64) -> Samples {
    let mut state = mu;
    (-1..=h)
        .map(|tick| {
            if let Some((_, alpha)) = rho.iter().find(|(s, _)| *s == tick) {
                let next = t[(state | u.at(tick) << n) as usize];
                state = (state & !alpha) | (next & alpha);
            }
            state
        })
        .collect()
}

fn sampled(x: &Signal, h: i64) -> Samples {
    (-1..=h).map(|t| x.value_at(Tick(t)).unwrap().bits()).collect()
}

fn random_wave(r: &mut ChaCha8Rng, m: usize, max_events: usize, h: i64) -> Wave {
    let count = r.random_range(0..=max_events);
    let mut ticks: Vec<i64> = rand::seq::index::sample(r, (h + 1) as usize, count)
        .into_iter()
        .map(|k| k as i64)
        .collect();
    ticks.sort_unstable();
    Wave {
        init: r.random::<u64>() & mask(m),
        events: ticks.into_iter().map(|t| (t, r.random::<u64>() & mask(m))).collect(),
    }
}

fn to_signal(w: &Wave, m: usize, h: i64) -> Signal {
    let bits = |v: u64| BitVec::new(m, v).unwrap();
    Signal::new(
        bits(w.init),
        w.events.iter().map(|&(t, v)| (Tick(t), bits(v))).collect(),
        Tick(h),
    )
    .unwrap()
}

/// `(tick, firing vector)` pairs in tick order.
type Firings = Vec<(i64, u64)>;

/// Firing vectors on a random nonempty set of ticks in `1..=h`, every coordinate
/// firing at least once.
fn random_rho(r: &mut ChaCha8Rng, n: usize, h: i64, max_events: usize) -> Vec<(i64, u64)> {
    let count = r.random_range(1..=max_events);
    let mut ticks: Vec<i64> = rand::seq::index::sample(r, h as usize, count)
        .into_iter()
        .map(|k| k as i64 + 1)
        .collect();
    ticks.sort_unstable();
    let mut alphas: Vec<u64> = ticks.iter().map(|_| r.random::<u64>() & mask(n)).collect();
    for i in 0..n {
        if alphas.iter().all(|a| a >> i & 1 == 0) {
            let k = r.random_range(0..alphas.len());
            alphas[k] |= 1 << i;
        }
    }
    ticks.into_iter().zip(alphas).collect()
}

/// Two schedules whose tick sets differ.
fn rho_pair(r: &mut ChaCha8Rng, n1: usize, n2: usize, h: i64) -> (Firings, Firings) {
    loop {
        let a = random_rho(r, n1, h, 10);
        let b = random_rho(r, n2, h, 10);
        let ta: Vec<i64> = a.iter().map(|e| e.0).collect();
        let tb: Vec<i64> = b.iter().map(|e| e.0).collect();
        if ta != tb {
            return (a, b);
        }
    }
}

fn to_rho(events: &[(i64, u64)], n: usize, h: i64) -> ProgressiveFunction {
    ProgressiveFunction::new(
        n,
        events
            .iter()
            .map(|&(t, a)| (Tick(t), BitVec::new(n, a).unwrap()))
            .collect(),
        Tick(h),
    )
    .unwrap()
}

fn bits(n: usize, v: u64) -> BitVec {
    BitVec::new(n, v).unwrap()
}

// ---- criteria -----------------------------------------------------------

/// Tables `n = 2, m = 1`, one per 16-bit code: row `r` holds bits `2r, 2r + 1`.
fn table_of_code(code: u32) -> Vec<u64> {
    (0..8).map(|r| u64::from(code >> (2 * r) & 3)).collect()
}

fn criterion_1(separable: &mut Vec<u32>) -> Outcome {
    let mut disagreements = 0;
    for code in 0..=u16::MAX as u32 {
        let t = table_of_code(code);
        let phi = to_fn(2, 1, &t);
        let verdicts = [
            separated_by_flips(&phi, &[1]).unwrap(),
            is_separated(&phi, &[1]).unwrap(),
            separated_by_recomposition(&phi, &[1]).unwrap(),
            block_separated(&depends(&t, 2), &[1]),
        ];
        if verdicts.iter().any(|&v| v != verdicts[0]) {
            disagreements += 1;
        } else if verdicts[0] {
            separable.push(code);
        }
    }
    // separable iff Phi_1 ignores mu_2 and Phi_2 ignores mu_1: 4^2 choices each
    let expected = 16 * 16;
    if disagreements == 0 && separable.len() == expected {
        Ok(format!(
            "65536 tables, 0 disagreements, {} separable",
            separable.len()
        ))
    } else {
        Err(format!(
            "{disagreements} disagreements, {} separable (expected {expected})",
            separable.len()
        ))
    }
}

fn criterion_2(r: &mut ChaCha8Rng) -> Outcome {
    let h = 50;
    let mut failures = 0;
    for _ in 0..1000 {
        let (n1, n2, m) = (r.random_range(1..=3), r.random_range(1..=3), r.random_range(1..=2));
        let (t1, t2) = (random_table(r, n1, m), random_table(r, n2, m));
        let u = random_wave(r, m, 8, h);
        let (e1, e2) = rho_pair(r, n1, n2, h);
        let (mu1, mu2) = (r.random::<u64>() & mask(n1), r.random::<u64>() & mask(n2));

        let (p1, p2) = (to_fn(n1, m, &t1), to_fn(n2, m, &t2));
        let us = to_signal(&u, m, h);
        let (r1, r2) = (to_rho(&e1, n1, h), to_rho(&e2, n2, h));
        let joint = run(
            &parallel_fn(&p1, &p2).unwrap(),
            &bits(n1, mu1).concat(&bits(n2, mu2)).unwrap(),
            &us,
            &r1.product(&r2).unwrap(),
        )
        .unwrap()
        .signal;
        let product = run(&p1, &bits(n1, mu1), &us, &r1)
            .unwrap()
            .signal
            .product(&run(&p2, &bits(n2, mu2), &us, &r2).unwrap().signal)
            .unwrap();

        let s1 = brute_run(&t1, n1, mu1, &u, &e1, h);
        let s2 = brute_run(&t2, n2, mu2, &u, &e2, h);
        let brute: Samples = s1.iter().zip(&s2).map(|(a, b)| a | b << n1).collect();
        if joint != product || sampled(&joint, h) != brute {
            failures += 1;
        }
    }
    if failures == 0 {
        Ok("1000/1000 parallel runs equal the product of factor runs".into())
    } else {
        Err(format!("{failures}/1000 instances differ"))
    }
}

fn criterion_3(r: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    for _ in 0..1000 {
        let (n1, n2, m) = (r.random_range(1..=3), r.random_range(1..=3), r.random_range(0..=2));
        let (t1, t2) = (random_table(r, n1, m), random_table(r, n2, m));
        let phi = parallel_fn(&to_fn(n1, m, &t1), &to_fn(n2, m, &t2)).unwrap();
        let n = n1 + n2;
        let expected = joined_table(&t1, n1, &t2, n2, m);
        let mut ok = phi.table() == expected.as_slice();
        let cross = |i: usize, j: usize| (i <= n1) != (j <= n1);
        for i in 1..=n {
            for j in (1..=n).filter(|&j| cross(i, j)) {
                ok &= partial_derivative(&phi, i, j).unwrap().is_identically_zero();
            }
        }
        for row in 0..1usize << (n + m) {
            for j in 0..n {
                let diff = expected[row] ^ expected[row ^ (1 << j)];
                let other = if j < n1 { mask(n) & !mask(n1) } else { mask(n1) };
                ok &= diff & other == 0;
            }
        }
        failures += usize::from(!ok);
    }
    if failures == 0 {
        Ok("1000/1000 compositions: cross derivatives zero, cross flips inert".into())
    } else {
        Err(format!("{failures}/1000 compositions fail"))
    }
}

fn criterion_4(r: &mut ChaCha8Rng, separable: &[u32]) -> Outcome {
    let mut failures = 0;
    for &code in separable {
        let t = table_of_code(code);
        let s = split_fn(&to_fn(2, 1, &t), &[1]).unwrap();
        let back = joined_table(s.first.table(), 1, s.second.table(), 1, 1);
        failures += usize::from(back != t);
    }
    for _ in 0..500 {
        let n = r.random_range(2..=6);
        let n1 = r.random_range(1..n);
        let m = r.random_range(0..=2);
        let joined = joined_table(&random_table(r, n1, m), n1, &random_table(r, n - n1, m), n - n1, m);
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(r);
        let t = permute_table(&joined, n, m, &perm);
        let phi = to_fn(n, m, &t);
        let detected = finest_partition(&phi).unwrap().blocks()[0].clone();
        let s = split_fn(&phi, &detected).unwrap();
        let p = s.partition.permutation();
        let (k1, k2) = (s.first.n(), s.second.n());
        let back = joined_table(s.first.table(), k1, s.second.table(), k2, m);
        failures += usize::from(permute_table(&t, n, m, p) != back);
    }
    let total = separable.len() + 500;
    if failures == 0 {
        Ok(format!("{total}/{total} splits recompose exactly"))
    } else {
        Err(format!("{failures}/{total} splits fail to recompose"))
    }
}

/// A system over `phi` with random initial states and schedules, plus the raw
/// data it was built from.
struct RawSystem {
    sys: RegularSystem,
    n: usize,
    table: Vec<u64>,
    inputs: Vec<Wave>,
    /// per input: `(mu, schedules)`
    data: Vec<Vec<(u64, Vec<Firings>)>>,
}

fn raw_system(r: &mut ChaCha8Rng, n: usize, m: usize, table: Vec<u64>, inputs: &[Wave], h: i64) -> RawSystem {
    let mut b = RegularSystem::builder(to_fn(n, m, &table));
    for (k, u) in inputs.iter().enumerate() {
        b = b.input(format!("u{k}"), to_signal(u, m, h));
    }
    let mut data = Vec::new();
    for k in 0..inputs.len() {
        let name = format!("u{k}");
        let count = r.random_range(1..=(1usize << n).min(3));
        let mut per = Vec::new();
        for mu in rand::seq::index::sample(r, 1 << n, count) {
            let mu = mu as u64;
            b = b.initial(&name, bits(n, mu));
            let mut scheds: Vec<Vec<(i64, u64)>> = Vec::new();
            for _ in 0..r.random_range(1..=3) {
                let e = random_rho(r, n, 8, 4);
                if !scheds.contains(&e) {
                    b = b.schedule(&name, bits(n, mu), to_rho(&e, n, h));
                    scheds.push(e);
                }
            }
            per.push((mu, scheds));
        }
        data.push(per);
    }
    RawSystem {
        sys: b.build().unwrap(),
        n,
        table,
        inputs: inputs.iter().map(|w| Wave { init: w.init, events: w.events.clone() }).collect(),
        data,
    }
}

fn raw_inputs(r: &mut ChaCha8Rng, m: usize, h: i64) -> Vec<Wave> {
    let mut out: Vec<Wave> = Vec::new();
    for _ in 0..r.random_range(1..=2) {
        let w = random_wave(r, m, 3, h);
        let sig = |w: &Wave| to_signal(w, m, h);
        if out.iter().all(|o| sig(o) != sig(&w)) {
            out.push(w);
        }
    }
    out
}

fn brute_realize(raw: &RawSystem, k: usize, h: i64) -> BTreeSet<Samples> {
    raw.data[k]
        .iter()
        .flat_map(|(mu, scheds)| {
            scheds
                .iter()
                .map(|e| brute_run(&raw.table, raw.n, *mu, &raw.inputs[k], e, h))
        })
        .collect()
}

/// Realization of a library-built system by brute force, from its accessors.
fn brute_realize_sys(sys: &RegularSystem, k: usize, h: i64) -> BTreeSet<Samples> {
    let u = Wave::of_signal(&sys.inputs()[k].signal);
    let mut out = BTreeSet::new();
    for mu in sys.phi0(k) {
        for s in sys.pi(k, mu).unwrap() {
            let e = schedule_events(&s.materialize().unwrap());
            out.insert(brute_run(sys.phi().table(), sys.n(), mu.bits(), &u, &e, h));
        }
    }
    out
}

fn product_sets(a: &BTreeSet<Samples>, b: &BTreeSet<Samples>, shift: usize) -> BTreeSet<Samples> {
    a.iter()
        .flat_map(|x| {
            b.iter()
                .map(move |y| x.iter().zip(y).map(|(p, q)| p | q << shift).collect())
        })
        .collect()
}

fn criterion_5(r: &mut ChaCha8Rng) -> Outcome {
    let h = 12;
    let mut failures = Vec::new();

    // (a) containment for arbitrary systems over a separated Phi
    for case in 0..500 {
        let m = r.random_range(1..=2);
        let (n1, n2) = (r.random_range(1..=2), r.random_range(1..=2));
        let n = n1 + n2;
        let joined = joined_table(&random_table(r, n1, m), n1, &random_table(r, n2, m), n2, m);
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(r);
        let table = permute_table(&joined, n, m, &perm);
        let block: Vec<usize> = (1..=n).filter(|&k| perm[k - 1] <= n1).collect();
        let inputs = raw_inputs(r, m, h);
        let raw = raw_system(r, n, m, table, &inputs, h);
        let d = decompose_system(&raw.sys, &block).unwrap();
        let p = d.partition.permutation().to_vec();
        let relabel = |v: u64| p.iter().enumerate().fold(0, |acc, (k, &c)| acc | (v >> (c - 1) & 1) << k);
        let mut all_equal = true;
        for k in 0..inputs.len() {
            let f: BTreeSet<Samples> = brute_realize(&raw, k, h)
                .into_iter()
                .map(|s| s.into_iter().map(relabel).collect())
                .collect();
            let hull = product_sets(
                &brute_realize_sys(&d.first, k, h),
                &brute_realize_sys(&d.second, k, h),
                d.first.n(),
            );
            if !f.is_subset(&hull) {
                failures.push(format!("(a) case {case}: f(u{k}) not contained in the hull"));
            }
            all_equal &= f == hull;
        }
        if (d.status == Status::Equal) != all_equal {
            failures.push(format!("(a) case {case}: status {} disagrees with sets", d.status));
        }
    }

    // (b) equality when phi0 and pi are in product form
    for case in 0..500 {
        let m = r.random_range(1..=2);
        let (n1, n2) = (r.random_range(1..=2), r.random_range(1..=2));
        let inputs = raw_inputs(r, m, h);
        let (t1, t2) = (random_table(r, n1, m), random_table(r, n2, m));
        let a = raw_system(r, n1, m, t1, &inputs, h);
        let b = raw_system(r, n2, m, t2, &inputs, h);
        let joined = parallel_system(&a.sys, &b.sys).unwrap();
        let head: Vec<usize> = (1..=n1).collect();
        let d = decompose_system(&joined, &head).unwrap();
        if d.status != Status::Equal {
            failures.push(format!("(b) case {case}: status {}", d.status));
        }
        for k in 0..inputs.len() {
            let want = product_sets(&brute_realize(&a, k, h), &brute_realize(&b, k, h), n1);
            let hull = product_sets(
                &brute_realize_sys(&d.first, k, h),
                &brute_realize_sys(&d.second, k, h),
                n1,
            );
            if brute_realize_sys(&joined, k, h) != want || hull != want {
                failures.push(format!("(b) case {case}: realized sets differ for u{k}"));
            }
        }
    }

    // (c) diagonal initial states
    let rho = to_rho(&[(1, 0b11)], 2, h);
    let diag = RegularSystem::builder(GeneratorFn::identity(2, 1).unwrap())
        .input("u", to_signal(&Wave { init: 0, events: vec![(0, 1)] }, 1, h))
        .initial("u", bits(2, 0b00))
        .initial("u", bits(2, 0b11))
        .schedule("u", bits(2, 0b00), rho.clone())
        .schedule("u", bits(2, 0b11), rho)
        .build()
        .unwrap();
    let d = decompose_system(&diag, &[1]).unwrap();
    let hull = product_sets(
        &brute_realize_sys(&d.first, 0, h),
        &brute_realize_sys(&d.second, 0, h),
        1,
    );
    let initials: BTreeSet<u64> = hull.iter().map(|s| s[0]).collect();
    let f = brute_realize_sys(&diag, 0, h);
    if d.status != Status::StrictSubset
        || hull.len() <= f.len()
        || !f.is_subset(&hull)
        || initials != BTreeSet::from([0b00, 0b01, 0b10, 0b11])
    {
        failures.push(format!(
            "(c) diagonal: status {}, |f|={}, |hull|={}",
            d.status,
            f.len(),
            hull.len()
        ));
    }

    if failures.is_empty() {
        Ok("(a) 500/500 contained, (b) 500/500 equal, (c) diagonal strict: |f|=2 < |hull|=4".into())
    } else {
        Err(failures.into_iter().take(3).collect::<Vec<_>>().join("; "))
    }
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    for tau in [1i64, 2, 5] {
        let h = tau + 10;
        let step = |s: i64| s >= 0;
        let u = Signal::step(Tick(0), Tick(h)).unwrap();
        for t in -3..=tau + 5 {
            // u is constant on [s, s + 1), so the window [t - tau, t) sees u(s) for s in t - tau..t
            let window: Vec<bool> = (t - tau..t).map(step).collect();
            let oracle = (window.iter().all(|&b| b), window.iter().any(|&b| b));
            let closed = (t >= tau, t > 0);
            let got = delay_bounds(&u, tau, Tick(t)).unwrap();
            if got != oracle || got != closed {
                failures.push(format!("tau={tau} t={t}: {got:?}, expected {closed:?}"));
            }
        }
        // every x switching only on ticks -1..=tau+1
        let ticks: Vec<i64> = (-1..=tau + 1).collect();
        let mut admitted = 0;
        for code in 0..1u64 << ticks.len() {
            let value = |k: usize| bits(1, code >> k & 1);
            let x = Signal::new(
                value(0),
                (1..ticks.len()).map(|k| (Tick(ticks[k]), value(k))).collect(),
                Tick(h),
            )
            .unwrap();
            // forced 0 for t <= 0, free on (0, tau), forced 1 for t >= tau
            let expected = ticks.iter().enumerate().all(|(k, &t)| {
                let v = code >> k & 1 == 1;
                (t > 0 || !v) && (t < tau || v)
            });
            admitted += usize::from(expected);
            if delay_admits(&u, tau, &x).unwrap() != expected {
                failures.push(format!("tau={tau}: x={x} misclassified"));
            }
        }
        // free ticks 1..tau-1 give 2^(tau-1) admissible shapes
        if admitted != 1 << (tau - 1) {
            failures.push(format!("tau={tau}: {admitted} admissible shapes"));
        }
    }
    if failures.is_empty() {
        Ok("envelope (step at tau, step after 0) exact for tau in {1,2,5}; admissible sets match".into())
    } else {
        Err(failures.into_iter().take(3).collect::<Vec<_>>().join("; "))
    }
}

fn criterion_7(r: &mut ChaCha8Rng) -> Outcome {
    let h = 40;
    let mut failures = 0;
    for _ in 0..1000 {
        let (n1, n2) = (r.random_range(1..=4), r.random_range(1..=4));
        let (e1, e2) = rho_pair(r, n1, n2, h);
        let p = to_rho(&e1, n1, h).product(&to_rho(&e2, n2, h)).unwrap();
        let alpha = |e: &[(i64, u64)], t: i64| e.iter().find(|x| x.0 == t).map_or(0, |x| x.1);
        let ticks: BTreeSet<i64> = e1.iter().chain(&e2).map(|x| x.0).collect();
        let want: Vec<(i64, u64)> = ticks
            .into_iter()
            .map(|t| (t, alpha(&e1, t) | alpha(&e2, t) << n1))
            .collect();
        let got = schedule_events(&p);
        let fires_all = (0..n1 + n2).all(|i| got.iter().any(|(_, a)| a >> i & 1 == 1));
        if !(p.is_prefix_progressive() && fires_all && got == want && p.width() == n1 + n2) {
            failures += 1;
        }
    }
    if failures == 0 {
        Ok("1000/1000 schedule products progressive on every coordinate".into())
    } else {
        Err(format!("{failures}/1000 products fail"))
    }
}

/// The five partitions of {1,2,3}, blocks ordered by first member.
fn partitions3() -> Vec<Vec<Vec<usize>>> {
    vec![
        vec![vec![1, 2, 3]],
        vec![vec![1], vec![2, 3]],
        vec![vec![1, 2], vec![3]],
        vec![vec![1, 3], vec![2]],
        vec![vec![1], vec![2], vec![3]],
    ]
}

fn finer(p: &[Vec<usize>], q: &[Vec<usize>]) -> bool {
    p.iter().all(|b| q.iter().any(|c| b.iter().all(|x| c.contains(x))))
}

fn check_minimal(t: &[u64]) -> Result<(), String> {
    let d = depends(t, 3);
    let all = partitions3();
    let valid: Vec<&Vec<Vec<usize>>> = all
        .iter()
        .filter(|p| p.len() == 1 || p.iter().all(|b| block_separated(&d, b)))
        .collect();
    let finest: Vec<&&Vec<Vec<usize>>> = valid
        .iter()
        .filter(|p| valid.iter().all(|q| finer(p, q)))
        .collect();
    let got = finest_partition(&to_fn(3, 1, t)).unwrap();
    match finest.as_slice() {
        [unique] if got.blocks() == unique.as_slice() => Ok(()),
        [unique] => Err(format!("{t:?}: got {got}, brute force {unique:?}")),
        _ => Err(format!("{t:?}: {} finest candidates", finest.len())),
    }
}

fn criterion_8(r: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut check = |t: &[u64]| {
        checked += 1;
        if let Err(e) = check_minimal(t) {
            failures.push(e);
        }
    };
    for _ in 0..10_000 {
        check(&random_table(r, 3, 1));
    }
    // every block-diagonal table: each block's outputs read only that block and u1
    for shape in partitions3().into_iter().filter(|p| p.len() > 1) {
        let sizes: Vec<usize> = shape.iter().map(Vec::len).collect();
        let codes: Vec<u64> = sizes.iter().map(|&s| 1u64 << (s * (1 << (s + 1)))).collect();
        let mut index = vec![0u64; shape.len()];
        'outer: loop {
            let table: Vec<u64> = (0..16u64)
                .map(|row| {
                    let l = row >> 3;
                    shape.iter().enumerate().fold(0, |acc, (b, block)| {
                        let s = block.len();
                        let local = block
                            .iter()
                            .enumerate()
                            .fold(0, |a, (k, &c)| a | (row >> (c - 1) & 1) << k);
                        let out = index[b] >> (s as u64 * (local | l << s)) & mask(s);
                        block
                            .iter()
                            .enumerate()
                            .fold(acc, |a, (k, &c)| a | (out >> k & 1) << (c - 1))
                    })
                })
                .collect();
            check(&table);
            for b in 0..index.len() {
                index[b] += 1;
                if index[b] < codes[b] {
                    continue 'outer;
                }
                index[b] = 0;
            }
            break;
        }
    }
    if failures.is_empty() {
        Ok(format!("{checked} tables, 0 disagreements with brute force"))
    } else {
        Err(format!(
            "{} of {checked} disagree, e.g. {}",
            failures.len(),
            failures[0]
        ))
    }
}

fn criterion_9(r: &mut ChaCha8Rng) -> Outcome {
    let h = 30;
    let mut failures = 0;
    for _ in 0..500 {
        let n = r.random_range(1..=4);
        let m = r.random_range(0..=2);
        let t = random_table(r, n, m);
        let mu = r.random::<u64>() & mask(n);
        let u = random_wave(r, m, 8, h);
        let count = r.random_range(1..=20);
        let mut ticks: Vec<i64> = rand::seq::index::sample(r, (h + 1) as usize, count)
            .into_iter()
            .map(|k| k as i64)
            .collect();
        ticks.sort_unstable();
        let rho = ProgressiveFunction::new(
            n,
            ticks.iter().map(|&s| (Tick(s), BitVec::ones(n))).collect(),
            Tick(h),
        )
        .unwrap();
        let traj = run(&to_fn(n, m, &t), &bits(n, mu), &to_signal(&u, m, h), &rho).unwrap();
        let mut state = mu;
        let direct: Vec<(Tick, BitVec)> = ticks
            .iter()
            .map(|&s| {
                state = t[(state | u.at(s) << n) as usize];
                (Tick(s), bits(n, state))
            })
            .collect();
        failures += usize::from(traj.states != direct);
    }
    if failures == 0 {
        Ok("500/500 all-ones runs equal direct iteration".into())
    } else {
        Err(format!("{failures}/500 runs differ"))
    }
}

fn criterion_10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("asyncdec-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let invoke = |k: usize| {
        let json = dir.join(format!("report{k}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_asyncdec"))
            .args(["verify", "--thm", "all", "--seed", "7", "--out"])
            .arg(&json)
            .output()
            .map_err(|e| e.to_string())?;
        let doc = std::fs::read(&json).map_err(|e| e.to_string())?;
        Ok::<_, String>((out.status.code(), out.stdout, doc))
    };
    let (a, b) = (invoke(1)?, invoke(2)?);
    let _ = std::fs::remove_dir_all(&dir);
    if a.0 != Some(0) || b.0 != Some(0) {
        return Err(format!("exit codes {:?}, {:?}", a.0, b.0));
    }
    if a.1 != b.1 || a.2 != b.2 {
        return Err("reports differ between runs".into());
    }
    Ok(format!(
        "exit 0 twice, {} bytes of text and {} bytes of JSON identical",
        a.1.len(),
        a.2.len()
    ))
}

/// A criterion sees the shared generator and the separable codes found by the first one.
type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng, &mut Vec<u32>) -> Outcome>;

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut separable = Vec::new();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("separation tests agree exhaustively", Box::new(|_, s| criterion_1(s))),
        ("parallel runs are products", Box::new(|r, _| criterion_2(r))),
        ("composition separates coordinates", Box::new(|r, _| criterion_3(r))),
        ("split recomposes", Box::new(|r, s| criterion_4(r, s))),
        ("system decomposition", Box::new(|r, _| criterion_5(r))),
        ("bounded-delay envelope", Box::new(|_, _| criterion_6())),
        ("schedule products progressive", Box::new(|r, _| criterion_7(r))),
        ("finest partition minimal", Box::new(|r, _| criterion_8(r))),
        ("synchronous reduction", Box::new(|r, _| criterion_9(r))),
        ("CLI determinism", Box::new(|_, _| criterion_10())),
    ];
    let mut all = true;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check(&mut rng, &mut separable);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                all = false;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
