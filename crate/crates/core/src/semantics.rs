// SPDX-License-Identifier: Apache-2.0

//! Asynchronous execution: masked updates, trajectories driven by a schedule,
//! bounded enumeration of the universal system, and the bounded-delay envelope.

use std::fmt;

use serde::Serialize;

use crate::bits::{BitVec, Tick};
use crate::boolfn::GeneratorFn;
use crate::error::{Error, Result};
use crate::signals::{ProgressiveFunction, Signal, SignalSet};

/// `Phi^nu(mu, lambda)`: coordinate `i` is recomputed when `nu_i = 1` and held
/// at `mu_i` otherwise.
pub fn apply_masked(
    phi: &GeneratorFn,
    nu: &BitVec,
    mu: &BitVec,
    lambda: &BitVec,
) -> Result<BitVec> {
    if nu.width() != phi.n() {
        return Err(Error::WidthMismatch {
            expected: phi.n(),
            found: nu.width(),
        });
    }
    let next = phi.eval(mu, lambda)?;
    BitVec::new(
        phi.n(),
        (mu.bits() & !nu.bits()) | (next.bits() & nu.bits()),
    )
}

/// One run `Phi^rho(mu, u, .)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    /// `omega_{-1}`
    pub initial: BitVec,
    /// `(t_k, omega_k)` for `k >= 0`, one per schedule event.
    pub states: Vec<(Tick, BitVec)>,
    #[serde(serialize_with = "serialize_display")]
    pub signal: Signal,
}

fn serialize_display<S: serde::Serializer, T: fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Trajectory {
    /// `omega_k` for `k >= -1`.
    pub fn omega(&self, k: isize) -> Option<BitVec> {
        if k == -1 {
            Some(self.initial)
        } else {
            usize::try_from(k)
                .ok()
                .and_then(|k| self.states.get(k))
                .map(|(_, w)| *w)
        }
    }
}

impl fmt::Display for Trajectory {
    /// `k=-1 omega=..`, then `k t_k omega=..` per step, then the signal line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k=-1 omega={}", self.initial)?;
        for (k, (t, w)) in self.states.iter().enumerate() {
            writeln!(f, "{k} {t} omega={w}")?;
        }
        writeln!(f, "{}", self.signal)
    }
}

/// Runs `phi` from `mu` under input `u`, recomputing the coordinates selected by
/// `rho` at each of its ticks: `omega_k = Phi^{alpha^k}(omega_{k-1}, u(t_k))`.
pub fn run(
    phi: &GeneratorFn,
    mu: &BitVec,
    u: &Signal,
    rho: &ProgressiveFunction,
) -> Result<Trajectory> {
    let n = phi.n();
    if mu.width() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: mu.width(),
        });
    }
    if rho.width() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: rho.width(),
        });
    }
    if u.width() != phi.m() {
        return Err(Error::WidthMismatch {
            expected: phi.m(),
            found: u.width(),
        });
    }
    if u.horizon() != rho.horizon() {
        return Err(Error::HorizonMismatch {
            left: u.horizon(),
            right: rho.horizon(),
        });
    }
    let mut omega = *mu;
    let mut states = Vec::with_capacity(rho.events().len());
    for (t, alpha) in rho.events() {
        omega = apply_masked(phi, alpha, &omega, &u.value_at(*t)?)?;
        states.push((*t, omega));
    }
    let signal = Signal::new(*mu, states.clone(), u.horizon())?.canonicalize();
    Ok(Trajectory {
        initial: *mu,
        states,
        signal,
    })
}

/// `{ run(phi, mu, u, rho) | mu in initials, rho in schedules }`, a finite
/// under-approximation of the universal system's `Xi_Phi(u)`, exact over the
/// supplied schedule family.
pub fn enumerate_states<'a>(
    phi: &GeneratorFn,
    u: &Signal,
    initials: impl IntoIterator<Item = &'a BitVec>,
    schedules: &[ProgressiveFunction],
) -> Result<SignalSet> {
    for rho in schedules {
        if let Some((coordinate, fired)) = rho.first_starved(1) {
            return Err(Error::NotProgressive { coordinate, fired });
        }
    }
    let mut out = SignalSet::new(phi.n(), u.horizon());
    for mu in initials {
        for rho in schedules {
            out.insert(run(phi, mu, u, rho)?.signal)?;
        }
    }
    Ok(out)
}

/// Built-in schedule families for [`enumerate_states`].
pub mod schedules {
    use super::*;

    const MAX_FAMILY: usize = 1 << 20;

    /// The single round-robin schedule: everything fires at ticks `1..=rounds`.
    pub fn round_robin(n: usize, rounds: i64, horizon: Tick) -> Result<Vec<ProgressiveFunction>> {
        Ok(vec![ProgressiveFunction::round_robin(n, rounds, horizon)?])
    }

    /// One schedule per tick `t` in `ticks`, firing every coordinate once at `t`.
    pub fn single_fire(
        n: usize,
        ticks: impl IntoIterator<Item = i64>,
        horizon: Tick,
    ) -> Result<Vec<ProgressiveFunction>> {
        ticks
            .into_iter()
            .map(|t| ProgressiveFunction::new(n, vec![(Tick(t), BitVec::ones(n))], horizon))
            .collect()
    }

    /// Every way to fire exactly one coordinate at each of `ticks`, keeping the
    /// prefix-progressive ones.
    pub fn interleavings(
        n: usize,
        ticks: &[Tick],
        horizon: Tick,
    ) -> Result<Vec<ProgressiveFunction>> {
        let total = (n as u128).checked_pow(ticks.len() as u32).unwrap_or(u128::MAX);
        if total > MAX_FAMILY as u128 {
            return Err(Error::SizeLimit {
                bits: ticks.len(),
                limit: MAX_FAMILY.ilog2() as usize,
            });
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; ticks.len()];
        loop {
            let events = ticks
                .iter()
                .zip(&choice)
                .map(|(&t, &c)| Ok((t, BitVec::zeros(n).with(c + 1, true)?)))
                .collect::<Result<_>>()?;
            let rho = ProgressiveFunction::new(n, events, horizon)?;
            if rho.is_prefix_progressive() {
                out.push(rho);
            }
            // odometer
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < n {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                return Ok(out);
            }
        }
    }

    /// All firing sequences `alpha^0 .. alpha^{depth-1}` over `B^n` at ticks
    /// `1..=depth`, keeping the prefix-progressive ones. `depth <= 4`.
    pub fn exhaustive(n: usize, depth: usize, horizon: Tick) -> Result<Vec<ProgressiveFunction>> {
        if depth > 4 {
            return Err(Error::BadSelection(format!(
                "exhaustive schedules go to depth 4, asked for {depth}"
            )));
        }
        let bits = n * depth;
        if bits > MAX_FAMILY.ilog2() as usize {
            return Err(Error::SizeLimit {
                bits,
                limit: MAX_FAMILY.ilog2() as usize,
            });
        }
        let mut out = Vec::new();
        for code in 0..1u64 << bits {
            let events = (0..depth)
                .map(|k| {
                    let alpha = BitVec::truncated(n, code >> (k * n));
                    (Tick(k as i64 + 1), alpha)
                })
                .collect();
            let rho = ProgressiveFunction::new(n, events, horizon)?;
            if rho.is_prefix_progressive() {
                out.push(rho);
            }
        }
        Ok(out)
    }
}

/// Minimum and maximum of the scalar signal `u` over `[t - tau, t)`.
pub fn delay_bounds(u: &Signal, tau: i64, t: Tick) -> Result<(bool, bool)> {
    if tau <= 0 {
        return Err(Error::NonPositiveDelay(tau));
    }
    if u.width() != 1 {
        return Err(Error::WidthMismatch {
            expected: 1,
            found: u.width(),
        });
    }
    if t > u.horizon() {
        return Err(Error::HorizonExceeded {
            tick: t,
            horizon: u.horizon(),
        });
    }
    let values = u.values_on(t - tau, t)?;
    let low = values.iter().all(|v| v.bits() == 1);
    let high = values.iter().any(|v| v.bits() == 1);
    Ok((low, high))
}

/// Whether the scalar `x` stays inside the delay envelope of `u` at every real
/// `t <= H`.
///
/// For `t` strictly between ticks `k` and `k + 1` the window `[t - tau, t)` meets
/// the pieces of `u` starting at `k - tau ..= k`, a superset of those seen at `t = k`,
/// while `x(t) = x(k)`. Checking every integer tick therefore covers the whole axis.
pub fn delay_admits(u: &Signal, tau: i64, x: &Signal) -> Result<bool> {
    if x.width() != 1 {
        return Err(Error::WidthMismatch {
            expected: 1,
            found: x.width(),
        });
    }
    if x.horizon() != u.horizon() {
        return Err(Error::HorizonMismatch {
            left: u.horizon(),
            right: x.horizon(),
        });
    }
    let h = u.horizon();
    let first = u
        .events()
        .iter()
        .chain(x.events())
        .map(|(t, _)| *t)
        .min()
        .unwrap_or(h);
    let mut k = first - tau - 1;
    while k <= h {
        let v = x.value_at(k)?.bits() == 1;
        let (low, high) = delay_bounds(u, tau, k)?;
        if (low && !v) || (v && !high) {
            return Ok(false);
        }
        k = k + 1;
    }
    Ok(true)
}
