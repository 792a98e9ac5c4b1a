// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant binary signals, progressive functions and their products.
//!
//! Every object lives on the truncated time axis `(-inf, H]`. A [`Signal`] holds
//! `initial` on `(-inf, t_0)`, `v_k` on `[t_k, t_{k+1})` and the last value up to
//! and including `H`. A [`ProgressiveFunction`] is a finite list of firing
//! vectors `alpha^k` at ticks `t_k`; it is zero everywhere else.
//!
//! Representations are not unique: a signal may repeat a value at consecutive
//! events and a schedule may carry all-zero firings. Equality, ordering and
//! hashing are defined on the canonical forms, so two representations of the
//! same function compare equal.
//!
//! Text form, one object per line:
//!
//! ```text
//! n=2 init=00 H=10 events=(0,10);(2,11)
//! n=2 H=10 events=(1,11);(3,01)
//! ```

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::bits::{BitVec, Tick};
use crate::error::{Error, Result};

fn check_events(width: usize, events: &[(Tick, BitVec)], horizon: Tick) -> Result<()> {
    for w in events.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::EventOrder {
                prev: w[0].0,
                next: w[1].0,
            });
        }
    }
    for (t, v) in events {
        if v.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: v.width(),
            });
        }
        if *t > horizon {
            return Err(Error::HorizonExceeded {
                tick: *t,
                horizon,
            });
        }
    }
    Ok(())
}

/// Validates a 1-based coordinate selection: nonempty, in range, no repeats.
pub(crate) fn check_selection(coords: &[usize], width: usize) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::BadSelection("empty coordinate selection".into()));
    }
    let mut seen = 0u64;
    for &c in coords {
        if c == 0 || c > width {
            return Err(Error::IndexOutOfRange { index: c, width });
        }
        let b = 1u64 << (c - 1);
        if seen & b != 0 {
            return Err(Error::BadSelection(format!("coordinate {c} repeated")));
        }
        seen |= b;
    }
    Ok(())
}

fn range_coords(range: RangeInclusive<usize>) -> Vec<usize> {
    range.collect()
}

/// Sorted union of two strictly increasing tick lists.
fn merge_grids<'a>(
    a: impl Iterator<Item = &'a Tick>,
    b: impl Iterator<Item = &'a Tick>,
) -> Vec<Tick> {
    let mut grid: Vec<Tick> = a.chain(b).copied().collect();
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// A finite-event binary signal `R -> B^n`, truncated at a horizon.
#[derive(Clone)]
pub struct Signal {
    initial: BitVec,
    events: Vec<(Tick, BitVec)>,
    horizon: Tick,
}

impl Signal {
    pub fn new(initial: BitVec, events: Vec<(Tick, BitVec)>, horizon: Tick) -> Result<Self> {
        check_events(initial.width(), &events, horizon)?;
        Ok(Signal {
            initial,
            events,
            horizon,
        })
    }

    pub fn constant(value: BitVec, horizon: Tick) -> Self {
        Signal {
            initial: value,
            events: Vec::new(),
            horizon,
        }
    }

    /// The scalar step `chi_[at, inf)`, truncated at `horizon`.
    pub fn step(at: Tick, horizon: Tick) -> Result<Self> {
        Signal::new(
            BitVec::zeros(1),
            vec![(at, BitVec::ones(1))],
            horizon,
        )
    }

    pub fn width(&self) -> usize {
        self.initial.width()
    }

    pub fn horizon(&self) -> Tick {
        self.horizon
    }

    /// The value on `(-inf, t_0)`, usually written `x(-inf + 0)`.
    pub fn initial_value(&self) -> BitVec {
        self.initial
    }

    pub fn events(&self) -> &[(Tick, BitVec)] {
        &self.events
    }

    pub fn value_at(&self, t: Tick) -> Result<BitVec> {
        if t > self.horizon {
            return Err(Error::HorizonExceeded {
                tick: t,
                horizon: self.horizon,
            });
        }
        Ok(self.value_unchecked(t))
    }

    fn value_unchecked(&self, t: Tick) -> BitVec {
        match self.events.partition_point(|(tk, _)| *tk <= t) {
            0 => self.initial,
            k => self.events[k - 1].1,
        }
    }

    /// The same signal observed up to `horizon`; events past it are dropped.
    pub fn with_horizon(&self, horizon: Tick) -> Result<Signal> {
        let events = self.events.iter().filter(|(t, _)| *t <= horizon).copied().collect();
        Signal::new(self.initial, events, horizon)
    }

    /// Events that actually change the value.
    pub fn canonical_events(&self) -> impl Iterator<Item = &(Tick, BitVec)> + '_ {
        let mut current = self.initial;
        self.events.iter().filter(move |(_, v)| {
            let changes = *v != current;
            current = *v;
            changes
        })
    }

    pub fn canonicalize(&self) -> Signal {
        Signal {
            initial: self.initial,
            events: self.canonical_events().copied().collect(),
            horizon: self.horizon,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_events().count() == self.events.len()
    }

    /// The Cartesian product `(self, other)`: coordinates of `self` first.
    /// The event grid is the merged union of both grids.
    pub fn product(&self, other: &Signal) -> Result<Signal> {
        if self.horizon != other.horizon {
            return Err(Error::HorizonMismatch {
                left: self.horizon,
                right: other.horizon,
            });
        }
        let initial = self.initial.concat(&other.initial)?;
        let grid = merge_grids(
            self.events.iter().map(|(t, _)| t),
            other.events.iter().map(|(t, _)| t),
        );
        let events = grid
            .into_iter()
            .map(|t| {
                let v = self.value_unchecked(t).concat(&other.value_unchecked(t))?;
                Ok((t, v))
            })
            .collect::<Result<_>>()?;
        Ok(Signal {
            initial,
            events,
            horizon: self.horizon,
        })
    }

    /// Restriction to the listed 1-based coordinates, in the listed order.
    /// The result is canonical.
    pub fn project(&self, coords: &[usize]) -> Result<Signal> {
        check_selection(coords, self.width())?;
        let initial = self.initial.select(coords)?;
        let mut events = Vec::with_capacity(self.events.len());
        let mut current = initial;
        for (t, v) in &self.events {
            let p = v.select(coords)?;
            if p != current {
                events.push((*t, p));
                current = p;
            }
        }
        Ok(Signal {
            initial,
            events,
            horizon: self.horizon,
        })
    }

    pub fn project_range(&self, range: RangeInclusive<usize>) -> Result<Signal> {
        self.project(&range_coords(range))
    }

    /// The distinct values taken on the half-open window `[from, to)`.
    pub(crate) fn values_on(&self, from: Tick, to: Tick) -> Result<Vec<BitVec>> {
        if to > self.horizon + 1 {
            return Err(Error::HorizonExceeded {
                tick: to - 1,
                horizon: self.horizon,
            });
        }
        if from >= to {
            return Ok(Vec::new());
        }
        let mut out = vec![self.value_unchecked(from)];
        out.extend(
            self.events
                .iter()
                .filter(|(t, _)| *t > from && *t < to)
                .map(|(_, v)| *v),
        );
        Ok(out)
    }

    fn canonical_key(&self) -> (usize, Tick, BitVec) {
        (self.width(), self.horizon, self.initial)
    }
}

impl PartialEq for Signal {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_key() == other.canonical_key()
            && self.canonical_events().eq(other.canonical_events())
    }
}

impl Eq for Signal {}

impl Hash for Signal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_key().hash(state);
        for e in self.canonical_events() {
            e.hash(state);
        }
    }
}

impl Ord for Signal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key()
            .cmp(&other.canonical_key())
            .then_with(|| self.canonical_events().cmp(other.canonical_events()))
    }
}

impl PartialOrd for Signal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signal({self})")
    }
}

fn write_events(f: &mut fmt::Formatter<'_>, events: &[(Tick, BitVec)]) -> fmt::Result {
    f.write_str("events=")?;
    for (k, (t, v)) in events.iter().enumerate() {
        if k > 0 {
            f.write_str(";")?;
        }
        write!(f, "({t},{v})")?;
    }
    Ok(())
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} init={} H={} ",
            self.width(),
            self.initial,
            self.horizon
        )?;
        write_events(f, &self.events)
    }
}

/// Fields of one line of the signal / schedule text form.
struct Record {
    width: usize,
    init: Option<BitVec>,
    horizon: Tick,
    events: Vec<(Tick, BitVec)>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_record(text: &str, line: usize) -> Result<Record> {
    let text = text.trim();
    let (head, events_text) = match text.find("events=") {
        Some(k) => (&text[..k], &text[k + "events=".len()..]),
        None => return Err(format_err(line, "missing `events=` field")),
    };
    let mut width = None;
    let mut init = None;
    let mut horizon = None;
    for token in head.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| format_err(line, format!("expected key=value, found `{token}`")))?;
        match key {
            "n" => {
                width = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| format_err(line, format!("bad width `{value}`")))?,
                )
            }
            "init" => {
                init = Some(
                    value
                        .parse::<BitVec>()
                        .map_err(|e| format_err(line, e.to_string()))?,
                )
            }
            "H" => {
                horizon = Some(
                    value
                        .parse::<Tick>()
                        .map_err(|_| format_err(line, format!("bad horizon `{value}`")))?,
                )
            }
            other => return Err(format_err(line, format!("unknown field `{other}`"))),
        }
    }
    let width = width.ok_or_else(|| format_err(line, "missing `n=` field"))?;
    let horizon = horizon.ok_or_else(|| format_err(line, "missing `H=` field"))?;
    let mut events = Vec::new();
    for item in events_text.split(';') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let inner = item
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| format_err(line, format!("event `{item}` is not `(t,bits)`")))?;
        let (t, bits) = inner
            .split_once(',')
            .ok_or_else(|| format_err(line, format!("event `{item}` is not `(t,bits)`")))?;
        let t = t
            .parse::<Tick>()
            .map_err(|_| format_err(line, format!("bad tick in `{item}`")))?;
        let bits = bits
            .parse::<BitVec>()
            .map_err(|e| format_err(line, e.to_string()))?;
        if bits.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: bits.width(),
            });
        }
        events.push((t, bits));
    }
    Ok(Record {
        width,
        init,
        horizon,
        events,
    })
}

pub(crate) fn parse_signal_line(text: &str, line: usize) -> Result<Signal> {
    let rec = parse_record(text, line)?;
    let init = rec
        .init
        .ok_or_else(|| format_err(line, "missing `init=` field"))?;
    if init.width() != rec.width {
        return Err(Error::WidthMismatch {
            expected: rec.width,
            found: init.width(),
        });
    }
    Signal::new(init, rec.events, rec.horizon)
}

pub(crate) fn parse_schedule_line(text: &str, line: usize) -> Result<ProgressiveFunction> {
    let rec = parse_record(text, line)?;
    if rec.init.is_some() {
        return Err(format_err(line, "schedules take no `init=` field"));
    }
    ProgressiveFunction::new(rec.width, rec.events, rec.horizon)
}

impl FromStr for Signal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_signal_line(s, 1)
    }
}

/// A finite prefix of a progressive function: firing vectors `alpha^k` at
/// strictly increasing ticks `t_k`.
#[derive(Clone)]
pub struct ProgressiveFunction {
    width: usize,
    events: Vec<(Tick, BitVec)>,
    horizon: Tick,
}

impl ProgressiveFunction {
    pub fn new(width: usize, events: Vec<(Tick, BitVec)>, horizon: Tick) -> Result<Self> {
        if width > crate::bits::MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        check_events(width, &events, horizon)?;
        Ok(ProgressiveFunction {
            width,
            events,
            horizon,
        })
    }

    /// All coordinates fire together at ticks `1..=rounds`.
    pub fn round_robin(width: usize, rounds: i64, horizon: Tick) -> Result<Self> {
        let events = (1..=rounds)
            .map(|t| (Tick(t), BitVec::ones(width)))
            .collect();
        Self::new(width, events, horizon)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn horizon(&self) -> Tick {
        self.horizon
    }

    pub fn events(&self) -> &[(Tick, BitVec)] {
        &self.events
    }

    /// `rho(t)`: the firing vector at `t`, zero off the grid.
    pub fn alpha_at(&self, t: Tick) -> BitVec {
        match self.events.binary_search_by_key(&t, |(tk, _)| *tk) {
            Ok(k) => self.events[k].1,
            Err(_) => BitVec::zeros(self.width),
        }
    }

    /// How many times coordinate `i` fires within the prefix.
    pub fn firings(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.width);
        self.events
            .iter()
            .filter(|(_, a)| a.bits() >> (i - 1) & 1 == 1)
            .count()
    }

    /// Every coordinate fires at least `min_firings` times in the prefix.
    ///
    /// Progressiveness proper is a property of the infinite tail; this is its
    /// finite-prefix surrogate.
    pub fn fires_at_least(&self, min_firings: usize) -> bool {
        self.first_starved(min_firings).is_none()
    }

    pub fn is_prefix_progressive(&self) -> bool {
        self.fires_at_least(1)
    }

    /// The first coordinate firing fewer than `min_firings` times, with its count.
    pub fn first_starved(&self, min_firings: usize) -> Option<(usize, usize)> {
        (1..=self.width)
            .map(|i| (i, self.firings(i)))
            .find(|&(_, c)| c < min_firings)
    }

    /// The same schedule up to `horizon`; events past it are dropped.
    pub fn with_horizon(&self, horizon: Tick) -> Result<Self> {
        let events = self.events.iter().filter(|(t, _)| *t <= horizon).copied().collect();
        ProgressiveFunction::new(self.width, events, horizon)
    }

    pub fn canonical_events(&self) -> impl Iterator<Item = &(Tick, BitVec)> + '_ {
        self.events.iter().filter(|(_, a)| !a.is_zero())
    }

    /// Drops all-zero firings.
    pub fn canonicalize(&self) -> Self {
        ProgressiveFunction {
            width: self.width,
            events: self.canonical_events().copied().collect(),
            horizon: self.horizon,
        }
    }

    /// `rho' x rho''` on the merged grid. At a tick present in one factor only,
    /// the other half of the firing vector is zero.
    pub fn product(&self, other: &ProgressiveFunction) -> Result<Self> {
        if self.horizon != other.horizon {
            return Err(Error::HorizonMismatch {
                left: self.horizon,
                right: other.horizon,
            });
        }
        let width = self.width + other.width;
        if width > crate::bits::MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        let grid = merge_grids(
            self.events.iter().map(|(t, _)| t),
            other.events.iter().map(|(t, _)| t),
        );
        let events = grid
            .into_iter()
            .map(|t| Ok((t, self.alpha_at(t).concat(&other.alpha_at(t))?)))
            .collect::<Result<_>>()?;
        Ok(ProgressiveFunction {
            width,
            events,
            horizon: self.horizon,
        })
    }

    /// Restriction to the listed coordinates; all-zero firings are dropped.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        check_selection(coords, self.width)?;
        let mut events = Vec::with_capacity(self.events.len());
        for (t, a) in &self.events {
            let p = a.select(coords)?;
            if !p.is_zero() {
                events.push((*t, p));
            }
        }
        Ok(ProgressiveFunction {
            width: coords.len(),
            events,
            horizon: self.horizon,
        })
    }

    pub fn project_range(&self, range: RangeInclusive<usize>) -> Result<Self> {
        self.project(&range_coords(range))
    }

    fn canonical_key(&self) -> (usize, Tick) {
        (self.width, self.horizon)
    }
}

impl PartialEq for ProgressiveFunction {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_key() == other.canonical_key()
            && self.canonical_events().eq(other.canonical_events())
    }
}

impl Eq for ProgressiveFunction {}

impl Hash for ProgressiveFunction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_key().hash(state);
        for e in self.canonical_events() {
            e.hash(state);
        }
    }
}

impl Ord for ProgressiveFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key()
            .cmp(&other.canonical_key())
            .then_with(|| self.canonical_events().cmp(other.canonical_events()))
    }
}

impl PartialOrd for ProgressiveFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ProgressiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rho({self})")
    }
}

impl fmt::Display for ProgressiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} H={} ", self.width, self.horizon)?;
        write_events(f, &self.events)
    }
}

impl FromStr for ProgressiveFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_schedule_line(s, 1)
    }
}

/// A finite set of signals of one width on one horizon, stored canonically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignalSet {
    width: usize,
    horizon: Tick,
    members: BTreeSet<Signal>,
}

impl SignalSet {
    pub fn new(width: usize, horizon: Tick) -> Self {
        SignalSet {
            width,
            horizon,
            members: BTreeSet::new(),
        }
    }

    pub fn from_signals(
        width: usize,
        horizon: Tick,
        signals: impl IntoIterator<Item = Signal>,
    ) -> Result<Self> {
        let mut set = SignalSet::new(width, horizon);
        for s in signals {
            set.insert(s)?;
        }
        Ok(set)
    }

    /// Inserts the canonical form of `x`; returns whether it was new.
    pub fn insert(&mut self, x: Signal) -> Result<bool> {
        if x.width() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: x.width(),
            });
        }
        if x.horizon() != self.horizon {
            return Err(Error::HorizonMismatch {
                left: self.horizon,
                right: x.horizon(),
            });
        }
        let x = if x.is_canonical() { x } else { x.canonicalize() };
        Ok(self.members.insert(x))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn horizon(&self) -> Tick {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &Signal) -> bool {
        self.members.contains(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Signal> + '_ {
        self.members.iter()
    }

    pub fn is_subset(&self, other: &SignalSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// `X' x X''`.
    pub fn product(&self, other: &SignalSet) -> Result<SignalSet> {
        if self.horizon != other.horizon {
            return Err(Error::HorizonMismatch {
                left: self.horizon,
                right: other.horizon,
            });
        }
        let mut out = SignalSet::new(self.width + other.width, self.horizon);
        for a in &self.members {
            for b in &other.members {
                out.insert(a.product(b)?)?;
            }
        }
        Ok(out)
    }

    /// Every member restricted to `coords`.
    pub fn project(&self, coords: &[usize]) -> Result<SignalSet> {
        let mut out = SignalSet::new(coords.len(), self.horizon);
        for x in &self.members {
            out.insert(x.project(coords)?)?;
        }
        Ok(out)
    }
}

impl fmt::Debug for SignalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a SignalSet {
    type Item = &'a Signal;
    type IntoIter = std::collections::btree_set::Iter<'a, Signal>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
