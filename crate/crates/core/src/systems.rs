// SPDX-License-Identifier: Apache-2.0

//! Regular asynchronous systems as explicit finite bundles.
//!
//! A [`RegularSystem`] is a generator function `Phi`, a finite list of admissible
//! inputs `U`, an initial-state function `phi0: U -> P*(B^n)` and a computation
//! function `pi` giving, for every `(mu, u)` with `mu in phi0(u)`, a nonempty
//! set of schedules. It denotes
//!
//! ```text
//! f(u) = { Phi^rho(mu, u, .) | mu in phi0(u), rho in pi(mu, u) }
//! ```
//!
//! on the common horizon of its inputs and schedules.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bits::{BitVec, Tick};
use crate::boolfn::{self, complement, GeneratorFn, Partition};
use crate::error::{Error, Result};
use crate::semantics::run;
use crate::signals::{check_selection, ProgressiveFunction, Signal, SignalSet};

/// A named admissible input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Input {
    pub name: String,
    pub signal: Signal,
}

/// An element of `pi(mu, u)`. Products built by [`parallel_system`] are kept
/// as pairs and merged into one schedule only when needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Schedule {
    Single(ProgressiveFunction),
    Product(Box<Schedule>, Box<Schedule>),
}

impl Schedule {
    pub fn width(&self) -> usize {
        match self {
            Schedule::Single(rho) => rho.width(),
            Schedule::Product(a, b) => a.width() + b.width(),
        }
    }

    pub fn horizon(&self) -> Tick {
        match self {
            Schedule::Single(rho) => rho.horizon(),
            Schedule::Product(a, _) => a.horizon(),
        }
    }

    /// The schedule as one progressive function; products are zero-padded on
    /// the merged grid.
    pub fn materialize(&self) -> Result<ProgressiveFunction> {
        match self {
            Schedule::Single(rho) => Ok(rho.clone()),
            Schedule::Product(a, b) => a.materialize()?.product(&b.materialize()?),
        }
    }
}

impl From<ProgressiveFunction> for Schedule {
    fn from(rho: ProgressiveFunction) -> Self {
        Schedule::Single(rho)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularSystem {
    phi: GeneratorFn,
    horizon: Tick,
    inputs: Vec<Input>,
    // indexed like `inputs`
    phi0: Vec<BTreeSet<BitVec>>,
    pi: BTreeMap<(usize, BitVec), Vec<Schedule>>,
}

impl RegularSystem {
    pub fn builder(phi: GeneratorFn) -> SystemBuilder {
        SystemBuilder {
            phi,
            inputs: Vec::new(),
            phi0: Vec::new(),
            pi: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    /// Validates and assembles a bundle. `phi0[k]` belongs to `inputs[k]`;
    /// `pi` is keyed by `(input index, mu)` and must cover exactly the pairs with
    /// `mu in phi0[k]`.
    pub fn new(
        phi: GeneratorFn,
        inputs: Vec<Input>,
        phi0: Vec<BTreeSet<BitVec>>,
        pi: BTreeMap<(usize, BitVec), Vec<Schedule>>,
    ) -> Result<Self> {
        let Some(first) = inputs.first() else {
            return Err(Error::DomainViolation("no admissible inputs".into()));
        };
        let horizon = first.signal.horizon();
        for (k, inp) in inputs.iter().enumerate() {
            if inp.signal.width() != phi.m() {
                return Err(Error::WidthMismatch {
                    expected: phi.m(),
                    found: inp.signal.width(),
                });
            }
            if inp.signal.horizon() != horizon {
                return Err(Error::HorizonMismatch {
                    left: horizon,
                    right: inp.signal.horizon(),
                });
            }
            if let Some(dup) = inputs[..k]
                .iter()
                .find(|o| o.signal == inp.signal || o.name == inp.name)
            {
                return Err(Error::DomainViolation(format!(
                    "inputs `{}` and `{}` coincide",
                    dup.name, inp.name
                )));
            }
        }
        if phi0.len() != inputs.len() {
            return Err(Error::DomainViolation(format!(
                "{} initial-state sets for {} inputs",
                phi0.len(),
                inputs.len()
            )));
        }
        for (k, set) in phi0.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::DomainViolation(format!(
                    "phi0({}) is empty",
                    inputs[k].name
                )));
            }
            if let Some(mu) = set.iter().find(|mu| mu.width() != phi.n()) {
                return Err(Error::WidthMismatch {
                    expected: phi.n(),
                    found: mu.width(),
                });
            }
            for mu in set {
                if !pi.contains_key(&(k, *mu)) {
                    return Err(Error::DomainViolation(format!(
                        "pi({mu}, {}) is undefined",
                        inputs[k].name
                    )));
                }
            }
        }
        for ((k, mu), schedules) in &pi {
            let Some(set) = phi0.get(*k) else {
                return Err(Error::DomainViolation(format!(
                    "pi refers to input #{k}, which does not exist"
                )));
            };
            let name = &inputs[*k].name;
            if !set.contains(mu) {
                return Err(Error::DomainViolation(format!(
                    "pi({mu}, {name}) is defined but {mu} is not in phi0({name})"
                )));
            }
            if schedules.is_empty() {
                return Err(Error::DomainViolation(format!("pi({mu}, {name}) is empty")));
            }
            for s in schedules {
                if s.width() != phi.n() {
                    return Err(Error::WidthMismatch {
                        expected: phi.n(),
                        found: s.width(),
                    });
                }
                let rho = s.materialize()?;
                if rho.horizon() != horizon {
                    return Err(Error::HorizonMismatch {
                        left: horizon,
                        right: rho.horizon(),
                    });
                }
                if let Some((coordinate, fired)) = rho.first_starved(1) {
                    return Err(Error::NotProgressive { coordinate, fired });
                }
            }
        }
        Ok(RegularSystem {
            phi,
            horizon,
            inputs,
            phi0,
            pi,
        })
    }

    pub fn phi(&self) -> &GeneratorFn {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn m(&self) -> usize {
        self.phi.m()
    }

    pub fn horizon(&self) -> Tick {
        self.horizon
    }

    pub fn inputs(&self) -> &[Input] {
        &self.inputs
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|i| i.name == name)
    }

    /// `phi0(u)` for the `k`-th input.
    pub fn phi0(&self, k: usize) -> &BTreeSet<BitVec> {
        &self.phi0[k]
    }

    /// `pi(mu, u)` for the `k`-th input.
    pub fn pi(&self, k: usize, mu: &BitVec) -> Option<&[Schedule]> {
        self.pi.get(&(k, *mu)).map(Vec::as_slice)
    }

    pub fn pi_entries(&self) -> impl Iterator<Item = (&(usize, BitVec), &Vec<Schedule>)> {
        self.pi.iter()
    }
}

/// Incremental construction of a [`RegularSystem`] by input name.
pub struct SystemBuilder {
    phi: GeneratorFn,
    inputs: Vec<Input>,
    phi0: Vec<BTreeSet<BitVec>>,
    pi: BTreeMap<(usize, BitVec), Vec<Schedule>>,
    errors: Vec<Error>,
}

impl SystemBuilder {
    pub fn input(mut self, name: impl Into<String>, signal: Signal) -> Self {
        self.inputs.push(Input {
            name: name.into(),
            signal,
        });
        self.phi0.push(BTreeSet::new());
        self
    }

    fn index(&mut self, name: &str) -> Option<usize> {
        let k = self.inputs.iter().position(|i| i.name == name);
        if k.is_none() {
            self.errors
                .push(Error::DomainViolation(format!("unknown input `{name}`")));
        }
        k
    }

    /// Adds `mu` to `phi0(name)`.
    pub fn initial(mut self, name: &str, mu: BitVec) -> Self {
        if let Some(k) = self.index(name) {
            self.phi0[k].insert(mu);
        }
        self
    }

    /// Adds `schedule` to `pi(mu, name)`.
    pub fn schedule(mut self, name: &str, mu: BitVec, schedule: impl Into<Schedule>) -> Self {
        if let Some(k) = self.index(name) {
            let entry = self.pi.entry((k, mu)).or_default();
            let s = schedule.into();
            if !entry.contains(&s) {
                entry.push(s);
            }
        }
        self
    }

    pub fn build(mut self) -> Result<RegularSystem> {
        if !self.errors.is_empty() {
            return Err(self.errors.remove(0));
        }
        RegularSystem::new(self.phi, self.inputs, self.phi0, self.pi)
    }
}

/// One input and its realized state set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputEntry {
    pub name: String,
    pub input: Signal,
    pub states: SignalSet,
}

/// The realized system `u -> f(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemOutput {
    entries: Vec<OutputEntry>,
}

impl SystemOutput {
    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&SignalSet> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.states)
    }

    /// Lookup by canonical input equality.
    pub fn get_by_input(&self, u: &Signal) -> Option<&SignalSet> {
        self.entries.iter().find(|e| &e.input == u).map(|e| &e.states)
    }
}

/// `f(u) = { run(Phi, mu, u, rho) | mu in phi0(u), rho in pi(mu, u) }` for every input.
pub fn realize(sys: &RegularSystem) -> Result<SystemOutput> {
    let entries = sys
        .inputs
        .iter()
        .enumerate()
        .map(|(k, inp)| {
            let mut states = SignalSet::new(sys.n(), sys.horizon);
            for mu in &sys.phi0[k] {
                for s in &sys.pi[&(k, *mu)] {
                    states.insert(run(&sys.phi, mu, &inp.signal, &s.materialize()?)?.signal)?;
                }
            }
            Ok(OutputEntry {
                name: inp.name.clone(),
                input: inp.signal.clone(),
                states,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SystemOutput { entries })
}

/// `phi0(u) = { x(-inf + 0) | x in f(u) }`, per input in output order.
pub fn initial_state_function(out: &SystemOutput) -> Vec<(String, BTreeSet<BitVec>)> {
    out.entries
        .iter()
        .map(|e| {
            (
                e.name.clone(),
                e.states.iter().map(Signal::initial_value).collect(),
            )
        })
        .collect()
}

/// The parallel connection `f' || f''` on the common inputs, with
/// `Phi = Phi' || Phi''`, `phi0 = phi0' x phi0''` and `pi = pi' x pi''`.
pub fn parallel_system(first: &RegularSystem, second: &RegularSystem) -> Result<RegularSystem> {
    if first.m() != second.m() {
        return Err(Error::WidthMismatch {
            expected: first.m(),
            found: second.m(),
        });
    }
    if first.horizon != second.horizon {
        return Err(Error::HorizonMismatch {
            left: first.horizon,
            right: second.horizon,
        });
    }
    let phi = boolfn::parallel_fn(&first.phi, &second.phi)?;
    let mut inputs = Vec::new();
    let mut phi0 = Vec::new();
    let mut pi = BTreeMap::new();
    for (k1, inp) in first.inputs.iter().enumerate() {
        let Some(k2) = second.inputs.iter().position(|o| o.signal == inp.signal) else {
            continue;
        };
        let k = inputs.len();
        let mut initials = BTreeSet::new();
        for mu1 in &first.phi0[k1] {
            for mu2 in &second.phi0[k2] {
                let mu = mu1.concat(mu2)?;
                initials.insert(mu);
                let mut schedules = Vec::new();
                for s1 in &first.pi[&(k1, *mu1)] {
                    for s2 in &second.pi[&(k2, *mu2)] {
                        schedules.push(Schedule::Product(
                            Box::new(s1.clone()),
                            Box::new(s2.clone()),
                        ));
                    }
                }
                pi.insert((k, mu), schedules);
            }
        }
        inputs.push(inp.clone());
        phi0.push(initials);
    }
    if inputs.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    RegularSystem::new(phi, inputs, phi0, pi)
}

/// `phi0'(u) = { mu restricted to coords | mu in phi0(u) }`, per input.
pub fn project_phi0(sys: &RegularSystem, coords: &[usize]) -> Result<Vec<BTreeSet<BitVec>>> {
    check_selection(coords, sys.n())?;
    sys.phi0
        .iter()
        .map(|set| set.iter().map(|mu| mu.select(coords)).collect())
        .collect()
}

/// `pi'(mu', u)`: the restrictions to `coords` of every `rho in pi(mu, u)` over all
/// `mu in phi0(u)` that restrict to `mu'`. Keyed by `(input index, mu')`.
pub fn project_pi(
    sys: &RegularSystem,
    coords: &[usize],
) -> Result<BTreeMap<(usize, BitVec), BTreeSet<ProgressiveFunction>>> {
    check_selection(coords, sys.n())?;
    let mut out: BTreeMap<(usize, BitVec), BTreeSet<ProgressiveFunction>> = BTreeMap::new();
    for ((k, mu), schedules) in &sys.pi {
        let entry = out.entry((*k, mu.select(coords)?)).or_default();
        for s in schedules {
            entry.insert(s.materialize()?.project(coords)?);
        }
    }
    Ok(out)
}

/// Where the product condition fails: no `rho~ in pi(mu, u)` reproduces the run
/// along `rho' x rho''`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductWitness {
    pub input: String,
    pub mu: BitVec,
    #[serde(serialize_with = "display")]
    pub rho_first: ProgressiveFunction,
    #[serde(serialize_with = "display")]
    pub rho_second: ProgressiveFunction,
}

fn display<S: serde::Serializer, T: std::fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductCheck {
    pub holds: bool,
    /// Trajectories were compared on `(-inf, horizon]`.
    pub horizon: Tick,
    pub witness: Option<ProductWitness>,
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &c) in perm.iter().enumerate() {
        inv[c - 1] = k + 1;
    }
    inv
}

/// Checks `pi(mu, u) ~ pi'(mu', u) x pi''(mu'', u)` for every `u` and `mu in phi0(u)`:
/// each product schedule must be matched, trajectory for trajectory, by some
/// schedule already in `pi(mu, u)`. `block` must be separated for `Phi`.
pub fn check_product_condition(sys: &RegularSystem, block: &[usize]) -> Result<ProductCheck> {
    if let Some(w) = boolfn::separation_witness(&sys.phi, block)? {
        return Err(Error::NotSeparated(w));
    }
    let partition = Partition::bipartition(block, sys.n())?;
    let [first, second] = partition.blocks() else {
        unreachable!("bipartition has two blocks");
    };
    let back = inverse(partition.permutation());
    let pi1 = project_pi(sys, first)?;
    let pi2 = project_pi(sys, second)?;
    for (k, inp) in sys.inputs.iter().enumerate() {
        for mu in &sys.phi0[k] {
            let reachable: BTreeSet<Signal> = sys.pi[&(k, *mu)]
                .iter()
                .map(|s| Ok(run(&sys.phi, mu, &inp.signal, &s.materialize()?)?.signal))
                .collect::<Result<_>>()?;
            let (mu1, mu2) = (mu.select(first)?, mu.select(second)?);
            for r1 in &pi1[&(k, mu1)] {
                for r2 in &pi2[&(k, mu2)] {
                    let rho = r1.product(r2)?.project(&back)?;
                    let target = run(&sys.phi, mu, &inp.signal, &rho)?.signal;
                    if !reachable.contains(&target) {
                        return Ok(ProductCheck {
                            holds: false,
                            horizon: sys.horizon,
                            witness: Some(ProductWitness {
                                input: inp.name.clone(),
                                mu: *mu,
                                rho_first: r1.clone(),
                                rho_second: r2.clone(),
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(ProductCheck {
        holds: true,
        horizon: sys.horizon,
        witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// `f = f' || f''`
    Equal,
    /// `f` is a proper subset of `f' || f''` for some input.
    StrictSubset,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Equal => "equal",
            Status::StrictSubset => "strict-subset",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputSizes {
    pub input: String,
    pub original: usize,
    pub hull: usize,
}

/// A system split along a separated block. `first` lives on the block,
/// `second` on its complement; both refer to coordinates relabelled by
/// `partition.permutation()`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub partition: Partition,
    pub first: RegularSystem,
    pub second: RegularSystem,
    pub status: Status,
    /// `phi0(u) = phi0'(u) x phi0''(u)` for every input.
    pub product_initials: bool,
    pub product_condition: ProductCheck,
    pub sizes: Vec<InputSizes>,
}

/// Decomposes `sys` along `block` into `f'` and `f''` with `f` contained in `f' || f''`.
///
/// The containment is checked on the realized sets, and the status comes from
/// comparing them. It must agree with the two product conditions; a
/// disagreement is reported as [`Error::Inconsistent`].
pub fn decompose_system(sys: &RegularSystem, block: &[usize]) -> Result<Decomposition> {
    let split = boolfn::split_fn(&sys.phi, block)?;
    let partition = split.partition;
    let [b1, b2] = partition.blocks() else {
        unreachable!("bipartition has two blocks");
    };
    let factor = |phi: GeneratorFn, coords: &[usize]| -> Result<RegularSystem> {
        let phi0 = project_phi0(sys, coords)?;
        let pi = project_pi(sys, coords)?
            .into_iter()
            .map(|(key, set)| (key, set.into_iter().map(Schedule::Single).collect()))
            .collect();
        RegularSystem::new(phi, sys.inputs.clone(), phi0, pi)
    };
    let first = factor(split.first, b1)?;
    let second = factor(split.second, b2)?;

    let product_initials = (0..sys.inputs.len()).all(|k| {
        let hull: usize = first.phi0[k].len() * second.phi0[k].len();
        hull == sys.phi0[k].len()
    });
    let product_condition = check_product_condition(sys, block)?;

    let hull = realize(&parallel_system(&first, &second)?)?;
    let original = realize(sys)?;
    let perm = partition.permutation();
    let mut sizes = Vec::new();
    let mut all_equal = true;
    for entry in original.entries() {
        let relabelled = entry.states.project(perm)?;
        let Some(h) = hull.get(&entry.name) else {
            return Err(Error::Inconsistent(format!(
                "input `{}` missing from the parallel hull",
                entry.name
            )));
        };
        if !relabelled.is_subset(h) {
            return Err(Error::Inconsistent(format!(
                "f({}) is not contained in (f' || f'')({})",
                entry.name, entry.name
            )));
        }
        all_equal &= relabelled.len() == h.len();
        sizes.push(InputSizes {
            input: entry.name.clone(),
            original: relabelled.len(),
            hull: h.len(),
        });
    }
    let conditions = product_initials && product_condition.holds;
    if conditions != all_equal {
        return Err(Error::Inconsistent(format!(
            "product conditions {} but realized sets {}",
            if conditions { "hold" } else { "fail" },
            if all_equal { "coincide" } else { "differ" }
        )));
    }
    Ok(Decomposition {
        partition,
        first,
        second,
        status: if all_equal {
            Status::Equal
        } else {
            Status::StrictSubset
        },
        product_initials,
        product_condition,
        sizes,
    })
}

/// One factor of an iterated decomposition.
#[derive(Debug, Clone)]
pub struct Factor {
    /// Original coordinates of the factor, in order.
    pub coords: Vec<usize>,
    pub system: RegularSystem,
}

#[derive(Debug, Clone)]
pub struct FinestDecomposition {
    pub partition: Partition,
    pub factors: Vec<Factor>,
    /// One entry per binary split, in the order performed.
    pub steps: Vec<Decomposition>,
}

impl FinestDecomposition {
    /// Equal only if every binary split was.
    pub fn status(&self) -> Status {
        if self.steps.iter().all(|d| d.status == Status::Equal) {
            Status::Equal
        } else {
            Status::StrictSubset
        }
    }
}

/// Peels off the blocks of `partition` one at a time, each split applied to
/// the remainder of the previous one.
pub fn decompose_along(sys: &RegularSystem, partition: &Partition) -> Result<FinestDecomposition> {
    if partition.n() != sys.n() {
        return Err(Error::WidthMismatch {
            expected: sys.n(),
            found: partition.n(),
        });
    }
    let blocks = partition.blocks();
    let mut factors = Vec::new();
    let mut steps = Vec::new();
    let mut rest = sys.clone();
    let mut rest_coords: Vec<usize> = (1..=sys.n()).collect();
    for block in &blocks[..blocks.len() - 1] {
        let local: Vec<usize> = block
            .iter()
            .map(|c| rest_coords.iter().position(|r| r == c).map(|p| p + 1))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::BadSelection(format!("block {block:?} not in remainder")))?;
        let d = decompose_system(&rest, &local)?;
        factors.push(Factor {
            coords: block.clone(),
            system: d.first.clone(),
        });
        rest_coords = complement(&local, rest_coords.len())
            .into_iter()
            .map(|p| rest_coords[p - 1])
            .collect();
        rest = d.second.clone();
        steps.push(d);
    }
    factors.push(Factor {
        coords: rest_coords,
        system: rest,
    });
    Ok(FinestDecomposition {
        partition: partition.clone(),
        factors,
        steps,
    })
}

/// [`decompose_along`] the finest partition of `Phi`.
pub fn decompose_finest(sys: &RegularSystem) -> Result<FinestDecomposition> {
    decompose_along(sys, &boolfn::finest_partition(&sys.phi)?)
}
