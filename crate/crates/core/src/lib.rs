// SPDX-License-Identifier: Apache-2.0

//! Decomposition of regular asynchronous systems.
//!
//! Piecewise-constant binary signals, generator functions and their dependency
//! structure, the unbounded-delay semantics driven by progressive schedules, and
//! regular systems with their parallel connection and decomposition.

pub mod bits;
pub mod boolfn;
pub mod dsl;
pub mod error;
pub mod formats;
pub mod random;
pub mod semantics;
pub mod signals;
pub mod systems;
pub mod verify;

pub use bits::{BitVec, Tick};
pub use boolfn::{
    dependency_matrix, finest_partition, is_separated, parallel_fn, partial_derivative, split_fn,
    DependencyMatrix, GeneratorFn, Partition, Split,
};
pub use error::{DependencyWitness, Error, Result};
pub use semantics::{delay_admits, delay_bounds, enumerate_states, run, Trajectory};
pub use signals::{ProgressiveFunction, Signal, SignalSet};
pub use systems::{
    decompose_system, parallel_system, realize, Decomposition, RegularSystem, Schedule, Status,
    SystemOutput,
};
