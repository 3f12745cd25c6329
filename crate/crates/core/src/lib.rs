//! Quality-based software selection and hardware mapping workbench.
//!
//! The problem: serve a set of user requests by selecting, for every software
//! component slot, an implementation and a hardware unit to host it, subject
//! to hardware capacities, requested non-functional properties and the
//! requirement trees spanned by the chosen implementations. The objective is
//! total energy.
//!
//! This crate holds the shared domain model plus the two solving routes:
//!
//! * [`model`] — scenario types, a seeded scenario generator, the versioned
//!   scenario file format and the task decomposition shared by both solvers.
//! * [`solver`] — a simulated-annealing solver over a pre-allocated pool of
//!   component assignments with incremental hard/soft scoring.
//! * [`ilp`] — an integer-linear-program builder with LP-file export and a
//!   small branch-and-bound solver used as the optimality oracle.
//! * [`clock`] — wall/virtual time used to make runs reproducible in tests.

pub mod clock;
pub mod ilp;
pub mod model;
pub mod solver;

pub use clock::ClockMode;
pub use model::{Scenario, ScenarioError};
pub use solver::{Allocation, SaParams, Score, SolveTrace};
