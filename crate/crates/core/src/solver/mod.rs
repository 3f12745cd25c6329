//! Simulated-annealing solver over a pre-allocated assignment pool.
//!
//! The pool holds one slot per worst-case task; moves toggle activity flags
//! and rewrite implementation/hardware choices in place. Scoring is
//! lexicographic: weighted violation points first, total energy second.

mod anneal;
mod moves;
mod params;
mod pool;
mod score;

pub use anneal::{
    quality_ratio, solve, solve_compiled, solve_with_clock, QualityOutcome, SolveResult,
    SolveStats, SolveTrace, TraceEvent,
};
pub use moves::{generate_move, random_kind, Move, MoveKind};
pub use params::{
    parameter_values, parse_named_values, ParamsError, SaParams, HARD_TEMP_VALUES,
    NEIGHBORHOOD_VALUES, PARAMETER_NAMES, SOFT_TEMP_VALUES, SUB_FACTOR_VALUES, SW_FACTOR_VALUES,
};
pub use pool::{allocation_from_witness, initial_allocation, Allocation, SlotAssignment};
pub use score::{validate_allocation, Score, ScoreBoard, ScoreWeights, Undo};
