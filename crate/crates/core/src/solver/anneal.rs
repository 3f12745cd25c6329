//! The simulated-annealing loop.
//!
//! Each step scores `neighborhoodSize` candidate moves against the current
//! allocation, takes the steepest (best-scoring) candidate, accepts it
//! outright when not worse, and otherwise accepts with probability
//! `exp(-Δhard/T_hard) · exp(-Δsoft/T_soft)`. Temperatures cool linearly
//! toward zero over the time budget, floored at a small ε.

use super::moves::{generate_move, random_kind, Move};
use super::params::SaParams;
use super::pool::{initial_allocation, Allocation};
use super::score::{Score, ScoreBoard, ScoreWeights};
use crate::clock::{ClockMode, PhaseTimer, RunClock};
use crate::model::{Compiled, Scenario, ScenarioError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TEMPERATURE_EPSILON: f64 = 1e-9;
/// Resample budget when a move generator returns a no-op marker.
const NOOP_RESAMPLES: usize = 3;

/// One point of the solve trace: best-ever score at a moment in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub elapsed_s: f64,
    pub score: Score,
    pub valid: bool,
}

/// Time-ordered record of best-score improvements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub events: Vec<TraceEvent>,
    /// First moment the best score had zero violations.
    pub first_valid_at: Option<f64>,
    /// Moment of the last best-score improvement (none if the initial
    /// allocation was never improved).
    pub last_improvement_at: Option<f64>,
}

impl SolveTrace {
    fn record(&mut self, elapsed_s: f64, score: Score, initial: bool) {
        let valid = score.is_valid();
        self.events.push(TraceEvent {
            elapsed_s,
            score,
            valid,
        });
        if valid && self.first_valid_at.is_none() {
            self.first_valid_at = Some(elapsed_s);
        }
        if !initial {
            self.last_improvement_at = Some(elapsed_s);
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub steps: u64,
    pub candidate_scorings: u64,
    pub accepted_moves: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best_allocation: Allocation,
    pub best_score: Score,
    pub trace: SolveTrace,
    /// Time spent building the pool and initial score state.
    pub init_seconds: f64,
    /// Total solve time including initialization.
    pub total_seconds: f64,
    pub stats: SolveStats,
}

/// Solve on the wall clock.
pub fn solve(scenario: &Scenario, params: &SaParams) -> Result<SolveResult, ScenarioError> {
    solve_with_clock(scenario, params, ClockMode::Wall)
}

pub fn solve_with_clock(
    scenario: &Scenario,
    params: &SaParams,
    clock: ClockMode,
) -> Result<SolveResult, ScenarioError> {
    let compiled = Compiled::new(scenario)?;
    Ok(solve_compiled(&compiled, params, clock))
}

/// Solve a pre-compiled scenario. Deterministic for a fixed
/// (scenario, params, seed) under a virtual clock.
pub fn solve_compiled(c: &Compiled, params: &SaParams, clock: ClockMode) -> SolveResult {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let weights = ScoreWeights {
        sub_factor: params.sub_component_unassigned_factor,
        sw_factor: params.software_component_unassigned_factor,
    };

    let mut init_timer = PhaseTimer::start(clock);
    let mut alloc = initial_allocation(c, &mut rng);
    let mut board = ScoreBoard::new(c, &alloc, weights);
    init_timer.add_ops((c.tasks.len() + c.hw.len()) as u64);
    let init_seconds = init_timer.stop();

    let initial = board.score();
    let mut current = initial;
    let mut best = initial;
    let mut best_alloc = alloc.clone();
    let mut trace = SolveTrace::default();
    let mut stats = SolveStats::default();

    let t0_hard =
        params.hard_score_starting_temperature as f64 / 100.0 * (initial.hard.max(1)) as f64;
    let t0_soft = params.soft_score_starting_temperature as f64 / 100.0 * initial.soft_micro as f64;

    let mut run = RunClock::start(clock);
    trace.record(run.elapsed(), initial, true);

    loop {
        let elapsed = run.elapsed();
        if elapsed >= params.time_limit_s {
            break;
        }
        let cooling = 1.0 - elapsed / params.time_limit_s;
        let t_hard = (t0_hard * cooling).max(TEMPERATURE_EPSILON);
        let t_soft = (t0_soft * cooling).max(TEMPERATURE_EPSILON);

        // Steepest candidate out of neighborhoodSize sampled moves.
        let mut chosen: Option<(Move, Score)> = None;
        for _ in 0..params.neighborhood_size {
            let kind = random_kind(&mut rng);
            let mut mv = generate_move(c, &alloc, &mut rng, kind);
            for _ in 0..NOOP_RESAMPLES {
                if !mv.is_noop() {
                    break;
                }
                let kind = random_kind(&mut rng);
                mv = generate_move(c, &alloc, &mut rng, kind);
            }
            let undo = board.apply(c, &mut alloc, &mv.changes);
            let candidate_score = board.score();
            board.undo(c, &mut alloc, undo);
            stats.candidate_scorings += 1;
            let better = match &chosen {
                None => true,
                Some((_, s)) => candidate_score < *s,
            };
            if better {
                chosen = Some((mv, candidate_score));
            }
        }
        let (mv, cand) = chosen.expect("neighborhood size is at least 1");

        let accept = cand <= current || {
            let d_hard = (cand.hard - current.hard).max(0) as f64;
            let d_soft = (cand.soft_micro - current.soft_micro).max(0) as f64;
            let p = (-d_hard / t_hard).exp() * (-d_soft / t_soft).exp();
            rng.gen::<f64>() < p
        };
        if accept && !mv.is_noop() {
            board.apply(c, &mut alloc, &mv.changes);
            current = cand;
            stats.accepted_moves += 1;
        }
        stats.steps += 1;
        run.tick();

        if current < best {
            best = current;
            best_alloc = alloc.clone();
            trace.record(run.elapsed(), best, false);
        }
    }

    SolveResult {
        best_allocation: best_alloc,
        best_score: best,
        trace,
        init_seconds,
        total_seconds: init_seconds + run.elapsed(),
        stats,
    }
}

/// Solution quality relative to a known optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QualityOutcome {
    /// optimalSoft / solutionSoft, in (0, 1].
    Ratio(f64),
    /// The solution has violations; no ratio is defined.
    Invalid,
}

impl QualityOutcome {
    pub fn as_ratio(&self) -> Option<f64> {
        match self {
            QualityOutcome::Ratio(r) => Some(*r),
            QualityOutcome::Invalid => None,
        }
    }
}

/// Compare a solution score against the oracle optimum (which must be valid
/// with positive energy).
pub fn quality_ratio(solution: Score, optimal: Score) -> QualityOutcome {
    debug_assert!(optimal.is_valid() && optimal.soft_micro > 0);
    if !solution.is_valid() {
        return QualityOutcome::Invalid;
    }
    QualityOutcome::Ratio(optimal.soft_micro as f64 / solution.soft_micro as f64)
}
