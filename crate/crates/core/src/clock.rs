//! Wall-clock vs. virtual time.
//!
//! Benchmarks report real durations, but tests and the reproducibility
//! checks need byte-identical output across runs. A virtual clock derives
//! time from counted work instead of `Instant`: the solver advances one tick
//! per annealing step, measured phases (ILP generation, allocation setup)
//! convert their operation counts at a fixed rate.

use std::time::Instant;

/// Virtual solver steps per second. One annealing step advances the virtual
/// clock by `1 / STEPS_PER_SECOND`.
pub const DEFAULT_STEPS_PER_SECOND: f64 = 1000.0;

/// Virtual throughput for counted work (coefficient writes, slot visits).
pub const DEFAULT_OPS_PER_SECOND: f64 = 2_000_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClockMode {
    /// Real elapsed time.
    Wall,
    /// Deterministic time derived from counted work.
    Virtual {
        steps_per_second: f64,
        ops_per_second: f64,
    },
}

impl ClockMode {
    pub fn virtual_default() -> Self {
        ClockMode::Virtual {
            steps_per_second: DEFAULT_STEPS_PER_SECOND,
            ops_per_second: DEFAULT_OPS_PER_SECOND,
        }
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, ClockMode::Virtual { .. })
    }
}

impl Default for ClockMode {
    fn default() -> Self {
        ClockMode::Wall
    }
}

/// Clock for a solver run: counts steps, reports elapsed seconds.
#[derive(Debug, Clone)]
pub struct RunClock {
    mode: ClockMode,
    started: Instant,
    steps: u64,
}

impl RunClock {
    pub fn start(mode: ClockMode) -> Self {
        RunClock {
            mode,
            started: Instant::now(),
            steps: 0,
        }
    }

    /// Advance by one solver step (no effect in wall mode).
    pub fn tick(&mut self) {
        self.steps += 1;
    }

    pub fn elapsed(&self) -> f64 {
        match self.mode {
            ClockMode::Wall => self.started.elapsed().as_secs_f64(),
            ClockMode::Virtual {
                steps_per_second, ..
            } => self.steps as f64 / steps_per_second,
        }
    }

    pub fn mode(&self) -> ClockMode {
        self.mode
    }
}

/// Stopwatch for a measured phase. In virtual mode the caller reports its
/// work as counted operations; the elapsed value is `ops / ops_per_second`
/// rounded to whole milliseconds so that negligible phases read as zero.
pub struct PhaseTimer {
    mode: ClockMode,
    started: Instant,
    ops: u64,
}

impl PhaseTimer {
    pub fn start(mode: ClockMode) -> Self {
        PhaseTimer {
            mode,
            started: Instant::now(),
            ops: 0,
        }
    }

    pub fn add_ops(&mut self, n: u64) {
        self.ops += n;
    }

    pub fn stop(self) -> f64 {
        match self.mode {
            ClockMode::Wall => self.started.elapsed().as_secs_f64(),
            ClockMode::Virtual { ops_per_second, .. } => {
                let raw = self.ops as f64 / ops_per_second;
                (raw * 1000.0).round() / 1000.0
            }
        }
    }
}
