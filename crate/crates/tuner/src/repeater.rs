//! Repetition managers: decide after each evaluation of a configuration
//! whether another repetition is needed.

use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Repeater {
    /// Fixed repetition count.
    Quantity { k: u32 },
    /// Repeat until the two-sided 95% confidence interval around the mean
    /// objective is narrow relative to the mean, or `max_reps` is reached.
    Student { max_reps: u32, rel_ci: f64 },
    /// Like `Student`, but the width requirement is relaxed by `relax_factor`
    /// for configurations the model already predicts to be worse than the
    /// current best — their exact value does not matter.
    ModelAwareStudent {
        max_reps: u32,
        rel_ci: f64,
        relax_factor: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepeatDecision {
    Continue,
    Stop,
}

/// Two-sided 95% Student-t confidence half-width of the sample mean.
fn ci_half_width(samples: &[f64]) -> f64 {
    let n = samples.len();
    debug_assert!(n >= 2);
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    if std == 0.0 {
        return 0.0;
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("valid t distribution")
        .inverse_cdf(0.975);
    t * std / (n as f64).sqrt()
}

fn student_decision(
    total_count: usize,
    valid: &[f64],
    max_reps: u32,
    rel_ci: f64,
) -> RepeatDecision {
    if total_count >= max_reps as usize {
        return RepeatDecision::Stop;
    }
    if valid.len() < 2 {
        return RepeatDecision::Continue;
    }
    let half = ci_half_width(valid);
    let mean = valid.iter().sum::<f64>() / valid.len() as f64;
    // Zero mean would make the relative width undefined; fall back to the
    // absolute half-width against the same threshold.
    let width = if mean == 0.0 { half } else { half / mean.abs() };
    if width <= rel_ci {
        RepeatDecision::Stop
    } else {
        RepeatDecision::Continue
    }
}

/// Decide whether the configuration needs another repetition.
///
/// `total_count` is the number of repetitions so far (valid or not);
/// `valid_objectives` the objective samples of the valid ones.
/// `predicted_worse_than_best` reports whether a validated model expects this
/// configuration to lose against the incumbent (only the model-aware variant
/// uses it).
pub fn repeater_decide(
    repeater: &Repeater,
    total_count: usize,
    valid_objectives: &[f64],
    predicted_worse_than_best: bool,
) -> RepeatDecision {
    debug_assert!(total_count >= 1, "decide after at least one repetition");
    match *repeater {
        Repeater::Quantity { k } => {
            if total_count >= k as usize {
                RepeatDecision::Stop
            } else {
                RepeatDecision::Continue
            }
        }
        Repeater::Student { max_reps, rel_ci } => {
            student_decision(total_count, valid_objectives, max_reps, rel_ci)
        }
        Repeater::ModelAwareStudent {
            max_reps,
            rel_ci,
            relax_factor,
        } => {
            let threshold = if predicted_worse_than_best {
                rel_ci * relax_factor
            } else {
                rel_ci
            };
            student_decision(total_count, valid_objectives, max_reps, threshold)
        }
    }
}

impl Repeater {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Repeater::Quantity { k } => {
                if k == 0 {
                    return Err("quantity repeater needs k >= 1".into());
                }
            }
            Repeater::Student { max_reps, rel_ci } => {
                if max_reps == 0 {
                    return Err("student repeater needs maxReps >= 1".into());
                }
                if !(rel_ci > 0.0) {
                    return Err("student repeater needs relCi > 0".into());
                }
            }
            Repeater::ModelAwareStudent {
                max_reps,
                rel_ci,
                relax_factor,
            } => {
                if max_reps == 0 {
                    return Err("model-aware repeater needs maxReps >= 1".into());
                }
                if !(rel_ci > 0.0) {
                    return Err("model-aware repeater needs relCi > 0".into());
                }
                if !(relax_factor >= 1.0) {
                    return Err("model-aware repeater needs relaxFactor >= 1".into());
                }
            }
        }
        Ok(())
    }
}
