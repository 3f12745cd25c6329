//! Composable experiment stop conditions.
//!
//! Conditions belong to one of two groups: the *any* group stops the
//! experiment as soon as one of its members fires, but only once every
//! *mandatory* condition is satisfied. A mandatory `Guaranteed` condition
//! therefore acts as a gate: no improvement-based or time-based stop can end
//! the run before the tuned result beats the default configuration.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCondition {
    /// Stop once at least `n` configurations are measured.
    Quantity(usize),
    /// Stop once the measured fraction of the space reaches `f`.
    Adaptive(f64),
    /// Stop once the experiment has run for the given seconds.
    Time(f64),
    /// Stop after `n` consecutive configurations without improvement.
    Improvement(usize),
    /// Satisfied only when the incumbent strictly beats the default
    /// configuration's measurement; without a measured default it never
    /// fires.
    Guaranteed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub condition: StopCondition,
    pub mandatory: bool,
}

/// Snapshot of the experiment the conditions are evaluated against.
#[derive(Debug, Clone, Copy)]
pub struct StopStatus {
    pub measured_count: usize,
    pub space_size: u64,
    pub elapsed_s: f64,
    pub configs_since_improvement: usize,
    pub best_objective: Option<f64>,
    pub default_objective: Option<f64>,
}

fn fires(condition: StopCondition, status: &StopStatus) -> bool {
    match condition {
        StopCondition::Quantity(n) => status.measured_count >= n,
        StopCondition::Adaptive(f) => status.measured_count as f64 >= f * status.space_size as f64,
        StopCondition::Time(s) => status.elapsed_s >= s,
        StopCondition::Improvement(n) => status.configs_since_improvement >= n,
        StopCondition::Guaranteed => match (status.best_objective, status.default_objective) {
            (Some(best), Some(default)) => best < default,
            _ => false,
        },
    }
}

fn describe(condition: StopCondition) -> String {
    match condition {
        StopCondition::Quantity(n) => format!("quantity({n})"),
        StopCondition::Adaptive(f) => format!("adaptive({f})"),
        StopCondition::Time(s) => format!("time({s})"),
        StopCondition::Improvement(n) => format!("improvement({n})"),
        StopCondition::Guaranteed => "guaranteed".to_string(),
    }
}

/// Evaluate the composed rule set: stop (returning the reason) iff every
/// mandatory condition is satisfied and, when an any-group exists, at least
/// one of its members fires. With only mandatory rules, their conjunction
/// alone decides.
pub fn evaluate_stop(rules: &[StopRule], status: &StopStatus) -> Option<String> {
    let (mandatory, any): (Vec<StopRule>, Vec<StopRule>) =
        rules.iter().copied().partition(|r| r.mandatory);
    if !mandatory.iter().all(|r| fires(r.condition, status)) {
        return None;
    }
    if any.is_empty() {
        if mandatory.is_empty() {
            return None;
        }
        let names: Vec<String> = mandatory.iter().map(|r| describe(r.condition)).collect();
        return Some(names.join(" AND "));
    }
    any.iter()
        .find(|r| fires(r.condition, status))
        .map(|r| describe(r.condition))
}

pub fn validate_rules(rules: &[StopRule]) -> Result<(), String> {
    if rules.is_empty() {
        return Err("at least one stop condition is required".into());
    }
    for rule in rules {
        match rule.condition {
            StopCondition::Quantity(n) | StopCondition::Improvement(n) => {
                if n == 0 {
                    return Err("stop condition count must be >= 1".into());
                }
            }
            StopCondition::Adaptive(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err("adaptive fraction must lie in (0, 1]".into());
                }
            }
            StopCondition::Time(s) => {
                if !(s >= 0.0) {
                    return Err("time limit must be >= 0".into());
                }
            }
            StopCondition::Guaranteed => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status() -> StopStatus {
        StopStatus {
            measured_count: 0,
            space_size: 100,
            elapsed_s: 0.0,
            configs_since_improvement: 0,
            best_objective: None,
            default_objective: None,
        }
    }

    fn any(condition: StopCondition) -> StopRule {
        StopRule {
            condition,
            mandatory: false,
        }
    }

    #[test]
    fn improvement_fires_exactly_at_the_configured_count() {
        let rules = [any(StopCondition::Improvement(50))];
        let mut st = status();
        st.configs_since_improvement = 49;
        assert_eq!(evaluate_stop(&rules, &st), None);
        st.configs_since_improvement = 50;
        assert_eq!(evaluate_stop(&rules, &st), Some("improvement(50)".into()));
    }

    #[test]
    fn adaptive_full_fraction_stops_exactly_at_full_space() {
        let rules = [any(StopCondition::Adaptive(1.0))];
        let mut st = status();
        st.measured_count = 99;
        assert_eq!(evaluate_stop(&rules, &st), None);
        st.measured_count = 100;
        assert_eq!(evaluate_stop(&rules, &st), Some("adaptive(1)".into()));
    }

    #[test]
    fn zero_time_limit_stops_immediately() {
        let rules = [any(StopCondition::Time(0.0))];
        assert!(evaluate_stop(&rules, &status()).is_some());
    }

    #[test]
    fn quantity_counts_configurations() {
        let rules = [any(StopCondition::Quantity(3))];
        let mut st = status();
        st.measured_count = 2;
        assert_eq!(evaluate_stop(&rules, &st), None);
        st.measured_count = 3;
        assert_eq!(evaluate_stop(&rules, &st), Some("quantity(3)".into()));
    }

    #[test]
    fn guaranteed_without_a_default_never_fires() {
        let rules = [any(StopCondition::Guaranteed)];
        let mut st = status();
        st.best_objective = Some(1.0);
        assert_eq!(evaluate_stop(&rules, &st), None);
        st.default_objective = Some(2.0);
        assert_eq!(evaluate_stop(&rules, &st), Some("guaranteed".into()));
        st.default_objective = Some(1.0); // equal is not strictly better
        assert_eq!(evaluate_stop(&rules, &st), None);
    }

    #[test]
    fn mandatory_gate_blocks_the_any_group() {
        let rules = [
            StopRule {
                condition: StopCondition::Guaranteed,
                mandatory: true,
            },
            any(StopCondition::Quantity(2)),
        ];
        let mut st = status();
        st.measured_count = 5;
        st.best_objective = Some(3.0);
        st.default_objective = Some(2.0); // not yet beaten
        assert_eq!(evaluate_stop(&rules, &st), None);
        st.best_objective = Some(1.0);
        assert_eq!(evaluate_stop(&rules, &st), Some("quantity(2)".into()));
    }

    #[test]
    fn mandatory_only_rules_stop_on_their_conjunction() {
        let rules = [
            StopRule {
                condition: StopCondition::Quantity(2),
                mandatory: true,
            },
            StopRule {
                condition: StopCondition::Time(0.0),
                mandatory: true,
            },
        ];
        let mut st = status();
        st.measured_count = 1;
        assert_eq!(evaluate_stop(&rules, &st), None);
        st.measured_count = 2;
        assert_eq!(
            evaluate_stop(&rules, &st),
            Some("quantity(2) AND time(0)".into())
        );
    }

    #[test]
    fn rule_validation_rejects_nonsense() {
        assert!(validate_rules(&[]).is_err());
        assert!(validate_rules(&[any(StopCondition::Quantity(0))]).is_err());
        assert!(validate_rules(&[any(StopCondition::Adaptive(0.0))]).is_err());
        assert!(validate_rules(&[any(StopCondition::Adaptive(1.5))]).is_err());
        assert!(validate_rules(&[any(StopCondition::Time(-1.0))]).is_err());
        assert!(validate_rules(&[any(StopCondition::Improvement(50))]).is_ok());
    }
}
