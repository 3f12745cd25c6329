//! End-to-end tuning runs against a synthetic objective whose full grid can
//! be evaluated exhaustively, giving exact ground truth for ranking.

use qmap_core::ClockMode;
use qmap_tuner::{
    derive_eval_seed, run_experiment, sa_parameter_space, standard_settings, Configuration,
    EvalSample, Evaluator, Repeater, SearchSpaceDef, Selection,
};

/// Smooth bowl over normalised ranks with interactions and reproducible
/// per-repetition noise — a stand-in for solver quality that a quadratic
/// model can learn.
struct SyntheticEvaluator {
    noise_amplitude: f64,
    seed: u64,
    evaluations: usize,
}

const WEIGHTS: [f64; 5] = [3.0, 2.0, 4.0, 1.0, 2.0];
const CENTRES: [f64; 5] = [0.2, 0.8, 0.5, 0.3, 0.7];

fn smooth_value(space: &SearchSpaceDef, config: &Configuration) -> f64 {
    let ranks = space.ranks_of(config).expect("config in space");
    let x: Vec<f64> = space
        .parameters()
        .iter()
        .zip(&ranks)
        .map(|(p, &r)| {
            let n = p.values.len();
            if n > 1 {
                r as f64 / (n - 1) as f64
            } else {
                0.0
            }
        })
        .collect();
    let bowl: f64 = (0..5)
        .map(|d| WEIGHTS[d] * (x[d] - CENTRES[d]).powi(2))
        .sum();
    2.0 + bowl + 0.3 * x[0] * x[1] - 0.2 * x[2] * x[4]
}

fn noise(seed: u64, param_string: &str, repetition: u32, amplitude: f64) -> f64 {
    let h = derive_eval_seed(seed, param_string, repetition);
    ((h >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * amplitude
}

impl Evaluator for SyntheticEvaluator {
    fn evaluate(
        &mut self,
        space: &SearchSpaceDef,
        config: &Configuration,
        repetition: u32,
        _time_limit_s: f64,
    ) -> Result<EvalSample, String> {
        self.evaluations += 1;
        let soft = smooth_value(space, config)
            + noise(
                self.seed,
                &config.to_param_string(space),
                repetition,
                self.noise_amplitude,
            );
        Ok(EvalSample {
            valid: true,
            soft,
            first_valid_at: Some(0.05),
            seconds: 0.1,
        })
    }
}

/// The 2-repetition aggregate the experiment would record for a config —
/// used to rank the whole grid exactly.
fn two_rep_aggregate(space: &SearchSpaceDef, config: &Configuration, seed: u64, amp: f64) -> f64 {
    let ps = config.to_param_string(space);
    let a = smooth_value(space, config) + noise(seed, &ps, 0, amp);
    let b = smooth_value(space, config) + noise(seed, &ps, 1, amp);
    (a + b) / 2.0
}

#[test]
fn model_led_search_reaches_the_top_percentile_within_budget() {
    let space = sa_parameter_space();
    let amp = 0.05;
    for seed in [3u64, 17] {
        let mut settings = standard_settings(seed);
        settings.per_eval_time_limit_s = 1.0;
        let mut evaluator = SyntheticEvaluator {
            noise_amplitude: amp,
            seed,
            evaluations: 0,
        };
        let outcome = run_experiment(
            &settings,
            &space,
            &mut evaluator,
            ClockMode::virtual_default(),
        )
        .unwrap();
        assert!(
            outcome.total_evaluations <= 400,
            "seed {seed}: spent {} evaluations",
            outcome.total_evaluations
        );
        assert!(
            outcome.model_validated_after.is_some(),
            "seed {seed}: the model never validated"
        );

        // Exhaustive ground truth: every configuration's 2-repetition mean.
        let mut grid: Vec<f64> = (0..space.size())
            .map(|i| two_rep_aggregate(&space, &space.config_at(i), seed, amp))
            .collect();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let threshold = grid[(grid.len() / 100).saturating_sub(1)];
        assert!(
            outcome.best_objective <= threshold,
            "seed {seed}: best {} missed the top percentile (threshold {})",
            outcome.best_objective,
            threshold
        );
    }
}

#[test]
fn experiments_are_fully_deterministic() {
    let space = sa_parameter_space();
    let settings = standard_settings(9);
    let run = |_: ()| {
        let mut evaluator = SyntheticEvaluator {
            noise_amplitude: 0.05,
            seed: 9,
            evaluations: 0,
        };
        run_experiment(
            &settings,
            &space,
            &mut evaluator,
            ClockMode::virtual_default(),
        )
        .unwrap()
    };
    let a = run(());
    let b = run(());
    assert_eq!(a.report_csv, b.report_csv);
    assert_eq!(a.best, b.best);
    assert_eq!(a.stop_reason, b.stop_reason);
}

#[test]
fn random_selection_with_student_repeater_completes_within_caps() {
    let space = sa_parameter_space();
    let mut settings = standard_settings(5);
    settings.selection = Selection::Random;
    settings.repeater = Repeater::Student {
        max_reps: 6,
        rel_ci: 0.01,
    };
    let mut evaluator = SyntheticEvaluator {
        noise_amplitude: 0.4,
        seed: 5,
        evaluations: 0,
    };
    let outcome = run_experiment(
        &settings,
        &space,
        &mut evaluator,
        ClockMode::virtual_default(),
    )
    .unwrap();
    for m in &outcome.measurements {
        assert!(
            (2..=6).contains(&m.samples.len()),
            "config {:?} took {} repetitions",
            m.values,
            m.samples.len()
        );
    }
    assert!(outcome.best_objective.is_finite());
}
