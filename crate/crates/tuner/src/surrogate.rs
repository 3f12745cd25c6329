//! Search-space models: a self-validating polynomial regression surrogate
//! and a density-ratio suggester that together propose the next
//! configuration once enough measurements exist.

use crate::space::{Configuration, SearchSpaceDef};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Minimum finite measurements before the first fit is attempted.
pub const MIN_SAMPLES: usize = 20;
/// Cross-validated coefficient of determination required to trust the model.
pub const VALIDATION_R2: f64 = 0.85;
/// Folds for cross validation.
pub const CV_FOLDS: usize = 5;
/// Fraction of the model-ranked candidates re-ranked by the density score in
/// the combined variant.
pub const COMBINED_TOP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    Regression,
    Bayesian,
    Combined,
}

/// Degree-2 polynomial over ordinally encoded parameters. Value magnitudes
/// span four orders of magnitude on log-like grids, so the encoding uses the
/// rank of each value in its list (normalised to [0,1]), not the value.
#[derive(Debug, Clone)]
pub struct Surrogate {
    coefficients: DVector<f64>,
    dims: usize,
    pub cv_r2: f64,
}

fn encode(space: &SearchSpaceDef, values: &[i64]) -> Vec<f64> {
    space
        .parameters()
        .iter()
        .zip(values)
        .map(|(p, v)| {
            let rank = p
                .values
                .iter()
                .position(|x| x == v)
                .expect("value drawn from the space") as f64;
            let n = p.values.len();
            if n > 1 {
                rank / (n - 1) as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// Feature vector: intercept, linear terms, and all squared/interaction
/// pairs (d ≤ e). For p parameters: 1 + p + p(p+1)/2 features.
fn features(x: &[f64]) -> Vec<f64> {
    let p = x.len();
    let mut f = Vec::with_capacity(1 + p + p * (p + 1) / 2);
    f.push(1.0);
    f.extend_from_slice(x);
    for d in 0..p {
        for e in d..p {
            f.push(x[d] * x[e]);
        }
    }
    f
}

fn design_matrix(space: &SearchSpaceDef, rows: &[&[i64]]) -> DMatrix<f64> {
    let cols = {
        let p = space.dimension_count();
        1 + p + p * (p + 1) / 2
    };
    let data: Vec<f64> = rows
        .iter()
        .flat_map(|values| features(&encode(space, values)))
        .collect();
    DMatrix::from_row_slice(rows.len(), cols, &data)
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = x.clone().svd(true, true);
    svd.solve(y, 1e-10).ok()
}

/// Fit the surrogate on all finite-objective samples and cross-validate it.
/// Returns `None` ("not validated") when there are fewer than
/// [`MIN_SAMPLES`] finite samples, the design matrix is degenerate, or the
/// pooled out-of-fold R² falls below [`VALIDATION_R2`].
pub fn fit_and_validate(
    space: &SearchSpaceDef,
    samples: &[(Vec<i64>, f64)],
    seed: u64,
) -> Option<Surrogate> {
    let finite: Vec<(&[i64], f64)> = samples
        .iter()
        .filter(|(_, obj)| obj.is_finite())
        .map(|(v, obj)| (v.as_slice(), *obj))
        .collect();
    if finite.len() < MIN_SAMPLES {
        return None;
    }

    // Deterministic shuffle, then round-robin fold assignment.
    let mut order: Vec<usize> = (0..finite.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut predictions: Vec<(f64, f64)> = Vec::with_capacity(finite.len()); // (truth, predicted)
    for fold in 0..CV_FOLDS {
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = order
            .iter()
            .enumerate()
            .map(|(slot, &i)| (slot % CV_FOLDS == fold, i))
            .fold(
                (Vec::new(), Vec::new()),
                |(mut te, mut tr), (is_test, i)| {
                    if is_test {
                        te.push(i);
                    } else {
                        tr.push(i);
                    }
                    (te, tr)
                },
            );
        if train_idx.is_empty() || test_idx.is_empty() {
            return None;
        }
        let train_rows: Vec<&[i64]> = train_idx.iter().map(|&i| finite[i].0).collect();
        let train_y =
            DVector::from_iterator(train_idx.len(), train_idx.iter().map(|&i| finite[i].1));
        let coeffs = least_squares(&design_matrix(space, &train_rows), &train_y)?;
        for &i in &test_idx {
            let f = DVector::from_vec(features(&encode(space, finite[i].0)));
            predictions.push((finite[i].1, coeffs.dot(&f)));
        }
    }

    let mean_truth: f64 =
        predictions.iter().map(|(t, _)| t).sum::<f64>() / predictions.len() as f64;
    let ss_res: f64 = predictions.iter().map(|(t, p)| (t - p) * (t - p)).sum();
    let ss_tot: f64 = predictions
        .iter()
        .map(|(t, _)| (t - mean_truth) * (t - mean_truth))
        .sum();
    let cv_r2 = if ss_tot < 1e-12 {
        // Constant objective: validated only when reproduced exactly.
        if ss_res < 1e-9 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    if !(cv_r2 >= VALIDATION_R2) {
        return None;
    }

    // Final fit on everything.
    let all_rows: Vec<&[i64]> = finite.iter().map(|(v, _)| *v).collect();
    let all_y = DVector::from_iterator(finite.len(), finite.iter().map(|(_, o)| *o));
    let coefficients = least_squares(&design_matrix(space, &all_rows), &all_y)?;
    Some(Surrogate {
        coefficients,
        dims: space.dimension_count(),
        cv_r2,
    })
}

impl Surrogate {
    pub fn predict(&self, space: &SearchSpaceDef, config: &Configuration) -> f64 {
        assert_eq!(space.dimension_count(), self.dims);
        let f = DVector::from_vec(features(&encode(space, &config.values)));
        self.coefficients.dot(&f)
    }
}

/// Per-parameter categorical densities of the better and worse halves of the
/// measurements, add-one smoothed.
struct DensityModel {
    good_counts: Vec<BTreeMap<i64, usize>>,
    bad_counts: Vec<BTreeMap<i64, usize>>,
    good_n: usize,
    bad_n: usize,
}

impl DensityModel {
    /// Split the measurements at the objective median: the better half is
    /// "good", the rest "bad". Infinite objectives sort last, so failed
    /// configurations always land in "bad".
    fn build(space: &SearchSpaceDef, measured: &BTreeMap<Vec<i64>, f64>) -> DensityModel {
        let mut ranked: Vec<(&Vec<i64>, f64)> = measured.iter().map(|(v, &o)| (v, o)).collect();
        ranked.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(b.0))
        });
        let good_n = ranked.len().div_ceil(2);
        let dims = space.dimension_count();
        let mut good_counts = vec![BTreeMap::new(); dims];
        let mut bad_counts = vec![BTreeMap::new(); dims];
        for (rank, (values, _)) in ranked.iter().enumerate() {
            let target = if rank < good_n {
                &mut good_counts
            } else {
                &mut bad_counts
            };
            for (d, &v) in values.iter().enumerate() {
                *target[d].entry(v).or_insert(0) += 1;
            }
        }
        DensityModel {
            good_counts,
            bad_counts,
            good_n,
            bad_n: ranked.len() - good_n,
        }
    }

    /// Π_d good_d(v) / bad_d(v) with add-one smoothing; higher is better.
    fn score(&self, space: &SearchSpaceDef, values: &[i64]) -> f64 {
        let mut score = 1.0;
        for (d, p) in space.parameters().iter().enumerate() {
            let n_d = p.values.len() as f64;
            let g = *self.good_counts[d].get(&values[d]).unwrap_or(&0) as f64;
            let b = *self.bad_counts[d].get(&values[d]).unwrap_or(&0) as f64;
            let good_density = (g + 1.0) / (self.good_n as f64 + n_d);
            let bad_density = (b + 1.0) / (self.bad_n as f64 + n_d);
            score *= good_density / bad_density;
        }
        score
    }
}

/// Propose the next configuration from the model.
///
/// `measured` maps configuration values to their aggregate objective.
/// Regression ranks every unmeasured configuration by predicted objective;
/// bayesian ranks by density-ratio score; combined re-ranks the regression
/// top fraction by the density score. Ties resolve to the lexicographically
/// first configuration, so the result is deterministic. Returns `None` when
/// the space is exhausted.
pub fn suggest_next(
    space: &SearchSpaceDef,
    variant: ModelVariant,
    surrogate: &Surrogate,
    measured: &BTreeMap<Vec<i64>, f64>,
) -> Option<Configuration> {
    let mut unmeasured: Vec<Configuration> = Vec::new();
    for index in 0..space.size() {
        let config = space.config_at(index);
        if !measured.contains_key(&config.values) {
            unmeasured.push(config);
        }
    }
    if unmeasured.is_empty() {
        return None;
    }

    match variant {
        ModelVariant::Regression => unmeasured
            .into_iter()
            .map(|c| {
                let p = surrogate.predict(space, &c);
                (c, p)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(c, _)| c),
        ModelVariant::Bayesian => {
            let density = DensityModel::build(space, measured);
            unmeasured
                .into_iter()
                .map(|c| {
                    let s = density.score(space, &c.values);
                    (c, s)
                })
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(c, _)| c)
        }
        ModelVariant::Combined => {
            let mut ranked: Vec<(Configuration, f64)> = unmeasured
                .into_iter()
                .map(|c| {
                    let p = surrogate.predict(space, &c);
                    (c, p)
                })
                .collect();
            // Stable sort keeps the lexicographic enumeration order on ties.
            ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let keep = ((ranked.len() as f64 * COMBINED_TOP_FRACTION).ceil() as usize)
                .clamp(1, ranked.len());
            ranked.truncate(keep);
            let density = DensityModel::build(space, measured);
            ranked
                .into_iter()
                .map(|(c, _)| {
                    let s = density.score(space, &c.values);
                    (c, s)
                })
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(c, _)| c)
        }
    }
}
