//! Standardization, penalized logistic regression with grouped
//! cross-validation, paired and imbalanced evaluation, and the
//! significance tests behind the reported tables.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::features::FeatureMatrix;
use crate::num::Real;

pub const DEFAULT_LAMBDA_GRID: [f64; 6] = [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0];
pub const CV_FOLDS: usize = 5;
pub const MAX_ITER: usize = 10_000;
pub const TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("scores and labels need at least one positive and one negative")]
    DegenerateLabels,
    #[error("empty design matrix")]
    EmptyMatrix,
    #[error("{0} rows but {1} group/label entries")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    L1,
    L2,
}

// ---------------------------------------------------------------------------
// Standardizer
// ---------------------------------------------------------------------------

/// Per-column training mean and standard deviation. Missing cells are
/// imputed with the training mean (0 after scaling); zero-variance columns
/// map to constant 0; all-missing columns are dropped and reported.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StandardizerState<R: Real> {
    pub names: Vec<String>,
    pub means: Vec<R>,
    pub stds: Vec<R>,
    /// Columns dropped at fit time because every training cell was missing.
    pub dropped: Vec<String>,
}

impl<R: Real> StandardizerState<R> {
    pub fn fit(matrix: &FeatureMatrix<R>) -> Self {
        let mut names = Vec::new();
        let mut means = Vec::new();
        let mut stds = Vec::new();
        let mut dropped = Vec::new();
        for (j, name) in matrix.names.iter().enumerate() {
            let values: Vec<R> = matrix.rows.iter().filter_map(|r| r[j]).collect();
            if values.is_empty() {
                dropped.push(name.clone());
                continue;
            }
            let n = R::from_count(values.len());
            let mean = values.iter().copied().sum::<R>() / n;
            let var = values
                .iter()
                .map(|v| (*v - mean) * (*v - mean))
                .sum::<R>()
                / n;
            names.push(name.clone());
            means.push(mean);
            stds.push(var.sqrt());
        }
        StandardizerState {
            names,
            means,
            stds,
            dropped,
        }
    }

    /// Transform rows laid out on `source_names` into the fitted column
    /// order. Missing and zero-variance cells become 0.
    pub fn apply(&self, rows: &[Vec<Option<R>>], source_names: &[String]) -> Vec<Vec<R>> {
        let index: BTreeMap<&str, usize> = source_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        rows.iter()
            .map(|row| {
                self.names
                    .iter()
                    .enumerate()
                    .map(|(k, name)| {
                        if self.stds[k] == R::zero() {
                            return R::zero();
                        }
                        match index.get(name.as_str()).and_then(|&j| row[j]) {
                            Some(v) => (v - self.means[k]) / self.stds[k],
                            None => R::zero(),
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn apply_matrix(&self, matrix: &FeatureMatrix<R>) -> Vec<Vec<R>> {
        self.apply(&matrix.rows, &matrix.names)
    }
}

// ---------------------------------------------------------------------------
// Penalized logistic regression (proximal gradient)
// ---------------------------------------------------------------------------

/// A fitted linear model over the standardized feature space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRegModel<R: Real> {
    pub weights: Vec<R>,
    pub intercept: R,
    pub penalty: Penalty,
    pub lambda: R,
    /// Per-class weight (negative, positive).
    pub class_weights: (R, R),
    pub standardizer: StandardizerState<R>,
    pub converged: bool,
    /// Mean cross-validation score (pairwise accuracy or AUC) of the
    /// selected grid point.
    pub cv_score: R,
}

impl<R: Real> LogRegModel<R> {
    /// Linear score of a raw (unstandardized) row in registry layout.
    pub fn score_row(&self, row: &[Option<R>], source_names: &[String]) -> R {
        let x = self.standardizer.apply(std::slice::from_ref(&row.to_vec()), source_names);
        dot(&self.weights, &x[0]) + self.intercept
    }

    /// Weights keyed by feature name, for serialization and inspection.
    pub fn named_weights(&self) -> BTreeMap<String, R> {
        self.standardizer
            .names
            .iter()
            .cloned()
            .zip(self.weights.iter().copied())
            .collect()
    }
}

fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// log(1 + exp(-m)) without overflow.
fn log1p_exp_neg<R: Real>(m: R) -> R {
    if m > R::zero() {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

fn sigmoid<R: Real>(z: R) -> R {
    if z >= R::zero() {
        R::one() / (R::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (R::one() + e)
    }
}

struct Design<'a, R: Real> {
    x: &'a [Vec<R>],
    /// +1 / −1 labels.
    y: &'a [R],
    /// Per-row sample weight.
    w: &'a [R],
    total_weight: R,
}

impl<'a, R: Real> Design<'a, R> {
    fn new(x: &'a [Vec<R>], y: &'a [R], w: &'a [R]) -> Self {
        let total_weight = w.iter().copied().sum();
        Design { x, y, w, total_weight }
    }

    /// Weighted mean logistic loss (smooth part only).
    fn loss(&self, weights: &[R], intercept: R) -> R {
        let mut acc = R::zero();
        for ((xi, &yi), &wi) in self.x.iter().zip(self.y).zip(self.w) {
            let margin = yi * (dot(weights, xi) + intercept);
            acc = acc + wi * log1p_exp_neg(margin);
        }
        acc / self.total_weight
    }

    fn gradient(&self, weights: &[R], intercept: R) -> (Vec<R>, R) {
        let mut gw = vec![R::zero(); weights.len()];
        let mut gb = R::zero();
        for ((xi, &yi), &wi) in self.x.iter().zip(self.y).zip(self.w) {
            let margin = yi * (dot(weights, xi) + intercept);
            // d/dz log(1+exp(-y z)) = -y * sigmoid(-y z)
            let coeff = wi * (-yi) * sigmoid(-margin);
            for (g, &x) in gw.iter_mut().zip(xi) {
                *g = *g + coeff * x;
            }
            gb = gb + coeff;
        }
        let tw = self.total_weight;
        for g in gw.iter_mut() {
            *g = *g / tw;
        }
        (gw, gb / tw)
    }
}

/// Weighted mean logistic loss (the smooth part of the objective) on +1/−1
/// labels; exposed so callers can verify fits against the actual objective.
pub fn logistic_loss<R: Real>(
    x: &[Vec<R>],
    y: &[R],
    sample_weights: &[R],
    weights: &[R],
    intercept: R,
) -> R {
    Design::new(x, y, sample_weights).loss(weights, intercept)
}

/// Analytic gradient of [`logistic_loss`] in (weights, intercept).
pub fn logistic_gradient<R: Real>(
    x: &[Vec<R>],
    y: &[R],
    sample_weights: &[R],
    weights: &[R],
    intercept: R,
) -> (Vec<R>, R) {
    Design::new(x, y, sample_weights).gradient(weights, intercept)
}

fn penalty_value<R: Real>(weights: &[R], penalty: Penalty, lambda: R) -> R {
    match penalty {
        Penalty::L1 => lambda * weights.iter().map(|w| w.abs()).sum::<R>(),
        Penalty::L2 => lambda * dot(weights, weights),
    }
}

fn prox<R: Real>(w: R, penalty: Penalty, step_lambda: R) -> R {
    match penalty {
        Penalty::L1 => {
            if w > step_lambda {
                w - step_lambda
            } else if w < -step_lambda {
                w + step_lambda
            } else {
                R::zero()
            }
        }
        Penalty::L2 => w / (R::one() + (step_lambda + step_lambda)),
    }
}

/// Proximal-gradient fit with backtracking line search. Deterministic:
/// zero initialization, fixed tolerance on the penalized objective, fixed
/// iteration cap. Returns the weights, intercept, and convergence flag.
pub fn fit_penalized<R: Real>(
    x: &[Vec<R>],
    y: &[R],
    sample_weights: &[R],
    penalty: Penalty,
    lambda: R,
) -> (Vec<R>, R, bool) {
    let n_features = x.first().map(|r| r.len()).unwrap_or(0);
    let design = Design::new(x, y, sample_weights);
    let mut w = vec![R::zero(); n_features];
    let mut b = R::zero();
    let tol = R::from_f64_c(TOL);
    let mut step = R::one();
    let mut obj = design.loss(&w, b) + penalty_value(&w, penalty, lambda);
    for _ in 0..MAX_ITER {
        let (gw, gb) = design.gradient(&w, b);
        let smooth = design.loss(&w, b);
        // backtrack until the quadratic upper bound holds
        let (new_w, new_b) = loop {
            let cand_w: Vec<R> = w
                .iter()
                .zip(&gw)
                .map(|(&wi, &gi)| prox(wi - step * gi, penalty, step * lambda))
                .collect();
            let cand_b = b - step * gb;
            let cand_loss = design.loss(&cand_w, cand_b);
            let mut quad = smooth + gb * (cand_b - b);
            let db = cand_b - b;
            quad = quad + db * db / (step + step);
            for ((&cw, &wi), &gi) in cand_w.iter().zip(&w).zip(&gw) {
                let d = cw - wi;
                quad = quad + gi * d + d * d / (step + step);
            }
            if cand_loss <= quad + R::from_f64_c(1e-15) || step < R::from_f64_c(1e-12) {
                break (cand_w, cand_b);
            }
            step = step * R::from_f64_c(0.5);
        };
        w = new_w;
        b = new_b;
        let new_obj = design.loss(&w, b) + penalty_value(&w, penalty, lambda);
        if (obj - new_obj).abs() <= tol {
            return (w, b, true);
        }
        obj = new_obj;
        step = step * R::from_f64_c(1.25);
    }
    (w, b, false)
}

// ---------------------------------------------------------------------------
// Grouped cross-validation
// ---------------------------------------------------------------------------

/// Fold index per row: all rows sharing a group land in one fold; groups
/// are assigned round-robin in sorted order, so folds are deterministic.
pub fn grouped_folds(groups: &[String], k: usize) -> Vec<usize> {
    let mut unique: Vec<&str> = groups.iter().map(|g| g.as_str()).collect();
    unique.sort_unstable();
    unique.dedup();
    let fold_of: BTreeMap<&str, usize> = unique
        .iter()
        .enumerate()
        .map(|(i, g)| (*g, i % k))
        .collect();
    groups.iter().map(|g| fold_of[g.as_str()]).collect()
}

// ---------------------------------------------------------------------------
// Pair task training
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    PositiveWins,
    NegativeWins,
}

/// Sign rule on the difference representation; exact ties go to
/// `NegativeWins`.
pub fn pair_predict<R: Real>(
    model: &LogRegModel<R>,
    diff_row: &[Option<R>],
    source_names: &[String],
) -> PairOutcome {
    if model.score_row(diff_row, source_names) > R::zero() {
        PairOutcome::PositiveWins
    } else {
        PairOutcome::NegativeWins
    }
}

/// Pairwise accuracy over both presentation orders, from single-ordering
/// scores: the forward row is correct when its score is positive, the
/// swapped row when the score is non-negative. A zero model lands on
/// exactly one half.
pub fn pairwise_accuracy_from_scores<R: Real>(scores: &[R]) -> R {
    if scores.is_empty() {
        return R::from_f64_c(0.5);
    }
    let mut correct = 0usize;
    for &s in scores {
        if s > R::zero() {
            correct += 1;
        }
        if s >= R::zero() {
            correct += 1;
        }
    }
    R::from_count(correct) / R::from_count(2 * scores.len())
}

fn both_orderings<R: Real>(rows: &[Vec<Option<R>>]) -> (Vec<Vec<Option<R>>>, Vec<R>) {
    let mut out = Vec::with_capacity(rows.len() * 2);
    let mut y = Vec::with_capacity(rows.len() * 2);
    for row in rows {
        out.push(row.clone());
        y.push(R::one());
        out.push(row.iter().map(|c| c.map(|v| -v)).collect());
        y.push(-R::one());
    }
    (out, y)
}

/// L1 logistic regression on pair difference rows (one per pair, positive
/// minus negative), trained on both orderings with flipped labels. λ is
/// chosen by mean 5-fold OP-grouped CV pairwise accuracy; ties go to the
/// larger λ. The final model is refit on all rows.
pub fn train_l1_logreg<R: Real>(
    x: &FeatureMatrix<R>,
    groups: &[String],
    lambda_grid: &[R],
) -> Result<LogRegModel<R>, ModelError> {
    train_pair_model(x, groups, Penalty::L1, lambda_grid)
}

fn train_pair_model<R: Real>(
    x: &FeatureMatrix<R>,
    groups: &[String],
    penalty: Penalty,
    lambda_grid: &[R],
) -> Result<LogRegModel<R>, ModelError> {
    if x.rows.is_empty() {
        return Err(ModelError::EmptyMatrix);
    }
    if x.rows.len() != groups.len() {
        return Err(ModelError::DimensionMismatch(x.rows.len(), groups.len()));
    }
    let folds = grouped_folds(groups, CV_FOLDS);
    let mut best: Option<(R, R)> = None; // (accuracy, lambda)
    for &lambda in lambda_grid {
        let mut fold_scores = Vec::new();
        for fold in 0..CV_FOLDS {
            let train_rows: Vec<Vec<Option<R>>> = x
                .rows
                .iter()
                .zip(&folds)
                .filter(|(_, &f)| f != fold)
                .map(|(r, _)| r.clone())
                .collect();
            let held_rows: Vec<Vec<Option<R>>> = x
                .rows
                .iter()
                .zip(&folds)
                .filter(|(_, &f)| f == fold)
                .map(|(r, _)| r.clone())
                .collect();
            if train_rows.is_empty() || held_rows.is_empty() {
                continue;
            }
            let (doubled, y) = both_orderings(&train_rows);
            let std = StandardizerState::fit(&FeatureMatrix {
                names: x.names.clone(),
                rows: doubled.clone(),
            });
            let dense = std.apply(&doubled, &x.names);
            let weights = vec![R::one(); dense.len()];
            let (w, b, _) = fit_penalized(&dense, &y, &weights, penalty, lambda);
            let held_dense = std.apply(&held_rows, &x.names);
            let scores: Vec<R> = held_dense.iter().map(|r| dot(&w, r) + b).collect();
            fold_scores.push(pairwise_accuracy_from_scores(&scores));
        }
        let mean = fold_scores.iter().copied().sum::<R>()
            / R::from_count(fold_scores.len().max(1));
        let take = match best {
            None => true,
            Some((acc, lam)) => mean > acc || (mean == acc && lambda > lam),
        };
        if take {
            best = Some((mean, lambda));
        }
    }
    let (cv_score, lambda) = best.expect("nonempty lambda grid");
    let (doubled, y) = both_orderings(&x.rows);
    let standardizer = StandardizerState::fit(&FeatureMatrix {
        names: x.names.clone(),
        rows: doubled.clone(),
    });
    let dense = standardizer.apply(&doubled, &x.names);
    let sw = vec![R::one(); dense.len()];
    let (weights, intercept, converged) = fit_penalized(&dense, &y, &sw, penalty, lambda);
    Ok(LogRegModel {
        weights,
        intercept,
        penalty,
        lambda,
        class_weights: (R::one(), R::one()),
        standardizer,
        converged,
        cv_score,
    })
}

// ---------------------------------------------------------------------------
// Weighted (imbalanced) training
// ---------------------------------------------------------------------------

/// Class weights inversely proportional to class frequency, normalized so
/// their weighted sample count equals n.
pub fn inverse_frequency_weights<R: Real>(labels: &[bool]) -> Result<(R, R), ModelError> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(ModelError::DegenerateLabels);
    }
    let n = R::from_count(labels.len());
    let two = R::from_f64_c(2.0);
    Ok((
        n / (two * R::from_count(n_neg)),
        n / (two * R::from_count(n_pos)),
    ))
}

/// Weighted logistic regression for imbalanced labels: grid search over
/// penalty type × strength, selected by mean grouped-CV AUC.
pub fn train_weighted_logreg<R: Real>(
    x: &FeatureMatrix<R>,
    labels: &[bool],
    groups: &[String],
    lambda_grid: &[R],
    penalty_grid: &[Penalty],
) -> Result<LogRegModel<R>, ModelError> {
    if x.rows.is_empty() {
        return Err(ModelError::EmptyMatrix);
    }
    if x.rows.len() != labels.len() {
        return Err(ModelError::DimensionMismatch(x.rows.len(), labels.len()));
    }
    let (w_neg, w_pos) = inverse_frequency_weights::<R>(labels)?;
    let folds = grouped_folds(groups, CV_FOLDS);
    let mut best: Option<(R, Penalty, R)> = None;
    for &penalty in penalty_grid {
        for &lambda in lambda_grid {
            let mut fold_scores = Vec::new();
            for fold in 0..CV_FOLDS {
                let tr: Vec<usize> = (0..x.rows.len()).filter(|&i| folds[i] != fold).collect();
                let he: Vec<usize> = (0..x.rows.len()).filter(|&i| folds[i] == fold).collect();
                if tr.is_empty() || he.is_empty() {
                    continue;
                }
                let train_rows: Vec<Vec<Option<R>>> =
                    tr.iter().map(|&i| x.rows[i].clone()).collect();
                let std = StandardizerState::fit(&FeatureMatrix {
                    names: x.names.clone(),
                    rows: train_rows.clone(),
                });
                let dense = std.apply(&train_rows, &x.names);
                let y: Vec<R> = tr
                    .iter()
                    .map(|&i| if labels[i] { R::one() } else { -R::one() })
                    .collect();
                let sw: Vec<R> = tr
                    .iter()
                    .map(|&i| if labels[i] { w_pos } else { w_neg })
                    .collect();
                let (w, b, _) = fit_penalized(&dense, &y, &sw, penalty, lambda);
                let held_rows: Vec<Vec<Option<R>>> =
                    he.iter().map(|&i| x.rows[i].clone()).collect();
                let held_dense = std.apply(&held_rows, &x.names);
                let scores: Vec<R> = held_dense.iter().map(|r| dot(&w, r) + b).collect();
                let held_labels: Vec<bool> = he.iter().map(|&i| labels[i]).collect();
                if let Ok(a) = auc(&scores, &held_labels) {
                    fold_scores.push(a);
                }
            }
            if fold_scores.is_empty() {
                continue;
            }
            let mean =
                fold_scores.iter().copied().sum::<R>() / R::from_count(fold_scores.len());
            let take = match best {
                None => true,
                Some((acc, bp, lam)) => {
                    mean > acc
                        || (mean == acc && lambda > lam)
                        || (mean == acc && lambda == lam && penalty == Penalty::L1 && bp == Penalty::L2)
                }
            };
            if take {
                best = Some((mean, penalty, lambda));
            }
        }
    }
    let (cv_score, penalty, lambda) = best.ok_or(ModelError::EmptyMatrix)?;
    let standardizer = StandardizerState::fit(x);
    let dense = standardizer.apply_matrix(x);
    let y: Vec<R> = labels
        .iter()
        .map(|&l| if l { R::one() } else { -R::one() })
        .collect();
    let sw: Vec<R> = labels
        .iter()
        .map(|&l| if l { w_pos } else { w_neg })
        .collect();
    let (weights, intercept, converged) = fit_penalized(&dense, &y, &sw, penalty, lambda);
    Ok(LogRegModel {
        weights,
        intercept,
        penalty,
        lambda,
        class_weights: (w_neg, w_pos),
        standardizer,
        converged,
        cv_score,
    })
}

// ---------------------------------------------------------------------------
// Metrics and tests
// ---------------------------------------------------------------------------

/// Mann–Whitney AUC; tied score pairs count one half.
pub fn auc<R: Real>(scores: &[R], labels: &[bool]) -> Result<R, ModelError> {
    let pos: Vec<R> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(s, _)| *s)
        .collect();
    let neg: Vec<R> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(s, _)| *s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(ModelError::DegenerateLabels);
    }
    let mut acc = R::zero();
    let half = R::from_f64_c(0.5);
    for &p in &pos {
        for &n in &neg {
            if p > n {
                acc = acc + R::one();
            } else if p == n {
                acc = acc + half;
            }
        }
    }
    Ok(acc / R::from_count(pos.len() * neg.len()))
}

/// McNemar's test on paired correctness indicators: exact two-sided
/// binomial when the discordant count is at most 25, otherwise chi-square
/// with continuity correction. No discordant pairs gives p = 1.
pub fn mcnemar(correct_a: &[bool], correct_b: &[bool]) -> f64 {
    assert_eq!(correct_a.len(), correct_b.len());
    let b = correct_a
        .iter()
        .zip(correct_b)
        .filter(|(&a, &bb)| a && !bb)
        .count();
    let c = correct_a
        .iter()
        .zip(correct_b)
        .filter(|(&a, &bb)| !a && bb)
        .count();
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    if n <= 25 {
        // two-sided exact binomial, p = 2 P(X ≤ min(b,c)), capped at 1
        let k = b.min(c);
        let mut tail = 0.0f64;
        for i in 0..=k {
            tail += binomial_pmf(n, i);
        }
        (2.0 * tail).min(1.0)
    } else {
        let diff = (b as f64 - c as f64).abs() - 1.0;
        let stat = (diff * diff) / n as f64;
        let chi = ChiSquared::new(1.0).expect("valid dof");
        1.0 - chi.cdf(stat)
    }
}

fn binomial_pmf(n: usize, k: usize) -> f64 {
    // C(n, k) / 2^n via logs to stay finite
    let mut log_c = 0.0f64;
    for i in 0..k {
        log_c += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    (log_c - (n as f64) * 2f64.ln()).exp()
}

/// One-sided paired permutation test by sign flips, with add-one
/// smoothing: p = (1 + #{resampled mean ≥ observed}) / (n + 1).
pub fn permutation_test<R: Real>(diffs: &[R], n_resamples: usize, seed: u64) -> f64 {
    if diffs.is_empty() {
        return 1.0;
    }
    let n = R::from_count(diffs.len());
    let observed = diffs.iter().copied().sum::<R>() / n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut at_least = 0usize;
    for _ in 0..n_resamples {
        let mut acc = R::zero();
        for &d in diffs {
            if rng.gen::<bool>() {
                acc = acc + d;
            } else {
                acc = acc - d;
            }
        }
        if acc / n >= observed {
            at_least += 1;
        }
    }
    (1 + at_least) as f64 / (n_resamples + 1) as f64
}

/// Bootstrap test of AUC against the 0.5 null: p = fraction of resamples
/// whose AUC is at or below 0.5. Degenerate resamples count toward the
/// null.
pub fn bootstrap_test<R: Real>(
    scores: &[R],
    labels: &[bool],
    n_resamples: usize,
    seed: u64,
) -> Result<f64, ModelError> {
    if scores.len() != labels.len() || scores.is_empty() {
        return Err(ModelError::DegenerateLabels);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = R::from_f64_c(0.5);
    let mut at_or_below = 0usize;
    for _ in 0..n_resamples {
        let mut s = Vec::with_capacity(scores.len());
        let mut l = Vec::with_capacity(labels.len());
        for _ in 0..scores.len() {
            let i = rng.gen_range(0..scores.len());
            s.push(scores[i]);
            l.push(labels[i]);
        }
        match auc(&s, &l) {
            Ok(a) if a > half => {}
            _ => at_or_below += 1,
        }
    }
    Ok(at_or_below as f64 / n_resamples as f64)
}

// ---------------------------------------------------------------------------
// Significance table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncatedAnnotation {
    None,
    /// Also significant in the truncated setting, same direction.
    T,
    /// Significant in the truncated setting with the opposite direction.
    TReversed,
    /// The feature cannot be extracted from truncated text.
    Unavailable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub feature: String,
    pub direction: Direction,
    /// Arrow count from the corrected p: thresholds 0.05, 0.01, 0.001,
    /// 0.0001 give levels 1–4; 0 means not significant.
    pub level: u8,
    pub p: f64,
    pub p_corrected: f64,
    pub n: usize,
    pub truncated: TruncatedAnnotation,
}

pub fn arrow_level(p_corrected: f64) -> u8 {
    if p_corrected < 1e-4 {
        4
    } else if p_corrected < 1e-3 {
        3
    } else if p_corrected < 1e-2 {
        2
    } else if p_corrected < 0.05 {
        1
    } else {
        0
    }
}

/// Two-sided paired t-test p-value for a difference sample; all-zero
/// differences give p = 1, constant nonzero differences give p = 0.
pub fn paired_t_p<R: Real>(diffs: &[R]) -> Option<(f64, Direction)> {
    if diffs.len() < 2 {
        return None;
    }
    let n = diffs.len() as f64;
    let vals: Vec<f64> = diffs.iter().map(|d| d.into_f64()).collect();
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let direction = if mean >= 0.0 { Direction::Up } else { Direction::Down };
    if var == 0.0 {
        return if mean == 0.0 {
            Some((1.0, direction))
        } else {
            Some((0.0, direction))
        };
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("valid dof");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Some((p.clamp(0.0, 1.0), direction))
}

fn column_diffs<R: Real>(
    pos: &FeatureMatrix<R>,
    neg: &FeatureMatrix<R>,
    j: usize,
) -> Vec<R> {
    pos.rows
        .iter()
        .zip(&neg.rows)
        .filter_map(|(p, n)| match (p[j], n[j]) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        })
        .collect()
}

/// Per-feature paired t-tests of positive versus negative members, with a
/// Bonferroni correction over the features actually tested. When the
/// truncated matrices are given, each row is annotated with whether the
/// effect persists, reverses, or cannot be measured on truncated text.
pub fn significance_table<R: Real>(
    pos: &FeatureMatrix<R>,
    neg: &FeatureMatrix<R>,
    truncated: Option<(&FeatureMatrix<R>, &FeatureMatrix<R>)>,
) -> Vec<SignificanceRow> {
    assert_eq!(pos.names, neg.names);
    assert_eq!(pos.rows.len(), neg.rows.len());
    // first pass: which features are testable (≥2 paired values, not all-zero diff)
    let mut tested: Vec<(usize, Vec<R>)> = Vec::new();
    for j in 0..pos.names.len() {
        let diffs = column_diffs(pos, neg, j);
        if diffs.len() < 2 {
            continue;
        }
        if diffs.iter().all(|d| *d == R::zero()) {
            continue;
        }
        tested.push((j, diffs));
    }
    let m = tested.len() as f64;
    let mut rows = Vec::new();
    for (j, diffs) in tested {
        let Some((p, direction)) = paired_t_p(&diffs) else { continue };
        let p_corrected = (p * m).min(1.0);
        let name = &pos.names[j];
        let annotation = match truncated {
            None => TruncatedAnnotation::None,
            Some((tp, tn)) => truncated_annotation(tp, tn, name, direction, m),
        };
        rows.push(SignificanceRow {
            feature: name.clone(),
            direction,
            level: arrow_level(p_corrected),
            p,
            p_corrected,
            n: diffs.len(),
            truncated: annotation,
        });
    }
    rows
}

fn truncated_annotation<R: Real>(
    pos: &FeatureMatrix<R>,
    neg: &FeatureMatrix<R>,
    name: &str,
    direction: Direction,
    bonferroni_m: f64,
) -> TruncatedAnnotation {
    let Some(j) = pos.names.iter().position(|n| n == name) else {
        return TruncatedAnnotation::Unavailable;
    };
    let diffs = column_diffs(pos, neg, j);
    if diffs.is_empty() {
        return TruncatedAnnotation::Unavailable;
    }
    let Some((p, t_dir)) = paired_t_p(&diffs) else {
        return TruncatedAnnotation::Unavailable;
    };
    if arrow_level((p * bonferroni_m).min(1.0)) == 0 {
        return TruncatedAnnotation::None;
    }
    if t_dir == direction {
        TruncatedAnnotation::T
    } else {
        TruncatedAnnotation::TReversed
    }
}

/// One evaluated metric with its comparison test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: String,
    pub value: f64,
    pub baseline: Option<f64>,
    pub test: String,
    pub p: f64,
    pub n: usize,
}
