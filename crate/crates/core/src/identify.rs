//! Noisy observation simulation and penalized least-squares recovery of the
//! underlying analytic function, with ladder experiments that track how the
//! recovery error shrinks as observations accumulate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::{DiskPoint, TAU};
use crate::error::{Error, Result};
use crate::models::{dirichlet_weight, taylor_coefficients, AnalyticModel};
use crate::noise::NoiseModel;
use crate::numerics::{least_squares_slope, CompensatedSum};
use crate::sampling::SamplingPlan;
use crate::serialize::{fmt_f64, parse_f64, split_fields};

const MAX_DEGREE: usize = 256;
const HOLDOUT_DEGREES: [usize; 5] = [2, 4, 8, 16, 32];
// relative pivot cutoff that declares the unregularized normal matrix singular
const PIVOT_RTOL: f64 = 1e-12;
const EVAL_RADIUS: f64 = 0.7;
const EVAL_POINTS: usize = 512;
const BOUNDARY_DIAGNOSTIC_RADIUS: f64 = 0.95;
const BOUNDARY_DIAGNOSTIC_POINTS: usize = 256;

/// Noisy samples X_n = S(z_n) + xi_n of a hidden model along a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSeries {
    /// Sample point and observed value, in plan order.
    pub pairs: Vec<(DiskPoint, Complex64)>,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl ObservationSeries {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// CSV with columns n,re_z,im_z,re_x,im_x.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("n,re_z,im_z,re_x,im_x\n");
        for (n, (z, x)) in self.pairs.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                n,
                fmt_f64(z.re()),
                fmt_f64(z.im()),
                fmt_f64(x.re),
                fmt_f64(x.im)
            ));
        }
        out
    }

    /// Parses the output of `pairs_csv` back into pairs.
    pub fn pairs_from_csv(text: &str) -> Result<Vec<(DiskPoint, Complex64)>> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line.trim() != "n,re_z,im_z,re_x,im_x" {
                    return Err(Error::Parse {
                        location: "line 1".into(),
                        message: "expected header n,re_z,im_z,re_x,im_x".into(),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let loc = format!("line {}", i + 1);
            let f = split_fields(line, 5, &loc)?;
            let re_z = parse_f64(f[1], &loc)?;
            let im_z = parse_f64(f[2], &loc)?;
            let re_x = parse_f64(f[3], &loc)?;
            let im_x = parse_f64(f[4], &loc)?;
            pairs.push((DiskPoint::new(re_z, im_z)?, Complex64::new(re_x, im_x)));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyInput("observation CSV"));
        }
        Ok(pairs)
    }
}

/// Draws X_n = S(z_n) + xi_n with each xi_n from its own generator stream
/// keyed by (seed, n), so extending the plan extends the series without
/// reshuffling earlier observations.
pub fn simulate_observations(
    target: &AnalyticModel,
    plan: &SamplingPlan,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ObservationSeries> {
    if plan.is_empty() {
        return Err(Error::EmptyInput("sampling plan"));
    }
    noise.validate()?;
    let pairs = plan
        .points
        .iter()
        .enumerate()
        .map(|(n, z)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n as u64);
            (*z, target.evaluate(z) + noise.sample(&mut rng))
        })
        .collect();
    Ok(ObservationSeries { pairs, noise: noise.clone(), seed })
}

/// Estimator settings: Taylor degree, energy-penalty weight lambda, the
/// boundary-weight exponent alpha of the penalty, and an optional holdout
/// fraction that activates degree selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub degree: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub validation_fraction: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { degree: 8, lambda: 0.0, alpha: 0.0, validation_fraction: 0.0 }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree > MAX_DEGREE {
            return Err(Error::InvalidParameter {
                field: "degree",
                message: format!("must be at most {MAX_DEGREE}, got {}", self.degree),
            });
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "lambda",
                message: format!("must be finite and nonnegative, got {}", self.lambda),
            });
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter {
                field: "alpha",
                message: format!("must lie in [0, 1), got {}", self.alpha),
            });
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::InvalidParameter {
                field: "validation_fraction",
                message: format!("must lie in [0, 1), got {}", self.validation_fraction),
            });
        }
        Ok(())
    }
}

/// A fitted Taylor polynomial with its residual, penalty, and the per-degree
/// validation curve when selection was active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: AnalyticModel,
    /// Euclidean norm of the data misfit over the full observation set.
    pub residual_norm: f64,
    /// lambda times the exact Dirichlet energy of the fitted polynomial.
    pub penalty_value: f64,
    /// (degree, validation residual norm) pairs; empty when selection is off.
    pub validation_curve: Vec<(usize, f64)>,
}

// least-squares solve of the penalized normal equations at a fixed degree
fn solve_at_degree(
    pairs: &[(DiskPoint, Complex64)],
    degree: usize,
    lambda: f64,
    alpha: f64,
) -> Result<Vec<Complex64>> {
    let n = pairs.len();
    let dim = degree + 1;
    if lambda == 0.0 && dim > n {
        return Err(Error::InvalidParameter {
            field: "degree",
            message: format!("unpenalized fit needs degree + 1 <= {n} observations, got degree {degree}"),
        });
    }
    let mut v = DMatrix::<Complex64>::zeros(n, dim);
    for (row, (z, _)) in pairs.iter().enumerate() {
        let zc = Complex64::new(z.re(), z.im());
        let mut p = Complex64::new(1.0, 0.0);
        for col in 0..dim {
            v[(row, col)] = p;
            p *= zc;
        }
    }
    let x = DVector::<Complex64>::from_iterator(n, pairs.iter().map(|(_, x)| *x));
    let mut g = v.adjoint() * &v;
    for j in 1..dim {
        g[(j, j)] += Complex64::new(lambda * dirichlet_weight(j, alpha), 0.0);
    }
    let b = v.adjoint() * x;
    let lu = g.full_piv_lu();
    let diag = lu.u().map_diagonal(|d| d.norm());
    let max = diag.iter().cloned().fold(0.0f64, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if lambda == 0.0 && (max == 0.0 || min < PIVOT_RTOL * max) {
        return Err(Error::RankDeficient(format!(
            "normal matrix pivot ratio {:e} at degree {degree}; add penalty or distinct points",
            if max == 0.0 { 0.0 } else { min / max }
        )));
    }
    let c = lu
        .solve(&b)
        .ok_or_else(|| Error::RankDeficient(format!("normal matrix solve failed at degree {degree}")))?;
    Ok(c.iter().copied().collect())
}

fn residual_norm(model: &AnalyticModel, pairs: &[(DiskPoint, Complex64)]) -> f64 {
    let mut sum = CompensatedSum::new();
    for (z, x) in pairs {
        sum.add((model.evaluate(z) - x).norm_sqr());
    }
    sum.value().sqrt()
}

fn penalty_value(coefficients: &[Complex64], lambda: f64, alpha: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    for (j, c) in coefficients.iter().enumerate() {
        sum.add(c.norm_sqr() * dirichlet_weight(j, alpha));
    }
    lambda * sum.value()
}

/// Penalized least squares over Taylor polynomials: minimizes the squared
/// misfit plus lambda times the exact Dirichlet energy of the candidate.
/// With validation_fraction > 0 the degree is chosen by holdout over
/// {2, 4, 8, 16, 32}, ties toward smaller, then refit on all observations.
pub fn fit_model(obs: &ObservationSeries, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    if obs.is_empty() {
        return Err(Error::EmptyInput("observation series"));
    }
    let mut curve = Vec::new();
    let degree = if config.validation_fraction > 0.0 {
        let held = ((obs.len() as f64 * config.validation_fraction).ceil() as usize)
            .clamp(1, obs.len() - 1);
        let (train, holdout) = obs.pairs.split_at(obs.len() - held);
        let mut best: Option<(usize, f64)> = None;
        for &d in HOLDOUT_DEGREES.iter().filter(|&&d| d <= MAX_DEGREE.min(config.degree.max(32))) {
            let coeffs = match solve_at_degree(train, d, config.lambda, config.alpha) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let m = AnalyticModel::TaylorPolynomial { coefficients: coeffs };
            let score = residual_norm(&m, holdout);
            curve.push((d, score));
            if best.map_or(true, |(_, s)| score < s) {
                best = Some((d, score));
            }
        }
        let (d, _) = best.ok_or_else(|| {
            Error::RankDeficient("no candidate degree admits a holdout fit".into())
        })?;
        d
    } else {
        config.degree
    };
    let coefficients = solve_at_degree(&obs.pairs, degree, config.lambda, config.alpha)?;
    let penalty = penalty_value(&coefficients, config.lambda, config.alpha);
    let model = AnalyticModel::TaylorPolynomial { coefficients };
    let residual = residual_norm(&model, &obs.pairs);
    Ok(FitResult { model, residual_norm: residual, penalty_value: penalty, validation_curve: curve })
}

/// Fixed sunflower grid of 512 points filling |z| <= 0.7, the region where
/// recovery error is scored.
pub fn evaluation_grid() -> Vec<DiskPoint> {
    let golden = TAU * (1.0 - 1.0 / ((1.0 + 5.0f64.sqrt()) / 2.0));
    (0..EVAL_POINTS)
        .map(|i| {
            let r = EVAL_RADIUS * ((i as f64 + 0.5) / EVAL_POINTS as f64).sqrt();
            let t = golden * i as f64;
            DiskPoint::new(r * t.cos(), r * t.sin()).expect("grid stays inside the disk")
        })
        .collect()
}

/// Largest pointwise gap between two models over the scoring grid.
pub fn sup_error(fitted: &AnalyticModel, target: &AnalyticModel) -> f64 {
    evaluation_grid()
        .iter()
        .map(|z| (fitted.evaluate(z) - target.evaluate(z)).norm())
        .fold(0.0, f64::max)
}

fn boundary_sup_error(fitted: &AnalyticModel, target: &AnalyticModel) -> f64 {
    (0..BOUNDARY_DIAGNOSTIC_POINTS)
        .map(|k| {
            let t = TAU * k as f64 / BOUNDARY_DIAGNOSTIC_POINTS as f64;
            let z = DiskPoint::from_polar(BOUNDARY_DIAGNOSTIC_RADIUS, t).expect("inside the disk");
            (fitted.evaluate(&z) - target.evaluate(&z)).norm()
        })
        .fold(0.0, f64::max)
}

fn coefficient_error(fitted: &AnalyticModel, target: &AnalyticModel) -> f64 {
    let count = match fitted {
        AnalyticModel::TaylorPolynomial { coefficients } => coefficients.len(),
        _ => 33,
    };
    let a = taylor_coefficients(fitted, count);
    let b = taylor_coefficients(target, count);
    a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Outcome of one (observation count, seed) cell of an experiment; a failed
/// fit keeps its error message and empty metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentCell {
    pub n: usize,
    pub seed: u64,
    pub sup_error: Option<f64>,
    pub coefficient_error: Option<f64>,
    /// Gap near |z| = 0.95; diagnostic only, excluded from medians and slope.
    pub boundary_error: Option<f64>,
    pub residual_norm: Option<f64>,
    pub error: Option<String>,
}

/// Medians over seeds at one rung of the observation ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSummary {
    pub n: usize,
    pub successes: usize,
    pub failures: usize,
    pub median_sup_error: Option<f64>,
    pub median_coefficient_error: Option<f64>,
    pub median_boundary_error: Option<f64>,
}

/// Full experiment output: every cell, per-rung medians, and the log-log
/// slope of median sup-error against observation count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub cells: Vec<ExperimentCell>,
    pub summaries: Vec<LadderSummary>,
    /// Slope of ln(median sup-error) against ln(n); None with under two rungs.
    pub slope: Option<f64>,
}

impl ExperimentReport {
    /// Per-rung medians as CSV; empty fields where every seed failed.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("n,successes,failures,median_sup_error,median_coefficient_error,median_boundary_error\n");
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.n,
                s.successes,
                s.failures,
                opt(s.median_sup_error),
                opt(s.median_coefficient_error),
                opt(s.median_boundary_error)
            ));
        }
        out
    }
}

fn median(values: &mut Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    Some(if k % 2 == 1 { values[k / 2] } else { 0.5 * (values[k / 2 - 1] + values[k / 2]) })
}

/// Runs the recovery experiment over every (prefix length, seed) cell in
/// parallel: simulate, fit, score against the target. Fit failures are
/// recorded in their cells, not raised.
pub fn consistency_experiment(
    target: &AnalyticModel,
    plan: &SamplingPlan,
    ladder: &[usize],
    noise: &NoiseModel,
    config: &FitConfig,
    seeds: &[u64],
) -> Result<ExperimentReport> {
    if ladder.is_empty() {
        return Err(Error::EmptyInput("ladder"));
    }
    if seeds.is_empty() {
        return Err(Error::EmptyInput("seeds"));
    }
    if !ladder.windows(2).all(|w| w[0] < w[1]) || ladder[0] == 0 || ladder[ladder.len() - 1] > plan.len()
    {
        return Err(Error::InvalidParameter {
            field: "ladder",
            message: format!("must be strictly increasing within 1..={}", plan.len()),
        });
    }
    config.validate()?;
    noise.validate()?;
    let keys: Vec<(usize, u64)> =
        ladder.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let mut cells: Vec<ExperimentCell> = keys
        .par_iter()
        .map(|&(n, seed)| {
            let run = plan
                .prefix(n)
                .and_then(|p| simulate_observations(target, &p, noise, seed))
                .and_then(|obs| fit_model(&obs, config));
            match run {
                Ok(fit) => ExperimentCell {
                    n,
                    seed,
                    sup_error: Some(sup_error(&fit.model, target)),
                    coefficient_error: Some(coefficient_error(&fit.model, target)),
                    boundary_error: Some(boundary_sup_error(&fit.model, target)),
                    residual_norm: Some(fit.residual_norm),
                    error: None,
                },
                Err(e) => ExperimentCell {
                    n,
                    seed,
                    sup_error: None,
                    coefficient_error: None,
                    boundary_error: None,
                    residual_norm: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    // keyed merge: cell order is (n, seed) regardless of scheduling
    cells.sort_by_key(|c| (c.n, c.seed));
    let summaries: Vec<LadderSummary> = ladder
        .iter()
        .map(|&n| {
            let rung: Vec<&ExperimentCell> = cells.iter().filter(|c| c.n == n).collect();
            let mut sup: Vec<f64> = rung.iter().filter_map(|c| c.sup_error).collect();
            let mut coef: Vec<f64> = rung.iter().filter_map(|c| c.coefficient_error).collect();
            let mut bnd: Vec<f64> = rung.iter().filter_map(|c| c.boundary_error).collect();
            let successes = sup.len();
            LadderSummary {
                n,
                successes,
                failures: rung.len() - successes,
                median_sup_error: median(&mut sup),
                median_coefficient_error: median(&mut coef),
                median_boundary_error: median(&mut bnd),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = summaries
        .iter()
        .filter_map(|s| s.median_sup_error.filter(|&m| m > 0.0).map(|m| ((s.n as f64).ln(), m.ln())))
        .collect();
    let slope = if pts.len() >= 2 { Some(least_squares_slope(&pts)) } else { None };
    Ok(ExperimentReport { cells, summaries, slope })
}
