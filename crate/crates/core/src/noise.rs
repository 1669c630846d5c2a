//! Planar noise laws, Hellinger affinity between shifted copies, and the
//! Kakutani product dichotomy that decides whether two observation sequences
//! can ever be told apart.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::AnalyticModel;
use crate::numerics::{adaptive_quad_2d, adaptive_simpson, CompensatedSum};
use crate::sampling::SamplingPlan;
use crate::serialize::fmt_f64;

const GRID_MAX_SIDE: usize = 64;
// stands in for log 0 so reports stay finite and JSON-safe
const LOG_ZERO: f64 = f64::MIN;

/// A zero-mean noise distribution on the plane, applied independently at
/// every sample point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Density (1/2 pi sigma^2) exp(-|z|^2 / 2 sigma^2).
    #[serde(rename = "gaussian")]
    Gaussian2D { sigma: f64 },
    /// Uniform on the disk of the given radius.
    UniformDisk { radius: f64 },
    /// Piecewise-constant density on a side x side grid of square cells
    /// centered at the origin; weights are row-major in y then x and sum to 1.
    GridDensity { cell: f64, side: usize, weights: Vec<f64> },
    /// The degenerate zero-noise limit.
    NoNoise,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian2D { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidParameter {
                        field: "sigma",
                        message: format!("must be positive and finite, got {sigma}"),
                    });
                }
            }
            Self::UniformDisk { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidParameter {
                        field: "radius",
                        message: format!("must be positive and finite, got {radius}"),
                    });
                }
            }
            Self::GridDensity { cell, side, weights } => {
                if !(cell.is_finite() && *cell > 0.0) {
                    return Err(Error::InvalidParameter {
                        field: "cell",
                        message: format!("must be positive and finite, got {cell}"),
                    });
                }
                if *side == 0 || *side > GRID_MAX_SIDE {
                    return Err(Error::InvalidParameter {
                        field: "side",
                        message: format!("must lie in 1..={GRID_MAX_SIDE}, got {side}"),
                    });
                }
                if weights.len() != side * side {
                    return Err(Error::InvalidParameter {
                        field: "weights",
                        message: format!("expected {} entries, got {}", side * side, weights.len()),
                    });
                }
                let mut sum = 0.0;
                for w in weights {
                    if !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::InvalidParameter {
                            field: "weights",
                            message: "entries must be nonnegative and finite".into(),
                        });
                    }
                    sum += w;
                }
                if (sum - 1.0).abs() > 1e-8 {
                    return Err(Error::InvalidParameter {
                        field: "weights",
                        message: format!("must sum to 1 within 1e-8, got {sum}"),
                    });
                }
                let (mx, my) = self.grid_mean();
                if mx.abs() > 1e-8 || my.abs() > 1e-8 {
                    return Err(Error::InvalidParameter {
                        field: "weights",
                        message: format!("mean must vanish within 1e-8, got ({mx}, {my})"),
                    });
                }
            }
            Self::NoNoise => {}
        }
        Ok(())
    }

    fn grid_mean(&self) -> (f64, f64) {
        match self {
            Self::GridDensity { cell, side, weights } => {
                let half = 0.5 * (*side as f64 - 1.0);
                let mut mx = 0.0;
                let mut my = 0.0;
                for iy in 0..*side {
                    for ix in 0..*side {
                        let w = weights[iy * side + ix];
                        mx += w * (ix as f64 - half) * cell;
                        my += w * (iy as f64 - half) * cell;
                    }
                }
                (mx, my)
            }
            _ => (0.0, 0.0),
        }
    }

    /// Draws one noise realization.
    pub fn sample(&self, rng: &mut impl Rng) -> Complex64 {
        match self {
            Self::Gaussian2D { sigma } => {
                let re: f64 = rng.sample(rand_distr::StandardNormal);
                let im: f64 = rng.sample(rand_distr::StandardNormal);
                Complex64::new(sigma * re, sigma * im)
            }
            Self::UniformDisk { radius } => {
                let u: f64 = rng.gen();
                let v: f64 = rng.gen();
                let r = radius * u.sqrt();
                let t = crate::disk::TAU * v;
                Complex64::new(r * t.cos(), r * t.sin())
            }
            Self::GridDensity { cell, side, weights } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut idx = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        idx = i;
                        break;
                    }
                }
                let half = 0.5 * (*side as f64 - 1.0);
                let cx = (idx % side) as f64 - half;
                let cy = (idx / side) as f64 - half;
                let dx: f64 = rng.gen::<f64>() - 0.5;
                let dy: f64 = rng.gen::<f64>() - 0.5;
                Complex64::new((cx + dx) * cell, (cy + dy) * cell)
            }
            Self::NoNoise => Complex64::new(0.0, 0.0),
        }
    }
}

// overlap area of two disks of equal radius r at center distance u
fn disk_lens_area(r: f64, u: f64) -> f64 {
    if u >= 2.0 * r {
        return 0.0;
    }
    2.0 * r * r * (u / (2.0 * r)).acos() - 0.5 * u * (4.0 * r * r - u * u).sqrt()
}

/// Hellinger affinity between the noise law and its shift by d: the integral
/// of sqrt(P(z) P(z - d)), always in [0, 1], equal to 1 only at d = 0.
pub fn hellinger_affinity(noise: &NoiseModel, d: Complex64) -> Result<f64> {
    noise.validate()?;
    let value = match noise {
        NoiseModel::Gaussian2D { sigma } => (-d.norm_sqr() / (8.0 * sigma * sigma)).exp(),
        NoiseModel::UniformDisk { radius } => {
            // sqrt of the product is 1/(pi r^2) on the lens, 0 elsewhere
            disk_lens_area(*radius, d.norm()) / (std::f64::consts::PI * radius * radius)
        }
        NoiseModel::GridDensity { cell, side, weights } => {
            // exact rectangle overlaps between the grid and its shifted copy
            let mut sum = 0.0;
            for (a, &wa) in weights.iter().enumerate() {
                if wa == 0.0 {
                    continue;
                }
                let (ax, ay) = ((a % side) as f64, (a / side) as f64);
                for (b, &wb) in weights.iter().enumerate() {
                    if wb == 0.0 {
                        continue;
                    }
                    let (bx, by) = ((b % side) as f64, (b / side) as f64);
                    let ox = cell - ((ax - bx) * cell - d.re).abs();
                    let oy = cell - ((ay - by) * cell - d.im).abs();
                    if ox > 0.0 && oy > 0.0 {
                        sum += (wa * wb).sqrt() * ox * oy;
                    }
                }
            }
            sum / (cell * cell)
        }
        NoiseModel::NoNoise => {
            if d.norm() == 0.0 {
                1.0
            } else {
                0.0
            }
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Affinity by numerical integration of sqrt(P(z) P(z - d)); an independent
/// route used to cross-check the closed forms.
pub fn hellinger_affinity_quadrature(noise: &NoiseModel, d: Complex64) -> Result<f64> {
    noise.validate()?;
    match noise {
        NoiseModel::Gaussian2D { sigma } => {
            let s2 = sigma * sigma;
            let norm = 1.0 / (crate::disk::TAU * s2);
            let l = 7.0 * sigma + d.norm();
            let f = |x: f64, y: f64| {
                let z = Complex64::new(x, y);
                let e = -(z.norm_sqr() + (z - d).norm_sqr()) / (4.0 * s2);
                norm * e.exp()
            };
            Ok(adaptive_quad_2d(f, -l, l, -l, l, 1e-10).clamp(0.0, 1.0))
        }
        NoiseModel::UniformDisk { radius } => {
            let r = *radius;
            let u = d.norm();
            if u >= 2.0 * r {
                return Ok(0.0);
            }
            // strip integral of the overlap of the two disks, oriented along d
            let chord = |x: f64| {
                let a = (r * r - x * x).max(0.0).sqrt();
                let b = (r * r - (x - u) * (x - u)).max(0.0).sqrt();
                2.0 * a.min(b)
            };
            let area = adaptive_simpson(chord, u - r, r, 1e-12);
            Ok((area / (std::f64::consts::PI * r * r)).clamp(0.0, 1.0))
        }
        NoiseModel::GridDensity { .. } | NoiseModel::NoNoise => hellinger_affinity(noise, d),
    }
}

/// Smallest observed (1 - affinity)/|d|^2 over the shift ladder: the local
/// curvature constant that turns squared gaps into affinity decay. A
/// nonpositive value is reported, not rejected.
pub fn affinity_gap_constant(noise: &NoiseModel, ladder: &[Complex64]) -> Result<f64> {
    if ladder.is_empty() {
        return Err(Error::EmptyInput("affinity gap ladder"));
    }
    let mut a_hat = f64::INFINITY;
    for d in ladder {
        if d.norm() == 0.0 {
            return Err(Error::InvalidParameter {
                field: "ladder",
                message: "shifts must be nonzero".into(),
            });
        }
        let rho = hellinger_affinity(noise, *d)?;
        a_hat = a_hat.min((1.0 - rho) / d.norm_sqr());
    }
    Ok(a_hat)
}

/// Evidence grade for the product measure dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KakutaniClassification {
    OrthogonalEvidence,
    EquivalentEvidence,
    Inconclusive,
}

/// Classification thresholds; a finite run only accumulates evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KakutaniConfig {
    /// Log partial product below this reads as orthogonal evidence.
    pub orthogonal_log_threshold: f64,
    /// Ladder increments smaller than this read as a converged product.
    pub equivalent_cauchy_tolerance: f64,
}

impl Default for KakutaniConfig {
    fn default() -> Self {
        Self { orthogonal_log_threshold: -30.0, equivalent_cauchy_tolerance: 1e-3 }
    }
}

/// One checkpoint of the partial affinity product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub n: usize,
    pub affinity: f64,
    /// Log of the partial product; an exactly zero factor clamps it to f64::MIN.
    pub log_affinity: f64,
}

/// Partial products of per-factor Hellinger affinities with a dichotomy verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KakutaniReport {
    pub ladder: Vec<LadderPoint>,
    /// Affinity of each factor, in plan order.
    pub factors: Vec<f64>,
    /// Some factor was exactly zero, which settles orthogonality outright.
    pub hit_zero: bool,
    pub classification: KakutaniClassification,
}

impl KakutaniReport {
    /// Per-factor series as CSV with columns k,affinity,log_affinity.
    pub fn per_factor_csv(&self) -> String {
        let mut out = String::from("k,affinity,log_affinity\n");
        for (k, rho) in self.factors.iter().enumerate() {
            let log = if *rho == 0.0 { LOG_ZERO } else { rho.ln() };
            out.push_str(&format!("{},{},{}\n", k + 1, fmt_f64(*rho), fmt_f64(log)));
        }
        out
    }
}

/// Runs the product dichotomy on an explicit gap sequence d_k: the partial
/// products of hellinger_affinity(noise, d_k) are accumulated in log space in
/// ascending order and checkpointed at the ladder indices.
pub fn kakutani_product_from_gaps(
    gaps: &[Complex64],
    noise: &NoiseModel,
    ladder: &[usize],
    config: &KakutaniConfig,
) -> Result<KakutaniReport> {
    if gaps.is_empty() {
        return Err(Error::EmptyInput("gap sequence"));
    }
    if ladder.is_empty() {
        return Err(Error::EmptyInput("ladder"));
    }
    if !ladder.windows(2).all(|w| w[0] < w[1]) || ladder[0] == 0 || ladder[ladder.len() - 1] > gaps.len() {
        return Err(Error::InvalidParameter {
            field: "ladder",
            message: format!("must be strictly increasing within 1..={}", gaps.len()),
        });
    }
    noise.validate()?;
    let mut factors = Vec::with_capacity(ladder[ladder.len() - 1]);
    let mut log_sum = CompensatedSum::new();
    let mut hit_zero = false;
    let mut points = Vec::with_capacity(ladder.len());
    let mut next = 0;
    for (k, d) in gaps.iter().take(ladder[ladder.len() - 1]).enumerate() {
        let rho = hellinger_affinity(noise, *d)?;
        factors.push(rho);
        if rho == 0.0 {
            hit_zero = true;
        } else if !hit_zero {
            log_sum.add(rho.ln());
        }
        if k + 1 == ladder[next] {
            let log = if hit_zero { LOG_ZERO } else { log_sum.value() };
            let affinity = if hit_zero { 0.0 } else { log.exp() };
            points.push(LadderPoint { n: k + 1, affinity, log_affinity: log });
            next += 1;
        }
    }
    let classification = classify(&points, hit_zero, config);
    Ok(KakutaniReport { ladder: points, factors, hit_zero, classification })
}

fn classify(points: &[LadderPoint], hit_zero: bool, config: &KakutaniConfig) -> KakutaniClassification {
    if hit_zero {
        return KakutaniClassification::OrthogonalEvidence;
    }
    let last = points[points.len() - 1].log_affinity;
    let step = if points.len() >= 2 {
        Some(last - points[points.len() - 2].log_affinity)
    } else {
        None
    };
    if last < config.orthogonal_log_threshold
        && step.map_or(true, |s| s < -config.equivalent_cauchy_tolerance)
    {
        return KakutaniClassification::OrthogonalEvidence;
    }
    if let Some(s) = step {
        if s.abs() < config.equivalent_cauchy_tolerance {
            return KakutaniClassification::EquivalentEvidence;
        }
    }
    KakutaniClassification::Inconclusive
}

/// Product dichotomy for two models observed through the plan: the gaps are
/// f(z_k) - g(z_k).
pub fn kakutani_product(
    f: &AnalyticModel,
    g: &AnalyticModel,
    plan: &SamplingPlan,
    noise: &NoiseModel,
    ladder: &[usize],
    config: &KakutaniConfig,
) -> Result<KakutaniReport> {
    if plan.is_empty() {
        return Err(Error::EmptyInput("sampling plan"));
    }
    let gaps: Vec<Complex64> = plan.points.iter().map(|z| f.evaluate(z) - g.evaluate(z)).collect();
    kakutani_product_from_gaps(&gaps, noise, ladder, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::Arc;
    use crate::measure::BoundarySet;
    use crate::sampling::generate_dyadic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussian(sigma: f64) -> NoiseModel {
        NoiseModel::Gaussian2D { sigma }
    }

    #[test]
    fn test_affinity_is_one_at_zero_shift() {
        let grid = NoiseModel::GridDensity {
            cell: 0.5,
            side: 3,
            weights: vec![0.0, 0.1, 0.0, 0.2, 0.4, 0.2, 0.0, 0.1, 0.0],
        };
        for noise in [gaussian(0.7), NoiseModel::UniformDisk { radius: 2.0 }, grid, NoiseModel::NoNoise] {
            let rho = hellinger_affinity(&noise, Complex64::new(0.0, 0.0)).unwrap();
            assert!((rho - 1.0).abs() < 1e-12, "{noise:?}: {rho}");
        }
    }

    #[test]
    fn test_gaussian_affinity_closed_form_and_quadrature() {
        let noise = gaussian(1.0);
        let d = Complex64::new(2.0, 0.0);
        let rho = hellinger_affinity(&noise, d).unwrap();
        assert!((rho - (-0.5f64).exp()).abs() < 1e-15);
        for sigma in [0.1, 1.0, 3.0] {
            let noise = gaussian(sigma);
            for k in 1..=5 {
                let d = Complex64::new(1.2 * sigma * k as f64, -0.3 * sigma);
                let exact = hellinger_affinity(&noise, d).unwrap();
                let quad = hellinger_affinity_quadrature(&noise, d).unwrap();
                assert!((exact - quad).abs() < 1e-8, "sigma {sigma} k {k}: {exact} vs {quad}");
            }
        }
    }

    #[test]
    fn test_uniform_disk_affinity_lens_and_disjoint() {
        let noise = NoiseModel::UniformDisk { radius: 1.0 };
        // unit disks at distance 1: lens area 2 pi/3 - sqrt(3)/2
        let expected = (2.0 * std::f64::consts::PI / 3.0 - 3.0f64.sqrt() / 2.0) / std::f64::consts::PI;
        let rho = hellinger_affinity(&noise, Complex64::new(0.6, 0.8)).unwrap();
        assert!((rho - expected).abs() < 1e-12, "{rho} vs {expected}");
        let quad = hellinger_affinity_quadrature(&noise, Complex64::new(0.6, 0.8)).unwrap();
        assert!((rho - quad).abs() < 1e-8);
        assert_eq!(hellinger_affinity(&noise, Complex64::new(2.0, 0.0)).unwrap(), 0.0);
        assert_eq!(hellinger_affinity(&noise, Complex64::new(2.5, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn test_grid_affinity_single_cell_product_form() {
        let noise = NoiseModel::GridDensity { cell: 1.0, side: 1, weights: vec![1.0] };
        let d = Complex64::new(0.25, -0.4);
        let rho = hellinger_affinity(&noise, d).unwrap();
        assert!((rho - 0.75 * 0.6).abs() < 1e-14);
        let sym = hellinger_affinity(&noise, -d).unwrap();
        assert!((rho - sym).abs() < 1e-14);
    }

    #[test]
    fn test_grid_validation() {
        let bad_sum = NoiseModel::GridDensity { cell: 1.0, side: 1, weights: vec![0.5] };
        assert!(bad_sum.validate().is_err());
        let bad_len = NoiseModel::GridDensity { cell: 1.0, side: 2, weights: vec![1.0] };
        assert!(bad_len.validate().is_err());
        // off-center mass violates the zero-mean invariant
        let off = NoiseModel::GridDensity { cell: 1.0, side: 2, weights: vec![1.0, 0.0, 0.0, 0.0] };
        assert!(off.validate().is_err());
        assert!(gaussian(-1.0).validate().is_err());
        assert!(NoiseModel::UniformDisk { radius: 0.0 }.validate().is_err());
    }

    #[test]
    fn test_affinity_gap_constant_gaussian_curvature() {
        for sigma in [1.0f64, 2.0] {
            let ladder: Vec<Complex64> = (1..=8)
                .map(|k| Complex64::new(0.002 * sigma * k as f64, 0.0))
                .collect();
            let a_hat = affinity_gap_constant(&gaussian(sigma), &ladder).unwrap();
            let expected = 1.0 / (8.0 * sigma * sigma);
            assert!((a_hat / expected - 1.0).abs() < 1e-3, "sigma {sigma}: {a_hat}");
        }
        // scaling: quadrupling sigma^2 quarters the constant
        let a1 = affinity_gap_constant(&gaussian(1.0), &[Complex64::new(0.01, 0.0)]).unwrap();
        let a2 = affinity_gap_constant(&gaussian(2.0), &[Complex64::new(0.01, 0.0)]).unwrap();
        assert!((a1 / a2 - 4.0).abs() < 0.05 * 4.0);
        // mirrored ladders agree
        let plus = affinity_gap_constant(&gaussian(1.0), &[Complex64::new(0.1, 0.05)]).unwrap();
        let minus = affinity_gap_constant(&gaussian(1.0), &[Complex64::new(-0.1, -0.05)]).unwrap();
        assert_eq!(plus, minus);
    }

    #[test]
    fn test_kakutani_inverse_k_gaps_converge() {
        let gaps: Vec<Complex64> = (1..=100_000).map(|k| Complex64::new(1.0 / k as f64, 0.0)).collect();
        let report = kakutani_product_from_gaps(
            &gaps,
            &gaussian(1.0),
            &[1_000, 10_000, 100_000],
            &KakutaniConfig::default(),
        )
        .unwrap();
        let limit = (-(std::f64::consts::PI.powi(2)) / 48.0).exp();
        let last = report.ladder.last().unwrap();
        assert!((last.affinity - limit).abs() < 1e-3, "{} vs {limit}", last.affinity);
        assert_eq!(report.classification, KakutaniClassification::EquivalentEvidence);
        assert!(!report.hit_zero);
    }

    #[test]
    fn test_kakutani_inverse_sqrt_gaps_orthogonal() {
        let gaps: Vec<Complex64> = (1..=1000).map(|k| Complex64::new(1.0 / (k as f64).sqrt(), 0.0)).collect();
        let report = kakutani_product_from_gaps(
            &gaps,
            &gaussian(0.1),
            &[250, 500, 1000],
            &KakutaniConfig::default(),
        )
        .unwrap();
        let harmonic: f64 = (1..=1000).map(|k| 1.0 / k as f64).sum();
        let last = report.ladder.last().unwrap();
        assert!((last.log_affinity - (-12.5 * harmonic)).abs() < 1e-9);
        assert!(last.log_affinity <= -90.0);
        assert_eq!(report.classification, KakutaniClassification::OrthogonalEvidence);
    }

    #[test]
    fn test_kakutani_partial_products_monotone_and_additive() {
        let gaps: Vec<Complex64> = (1..=64).map(|k| Complex64::new(0.3 / k as f64, 0.1)).collect();
        let ladder: Vec<usize> = vec![8, 16, 32, 64];
        let report =
            kakutani_product_from_gaps(&gaps, &gaussian(0.5), &ladder, &KakutaniConfig::default()).unwrap();
        for w in report.ladder.windows(2) {
            assert!(w[1].affinity <= w[0].affinity + 1e-15);
        }
        // per-factor logs reproduce each checkpoint
        for point in &report.ladder {
            let logs: f64 = report.factors[..point.n].iter().map(|r| r.ln()).sum();
            assert!((logs - point.log_affinity).abs() < 1e-10);
        }
    }

    #[test]
    fn test_kakutani_identical_models_equivalent() {
        let target = BoundarySet::arc_union(vec![Arc::full_circle()]);
        let plan = generate_dyadic(&target, 4, 1).unwrap();
        let f = AnalyticModel::taylor(vec![Complex64::new(0.4, 0.0), Complex64::new(0.0, 0.3)]).unwrap();
        let n = plan.len();
        let report =
            kakutani_product(&f, &f, &plan, &gaussian(1.0), &[n / 2, n], &KakutaniConfig::default())
                .unwrap();
        assert!(report.ladder.iter().all(|p| p.affinity == 1.0));
        assert_eq!(report.classification, KakutaniClassification::EquivalentEvidence);
    }

    #[test]
    fn test_kakutani_zero_factor_settles_orthogonality() {
        let noise = NoiseModel::UniformDisk { radius: 0.2 };
        let gaps = vec![Complex64::new(0.1, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.05, 0.0)];
        let report =
            kakutani_product_from_gaps(&gaps, &noise, &[3], &KakutaniConfig::default()).unwrap();
        assert!(report.hit_zero);
        assert_eq!(report.classification, KakutaniClassification::OrthogonalEvidence);
        assert_eq!(report.ladder[0].affinity, 0.0);
        assert!(report.per_factor_csv().lines().count() == 4);
    }

    #[test]
    fn test_kakutani_ladder_validation() {
        let gaps = vec![Complex64::new(0.1, 0.0); 10];
        let cfg = KakutaniConfig::default();
        assert!(kakutani_product_from_gaps(&gaps, &gaussian(1.0), &[], &cfg).is_err());
        assert!(kakutani_product_from_gaps(&gaps, &gaussian(1.0), &[0, 5], &cfg).is_err());
        assert!(kakutani_product_from_gaps(&gaps, &gaussian(1.0), &[5, 5], &cfg).is_err());
        assert!(kakutani_product_from_gaps(&gaps, &gaussian(1.0), &[5, 11], &cfg).is_err());
    }

    #[test]
    fn test_noise_sampling_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = gaussian(0.5);
        let n = 20_000;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut second = 0.0;
        for _ in 0..n {
            let xi = noise.sample(&mut rng);
            mean += xi;
            second += xi.norm_sqr();
        }
        mean /= n as f64;
        second /= n as f64;
        assert!(mean.norm() < 4.0 * 0.5 / (n as f64).sqrt() * 2.0, "{mean}");
        assert!((second - 2.0 * 0.25).abs() < 0.02, "{second}");
        // uniform disk stays inside its radius
        let disk = NoiseModel::UniformDisk { radius: 0.3 };
        for _ in 0..1000 {
            assert!(disk.sample(&mut rng).norm() <= 0.3);
        }
    }
}
