//! Sampling plans inside the disk: dyadic nets aimed at a boundary set,
//! coverage validation through Stolz cones, and the divergence diagnostics
//! that separate identifying plans from defective ones.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::{normalize_angle, stolz_contains, BoundaryPoint, DiskPoint, TAU};
use crate::error::{Error, Result};
use crate::measure::BoundarySet;
use crate::models::AnalyticModel;
use crate::numerics::{least_squares_slope, CompensatedSum};
use crate::serialize::{fmt_f64, parse_f64, split_fields};

const MAX_PLAN_POINTS: usize = 10_000_000;
const MAX_DYADIC_LEVELS: usize = 24;

// Per-level log-sum slope thresholds for the Blaschke divergence verdict:
// flat level sums mean the infinite extension diverges, geometric decay
// means it converges.
const BLASCHKE_DIVERGENT_SLOPE: f64 = -0.2;
const BLASCHKE_CONVERGENT_SLOPE: f64 = -0.5;

// Log-log slope thresholds for the separation partial sums.
const SEPARATION_DIVERGENT_SLOPE: f64 = 0.2;
const SEPARATION_CONVERGENT_SLOPE: f64 = 0.05;

/// How a plan's points were laid out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplingScheme {
    Dyadic { levels: usize, density_factor: usize },
    RadialRay { anchors: Vec<f64>, radii: Vec<f64> },
    Custom,
}

/// An ordered list of sample points aimed at a target boundary set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub points: Vec<DiskPoint>,
    pub target: BoundarySet,
    pub scheme: SamplingScheme,
}

impl SamplingPlan {
    pub fn new(points: Vec<DiskPoint>, target: BoundarySet, scheme: SamplingScheme) -> Self {
        Self { points, target, scheme }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Finite proxy for 1 - |z_n| -> 0: the largest boundary distance over
    /// the last quarter of the list must be strictly below the first
    /// quarter's largest.
    pub fn tail_condition(&self) -> bool {
        let n = self.points.len();
        if n < 4 {
            return false;
        }
        let q = n / 4;
        let dist = |p: &DiskPoint| 1.0 - p.modulus();
        let first = self.points[..q].iter().map(dist).fold(0.0f64, f64::max);
        let last = self.points[n - q..].iter().map(dist).fold(0.0f64, f64::max);
        last < first
    }

    /// The first `n` points under the same target and scheme descriptor.
    pub fn prefix(&self, n: usize) -> Result<SamplingPlan> {
        if n == 0 || n > self.points.len() {
            return Err(Error::InvalidParameter {
                field: "prefix",
                message: format!("must lie in 1..={}, got {n}", self.points.len()),
            });
        }
        Ok(SamplingPlan {
            points: self.points[..n].to_vec(),
            target: self.target.clone(),
            scheme: self.scheme.clone(),
        })
    }

    /// Points as CSV with columns index,re,im.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", fmt_f64(p.re()), fmt_f64(p.im())));
        }
        out
    }

    /// Parses the points_csv format back into disk points.
    pub fn points_from_csv(text: &str) -> Result<Vec<DiskPoint>> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "index,re,im")) => {}
            _ => {
                return Err(Error::Parse {
                    location: "line 1".into(),
                    message: "expected header index,re,im".into(),
                })
            }
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let loc = || format!("line {}", i + 1);
            let fields = split_fields(line, 3, &loc())?;
            let re = parse_f64(fields[1], &loc())?;
            let im = parse_f64(fields[2], &loc())?;
            points.push(DiskPoint::new(re, im)?);
        }
        Ok(points)
    }
}

/// Dyadic net: for each level m = 1..levels, points at radius 1 - 2^-m whose
/// angles are the multiples of 2^-m / density_factor falling inside the
/// target dilated by 2^-m.
pub fn generate_dyadic(
    target: &BoundarySet,
    levels: usize,
    density_factor: usize,
) -> Result<SamplingPlan> {
    if levels == 0 || levels > MAX_DYADIC_LEVELS {
        return Err(Error::InvalidParameter {
            field: "levels",
            message: format!("must lie in 1..={MAX_DYADIC_LEVELS}, got {levels}"),
        });
    }
    if density_factor == 0 {
        return Err(Error::InvalidParameter {
            field: "density_factor",
            message: "must be a positive integer".into(),
        });
    }
    let arcs = target.realize()?;
    let mut points = Vec::new();
    for m in 1..=levels {
        let step = 0.5f64.powi(m as i32);
        let radius = 1.0 - step;
        let delta = step / density_factor as f64;
        let slots = (TAU / delta).ceil() as usize;
        let dilated: Vec<_> = arcs.iter().map(|a| a.dilate(step)).collect();
        for k in 0..slots {
            let theta = normalize_angle(k as f64 * delta);
            if dilated.iter().any(|a| a.contains(theta)) {
                if points.len() >= MAX_PLAN_POINTS {
                    return Err(Error::SizeLimit {
                        what: "dyadic plan points",
                        got: points.len() + 1,
                        cap: MAX_PLAN_POINTS,
                    });
                }
                points.push(DiskPoint::from_polar(radius, theta)?);
            }
        }
    }
    Ok(SamplingPlan::new(
        points,
        target.clone(),
        SamplingScheme::Dyadic { levels, density_factor },
    ))
}

/// Points on fixed rays, ordered radius-major so the tail approaches the
/// boundary when the radii schedule increases.
pub fn generate_radial_ray(
    anchors: &[f64],
    radii: &[f64],
    target: BoundarySet,
) -> Result<SamplingPlan> {
    if anchors.is_empty() || radii.is_empty() {
        return Err(Error::EmptyInput("radial ray plan needs anchors and radii"));
    }
    for r in radii {
        if !(*r >= 0.0 && *r < 1.0) {
            return Err(Error::InvalidParameter {
                field: "radii",
                message: format!("each radius must lie in [0, 1), got {r}"),
            });
        }
    }
    if anchors.len() * radii.len() > MAX_PLAN_POINTS {
        return Err(Error::SizeLimit {
            what: "radial ray plan points",
            got: anchors.len() * radii.len(),
            cap: MAX_PLAN_POINTS,
        });
    }
    let mut points = Vec::with_capacity(anchors.len() * radii.len());
    for &r in radii {
        for &theta in anchors {
            points.push(DiskPoint::from_polar(r, theta)?);
        }
    }
    Ok(SamplingPlan::new(
        points,
        target,
        SamplingScheme::RadialRay { anchors: anchors.to_vec(), radii: radii.to_vec() },
    ))
}

/// Stolz-cone hit counts over boundary probes restricted to the target set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub grid: usize,
    /// Minimum per-probe count required to call the probe covered.
    pub threshold: usize,
    /// One count per probe point lying in the target set.
    pub counts: Vec<usize>,
    pub min_count: usize,
    pub uncovered_fraction: f64,
}

/// Counts, for each of `grid` equispaced boundary angles inside the target,
/// how many plan points hold that angle in their Stolz cone. The covered
/// threshold is levels/2 for dyadic plans and 1 otherwise.
pub fn validate_coverage(plan: &SamplingPlan, grid: usize) -> Result<CoverageReport> {
    if grid < 64 {
        return Err(Error::InvalidParameter {
            field: "grid",
            message: format!("need at least 64 probe points, got {grid}"),
        });
    }
    let arcs = plan.target.realize()?;
    let threshold = match plan.scheme {
        SamplingScheme::Dyadic { levels, .. } => (levels / 2).max(1),
        _ => 1,
    };
    let probes: Vec<f64> = (0..grid)
        .map(|i| -std::f64::consts::PI + TAU * i as f64 / grid as f64)
        .filter(|&t| arcs.iter().any(|a| a.contains(t)))
        .collect();
    let counts: Vec<usize> = probes
        .par_iter()
        .map(|&t| {
            let y = BoundaryPoint::new(t);
            plan.points.iter().filter(|z| stolz_contains(&y, z)).count()
        })
        .collect();
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let uncovered_fraction = if counts.is_empty() {
        1.0
    } else {
        counts.iter().filter(|&&c| c < threshold).count() as f64 / counts.len() as f64
    };
    Ok(CoverageReport { grid, threshold, counts, min_count, uncovered_fraction })
}

/// Direction a finite diagnostic series points toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    DivergentTrend,
    ConvergentTrend,
    Inconclusive,
}

/// Sum of boundary distances with its per-level breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSumReport {
    /// Sum of 1 - |z_n| over the plan.
    pub total: f64,
    /// (level m, sum over points with 1 - |z| in (2^-m-1, 2^-m]).
    pub per_level: Vec<(usize, f64)>,
    pub verdict: TrendVerdict,
}

/// Computes sum(1 - |z_n|) and judges, from the per-level sums, whether the
/// infinite extension of the plan would diverge.
pub fn blaschke_sum(plan: &SamplingPlan) -> BlaschkeSumReport {
    let mut total = CompensatedSum::new();
    let mut levels: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for p in &plan.points {
        let d = 1.0 - p.modulus();
        total.add(d);
        if d > 0.0 {
            let m = (-(d.log2()) + 1e-9).floor().max(0.0) as usize;
            *levels.entry(m).or_insert(0.0) += d;
        }
    }
    let per_level: Vec<(usize, f64)> = levels.into_iter().collect();
    let pts: Vec<(f64, f64)> = per_level
        .iter()
        .filter(|(_, s)| *s > 0.0)
        .map(|(m, s)| (*m as f64, s.ln()))
        .collect();
    let verdict = if pts.len() < 2 {
        TrendVerdict::Inconclusive
    } else {
        let slope = least_squares_slope(&pts);
        if slope > BLASCHKE_DIVERGENT_SLOPE {
            TrendVerdict::DivergentTrend
        } else if slope < BLASCHKE_CONVERGENT_SLOPE {
            TrendVerdict::ConvergentTrend
        } else {
            TrendVerdict::Inconclusive
        }
    };
    BlaschkeSumReport { total: total.value(), per_level, verdict }
}

/// Partial sums S_N = sum_{k<=N} |f(z_k) - g(z_k)|^2 with a trend verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationSeries {
    pub partial_sums: Vec<f64>,
    /// Log-log slope of S_N over the last half of the series.
    pub slope: f64,
    pub verdict: TrendVerdict,
}

/// Accumulates the squared gaps between two models along the plan. Divergence
/// of this series is what lets the samples tell the models apart.
pub fn separation_sum(
    f: &AnalyticModel,
    g: &AnalyticModel,
    plan: &SamplingPlan,
    prefix: usize,
) -> Result<SeparationSeries> {
    if prefix == 0 || prefix > plan.points.len() {
        return Err(Error::InvalidParameter {
            field: "prefix",
            message: format!("must lie in 1..={}, got {prefix}", plan.points.len()),
        });
    }
    let mut acc = CompensatedSum::new();
    let mut partial_sums = Vec::with_capacity(prefix);
    for z in &plan.points[..prefix] {
        let gap = f.evaluate(z) - g.evaluate(z);
        acc.add(gap.norm_sqr());
        partial_sums.push(acc.value());
    }
    if *partial_sums.last().unwrap() == 0.0 {
        // identical along the plan: the series has already converged
        return Ok(SeparationSeries { partial_sums, slope: 0.0, verdict: TrendVerdict::ConvergentTrend });
    }
    let half = prefix / 2;
    let pts: Vec<(f64, f64)> = (half.max(1)..=prefix)
        .filter(|&n| partial_sums[n - 1] > 0.0)
        .map(|n| ((n as f64).ln(), partial_sums[n - 1].ln()))
        .collect();
    let (slope, verdict) = if pts.len() < 2 {
        (0.0, TrendVerdict::Inconclusive)
    } else {
        let slope = least_squares_slope(&pts);
        let verdict = if slope > SEPARATION_DIVERGENT_SLOPE {
            TrendVerdict::DivergentTrend
        } else if slope < SEPARATION_CONVERGENT_SLOPE {
            TrendVerdict::ConvergentTrend
        } else {
            TrendVerdict::Inconclusive
        };
        (slope, verdict)
    };
    Ok(SeparationSeries { partial_sums, slope, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::Arc;
    use crate::measure::{certify_theorem1_set, GaugeFunction};

    fn full_circle() -> BoundarySet {
        BoundarySet::arc_union(vec![Arc::full_circle()])
    }

    #[test]
    fn test_generate_dyadic_full_circle_counts() {
        let plan = generate_dyadic(&full_circle(), 3, 1).unwrap();
        for m in 1..=3 {
            let r = 1.0 - 0.5f64.powi(m);
            let count = plan.points.iter().filter(|p| (p.modulus() - r).abs() < 1e-12).count();
            let expected = (TAU * 2.0f64.powi(m)).ceil() as usize;
            assert_eq!(count, expected, "level {m}");
        }
        assert_eq!(plan.len(), 13 + 26 + 51);
    }

    #[test]
    fn test_generate_dyadic_arc_stays_within_dilation() {
        let arc = Arc::new(1.0, 0.1).unwrap();
        let target = BoundarySet::arc_union(vec![arc]);
        let plan = generate_dyadic(&target, 5, 1).unwrap();
        assert!(!plan.is_empty());
        for p in &plan.points {
            let step = 1.0 - p.modulus();
            let theta = p.im().atan2(p.re());
            assert!(arc.dilate(step + 1e-12).contains(theta));
        }
    }

    #[test]
    fn test_generate_dyadic_validation() {
        assert!(generate_dyadic(&full_circle(), 0, 1).is_err());
        assert!(generate_dyadic(&full_circle(), 25, 1).is_err());
        assert!(generate_dyadic(&full_circle(), 3, 0).is_err());
    }

    #[test]
    fn test_tail_condition_flags_single_level() {
        let single = generate_dyadic(&full_circle(), 1, 1).unwrap();
        assert!(!single.tail_condition());
        let deep = generate_dyadic(&full_circle(), 5, 1).unwrap();
        assert!(deep.tail_condition());
        let radii: Vec<f64> = (1..=10).map(|n| 1.0 - 0.5f64.powi(n)).collect();
        let ray = generate_radial_ray(&[0.7], &radii, full_circle()).unwrap();
        assert!(ray.tail_condition());
    }

    #[test]
    fn test_validate_coverage_full_circle() {
        let plan = generate_dyadic(&full_circle(), 4, 1).unwrap();
        let report = validate_coverage(&plan, 256).unwrap();
        assert_eq!(report.threshold, 2);
        assert_eq!(report.uncovered_fraction, 0.0);
        assert!(report.min_count >= 2);
        assert_eq!(report.counts.len(), 256);
    }

    #[test]
    fn test_validate_coverage_single_point_and_empty() {
        let z = DiskPoint::new(0.9, 0.0).unwrap();
        let plan = SamplingPlan::new(vec![z], full_circle(), SamplingScheme::Custom);
        let report = validate_coverage(&plan, 512).unwrap();
        assert!(report.uncovered_fraction > 0.0 && report.uncovered_fraction < 1.0);
        assert_eq!(report.min_count, 0);
        let empty = SamplingPlan::new(vec![], full_circle(), SamplingScheme::Custom);
        let report = validate_coverage(&empty, 64).unwrap();
        assert_eq!(report.uncovered_fraction, 1.0);
        assert!(validate_coverage(&empty, 32).is_err());
    }

    #[test]
    fn test_coverage_respects_target_restriction() {
        // probes outside the target arc are not scored
        let arc = Arc::new(0.0, 0.5).unwrap();
        let target = BoundarySet::arc_union(vec![arc]);
        let plan = generate_dyadic(&target, 4, 1).unwrap();
        let report = validate_coverage(&plan, 1024).unwrap();
        assert!(report.counts.len() < 1024 / 10);
        assert_eq!(report.uncovered_fraction, 0.0);
    }

    #[test]
    fn test_blaschke_sum_full_circle_divergent() {
        let plan = generate_dyadic(&full_circle(), 6, 1).unwrap();
        let report = blaschke_sum(&plan);
        assert_eq!(report.per_level.len(), 6);
        for (m, s) in &report.per_level {
            assert!((s - TAU).abs() < 0.1 * TAU, "level {m}: {s}");
        }
        assert_eq!(report.verdict, TrendVerdict::DivergentTrend);
    }

    #[test]
    fn test_blaschke_sum_ray_convergent() {
        let radii: Vec<f64> = (1..=12).map(|n| 1.0 - 0.5f64.powi(n)).collect();
        let plan = generate_radial_ray(&[0.3], &radii, full_circle()).unwrap();
        let report = blaschke_sum(&plan);
        assert!((report.total - (1.0 - 0.5f64.powi(12))).abs() < 1e-15);
        assert_eq!(report.verdict, TrendVerdict::ConvergentTrend);
    }

    #[test]
    fn test_blaschke_sum_empty_inconclusive() {
        let empty = SamplingPlan::new(vec![], full_circle(), SamplingScheme::Custom);
        let report = blaschke_sum(&empty);
        assert_eq!(report.total, 0.0);
        assert_eq!(report.verdict, TrendVerdict::Inconclusive);
    }

    #[test]
    fn test_separation_constant_gap() {
        let f = AnalyticModel::taylor(vec![(0.5).into()]).unwrap();
        let g = AnalyticModel::taylor(vec![(0.2).into()]).unwrap();
        let plan = generate_dyadic(&full_circle(), 4, 1).unwrap();
        let series = separation_sum(&f, &g, &plan, plan.len()).unwrap();
        for (i, s) in series.partial_sums.iter().enumerate() {
            assert!((s - 0.09 * (i + 1) as f64).abs() < 1e-12);
        }
        assert!((series.slope - 1.0).abs() < 1e-6);
        assert_eq!(series.verdict, TrendVerdict::DivergentTrend);
    }

    #[test]
    fn test_separation_identical_models_zero() {
        let f = AnalyticModel::taylor(vec![(0.5).into(), (0.25).into()]).unwrap();
        let plan = generate_dyadic(&full_circle(), 3, 1).unwrap();
        let series = separation_sum(&f, &f, &plan, plan.len()).unwrap();
        assert!(series.partial_sums.iter().all(|&s| s == 0.0));
        assert_eq!(series.verdict, TrendVerdict::ConvergentTrend);
    }

    #[test]
    fn test_separation_linear_growth_for_z_gap() {
        let f = AnalyticModel::taylor(vec![0.0.into(), 1.0.into()]).unwrap();
        let g = AnalyticModel::taylor(vec![0.0.into()]).unwrap();
        let plan = generate_dyadic(&full_circle(), 6, 1).unwrap();
        let series = separation_sum(&f, &g, &plan, plan.len()).unwrap();
        assert_eq!(series.verdict, TrendVerdict::DivergentTrend);
        assert!(separation_sum(&f, &g, &plan, plan.len() + 1).is_err());
    }

    #[test]
    fn test_points_csv_round_trip() {
        let plan = generate_dyadic(&full_circle(), 3, 1).unwrap();
        let csv = plan.points_csv();
        let points = SamplingPlan::points_from_csv(&csv).unwrap();
        assert_eq!(points, plan.points);
        assert!(SamplingPlan::points_from_csv("re,im\n").is_err());
    }

    #[test]
    fn test_prefix_bounds() {
        let plan = generate_dyadic(&full_circle(), 3, 1).unwrap();
        let p = plan.prefix(10).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(p.points[..], plan.points[..10]);
        assert!(plan.prefix(0).is_err());
        assert!(plan.prefix(plan.len() + 1).is_err());
    }

    #[test]
    fn test_certified_set_plan_covers_target() {
        // a set passing the certificate admits a dyadic plan with full coverage
        let arcs = vec![Arc::new(-1.0, 0.8).unwrap(), Arc::new(1.2, 0.5).unwrap()];
        let target = BoundarySet::arc_union(arcs);
        let cert = certify_theorem1_set(&target, &GaugeFunction::Power { beta: 1.0 }).unwrap();
        assert!(cert.pass);
        let plan = generate_dyadic(&target, 6, 1).unwrap();
        let report = validate_coverage(&plan, 512).unwrap();
        assert_eq!(report.uncovered_fraction, 0.0);
        assert!(plan.tail_condition());
    }
}
