//! Certify a target, design a plan, and fit a model from noisy samples.

use hd_core::disk::Arc;
use hd_core::identify::{fit_model, simulate_observations, FitConfig};
use hd_core::measure::{certify_theorem1_set, BoundarySet, GaugeFunction};
use hd_core::noise::NoiseModel;
use hd_core::sampling::{generate_dyadic, validate_coverage};

fn main() -> Result<(), hd_core::Error> {
    // certify the target: admissible gauge, positive content
    let set = BoundarySet::arc_union(vec![Arc::new(0.0, std::f64::consts::TAU)?]);
    let certificate = certify_theorem1_set(&set, &GaugeFunction::Power { beta: 1.0 })?;
    assert!(certificate.pass);

    // design a plan that accumulates at the boundary inside the cones
    let plan = generate_dyadic(&set, 6, 1)?;
    let coverage = validate_coverage(&plan, 1024)?;
    assert_eq!(coverage.uncovered_fraction, 0.0);

    // simulate noisy samples of a rational model and fit a polynomial
    let target = hd_core::AnalyticModel::rational(
        vec![num_complex::Complex64::new(1.0, 0.0)],
        vec![num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(-0.5, 0.0)],
    )?;
    let noise = NoiseModel::Gaussian2D { sigma: 0.1 };
    let obs = simulate_observations(&target, &plan, &noise, 42)?;
    let fit = fit_model(&obs, &FitConfig { degree: 8, lambda: 1e-3, ..Default::default() })?;
    println!("residual norm {}", fit.residual_norm);
    Ok(())
}
