//! Command implementations: each resolves its config blocks, echoes the
//! effective configuration, computes, and writes artifacts to the out dir.

use std::fs;
use std::path::Path;

use serde::Serialize;

use hd_core::identify::{
    consistency_experiment, fit_model, simulate_observations, ObservationSeries,
};
use hd_core::measure::{
    alpha_capacity, certify_theorem1_set, hausdorff_content, Admissibility, CapacityResult,
    ContentMode,
};
use hd_core::noise::kakutani_product;
use hd_core::sampling::{
    blaschke_sum, generate_dyadic, generate_radial_ray, separation_sum, validate_coverage,
    SamplingPlan,
};
use hd_core::serialize::fmt_f64;
use hd_core::{AnalyticModel, NoiseModel, SamplingScheme};

use crate::config::{block_error, CliError, RunConfig};

const DEFAULT_COVERAGE_GRID: usize = 1024;

/// Dispatches one command: echo first, artifacts after, nothing written
/// outside `out_dir`.
pub fn run_command(name: &str, mut cfg: RunConfig, out_dir: &Path) -> Result<(), CliError> {
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(CliError::Validation(format!(
                "command: config was echoed from \"{c}\" but \"{name}\" was invoked"
            )));
        }
    }
    cfg.command = Some(name.to_string());
    cfg.out = Some(out_dir.to_path_buf());
    fs::create_dir_all(out_dir).map_err(|e| {
        CliError::Validation(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    match name {
        "certify" => certify(cfg, out_dir),
        "design" => design(cfg, out_dir),
        "separation" => separation(cfg, out_dir),
        "kakutani" => kakutani(cfg, out_dir),
        "simulate" => simulate(cfg, out_dir),
        "fit" => fit(cfg, out_dir),
        "experiment" => experiment(cfg, out_dir),
        "measure" => measure(cfg, out_dir),
        "formats" => formats(cfg, out_dir),
        other => Err(CliError::Validation(format!("command: unknown command {other}"))),
    }
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text)
        .map_err(|e| CliError::Validation(format!("cannot write {name}: {e}")))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("cannot serialize {name}: {e}")))?;
    write_text(dir, name, &format!("{text}\n"))
}

fn write_echo(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    write_json(dir, "effective_config.json", cfg)
}

/// Core errors raised by top-level config fields keep their own field name.
fn field_error(e: hd_core::Error) -> CliError {
    match e {
        hd_core::Error::InvalidParameter { field, message } => {
            CliError::Validation(format!("{field}: {message}"))
        }
        hd_core::Error::NoConvergence { iterations, residual } => CliError::Numeric(format!(
            "no convergence after {iterations} iterations (residual {residual})"
        )),
        hd_core::Error::RankDeficient(m) => CliError::Numeric(m),
        other => CliError::Validation(other.to_string()),
    }
}

fn build_plan(cfg: &RunConfig) -> Result<SamplingPlan, CliError> {
    let set = cfg.require_set()?;
    match cfg.require_plan()? {
        SamplingScheme::Dyadic { levels, density_factor } => {
            generate_dyadic(set, *levels, *density_factor).map_err(|e| block_error("plan", e))
        }
        SamplingScheme::RadialRay { anchors, radii } => {
            generate_radial_ray(anchors, radii, set.clone()).map_err(|e| block_error("plan", e))
        }
        SamplingScheme::Custom => Err(CliError::Validation(
            "plan.kind: custom plans carry no generator; use dyadic or radial_ray".into(),
        )),
    }
}

fn resolved_seed(cfg: &mut RunConfig) -> u64 {
    let seed = cfg.seed.unwrap_or(0);
    cfg.seed = Some(seed);
    seed
}

fn certify(cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let set = cfg.require_set()?.clone();
    let gauge = cfg.require_gauge()?.clone();
    write_echo(&cfg, out)?;
    let report = certify_theorem1_set(&set, &gauge).map_err(|e| block_error("gauge", e))?;
    write_json(out, "certificate.json", &report)?;
    println!(
        "certify: admissibility={} content={} pass={}",
        admissibility_str(report.admissibility),
        fmt_f64(report.content),
        report.pass
    );
    Ok(())
}

fn admissibility_str(a: Admissibility) -> &'static str {
    match a {
        Admissibility::Yes => "yes",
        Admissibility::No => "no",
        Admissibility::Unknown => "unknown",
    }
}

fn design(mut cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let grid = cfg.coverage_grid.unwrap_or(DEFAULT_COVERAGE_GRID);
    cfg.coverage_grid = Some(grid);
    write_echo(&cfg, out)?;
    let plan = build_plan(&cfg)?;
    let coverage = validate_coverage(&plan, grid).map_err(|e| block_error("coverage_grid", e))?;
    let blaschke = blaschke_sum(&plan);
    write_text(out, "plan.csv", &plan.points_csv())?;
    write_json(out, "coverage.json", &coverage)?;
    write_json(out, "blaschke.json", &blaschke)?;
    println!(
        "design: points={} uncovered_fraction={} min_count={} blaschke_total={}",
        plan.len(),
        fmt_f64(coverage.uncovered_fraction),
        coverage.min_count,
        fmt_f64(blaschke.total)
    );
    Ok(())
}

fn separation(cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let f = cfg.require_model()?.clone();
    let g = cfg.require_model_b()?.clone();
    write_echo(&cfg, out)?;
    let plan = build_plan(&cfg)?;
    let series = separation_sum(&f, &g, &plan, plan.len()).map_err(field_error)?;
    write_json(out, "separation.json", &series)?;
    let mut csv = String::from("n,partial_sum\n");
    for (i, s) in series.partial_sums.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, fmt_f64(*s)));
    }
    write_text(out, "separation.csv", &csv)?;
    println!(
        "separation: n={} slope={} verdict={:?}",
        series.partial_sums.len(),
        fmt_f64(series.slope),
        series.verdict
    );
    Ok(())
}

fn kakutani(mut cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let f = cfg.require_model()?.clone();
    let g = cfg.require_model_b()?.clone();
    let noise = cfg.require_noise()?.clone();
    let kcfg = cfg.kakutani.unwrap_or_default();
    cfg.kakutani = Some(kcfg);
    let plan = build_plan(&cfg)?;
    let ladder = cfg.ladder.clone().unwrap_or_else(|| default_ladder(plan.len()));
    cfg.ladder = Some(ladder.clone());
    write_echo(&cfg, out)?;
    let report = kakutani_product(&f, &g, &plan, &noise, &ladder, &kcfg).map_err(field_error)?;
    write_json(out, "kakutani.json", &report)?;
    write_text(out, "kakutani_factors.csv", &report.per_factor_csv())?;
    let last = report.ladder.last().expect("ladder is nonempty");
    println!(
        "kakutani: n={} log_affinity={} classification={:?}",
        last.n,
        fmt_f64(last.log_affinity),
        report.classification
    );
    Ok(())
}

// quartile checkpoints of the plan length, deduplicated
fn default_ladder(n: usize) -> Vec<usize> {
    let mut ladder: Vec<usize> = [n / 4, n / 2, 3 * n / 4, n].into_iter().filter(|&k| k > 0).collect();
    ladder.dedup();
    ladder
}

fn simulate(mut cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let model = cfg.require_model()?.clone();
    let noise = cfg.require_noise()?.clone();
    let seed = resolved_seed(&mut cfg);
    write_echo(&cfg, out)?;
    let plan = build_plan(&cfg)?;
    let obs = simulate_observations(&model, &plan, &noise, seed).map_err(field_error)?;
    write_text(out, "observations.csv", &obs.pairs_csv())?;
    println!("simulate: observations={} seed={seed}", obs.len());
    Ok(())
}

fn load_observations(cfg: &RunConfig, seed: u64) -> Result<ObservationSeries, CliError> {
    if let Some(path) = &cfg.observations {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("observations: cannot read {}: {e}", path.display()))
        })?;
        let pairs =
            ObservationSeries::pairs_from_csv(&text).map_err(|e| block_error("observations", e))?;
        let noise = cfg.noise.clone().unwrap_or(NoiseModel::NoNoise);
        Ok(ObservationSeries { pairs, noise, seed })
    } else {
        let model = cfg.require_model()?;
        let noise = cfg.require_noise()?;
        let plan = build_plan(cfg)?;
        simulate_observations(model, &plan, noise, seed).map_err(field_error)
    }
}

fn fit(mut cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let fit_cfg = cfg.fit.unwrap_or_default();
    cfg.fit = Some(fit_cfg);
    let seed = resolved_seed(&mut cfg);
    write_echo(&cfg, out)?;
    let obs = load_observations(&cfg, seed)?;
    let result = fit_model(&obs, &fit_cfg).map_err(|e| block_error("fit", e))?;
    write_json(out, "fit.json", &result)?;
    let mut csv = String::from("j,re,im\n");
    if let AnalyticModel::TaylorPolynomial { coefficients } = &result.model {
        for (j, c) in coefficients.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", j, fmt_f64(c.re), fmt_f64(c.im)));
        }
    }
    write_text(out, "fit_coefficients.csv", &csv)?;
    println!(
        "fit: observations={} residual_norm={} penalty={}",
        obs.len(),
        fmt_f64(result.residual_norm),
        fmt_f64(result.penalty_value)
    );
    Ok(())
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn experiment(mut cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let model = cfg.require_model()?.clone();
    let noise = cfg.require_noise()?.clone();
    let fit_cfg = cfg.fit.unwrap_or_default();
    cfg.fit = Some(fit_cfg);
    let ladder = cfg
        .ladder
        .clone()
        .ok_or_else(|| CliError::Validation("ladder: required by this command".into()))?;
    let seeds = cfg
        .seeds
        .clone()
        .ok_or_else(|| CliError::Validation("seeds: required by this command".into()))?;
    write_echo(&cfg, out)?;
    let plan = build_plan(&cfg)?;
    let report = consistency_experiment(&model, &plan, &ladder, &noise, &fit_cfg, &seeds)
        .map_err(field_error)?;
    write_json(out, "experiment.json", &report)?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut cells = String::from("n,seed,sup_error,coefficient_error,boundary_error,residual_norm,error\n");
    for c in &report.cells {
        cells.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.n,
            c.seed,
            opt(c.sup_error),
            opt(c.coefficient_error),
            opt(c.boundary_error),
            opt(c.residual_norm),
            csv_quote(c.error.as_deref().unwrap_or(""))
        ));
    }
    write_text(out, "experiment_cells.csv", &cells)?;
    write_text(out, "experiment_summary.csv", &report.summary_csv())?;
    let slope = report.slope.map(fmt_f64).unwrap_or_else(|| "none".into());
    println!("experiment: cells={} slope={slope}", report.cells.len());
    Ok(())
}

/// Combined smallness report for one boundary set.
#[derive(Debug, Serialize)]
struct MeasureReport {
    arc_count: usize,
    total_length: f64,
    admissibility: Option<Admissibility>,
    content: Option<f64>,
    content_mode: Option<ContentMode>,
    capacity: Option<CapacityResult>,
}

fn measure(mut cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let set = cfg.require_set()?.clone();
    if cfg.gauge.is_none() && cfg.capacity.is_none() {
        return Err(CliError::Validation(
            "gauge: measure needs a gauge block, a capacity block, or both".into(),
        ));
    }
    let mode = if cfg.gauge.is_some() {
        let m = cfg.content_mode.unwrap_or(ContentMode::ExactDp);
        cfg.content_mode = Some(m);
        Some(m)
    } else {
        None
    };
    write_echo(&cfg, out)?;
    let arcs = set.realize().map_err(|e| block_error("set", e))?;
    let mut report = MeasureReport {
        arc_count: arcs.len(),
        total_length: arcs.iter().map(|a| a.length()).sum(),
        admissibility: None,
        content: None,
        content_mode: mode,
        capacity: None,
    };
    if let Some(gauge) = &cfg.gauge {
        report.admissibility = Some(gauge.admissibility());
        report.content = Some(
            hausdorff_content(&set, gauge, mode.expect("mode set with gauge"))
                .map_err(|e| block_error("gauge", e))?,
        );
    }
    if let Some(spec) = &cfg.capacity {
        report.capacity = Some(
            alpha_capacity(&set, spec.alpha, spec.grid, spec.kernel, &spec.solver())
                .map_err(|e| block_error("capacity", e))?,
        );
    }
    write_json(out, "measure.json", &report)?;
    let content = report.content.map(fmt_f64).unwrap_or_else(|| "none".into());
    let capacity =
        report.capacity.as_ref().map(|c| fmt_f64(c.capacity)).unwrap_or_else(|| "none".into());
    println!("measure: arcs={} content={content} capacity={capacity}", report.arc_count);
    Ok(())
}

fn formats(cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    write_echo(&cfg, out)?;
    write_text(out, "DATA_FORMATS.md", &data_formats_doc())?;
    println!("formats: wrote DATA_FORMATS.md");
    Ok(())
}

fn data_formats_doc() -> String {
    let mut doc = String::new();
    doc.push_str(
        "# Artifact reference\n\n\
         Generated by `hd formats`. Every command writes its artifacts into the\n\
         directory given by `--out` (default `hd-out`), never anywhere else, and\n\
         always starts with `effective_config.json`: the input configuration with\n\
         every consulted default made explicit, sufficient to reproduce the run.\n\n\
         ## Conventions\n\n\
         - Floating-point values in CSV files carry 17 significant digits, so a\n\
           round trip through text is bit-exact and repeated runs diff byte-equal.\n\
         - JSON configs declare `\"schema\": \"hd-config/1\"`. Unknown keys are\n\
           rejected. Validation messages name the failing field (`noise.sigma`).\n\
         - Exit codes: 0 success, 2 invalid configuration or I/O problem,\n\
           3 numeric failure (optimizer nonconvergence, rank-deficient fit).\n\
         - `HD_LOG` controls log verbosity (`error`..`trace`);\n\
           `--seed` overrides the config seed; `--threads` caps workers.\n\n\
         ## Configuration blocks\n\n\
         | block | used by | content |\n\
         |---|---|---|\n\
         | `set` | certify, design, separation, kakutani, simulate, fit, experiment, measure | boundary set: `{\"kind\":\"arc_union\",\"arcs\":[{\"start\":s,\"length\":l},..]}` or `{\"kind\":\"cantor_set\",\"base\":arc,\"ratio\":r,\"depth\":d}` |\n\
         | `gauge` | certify, measure | `{\"kind\":\"power\",\"beta\":b}`, `{\"kind\":\"t_log\"}`, or `{\"kind\":\"custom\",\"table\":[[t,h],..]}` |\n\
         | `plan` | design, separation, kakutani, simulate, fit, experiment | `{\"kind\":\"dyadic\",\"levels\":m,\"density_factor\":d}` or `{\"kind\":\"radial_ray\",\"anchors\":[..],\"radii\":[..]}` |\n\
         | `model`, `model_b` | separation, kakutani, simulate, fit, experiment | `{\"kind\":\"taylor_polynomial\",\"coefficients\":[[re,im],..]}`, `{\"kind\":\"rational_function\",..}`, or `{\"kind\":\"finite_blaschke\",..}` |\n\
         | `noise` | kakutani, simulate, fit, experiment | `{\"kind\":\"gaussian\",\"sigma\":s}`, `{\"kind\":\"uniform_disk\",\"radius\":r}`, `{\"kind\":\"grid_density\",\"cell\":c,\"side\":k,\"weights\":[..]}`, `{\"kind\":\"no_noise\"}` |\n\
         | `fit` | fit, experiment | `{\"degree\":d,\"lambda\":l,\"alpha\":a,\"validation_fraction\":v}` |\n\
         | `ladder`, `seeds` | kakutani (ladder), experiment (both) | strictly increasing prefix lengths; seed list |\n\
         | `capacity` | measure | `{\"alpha\":a,\"grid\":n,\"kernel\":\"angular\"|\"chordal\",\"gap_tolerance\":t,\"max_iterations\":m}` |\n\
         | `content_mode` | measure | `\"exact_dp\"`, `\"greedy\"`, or `\"brute_force\"` |\n\
         | `kakutani` | kakutani | `{\"orthogonal_log_threshold\":t,\"equivalent_cauchy_tolerance\":e}` |\n\
         | `coverage_grid` | design | probe count for coverage validation (default 1024) |\n\
         | `observations` | fit | path to an observations CSV to fit instead of simulating |\n\n\
         ## Artifacts by command\n\n\
         ### certify\n\n\
         - `certificate.json`: admissibility (`yes`/`no`/`unknown`), gauge echo,\n\
           content lower bound, pass flag (content above the positivity floor),\n\
           arc count, total length.\n\n\
         ### design\n\n\
         - `plan.csv`: columns `index,re,im`, one sample point per row.\n\
         - `coverage.json`: probe grid size, per-probe nontangential hit counts,\n\
           minimum count, threshold, uncovered fraction.\n\
         - `blaschke.json`: total of 1-|z| over the plan, per-level sums, trend\n\
           verdict (`divergent_trend` is the well-designed case).\n\n\
         ### separation\n\n\
         - `separation.json`: partial sums of |f-g|^2 along the plan, log-log\n\
           slope over the tail, trend verdict.\n\
         - `separation.csv`: columns `n,partial_sum`.\n\n\
         ### kakutani\n\n\
         - `kakutani.json`: ladder checkpoints `{n, affinity, log_affinity}`,\n\
           per-factor affinities, `hit_zero` flag, classification\n\
           (`orthogonal_evidence` / `equivalent_evidence` / `inconclusive`).\n\
         - `kakutani_factors.csv`: columns `k,affinity,log_affinity`.\n\n\
         ### simulate\n\n\
         - `observations.csv`: columns `n,re_z,im_z,re_x,im_x`.\n\n\
         ### fit\n\n\
         - `fit.json`: fitted Taylor coefficients, residual norm, penalty value\n\
           (lambda times the exact Dirichlet energy), validation curve when\n\
           degree selection was active.\n\
         - `fit_coefficients.csv`: columns `j,re,im`.\n\n\
         ### experiment\n\n\
         - `experiment.json`: every cell, per-rung medians, log-log slope.\n\
         - `experiment_cells.csv`: columns `n,seed,sup_error,coefficient_error,\n\
           boundary_error,residual_norm,error`; metric fields are empty and the\n\
           error column holds the message when a cell's fit failed.\n\
         - `experiment_summary.csv`: columns `n,successes,failures,\n\
           median_sup_error,median_coefficient_error,median_boundary_error`.\n\n\
         ### measure\n\n\
         - `measure.json`: arc count, total length, and the requested estimates:\n\
           gauge admissibility with Hausdorff content, and/or the capacity block\n\
           (capacity, minimal energy, duality gap, iterations, cells).\n",
    );
    doc
}
