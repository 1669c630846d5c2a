//! Analytic models on the disk, their boundary traces, and the smoothness
//! functionals attached to them: weighted Dirichlet energy, Besov norms,
//! dyadic maximal functions, and discrete Poisson extension.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::disk::{blaschke_eval, poisson_kernel, DiskPoint, ZeroSequence, TAU};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, polynomial_roots, CompensatedSum};
use crate::serialize::{fmt_f64, parse_f64, split_fields};

/// Poles of a rational model must satisfy |pole| > 1 + POLE_MARGIN.
pub const POLE_MARGIN: f64 = 1e-6;

const UNIMODULAR_TOL: f64 = 1e-12;

fn horner(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coefficients.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn horner_derivative(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, c) in coefficients.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * j as f64;
    }
    acc
}

/// A bounded analytic function on the disk in one of three closed forms.
/// Construct through the checked constructors or call `validate` after
/// deserializing; evaluation assumes the invariants hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticModel {
    /// f(z) = sum_j c_j z^j.
    TaylorPolynomial { coefficients: Vec<Complex64> },
    /// f(z) = p(z)/q(z) with every root of q strictly outside the closed disk.
    RationalFunction { numerator: Vec<Complex64>, denominator: Vec<Complex64> },
    /// f(z) = c B(z) with |c| = 1 and B the Blaschke product over `zeros`.
    FiniteBlaschke { zeros: ZeroSequence, constant: Complex64 },
}

impl AnalyticModel {
    pub fn taylor(coefficients: Vec<Complex64>) -> Result<Self> {
        let m = Self::TaylorPolynomial { coefficients };
        m.validate()?;
        Ok(m)
    }

    pub fn rational(numerator: Vec<Complex64>, denominator: Vec<Complex64>) -> Result<Self> {
        let m = Self::RationalFunction { numerator, denominator };
        m.validate()?;
        Ok(m)
    }

    pub fn blaschke(zeros: ZeroSequence, constant: Complex64) -> Result<Self> {
        let m = Self::FiniteBlaschke { zeros, constant };
        m.validate()?;
        Ok(m)
    }

    /// Checks the structural invariants; deserialized models must pass
    /// through here before use.
    pub fn validate(&self) -> Result<()> {
        let finite = |cs: &[Complex64]| cs.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        match self {
            Self::TaylorPolynomial { coefficients } => {
                if !finite(coefficients) {
                    return Err(Error::InvalidModel("non-finite coefficient".into()));
                }
            }
            Self::RationalFunction { numerator, denominator } => {
                if !finite(numerator) || !finite(denominator) {
                    return Err(Error::InvalidModel("non-finite coefficient".into()));
                }
                if denominator.iter().all(|c| c.norm() == 0.0) {
                    return Err(Error::InvalidModel("zero denominator".into()));
                }
                for root in polynomial_roots(denominator) {
                    if root.norm() <= 1.0 + POLE_MARGIN {
                        return Err(Error::InvalidModel(format!(
                            "denominator root at ({}, {}) with modulus {} inside the pole margin",
                            root.re,
                            root.im,
                            root.norm()
                        )));
                    }
                }
            }
            Self::FiniteBlaschke { constant, .. } => {
                if (constant.norm() - 1.0).abs() > UNIMODULAR_TOL {
                    return Err(Error::InvalidModel(format!(
                        "leading constant has modulus {}, expected 1",
                        constant.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn eval_complex(&self, z: Complex64) -> Complex64 {
        match self {
            Self::TaylorPolynomial { coefficients } => horner(coefficients, z),
            Self::RationalFunction { numerator, denominator } => {
                horner(numerator, z) / horner(denominator, z)
            }
            Self::FiniteBlaschke { zeros, constant } => constant * blaschke_eval(zeros, z),
        }
    }

    pub fn evaluate(&self, z: &DiskPoint) -> Complex64 {
        self.eval_complex(z.to_complex())
    }

    /// Trace value at e^{i theta}; well defined for all three forms because
    /// poles sit outside the closed disk.
    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        self.eval_complex(Complex64::from_polar(1.0, theta))
    }

    /// f'(z), by exact differentiation of the closed form.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            Self::TaylorPolynomial { coefficients } => horner_derivative(coefficients, z),
            Self::RationalFunction { numerator, denominator } => {
                let p = horner(numerator, z);
                let q = horner(denominator, z);
                let dp = horner_derivative(numerator, z);
                let dq = horner_derivative(denominator, z);
                (dp * q - p * dq) / (q * q)
            }
            Self::FiniteBlaschke { zeros, constant } => {
                // product rule over the factors, tracking (value, derivative)
                let mut value = *constant;
                let mut deriv = Complex64::new(0.0, 0.0);
                for w in zeros.zeros() {
                    let (fv, fd) = blaschke_factor_and_derivative(w, z);
                    deriv = deriv * fv + value * fd;
                    value *= fv;
                }
                deriv
            }
        }
    }
}

fn blaschke_factor_and_derivative(w: &DiskPoint, z: Complex64) -> (Complex64, Complex64) {
    let r = w.modulus();
    if r == 0.0 {
        return (z, Complex64::new(1.0, 0.0));
    }
    let a = w.to_complex();
    let rot = r / a;
    let denom = 1.0 - a.conj() * z;
    let value = rot * (a - z) / denom;
    let deriv = rot * (r * r - 1.0) / (denom * denom);
    (value, deriv)
}

/// Numeric Taylor coefficients c_0..c_{count-1} via a discrete contour
/// integral on |z| = 0.8. Exact for polynomial models; for the others the
/// rounding error grows like 0.8^{-j}, so keep the count moderate.
pub fn taylor_coefficients(model: &AnalyticModel, count: usize) -> Vec<Complex64> {
    if let AnalyticModel::TaylorPolynomial { coefficients } = model {
        let mut out = coefficients.clone();
        out.resize(count, Complex64::new(0.0, 0.0));
        out.truncate(count);
        return out;
    }
    let rho = 0.8f64;
    let m = (8 * count.max(1)).next_power_of_two().max(4096);
    let samples: Vec<Complex64> = (0..m)
        .map(|k| model.eval_complex(Complex64::from_polar(rho, TAU * k as f64 / m as f64)))
        .collect();
    (0..count)
        .map(|j| {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for (k, s) in samples.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -TAU * (j * k % m) as f64 / m as f64);
                let term = s * phase;
                re.add(term.re);
                im.add(term.im);
            }
            Complex64::new(re.value(), im.value()) / (m as f64 * rho.powi(j as i32))
        })
        .collect()
}

/// A fixed reference family of seven bounded models (polynomials through
/// degree six, two rationals, one Blaschke product) used by the pairwise
/// separation and dichotomy experiments.
pub fn stock_models() -> Vec<AnalyticModel> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let zeros = ZeroSequence::new(vec![
        DiskPoint::new(0.5, 0.0).expect("inside the disk"),
        DiskPoint::new(-0.3, 0.2).expect("inside the disk"),
    ]);
    vec![
        AnalyticModel::taylor(vec![c(0.5, 0.0)]).expect("valid stock model"),
        AnalyticModel::taylor(vec![c(0.0, 0.0), c(1.0, 0.0)]).expect("valid stock model"),
        AnalyticModel::taylor(vec![c(0.3, 0.0), c(0.0, 0.0), c(0.4, 0.0)]).expect("valid stock model"),
        AnalyticModel::taylor(vec![
            c(0.0, 0.0),
            c(-0.2, 0.0),
            c(0.0, 0.0),
            c(0.25, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.1, 0.0),
        ])
        .expect("valid stock model"),
        AnalyticModel::rational(vec![c(0.5, 0.0)], vec![c(1.0, 0.0), c(-0.5, 0.0)])
            .expect("valid stock model"),
        AnalyticModel::rational(vec![c(0.2, 0.0), c(0.3, 0.0)], vec![c(1.0, 0.0), c(0.4, 0.0)])
            .expect("valid stock model"),
        AnalyticModel::blaschke(zeros, c(1.0, 0.0)).expect("valid stock model"),
    ]
}

/// Samples of a boundary function on the uniform grid theta_j = -pi + 2 pi j/N,
/// N a power of two, at least 16, all values finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct BoundaryFunction {
    values: Vec<Complex64>,
}

impl BoundaryFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter {
                field: "values",
                message: format!("grid size must be a power of two >= 16, got {n}"),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "values",
                message: "non-finite sample".into(),
            });
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..n)
            .map(|j| f(-std::f64::consts::PI + TAU * j as f64 / n as f64))
            .collect();
        Self::new(values)
    }

    pub fn from_model(model: &AnalyticModel, n: usize) -> Result<Self> {
        model.validate()?;
        Self::from_fn(n, |theta| model.boundary_value(theta))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Grid angle of sample j.
    pub fn theta(&self, j: usize) -> f64 {
        -std::f64::consts::PI + TAU * j as f64 / self.values.len() as f64
    }

    /// CSV with header `theta,re,im`, one row per grid point, floats at
    /// full precision.
    pub fn to_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "theta,re,im")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{},{}", fmt_f64(self.theta(j)), fmt_f64(v.re), fmt_f64(v.im))?;
        }
        Ok(())
    }

    pub fn from_csv(input: &mut dyn BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse {
            location: "line 1".into(),
            message: "empty file".into(),
        })??;
        if header.trim_end() != "theta,re,im" {
            return Err(Error::Parse {
                location: "line 1".into(),
                message: format!("expected header theta,re,im, got {header:?}"),
            });
        }
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let location = format!("line {}", idx + 2);
            let fields = split_fields(line, 3, &location)?;
            let theta = parse_f64(fields[0], &location)?;
            let re = parse_f64(fields[1], &location)?;
            let im = parse_f64(fields[2], &location)?;
            rows.push((theta, Complex64::new(re, im)));
        }
        let n = rows.len();
        let parsed = Self::new(rows.iter().map(|r| r.1).collect())?;
        for (j, row) in rows.iter().enumerate() {
            let expected = -std::f64::consts::PI + TAU * j as f64 / n as f64;
            if (row.0 - expected).abs() > 1e-9 {
                return Err(Error::Parse {
                    location: format!("line {}", j + 2),
                    message: format!("theta {} off the uniform grid (expected {expected})", row.0),
                });
            }
        }
        Ok(parsed)
    }

    fn decimate(&self, step: usize) -> Vec<Complex64> {
        self.values.iter().step_by(step).copied().collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for BoundaryFunction {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
    }
}

impl From<BoundaryFunction> for Vec<(f64, f64)> {
    fn from(f: BoundaryFunction) -> Self {
        f.values.into_iter().map(|v| (v.re, v.im)).collect()
    }
}

/// Panel layout for disk integrals: `nodes` Gauss-Legendre points per radial
/// panel, geometric panels [1-2^{-k}, 1-2^{-k-1}] down to `depth`, and a
/// power-of-two trapezoid rule with `angular_nodes` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub depth: usize,
    pub angular_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 32, depth: 20, angular_nodes: 512 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::InvalidParameter {
                field: "nodes",
                message: format!("need at least 8 radial nodes, got {}", self.nodes),
            });
        }
        if self.depth == 0 || self.depth > 20 {
            return Err(Error::InvalidParameter {
                field: "depth",
                message: format!("depth must be in 1..=20, got {}", self.depth),
            });
        }
        if self.angular_nodes < 32 || !self.angular_nodes.is_power_of_two() {
            return Err(Error::InvalidParameter {
                field: "angular_nodes",
                message: format!("need a power of two >= 32, got {}", self.angular_nodes),
            });
        }
        Ok(())
    }
}

/// Which evaluation path `dirichlet_energy` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyRoute {
    /// Coefficient formula; polynomial models only.
    Exact,
    /// Panelized disk quadrature; any model.
    Quadrature,
}

/// Weight of |c_j|^2 in the energy: 2 pi j^2 B(2j, alpha+1), with w_0 = 0.
pub fn dirichlet_weight(j: usize, alpha: f64) -> f64 {
    if j == 0 {
        return 0.0;
    }
    TAU * (j * j) as f64 * ln_beta(2.0 * j as f64, alpha + 1.0).exp()
}

/// Weighted Dirichlet energy of the derivative over the disk with weight
/// (1 - |z|)^alpha and area measure; for f(z) = sum c_j z^j this equals
/// sum_j |c_j|^2 2 pi j^2 B(2j, alpha+1).
pub fn dirichlet_energy(
    model: &AnalyticModel,
    alpha: f64,
    route: EnergyRoute,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter {
            field: "alpha",
            message: format!("must lie in [0, 1), got {alpha}"),
        });
    }
    match route {
        EnergyRoute::Exact => match model {
            AnalyticModel::TaylorPolynomial { coefficients } => {
                let mut sum = CompensatedSum::new();
                for (j, c) in coefficients.iter().enumerate() {
                    sum.add(c.norm_sqr() * dirichlet_weight(j, alpha));
                }
                Ok(sum.value())
            }
            _ => Err(Error::InvalidModel(
                "exact energy route needs a polynomial model; use the quadrature route".into(),
            )),
        },
        EnergyRoute::Quadrature => {
            quad.validate()?;
            let rule = gauss_legendre(quad.nodes);
            let m = quad.angular_nodes;
            let mut total = CompensatedSum::new();
            let mut add_panel = |a: f64, b: f64| {
                for &(x, w) in &rule {
                    let r = 0.5 * (a + b) + 0.5 * (b - a) * x;
                    let mut ring = CompensatedSum::new();
                    for j in 0..m {
                        let theta = -std::f64::consts::PI + TAU * j as f64 / m as f64;
                        ring.add(model.derivative(Complex64::from_polar(r, theta)).norm_sqr());
                    }
                    let ring_mean = ring.value() * TAU / m as f64;
                    total.add(0.5 * (b - a) * w * (1.0 - r).powf(alpha) * r * ring_mean);
                }
            };
            for k in 0..quad.depth {
                add_panel(1.0 - 0.5f64.powi(k as i32), 1.0 - 0.5f64.powi(k as i32 + 1));
            }
            add_panel(1.0 - 0.5f64.powi(quad.depth as i32), 1.0);
            Ok(total.value())
        }
    }
}

/// Outcome of the Besov evaluation: the finest-grid value, the refinement
/// ladder behind it, and whether the refinements stopped contracting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovResult {
    /// Squared norm on the finest grid; +infinity when `diverged`.
    pub value: f64,
    pub diverged: bool,
    /// Values at N/4, N/2, N.
    pub ladder: Vec<f64>,
}

// Refinement increments must decay with order at least this, else the
// integral is treated as divergent.
const BESOV_MIN_DECAY_ORDER: f64 = 0.05;

fn besov_value(vals: &[Complex64], alpha: f64) -> f64 {
    let n = vals.len();
    let delta = TAU / n as f64;
    let mut sum = CompensatedSum::new();
    for v in vals {
        sum.add(v.norm_sqr() * delta);
    }
    // ordered pairs at lag k share the chord distance 2 sin(pi k / n)
    for k in 1..n {
        let dist = 2.0 * (std::f64::consts::PI * k as f64 / n as f64).sin();
        let weight = dist.powf(-(1.0 + 2.0 * alpha)) * delta * delta;
        let mut lag = CompensatedSum::new();
        for i in 0..n {
            lag.add((vals[i] - vals[(i + k) % n]).norm_sqr());
        }
        sum.add(weight * lag.value());
    }
    // diagonal cells, with f locally linearized at slope (f_{i+1}-f_{i-1})/(2 delta)
    let coef = 2.0 * delta.powf(3.0 - 2.0 * alpha) / ((2.0 - 2.0 * alpha) * (3.0 - 2.0 * alpha));
    for i in 0..n {
        let fp = (vals[(i + 1) % n] - vals[(i + n - 1) % n]) / (2.0 * delta);
        sum.add(coef * fp.norm_sqr());
    }
    sum.value()
}

/// Squared Besov norm: the L2 integral plus the double integral of
/// |f(x)-f(y)|^2 / |x-y|^{1+2 alpha} over the torus, both discretized on the
/// sample grid. Divergence is decided by a Cauchy test on the N/4, N/2, N
/// refinement ladder, not by the magnitude of the value.
pub fn besov_norm(f: &BoundaryFunction, alpha: f64) -> Result<BesovResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            field: "alpha",
            message: format!("must lie in (0, 1), got {alpha}"),
        });
    }
    let coarse = besov_value(&f.decimate(4), alpha);
    let mid = besov_value(&f.decimate(2), alpha);
    let fine = besov_value(f.values(), alpha);
    let d1 = (mid - coarse).abs();
    let d2 = (fine - mid).abs();
    let tiny = 1e-9 * fine.abs().max(1.0);
    let diverged = d2 > tiny && d2 > d1 * 0.5f64.powf(BESOV_MIN_DECAY_ORDER);
    Ok(BesovResult {
        value: if diverged { f64::INFINITY } else { fine },
        diverged,
        ladder: vec![coarse, mid, fine],
    })
}

/// Dyadic maximal function: at each grid point, the largest average of |f|
/// over centered windows of width 2 pi 2^{-j}, j = 0..log2(N). Averages use
/// exact cell overlaps, so constants are reproduced exactly.
pub fn maximal_function(f: &BoundaryFunction) -> Vec<f64> {
    let n = f.len();
    let delta = TAU / n as f64;
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    // prefix[k] = integral of |f| over the first k cells, in coordinates where
    // cell i occupies [i delta, (i+1) delta)
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + abs[i] * delta;
    }
    let total = prefix[n];
    let upto = |s: f64| -> f64 {
        let k = ((s / delta) as usize).min(n - 1);
        prefix[k] + abs[k] * (s - k as f64 * delta).max(0.0)
    };
    let integral = |a: f64, width: f64| -> f64 {
        let a = a.rem_euclid(TAU);
        let b = a + width;
        if b <= TAU {
            upto(b) - upto(a)
        } else {
            total - upto(a) + upto(b - TAU)
        }
    };
    let levels = n.trailing_zeros();
    (0..n)
        .map(|k| {
            // cell k center in shifted coordinates
            let center = (k as f64 + 0.5) * delta;
            let mut best = 0.0f64;
            for j in 0..=levels {
                let width = TAU * 0.5f64.powi(j as i32);
                best = best.max(integral(center - 0.5 * width, width) / width);
            }
            best
        })
        .collect()
}

/// Discrete Poisson extension: kernel-weighted average of the samples with
/// the weights renormalized to sum to one, so constants extend exactly.
/// Rejects |z| > 1 - 1e-6, where the grid no longer resolves the kernel.
pub fn poisson_extend(f: &BoundaryFunction, z: &DiskPoint) -> Result<Complex64> {
    let limit = 1.0 - 1e-6;
    if z.modulus() > limit {
        return Err(Error::TooCloseToBoundary { modulus: z.modulus(), limit });
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (j, v) in f.values().iter().enumerate() {
        let p = poisson_kernel(z, f.theta(j));
        re.add(p * v.re);
        im.add(p * v.im);
        den.add(p);
    }
    Ok(Complex64::new(re.value(), im.value()) / den.value())
}
