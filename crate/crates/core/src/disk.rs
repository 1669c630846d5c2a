//! Geometry of the open unit disk and its boundary circle: points, arcs,
//! Stolz regions, Blaschke products, and the separation quantities built
//! from a zero sequence.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Normalizes an angle into [-pi, pi).
pub fn normalize_angle(theta: f64) -> f64 {
    let t = (theta + std::f64::consts::PI).rem_euclid(TAU);
    t - std::f64::consts::PI
}

/// Chordal distance |e^{ia} - e^{ib}| = 2 |sin((a-b)/2)|.
pub fn chord_distance(a: f64, b: f64) -> f64 {
    2.0 * (0.5 * (a - b)).sin().abs()
}

/// A point z with |z| < 1 strictly. Constructors reject anything on or
/// outside the unit circle, so downstream formulas never divide by 1 - |z| = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.hypot(im) < 1.0 {
            Ok(Self { re, im })
        } else {
            Err(Error::PointOutsideDisk { re, im })
        }
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn origin() -> Self {
        Self { re: 0.0, im: 0.0 }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl TryFrom<(f64, f64)> for DiskPoint {
    type Error = Error;
    fn try_from(v: (f64, f64)) -> Result<Self> {
        Self::new(v.0, v.1)
    }
}

impl From<DiskPoint> for (f64, f64) {
    fn from(p: DiskPoint) -> Self {
        (p.re, p.im)
    }
}

/// A boundary point e^{i theta} with theta kept in [-pi, pi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct BoundaryPoint {
    theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        Self { theta: normalize_angle(theta) }
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.theta.cos(), self.theta.sin())
    }
}

impl From<f64> for BoundaryPoint {
    fn from(theta: f64) -> Self {
        Self::new(theta)
    }
}

impl From<BoundaryPoint> for f64 {
    fn from(y: BoundaryPoint) -> f64 {
        y.theta
    }
}

/// A closed circular arc starting at `start` and running counterclockwise
/// for `length` radians, 0 < length <= 2 pi. Arithmetic is modulo 2 pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArcRaw", into = "ArcRaw")]
pub struct Arc {
    start: f64,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct ArcRaw {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if length > 0.0 && length <= TAU {
            Ok(Self { start: normalize_angle(start), length })
        } else {
            Err(Error::InvalidArcLength(length))
        }
    }

    pub fn full_circle() -> Self {
        Self { start: -std::f64::consts::PI, length: TAU }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// End angle, not normalized (start + length, possibly beyond pi).
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn midpoint(&self) -> BoundaryPoint {
        BoundaryPoint::new(self.start + 0.5 * self.length)
    }

    /// Both endpoints included; a length-2 pi arc contains every angle.
    pub fn contains(&self, theta: f64) -> bool {
        let offset = (theta - self.start).rem_euclid(TAU);
        offset <= self.length || (TAU - offset) < 1e-15
    }

    /// The arc grown by `margin` on each side, clamped at the full circle.
    pub fn dilate(&self, margin: f64) -> Arc {
        let length = (self.length + 2.0 * margin).min(TAU);
        Arc { start: normalize_angle(self.start - margin), length }
    }
}

impl TryFrom<ArcRaw> for Arc {
    type Error = Error;
    fn try_from(raw: ArcRaw) -> Result<Self> {
        Arc::new(raw.start, raw.length)
    }
}

impl From<Arc> for ArcRaw {
    fn from(a: Arc) -> Self {
        ArcRaw { start: a.start, length: a.length }
    }
}

/// A finite ordered zero set Lambda = {z_k}, with multiplicity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ZeroSequence {
    zeros: Vec<DiskPoint>,
}

impl ZeroSequence {
    pub fn new(zeros: Vec<DiskPoint>) -> Self {
        Self { zeros }
    }

    pub fn zeros(&self) -> &[DiskPoint] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn push(&mut self, z: DiskPoint) {
        self.zeros.push(z);
    }

    /// Sum of (1 - |z_k|); finiteness of this sum over an infinite sequence
    /// is the classical condition for a nonzero bounded function with those
    /// zeros, so it is the first diagnostic on any candidate sequence.
    pub fn blaschke_sum(&self) -> f64 {
        self.zeros.iter().map(|z| 1.0 - z.modulus()).sum()
    }
}

/// Poisson kernel (1 - |z|^2) / |z - e^{it}|^2.
pub fn poisson_kernel(z: &DiskPoint, t: f64) -> f64 {
    let w = Complex64::new(t.cos(), t.sin());
    let denom = (z.to_complex() - w).norm_sqr();
    (1.0 - z.modulus().powi(2)) / denom
}

/// Nontangential (Stolz) membership in canonical normalized form:
/// |e^{i theta_y} - z/|z|| < 2 (1 - |z|). The center z = 0 belongs to every
/// cone by convention.
pub fn stolz_contains(y: &BoundaryPoint, z: &DiskPoint) -> bool {
    let r = z.modulus();
    if r == 0.0 {
        return true;
    }
    chord_distance(y.angle(), z.arg()) < 2.0 * (1.0 - r)
}

/// Alternate unnormalized form |e^{i theta_y} - z| < 2 (1 - |z|); equivalent
/// to the canonical form up to absolute constants.
pub fn stolz_contains_unnormalized(y: &BoundaryPoint, z: &DiskPoint) -> bool {
    let d = (y.to_complex() - z.to_complex()).norm();
    d < 2.0 * (1.0 - z.modulus())
}

/// The boundary arc C(z) = { w : |w| = 1, |w - z| <= 2 (1 - |z|) }, centered
/// at the radial projection of z. For |z| <= 1/3 the chord condition admits
/// the whole circle and the arc has length exactly 2 pi.
pub fn boundary_arc(z: &DiskPoint) -> Result<Arc> {
    let r = z.modulus();
    if r == 0.0 {
        return Err(Error::DegenerateCenter);
    }
    // |e^{i phi} - z|^2 = 1 + r^2 - 2 r cos(phi - arg z) <= 4 (1 - r)^2
    let c = (1.0 + r * r - 4.0 * (1.0 - r).powi(2)) / (2.0 * r);
    let half_angle = c.clamp(-1.0, 1.0).acos();
    Arc::new(z.arg() - half_angle, 2.0 * half_angle)
}

pub(crate) fn blaschke_eval(zeros: &ZeroSequence, z: Complex64) -> Complex64 {
    let mut product = Complex64::new(1.0, 0.0);
    for w in zeros.zeros() {
        let a = w.to_complex();
        let r = w.modulus();
        if r == 0.0 {
            product *= z;
        } else {
            product *= (r / a) * (a - z) / (1.0 - a.conj() * z);
        }
    }
    product
}

/// Finite Blaschke product prod_k (|a_k|/a_k) (a_k - z)/(1 - conj(a_k) z),
/// with zeros at the origin contributing a plain factor z. |result| <= 1
/// inside the disk.
pub fn blaschke_product(zeros: &ZeroSequence, z: &DiskPoint) -> Complex64 {
    blaschke_eval(zeros, z.to_complex())
}

/// rho_sigma(xi, Lambda) = min over z in Lambda of |xi - z| / (1 - |z|)^sigma.
pub fn rho_sigma(xi: &BoundaryPoint, zeros: &ZeroSequence, sigma: f64) -> Result<f64> {
    if zeros.is_empty() {
        return Err(Error::EmptyInput("rho_sigma needs at least one zero"));
    }
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "sigma",
            message: format!("must be positive, got {sigma}"),
        });
    }
    let xi_c = xi.to_complex();
    let mut best = f64::INFINITY;
    for w in zeros.zeros() {
        let val = (xi_c - w.to_complex()).norm() / (1.0 - w.modulus()).powf(sigma);
        best = best.min(val);
    }
    Ok(best)
}

/// v(z) = sum_n (1 - |z|^2) (1 - |w_n|) / |z - w_n/|w_n||^exponent, the
/// comparison series controlling log|B| from below under radial separation.
/// The exponent is 1 or 2 (default in callers: 2).
pub fn v_function(zeros: &ZeroSequence, z: &DiskPoint, exponent: f64) -> Result<f64> {
    if zeros.is_empty() {
        return Err(Error::EmptyInput("v_function needs at least one zero"));
    }
    if exponent != 1.0 && exponent != 2.0 {
        return Err(Error::InvalidParameter {
            field: "exponent",
            message: format!("must be 1 or 2, got {exponent}"),
        });
    }
    let zc = z.to_complex();
    let lead = 1.0 - z.modulus().powi(2);
    let mut total = 0.0;
    for w in zeros.zeros() {
        let r = w.modulus();
        if r == 0.0 {
            return Err(Error::OriginZero);
        }
        let projection = w.to_complex() / r;
        let dist = (zc - projection).norm();
        total += lead * (1.0 - r) / dist.powf(exponent);
    }
    Ok(total)
}

/// Angular half-width of the Stolz cone of y at radius r: offsets phi with
/// 2 |sin(phi/2)| < 2 (1 - r).
pub(crate) fn stolz_cone_half_width(r: f64) -> f64 {
    2.0 * (1.0 - r).min(1.0).asin()
}

/// Deterministic probe maximum of u(z)/g(1 - |z|) over the Stolz region of y:
/// dyadic radii 1 - 2^{-m} for m = 1..radial_levels, 17 angular offsets per
/// level spread across the cone width. A lower bound for the true supremum;
/// levels past 50 are skipped because 1 - 2^{-m} rounds onto the boundary.
pub fn nontangential_sup(
    u: impl Fn(&DiskPoint) -> f64,
    g: impl Fn(f64) -> f64,
    y: &BoundaryPoint,
    radial_levels: u32,
) -> f64 {
    const OFFSETS_PER_SIDE: i32 = 8;
    let mut best = 0.0f64;
    for m in 1..=radial_levels.min(50) {
        let r = 1.0 - 0.5f64.powi(m as i32);
        let width = stolz_cone_half_width(r) * (1.0 - 1e-9);
        for k in -OFFSETS_PER_SIDE..=OFFSETS_PER_SIDE {
            let phi = width * k as f64 / OFFSETS_PER_SIDE as f64;
            let z = DiskPoint::from_polar(r, y.angle() + phi)
                .expect("dyadic probe radius is below 1");
            best = best.max(u(&z) / g(1.0 - z.modulus()));
        }
    }
    best
}
