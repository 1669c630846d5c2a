//! Gauge functions, boundary sets, and the geometric side of the uniqueness
//! certificates: generalized Hausdorff content by optimal arc covers and
//! Riesz capacity by energy minimization over discrete measures.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::disk::{normalize_angle, Arc, TAU};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, CompensatedSum};

/// Content below this floor is treated as zero when issuing a certificate.
pub const CONTENT_FLOOR: f64 = 1e-9;

const EXACT_DP_MAX_ARCS: usize = 1 << 14;
const GREEDY_MAX_ARCS: usize = 1 << 20;
const BRUTE_MAX_ARCS: usize = 10;
const CANTOR_MAX_DEPTH: usize = 20;
const CAPACITY_MAX_CELLS: usize = 8192;

/// A nondecreasing cover gauge h with h(0+) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeFunction {
    /// h(t) = t^beta, beta > 0.
    Power { beta: f64 },
    /// h(t) = t log(1/t) up to t = 1/e, clamped at 1/e beyond to stay monotone.
    TLog,
    /// Piecewise-linear table of (t, h) pairs, extended linearly to 0 on the
    /// left and clamped on the right.
    Custom { table: Vec<(f64, f64)> },
}

/// Whether a gauge passes the decay probe required by the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    Yes,
    No,
    Unknown,
}

// Decay probe: r_j = h(2^-j) / (2^-j j log 2) sampled down to j = 40. The
// gauge qualifies when the ratios do not increase and either end below
// PROBE_CLEAR or keep contracting by PROBE_DECAY over the second half;
// ratios that stall above PROBE_STALL of the midpoint are rejected.
const PROBE_DEPTH: i32 = 40;
const PROBE_CLEAR: f64 = 1e-2;
const PROBE_DECAY: f64 = 2.0 / 3.0;
const PROBE_STALL: f64 = 0.9;
const PROBE_MIN_SAMPLES: usize = 8;

impl GaugeFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { beta } => {
                if !beta.is_finite() || *beta <= 0.0 {
                    return Err(Error::InvalidParameter {
                        field: "beta",
                        message: format!("must be positive and finite, got {beta}"),
                    });
                }
            }
            Self::TLog => {}
            Self::Custom { table } => {
                if table.len() < 2 {
                    return Err(Error::InvalidParameter {
                        field: "table",
                        message: "need at least two points".into(),
                    });
                }
                for w in table.windows(2) {
                    if !(w[0].0 > 0.0 && w[1].0 > w[0].0) {
                        return Err(Error::InvalidParameter {
                            field: "table",
                            message: "abscissae must be positive and strictly increasing".into(),
                        });
                    }
                    if !(w[0].1 >= 0.0 && w[1].1 >= w[0].1) {
                        return Err(Error::InvalidParameter {
                            field: "table",
                            message: "values must be nonnegative and nondecreasing".into(),
                        });
                    }
                }
                let last = table[table.len() - 1];
                if !last.0.is_finite() || !last.1.is_finite() {
                    return Err(Error::InvalidParameter {
                        field: "table",
                        message: "non-finite entry".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { beta } => t.powf(*beta),
            Self::TLog => {
                let cap = std::f64::consts::E.recip();
                if t >= cap {
                    cap
                } else {
                    t * (1.0 / t).ln()
                }
            }
            Self::Custom { table } => {
                let (t0, h0) = table[0];
                if t <= t0 {
                    return h0 * t / t0;
                }
                let (tn, hn) = table[table.len() - 1];
                if t >= tn {
                    return hn;
                }
                let i = table.partition_point(|p| p.0 <= t) - 1;
                let (ta, ha) = table[i];
                let (tb, hb) = table[i + 1];
                ha + (hb - ha) * (t - ta) / (tb - ta)
            }
        }
    }

    /// Dyadic decay probe deciding whether the gauge dominates t log(1/t)
    /// strongly enough for the certificate. Custom tables are probed only
    /// inside their tabulated range; too few probes give `Unknown`.
    pub fn admissibility(&self) -> Admissibility {
        let range = match self {
            Self::Custom { table } => Some((table[0].0, table[table.len() - 1].0)),
            _ => None,
        };
        let mut ratios = Vec::new();
        for j in 1..=PROBE_DEPTH {
            let t = 0.5f64.powi(j);
            if let Some((lo, hi)) = range {
                if t < lo || t > hi {
                    continue;
                }
            }
            ratios.push(self.eval(t) / (t * j as f64 * std::f64::consts::LN_2));
        }
        if ratios.len() < PROBE_MIN_SAMPLES {
            return Admissibility::Unknown;
        }
        let nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
        let first = ratios[0];
        let mid = ratios[ratios.len() / 2];
        let last = ratios[ratios.len() - 1];
        if !nonincreasing {
            if last > first * 1.05 {
                return Admissibility::No;
            }
            return Admissibility::Unknown;
        }
        if last < PROBE_CLEAR {
            return Admissibility::Yes;
        }
        if mid > 0.0 && last <= PROBE_DECAY * mid {
            return Admissibility::Yes;
        }
        if last >= PROBE_STALL * mid {
            return Admissibility::No;
        }
        Admissibility::Unknown
    }

    fn describe(&self) -> String {
        match self {
            Self::Power { beta } => format!("t^{beta}"),
            Self::TLog => "t log(1/t)".into(),
            Self::Custom { table } => format!("table with {} points", table.len()),
        }
    }
}

/// A closed subset of the circle given as finitely many arcs, either listed
/// directly or produced by a Cantor construction inside a base arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundarySet {
    ArcUnion { arcs: Vec<Arc> },
    /// `depth` splitting rounds keeping a `ratio` fraction at both ends of
    /// every arc, yielding 2^depth arcs.
    CantorSet { base: Arc, ratio: f64, depth: usize },
}

fn normalize_arcs(arcs: &[Arc]) -> Vec<Arc> {
    if arcs.is_empty() {
        return Vec::new();
    }
    let mut iv: Vec<(f64, f64)> = arcs.iter().map(|a| (a.start(), a.start() + a.length())).collect();
    iv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, e) in iv {
        match merged.last_mut() {
            Some(last) if s <= last.1 + 1e-12 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    // an interval reaching past pi may wrap onto the first one
    if merged.len() > 1 {
        let (ls, le) = *merged.last().unwrap();
        if le - TAU >= merged[0].0 - 1e-12 {
            merged.pop();
            merged[0].0 = merged[0].0.min(ls - TAU);
            merged[0].1 = merged[0].1.max(le - TAU);
        }
    }
    let total: f64 = merged.iter().map(|(s, e)| e - s).sum();
    if merged.len() == 1 && total >= TAU - 1e-12 {
        return vec![Arc::full_circle()];
    }
    merged
        .into_iter()
        .map(|(s, e)| Arc::new(s, (e - s).min(TAU)).expect("normalized arcs keep positive length"))
        .collect()
}

impl BoundarySet {
    /// Union of arcs, overlaps and touching endpoints merged.
    pub fn arc_union(arcs: Vec<Arc>) -> Self {
        Self::ArcUnion { arcs: normalize_arcs(&arcs) }
    }

    pub fn cantor(base: Arc, ratio: f64, depth: usize) -> Result<Self> {
        let set = Self::CantorSet { base, ratio, depth };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ArcUnion { .. } => Ok(()),
            Self::CantorSet { ratio, depth, .. } => {
                if !(*ratio > 0.0 && *ratio < 0.5) {
                    return Err(Error::InvalidParameter {
                        field: "ratio",
                        message: format!("must lie in (0, 1/2), got {ratio}"),
                    });
                }
                if *depth == 0 || *depth > CANTOR_MAX_DEPTH {
                    return Err(Error::InvalidParameter {
                        field: "depth",
                        message: format!("must lie in 1..={CANTOR_MAX_DEPTH}, got {depth}"),
                    });
                }
                Ok(())
            }
        }
    }

    /// The set as disjoint arcs sorted by start angle.
    pub fn realize(&self) -> Result<Vec<Arc>> {
        self.validate()?;
        match self {
            Self::ArcUnion { arcs } => Ok(normalize_arcs(arcs)),
            Self::CantorSet { base, ratio, depth } => {
                let mut intervals = vec![(base.start(), base.length())];
                for _ in 0..*depth {
                    let mut next = Vec::with_capacity(intervals.len() * 2);
                    for (s, len) in intervals {
                        let keep = len * ratio;
                        next.push((s, keep));
                        next.push((s + len - keep, keep));
                    }
                    intervals = next;
                }
                Ok(intervals
                    .into_iter()
                    .map(|(s, len)| Arc::new(s, len).expect("cantor pieces keep positive length"))
                    .collect())
            }
        }
    }

    pub fn total_length(&self) -> Result<f64> {
        Ok(self.realize()?.iter().map(Arc::length).sum())
    }
}

/// Strategy for the optimal-cover search in `hausdorff_content`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentMode {
    /// Exact optimum over all covers by contiguous runs of arcs.
    ExactDp,
    /// Upper bound by locally best adjacent merges.
    Greedy,
    /// Exact enumeration of every gap subset; at most 10 arcs.
    BruteForce,
}

struct ArcLayout {
    // doubled start/end positions so spans across the wrap read directly
    start2: Vec<f64>,
    end2: Vec<f64>,
    gaps: Vec<f64>,
    k: usize,
}

fn layout(arcs: &[Arc]) -> ArcLayout {
    let k = arcs.len();
    let mut start2 = Vec::with_capacity(2 * k);
    let mut end2 = Vec::with_capacity(2 * k);
    for copy in 0..2 {
        for a in arcs {
            start2.push(a.start() + TAU * copy as f64);
            end2.push(a.start() + a.length() + TAU * copy as f64);
        }
    }
    let gaps: Vec<f64> = (0..k).map(|i| start2[i + 1] - end2[i]).collect();
    ArcLayout { start2, end2, gaps, k }
}

// Cost of the partition that cuts exactly the gaps in `cuts` (sorted).
fn partition_cost(lay: &ArcLayout, cuts: &[usize], h: &dyn Fn(f64) -> f64) -> f64 {
    let m = cuts.len();
    let mut total = 0.0;
    for i in 0..m {
        let first = cuts[i] + 1;
        let last = if i + 1 < m { cuts[i + 1] } else { cuts[0] + lay.k };
        total += h(lay.end2[last] - lay.start2[first]);
    }
    total
}

fn content_brute(lay: &ArcLayout, h: &dyn Fn(f64) -> f64) -> f64 {
    let k = lay.k;
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << k) {
        let cuts: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        best = best.min(partition_cost(lay, &cuts, h));
    }
    best
}

#[derive(PartialEq)]
struct MergeCandidate {
    delta: f64,
    cell: usize,
    left_version: u32,
    right_version: u32,
}

impl Eq for MergeCandidate {}

impl Ord for MergeCandidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; reverse for smallest delta first
        other
            .delta
            .total_cmp(&self.delta)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for MergeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn content_greedy(lay: &ArcLayout, h: &dyn Fn(f64) -> f64) -> f64 {
    let k = lay.k;
    let mut span: Vec<f64> = (0..k).map(|i| lay.end2[i] - lay.start2[i]).collect();
    let mut cost: Vec<f64> = span.iter().map(|&s| h(s)).collect();
    let mut gap_next: Vec<f64> = lay.gaps.clone();
    let mut next: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
    let mut prev: Vec<usize> = (0..k).map(|i| (i + k - 1) % k).collect();
    let mut version = vec![0u32; k];
    let mut alive = vec![true; k];
    let mut count = k;

    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<MergeCandidate>,
                i: usize,
                span: &[f64],
                cost: &[f64],
                gap_next: &[f64],
                next: &[usize],
                version: &[u32]| {
        let j = next[i];
        if j == i {
            return;
        }
        let merged = h(span[i] + gap_next[i] + span[j]);
        let delta = merged - cost[i] - cost[j];
        if delta < 0.0 {
            heap.push(MergeCandidate { delta, cell: i, left_version: version[i], right_version: version[j] });
        }
    };
    for i in 0..k {
        push(&mut heap, i, &span, &cost, &gap_next, &next, &version);
    }
    while let Some(c) = heap.pop() {
        if count <= 1 {
            break;
        }
        let i = c.cell;
        let j = next[i];
        if !alive[i] || c.left_version != version[i] || !alive[j] || c.right_version != version[j] {
            continue;
        }
        // merge j into i
        span[i] = span[i] + gap_next[i] + span[j];
        cost[i] = h(span[i]);
        gap_next[i] = gap_next[j];
        alive[j] = false;
        next[i] = next[j];
        prev[next[j]] = i;
        version[i] += 1;
        count -= 1;
        if count > 1 {
            push(&mut heap, i, &span, &cost, &gap_next, &next, &version);
            push(&mut heap, prev[i], &span, &cost, &gap_next, &next, &version);
        }
    }
    (0..k).filter(|&i| alive[i]).map(|i| cost[i]).sum()
}

// Best partition with the chain cut after gap `anchor`; aborts and returns
// None as soon as the running cost provably cannot beat `ub`.
fn anchored_chain_dp(lay: &ArcLayout, anchor: usize, ub: f64, h: &dyn Fn(f64) -> f64) -> Option<f64> {
    let k = lay.k;
    let off = anchor + 1;
    let mut d = vec![0.0f64; k + 1];
    for t in 1..=k {
        let end = lay.end2[off + t - 1];
        let mut best = f64::INFINITY;
        // u runs down; spans grow, so h(span) alone eventually dominates
        for u in (0..t).rev() {
            let span = end - lay.start2[off + u];
            let h_span = h(span);
            if h_span >= best {
                break;
            }
            let cand = d[u] + h_span;
            if cand < best {
                best = cand;
            }
        }
        if best >= ub {
            return None;
        }
        d[t] = best;
    }
    Some(d[k])
}

fn content_exact(lay: &ArcLayout, h: &dyn Fn(f64) -> f64) -> f64 {
    // greedy gives the incumbent; every anchored chain that cannot beat it
    // aborts early, and the optimum cuts at least one gap, so scanning all
    // anchors is exact
    let mut best = content_greedy(lay, h);
    let mut anchors: Vec<usize> = (0..lay.k).collect();
    anchors.sort_by(|&a, &b| lay.gaps[b].total_cmp(&lay.gaps[a]).then(a.cmp(&b)));
    for anchor in anchors {
        if let Some(v) = anchored_chain_dp(lay, anchor, best, h) {
            best = best.min(v);
        }
    }
    best
}

/// Generalized Hausdorff content: the infimum of sum h(|I_i|) over covers of
/// the set by boundary arcs. Covers by contiguous runs of the realized arcs
/// are optimal for a monotone gauge, which the search space reflects.
pub fn hausdorff_content(set: &BoundarySet, gauge: &GaugeFunction, mode: ContentMode) -> Result<f64> {
    gauge.validate()?;
    let arcs = set.realize()?;
    if arcs.is_empty() {
        return Ok(0.0);
    }
    let k = arcs.len();
    if k == 1 {
        return Ok(gauge.eval(arcs[0].length()));
    }
    let cap = match mode {
        ContentMode::ExactDp => EXACT_DP_MAX_ARCS,
        ContentMode::Greedy => GREEDY_MAX_ARCS,
        ContentMode::BruteForce => BRUTE_MAX_ARCS,
    };
    if k > cap {
        return Err(Error::SizeLimit { what: "realized arcs for content mode", got: k, cap });
    }
    let lay = layout(&arcs);
    let h = |t: f64| gauge.eval(t);
    Ok(match mode {
        ContentMode::ExactDp => content_exact(&lay, &h),
        ContentMode::Greedy => content_greedy(&lay, &h),
        ContentMode::BruteForce => content_brute(&lay, &h),
    })
}

/// Riesz kernel flavor for the capacity energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    /// |angular distance|^{-alpha}.
    Angular,
    /// |chordal distance|^{-alpha} = (2 sin(d/2))^{-alpha}.
    Chordal,
}

/// Stopping rule for the capacity solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityConfig {
    /// Relative duality-gap target.
    pub gap_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self { gap_tolerance: 1e-6, max_iterations: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// 1 / (minimal energy).
    pub capacity: f64,
    pub energy: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub cells: usize,
}

// integral of (a + b d) d^{-alpha} over [x0, x1], 0 <= x0 <= x1
fn power_piece(a: f64, b: f64, x0: f64, x1: f64, alpha: f64) -> f64 {
    let m0 = (x1.powf(1.0 - alpha) - x0.powf(1.0 - alpha)) / (1.0 - alpha);
    let m1 = (x1.powf(2.0 - alpha) - x0.powf(2.0 - alpha)) / (2.0 - alpha);
    a * m0 + b * m1
}

// hat density of the difference d = t - s over a cell pair: rises from lo,
// plateaus at wmin, falls to hi
fn hat_coeffs(d: f64, lo: f64, hi: f64, wmin: f64) -> (f64, f64) {
    let b1 = lo + wmin;
    let b2 = hi - wmin;
    if d < b1 {
        (-lo, 1.0)
    } else if d <= b2 {
        (wmin, 0.0)
    } else {
        (hi, -1.0)
    }
}

// exact double integral of |angular distance|^{-alpha} over two cells
fn angular_pair_integral(c1: f64, w1: f64, c2: f64, w2: f64, alpha: f64) -> f64 {
    let dist = normalize_angle(c2 - c1).abs();
    let half = 0.5 * (w1 + w2);
    let lo = dist - half;
    let hi = dist + half;
    let wmin = w1.min(w2);
    let mut cuts = vec![lo, lo + wmin, hi - wmin, hi];
    for extra in [0.0, std::f64::consts::PI] {
        if extra > lo && extra < hi {
            cuts.push(extra);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 <= 0.0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        let (a, b) = hat_coeffs(mid, lo, hi, wmin);
        total += if mid < 0.0 {
            // mirrored: substitute u = -d
            power_piece(a, -b, -x1, -x0, alpha)
        } else if mid > std::f64::consts::PI {
            // folded: substitute u = 2 pi - d
            power_piece(a + TAU * b, -b, TAU - x1, TAU - x0, alpha)
        } else {
            power_piece(a, b, x0, x1, alpha)
        };
    }
    total
}

// (d / (2 sin(d/2)))^alpha - 1, stable near d = 0
fn chord_correction_minus_one(d: f64, alpha: f64) -> f64 {
    if d < 1e-4 {
        let d2 = d * d;
        let base = d2 / 24.0 + 7.0 * d2 * d2 / 5760.0;
        alpha * base + 0.5 * alpha * (alpha - 1.0) * base * base
    } else {
        (d / (2.0 * (0.5 * d).sin())).powf(alpha) - 1.0
    }
}

// double integral of (2 sin(d/2))^{-alpha} over two cells; the chordal kernel
// needs no fold at pi
fn chordal_pair_integral(c1: f64, w1: f64, c2: f64, w2: f64, alpha: f64, gl: &[(f64, f64)]) -> f64 {
    let dist = normalize_angle(c2 - c1).abs();
    let half = 0.5 * (w1 + w2);
    let lo = dist - half;
    let hi = dist + half;
    let wmin = w1.min(w2);
    let mut cuts = vec![lo, lo + wmin, hi - wmin, hi];
    if 0.0 > lo && 0.0 < hi {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 <= 0.0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        let (a, b) = hat_coeffs(mid, lo, hi, wmin);
        // mirror negative d onto positive u
        let (a, b, u0, u1) = if mid < 0.0 { (a, -b, -x1, -x0) } else { (a, b, x0, x1) };
        if u0 < 1e-12 {
            // singular end: closed form for the flat-kernel part plus a
            // smooth correction integrand ~ u^{2-alpha}
            total += power_piece(a, b, u0, u1, alpha);
            for &(x, wt) in gl {
                let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x;
                let f = (a + b * u) * u.powf(-alpha) * chord_correction_minus_one(u, alpha);
                total += 0.5 * (u1 - u0) * wt * f;
            }
        } else {
            for &(x, wt) in gl {
                let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x;
                let f = (a + b * u) * (2.0 * (0.5 * u).sin()).powf(-alpha);
                total += 0.5 * (u1 - u0) * wt * f;
            }
        }
    }
    total
}

fn capacity_cells(arcs: &[Arc], grid: usize) -> Vec<(f64, f64)> {
    let total: f64 = arcs.iter().map(Arc::length).sum();
    let quotas: Vec<f64> = arcs.iter().map(|a| grid as f64 * a.length() / total).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| (q.floor() as usize).max(1)).collect();
    let assigned: usize = counts.iter().sum();
    if assigned < grid {
        let mut order: Vec<usize> = (0..arcs.len()).collect();
        order.sort_by(|&i, &j| {
            (quotas[j] - quotas[j].floor())
                .total_cmp(&(quotas[i] - quotas[i].floor()))
                .then(i.cmp(&j))
        });
        for idx in order.into_iter().cycle().take(grid - assigned) {
            counts[idx] += 1;
        }
    }
    let mut cells = Vec::new();
    for (a, &n) in arcs.iter().zip(&counts) {
        let w = a.length() / n as f64;
        for i in 0..n {
            cells.push((a.start() + (i as f64 + 0.5) * w, w));
        }
    }
    cells
}

/// Riesz alpha-capacity of the set: one over the minimal discrete energy of a
/// probability measure on at least `grid` cells, minimized by Frank-Wolfe
/// with away steps and exact line search.
pub fn alpha_capacity(
    set: &BoundarySet,
    alpha: f64,
    grid: usize,
    kernel: KernelMode,
    config: &CapacityConfig,
) -> Result<CapacityResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            field: "alpha",
            message: format!("must lie in (0, 1), got {alpha}"),
        });
    }
    if grid < 32 {
        return Err(Error::InvalidParameter {
            field: "grid",
            message: format!("need at least 32 grid points, got {grid}"),
        });
    }
    if !(config.gap_tolerance > 0.0) || config.max_iterations == 0 {
        return Err(Error::InvalidParameter {
            field: "capacity_config",
            message: "gap_tolerance must be positive and max_iterations nonzero".into(),
        });
    }
    let arcs = set.realize()?;
    if arcs.is_empty() {
        return Ok(CapacityResult { capacity: 0.0, energy: f64::INFINITY, duality_gap: 0.0, iterations: 0, cells: 0 });
    }
    let cells = capacity_cells(&arcs, grid);
    let g = cells.len();
    if g > CAPACITY_MAX_CELLS {
        return Err(Error::SizeLimit { what: "capacity grid cells", got: g, cap: CAPACITY_MAX_CELLS });
    }
    let gl = gauss_legendre(16);
    let mut kernel_matrix = vec![0.0f64; g * g];
    for i in 0..g {
        for j in i..g {
            let (ci, wi) = cells[i];
            let (cj, wj) = cells[j];
            let integral = match kernel {
                KernelMode::Angular => angular_pair_integral(ci, wi, cj, wj, alpha),
                KernelMode::Chordal => chordal_pair_integral(ci, wi, cj, wj, alpha, &gl),
            };
            let avg = integral / (wi * wj);
            kernel_matrix[i * g + j] = avg;
            kernel_matrix[j * g + i] = avg;
        }
    }

    // Frank-Wolfe with away steps; q = K mu maintained incrementally
    let mut mu = vec![1.0 / g as f64; g];
    let mut q = vec![0.0f64; g];
    for i in 0..g {
        let mut acc = CompensatedSum::new();
        for j in 0..g {
            acc.add(kernel_matrix[i * g + j] * mu[j]);
        }
        q[i] = acc.value();
    }
    let mut energy: f64 = mu.iter().zip(&q).map(|(m, qq)| m * qq).sum();
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let mut i_fw = 0;
        let mut q_min = f64::INFINITY;
        let mut i_aw = 0;
        let mut q_max = f64::NEG_INFINITY;
        for i in 0..g {
            if q[i] < q_min {
                q_min = q[i];
                i_fw = i;
            }
            if mu[i] > 1e-15 && q[i] > q_max {
                q_max = q[i];
                i_aw = i;
            }
        }
        gap = 2.0 * (energy - q_min);
        if gap <= config.gap_tolerance * energy.max(1e-300) {
            break;
        }
        let fw_score = energy - q_min;
        let aw_score = q_max - energy;
        let col = |idx: usize| &kernel_matrix[idx * g..(idx + 1) * g];
        if fw_score >= aw_score {
            // toward vertex i_fw
            let d_q = q_min - energy;
            let d_kd = col(i_fw)[i_fw] - 2.0 * q[i_fw] + energy;
            let gamma = if d_kd <= 0.0 { 1.0 } else { (-d_q / d_kd).clamp(0.0, 1.0) };
            let ci = col(i_fw);
            for j in 0..g {
                mu[j] *= 1.0 - gamma;
                q[j] = (1.0 - gamma) * q[j] + gamma * ci[j];
            }
            mu[i_fw] += gamma;
        } else {
            // away from vertex i_aw
            let gamma_max = mu[i_aw] / (1.0 - mu[i_aw]).max(1e-300);
            let d_q = energy - q[i_aw];
            let d_kd = energy - 2.0 * q[i_aw] + col(i_aw)[i_aw];
            let gamma = if d_kd <= 0.0 { gamma_max } else { (-d_q / d_kd).clamp(0.0, gamma_max) };
            let ci = col(i_aw);
            for j in 0..g {
                mu[j] *= 1.0 + gamma;
                q[j] = (1.0 + gamma) * q[j] - gamma * ci[j];
            }
            mu[i_aw] -= gamma;
            mu[i_aw] = mu[i_aw].max(0.0);
        }
        energy = mu.iter().zip(&q).map(|(m, qq)| m * qq).sum();
        iterations += 1;
    }
    if gap > config.gap_tolerance * energy.max(1e-300) {
        return Err(Error::NoConvergence { iterations, residual: gap });
    }
    Ok(CapacityResult { capacity: energy.recip(), energy, duality_gap: gap, iterations, cells: g })
}

/// Certificate for a boundary set: an admissible gauge plus strictly positive
/// content make the set a uniqueness carrier for the bounded class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub admissibility: Admissibility,
    pub gauge: GaugeFunction,
    pub content: f64,
    pub pass: bool,
    pub arc_count: usize,
    pub total_length: f64,
}

/// Runs the content certificate: requires the gauge probe to return yes or
/// unknown, evaluates exact content, and passes when it clears the floor.
pub fn certify_theorem1_set(set: &BoundarySet, gauge: &GaugeFunction) -> Result<CertificateReport> {
    gauge.validate()?;
    let admissibility = gauge.admissibility();
    if admissibility == Admissibility::No {
        return Err(Error::InadmissibleGauge(format!(
            "gauge {} fails the decay probe",
            gauge.describe()
        )));
    }
    let arcs = set.realize()?;
    let content = hausdorff_content(set, gauge, ContentMode::ExactDp)?;
    Ok(CertificateReport {
        admissibility,
        gauge: gauge.clone(),
        content,
        pass: content > CONTENT_FLOOR,
        arc_count: arcs.len(),
        total_length: arcs.iter().map(Arc::length).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn test_gauge_eval_values() {
        let sqrt = GaugeFunction::Power { beta: 0.5 };
        assert!((sqrt.eval(0.25) - 0.5).abs() < 1e-15);
        assert_eq!(sqrt.eval(0.0), 0.0);
        let tlog = GaugeFunction::TLog;
        let t = (-2.0f64).exp();
        assert!((tlog.eval(t) - 2.0 * t).abs() < 1e-15);
        assert!((tlog.eval(0.9) - std::f64::consts::E.recip()).abs() < 1e-15);
        let table = GaugeFunction::Custom { table: vec![(1.0, 2.0), (3.0, 6.0)] };
        assert!((table.eval(2.0) - 4.0).abs() < 1e-15);
        assert!((table.eval(0.5) - 1.0).abs() < 1e-15); // linear to the origin
        assert!((table.eval(10.0) - 6.0).abs() < 1e-15); // clamped
    }

    #[test]
    fn test_gauge_validation() {
        assert!(GaugeFunction::Power { beta: 0.0 }.validate().is_err());
        assert!(GaugeFunction::Power { beta: -1.0 }.validate().is_err());
        assert!(GaugeFunction::Custom { table: vec![(1.0, 1.0)] }.validate().is_err());
        assert!(GaugeFunction::Custom { table: vec![(1.0, 2.0), (2.0, 1.0)] }.validate().is_err());
        assert!(GaugeFunction::Custom { table: vec![(2.0, 1.0), (1.0, 2.0)] }.validate().is_err());
    }

    #[test]
    fn test_admissibility_classification() {
        assert_eq!(GaugeFunction::Power { beta: 1.0 }.admissibility(), Admissibility::Yes);
        assert_eq!(GaugeFunction::Power { beta: 2.0 }.admissibility(), Admissibility::Yes);
        assert_eq!(GaugeFunction::Power { beta: 0.5 }.admissibility(), Admissibility::No);
        assert_eq!(GaugeFunction::TLog.admissibility(), Admissibility::No);
        // a short table cannot be probed deep enough
        let short = GaugeFunction::Custom { table: vec![(0.3, 0.3), (0.5, 0.5)] };
        assert_eq!(short.admissibility(), Admissibility::Unknown);
    }

    #[test]
    fn test_arc_union_normalization() {
        let set = BoundarySet::arc_union(vec![
            Arc::new(0.0, 1.0).unwrap(),
            Arc::new(0.5, 1.0).unwrap(),
            Arc::new(3.0, 0.2).unwrap(),
        ]);
        let arcs = set.realize().unwrap();
        assert_eq!(arcs.len(), 2);
        assert!((arcs[0].length() - 1.5).abs() < 1e-12);
        // wrap-around pair merges across pi
        let wrap = BoundarySet::arc_union(vec![
            Arc::new(std::f64::consts::PI - 0.5, 0.5).unwrap(),
            Arc::new(-std::f64::consts::PI, 0.5).unwrap(),
        ]);
        assert_eq!(wrap.realize().unwrap().len(), 1);
        // full cover collapses to the full circle
        let full = BoundarySet::arc_union(vec![
            Arc::new(0.0, 4.0).unwrap(),
            Arc::new(3.5, 3.0).unwrap(),
        ]);
        let arcs = full.realize().unwrap();
        assert_eq!(arcs.len(), 1);
        assert!((arcs[0].length() - TAU).abs() < 1e-12);
    }

    #[test]
    fn test_cantor_realize() {
        let base = Arc::new(-1.0, 2.0).unwrap();
        let set = BoundarySet::cantor(base, 1.0 / 3.0, 3).unwrap();
        let arcs = set.realize().unwrap();
        assert_eq!(arcs.len(), 8);
        for a in &arcs {
            assert!((a.length() - 2.0 / 27.0).abs() < 1e-12);
        }
        let total: f64 = arcs.iter().map(Arc::length).sum();
        assert!((total - 2.0 * (2.0f64 / 3.0).powi(3)).abs() < 1e-12);
        assert!(BoundarySet::cantor(base, 0.5, 3).is_err());
        assert!(BoundarySet::cantor(base, 0.2, 0).is_err());
    }

    #[test]
    fn test_content_base_cases() {
        let linear = GaugeFunction::Power { beta: 1.0 };
        let empty = BoundarySet::arc_union(vec![]);
        assert_eq!(hausdorff_content(&empty, &linear, ContentMode::ExactDp).unwrap(), 0.0);
        let single = BoundarySet::arc_union(vec![Arc::new(0.3, 0.77).unwrap()]);
        let c = hausdorff_content(&single, &linear, ContentMode::ExactDp).unwrap();
        assert!((c - 0.77).abs() < 1e-15);
        let full = BoundarySet::arc_union(vec![Arc::full_circle()]);
        let c = hausdorff_content(&full, &linear, ContentMode::Greedy).unwrap();
        assert!((c - TAU).abs() < 1e-15);
    }

    #[test]
    fn test_content_two_arc_merge() {
        // two arcs of length 0.2 with a 0.01 gap under h = sqrt(t): covering
        // both with one arc of length 0.41 beats two separate covers
        let set = BoundarySet::arc_union(vec![
            Arc::new(0.0, 0.2).unwrap(),
            Arc::new(0.21, 0.2).unwrap(),
        ]);
        let sqrt = GaugeFunction::Power { beta: 0.5 };
        for mode in [ContentMode::ExactDp, ContentMode::Greedy, ContentMode::BruteForce] {
            let c = hausdorff_content(&set, &sqrt, mode).unwrap();
            assert!((c - 0.41f64.sqrt()).abs() < 1e-12, "{mode:?}: {c}");
        }
    }

    #[test]
    fn test_content_exact_matches_brute_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gauges = [
            GaugeFunction::Power { beta: 0.5 },
            GaugeFunction::Power { beta: 1.0 },
            GaugeFunction::TLog,
        ];
        for _ in 0..40 {
            let k = rng.gen_range(2..=8);
            let arcs: Vec<Arc> = (0..k)
                .map(|_| {
                    Arc::new(rng.gen_range(-3.14..3.14), rng.gen_range(0.01..0.4)).unwrap()
                })
                .collect();
            let set = BoundarySet::arc_union(arcs);
            for gauge in &gauges {
                let exact = hausdorff_content(&set, gauge, ContentMode::ExactDp).unwrap();
                let brute = hausdorff_content(&set, gauge, ContentMode::BruteForce).unwrap();
                assert!(
                    (exact - brute).abs() <= 1e-12 * brute.max(1.0),
                    "{gauge:?}: exact {exact} vs brute {brute}"
                );
                let greedy = hausdorff_content(&set, gauge, ContentMode::Greedy).unwrap();
                assert!(greedy >= exact - 1e-12);
            }
        }
    }

    #[test]
    fn test_content_cantor_critical_gauge_stable_in_depth() {
        // at the matching power gauge the optimal cover cost is scale
        // invariant, so content is the same at every construction depth
        let base = Arc::new(-1.0, 2.0).unwrap();
        let critical = GaugeFunction::Power { beta: 2.0f64.ln() / 3.0f64.ln() };
        let expected = 2.0f64.powf(2.0f64.ln() / 3.0f64.ln());
        for depth in [2usize, 4, 6, 8] {
            let set = BoundarySet::cantor(base, 1.0 / 3.0, depth).unwrap();
            let c = hausdorff_content(&set, &critical, ContentMode::ExactDp).unwrap();
            assert!((c - expected).abs() < 1e-9 * expected, "depth {depth}: {c} vs {expected}");
        }
    }

    #[test]
    fn test_capacity_full_circle_uniform_is_exact() {
        let full = BoundarySet::arc_union(vec![Arc::full_circle()]);
        let config = CapacityConfig::default();
        for alpha in [0.3, 0.5, 0.8] {
            let r = alpha_capacity(&full, alpha, 128, KernelMode::Angular, &config).unwrap();
            // uniform measure energy for the angular kernel: pi^{-alpha}/(1-alpha)
            let expected_energy = std::f64::consts::PI.powf(-alpha) / (1.0 - alpha);
            assert!(
                (r.energy - expected_energy).abs() < 1e-9 * expected_energy,
                "alpha={alpha}: {} vs {expected_energy}",
                r.energy
            );
            assert_eq!(r.iterations, 0, "uniform start is already optimal");
        }
    }

    #[test]
    fn test_capacity_monotone_under_inclusion() {
        let small = BoundarySet::arc_union(vec![Arc::new(0.0, 0.5).unwrap()]);
        let big = BoundarySet::arc_union(vec![Arc::new(-0.2, 1.5).unwrap()]);
        let config = CapacityConfig::default();
        let cs = alpha_capacity(&small, 0.5, 64, KernelMode::Angular, &config).unwrap();
        let cb = alpha_capacity(&big, 0.5, 64, KernelMode::Angular, &config).unwrap();
        assert!(cb.capacity >= cs.capacity - 1e-6, "{} vs {}", cb.capacity, cs.capacity);
    }

    #[test]
    fn test_capacity_parameter_validation() {
        let set = BoundarySet::arc_union(vec![Arc::new(0.0, 1.0).unwrap()]);
        let config = CapacityConfig::default();
        assert!(alpha_capacity(&set, 0.5, 16, KernelMode::Angular, &config).is_err());
        assert!(alpha_capacity(&set, 1.0, 64, KernelMode::Angular, &config).is_err());
        assert!(alpha_capacity(&set, 0.0, 64, KernelMode::Angular, &config).is_err());
        let empty = BoundarySet::arc_union(vec![]);
        let r = alpha_capacity(&empty, 0.5, 64, KernelMode::Angular, &config).unwrap();
        assert_eq!(r.capacity, 0.0);
    }

    #[test]
    fn test_chordal_kernel_close_to_angular_for_small_cells() {
        // for narrow cells the chord and the angle nearly agree
        let a = angular_pair_integral(0.0, 0.01, 0.05, 0.01, 0.5);
        let c = chordal_pair_integral(0.0, 0.01, 0.05, 0.01, 0.5, &gauss_legendre(16));
        assert!((a - c).abs() < 1e-4 * a, "{a} vs {c}");
        // same-cell integrals match the closed form 2 w^{2-a}/((1-a)(2-a))
        let w = 0.02;
        let alpha = 0.4;
        let same = angular_pair_integral(1.0, w, 1.0, w, alpha);
        let closed = 2.0 * w.powf(2.0 - alpha) / ((1.0 - alpha) * (2.0 - alpha));
        assert!((same - closed).abs() < 1e-14, "{same} vs {closed}");
    }

    #[test]
    fn test_certify_full_circle_linear_gauge() {
        let full = BoundarySet::arc_union(vec![Arc::full_circle()]);
        let report = certify_theorem1_set(&full, &GaugeFunction::Power { beta: 1.0 }).unwrap();
        assert_eq!(report.admissibility, Admissibility::Yes);
        assert!(report.pass);
        assert!((report.content - TAU).abs() < 1e-12);
        assert_eq!(report.arc_count, 1);
    }

    #[test]
    fn test_certify_rejects_inadmissible_gauge() {
        let full = BoundarySet::arc_union(vec![Arc::full_circle()]);
        let err = certify_theorem1_set(&full, &GaugeFunction::Power { beta: 0.5 });
        assert!(matches!(err, Err(Error::InadmissibleGauge(_))));
    }

    #[test]
    fn test_certify_cantor_with_linear_gauge() {
        // a depth-8 middle-thirds set still carries (2/3)^8 * L of linear content
        let base = Arc::new(-1.0, 2.0).unwrap();
        let set = BoundarySet::cantor(base, 1.0 / 3.0, 8).unwrap();
        let report = certify_theorem1_set(&set, &GaugeFunction::Power { beta: 1.0 }).unwrap();
        assert!(report.pass);
        let expected = 2.0 * (2.0f64 / 3.0).powi(8);
        assert!((report.content - expected).abs() < 1e-10, "{}", report.content);
        assert_eq!(report.arc_count, 256);
    }

    #[test]
    fn test_content_greedy_ratio_bounded_on_cantor() {
        let base = Arc::new(-1.0, 2.0).unwrap();
        let set = BoundarySet::cantor(base, 0.3, 6).unwrap();
        let gauge = GaugeFunction::Power { beta: 0.7 };
        let exact = hausdorff_content(&set, &gauge, ContentMode::ExactDp).unwrap();
        let greedy = hausdorff_content(&set, &gauge, ContentMode::Greedy).unwrap();
        assert!(greedy >= exact - 1e-12);
        assert!(greedy <= 1.5 * exact, "greedy {greedy} vs exact {exact}");
    }
}
