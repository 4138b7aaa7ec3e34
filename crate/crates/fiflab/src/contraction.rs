//! Contraction moduli, piecewise example self-maps, grid-scan checkers for the
//! Banach / phi-contraction / Suzuki-type generalized phi-contraction
//! conditions, and Picard fixed-point iteration.
//!
//! A `no-counterexample-found` verdict is a falsification result at the scan
//! resolution, never a proof; every report records the resolution it used.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Default absolute tolerance for the implication checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Pair scans above this count coarsen their grid automatically.
pub const PAIR_CAP: usize = 4_000_000;
/// Reports keep at most this many witnesses (sorted lexicographically).
pub const MAX_WITNESSES: usize = 10_000;
/// Largest element of the extended carrier for the discrete example map.
pub const DISCRETE_CARRIER_MAX: u64 = 99;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContractionError {
    #[error("value {0} is not in the map's carrier")]
    NotInCarrier(f64),
    #[error("sample grid needs at least 2 points")]
    EmptySample,
    #[error("phi({t}) = {phi_t} does not satisfy phi(t) < t; not a contraction modulus")]
    NotAModulus { t: f64, phi_t: f64 },
}

/// A comparison function `phi: [0, inf) -> [0, inf)` with `phi(t) < t` for
/// `t > 0`, verified on a log-spaced probe grid at construction.
#[derive(Clone)]
pub struct ContractionModulus {
    body: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ContractionModulus {
    pub fn new(body: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self, ContractionError> {
        for i in 0..=240 {
            // probe t in [1e-9, 1e3], log-spaced
            let t = 1e-9 * 10f64.powf(12.0 * i as f64 / 240.0);
            let phi_t = body(t);
            if !(phi_t < t) || phi_t < 0.0 || !phi_t.is_finite() {
                return Err(ContractionError::NotAModulus { t, phi_t });
            }
        }
        Ok(Self {
            body: Arc::new(body),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.body)(t)
    }

    /// `phi(t) = t/2`.
    pub fn half() -> Self {
        Self::new(phi_half).expect("t/2 is a modulus")
    }

    /// `phi(t) = t^2/2` for `t <= 1`, `t - 1/3` for `t > 1`.
    pub fn piecewise() -> Self {
        Self::new(phi_piecewise).expect("piecewise branch is a modulus")
    }
}

pub fn phi_half(t: f64) -> f64 {
    t / 2.0
}

pub fn phi_piecewise(t: f64) -> f64 {
    if t <= 1.0 {
        t * t / 2.0
    } else {
        t - 1.0 / 3.0
    }
}

/// The carrier of a self-map: a real interval or an explicit finite point
/// set, both under the metric `|y - z|`.
#[derive(Clone, Debug)]
pub enum Carrier {
    Interval { lo: f64, hi: f64 },
    Finite(Arc<[f64]>),
}

/// A self-mapping of a carrier.
#[derive(Clone)]
pub struct MetricSelfMap {
    carrier: Carrier,
    body: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MetricSelfMap {
    pub fn on_interval(lo: f64, hi: f64, body: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            carrier: Carrier::Interval { lo, hi },
            body: Arc::new(body),
        }
    }

    pub fn on_finite(points: Vec<f64>, body: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            carrier: Carrier::Finite(points.into()),
            body: Arc::new(body),
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.body)(y)
    }

    /// Sample points for a scan: a `delta`-spaced grid on interval carriers
    /// (endpoints included), the full point set on finite carriers.
    pub fn sample(&self, delta: f64) -> Vec<f64> {
        match &self.carrier {
            Carrier::Interval { lo, hi } => {
                let n = (((hi - lo) / delta) + 1e-9).floor() as usize;
                let mut pts: Vec<f64> = (0..=n).map(|k| lo + k as f64 * delta).collect();
                if let Some(&last) = pts.last() {
                    if hi - last > 1e-9 * delta.max(1.0) {
                        pts.push(*hi);
                    }
                }
                pts
            }
            Carrier::Finite(pts) => pts.to_vec(),
        }
    }

    /// Sampled points whose image leaves the carrier, with their images.
    /// Interval carriers allow a 1e-12 excursion; finite carriers are exact.
    pub fn carrier_violations(&self, delta: f64) -> Vec<(f64, f64)> {
        let sample = self.sample(delta);
        match &self.carrier {
            Carrier::Interval { lo, hi } => sample
                .into_iter()
                .map(|y| (y, self.eval(y)))
                .filter(|&(_, ty)| ty < lo - 1e-12 || ty > hi + 1e-12)
                .collect(),
            Carrier::Finite(pts) => sample
                .into_iter()
                .map(|y| (y, self.eval(y)))
                .filter(|(_, ty)| !pts.contains(ty))
                .collect(),
        }
    }

    fn contains(&self, y: f64) -> bool {
        match &self.carrier {
            Carrier::Interval { lo, hi } => y >= lo - 1e-12 && y <= hi + 1e-12,
            Carrier::Finite(pts) => pts.contains(&y),
        }
    }
}

/// The continuous five-branch example map: zero tails with a tent over
/// `[4, 8]` (slope 2 up, then -1/2 and -1 down).
pub fn example_t_continuous(y: f64) -> f64 {
    if y <= 4.0 {
        0.0
    } else if y <= 5.0 {
        2.0 * y - 8.0
    } else if y <= 7.0 {
        -y / 2.0 + 4.5
    } else if y <= 8.0 {
        -y + 8.0
    } else {
        0.0
    }
}

/// [`example_t_continuous`] as a self-map of `[lo, hi]`.
pub fn continuous_example_map(lo: f64, hi: f64) -> MetricSelfMap {
    MetricSelfMap::on_interval(lo, hi, example_t_continuous)
}

/// The discrete example map on the extended carrier `{0, 1, ..., 99}`:
/// `T(5) = 4`, `T(7) = 0`, `T(y) = 1` otherwise.
pub fn example_t_discrete(y: u64) -> Result<u64, ContractionError> {
    if y > DISCRETE_CARRIER_MAX {
        return Err(ContractionError::NotInCarrier(y as f64));
    }
    Ok(match y {
        5 => 4,
        7 => 0,
        _ => 1,
    })
}

/// [`example_t_discrete`] as a self-map of the extended carrier.
pub fn discrete_example_map() -> MetricSelfMap {
    let points: Vec<f64> = (0..=DISCRETE_CARRIER_MAX).map(|k| k as f64).collect();
    MetricSelfMap::on_finite(points, |y| match y as u64 {
        5 => 4.0,
        7 => 0.0,
        _ => 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Banach,
    Phi,
    Suzuki,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "no-counterexample-found")]
    NoCounterexampleFound,
    #[serde(rename = "counterexamples-found")]
    CounterexamplesFound,
}

/// A sampled pair violating the checked condition: `lhs > rhs + tol`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Witness {
    pub y: f64,
    pub z: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Outcome of a contraction-condition scan.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub mode: CheckMode,
    pub verdict: Verdict,
    /// Effective grid spacing (0 for exhaustive finite carriers).
    pub resolution: f64,
    /// Number of sampled carrier points.
    pub sample_size: usize,
    pub witnesses: Vec<Witness>,
}

impl CheckReport {
    pub fn found_counterexamples(&self) -> bool {
        self.verdict == Verdict::CounterexamplesFound
    }

    pub fn has_witness(&self, y: f64, z: f64) -> bool {
        self.witnesses
            .iter()
            .any(|w| (w.y - y).abs() < 1e-9 && (w.z - z).abs() < 1e-9)
    }
}

/// Points plus effective resolution, coarsening `delta` until the implied
/// pair count fits under [`PAIR_CAP`].
fn scan_points(map: &MetricSelfMap, delta: f64, ordered: bool) -> (Vec<f64>, f64) {
    match map.carrier() {
        Carrier::Interval { .. } => {
            let mut d = delta;
            loop {
                let pts = map.sample(d);
                let n = pts.len();
                let pairs = if ordered { n * (n - 1) } else { n * (n - 1) / 2 };
                if pairs <= PAIR_CAP || n <= 2 {
                    return (pts, d);
                }
                d *= 2.0;
            }
        }
        Carrier::Finite(_) => (map.sample(delta), 0.0),
    }
}

fn finish_report(mode: CheckMode, mut witnesses: Vec<Witness>, resolution: f64, sample_size: usize) -> CheckReport {
    witnesses.sort_by(|a, b| (a.y, a.z).partial_cmp(&(b.y, b.z)).unwrap());
    witnesses.truncate(MAX_WITNESSES);
    CheckReport {
        mode,
        verdict: if witnesses.is_empty() {
            Verdict::NoCounterexampleFound
        } else {
            Verdict::CounterexamplesFound
        },
        resolution,
        sample_size,
        witnesses,
    }
}

/// Scans unordered pairs for `d(Ty,Tz) <= ratio_bound * d(y,z) + tol`.
pub fn check_banach(
    map: &MetricSelfMap,
    delta: f64,
    ratio_bound: f64,
    tol: f64,
) -> Result<CheckReport, ContractionError> {
    let (pts, res) = scan_points(map, delta, false);
    if pts.len() < 2 {
        return Err(ContractionError::EmptySample);
    }
    let images: Vec<f64> = pts.iter().map(|&y| map.eval(y)).collect();
    let mut witnesses = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let lhs = (images[i] - images[j]).abs();
            let rhs = ratio_bound * (pts[i] - pts[j]).abs();
            if lhs > rhs + tol {
                witnesses.push(Witness {
                    y: pts[i],
                    z: pts[j],
                    lhs,
                    rhs,
                    slack: lhs - rhs,
                });
            }
        }
    }
    Ok(finish_report(CheckMode::Banach, witnesses, res, pts.len()))
}

/// Scans unordered pairs for the phi-contraction condition
/// `d(Ty,Tz) <= phi(d(y,z)) + tol`.
pub fn check_phi(
    map: &MetricSelfMap,
    phi: &ContractionModulus,
    delta: f64,
    tol: f64,
) -> Result<CheckReport, ContractionError> {
    let (pts, res) = scan_points(map, delta, false);
    if pts.len() < 2 {
        return Err(ContractionError::EmptySample);
    }
    let images: Vec<f64> = pts.iter().map(|&y| map.eval(y)).collect();
    let mut witnesses = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let lhs = (images[i] - images[j]).abs();
            let rhs = phi.eval((pts[i] - pts[j]).abs());
            if lhs > rhs + tol {
                witnesses.push(Witness {
                    y: pts[i],
                    z: pts[j],
                    lhs,
                    rhs,
                    slack: lhs - rhs,
                });
            }
        }
    }
    Ok(finish_report(CheckMode::Phi, witnesses, res, pts.len()))
}

/// Scans ordered pairs for the Suzuki-type condition: whenever the premise
/// `(1/2) d(y,Ty) <= d(y,z)` holds, require
/// `d(Ty,Tz) <= phi(max{d(y,z), d(y,Ty), d(z,Tz)}) + tol`.
/// Pairs failing the premise are skipped.
pub fn check_suzuki(
    map: &MetricSelfMap,
    phi: &ContractionModulus,
    delta: f64,
    tol: f64,
) -> Result<CheckReport, ContractionError> {
    let (pts, res) = scan_points(map, delta, true);
    if pts.len() < 2 {
        return Err(ContractionError::EmptySample);
    }
    let images: Vec<f64> = pts.iter().map(|&y| map.eval(y)).collect();
    let displacement: Vec<f64> = pts
        .iter()
        .zip(&images)
        .map(|(&y, &ty)| (y - ty).abs())
        .collect();
    let mut witnesses = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let dyz = (pts[i] - pts[j]).abs();
            if 0.5 * displacement[i] > dyz {
                continue; // premise fails
            }
            let lhs = (images[i] - images[j]).abs();
            let m = dyz.max(displacement[i]).max(displacement[j]);
            let rhs = phi.eval(m);
            if lhs > rhs + tol {
                witnesses.push(Witness {
                    y: pts[i],
                    z: pts[j],
                    lhs,
                    rhs,
                    slack: lhs - rhs,
                });
            }
        }
    }
    Ok(finish_report(CheckMode::Suzuki, witnesses, res, pts.len()))
}

/// Result of Picard iteration `y <- T(y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPointResult {
    pub point: f64,
    pub iterations: usize,
    /// `d(point, T(point))` between the last two iterates.
    pub residual: f64,
    pub converged: bool,
}

/// Iterates `y_{k+1} = T(y_k)` until the step size drops to `tol` or
/// `max_iter` is exhausted (reported as `converged = false`, not a fault).
pub fn picard_fixed_point(
    map: &MetricSelfMap,
    start: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult, ContractionError> {
    if !map.contains(start) {
        return Err(ContractionError::NotInCarrier(start));
    }
    let mut y = start;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iter {
        let next = map.eval(y);
        iterations += 1;
        residual = (next - y).abs();
        y = next;
        if residual <= tol {
            return Ok(FixedPointResult {
                point: y,
                iterations,
                residual,
                converged: true,
            });
        }
    }
    Ok(FixedPointResult {
        point: y,
        iterations,
        residual,
        converged: false,
    })
}
