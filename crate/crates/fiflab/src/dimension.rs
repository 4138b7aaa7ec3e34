//! Box-counting dimension of FIF graphs, two ways: analytically as the root
//! of the Moran-type equation `sum_p |alpha_p| a_p^(D-1) = 1` (with `D = 1`
//! whenever `sum |alpha_p| <= 1`), and empirically as the log-log slope of
//! grid-box counts over a rendered point cloud.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::core::{Partition, ScalingVector};
use crate::ifs::PointCloud;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    #[error("interval ratio a[{index}] = {ratio} is outside (0, 1)")]
    InvalidRatios { index: usize, ratio: f64 },
    #[error("scaling vector has {actual} entries but the partition defines {expected} intervals")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("operation requires a nonempty point cloud")]
    EmptyCloud,
    #[error("box side {0} must lie in (0, 1]")]
    InvalidEpsilon(f64),
    #[error("scale range {k_min}..{k_max} must span at least 4 scales")]
    DegenerateRange { k_min: u32, k_max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionMethod {
    Analytic,
    Boxcount,
}

/// Per-scale box count used in the log-log fit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaleCount {
    pub k: u32,
    pub epsilon: f64,
    pub count: usize,
}

/// A box dimension value with method and fit diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionResult {
    pub method: DimensionMethod,
    pub value: f64,
    /// Moran-equation residual `|M(D) - 1|` (analytic root branch only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<ScaleCount>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    /// Advisory notes (sparse clouds, collinear data); not serialized.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl DimensionResult {
    fn analytic(value: f64, residual: Option<f64>) -> Self {
        Self {
            method: DimensionMethod::Analytic,
            value,
            residual,
            scales: None,
            slope: None,
            r2: None,
            warnings: Vec::new(),
        }
    }
}

/// Solves the Moran-type equation for the graph dimension.
///
/// Interval ratios are taken relative to the total domain length, so the
/// formula is invariant under rescaling of the abscissae. With ratios summing
/// to 1, `M(2) = sum |alpha_p| a_p < 1`, so the root always lies in `(1, 2)`.
pub fn analytic_box_dimension(
    alpha: &ScalingVector,
    partition: &Partition,
) -> Result<DimensionResult, DimensionError> {
    let ratios = partition.ratios();
    if alpha.len() != ratios.len() {
        return Err(DimensionError::LengthMismatch {
            expected: ratios.len(),
            actual: alpha.len(),
        });
    }
    for (index, &ratio) in ratios.iter().enumerate() {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(DimensionError::InvalidRatios { index, ratio });
        }
    }
    let abs_sum: f64 = alpha.alphas().iter().map(|a| a.abs()).sum();
    if abs_sum <= 1.0 {
        return Ok(DimensionResult::analytic(1.0, None));
    }

    let moran = |d: f64| -> f64 {
        alpha
            .alphas()
            .iter()
            .zip(&ratios)
            .map(|(a, r)| a.abs() * r.powf(d - 1.0))
            .sum()
    };

    // M is continuous and strictly decreasing with M(1) = abs_sum > 1, so
    // bisection is unconditionally safe once the bracket is established.
    let mut lo = 1.0;
    let mut hi = 2.0;
    while moran(hi) >= 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if moran(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    Ok(DimensionResult::analytic(value, Some((moran(value) - 1.0).abs())))
}

/// Counts occupied grid cells of side `epsilon` (anchored at the origin,
/// half-open `[i*eps, (i+1)*eps)` with top/right boundary points clamped
/// inward) for each requested scale.
///
/// The cloud is expected normalized to the unit square; stray coordinates are
/// clamped onto the boundary cells.
pub fn box_count(
    cloud: &PointCloud,
    epsilons: &[f64],
) -> Result<Vec<(f64, usize)>, DimensionError> {
    if cloud.is_empty() {
        return Err(DimensionError::EmptyCloud);
    }
    for &eps in epsilons {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(DimensionError::InvalidEpsilon(eps));
        }
    }
    Ok(epsilons
        .iter()
        .map(|&eps| {
            let cells = (1.0 / eps).ceil() as u64;
            let index = |v: f64| -> u64 { ((v / eps) as u64).min(cells - 1) };
            let mut keys: Vec<u64> = cloud
                .points()
                .par_iter()
                .map(|&(y, z)| index(y.max(0.0)) * cells + index(z.max(0.0)))
                .collect();
            keys.par_sort_unstable();
            keys.dedup();
            (eps, keys.len())
        })
        .collect())
}

/// Least-squares estimate of the box dimension over dyadic scales
/// `epsilon = 2^-k`, `k = k_min..=k_max`: the slope of `log N` against
/// `log(1/epsilon)`, with per-scale counts and fit quality as diagnostics.
///
/// The cloud is normalized to the unit square internally, which makes the
/// estimate invariant under affine rescaling of either axis.
pub fn estimate_box_dimension(
    cloud: &PointCloud,
    k_min: u32,
    k_max: u32,
) -> Result<DimensionResult, DimensionError> {
    if cloud.is_empty() {
        return Err(DimensionError::EmptyCloud);
    }
    if k_max < k_min + 3 || k_max > 24 {
        return Err(DimensionError::DegenerateRange { k_min, k_max });
    }
    let normalized = cloud.normalized_to_unit_square();
    let epsilons: Vec<f64> = (k_min..=k_max).map(|k| 0.5f64.powi(k as i32)).collect();
    let counts = box_count(&normalized, &epsilons)?;

    let xs: Vec<f64> = (k_min..=k_max)
        .map(|k| k as f64 * std::f64::consts::LN_2)
        .collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let syy: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };

    let mut warnings = Vec::new();
    let recommended = 10.0 * 4f64.powi(k_max as i32);
    if (cloud.len() as f64) < recommended {
        warnings.push(format!(
            "cloud has {} points; at least {recommended:.0} are recommended for k_max = {k_max}",
            cloud.len()
        ));
    }

    Ok(DimensionResult {
        method: DimensionMethod::Boxcount,
        value: slope,
        residual: None,
        scales: Some(
            counts
                .iter()
                .zip(k_min..=k_max)
                .map(|(&(epsilon, count), k)| ScaleCount { k, epsilon, count })
                .collect(),
        ),
        slope: Some(slope),
        r2: Some(r2),
        warnings,
    })
}
