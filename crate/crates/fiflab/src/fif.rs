//! Construction of the alpha-fractal interpolation function as the fixed point
//! of the Read-Bajraktarevic operator on a dyadic sampling grid, pointwise
//! evaluation by recursive address decomposition, and verification of the
//! self-referential equation and the uniform perturbation bound
//! `||g^alpha - g|| <= ||alpha|| / (1 - ||alpha||) * ||g - b||`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::core::{DyadicGrid, InterpolationData, SampledFunction, ScalarFunction, ScalingVector};
use crate::ifs::{IfsError, IfsSystem};

#[derive(Debug, Error)]
pub enum FifError {
    #[error("sample grid does not match the system's partition")]
    GridMismatch,
    #[error("iterate endpoints ({left}, {right}) do not match the data endpoints ({z0}, {zp})")]
    EndpointMismatch {
        left: f64,
        right: f64,
        z0: f64,
        zp: f64,
    },
    #[error("dyadic depth {0} is too shallow; need at least 6")]
    InvalidDepth(u32),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("no convergence after {iterations} iterations (last sup-difference {last_gap})")]
    NoConvergence { iterations: usize, last_gap: f64 },
    #[error("evaluation point {0} is outside the domain")]
    OutOfDomain(f64),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

/// One application of the RB operator to grid samples: on each subinterval,
/// `(Th)(y) = alpha_p * h(L_p^{-1}(y)) + q_p(L_p^{-1}(y))`, with off-node reads
/// of `h` served by linear interpolation.
pub fn rb_apply(system: &IfsSystem, h: &SampledFunction) -> Result<SampledFunction, FifError> {
    let grid = h.grid();
    if *grid.partition() != system.data().partition() {
        return Err(FifError::GridMismatch);
    }
    let z0 = system.data().ordinate(0);
    let zp = system.data().ordinate(system.data().len() - 1);
    let left = h.values()[0];
    let right = *h.values().last().unwrap();
    if (left - z0).abs() > 1e-6 || (right - zp).abs() > 1e-6 {
        return Err(FifError::EndpointMismatch {
            left,
            right,
            z0,
            zp,
        });
    }

    let domain = system.domain();
    let alphas = system.alpha().alphas();
    let g = system.seed();
    let b = system.base();
    let values = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(idx, &y)| {
            let p = grid.node_interval(idx);
            let u = system.maps()[p].invert(y).clamp(domain.lo, domain.hi);
            // q_p(u) folded through L_p(u) = y: g(y) + alpha_p (h(u) - b(u))
            g.eval(y) + alphas[p] * (h.eval_linear(u) - b.eval(u))
        })
        .collect();
    Ok(SampledFunction::from_values(grid.clone(), values).expect("same grid"))
}

/// Sup-norm residual `max |h - Th|` of grid samples under the RB operator.
pub fn rb_residual(system: &IfsSystem, h: &SampledFunction) -> Result<f64, FifError> {
    Ok(rb_apply(system, h)?.sup_diff(h))
}

/// Uniform perturbation bound `||alpha|| / (1 - ||alpha||) * ||g - b||`, with
/// the sup-norm taken over the grid nodes.
pub fn perturbation_bound(
    g: &ScalarFunction,
    b: &ScalarFunction,
    alpha: &ScalingVector,
    grid: &DyadicGrid,
) -> f64 {
    let sup = alpha.sup_norm();
    let gb = grid
        .nodes()
        .iter()
        .fold(0.0f64, |m, &y| m.max((g.eval(y) - b.eval(y)).abs()));
    sup / (1.0 - sup) * gb
}

/// A converged alpha-fractal interpolation function: the RB fixed point
/// sampled on a dyadic grid, plus its construction metadata.
#[derive(Debug, Clone)]
pub struct FractalFunction {
    system: IfsSystem,
    samples: SampledFunction,
    depth: u32,
    iterations_used: usize,
    final_residual: f64,
    iterate_gaps: Vec<f64>,
}

/// Iterates the RB operator from the seed samples until the sup-difference
/// between iterates drops to `tol` (`NoConvergence` past `max_iter`).
pub fn construct_alpha_fif(
    data: &InterpolationData,
    g: &ScalarFunction,
    b: &ScalarFunction,
    alpha: &ScalingVector,
    depth: u32,
    tol: f64,
    max_iter: usize,
) -> Result<FractalFunction, FifError> {
    if depth < 6 {
        return Err(FifError::InvalidDepth(depth));
    }
    if !(tol > 0.0) {
        return Err(FifError::InvalidTolerance(tol));
    }
    let system = IfsSystem::build(data.clone(), alpha.clone(), g.clone(), b.clone())?;
    let grid = Arc::new(DyadicGrid::new(data.partition(), depth));
    let mut h = SampledFunction::sample(grid, g);
    let mut gaps = Vec::new();
    for _ in 0..max_iter {
        let next = rb_apply(&system, &h)?;
        let gap = next.sup_diff(&h);
        gaps.push(gap);
        h = next;
        if gap <= tol {
            return Ok(FractalFunction {
                system,
                samples: h,
                depth,
                iterations_used: gaps.len(),
                final_residual: gap,
                iterate_gaps: gaps,
            });
        }
    }
    Err(FifError::NoConvergence {
        iterations: max_iter,
        last_gap: gaps.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// Serializable construction metadata.
#[derive(Debug, Clone, Serialize)]
pub struct FifMetadata {
    pub alpha: Vec<f64>,
    pub depth: u32,
    pub iterations: usize,
    pub residual: f64,
    pub bound: f64,
    pub sup_dev: f64,
}

impl FractalFunction {
    pub fn system(&self) -> &IfsSystem {
        &self.system
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Sup-norm distance between the last two iterates.
    pub fn final_residual(&self) -> f64 {
        self.final_residual
    }

    /// Sup-differences of all successive iterates, in order.
    pub fn iterate_gaps(&self) -> &[f64] {
        &self.iterate_gaps
    }

    /// Pointwise evaluation by recursive address decomposition: peel `K`
    /// levels through `L_p^{-1}` and read the base case from the seed, so the
    /// truncation error is bounded by `||alpha||^K ||g - b||`. `K` defaults to
    /// the iteration count used during construction.
    pub fn eval(&self, y: f64, depth_override: Option<usize>) -> Result<f64, FifError> {
        let domain = self.system.domain();
        if !domain.contains(y) {
            return Err(FifError::OutOfDomain(y));
        }
        let k = depth_override.unwrap_or(self.iterations_used);
        Ok(self.eval_rec(y, k))
    }

    fn eval_rec(&self, y: f64, k: usize) -> f64 {
        let g = self.system.seed();
        if k == 0 {
            return g.eval(y);
        }
        let partition = self.system.data().partition();
        let p = partition.locate(y).expect("domain checked by caller");
        let domain = self.system.domain();
        let u = self.system.maps()[p].invert(y).clamp(domain.lo, domain.hi);
        let alpha = self.system.alpha().alphas()[p];
        g.eval(y) + alpha * (self.eval_rec(u, k - 1) - self.system.base().eval(u))
    }

    /// Max over grid nodes of the self-referential defect
    /// `|g^alpha(y) - g(y) - alpha_p (g^alpha - b)(L_p^{-1}(y))|`.
    pub fn residual_sup(&self) -> f64 {
        rb_residual(&self.system, &self.samples).expect("samples live on the system grid")
    }

    /// The uniform perturbation bound for this system on its own grid.
    pub fn perturbation_bound(&self) -> f64 {
        perturbation_bound(
            self.system.seed(),
            self.system.base(),
            self.system.alpha(),
            self.samples.grid(),
        )
    }

    /// Sup over grid nodes of `|g^alpha - g|`.
    pub fn sup_deviation(&self) -> f64 {
        let g = self.system.seed();
        self.samples
            .grid()
            .nodes()
            .iter()
            .zip(self.samples.values())
            .fold(0.0f64, |m, (&y, &v)| m.max((v - g.eval(y)).abs()))
    }

    /// Whether the sup-grid deviation respects the perturbation bound
    /// (plus a 1e-9 rounding allowance).
    pub fn check_bound(&self) -> bool {
        self.sup_deviation() <= self.perturbation_bound() + 1e-9
    }

    pub fn metadata(&self) -> FifMetadata {
        FifMetadata {
            alpha: self.system.alpha().alphas().to_vec(),
            depth: self.depth,
            iterations: self.iterations_used,
            residual: self.final_residual,
            bound: self.perturbation_bound(),
            sup_dev: self.sup_deviation(),
        }
    }
}
