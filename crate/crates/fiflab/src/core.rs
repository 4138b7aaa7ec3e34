//! Domain primitives shared by every other module: partitions of a compact
//! interval, interpolation data, affine contractions, and evaluable function
//! representations (closed-form and piecewise-linear), plus dyadic sampling
//! grids used by the fixed-point iteration.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("abscissae not strictly increasing at index {index}: {value} does not exceed {previous}")]
    NotStrictlyIncreasing {
        index: usize,
        previous: f64,
        value: f64,
    },
    #[error("at least {required} knots are required, got {actual}")]
    TooFewKnots { required: usize, actual: usize },
    #[error("interval [{lo}, {hi}] is degenerate or not finite")]
    DegenerateInterval { lo: f64, hi: f64 },
    #[error("affine slope {slope} is not contractive (|slope| must be < 1)")]
    NotContractive { slope: f64 },
    #[error("scaling factor alpha[{index}] = {value} must satisfy |alpha| < 1")]
    ScalingOutOfRange { index: usize, value: f64 },
    #[error(
        "base construction needs the seed evaluable on [{needed_lo}, {needed_hi}], \
         but the seed is a knot table on [{have_lo}, {have_hi}]"
    )]
    BaseOutOfDomain {
        needed_lo: f64,
        needed_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },
    #[error("sample vector has {actual} values but the grid has {expected} nodes")]
    SampleLengthMismatch { expected: usize, actual: usize },
}

/// A nondegenerate closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, CoreError> {
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(CoreError::DegenerateInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    fn clamp(&self, y: f64) -> f64 {
        y.clamp(self.lo, self.hi)
    }
}

/// An ordered set of knots `y_0 < y_1 < … < y_P` splitting `[y_0, y_P]`
/// into `P >= 2` subintervals.
///
/// Interval membership follows the half-open convention: `A_p = [y_{p-1}, y_p)`
/// for `p < P` and `A_P = [y_{P-1}, y_P]`. Function values at shared knots
/// agree by the join conditions, so the convention never changes a value.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    knots: Vec<f64>,
}

/// Builds a [`Partition`] from raw abscissae, validating the ordering.
pub fn make_partition(abscissae: Vec<f64>) -> Result<Partition, CoreError> {
    Partition::new(abscissae)
}

impl Partition {
    pub fn new(knots: Vec<f64>) -> Result<Self, CoreError> {
        if knots.len() < 3 {
            return Err(CoreError::TooFewKnots {
                required: 3,
                actual: knots.len(),
            });
        }
        for (i, w) in knots.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() || !w[0].is_finite() {
                return Err(CoreError::NotStrictlyIncreasing {
                    index: i + 1,
                    previous: w[0],
                    value: w[1],
                });
            }
        }
        Ok(Self { knots })
    }

    /// Number of subintervals `P`.
    pub fn interval_count(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.knots[0],
            hi: *self.knots.last().unwrap(),
        }
    }

    /// The `p`-th subinterval (0-based).
    pub fn interval(&self, p: usize) -> Interval {
        Interval {
            lo: self.knots[p],
            hi: self.knots[p + 1],
        }
    }

    /// Contraction ratios `a_p = (y_p - y_{p-1}) / (y_P - y_0)`; they sum to 1.
    pub fn ratios(&self) -> Vec<f64> {
        let total = self.domain().length();
        self.knots.windows(2).map(|w| (w[1] - w[0]) / total).collect()
    }

    /// 0-based index of the subinterval owning `y` under the half-open
    /// convention, or `None` outside the domain.
    pub fn locate(&self, y: f64) -> Option<usize> {
        let dom = self.domain();
        if !dom.contains(y) {
            return None;
        }
        let idx = self.knots.partition_point(|&k| k <= y);
        Some(idx.saturating_sub(1).min(self.interval_count() - 1))
    }
}

/// The knot set `{(y_p, z_p)}` driving every construction.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationData {
    points: Vec<(f64, f64)>,
}

impl InterpolationData {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, CoreError> {
        if points.len() < 3 {
            return Err(CoreError::TooFewKnots {
                required: 3,
                actual: points.len(),
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(CoreError::NotStrictlyIncreasing {
                    index: i + 1,
                    previous: w[0].0,
                    value: w[1].0,
                });
            }
        }
        for (i, p) in points.iter().enumerate() {
            if !p.0.is_finite() || !p.1.is_finite() {
                return Err(CoreError::NotStrictlyIncreasing {
                    index: i,
                    previous: p.0,
                    value: p.1,
                });
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees >= 3 points
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        self.points[i].0
    }

    pub fn ordinate(&self, i: usize) -> f64 {
        self.points[i].1
    }

    pub fn partition(&self) -> Partition {
        Partition::new(self.points.iter().map(|p| p.0).collect())
            .expect("interpolation data carries a valid partition")
    }

    /// True when every point lies on the chord through the first and last
    /// points within an absolute 1e-12.
    pub fn is_collinear(&self) -> bool {
        let (y0, z0) = self.points[0];
        let (yn, zn) = *self.points.last().unwrap();
        let slope = (zn - z0) / (yn - y0);
        self.points
            .iter()
            .all(|&(y, z)| (z - (z0 + slope * (y - y0))).abs() <= 1e-12)
    }
}

/// Vertical scaling factors `alpha_1..alpha_P`, each with `|alpha_p| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingVector {
    alphas: Vec<f64>,
}

impl ScalingVector {
    pub fn new(alphas: Vec<f64>) -> Result<Self, CoreError> {
        for (index, &value) in alphas.iter().enumerate() {
            if !(value.abs() < 1.0) {
                return Err(CoreError::ScalingOutOfRange { index, value });
            }
        }
        Ok(Self { alphas })
    }

    /// `P` copies of a single factor.
    pub fn uniform(alpha: f64, count: usize) -> Result<Self, CoreError> {
        Self::new(vec![alpha; count])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `max_p |alpha_p|`, always `< 1`.
    pub fn sup_norm(&self) -> f64 {
        self.alphas.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.alphas.iter().all(|&a| a == 0.0)
    }
}

/// An affine contraction `y -> a*y + c` carrying its domain and codomain.
///
/// The intercept is named `c` rather than `b` to avoid collision with the
/// base function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub a: f64,
    pub c: f64,
    pub domain: Interval,
    pub codomain: Interval,
}

/// The unique affine map sending the domain endpoints onto the codomain
/// endpoints: `a = (hi' - lo') / (hi - lo)`, `c = (hi*lo' - lo*hi') / (hi - lo)`.
pub fn affine_from_endpoints(domain: Interval, codomain: Interval) -> Result<AffineMap, CoreError> {
    let den = domain.length();
    if den <= 0.0 || codomain.length() <= 0.0 {
        return Err(CoreError::DegenerateInterval {
            lo: codomain.lo,
            hi: codomain.hi,
        });
    }
    let a = codomain.length() / den;
    let c = (domain.hi * codomain.lo - domain.lo * codomain.hi) / den;
    if !(a.abs() < 1.0) {
        return Err(CoreError::NotContractive { slope: a });
    }
    let map = AffineMap {
        a,
        c,
        domain,
        codomain,
    };
    debug_assert!((map.apply(domain.lo) - codomain.lo).abs() <= 1e-14 * codomain.lo.abs().max(1.0));
    debug_assert!((map.apply(domain.hi) - codomain.hi).abs() <= 1e-14 * codomain.hi.abs().max(1.0));
    Ok(map)
}

impl AffineMap {
    pub fn apply(&self, y: f64) -> f64 {
        self.a * y + self.c
    }

    /// Inverse map from the codomain back onto the domain.
    pub fn invert(&self, y: f64) -> f64 {
        (y - self.c) / self.a
    }
}

#[derive(Clone)]
enum Body {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    PiecewiseLinear {
        knots: Arc<[f64]>,
        values: Arc<[f64]>,
    },
}

/// A real-valued function on an interval: either a closed-form callable or a
/// piecewise-linear knot/value table.
///
/// Closed-form bodies evaluate anywhere on the real line; piecewise-linear
/// bodies extrapolate with their end segments outside the knot span (callers
/// that need evaluation beyond the span should check [`ScalarFunction::evaluable_on`]).
#[derive(Clone)]
pub struct ScalarFunction {
    domain: Interval,
    body: Body,
}

impl std::fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.body {
            Body::Closure(_) => write!(f, "ScalarFunction::closure({:?})", self.domain),
            Body::PiecewiseLinear { knots, .. } => {
                write!(f, "ScalarFunction::pl({} knots, {:?})", knots.len(), self.domain)
            }
        }
    }
}

impl ScalarFunction {
    pub fn from_fn(
        domain: Interval,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            domain,
            body: Body::Closure(Arc::new(f)),
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn eval(&self, y: f64) -> f64 {
        match &self.body {
            Body::Closure(f) => f(y),
            Body::PiecewiseLinear { knots, values } => {
                let i = knots.partition_point(|&k| k <= y);
                if i > 0 && knots[i - 1] == y {
                    return values[i - 1];
                }
                let seg = i.clamp(1, knots.len() - 1);
                let (x0, x1) = (knots[seg - 1], knots[seg]);
                let t = (y - x0) / (x1 - x0);
                values[seg - 1] + t * (values[seg] - values[seg - 1])
            }
        }
    }

    /// Whether evaluation over `iv` is backed by actual data: always true for
    /// closures, knot-span containment for tables.
    pub fn evaluable_on(&self, iv: Interval) -> bool {
        match &self.body {
            Body::Closure(_) => true,
            Body::PiecewiseLinear { knots, .. } => {
                iv.lo >= knots[0] - 1e-12 && iv.hi <= knots[knots.len() - 1] + 1e-12
            }
        }
    }
}

/// The piecewise-linear interpolant through the data: `f(y_p) = z_p` at every
/// knot, linear in between.
pub fn linear_interpolant(data: &InterpolationData) -> ScalarFunction {
    let knots: Arc<[f64]> = data.points().iter().map(|p| p.0).collect();
    let values: Arc<[f64]> = data.points().iter().map(|p| p.1).collect();
    ScalarFunction {
        domain: Interval {
            lo: knots[0],
            hi: knots[knots.len() - 1],
        },
        body: Body::PiecewiseLinear { knots, values },
    }
}

/// Base function `b(y) = g(psi(y))` with `psi(y) = y_0 + (y - y_0)^2 / (y_P - y_0)`.
///
/// `psi` maps the domain onto itself fixing both endpoints, so `b` matches `g`
/// there; on `[0, 1]` it reduces to `psi(y) = y^2`.
pub fn square_base(g: &ScalarFunction, domain: Interval) -> ScalarFunction {
    let g = g.clone();
    let (lo, hi) = (domain.lo, domain.hi);
    let len = domain.length();
    ScalarFunction::from_fn(domain, move |y| {
        if y == lo {
            g.eval(lo)
        } else if y == hi {
            g.eval(hi)
        } else {
            g.eval(lo + (y - lo) * (y - lo) / len)
        }
    })
}

/// Literal base `b(y) = g(y^2)`, for seeds evaluable wherever `y^2` lands.
///
/// Errors when `g` is a knot table that does not cover the squared range.
pub fn square_base_paper(g: &ScalarFunction, domain: Interval) -> Result<ScalarFunction, CoreError> {
    let lo2 = domain.lo * domain.lo;
    let hi2 = domain.hi * domain.hi;
    let needed_lo = if domain.contains(0.0) { 0.0 } else { lo2.min(hi2) };
    let needed_hi = lo2.max(hi2);
    let needed = Interval {
        lo: needed_lo,
        hi: needed_hi.max(needed_lo + f64::MIN_POSITIVE),
    };
    if !g.evaluable_on(needed) {
        return Err(CoreError::BaseOutOfDomain {
            needed_lo: needed.lo,
            needed_hi: needed.hi,
            have_lo: g.domain().lo,
            have_hi: g.domain().hi,
        });
    }
    let g = g.clone();
    Ok(ScalarFunction::from_fn(domain, move |y| g.eval(y * y)))
}

/// Uniform dyadic refinement of a partition: each subinterval is split into
/// `2^depth` equal cells. Node count is `P * 2^depth + 1` and every partition
/// knot is a grid node exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicGrid {
    partition: Partition,
    depth: u32,
    nodes: Vec<f64>,
}

impl DyadicGrid {
    pub fn new(partition: Partition, depth: u32) -> Self {
        assert!(depth <= 24, "dyadic depth {depth} too large");
        let cells = 1usize << depth;
        let p_count = partition.interval_count();
        let mut nodes = Vec::with_capacity(p_count * cells + 1);
        for p in 0..p_count {
            let iv = partition.interval(p);
            let w = iv.length() / cells as f64;
            for j in 0..cells {
                nodes.push(if j == 0 { iv.lo } else { iv.lo + j as f64 * w });
            }
        }
        nodes.push(partition.domain().hi);
        Self {
            partition,
            depth,
            nodes,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells_per_interval(&self) -> usize {
        1usize << self.depth
    }

    /// Owning subinterval of a node index under the half-open convention.
    pub fn node_interval(&self, idx: usize) -> usize {
        (idx / self.cells_per_interval()).min(self.partition.interval_count() - 1)
    }
}

/// Function samples on a [`DyadicGrid`], with linear interpolation between
/// nodes for off-node reads.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<DyadicGrid>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn sample(grid: Arc<DyadicGrid>, f: &ScalarFunction) -> Self {
        let values = grid.nodes().iter().map(|&y| f.eval(y)).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Arc<DyadicGrid>, values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() != grid.len() {
            return Err(CoreError::SampleLengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<DyadicGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation of the samples; arguments are clamped into the
    /// grid domain (callers only stray by rounding error).
    pub fn eval_linear(&self, y: f64) -> f64 {
        let dom = self.grid.partition().domain();
        let y = dom.clamp(y);
        let p = self
            .grid
            .partition()
            .locate(y)
            .expect("clamped point lies in the domain");
        let iv = self.grid.partition().interval(p);
        let cells = self.grid.cells_per_interval();
        let w = iv.length() / cells as f64;
        let j = (((y - iv.lo) / w) as usize).min(cells - 1);
        let base = p * cells + j;
        let (x0, x1) = (self.grid.nodes()[base], self.grid.nodes()[base + 1]);
        if y == x0 {
            return self.values[base];
        }
        let t = (y - x0) / (x1 - x0);
        self.values[base] + t * (self.values[base + 1] - self.values[base])
    }

    /// Sup-norm distance to another sample vector on the same grid.
    pub fn sup_diff(&self, other: &SampledFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spinach_points() -> Vec<(f64, f64)> {
        let z = [8.0, 7.5, 6.0, 7.0, 10.0, 5.0, 7.0, 5.5, 7.5, 8.5, 10.0];
        (0..11).map(|i| (i as f64 / 10.0, z[i])).collect()
    }

    #[test]
    fn partition_from_eleven_knots() {
        let p = make_partition((0..11).map(|i| i as f64 / 10.0).collect()).unwrap();
        assert_eq!(p.interval_count(), 10);
    }

    #[test]
    fn partition_from_uneven_knots() {
        let p = make_partition(vec![4.0, 5.0, 7.0, 7.5, 8.0, 9.0, 10.0]).unwrap();
        assert_eq!(p.interval_count(), 6);
    }

    #[test]
    fn partition_rejects_duplicate_knot() {
        let err = make_partition(vec![0.0, 0.5, 0.5, 1.0]).unwrap_err();
        match err {
            CoreError::NotStrictlyIncreasing { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn partition_rejects_too_few() {
        assert!(matches!(
            make_partition(vec![0.0, 1.0]),
            Err(CoreError::TooFewKnots { .. })
        ));
    }

    #[test]
    fn locate_follows_half_open_convention() {
        let p = make_partition(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.locate(0.0), Some(0));
        assert_eq!(p.locate(1.0), Some(1));
        assert_eq!(p.locate(2.5), Some(2));
        assert_eq!(p.locate(3.0), Some(2));
        assert_eq!(p.locate(-0.1), None);
        assert_eq!(p.locate(3.1), None);
    }

    #[test]
    fn affine_unit_to_tenth() {
        let m = affine_from_endpoints(
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.2, 0.3).unwrap(),
        )
        .unwrap();
        assert!((m.a - 0.1).abs() < 1e-15);
        assert!((m.c - 0.2).abs() < 1e-15);
    }

    #[test]
    fn affine_four_ten_to_four_five() {
        let m = affine_from_endpoints(
            Interval::new(4.0, 10.0).unwrap(),
            Interval::new(4.0, 5.0).unwrap(),
        )
        .unwrap();
        assert!((m.a - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.c - (4.0 - 4.0 / 6.0)).abs() < 1e-14);
        assert!((m.apply(4.0) - 4.0).abs() < 1e-14);
        assert!((m.apply(10.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn affine_identity_rejected() {
        let err = affine_from_endpoints(
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::NotContractive { .. }));
    }

    #[test]
    fn affine_is_exact_contraction() {
        let m = affine_from_endpoints(
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.3, 0.4).unwrap(),
        )
        .unwrap();
        for (u, v) in [(0.1, 0.9), (0.0, 1.0), (0.25, 0.7501)] {
            let lhs = (m.apply(u) - m.apply(v)).abs();
            assert!((lhs - m.a.abs() * (u - v).abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolant_reproduces_knots_exactly() {
        let data = InterpolationData::new(spinach_points()).unwrap();
        let g = linear_interpolant(&data);
        for &(y, z) in data.points() {
            assert_eq!(g.eval(y), z);
        }
    }

    #[test]
    fn interpolant_slope_on_drop_segment() {
        // segment [0.4, 0.5): z goes 10 -> 5, i.e. 30 - 50y
        let data = InterpolationData::new(spinach_points()).unwrap();
        let g = linear_interpolant(&data);
        assert!((g.eval(0.45) - (30.0 - 50.0 * 0.45)).abs() < 1e-12);
        assert!((g.eval(0.41) - (30.0 - 50.0 * 0.41)).abs() < 1e-12);
    }

    #[test]
    fn interpolant_midpoint_value() {
        let data = InterpolationData::new(spinach_points()).unwrap();
        let g = linear_interpolant(&data);
        assert!((g.eval(0.25) - 6.5).abs() < 1e-12);
    }

    #[test]
    fn interpolant_corrected_segment_on_08_09() {
        // Table slope between (0.8, 7.5) and (0.9, 8.5) is 10y - 0.5.
        let data = InterpolationData::new(spinach_points()).unwrap();
        let g = linear_interpolant(&data);
        assert!((g.eval(0.85) - 8.0).abs() < 1e-12);
        assert!((g.eval(0.82) - (10.0 * 0.82 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn two_segment_interpolant_at_knot() {
        let data =
            InterpolationData::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        let g = linear_interpolant(&data);
        assert_eq!(g.eval(1.0), 1.0);
    }

    #[test]
    fn square_base_on_unit_domain_is_g_of_y_squared() {
        let data = InterpolationData::new(spinach_points()).unwrap();
        let g = linear_interpolant(&data);
        let b = square_base(&g, g.domain());
        for y in [0.1, 0.3, 0.5, 0.77, 0.95] {
            assert!((b.eval(y) - g.eval(y * y)).abs() < 1e-12);
        }
        assert!((b.eval(0.5) - 6.5).abs() < 1e-12);
    }

    #[test]
    fn square_base_fixes_endpoints_for_any_seed() {
        let g = ScalarFunction::from_fn(Interval::new(4.0, 10.0).unwrap(), |y| y.sin());
        let b = square_base(&g, g.domain());
        assert_eq!(b.eval(4.0), g.eval(4.0));
        assert_eq!(b.eval(10.0), g.eval(10.0));
    }

    #[test]
    fn paper_square_base_needs_coverage() {
        let data = InterpolationData::new(spinach_points()).unwrap();
        let g = linear_interpolant(&data);
        // On [0,1] the squared range stays inside the table.
        assert!(square_base_paper(&g, g.domain()).is_ok());
        // A table on [4,10] cannot serve y^2 in [16,100].
        let d2 = InterpolationData::new(vec![(4.0, 0.0), (7.0, 1.0), (10.0, 0.0)]).unwrap();
        let g2 = linear_interpolant(&d2);
        assert!(matches!(
            square_base_paper(&g2, g2.domain()),
            Err(CoreError::BaseOutOfDomain { .. })
        ));
    }

    #[test]
    fn scaling_vector_rejects_unit_factor() {
        assert!(ScalingVector::new(vec![0.4, 1.0, 0.2]).is_err());
        assert!(ScalingVector::uniform(0.999, 4).is_ok());
        assert!(ScalingVector::uniform(-0.999, 4).is_ok());
    }

    #[test]
    fn collinearity_detection() {
        let flat =
            InterpolationData::new(vec![(0.0, 2.0), (0.5, 2.0), (1.0, 2.0)]).unwrap();
        assert!(flat.is_collinear());
        let sloped =
            InterpolationData::new(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 2.0)]).unwrap();
        assert!(sloped.is_collinear());
        let bent = InterpolationData::new(spinach_points()).unwrap();
        assert!(!bent.is_collinear());
    }

    #[test]
    fn dyadic_grid_contains_knots_exactly() {
        let p = make_partition(vec![4.0, 5.0, 7.0, 7.5, 8.0, 9.0, 10.0]).unwrap();
        let depth = 6;
        let grid = DyadicGrid::new(p.clone(), depth);
        assert_eq!(grid.len(), 6 * (1 << depth) + 1);
        for &k in p.knots() {
            assert!(grid.nodes().contains(&k));
        }
    }

    #[test]
    fn sampled_function_round_trips_nodes() {
        let p = make_partition(vec![0.0, 0.5, 1.0]).unwrap();
        let grid = Arc::new(DyadicGrid::new(p, 7));
        let f = ScalarFunction::from_fn(Interval::new(0.0, 1.0).unwrap(), |y| y * y - y);
        let s = SampledFunction::sample(grid.clone(), &f);
        for (i, &y) in grid.nodes().iter().enumerate() {
            assert_eq!(s.eval_linear(y), s.values()[i]);
        }
    }

    #[test]
    fn sampled_function_interpolates_linearly() {
        let p = make_partition(vec![0.0, 0.5, 1.0]).unwrap();
        let grid = Arc::new(DyadicGrid::new(p, 4));
        let f = ScalarFunction::from_fn(Interval::new(0.0, 1.0).unwrap(), |y| 3.0 * y + 1.0);
        let s = SampledFunction::sample(grid, &f);
        for y in [0.013, 0.27, 0.502, 0.9311] {
            assert!((s.eval_linear(y) - (3.0 * y + 1.0)).abs() < 1e-12);
        }
    }
}
