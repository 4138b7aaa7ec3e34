//! Assembles the iterated function system `{K; w_p}` from interpolation data,
//! a scaling vector and seed/base functions, renders its graph attractor by
//! chaos game or deterministic Hutchinson iteration, and measures point-cloud
//! distances under the Hausdorff metric.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::core::{
    affine_from_endpoints, AffineMap, CoreError, Interval, InterpolationData, ScalarFunction,
    ScalingVector,
};

#[derive(Debug, Error)]
pub enum IfsError {
    #[error("scaling vector has {actual} entries but the data defines {expected} intervals")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("seed function misses the data: g({knot}) = {actual}, expected {expected}")]
    SeedMismatch {
        knot: f64,
        expected: f64,
        actual: f64,
    },
    #[error("base endpoint mismatch at y = {endpoint}: b = {base}, g = {seed}")]
    BaseEndpointMismatch {
        endpoint: f64,
        seed: f64,
        base: f64,
    },
    #[error("base function coincides with the seed on the probe grid; pick a distinct base (or set alpha to zero)")]
    BaseEqualsSeed,
    #[error("join condition violated at interval {p}: |F_p endpoint - data| = {deviation}")]
    JoinCondition { p: usize, deviation: f64 },
    #[error("operation requires a nonempty point cloud")]
    EmptyCloud,
    #[error("at least one iteration is required")]
    NoIterations,
    #[error(transparent)]
    Core(#[from] CoreError),
}

const JOIN_TOL: f64 = 1e-10;

/// The IFS `{K; w_p(y, z) = (L_p(y), alpha_p z + q_p(y))}` built from data,
/// with `q_p(y) = g(L_p(y)) - alpha_p b(y)` on the full domain.
#[derive(Debug, Clone)]
pub struct IfsSystem {
    data: InterpolationData,
    maps: Vec<AffineMap>,
    alpha: ScalingVector,
    q: Vec<ScalarFunction>,
    g: ScalarFunction,
    b: ScalarFunction,
}

/// Validates the inputs and assembles an [`IfsSystem`]; the endpoint join
/// conditions `w_p(y_0, z_0) = (y_{p-1}, z_{p-1})`, `w_p(y_P, z_P) = (y_p, z_p)`
/// are verified to 1e-10.
pub fn build_ifs(
    data: &InterpolationData,
    alpha: &ScalingVector,
    g: &ScalarFunction,
    b: &ScalarFunction,
) -> Result<IfsSystem, IfsError> {
    IfsSystem::build(data.clone(), alpha.clone(), g.clone(), b.clone())
}

impl IfsSystem {
    pub fn build(
        data: InterpolationData,
        alpha: ScalingVector,
        g: ScalarFunction,
        b: ScalarFunction,
    ) -> Result<Self, IfsError> {
        let partition = data.partition();
        let p_count = partition.interval_count();
        if alpha.len() != p_count {
            return Err(IfsError::LengthMismatch {
                expected: p_count,
                actual: alpha.len(),
            });
        }
        for &(y, z) in data.points() {
            let got = g.eval(y);
            if (got - z).abs() > JOIN_TOL {
                return Err(IfsError::SeedMismatch {
                    knot: y,
                    expected: z,
                    actual: got,
                });
            }
        }
        let domain = partition.domain();
        for endpoint in [domain.lo, domain.hi] {
            let (gs, bs) = (g.eval(endpoint), b.eval(endpoint));
            if (gs - bs).abs() > JOIN_TOL {
                return Err(IfsError::BaseEndpointMismatch {
                    endpoint,
                    seed: gs,
                    base: bs,
                });
            }
        }
        if !alpha.is_zero() {
            let distinct = (0..=512).any(|i| {
                let y = domain.lo + domain.length() * i as f64 / 512.0;
                g.eval(y) != b.eval(y)
            });
            if !distinct {
                return Err(IfsError::BaseEqualsSeed);
            }
        }

        let maps = (0..p_count)
            .map(|p| affine_from_endpoints(domain, partition.interval(p)))
            .collect::<Result<Vec<_>, _>>()?;

        let q: Vec<ScalarFunction> = maps
            .iter()
            .zip(alpha.alphas())
            .map(|(&map, &a)| {
                let (gq, bq) = (g.clone(), b.clone());
                ScalarFunction::from_fn(domain, move |y| gq.eval(map.apply(y)) - a * bq.eval(y))
            })
            .collect();

        let system = Self {
            data,
            maps,
            alpha,
            q,
            g,
            b,
        };

        for p in 0..p_count {
            let (y0, z0) = system.data.points()[0];
            let (yp_last, zp_last) = *system.data.points().last().unwrap();
            let left = system.vertical_map(p, y0, z0);
            let right = system.vertical_map(p, yp_last, zp_last);
            let dev = (left - system.data.ordinate(p))
                .abs()
                .max((right - system.data.ordinate(p + 1)).abs());
            if dev > JOIN_TOL {
                return Err(IfsError::JoinCondition { p, deviation: dev });
            }
        }
        Ok(system)
    }

    pub fn data(&self) -> &InterpolationData {
        &self.data
    }

    pub fn alpha(&self) -> &ScalingVector {
        &self.alpha
    }

    pub fn seed(&self) -> &ScalarFunction {
        &self.g
    }

    pub fn base(&self) -> &ScalarFunction {
        &self.b
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn interval_count(&self) -> usize {
        self.maps.len()
    }

    pub fn domain(&self) -> Interval {
        self.data.partition().domain()
    }

    /// `q_p` evaluated at `y` (0-based `p`).
    pub fn q(&self, p: usize, y: f64) -> f64 {
        self.q[p].eval(y)
    }

    /// `F_p(y, z) = alpha_p z + q_p(y)`.
    pub fn vertical_map(&self, p: usize, y: f64, z: f64) -> f64 {
        self.alpha.alphas()[p] * z + self.q[p].eval(y)
    }

    /// `w_p(y, z) = (L_p(y), F_p(y, z))`.
    pub fn point_map(&self, p: usize, point: (f64, f64)) -> (f64, f64) {
        (self.maps[p].apply(point.0), self.vertical_map(p, point.0, point.1))
    }
}

/// A finite multiset of `(y, z)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<(f64, f64)>,
}

impl PointCloud {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Self { points }
    }

    pub fn from_data(data: &InterpolationData) -> Self {
        Self {
            points: data.points().to_vec(),
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `((y_min, y_max), (z_min, z_max))`, or `None` for an empty cloud.
    pub fn bounding_box(&self) -> Option<((f64, f64), (f64, f64))> {
        if self.points.is_empty() {
            return None;
        }
        let mut yb = (f64::INFINITY, f64::NEG_INFINITY);
        let mut zb = (f64::INFINITY, f64::NEG_INFINITY);
        for &(y, z) in &self.points {
            yb = (yb.0.min(y), yb.1.max(y));
            zb = (zb.0.min(z), zb.1.max(z));
        }
        Some((yb, zb))
    }

    /// Affine rescale of the bounding box onto the unit square; a degenerate
    /// axis collapses to 0.
    pub fn normalized_to_unit_square(&self) -> PointCloud {
        let Some(((ylo, yhi), (zlo, zhi))) = self.bounding_box() else {
            return self.clone();
        };
        let yw = yhi - ylo;
        let zw = zhi - zlo;
        let points = self
            .points
            .iter()
            .map(|&(y, z)| {
                (
                    if yw > 0.0 { (y - ylo) / yw } else { 0.0 },
                    if zw > 0.0 { (z - zlo) / zw } else { 0.0 },
                )
            })
            .collect();
        PointCloud { points }
    }
}

/// One application of the Hutchinson operator: the union of `w_p(cloud)` over
/// all maps, so the output has `P` times the input cardinality.
pub fn hutchinson_step(ifs: &IfsSystem, cloud: &PointCloud) -> Result<PointCloud, IfsError> {
    if cloud.is_empty() {
        return Err(IfsError::EmptyCloud);
    }
    let mut out = Vec::with_capacity(cloud.len() * ifs.interval_count());
    for p in 0..ifs.interval_count() {
        for &point in cloud.points() {
            out.push(ifs.point_map(p, point));
        }
    }
    Ok(PointCloud::new(out))
}

/// Repeated Hutchinson steps with deterministic stride decimation to stay
/// under `cap` points per round.
pub fn deterministic_attractor(
    ifs: &IfsSystem,
    seed: &PointCloud,
    iterations: usize,
    cap: usize,
) -> Result<PointCloud, IfsError> {
    if iterations == 0 {
        return Err(IfsError::NoIterations);
    }
    if seed.is_empty() {
        return Err(IfsError::EmptyCloud);
    }
    let cap = cap.max(1);
    let mut cloud = seed.clone();
    for _ in 0..iterations {
        let mut next = hutchinson_step(ifs, &cloud)?;
        if next.len() > cap {
            let stride = next.len().div_ceil(cap);
            let kept: Vec<(f64, f64)> = next
                .points()
                .iter()
                .copied()
                .step_by(stride)
                .collect();
            next = PointCloud::new(kept);
        }
        cloud = next;
    }
    Ok(cloud)
}

/// Random-iteration rendering: starting from `(y_0, z_0)`, applies a uniformly
/// chosen `w_p` per step, discarding the first `burn_in` points. Bit-identical
/// for a fixed seed.
pub fn chaos_game(ifs: &IfsSystem, n_points: usize, burn_in: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_count = ifs.interval_count();
    let mut point = ifs.data().points()[0];
    let mut out = Vec::with_capacity(n_points);
    for i in 0..burn_in + n_points {
        let p = rng.gen_range(0..p_count);
        point = ifs.point_map(p, point);
        if i >= burn_in {
            out.push(point);
        }
    }
    PointCloud::new(out)
}

fn directed_sq(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    from.par_chunks(2048)
        .map(|chunk| {
            let mut cmax = 0.0f64;
            for &(x, y) in chunk {
                let mut cmin = f64::INFINITY;
                for &(u, v) in to {
                    let d = (x - u) * (x - u) + (y - v) * (y - v);
                    if d <= cmax {
                        // this point cannot raise the directed max
                        cmin = -1.0;
                        break;
                    }
                    if d < cmin {
                        cmin = d;
                    }
                }
                if cmin > cmax && cmin.is_finite() {
                    cmax = cmin;
                }
            }
            cmax
        })
        .reduce(|| 0.0, f64::max)
}

/// Exact Hausdorff distance between two clouds under the Euclidean ground
/// metric: the max of the two directed sup-inf distances, by brute-force pair
/// scan (the outer loop is partitioned across workers; the max-reduction makes
/// the result identical to a sequential scan).
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64, IfsError> {
    if a.is_empty() || b.is_empty() {
        return Err(IfsError::EmptyCloud);
    }
    let ab = directed_sq(a.points(), b.points());
    let ba = directed_sq(b.points(), a.points());
    Ok(ab.max(ba).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{linear_interpolant, square_base, square_base_paper};
    use crate::data_io::{figure1_fixture, normalize_series, spinach_fixture};

    fn spinach_data() -> InterpolationData {
        normalize_series(&spinach_fixture())
    }

    fn spinach_system(alpha: f64) -> IfsSystem {
        let data = spinach_data();
        let g = linear_interpolant(&data);
        let b = square_base(&g, g.domain());
        let sv = ScalingVector::uniform(alpha, data.len() - 1).unwrap();
        IfsSystem::build(data, sv, g, b).unwrap()
    }

    #[test]
    fn spinach_system_has_tenth_ratios() {
        let sys = spinach_system(0.4);
        assert_eq!(sys.interval_count(), 10);
        for map in sys.maps() {
            assert!((map.a - 0.1).abs() < 1e-14);
        }
    }

    #[test]
    fn figure1_system_with_paper_literal_base() {
        // Seed: the continuous example map restricted to [4,10]; its square
        // base is identically zero there, and endpoints match since the seed
        // vanishes at 4 and 10.
        let data = figure1_fixture();
        let g = ScalarFunction::from_fn(
            Interval::new(4.0, 10.0).unwrap(),
            crate::contraction::example_t_continuous,
        );
        let b = square_base_paper(&g, g.domain()).unwrap();
        for y in [4.0, 5.5, 8.2, 10.0] {
            assert_eq!(b.eval(y), 0.0);
        }
        let sv = ScalingVector::uniform(0.5, 6).unwrap();
        let sys = IfsSystem::build(data, sv, g, b).unwrap();
        assert_eq!(sys.interval_count(), 6);
    }

    #[test]
    fn scaling_vector_of_ones_is_rejected_upstream() {
        assert!(ScalingVector::new(vec![0.4, 1.0]).is_err());
    }

    #[test]
    fn build_rejects_wrong_alpha_length() {
        let data = spinach_data();
        let g = linear_interpolant(&data);
        let b = square_base(&g, g.domain());
        let sv = ScalingVector::uniform(0.4, 7).unwrap();
        assert!(matches!(
            IfsSystem::build(data, sv, g, b),
            Err(IfsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn build_rejects_non_interpolating_seed() {
        let data = spinach_data();
        let g = ScalarFunction::from_fn(Interval::new(0.0, 1.0).unwrap(), |_| 1.0);
        let b = square_base(&g, g.domain());
        let sv = ScalingVector::uniform(0.4, 10).unwrap();
        assert!(matches!(
            IfsSystem::build(data, sv, g, b),
            Err(IfsError::SeedMismatch { .. })
        ));
    }

    #[test]
    fn build_rejects_base_equal_to_seed() {
        let data = spinach_data();
        let g = linear_interpolant(&data);
        let sv = ScalingVector::uniform(0.4, 10).unwrap();
        assert!(matches!(
            IfsSystem::build(data.clone(), sv, g.clone(), g.clone()),
            Err(IfsError::BaseEqualsSeed)
        ));
        // ...but allows it on the zero-alpha path, where the base never enters.
        let zero = ScalingVector::uniform(0.0, 10).unwrap();
        assert!(IfsSystem::build(data, zero, g.clone(), g).is_ok());
    }

    #[test]
    fn join_conditions_hold() {
        let sys = spinach_system(0.4);
        let pts = sys.data().points();
        let (first, last) = (pts[0], *pts.last().unwrap());
        for p in 0..sys.interval_count() {
            let left = sys.point_map(p, first);
            let right = sys.point_map(p, last);
            assert!((left.0 - pts[p].0).abs() < 1e-10);
            assert!((left.1 - pts[p].1).abs() < 1e-10);
            assert!((right.0 - pts[p + 1].0).abs() < 1e-10);
            assert!((right.1 - pts[p + 1].1).abs() < 1e-10);
        }
    }

    #[test]
    fn hutchinson_multiplies_cardinality_and_hits_knots() {
        let sys = spinach_system(0.4);
        let cloud = PointCloud::from_data(sys.data());
        let image = hutchinson_step(&sys, &cloud).unwrap();
        assert_eq!(image.len(), cloud.len() * 10);
        for &(y, z) in sys.data().points() {
            assert!(image
                .points()
                .iter()
                .any(|&(py, pz)| (py - y).abs() < 1e-10 && (pz - z).abs() < 1e-10));
        }
    }

    #[test]
    fn hutchinson_rejects_empty_cloud() {
        let sys = spinach_system(0.4);
        assert!(matches!(
            hutchinson_step(&sys, &PointCloud::new(vec![])),
            Err(IfsError::EmptyCloud)
        ));
    }

    #[test]
    fn zero_alpha_keeps_graph_points_on_graph() {
        let sys = spinach_system(0.0);
        let g = sys.seed().clone();
        let cloud = PointCloud::new(
            (0..=40)
                .map(|i| {
                    let y = i as f64 / 40.0;
                    (y, g.eval(y))
                })
                .collect(),
        );
        let image = hutchinson_step(&sys, &cloud).unwrap();
        for &(y, z) in image.points() {
            assert!((z - g.eval(y)).abs() < 1e-9);
        }
    }

    #[test]
    fn one_iteration_equals_hutchinson_step() {
        let sys = spinach_system(0.4);
        let seedc = PointCloud::from_data(sys.data());
        let a = deterministic_attractor(&sys, &seedc, 1, 1_000_000).unwrap();
        let b = hutchinson_step(&sys, &seedc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_render_covers_domain() {
        let sys = spinach_system(0.4);
        let seedc = PointCloud::from_data(sys.data());
        let cloud = deterministic_attractor(&sys, &seedc, 12, 200_000).unwrap();
        let mut ys: Vec<f64> = cloud.points().iter().map(|p| p.0).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut max_gap = ys[0] - 0.0;
        for w in ys.windows(2) {
            max_gap = max_gap.max(w[1] - w[0]);
        }
        max_gap = max_gap.max(1.0 - ys.last().unwrap());
        assert!(max_gap < 1e-3, "max y-gap {max_gap}");
    }

    #[test]
    fn zero_alpha_attractor_is_the_interpolant_graph() {
        let sys = spinach_system(0.0);
        let g = sys.seed().clone();
        let seedc = PointCloud::from_data(sys.data());
        let cloud = deterministic_attractor(&sys, &seedc, 8, 100_000).unwrap();
        for &(y, z) in cloud.points() {
            assert!((z - g.eval(y)).abs() < 1e-9);
        }
    }

    #[test]
    fn chaos_game_is_reproducible() {
        let sys = spinach_system(0.6);
        let a = chaos_game(&sys, 10, 0, 7);
        let b = chaos_game(&sys, 10, 0, 7);
        assert_eq!(a, b);
        let c = chaos_game(&sys, 10, 0, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn chaos_game_stays_in_perturbation_band() {
        let sys = spinach_system(0.6);
        let grid: Vec<f64> = (0..=4096).map(|i| i as f64 / 4096.0).collect();
        let gb_sup = grid
            .iter()
            .map(|&y| (sys.seed().eval(y) - sys.base().eval(y)).abs())
            .fold(0.0f64, f64::max);
        let slack = 0.6 / 0.4 * gb_sup + 1e-6;
        let zs: Vec<f64> = sys.data().points().iter().map(|p| p.1).collect();
        let (zmin, zmax) = (
            zs.iter().fold(f64::INFINITY, |m, &z| m.min(z)),
            zs.iter().fold(f64::NEG_INFINITY, |m, &z| m.max(z)),
        );
        let cloud = chaos_game(&sys, 100_000, 100, 42);
        let ((ylo, yhi), _) = cloud.bounding_box().unwrap();
        assert!(ylo >= 0.0 && yhi <= 1.0);
        for &(_, z) in cloud.points() {
            assert!(z >= zmin - slack && z <= zmax + slack, "z = {z} out of band");
        }
    }

    #[test]
    fn zero_alpha_chaos_game_lies_on_graph() {
        let sys = spinach_system(0.0);
        let g = sys.seed().clone();
        let cloud = chaos_game(&sys, 10_000, 100, 42);
        for &(y, z) in cloud.points() {
            assert!((z - g.eval(y)).abs() < 1e-9);
        }
    }

    #[test]
    fn hausdorff_basics() {
        let a = PointCloud::new(vec![(0.0, 0.0)]);
        let b = PointCloud::new(vec![(3.0, 4.0)]);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 5.0);
        let c = PointCloud::new(vec![(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(hausdorff_distance(&c, &a).unwrap(), 1.0);
        assert!(hausdorff_distance(&a, &PointCloud::new(vec![])).is_err());
    }

    #[test]
    fn rendered_attractor_is_nearly_invariant() {
        // Hausdorff distance between a render and its one-step image stays
        // within twice the render's own resolution (measured against a finer
        // reference render).
        let sys = spinach_system(0.4);
        let seedc = PointCloud::from_data(sys.data());
        let render = deterministic_attractor(&sys, &seedc, 6, 20_000).unwrap();
        let reference = deterministic_attractor(&sys, &seedc, 10, 200_000).unwrap();
        let resolution = hausdorff_distance(&render, &reference).unwrap();
        let step = hutchinson_step(&sys, &render).unwrap();
        let drift = hausdorff_distance(&render, &step).unwrap();
        assert!(
            drift <= 2.0 * resolution + 1e-3,
            "drift {drift} vs resolution {resolution}"
        );
    }

    #[test]
    fn successive_renders_converge_monotonically() {
        let sys = spinach_system(0.4);
        let cap = 200_000;
        let seedc = PointCloud::from_data(sys.data());
        let mut clouds = vec![seedc.clone()];
        let mut current = seedc;
        for _ in 0..8 {
            current = deterministic_attractor(&sys, &current, 1, cap).unwrap();
            clouds.push(current.clone());
        }
        let gaps: Vec<f64> = clouds
            .windows(2)
            .map(|w| hausdorff_distance(&w[0], &w[1]).unwrap())
            .collect();
        let noise = 10.0 * (cap as f64).powf(-0.6);
        for n in 3..gaps.len() {
            assert!(
                gaps[n] <= gaps[n - 1] + noise,
                "gap grew at step {n}: {} -> {}",
                gaps[n - 1],
                gaps[n]
            );
        }
    }
}
