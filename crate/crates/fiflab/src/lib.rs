//! Fractal interpolation functions from iterated function systems.
//!
//! The crate builds alpha-fractal interpolation functions as fixed points of
//! the Read-Bajraktarevic operator over an IFS whose vertical maps are scaled
//! by a vector `alpha`, checks contraction conditions (Banach, phi, and
//! Suzuki-type generalized phi) on concrete self-maps by grid scanning,
//! renders graph attractors by chaos game or deterministic Hutchinson
//! iteration, and computes box dimensions both analytically (the Moran-type
//! equation) and empirically (box counting on point clouds).
//!
//! ```
//! use fiflab::core::{linear_interpolant, square_base, ScalingVector};
//! use fiflab::data_io::{normalize_series, spinach_fixture};
//! use fiflab::fif::construct_alpha_fif;
//!
//! let data = normalize_series(&spinach_fixture());
//! let g = linear_interpolant(&data);
//! let b = square_base(&g, g.domain());
//! let alpha = ScalingVector::uniform(0.4, 10).unwrap();
//! let fif = construct_alpha_fif(&data, &g, &b, &alpha, 8, 1e-9, 200).unwrap();
//! // the fixed point interpolates the data
//! assert!((fif.eval(0.4, None).unwrap() - 10.0).abs() < 1e-8);
//! ```

pub mod cli;
pub mod contraction;
pub mod core;
pub mod data_io;
pub mod dimension;
pub mod expr;
pub mod fif;
pub mod ifs;

pub use crate::core::{
    affine_from_endpoints, linear_interpolant, make_partition, square_base, square_base_paper,
    AffineMap, CoreError, DyadicGrid, InterpolationData, Interval, Partition, SampledFunction,
    ScalarFunction, ScalingVector,
};
pub use contraction::{
    check_banach, check_phi, check_suzuki, picard_fixed_point, CheckMode, CheckReport,
    ContractionError, ContractionModulus, FixedPointResult, MetricSelfMap, Verdict, Witness,
};
pub use data_io::{
    figure1_fixture, load_price_csv, normalize_series, spinach_fixture, DataError, PriceRow,
    PriceSeries,
};
pub use dimension::{
    analytic_box_dimension, box_count, estimate_box_dimension, DimensionError, DimensionMethod,
    DimensionResult,
};
pub use fif::{
    construct_alpha_fif, perturbation_bound, rb_apply, rb_residual, FifError, FifMetadata,
    FractalFunction,
};
pub use ifs::{
    build_ifs, chaos_game, deterministic_attractor, hausdorff_distance, hutchinson_step,
    IfsError, IfsSystem, PointCloud,
};
