//! Barypolygonal sequences, their derived parameter system and dual
//! sequences.
//!
//! * [`affine`]: points, families, barycenters.
//! * [`barypolygonal`]: the barypolygon step, iterated sequences and the
//!   closed-form limit point.
//! * [`derived`]: the derived system on parameter vectors, its conjugate,
//!   `alpha_p`, the three-component stability analysis and classification.
//! * [`dual`]: the sequence of limit points driven by the derived system.
//! * [`io`]: JSON configs, CSV/JSON trace files, SVG figures.
//! * [`cli`]: the `barypoly` command line.

pub mod affine;
pub mod barypolygonal;
pub mod cli;
pub mod derived;
pub mod dual;
pub mod error;
pub mod io;

pub use affine::{barycenter, centroid, diameter, AffinePoint, PointFamily, WeightVector};
pub use barypolygonal::{
    barypolygon_step, convergence_gap, iterate_sequence, limit_point, limit_weights, ParamVector, PolygonTrace,
};
pub use derived::{
    classify_dynamics, conjugate_step, derived_step, derived_trace, solve_alpha, ClassifyConfig, ConjugateState,
    DerivedTrace, DynamicsClass, Tolerances, Verdict,
};
pub use dual::{centroid_convergence_report, dual_point, dual_trace, DualTrace};
pub use error::{Error, Result};
