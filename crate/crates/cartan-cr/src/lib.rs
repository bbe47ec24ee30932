//! Cartan CR curvature of Levi-nondegenerate real hypersurfaces in complex
//! dimension 2.
//!
//! The crate computes the essential complex Cartan invariant two ways — from a
//! local graphing function v = phi(x, y, u) ([`graph`]) and from an implicit
//! defining function 0 = F(z, w, zb, wb) ([`implicit`]) — on top of an
//! exact-truncation jet kernel ([`jet`]) and a small expression language
//! ([`expr`]). A gallery of Grauert-tube boundary models ([`models`]) and a
//! grid scanner for CR-umbilical points ([`scan`]) sit on top.

pub mod expr;
pub mod graph;
pub mod implicit;
pub mod jet;
pub mod models;
pub mod scan;

pub use expr::{EvalError, Expr, ParseError};
pub use graph::{
    apply_vector_field, cartan_invariant, key_function_pbar, levi_factor, CartanGraphResult,
    FieldKind, GraphError, GraphHypersurface, GraphOptions,
};
pub use implicit::{
    cartan_locus_iw, lbar_apply, second_order_combinations, ImplicitError, ImplicitHypersurface,
    ImplicitOptions, ImplicitResult,
};
pub use jet::{ArithOp, Jet, JetError, JetFn, MultiIndex, Scalar};
pub use models::{
    build_model, catalog, distance_to_real_set, eps_reparam, heisenberg, hyperbolic_tube,
    hyperbolic_tube_eps, product_tube, psh_check, rho_hyperbolic, sphere_tube, torus_tube,
    unit_sphere, Chart, ChartSurface, LevelConvention, MetricKind, ModelDescriptor, ModelEntry,
    ModelError, ModelKind, PshResult,
};
pub use scan::{
    cross_check, eval_chart_point, scan_grid, write_csv, write_summary_json, Candidate,
    CrossCheckReport, EngineSel, PointEval, RangeSpec, ScanConfig, ScanError, ScanOutput,
    ScanRecord, ScanSummary, Status,
};

pub use num_complex::Complex64;
