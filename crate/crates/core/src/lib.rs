//! Estimation of common stochastic trends and functional factor loadings
//! from large panels of nonstationary curve time series.
//!
//! Curves are stored as coefficient vectors against an orthonormal Fourier
//! basis, so every functional inner product reduces to a dot product. On top
//! of that representation the crate provides:
//!
//! - [`fpca`]: levels-based functional PCA (trends normalized by `T^2`),
//! - [`panic`]: functional PANIC on first differences, with cumulated trends,
//! - [`selection`]: eigenvalue information criteria for the number of trends
//!   and BIC/HQ cointegrating-rank selection via reduced-rank regression,
//! - [`simulate`] and [`metrics`]: the two Monte Carlo designs and the
//!   rotation-minimized approximation errors used to score them,
//! - [`regress`]: OLS summaries for regressing trend increments on external
//!   factors.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, plotting and
//! the command-line front end live in the `curvetrend` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod fpca;
pub mod funcspace;
pub mod linalg;
pub mod metrics;
pub mod panel;
pub mod panic;
pub mod regress;
pub mod selection;
pub mod simulate;

pub use error::{Error, Result};
pub use fpca::{fit_fpca, rotation_matrix, FactorFit};
pub use funcspace::{
    apply_operator, fourier_basis, inner_product, interpolate_gaps, smooth_to_basis, BasisSpec,
    Curve, KernelOperator, Smoother, VectorCurve,
};
pub use linalg::Mat;
pub use panel::{difference, gram, CurvePanel, GramMatrix, GramMode, Series};
pub use panic::fit_panic;
pub use metrics::{ae_factors, ae_factors_with, ae_loadings, ae_loadings_with, confusion_counts, Confusion, Rotation};
pub use regress::{ols, OlsSummary};
pub use simulate::{generate, run_replication, run_replications, Design, Recipe, ReplicationReport, SimConfig, SimTruth};
pub use selection::{
    rrr_fit, select_coint_rank, select_q_diff, select_q_levels, RankCriterion, RankDecision,
    SelectionMethod, VecmFit,
};
