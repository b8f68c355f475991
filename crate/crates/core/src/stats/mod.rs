//! Statistical kernel: rank correlation, least-squares and logistic
//! regression, prediction scores and two-sample tests.

mod eval;
mod linalg;
mod model;
mod nonparam;
mod rank;

pub use eval::{auc, mse};
pub use linalg::{least_squares, LeastSquares};
pub use model::{adjusted_r2, fit_linear, fit_logistic, DesignMatrix, FittedModel, ModelKind};
pub use nonparam::{
    cliffs_delta, mann_whitney_exact, mann_whitney_normal, mann_whitney_u, EffectSize, Magnitude,
    MannWhitney,
};
pub use rank::{mid_ranks, pearson, spearman, try_spearman};
