//! Numerical continuation and critical-point analysis for the
//! one-dimensional Bratu problem `u'' + lambda e^u = 0`, `u(+-1) = 0`.
//!
//! - [`linalg`]: tridiagonal solves, bordered solves, Sturm-sequence eigenpairs.
//! - [`analytic`]: the closed-form branch and its criticality condition.
//! - [`discretize`]: finite-difference and finite-element residuals/tangents.
//! - [`continuation`]: pseudo-arclength tracing and critical-point location.
//! - [`scan`]: kernel sweeps of the linearized operator in `alpha`.

pub mod analytic;
pub mod continuation;
pub mod discretize;
pub mod error;
pub mod linalg;
pub mod scan;

pub use analytic::{CriticalityRoot, ExactBranchPoint};
pub use continuation::{
    BifurcationSearch, BranchPoint, BranchTracer, ContinuationConfig, CriticalKind, CriticalPoint, CriticalSearch,
};
pub use discretize::{DiscreteState, Grid, Scheme, SchemeKind};
pub use error::{BratuError, Result};
pub use linalg::{BorderedSystem, SymTridiag, Tridiag};
pub use scan::{ScanForm, ScanResult, ScanRoot};
