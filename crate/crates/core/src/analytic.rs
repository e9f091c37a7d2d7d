//! Closed-form solution branch of `u'' + lambda e^u = 0`, `u(+-1) = 0`.
//!
//! The nontrivial solutions form a one-parameter family in `alpha >= 0`:
//!
//! ```text
//! u0(x)   = -2 ln( cosh(alpha x) / cosh(alpha) )
//! lambda0 = 2 (alpha / cosh(alpha))^2
//! u*      = u0(0) = 2 ln cosh(alpha)
//! ```
//!
//! The linearization about this family has a nontrivial kernel only where
//! `alpha tanh(alpha) = 1`, spanned by `w(x) = alpha x tanh(alpha x) - 1`.
//! All formulas are evaluated in log-stable form because `cosh` overflows
//! near `alpha = 710`.

use serde::Serialize;
use std::f64::consts::LN_2;

use crate::error::{BratuError, Result};

/// Fallback bracket for the criticality root.
const ROOT_BRACKET: (f64, f64) = (0.5, 3.0);
/// Adaptive Simpson settings for the limit-point inner product.
const QUAD_TOL: f64 = 1e-12;
const QUAD_MAX_DEPTH: usize = 40;

/// A point on the exact solution branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactBranchPoint {
    pub alpha: f64,
    pub lambda0: f64,
    pub u_star: f64,
}

impl ExactBranchPoint {
    /// `u0(x; alpha)`.
    pub fn u0(&self, x: f64) -> f64 {
        exact_solution(self.alpha, x)
    }
}

/// The unique positive root of `alpha tanh(alpha) = 1` and derived values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalityRoot {
    pub alpha_bar: f64,
    pub lambda_bar: f64,
    pub u_star_bar: f64,
    pub inner_product: f64,
}

/// Closed-form and quadrature values of `<w, e^{u0}>` at the fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerProductCheck {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl InnerProductCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.closed_form - self.quadrature).abs() / self.closed_form.abs()
    }
}

/// `ln cosh(x)` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a < 20.0 {
        (2.0 * (0.5 * a).sinh().powi(2)).ln_1p()
    } else {
        a + (-2.0 * a).exp().ln_1p() - LN_2
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(BratuError::Domain(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

/// `u0(x; alpha) = -2 (ln cosh(alpha x) - ln cosh(alpha))`.
pub fn exact_solution(alpha: f64, x: f64) -> f64 {
    -2.0 * (ln_cosh(alpha * x) - ln_cosh(alpha))
}

/// `lambda0(alpha) = 2 (alpha / cosh alpha)^2`, via its logarithm.
pub fn lambda_of_alpha(alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    (LN_2 + 2.0 * alpha.ln() - 2.0 * ln_cosh(alpha)).exp()
}

/// `u* = 2 ln cosh(alpha)`.
pub fn ustar_of_alpha(alpha: f64) -> f64 {
    2.0 * ln_cosh(alpha)
}

pub fn exact_branch(alpha: f64) -> Result<ExactBranchPoint> {
    check_alpha(alpha)?;
    Ok(ExactBranchPoint {
        alpha,
        lambda0: lambda_of_alpha(alpha),
        u_star: ustar_of_alpha(alpha),
    })
}

/// Inverse of `u* = 2 ln cosh(alpha)`:
/// `alpha = acosh(e^{u*/2}) = u*/2 + ln(1 + sqrt(1 - e^{-u*}))`.
pub fn alpha_from_ustar(u_star: f64) -> Result<f64> {
    if !u_star.is_finite() || u_star < 0.0 {
        return Err(BratuError::Domain(format!("u* must be finite and >= 0, got {u_star}")));
    }
    Ok(0.5 * u_star + (-(-u_star).exp_m1()).sqrt().ln_1p())
}

/// `f(alpha) = alpha tanh(alpha) - 1`.
pub fn criticality_function(alpha: f64) -> f64 {
    alpha * alpha.tanh() - 1.0
}

fn criticality_derivative(alpha: f64) -> f64 {
    let sech = 1.0 / alpha.cosh();
    alpha.tanh() + alpha * sech * sech
}

/// Safeguarded Newton for the criticality root, starting at `alpha = 1`.
pub fn find_alpha_bar() -> CriticalityRoot {
    let (mut lo, mut hi) = ROOT_BRACKET;
    let mut alpha = 1.0;
    for _ in 0..200 {
        let f = criticality_function(alpha);
        if f.abs() <= 1e-15 {
            break;
        }
        if f < 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let newton = alpha - f / criticality_derivative(alpha);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next == alpha {
            break;
        }
        alpha = next;
    }
    CriticalityRoot {
        alpha_bar: alpha,
        lambda_bar: lambda_of_alpha(alpha),
        u_star_bar: ustar_of_alpha(alpha),
        inner_product: inner_product_closed_form(alpha),
    }
}

/// `w(x) = alpha x tanh(alpha x) - 1`, the kernel at the fold.
pub fn kernel_function(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(BratuError::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(BratuError::Domain(format!("x = {x} outside [-1, 1]")));
    }
    Ok(alpha * x * (alpha * x).tanh() - 1.0)
}

/// General solution of the linearized equation written in `x`:
/// `c1 tanh(alpha x) + c2 (alpha x tanh(alpha x) - 1)`.
pub fn legendre_general_solution(c1: f64, c2: f64, alpha: f64, x: f64) -> f64 {
    let t = (alpha * x).tanh();
    c1 * t + c2 * (alpha * x * t - 1.0)
}

/// The same solution in the Legendre variable `t = tanh(alpha x)`:
/// `c1 t + c2 (-t/2 ln((1-t)/(1+t)) - 1)`.
pub fn legendre_general_solution_t(c1: f64, c2: f64, t: f64) -> f64 {
    c1 * t + c2 * (-0.5 * t * ((1.0 - t) / (1.0 + t)).ln() - 1.0)
}

/// `-(1 + sinh(a) cosh(a) / a)`.
pub fn inner_product_closed_form(alpha_bar: f64) -> f64 {
    -(1.0 + alpha_bar.sinh() * alpha_bar.cosh() / alpha_bar)
}

/// Evaluates `<w, e^{u0}>` at the fold both in closed form and by adaptive
/// Simpson quadrature.
pub fn inner_product_limit_test(alpha_bar: f64) -> Result<InnerProductCheck> {
    if !(alpha_bar > 0.0) || criticality_function(alpha_bar).abs() > 1e-8 {
        return Err(BratuError::Domain(format!(
            "alpha = {alpha_bar} does not satisfy alpha tanh(alpha) = 1"
        )));
    }
    let c2 = alpha_bar.cosh().powi(2);
    let integrand = |x: f64| {
        let ch = (alpha_bar * x).cosh();
        (alpha_bar * x * (alpha_bar * x).tanh() - 1.0) * c2 / (ch * ch)
    };
    let quadrature = adaptive_simpson(integrand, -1.0, 1.0, QUAD_TOL, QUAD_MAX_DEPTH)?;
    Ok(InnerProductCheck {
        closed_form: inner_product_closed_form(alpha_bar),
        quadrature,
    })
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: usize) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, max_depth, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    max_depth: usize,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= max_depth {
        return Err(BratuError::QuadratureFailure { depth });
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, max_depth, depth + 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, max_depth, depth + 1)?)
}
