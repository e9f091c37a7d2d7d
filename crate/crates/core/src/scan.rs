//! Sweeps in `alpha` for nontrivial kernels of the linearized operator.
//!
//! Three operators are available:
//!
//! - `OriginalX`: the finite-difference tangent at the symmetric discrete
//!   solution whose peak is `u* = 2 ln cosh(alpha)`.
//! - `OriginalExact`: the finite-difference operator with the exact potential
//!   `2 (alpha / cosh(alpha x))^2`.
//! - `LegendreT`: the central-difference Legendre operator in `t = tanh(alpha x)`.
//!
//! The symmetric forms are bracketed by Sturm-count changes at zero; the
//! Legendre form by sign changes of its determinant surrogate.

use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::analytic::{lambda_of_alpha, ustar_of_alpha};
use crate::continuation::residual_scale;
use crate::discretize::{
    linearized_operator_legendre, linearized_operator_original, DiscreteState, Grid, Scheme,
};
use crate::error::{BratuError, Result};
use crate::linalg::{dense_lu_solve, fix_sign, normalize};

/// Above this the Legendre interval is numerically all of `[-1, 1]`.
pub const LEGENDRE_ALPHA_CAP: f64 = 19.0;
pub const DEFAULT_STEPS: usize = 2000;
/// Samples above this are log-spaced.
pub const LOG_SPACING_START: f64 = 5.0;
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScanForm {
    OriginalX,
    LegendreT,
    OriginalExact,
}

impl ScanForm {
    pub fn name(&self) -> &'static str {
        match self {
            ScanForm::OriginalX => "original",
            ScanForm::LegendreT => "legendre",
            ScanForm::OriginalExact => "original-exact",
        }
    }

    pub fn indicator_name(&self) -> &'static str {
        match self {
            ScanForm::LegendreT => "signed_det_surrogate",
            _ => "signed_mu_min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRoot {
    pub alpha: f64,
    /// Indicator evaluated at `alpha`.
    pub indicator: f64,
    /// Grid bracket that contained the sign change.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub form: ScanForm,
    pub n_elements: usize,
    pub alpha_grid: Vec<f64>,
    pub indicator: Vec<f64>,
    pub roots: Vec<ScanRoot>,
}

/// `steps` samples on `[alpha_min, alpha_max]`, uniform up to
/// [`LOG_SPACING_START`] and geometric beyond, with the two spacings matched
/// where they meet.
pub fn alpha_grid(alpha_min: f64, alpha_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max.is_finite()) {
        return Err(BratuError::Domain(format!(
            "need 0 < alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if steps < 2 {
        return Err(BratuError::Domain(format!("need at least 2 samples, got {steps}")));
    }
    let uniform = |a: f64, b: f64, k: usize| -> Vec<f64> {
        (0..=k).map(|i| if i == k { b } else { a + (b - a) * i as f64 / k as f64 }).collect()
    };
    let geometric = |a: f64, b: f64, k: usize| -> Vec<f64> {
        let r = (b / a).ln();
        (0..=k).map(|i| if i == k { b } else { a * (r * i as f64 / k as f64).exp() }).collect()
    };
    let split = LOG_SPACING_START;
    let intervals = steps - 1;
    if alpha_max <= split {
        return Ok(uniform(alpha_min, alpha_max, intervals));
    }
    if alpha_min >= split {
        return Ok(geometric(alpha_min, alpha_max, intervals));
    }
    if intervals < 2 {
        return Ok(vec![alpha_min, alpha_max]);
    }
    let lin_len = split - alpha_min;
    let log_len = split * (alpha_max / split).ln();
    let k1 = ((intervals as f64 * lin_len / (lin_len + log_len)).round() as usize).clamp(1, intervals - 1);
    let mut grid = uniform(alpha_min, split, k1);
    grid.pop();
    grid.extend(geometric(split, alpha_max, intervals - k1));
    Ok(grid)
}

/// Symmetric finite-difference solutions parameterized by their peak value.
///
/// Only the left half of the nodes (plus the centre) are unknowns, so the
/// antisymmetric kernels that the scan is looking for cannot make the
/// Newton matrix singular. `ln(lambda)` is the remaining unknown.
#[derive(Debug, Clone)]
pub struct SymmetricBranch {
    grid: Arc<Grid>,
    scheme: Scheme,
}

#[derive(Debug, Clone)]
pub struct SymmetricSolution {
    pub state: DiscreteState,
    pub ln_lambda: f64,
}

impl SymmetricBranch {
    pub fn new(n_elements: usize) -> Result<Self> {
        Ok(Self {
            grid: Arc::new(Grid::new(n_elements)?),
            scheme: Scheme::finite_difference(),
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn half(&self) -> usize {
        self.grid.n_interior().div_ceil(2)
    }

    fn expand(&self, v: &[f64]) -> Vec<f64> {
        let m = self.grid.n_interior();
        (0..m).map(|j| v[j.min(m - 1 - j)]).collect()
    }

    /// Initial guess for peak `u_star`: a rescaled `prev`, or the exact
    /// solution when there is none.
    pub fn guess(&self, u_star: f64, prev: Option<&SymmetricSolution>) -> Result<SymmetricSolution> {
        let alpha = crate::analytic::alpha_from_ustar(u_star)?;
        match prev {
            Some(p) if p.state.u_star() > 0.0 => {
                let scale = u_star / p.state.u_star();
                let alpha_prev = crate::analytic::alpha_from_ustar(p.state.u_star())?;
                let ln_lambda = p.ln_lambda + lambda_of_alpha(alpha).ln() - lambda_of_alpha(alpha_prev).ln();
                let u = p.state.u.iter().map(|v| v * scale).collect();
                Ok(SymmetricSolution {
                    state: DiscreteState {
                        grid: self.grid.clone(),
                        u,
                        lambda: ln_lambda.exp(),
                    },
                    ln_lambda,
                })
            }
            _ => {
                let state = DiscreteState::from_exact(self.grid.clone(), alpha)?;
                let ln_lambda = state.lambda.ln();
                Ok(SymmetricSolution { state, ln_lambda })
            }
        }
    }

    /// Newton solve for the symmetric solution with the given peak.
    pub fn solve(&self, u_star: f64, guess: &SymmetricSolution) -> Result<SymmetricSolution> {
        if !(u_star > 0.0) || !u_star.is_finite() {
            return Err(BratuError::Domain(format!("u* must be positive, got {u_star}")));
        }
        let m = self.grid.n_interior();
        let mh = self.half();
        let mut v: Vec<f64> = guess.state.u[..mh].to_vec();
        v[mh - 1] = u_star;
        let mut ln_lambda = guess.ln_lambda;
        let max_iters = 60;
        let mut residual = f64::INFINITY;
        for it in 0..max_iters {
            let state = DiscreteState {
                grid: self.grid.clone(),
                u: self.expand(&v),
                lambda: ln_lambda.exp(),
            };
            let r = self.scheme.residual(&state)?;
            residual = r[..mh].iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            let scale = residual_scale(&state).max(2.0 * u_star * (m + 1) as f64 * (m + 1) as f64 / 4.0);
            if !residual.is_finite() {
                break;
            }
            let converged = residual <= 1e-13 * scale;
            if converged && it > 0 {
                return Ok(SymmetricSolution { state, ln_lambda });
            }
            let jac = self.scheme.tangent(&state)?;
            let dl = self.scheme.d_lambda(&state)?;
            let (d, e) = (jac.diag(), jac.off());
            let entry = |i: usize, k: usize| -> f64 {
                if i == k {
                    d[i]
                } else if i + 1 == k {
                    e[i]
                } else if k + 1 == i {
                    e[k]
                } else {
                    0.0
                }
            };
            let mut a = vec![0.0; mh * mh];
            for i in 0..mh {
                for j in 0..mh - 1 {
                    let mirror = m - 1 - j;
                    a[i * mh + j] = entry(i, j) + if mirror != j { entry(i, mirror) } else { 0.0 };
                }
                a[i * mh + mh - 1] = state.lambda * dl[i];
            }
            let rhs: Vec<f64> = r[..mh].iter().map(|x| -x).collect();
            let dz = dense_lu_solve(a, mh, &rhs)?;
            for j in 0..mh - 1 {
                v[j] += dz[j];
            }
            ln_lambda += dz[mh - 1].clamp(-20.0, 20.0);
            let step = dz.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            if converged || step <= 1e-15 * (1.0 + u_star + ln_lambda.abs()) {
                let state = DiscreteState {
                    grid: self.grid.clone(),
                    u: self.expand(&v),
                    lambda: ln_lambda.exp(),
                };
                return Ok(SymmetricSolution { state, ln_lambda });
            }
        }
        Err(BratuError::NoConvergence {
            iterations: max_iters,
            residual,
        })
    }

    /// Solutions at every `alpha` in order, each warm-started from the last.
    pub fn march(&self, alphas: &[f64]) -> Result<Vec<SymmetricSolution>> {
        let mut out: Vec<SymmetricSolution> = Vec::with_capacity(alphas.len());
        for &alpha in alphas {
            let target = ustar_of_alpha(alpha);
            let guess = self.guess(target, out.last())?;
            out.push(self.solve(target, &guess)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
struct Sample {
    alpha: f64,
    indicator: f64,
    /// Sturm count for the symmetric forms, sign bit for the Legendre form.
    key: usize,
    solution: Option<SymmetricSolution>,
}

struct Scanner {
    form: ScanForm,
    n_elements: usize,
    grid: Arc<Grid>,
    branch: Option<SymmetricBranch>,
}

fn signed_mu(jac: &crate::linalg::SymTridiag) -> Result<(f64, usize)> {
    let count = jac.sturm_count(0.0);
    let mu = jac.eigen_nearest_zero()?.mu.abs();
    Ok((if count % 2 == 0 { mu } else { -mu }, count))
}

impl Scanner {
    fn new(form: ScanForm, n_elements: usize) -> Result<Self> {
        let grid = Arc::new(Grid::new(n_elements)?);
        let branch = match form {
            ScanForm::OriginalX => Some(SymmetricBranch {
                grid: grid.clone(),
                scheme: Scheme::finite_difference(),
            }),
            _ => None,
        };
        Ok(Self {
            form,
            n_elements,
            grid,
            branch,
        })
    }

    fn sample(&self, alpha: f64, warm: Option<&SymmetricSolution>) -> Result<Sample> {
        match self.form {
            ScanForm::OriginalX => {
                let branch = self.branch.as_ref().expect("branch solver for OriginalX");
                let target = ustar_of_alpha(alpha);
                let guess = branch.guess(target, warm)?;
                let sol = branch.solve(target, &guess)?;
                let (indicator, key) = signed_mu(&branch.scheme.tangent(&sol.state)?)?;
                Ok(Sample {
                    alpha,
                    indicator,
                    key,
                    solution: Some(sol),
                })
            }
            ScanForm::OriginalExact => {
                let (indicator, key) = signed_mu(&linearized_operator_original(&self.grid, alpha)?)?;
                Ok(Sample {
                    alpha,
                    indicator,
                    key,
                    solution: None,
                })
            }
            ScanForm::LegendreT => {
                let indicator = linearized_operator_legendre(self.n_elements, alpha)?.signed_det_surrogate();
                Ok(Sample {
                    alpha,
                    indicator,
                    key: usize::from(indicator < 0.0),
                    solution: None,
                })
            }
        }
    }

    fn samples(&self, alphas: &[f64]) -> Result<Vec<Sample>> {
        match self.form {
            ScanForm::OriginalX => {
                let mut out: Vec<Sample> = Vec::with_capacity(alphas.len());
                for &alpha in alphas {
                    let warm = out.last().and_then(|s| s.solution.as_ref());
                    let s = self.sample(alpha, warm)?;
                    out.push(s);
                }
                Ok(out)
            }
            _ => alphas.par_iter().map(|&a| self.sample(a, None)).collect(),
        }
    }

    fn refine(&self, lo: &Sample, hi: &Sample, bracket: (f64, f64), out: &mut Vec<ScanRoot>) -> Result<()> {
        if lo.key == hi.key {
            return Ok(());
        }
        if hi.alpha - lo.alpha <= ROOT_TOL {
            let a_lo = lo.indicator.abs();
            let a_hi = hi.indicator.abs();
            let pick = if a_lo <= a_hi { lo } else { hi };
            out.push(ScanRoot {
                alpha: pick.alpha,
                indicator: pick.indicator,
                bracket,
            });
            return Ok(());
        }
        let mid = self.sample(0.5 * (lo.alpha + hi.alpha), lo.solution.as_ref())?;
        self.refine(lo, &mid, bracket, out)?;
        self.refine(&mid, hi, bracket, out)
    }
}

/// Samples the kernel indicator over `alpha` and refines every bracket by
/// bisection to [`ROOT_TOL`].
pub fn scan_alpha(form: ScanForm, n_elements: usize, alpha_min: f64, alpha_max: f64, steps: usize) -> Result<ScanResult> {
    let alphas = alpha_grid(alpha_min, alpha_max, steps)?;
    scan_on_grid(form, n_elements, alphas)
}

/// [`scan_alpha`] on a caller-supplied strictly increasing grid.
pub fn scan_on_grid(form: ScanForm, n_elements: usize, alphas: Vec<f64>) -> Result<ScanResult> {
    if alphas.len() < 2 || alphas.windows(2).any(|w| !(w[0] < w[1])) || !(alphas[0] > 0.0) {
        return Err(BratuError::Domain("alpha grid must be positive and strictly increasing".into()));
    }
    if form == ScanForm::LegendreT && alphas[alphas.len() - 1] > LEGENDRE_ALPHA_CAP {
        return Err(BratuError::Domain(format!(
            "Legendre scan needs alpha_max <= {LEGENDRE_ALPHA_CAP}"
        )));
    }
    let scanner = Scanner::new(form, n_elements)?;
    let samples = scanner.samples(&alphas)?;
    let brackets: Vec<(&Sample, &Sample)> = samples
        .windows(2)
        .filter(|w| w[0].key != w[1].key)
        .map(|w| (&w[0], &w[1]))
        .collect();
    let refined: Vec<Result<Vec<ScanRoot>>> = brackets
        .par_iter()
        .map(|(lo, hi)| {
            let mut out = Vec::new();
            scanner.refine(lo, hi, (lo.alpha, hi.alpha), &mut out)?;
            Ok(out)
        })
        .collect();
    let mut roots = Vec::new();
    for r in refined {
        roots.extend(r?);
    }
    Ok(ScanResult {
        form,
        n_elements,
        indicator: samples.iter().map(|s| s.indicator).collect(),
        alpha_grid: alphas,
        roots,
    })
}

/// Unit-norm null vector of the form's operator at a scan root, signed so
/// that its largest-magnitude entry is positive.
pub fn kernel_vector(form: ScanForm, n_elements: usize, alpha_root: f64) -> Result<Vec<f64>> {
    let mut v = match form {
        ScanForm::OriginalX => {
            let branch = SymmetricBranch::new(n_elements)?;
            let start = 0.1_f64.min(0.5 * alpha_root);
            let mut path = alpha_grid(start, alpha_root, 400)?;
            path.dedup();
            let sol = branch.march(&path)?.pop().expect("nonempty path");
            branch.scheme.tangent(&sol.state)?.eigen_nearest_zero()?.psi
        }
        ScanForm::OriginalExact => {
            let grid = Grid::new(n_elements)?;
            linearized_operator_original(&grid, alpha_root)?.eigen_nearest_zero()?.psi
        }
        ScanForm::LegendreT => linearized_operator_legendre(n_elements, alpha_root)?.null_vector()?,
    };
    normalize(&mut v).ok_or(BratuError::ConvergenceFailure { residual: f64::NAN })?;
    fix_sign(&mut v);
    Ok(v)
}
