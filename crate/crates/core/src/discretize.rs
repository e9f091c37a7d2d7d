//! Finite-difference and linear finite-element discretizations of
//! `F(u, lambda) = u'' + lambda e^u` on a uniform grid over `[-1, 1]` with
//! homogeneous Dirichlet conditions, plus the alpha-parameterized discrete
//! linearized operators.
//!
//! Residuals keep the sign of `F`, so at small `lambda` the tangent matrix is
//! negative definite. Assembly is written so that a mirror-symmetric state
//! yields a bit-for-bit mirror-symmetric residual and tangent.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::analytic::ln_cosh;
use crate::error::{BratuError, Result};
use crate::linalg::{SymTridiag, Tridiag};

/// Below this `lambda` the nonlinear term is evaluated as `exp(ln lambda + u)`.
const FUSED_LAMBDA: f64 = 1e-250;

/// Uniform grid with `n_elements` elements on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_elements: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(n_elements: usize) -> Result<Self> {
        if n_elements < 2 {
            return Err(BratuError::Domain(format!(
                "need at least 2 elements for an interior node, got {n_elements}"
            )));
        }
        Ok(Self {
            n_elements,
            h: 2.0 / n_elements as f64,
            nodes: mirrored_nodes(n_elements, 1.0),
        })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// All `N + 1` nodes including the boundary.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interior_nodes(&self) -> &[f64] {
        &self.nodes[1..self.n_elements]
    }

    pub fn n_interior(&self) -> usize {
        self.n_elements - 1
    }
}

/// `N + 1` equispaced nodes on `[-half_width, half_width]`, built from the
/// left half and mirrored so that `x[i] == -x[N - i]` exactly.
fn mirrored_nodes(n: usize, half_width: f64) -> Vec<f64> {
    let step = 2.0 * half_width / n as f64;
    let mut nodes = vec![0.0; n + 1];
    for i in 0..=n / 2 {
        let x = -half_width + i as f64 * step;
        nodes[i] = x;
        nodes[n - i] = -x;
    }
    if n % 2 == 0 {
        nodes[n / 2] = 0.0;
    }
    nodes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    FiniteDifference,
    FiniteElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    pub kind: SchemeKind,
    pub fe_quadrature_points: usize,
}

impl Default for Scheme {
    fn default() -> Self {
        Self::finite_difference()
    }
}

/// Current state of the discrete unknowns; boundary values are implicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub grid: Arc<Grid>,
    pub u: Vec<f64>,
    pub lambda: f64,
}

impl DiscreteState {
    pub fn new(grid: Arc<Grid>, u: Vec<f64>, lambda: f64) -> Result<Self> {
        if u.len() != grid.n_interior() {
            return Err(BratuError::Dimension(format!(
                "state has {} values, grid has {} interior nodes",
                u.len(),
                grid.n_interior()
            )));
        }
        Ok(Self { grid, u, lambda })
    }

    /// The trivial solution `(0, 0)`.
    pub fn zero(grid: Arc<Grid>) -> Self {
        let n = grid.n_interior();
        Self {
            grid,
            u: vec![0.0; n],
            lambda: 0.0,
        }
    }

    /// Samples the exact branch at `alpha` on the interior nodes.
    pub fn from_exact(grid: Arc<Grid>, alpha: f64) -> Result<Self> {
        let exact = crate::analytic::exact_branch(alpha)?;
        let u = grid.interior_nodes().iter().map(|&x| exact.u0(x)).collect();
        Ok(Self {
            grid,
            u,
            lambda: exact.lambda0,
        })
    }

    /// Nodal values with the boundary zeros attached.
    pub fn full_u(&self) -> Vec<f64> {
        let mut full = Vec::with_capacity(self.u.len() + 2);
        full.push(0.0);
        full.extend_from_slice(&self.u);
        full.push(0.0);
        full
    }

    pub fn u_star(&self) -> f64 {
        u_star(&self.u, self.grid.n_elements)
    }

    /// `max_i |u_i - u_{N-i}| / max_i |u_i|` (0 for the zero state).
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.u.len();
        (0..n).map(|i| (self.u[i] - self.u[n - 1 - i]).abs()).fold(0.0, f64::max) / scale
    }
}

/// Value of the piecewise-linear interpolant at `x = 0`: the central nodal
/// value for even `N`, the mean of the two central values for odd `N`.
pub fn u_star(u: &[f64], n_elements: usize) -> f64 {
    if n_elements % 2 == 0 {
        u[n_elements / 2 - 1]
    } else {
        0.5 * (u[(n_elements - 3) / 2] + u[(n_elements - 1) / 2])
    }
}

/// Row vector `r` with `r . u = u_star(u)`.
pub fn u_star_functional(n_elements: usize) -> Vec<f64> {
    let mut row = vec![0.0; n_elements - 1];
    if n_elements % 2 == 0 {
        row[n_elements / 2 - 1] = 1.0;
    } else {
        row[(n_elements - 3) / 2] = 0.5;
        row[(n_elements - 1) / 2] = 0.5;
    }
    row
}

/// `lambda e^u`, switching to `exp(ln lambda + u)` for tiny `lambda` or
/// large `u`.
pub fn lambda_exp(lambda: f64, u: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else if lambda.abs() < FUSED_LAMBDA || u > 700.0 {
        lambda.signum() * (lambda.abs().ln() + u).exp()
    } else {
        lambda * u.exp()
    }
}

fn checked_lambda_exp(lambda: f64, u: f64, node: usize) -> Result<f64> {
    let v = lambda_exp(lambda, u);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BratuError::Overflow { node, lambda, u })
    }
}

/// Gauss-Legendre rule on [0, 1] with shape-function values, stored as
/// mirror pairs `(n1, n2, w)` with `n1 = (1 - p)/2`, `n2 = (1 + p)/2`, plus an
/// optional center weight.
struct ElementRule {
    pairs: Vec<(f64, f64, f64)>,
    center: Option<f64>,
}

impl ElementRule {
    fn gauss(points: usize) -> Self {
        let sym = |p: f64, w: f64| ((1.0 - p) / 2.0, (1.0 + p) / 2.0, w / 2.0);
        match points {
            2 => Self {
                pairs: vec![sym(1.0 / 3f64.sqrt(), 1.0)],
                center: None,
            },
            3 => Self {
                pairs: vec![sym((0.6f64).sqrt(), 5.0 / 9.0)],
                center: Some(4.0 / 9.0),
            },
            4 => {
                let a = (3.0 / 7.0 - 2.0 / 7.0 * (1.2f64).sqrt()).sqrt();
                let b = (3.0 / 7.0 + 2.0 / 7.0 * (1.2f64).sqrt()).sqrt();
                let wa = (18.0 + 30f64.sqrt()) / 36.0;
                let wb = (18.0 - 30f64.sqrt()) / 36.0;
                Self {
                    pairs: vec![sym(a, wa), sym(b, wb)],
                    center: None,
                }
            }
            _ => unreachable!("quadrature point count validated by Scheme"),
        }
    }
}

/// Per-element nonlinear integrals (already multiplied by `lambda` and `h`).
#[derive(Debug, Default, Clone, Copy)]
struct ElementLoad {
    load_left: f64,
    load_right: f64,
    mass_ll: f64,
    mass_lr: f64,
    mass_rr: f64,
    dlambda_left: f64,
    dlambda_right: f64,
}

fn element_load(rule: &ElementRule, h: f64, lambda: f64, a: f64, b: f64, node: usize) -> Result<ElementLoad> {
    let mut out = ElementLoad::default();
    let add = |n1: f64, n2: f64, w: f64, e: f64, g: f64, acc: &mut [f64; 7]| {
        acc[0] += w * e * n1;
        acc[1] += w * e * n2;
        acc[2] += w * e * (n1 * n1);
        acc[3] += w * e * (n1 * n2);
        acc[4] += w * e * (n2 * n2);
        acc[5] += w * g * n1;
        acc[6] += w * g * n2;
    };
    let mut total = [0.0; 7];
    for &(n1, n2, w) in &rule.pairs {
        // (n1, n2) and its mirror (n2, n1); summed as a pair so that the
        // mirrored element produces bitwise-swapped results.
        let ua = a * n1 + b * n2;
        let ub = a * n2 + b * n1;
        let (ea, eb) = (checked_lambda_exp(lambda, ua, node)?, checked_lambda_exp(lambda, ub, node)?);
        let (ga, gb) = (checked_exp(ua, node, lambda)?, checked_exp(ub, node, lambda)?);
        let mut pa = [0.0; 7];
        let mut pb = [0.0; 7];
        add(n1, n2, w, ea, ga, &mut pa);
        add(n2, n1, w, eb, gb, &mut pb);
        for k in 0..7 {
            total[k] += pa[k] + pb[k];
        }
    }
    if let Some(w) = rule.center {
        let uc = a * 0.5 + b * 0.5;
        let e = checked_lambda_exp(lambda, uc, node)?;
        let g = checked_exp(uc, node, lambda)?;
        add(0.5, 0.5, w, e, g, &mut total);
    }
    out.load_left = h * total[0];
    out.load_right = h * total[1];
    out.mass_ll = h * total[2];
    out.mass_lr = h * total[3];
    out.mass_rr = h * total[4];
    out.dlambda_left = h * total[5];
    out.dlambda_right = h * total[6];
    Ok(out)
}

fn checked_exp(u: f64, node: usize, lambda: f64) -> Result<f64> {
    let v = u.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BratuError::Overflow { node, lambda, u })
    }
}

impl Scheme {
    pub fn finite_difference() -> Self {
        Self {
            kind: SchemeKind::FiniteDifference,
            fe_quadrature_points: 3,
        }
    }

    pub fn finite_element(quadrature_points: usize) -> Result<Self> {
        let s = Self {
            kind: SchemeKind::FiniteElement,
            fe_quadrature_points: quadrature_points,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.fe_quadrature_points) {
            return Err(BratuError::InvalidConfig(format!(
                "fe_quadrature_points must be 2, 3 or 4, got {}",
                self.fe_quadrature_points
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SchemeKind::FiniteDifference => "fd",
            SchemeKind::FiniteElement => "fe",
        }
    }

    fn element_loads(&self, state: &DiscreteState) -> Result<Vec<ElementLoad>> {
        let rule = ElementRule::gauss(self.fe_quadrature_points);
        let full = state.full_u();
        let h = state.grid.h();
        (0..state.grid.n_elements())
            .map(|e| element_load(&rule, h, state.lambda, full[e], full[e + 1], e))
            .collect()
    }

    /// Discrete `F(u, lambda)` at the interior nodes.
    pub fn residual(&self, state: &DiscreteState) -> Result<Vec<f64>> {
        let full = state.full_u();
        let h = state.grid.h();
        let n = state.u.len();
        match self.kind {
            SchemeKind::FiniteDifference => {
                let h2 = h * h;
                (0..n)
                    .map(|i| {
                        let nonlinear = checked_lambda_exp(state.lambda, full[i + 1], i)?;
                        Ok(((full[i] + full[i + 2]) - 2.0 * full[i + 1]) / h2 + nonlinear)
                    })
                    .collect()
            }
            SchemeKind::FiniteElement => {
                let loads = self.element_loads(state)?;
                Ok((0..n)
                    .map(|i| {
                        ((full[i] + full[i + 2]) - 2.0 * full[i + 1]) / h
                            + (loads[i].load_right + loads[i + 1].load_left)
                    })
                    .collect())
            }
        }
    }

    /// Tangent stiffness `dF/du` (exact derivative of [`Scheme::residual`]).
    pub fn tangent(&self, state: &DiscreteState) -> Result<SymTridiag> {
        let h = state.grid.h();
        let n = state.u.len();
        match self.kind {
            SchemeKind::FiniteDifference => {
                let h2 = h * h;
                let diag = (0..n)
                    .map(|i| Ok(-2.0 / h2 + checked_lambda_exp(state.lambda, state.u[i], i)?))
                    .collect::<Result<Vec<_>>>()?;
                SymTridiag::new(diag, vec![1.0 / h2; n - 1])
            }
            SchemeKind::FiniteElement => {
                let loads = self.element_loads(state)?;
                let diag = (0..n).map(|i| -2.0 / h + (loads[i].mass_rr + loads[i + 1].mass_ll)).collect();
                let off = (0..n - 1).map(|i| 1.0 / h + loads[i + 1].mass_lr).collect();
                SymTridiag::new(diag, off)
            }
        }
    }

    /// `dF/dlambda`.
    pub fn d_lambda(&self, state: &DiscreteState) -> Result<Vec<f64>> {
        match self.kind {
            SchemeKind::FiniteDifference => state
                .u
                .iter()
                .enumerate()
                .map(|(i, &u)| checked_exp(u, i, state.lambda))
                .collect(),
            SchemeKind::FiniteElement => {
                let loads = self.element_loads(state)?;
                Ok((0..state.u.len())
                    .map(|i| loads[i].dlambda_right + loads[i + 1].dlambda_left)
                    .collect())
            }
        }
    }
}

/// FD matrix of `w'' + 2 (alpha / cosh(alpha x))^2 w` on the grid, Dirichlet
/// rows eliminated.
pub fn linearized_operator_original(grid: &Grid, alpha: f64) -> Result<SymTridiag> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(BratuError::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let h2 = grid.h() * grid.h();
    let two_ln_alpha = 2.0 * alpha.ln();
    let diag = grid
        .interior_nodes()
        .iter()
        .map(|&x| -2.0 / h2 + 2.0 * (two_ln_alpha - 2.0 * ln_cosh(alpha * x)).exp())
        .collect();
    SymTridiag::new(diag, vec![1.0 / h2; grid.n_interior() - 1])
}

/// Nodes of the uniform grid in `t = tanh(alpha x)` over
/// `[-tanh(alpha), tanh(alpha)]`.
pub fn legendre_nodes(n_elements: usize, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(BratuError::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if n_elements < 2 {
        return Err(BratuError::Domain(format!(
            "need at least 2 elements, got {n_elements}"
        )));
    }
    let t_max = alpha.tanh();
    if t_max >= 1.0 {
        return Err(BratuError::DegenerateGrid { alpha });
    }
    Ok(mirrored_nodes(n_elements, t_max))
}

/// Central-difference matrix of `(1 - t^2) w'' - 2 t w' + 2 w` on the
/// Legendre grid with `w(+-tanh(alpha)) = 0` eliminated. Nonsymmetric.
pub fn linearized_operator_legendre(n_elements: usize, alpha: f64) -> Result<Tridiag> {
    let nodes = legendre_nodes(n_elements, alpha)?;
    let k = 2.0 * alpha.tanh() / n_elements as f64;
    let k2 = k * k;
    let interior = &nodes[1..n_elements];
    let m = interior.len();
    let p: Vec<f64> = interior.iter().map(|&t| (1.0 - t) * (1.0 + t) / k2).collect();
    let diag = p.iter().map(|pi| -2.0 * pi + 2.0).collect();
    let sub = (1..m).map(|i| p[i] + interior[i] / k).collect();
    let sup = (0..m - 1).map(|i| p[i] - interior[i] / k).collect();
    Tridiag::new(sub, diag, sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn grid(n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(n).unwrap())
    }

    fn schemes() -> [Scheme; 4] {
        [
            Scheme::finite_difference(),
            Scheme::finite_element(2).unwrap(),
            Scheme::finite_element(3).unwrap(),
            Scheme::finite_element(4).unwrap(),
        ]
    }

    #[test]
    fn grid_is_mirror_symmetric() {
        for n in [2, 3, 7, 10, 101] {
            let g = Grid::new(n).unwrap();
            let x = g.nodes();
            assert_eq!(x.len(), n + 1);
            assert_eq!(x[0], -1.0);
            assert_eq!(x[n], 1.0);
            for i in 0..=n {
                assert_eq!(x[i], -x[n - i]);
            }
            if n % 2 == 0 {
                assert_eq!(x[n / 2], 0.0);
            }
        }
        assert!(Grid::new(1).is_err());
    }

    #[test]
    fn scheme_validation() {
        assert!(Scheme::finite_element(1).is_err());
        assert!(Scheme::finite_element(5).is_err());
        assert_eq!(Scheme::default().kind, SchemeKind::FiniteDifference);
    }

    #[test]
    fn state_rejects_wrong_length() {
        assert!(DiscreteState::new(grid(4), vec![0.0; 4], 0.0).is_err());
    }

    #[test]
    fn trivial_state_has_zero_residual() {
        for s in schemes() {
            for n in [2, 5, 8] {
                let r = s.residual(&DiscreteState::zero(grid(n))).unwrap();
                assert!(r.iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn fd_single_node() {
        let st = DiscreteState::new(grid(2), vec![0.0], 1.0).unwrap();
        assert_eq!(Scheme::finite_difference().residual(&st).unwrap(), vec![1.0]);
    }

    #[test]
    fn fe_load_is_hat_integral() {
        for s in &schemes()[1..] {
            let g = grid(6);
            let h = g.h();
            let st = DiscreteState::new(g, vec![0.0; 5], 1.0).unwrap();
            for r in s.residual(&st).unwrap() {
                assert_relative_eq!(r, h, max_relative = 1e-14);
            }
            for d in s.d_lambda(&st).unwrap() {
                assert_relative_eq!(d, h, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn laplacian_tangents() {
        let st = DiscreteState::zero(grid(4));
        let fd = Scheme::finite_difference().tangent(&st).unwrap();
        assert_eq!(fd.diag(), &[-8.0, -8.0, -8.0]);
        assert_eq!(fd.off(), &[4.0, 4.0]);
        let fe = Scheme::finite_element(3).unwrap().tangent(&st).unwrap();
        assert_eq!(fe.diag(), &[-4.0, -4.0, -4.0]);
        assert_eq!(fe.off(), &[2.0, 2.0]);
        assert_eq!(Scheme::finite_difference().d_lambda(&st).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn residual_converges_at_second_order() {
        for s in schemes() {
            let norms: Vec<f64> = [32usize, 64]
                .iter()
                .map(|&n| {
                    let g = grid(n);
                    let h = g.h();
                    let st = DiscreteState::from_exact(g, 1.0).unwrap();
                    let r = s.residual(&st).unwrap();
                    let scale = if s.kind == SchemeKind::FiniteElement { h } else { 1.0 };
                    r.iter().fold(0.0_f64, |m, v| m.max((v / scale).abs()))
                })
                .collect();
            let ratio = norms[0] / norms[1];
            assert!((3.5..4.5).contains(&ratio), "{s:?}: ratio {ratio}");
        }
    }

    #[test]
    fn fe_and_fd_agree_to_second_order() {
        let errs: Vec<f64> = [16usize, 32, 64]
            .iter()
            .map(|&n| {
                let g = grid(n);
                let h = g.h();
                let u = g.interior_nodes().iter().map(|x| 0.8 * (1.0 - x * x) * (1.0 + 0.3 * x)).collect();
                let st = DiscreteState::new(g, u, 0.6).unwrap();
                let fd = Scheme::finite_difference().residual(&st).unwrap();
                let fe = Scheme::finite_element(3).unwrap().residual(&st).unwrap();
                fd.iter().zip(&fe).fold(0.0_f64, |m, (a, b)| m.max((a - b / h).abs()))
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut seed = 11;
        for s in schemes() {
            for trial in 0..50 {
                let n = 3 + trial % 9;
                let g = grid(n);
                let u: Vec<f64> = (0..n - 1).map(|_| 3.0 * (lcg(&mut seed) + 0.5)).collect();
                let lambda = 0.5 * (lcg(&mut seed) + 0.5);
                let st = DiscreteState::new(g.clone(), u, lambda).unwrap();
                let jac = s.tangent(&st).unwrap();
                let v: Vec<f64> = (0..n - 1).map(|_| lcg(&mut seed)).collect();
                let jv = jac.mul_vec(&v);
                let eps = 1e-6;
                let shifted = |sign: f64| {
                    let u: Vec<f64> = st.u.iter().zip(&v).map(|(a, b)| a + sign * eps * b).collect();
                    s.residual(&DiscreteState::new(g.clone(), u, lambda).unwrap()).unwrap()
                };
                let (rp, rm) = (shifted(1.0), shifted(-1.0));
                let scale = jv.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                for i in 0..n - 1 {
                    let fdv = (rp[i] - rm[i]) / (2.0 * eps);
                    assert!((fdv - jv[i]).abs() <= 1e-6 * scale, "{s:?} n={n}: {fdv} vs {}", jv[i]);
                }
                // parameter derivative
                let dl = s.d_lambda(&st).unwrap();
                let at = |l: f64| s.residual(&DiscreteState::new(g.clone(), st.u.clone(), l).unwrap()).unwrap();
                let (lp, lm) = (at(lambda + eps), at(lambda - eps));
                for i in 0..n - 1 {
                    let fdv = (lp[i] - lm[i]) / (2.0 * eps);
                    assert!((fdv - dl[i]).abs() <= 1e-8 * dl[i].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn symmetric_states_give_symmetric_residuals() {
        for s in schemes() {
            for n in [5usize, 8, 11] {
                let g = grid(n);
                let u: Vec<f64> = g.interior_nodes().iter().map(|x| 2.0 * (1.0 - x * x) + 0.3 * (3.0 * x).cos()).collect();
                let st = DiscreteState::new(g, u, 0.37).unwrap();
                assert_eq!(st.symmetry_defect(), 0.0);
                let r = s.residual(&st).unwrap();
                let j = s.tangent(&st).unwrap();
                let m = r.len();
                for i in 0..m {
                    assert_eq!(r[i], r[m - 1 - i], "{s:?} n={n}");
                    assert_eq!(j.diag()[i], j.diag()[m - 1 - i]);
                }
                for i in 0..m - 1 {
                    assert_eq!(j.off()[i], j.off()[m - 2 - i]);
                }
            }
        }
    }

    #[test]
    fn tiny_lambda_large_u() {
        let g = grid(4);
        let st = DiscreteState::new(g.clone(), vec![60.0, 121.0, 60.0], 1e-260).unwrap();
        let r = Scheme::finite_difference().residual(&st).unwrap();
        assert!(r.iter().all(|v| v.is_finite()));
        assert_relative_eq!(lambda_exp(1e-260, 121.0), (1e-260f64.ln() + 121.0).exp(), max_relative = 1e-15);
        let bad = DiscreteState::new(g, vec![0.0, 800.0, 0.0], 1.0).unwrap();
        assert!(matches!(Scheme::finite_difference().residual(&bad), Err(BratuError::Overflow { .. })));
    }

    #[test]
    fn u_star_convention() {
        assert_eq!(u_star(&[0.0; 4], 5), 0.0);
        assert_eq!(u_star(&[1.0, 3.0], 3), 2.0);
        assert_eq!(u_star(&[1.0, 3.0, 1.0], 4), 3.0);
        let row = u_star_functional(7);
        assert_eq!(row, vec![0.0, 0.0, 0.5, 0.5, 0.0, 0.0]);
        let st = DiscreteState::from_exact(grid(64), 1.0).unwrap();
        assert!((st.u_star() - 0.867563).abs() <= 1e-3);
    }

    #[test]
    fn original_operator_properties() {
        let g = Grid::new(20).unwrap();
        let a = linearized_operator_original(&g, 1e-8).unwrap();
        let lap = Scheme::finite_difference().tangent(&DiscreteState::zero(Arc::new(g.clone()))).unwrap();
        for (x, y) in a.diag().iter().zip(lap.diag()) {
            assert!((x - y).abs() < 1e-12);
        }
        let a = linearized_operator_original(&g, 2.3).unwrap();
        let m = a.n();
        for i in 0..m {
            assert_eq!(a.diag()[i], a.diag()[m - 1 - i]);
        }
        assert!(linearized_operator_original(&g, 0.0).is_err());
        // huge alpha does not overflow
        let a = linearized_operator_original(&g, 900.0).unwrap();
        assert!(a.diag().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn original_operator_kernel_at_fold() {
        let alpha_bar = crate::analytic::find_alpha_bar().alpha_bar;
        let mus: Vec<f64> = [100usize, 200, 400]
            .iter()
            .map(|&n| linearized_operator_original(&Grid::new(n).unwrap(), alpha_bar).unwrap().eigen_nearest_zero().unwrap().mu)
            .collect();
        assert!(mus[2].abs() <= 1e-3, "{mus:?}");
        let r1 = mus[0] / mus[1];
        let r2 = mus[1] / mus[2];
        assert!((3.5..4.5).contains(&r1) && (3.5..4.5).contains(&r2), "{mus:?}");
    }

    #[test]
    fn legendre_operator_properties() {
        let nodes = legendre_nodes(9, 1.7).unwrap();
        assert_eq!(nodes[0], -(1.7f64.tanh()));
        assert_eq!(nodes[9], 1.7f64.tanh());
        assert!(linearized_operator_legendre(9, 0.0).is_err());
        assert!(matches!(linearized_operator_legendre(9, 25.0), Err(BratuError::DegenerateGrid { .. })));
        assert!(linearized_operator_legendre(9, 19.0).is_ok());
        let alpha_bar = crate::analytic::find_alpha_bar().alpha_bar;
        let near = linearized_operator_legendre(400, alpha_bar).unwrap();
        let far = linearized_operator_legendre(101, 5.0).unwrap();
        // smallest pivot of the scaled factorization as a singularity gauge
        let gauge = |a: &Tridiag| a.row_scaled().factor().min_pivot().1;
        assert!(gauge(&near) < 1e-3, "{}", gauge(&near));
        assert!(gauge(&far) > 1e-2, "{}", gauge(&far));
    }
}
