//! Tridiagonal linear algebra.
//!
//! Everything the continuation needs lives here: pivoted tridiagonal solves
//! (the tangent matrix is indefinite past the fold), the bordered solve used
//! by the pseudo-arclength corrector, and Sturm-sequence eigenvalue tools for
//! symmetric tridiagonal matrices.

use crate::error::{BratuError, Result};

/// Pivots at or below `SINGULAR_FACTOR * eps * ||A||_inf` are treated as zero.
const SINGULAR_FACTOR: f64 = 1e2;

/// Componentwise backward error accepted from the block-elimination path of
/// [`BorderedSystem::solve`] before falling back to dense elimination.
const BORDERED_BACKWARD_TOL: f64 = 1e-12;

/// Symmetric tridiagonal matrix stored as its diagonal and a single
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// A general (possibly nonsymmetric) tridiagonal matrix.
///
/// `sub[i] = A[i+1][i]`, `sup[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

/// Eigenvalue of smallest magnitude with its unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub mu: f64,
    pub psi: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(BratuError::Dimension("matrix order must be at least 1".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(BratuError::Dimension(format!(
                "off-diagonal length {} does not match order {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn from_diagonal(diag: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        Self::new(diag, vec![0.0; n.saturating_sub(1)])
    }

    /// Constant-coefficient matrix `tridiag(off, diag, off)` of order `n`.
    pub fn toeplitz(n: usize, diag: f64, off: f64) -> Result<Self> {
        Self::new(vec![diag; n], vec![off; n.saturating_sub(1)])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                left + self.diag[i].abs() + right
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        Tridiag::from(self).mul_vec(x)
    }

    /// `A - sigma I`.
    pub fn shifted(&self, sigma: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d - sigma).collect(),
            off: self.off.clone(),
        }
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        Tridiag::from(self).solve(b)
    }

    /// Number of eigenvalues strictly less than `sigma`.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let max_off_sq = self.off.iter().map(|e| e * e).fold(0.0, f64::max);
        let pivmin = f64::MIN_POSITIVE * max_off_sq.max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - sigma;
        for i in 0..self.n() {
            if i > 0 {
                q = (self.diag[i] - sigma) - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q < 0.0 {
                count += 1;
            }
            if q.abs() < pivmin {
                q = if q < 0.0 { -pivmin } else { pivmin };
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = f64::EPSILON * self.norm_inf().max(f64::MIN_POSITIVE) * 4.0;
        (lo - pad, hi + pad)
    }

    /// The `index`-th smallest eigenvalue (0-based) by Sturm bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.n(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let floor = f64::EPSILON * self.norm_inf();
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let width = hi - lo;
            if width <= 1e-13 * lo.abs().max(hi.abs()).max(floor) {
                break;
            }
            if self.sturm_count(mid) <= index {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.eigenvalue(k)).collect()
    }

    /// Eigenvalue of smallest magnitude and a unit eigenvector.
    ///
    /// The eigenvector sign is fixed so that its first component of largest
    /// magnitude is positive.
    pub fn eigen_nearest_zero(&self) -> Result<EigenPair> {
        let n = self.n();
        let negatives = self.sturm_count(0.0);
        let below = (negatives > 0).then(|| self.eigenvalue(negatives - 1));
        let above = (negatives < n).then(|| self.eigenvalue(negatives));
        let mu = match (below, above) {
            (Some(a), Some(b)) => {
                if a.abs() < b.abs() {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!("matrix order is at least 1"),
        };
        let psi = self.inverse_iteration(mu)?;
        Ok(EigenPair { mu, psi })
    }

    /// Unit eigenvector for an eigenvalue estimate `mu`.
    pub fn inverse_iteration(&self, mu: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let norm = self.norm_inf().max(f64::MIN_POSITIVE);
        let tol = 1e-10 * norm;
        let mut best = f64::INFINITY;
        for attempt in 0..4 {
            let shift = mu + attempt as f64 * 1e-12 * norm;
            let lu = TridiagLu::factor_with_floor(&Tridiag::from(&self.shifted(shift)), f64::EPSILON * norm);
            let mut x = start_vector(n, attempt);
            let mut converged_at = None;
            for it in 0..12 {
                x = lu.solve(&x);
                if normalize(&mut x).is_none() {
                    break;
                }
                let r = eigen_residual(self, mu, &x);
                best = best.min(r);
                if r <= tol && converged_at.is_none() {
                    converged_at = Some(it);
                }
                // Two extra sweeps after convergence flush out components of
                // nearby eigenvectors.
                if let Some(c) = converged_at {
                    if it >= c + 2 {
                        break;
                    }
                }
            }
            if converged_at.is_some() && eigen_residual(self, mu, &x) <= tol {
                fix_sign(&mut x);
                return Ok(x);
            }
        }
        Err(BratuError::ConvergenceFailure { residual: best })
    }
}

fn eigen_residual(a: &SymTridiag, mu: f64, x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    ax.iter()
        .zip(x)
        .map(|(axi, xi)| (axi - mu * xi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Deterministic start vector without reflection symmetry, so that neither
/// symmetric nor antisymmetric eigenvectors are missed.
fn start_vector(n: usize, attempt: usize) -> Vec<f64> {
    let phi = 0.618_033_988_749_894_9 + 0.1 * attempt as f64;
    (0..n).map(|i| 1.0 + ((i as f64 + 1.0) * phi).fract()).collect()
}

pub(crate) fn normalize(x: &mut [f64]) -> Option<f64> {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let norm = scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    Some(norm)
}

/// Makes the first component of (numerically) largest magnitude positive.
pub(crate) fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(p) = x.iter().position(|v| v.abs() >= max * (1.0 - 1e-12)) {
        if x[p] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

impl From<&SymTridiag> for Tridiag {
    fn from(a: &SymTridiag) -> Self {
        Self {
            sub: a.off.clone(),
            diag: a.diag.clone(),
            sup: a.off.clone(),
        }
    }
}

impl Tridiag {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(BratuError::Dimension("matrix order must be at least 1".into()));
        }
        if sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(BratuError::Dimension(format!(
                "band lengths ({}, {}, {}) inconsistent",
                sub.len(),
                n,
                sup.len()
            )));
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    fn row_abs_sum(&self, i: usize) -> f64 {
        let n = self.n();
        let left = if i > 0 { self.sub[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { self.sup[i].abs() } else { 0.0 };
        left + self.diag[i].abs() + right
    }

    fn row_abs_max(&self, i: usize) -> f64 {
        let n = self.n();
        let left = if i > 0 { self.sub[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { self.sup[i].abs() } else { 0.0 };
        left.max(self.diag[i].abs()).max(right)
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n()).map(|i| self.row_abs_sum(i)).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n, "vector length must match matrix order");
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Copy with every row divided by its largest absolute entry.
    pub fn row_scaled(&self) -> Self {
        let n = self.n();
        let mut out = self.clone();
        for i in 0..n {
            let s = self.row_abs_max(i);
            if s > 0.0 {
                out.diag[i] /= s;
                if i > 0 {
                    out.sub[i - 1] /= s;
                }
                if i + 1 < n {
                    out.sup[i] /= s;
                }
            }
        }
        out
    }

    pub fn factor(&self) -> TridiagLu {
        TridiagLu::factor_with_floor(self, 0.0)
    }

    /// Solves `A x = b` with partial pivoting; fails when a pivot falls
    /// below `1e2 * eps * ||A||_inf`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n() {
            return Err(BratuError::Dimension(format!(
                "right-hand side length {} does not match order {}",
                b.len(),
                self.n()
            )));
        }
        let lu = self.factor();
        lu.check_nonsingular(SINGULAR_FACTOR * f64::EPSILON * self.norm_inf())?;
        Ok(lu.solve(b))
    }

    /// Sign of the determinant and the geometric mean of the pivot
    /// magnitudes of the row-scaled matrix, combined into one continuous
    /// indicator that changes sign exactly where the determinant does.
    pub fn signed_det_surrogate(&self) -> f64 {
        let lu = self.row_scaled().factor();
        let (sign, log_abs) = lu.log_det();
        if sign == 0.0 {
            0.0
        } else {
            sign * (log_abs / self.n() as f64).exp()
        }
    }

    /// Null vector estimate by inverse iteration at zero shift.
    pub fn null_vector(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let norm = self.norm_inf().max(f64::MIN_POSITIVE);
        let lu = TridiagLu::factor_with_floor(self, f64::EPSILON * norm);
        let mut x = start_vector(n, 0);
        for _ in 0..6 {
            x = lu.solve(&x);
            if normalize(&mut x).is_none() {
                break;
            }
        }
        let r = self.mul_vec(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
        if !r.is_finite() || r > 1e-6 * norm {
            return Err(BratuError::ConvergenceFailure { residual: r });
        }
        fix_sign(&mut x);
        Ok(x)
    }
}

/// LU factorization with partial (row) pivoting of a tridiagonal matrix.
///
/// `U` has two superdiagonals (`du`, `du2`) because of row interchanges.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factors `a`; pivots smaller than `floor` in magnitude are replaced by
    /// `±floor` (zero keeps the factorization exact).
    pub fn factor_with_floor(a: &Tridiag, floor: f64) -> Self {
        let n = a.n();
        let mut d = a.diag.clone();
        let mut du = a.sup.clone();
        let mut dl = a.sub.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let clamp = |v: f64| -> f64 {
            if v.abs() < floor {
                if v < 0.0 {
                    -floor
                } else {
                    floor
                }
            } else {
                v
            }
        };
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                d[i] = clamp(d[i]);
                let fact = if d[i] != 0.0 { dl[i] / d[i] } else { 0.0 };
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                swapped[i] = true;
            }
        }
        if n > 0 {
            d[n - 1] = clamp(d[n - 1]);
        }
        Self { d, du, du2, dl, swapped }
    }

    pub fn min_pivot(&self) -> (usize, f64) {
        self.d
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
    }

    pub fn check_nonsingular(&self, threshold: f64) -> Result<()> {
        let (row, pivot) = self.min_pivot();
        if !(pivot > threshold) {
            return Err(BratuError::SingularMatrix { row, pivot, threshold });
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * x[i + 2];
            }
            x[i] = s / self.d[i];
        }
        x
    }

    /// `(sign, ln|det|)`; sign is 0 for an exactly singular factor.
    pub fn log_det(&self) -> (f64, f64) {
        let mut sign = if self.swapped.iter().filter(|s| **s).count() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let mut log_abs = 0.0;
        for &p in &self.d {
            if p == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            if p < 0.0 {
                sign = -sign;
            }
            log_abs += p.abs().ln();
        }
        (sign, log_abs)
    }
}

/// The `(n+1) x (n+1)` matrix `[[core, border_col], [border_row^T, corner]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderedSystem {
    pub core: SymTridiag,
    pub border_col: Vec<f64>,
    pub border_row: Vec<f64>,
    pub corner: f64,
}

impl BorderedSystem {
    pub fn new(core: SymTridiag, border_col: Vec<f64>, border_row: Vec<f64>, corner: f64) -> Result<Self> {
        let n = core.n();
        if border_col.len() != n || border_row.len() != n {
            return Err(BratuError::Dimension(format!(
                "border lengths ({}, {}) must equal core order {}",
                border_col.len(),
                border_row.len(),
                n
            )));
        }
        Ok(Self {
            core,
            border_col,
            border_row,
            corner,
        })
    }

    pub fn n(&self) -> usize {
        self.core.n()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n + 1, "vector length must be n + 1");
        let mut y = self.core.mul_vec(&x[..n]);
        for (yi, ci) in y.iter_mut().zip(&self.border_col) {
            *yi += ci * x[n];
        }
        y.push(dot(&self.border_row, &x[..n]) + self.corner * x[n]);
        y
    }

    /// Componentwise (Oettli-Prager) backward error of `x`.
    pub fn backward_error(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let n = self.n();
        let r = self.mul_vec(x);
        let d = self.core.diag();
        let e = self.core.off();
        (0..=n)
            .map(|i| {
                let denom = if i < n {
                    let mut s = (d[i] * x[i]).abs() + (self.border_col[i] * x[n]).abs();
                    if i > 0 {
                        s += (e[i - 1] * x[i - 1]).abs();
                    }
                    if i + 1 < n {
                        s += (e[i] * x[i + 1]).abs();
                    }
                    s
                } else {
                    self.border_row.iter().zip(&x[..n]).map(|(a, b)| (a * b).abs()).sum::<f64>()
                        + (self.corner * x[n]).abs()
                } + rhs[i].abs();
                let num = (r[i] - rhs[i]).abs();
                if num == 0.0 {
                    0.0
                } else if denom == 0.0 {
                    f64::INFINITY
                } else {
                    num / denom
                }
            })
            .fold(0.0, f64::max)
    }

    /// Solves the bordered system by block elimination, falling back to a
    /// dense pivoted elimination when the core is (nearly) singular.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if rhs.len() != n + 1 {
            return Err(BratuError::Dimension(format!(
                "right-hand side length {} must be n + 1 = {}",
                rhs.len(),
                n + 1
            )));
        }
        if let Some(x) = self.block_elimination(rhs) {
            return Ok(x);
        }
        self.dense_solve(rhs)
    }

    fn block_elimination(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.n();
        let core = Tridiag::from(&self.core);
        let lu = core.factor();
        lu.check_nonsingular(SINGULAR_FACTOR * f64::EPSILON * core.norm_inf()).ok()?;
        let z = lu.solve(&self.border_col);
        let denom = self.corner - dot(&self.border_row, &z);
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        let elim = |f: &[f64], g: f64| -> Vec<f64> {
            let y = lu.solve(f);
            let last = (g - dot(&self.border_row, &y)) / denom;
            let mut x: Vec<f64> = y.iter().zip(&z).map(|(yi, zi)| yi - zi * last).collect();
            x.push(last);
            x
        };
        let mut x = elim(&rhs[..n], rhs[n]);
        if self.backward_error(&x, rhs) > BORDERED_BACKWARD_TOL {
            // one step of iterative refinement
            let r = self.mul_vec(&x);
            let res: Vec<f64> = rhs.iter().zip(&r).map(|(b, ax)| b - ax).collect();
            let dx = elim(&res[..n], res[n]);
            x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
        }
        let ok = x.iter().all(|v| v.is_finite()) && self.backward_error(&x, rhs) <= BORDERED_BACKWARD_TOL;
        ok.then_some(x)
    }

    fn dense_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let m = n + 1;
        let mut a = vec![0.0; m * m];
        let d = self.core.diag();
        let e = self.core.off();
        for i in 0..n {
            a[i * m + i] = d[i];
            if i + 1 < n {
                a[i * m + i + 1] = e[i];
                a[(i + 1) * m + i] = e[i];
            }
            a[i * m + n] = self.border_col[i];
            a[n * m + i] = self.border_row[i];
        }
        a[n * m + n] = self.corner;
        dense_lu_solve(a, m, rhs)
    }
}

/// Gaussian elimination with partial pivoting on a row-major `m x m` matrix.
/// Pivots are tested against the magnitude of their column.
pub(crate) fn dense_lu_solve(mut a: Vec<f64>, m: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut b = rhs.to_vec();
    let col_scale: Vec<f64> = (0..m)
        .map(|j| (0..m).map(|i| a[i * m + j].abs()).fold(0.0, f64::max))
        .collect();
    for k in 0..m {
        let (p, pmax) = (k..m)
            .map(|i| (i, a[i * m + k].abs()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let threshold = SINGULAR_FACTOR * f64::EPSILON * col_scale[k];
        if !(pmax > threshold) {
            return Err(BratuError::SingularMatrix {
                row: k,
                pivot: pmax.max(0.0),
                threshold,
            });
        }
        if p != k {
            for j in 0..m {
                a.swap(k * m + j, p * m + j);
            }
            b.swap(k, p);
        }
        let pivot = a[k * m + k];
        for i in k + 1..m {
            let f = a[i * m + k] / pivot;
            if f != 0.0 {
                a[i * m + k] = 0.0;
                for j in k + 1..m {
                    a[i * m + j] -= f * a[k * m + j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| a[i * m + j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i * m + i];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(BratuError::SingularMatrix {
            row: m.saturating_sub(1),
            pivot: 0.0,
            threshold: 0.0,
        });
    }
    Ok(x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
