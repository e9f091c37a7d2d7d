//! Pseudo-arclength continuation of the discrete branch from `(0, 0)`.
//!
//! Each accepted point carries the eigenvalue of the tangent stiffness
//! nearest zero and its Sturm count at zero. Critical points are bracketed
//! by changes of that count and pinned down by bisection in arclength, with
//! a full Newton correction at every probe. A critical point is classified
//! as a limit point when the null vector has a nonzero component along
//! `dF/dlambda` and as a bifurcation when it does not.

use serde::Serialize;
use std::sync::Arc;

use crate::discretize::{lambda_exp, DiscreteState, Grid, Scheme};
use crate::error::{BratuError, Result};
use crate::linalg::{dot, BorderedSystem};

/// `sigma_hat` above this is a limit point.
pub const LIMIT_POINT_THRESHOLD: f64 = 1e-6;
/// `sigma_hat` inside this band is reported as ambiguous.
pub const AMBIGUOUS_BAND: (f64, f64) = (1e-8, 1e-4);
/// A located point must satisfy `|mu| <= this * ||tangent||_inf`.
pub const CRITICAL_MU_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationConfig {
    pub ds_initial: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub target_u_star: f64,
    pub theta: f64,
    pub critical_bisection_tol: f64,
    /// Tracing stops once `lambda` falls below this on the descending branch.
    pub lambda_floor: f64,
    pub max_steps: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            ds_initial: 0.05,
            ds_min: 1e-10,
            ds_max: 0.5,
            newton_tol: 1e-10,
            newton_max_iters: 12,
            target_u_star: 10.0,
            theta: 0.5,
            critical_bisection_tol: 1e-10,
            lambda_floor: 1e-60,
            max_steps: 100_000,
        }
    }
}

impl ContinuationConfig {
    pub fn with_target(target_u_star: f64) -> Self {
        Self {
            target_u_star,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(BratuError::InvalidConfig(msg.to_string()));
        let positive = [
            self.ds_initial,
            self.ds_min,
            self.ds_max,
            self.newton_tol,
            self.critical_bisection_tol,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("step sizes and tolerances must be positive and finite");
        }
        if !(self.ds_min <= self.ds_initial && self.ds_initial <= self.ds_max) {
            return bad("need 0 < ds_min <= ds_initial <= ds_max");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        if self.newton_max_iters == 0 || self.max_steps == 0 {
            return bad("iteration limits must be positive");
        }
        if !self.target_u_star.is_finite() {
            return bad("target_u_star must be finite");
        }
        if !(self.lambda_floor >= 0.0) {
            return bad("lambda_floor must be nonnegative");
        }
        Ok(())
    }
}

/// Linear side condition `row_u . u + row_lambda * lambda = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub row_u: Vec<f64>,
    pub row_lambda: f64,
    pub target: f64,
}

/// Unit direction in the weighted norm
/// `||(du, dl)||^2 = theta/(N-1) |du|^2 + (1 - theta) dl^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub du: Vec<f64>,
    pub dlambda: f64,
}

pub fn weighted_norm(du: &[f64], dlambda: f64, theta: f64) -> f64 {
    let w = theta / du.len() as f64;
    (w * dot(du, du) + (1.0 - theta) * dlambda * dlambda).sqrt()
}

impl Direction {
    /// Normalized secant from `from` to `to`; `None` if they coincide.
    pub fn secant(from: &DiscreteState, to: &DiscreteState, theta: f64) -> Option<(Self, f64)> {
        let du: Vec<f64> = to.u.iter().zip(&from.u).map(|(a, b)| a - b).collect();
        let dlambda = to.lambda - from.lambda;
        let len = weighted_norm(&du, dlambda, theta);
        if !(len > 0.0) || !len.is_finite() {
            return None;
        }
        Some((
            Self {
                du: du.iter().map(|v| v / len).collect(),
                dlambda: dlambda / len,
            },
            len,
        ))
    }

    pub fn advance(&self, base: &DiscreteState, ds: f64) -> DiscreteState {
        DiscreteState {
            grid: base.grid.clone(),
            u: base.u.iter().zip(&self.du).map(|(u, d)| u + ds * d).collect(),
            lambda: base.lambda + ds * self.dlambda,
        }
    }
}

impl Constraint {
    /// Fixes `lambda`.
    pub fn natural(n: usize, lambda: f64) -> Self {
        Self {
            row_u: vec![0.0; n],
            row_lambda: 1.0,
            target: lambda,
        }
    }

    /// Weighted projection onto `dir` measured from `base` equals `ds`.
    pub fn arclength(base: &DiscreteState, dir: &Direction, ds: f64, theta: f64) -> Self {
        let w = theta / base.u.len() as f64;
        let row_u: Vec<f64> = dir.du.iter().map(|d| w * d).collect();
        let row_lambda = (1.0 - theta) * dir.dlambda;
        let target = dot(&row_u, &base.u) + row_lambda * base.lambda + ds;
        Self {
            row_u,
            row_lambda,
            target,
        }
    }

    pub fn value(&self, state: &DiscreteState) -> f64 {
        dot(&self.row_u, &state.u) + self.row_lambda * state.lambda - self.target
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub state: DiscreteState,
    pub iterations: usize,
    /// `||F||_inf` at each iterate, starting with the guess.
    pub history: Vec<f64>,
}

/// Residual scale `max(1, |lambda| max_i e^{u_i})` used by the stopping test.
pub fn residual_scale(state: &DiscreteState) -> f64 {
    let umax = state.u.iter().fold(0.0_f64, |m, v| m.max(*v));
    lambda_exp(state.lambda.abs(), umax).max(1.0)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Newton on `F(u, lambda) = 0` augmented with one linear constraint.
pub fn newton_correct(
    scheme: &Scheme,
    guess: DiscreteState,
    constraint: &Constraint,
    config: &ContinuationConfig,
) -> Result<NewtonOutcome> {
    let n = guess.u.len();
    let mut state = guess;
    let mut history = Vec::new();
    for it in 0..=config.newton_max_iters {
        let r = scheme.residual(&state)?;
        let g = constraint.value(&state);
        let rn = inf_norm(&r);
        history.push(rn);
        if rn <= config.newton_tol * residual_scale(&state) && g.abs() <= config.newton_tol {
            return Ok(NewtonOutcome {
                state,
                iterations: it,
                history,
            });
        }
        if it == config.newton_max_iters || !rn.is_finite() {
            return Err(BratuError::NoConvergence {
                iterations: it,
                residual: rn,
            });
        }
        let system = BorderedSystem::new(
            scheme.tangent(&state)?,
            scheme.d_lambda(&state)?,
            constraint.row_u.clone(),
            constraint.row_lambda,
        )?;
        let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        rhs.push(-g);
        let delta = system.solve(&rhs)?;
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(BratuError::NoConvergence {
                iterations: it,
                residual: rn,
            });
        }
        for (u, d) in state.u.iter_mut().zip(&delta[..n]) {
            *u += d;
        }
        state.lambda += delta[n];
    }
    unreachable!("loop returns on its last iteration")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub state: DiscreteState,
    pub s: f64,
    pub mu_min: f64,
    pub neg_count: usize,
    pub newton_iters: usize,
    pub u_star: f64,
}

impl BranchPoint {
    /// Evaluates the spectral data of `state`.
    pub fn new(scheme: &Scheme, state: DiscreteState, s: f64, newton_iters: usize) -> Result<Self> {
        let jac = scheme.tangent(&state)?;
        let eig = jac.eigen_nearest_zero()?;
        Ok(Self {
            s,
            mu_min: eig.mu,
            neg_count: jac.sturm_count(0.0),
            newton_iters,
            u_star: state.u_star(),
            state,
        })
    }
}

/// Incremental branch tracer; yields accepted points one at a time, starting
/// with the trivial solution.
#[derive(Debug, Clone)]
pub struct BranchTracer {
    scheme: Scheme,
    config: ContinuationConfig,
    grid: Arc<Grid>,
    prev: Option<DiscreteState>,
    current: Option<BranchPoint>,
    ds: f64,
    accepted: usize,
    finished: bool,
}

impl BranchTracer {
    pub fn new(scheme: Scheme, grid: Arc<Grid>, config: ContinuationConfig) -> Result<Self> {
        scheme.validate()?;
        config.validate()?;
        Ok(Self {
            scheme,
            config,
            grid,
            prev: None,
            current: None,
            ds: config.ds_initial,
            accepted: 0,
            finished: false,
        })
    }

    pub fn config(&self) -> &ContinuationConfig {
        &self.config
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn current(&self) -> Option<&BranchPoint> {
        self.current.as_ref()
    }

    /// Current step size.
    pub fn ds(&self) -> f64 {
        self.ds
    }

    /// Advances to the next accepted point; `Ok(None)` once a stop criterion
    /// has been met.
    pub fn next_point(&mut self) -> Result<Option<BranchPoint>> {
        if self.finished {
            return Ok(None);
        }
        let Some(current) = self.current.clone() else {
            let origin = BranchPoint::new(&self.scheme, DiscreteState::zero(self.grid.clone()), 0.0, 0)?;
            self.accepted = 1;
            self.finished = origin.u_star >= self.config.target_u_star;
            self.current = Some(origin.clone());
            return Ok(Some(origin));
        };
        if self.accepted >= self.config.max_steps {
            self.finished = true;
            return Err(BratuError::StepFailure {
                ds: self.ds,
                s: current.s,
            });
        }
        let n = current.state.u.len();
        let theta = self.config.theta;
        loop {
            let (guess, constraint) = match &self.prev {
                None => {
                    let lambda = current.state.lambda + self.ds;
                    let mut guess = current.state.clone();
                    guess.lambda = lambda;
                    (guess, Constraint::natural(n, lambda))
                }
                Some(prev) => {
                    let (dir, _) = Direction::secant(prev, &current.state, theta)
                        .expect("accepted points are distinct");
                    (
                        dir.advance(&current.state, self.ds),
                        Constraint::arclength(&current.state, &dir, self.ds, theta),
                    )
                }
            };
            let attempt = newton_correct(&self.scheme, guess, &constraint, &self.config)
                .and_then(|out| {
                    let du: Vec<f64> = out.state.u.iter().zip(&current.state.u).map(|(a, b)| a - b).collect();
                    let chord = weighted_norm(&du, out.state.lambda - current.state.lambda, theta);
                    BranchPoint::new(&self.scheme, out.state, current.s + chord, out.iterations)
                });
            match attempt {
                Ok(point) => {
                    if point.newton_iters <= 3 {
                        self.ds = (2.0 * self.ds).min(self.config.ds_max);
                    }
                    let descending = point.state.lambda < current.state.lambda;
                    self.finished = point.u_star >= self.config.target_u_star
                        || (descending && point.state.lambda < self.config.lambda_floor);
                    self.prev = Some(current.state);
                    self.current = Some(point.clone());
                    self.accepted += 1;
                    return Ok(Some(point));
                }
                Err(_) => {
                    self.ds *= 0.5;
                    if self.ds < self.config.ds_min {
                        self.finished = true;
                        return Err(BratuError::StepFailure {
                            ds: self.ds,
                            s: current.s,
                        });
                    }
                }
            }
        }
    }
}

/// Traces the branch from `(0, 0)` until a stop criterion is met.
pub fn trace_branch(scheme: &Scheme, grid: Arc<Grid>, config: &ContinuationConfig) -> Result<Vec<BranchPoint>> {
    let mut tracer = BranchTracer::new(*scheme, grid, *config)?;
    let mut points = Vec::new();
    while let Some(p) = tracer.next_point()? {
        points.push(p);
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriticalKind {
    LimitPoint,
    Bifurcation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub kind: CriticalKind,
    pub state: DiscreteState,
    /// Approximate arclength of the located point.
    pub s: f64,
    pub lambda: f64,
    pub u_star: f64,
    pub mu: f64,
    pub psi: Vec<f64>,
    pub sigma_hat: f64,
    pub antisymmetry_index: f64,
    pub sawtooth_fraction: f64,
    /// `sigma_hat` fell inside [`AMBIGUOUS_BAND`].
    pub ambiguous: bool,
    pub tangent_norm: f64,
}

/// A bracket in which bisection could not produce a critical point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LostBracket {
    pub s_lo: f64,
    pub s_hi: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CriticalSearch {
    pub points: Vec<CriticalPoint>,
    pub lost: Vec<LostBracket>,
}

impl CriticalSearch {
    fn extend(&mut self, other: CriticalSearch) {
        self.points.extend(other.points);
        self.lost.extend(other.lost);
    }
}

/// Reflection-symmetry indices of a vector:
/// `antisymmetry_index = ||psi + R psi||_inf / (2 ||psi||_inf)` (0 for an
/// antisymmetric vector, 1 for a symmetric one) and the fraction of adjacent
/// nonzero pairs of opposite sign.
pub fn classify_symmetry(psi: &[f64]) -> (f64, f64) {
    let m = psi.len();
    let max = psi.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if m == 0 || max == 0.0 {
        return (0.0, 0.0);
    }
    let anti = (0..m).map(|i| (psi[i] + psi[m - 1 - i]).abs()).fold(0.0, f64::max) / (2.0 * max);
    let tiny = 1e-13 * max;
    let (mut pairs, mut flips) = (0usize, 0usize);
    for w in psi.windows(2) {
        if w[0].abs() > tiny && w[1].abs() > tiny {
            pairs += 1;
            if w[0].signum() != w[1].signum() {
                flips += 1;
            }
        }
    }
    let saw = if pairs == 0 { 0.0 } else { flips as f64 / pairs as f64 };
    (anti, saw)
}

/// `|psi . c| / (||psi|| ||c||)`, computed with scaling so that huge
/// `dF/dlambda` entries do not overflow.
pub fn range_test(psi: &[f64], d_lambda: &[f64]) -> f64 {
    let scale = d_lambda.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let pscale = psi.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale == 0.0 || pscale == 0.0 {
        return 0.0;
    }
    let c: Vec<f64> = d_lambda.iter().map(|v| v / scale).collect();
    let p: Vec<f64> = psi.iter().map(|v| v / pscale).collect();
    dot(&p, &c).abs() / (dot(&p, &p).sqrt() * dot(&c, &c).sqrt())
}

#[derive(Debug, Clone)]
struct Probe {
    delta: f64,
    state: DiscreteState,
    count: usize,
}

struct BracketSearch<'a> {
    scheme: &'a Scheme,
    config: &'a ContinuationConfig,
    base: &'a BranchPoint,
    dir: Direction,
}

impl BracketSearch<'_> {
    fn probe(&self, delta: f64) -> Result<Probe> {
        let theta = self.config.theta;
        let guess = self.dir.advance(&self.base.state, delta);
        let constraint = Constraint::arclength(&self.base.state, &self.dir, delta, theta);
        let out = newton_correct(self.scheme, guess, &constraint, self.config)?;
        let count = self.scheme.tangent(&out.state)?.sturm_count(0.0);
        Ok(Probe {
            delta,
            state: out.state,
            count,
        })
    }

    fn lost(&self, lo: &Probe, hi: &Probe, reason: String) -> LostBracket {
        LostBracket {
            s_lo: self.base.s + lo.delta,
            s_hi: self.base.s + hi.delta,
            reason,
        }
    }

    fn refine(&self, lo: Probe, hi: Probe, out: &mut CriticalSearch) {
        if lo.count == hi.count {
            return;
        }
        if hi.delta - lo.delta <= self.config.critical_bisection_tol {
            match self.finalize(&lo, &hi) {
                Ok(p) => out.points.push(p),
                Err(e) => out.lost.push(self.lost(&lo, &hi, e.to_string())),
            }
            return;
        }
        let mid = match self.probe(0.5 * (lo.delta + hi.delta)) {
            Ok(p) => p,
            Err(e) => {
                out.lost.push(self.lost(&lo, &hi, e.to_string()));
                return;
            }
        };
        self.refine(lo, mid.clone(), out);
        self.refine(mid, hi, out);
    }

    fn finalize(&self, lo: &Probe, hi: &Probe) -> Result<CriticalPoint> {
        let mu_of = |st: &DiscreteState| -> Result<f64> { Ok(self.scheme.tangent(st)?.eigen_nearest_zero()?.mu) };
        let (mu_lo, mu_hi) = (mu_of(&lo.state)?, mu_of(&hi.state)?);
        let delta = if mu_lo.signum() != mu_hi.signum() && mu_lo != mu_hi {
            lo.delta + (hi.delta - lo.delta) * mu_lo / (mu_lo - mu_hi)
        } else {
            0.5 * (lo.delta + hi.delta)
        };
        let mut candidates = vec![(mu_lo.abs(), lo.state.clone(), lo.delta), (mu_hi.abs(), hi.state.clone(), hi.delta)];
        if let Ok(p) = self.probe(delta) {
            candidates.push((mu_of(&p.state)?.abs(), p.state, delta));
        }
        let (_, state, delta) = candidates
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least two candidates");
        let jac = self.scheme.tangent(&state)?;
        let eig = jac.eigen_nearest_zero()?;
        let tangent_norm = jac.norm_inf();
        if eig.mu.abs() > CRITICAL_MU_TOL * tangent_norm {
            return Err(BratuError::ConvergenceFailure { residual: eig.mu });
        }
        let sigma_hat = range_test(&eig.psi, &self.scheme.d_lambda(&state)?);
        let (antisymmetry_index, sawtooth_fraction) = classify_symmetry(&eig.psi);
        let kind = if sigma_hat > LIMIT_POINT_THRESHOLD {
            CriticalKind::LimitPoint
        } else {
            CriticalKind::Bifurcation
        };
        Ok(CriticalPoint {
            kind,
            s: self.base.s + delta,
            lambda: state.lambda,
            u_star: state.u_star(),
            mu: eig.mu,
            psi: eig.psi,
            sigma_hat,
            antisymmetry_index,
            sawtooth_fraction,
            ambiguous: (AMBIGUOUS_BAND.0..=AMBIGUOUS_BAND.1).contains(&sigma_hat),
            tangent_norm,
            state,
        })
    }
}

/// Locates every critical point between two consecutive accepted points.
pub fn locate_in_bracket(a: &BranchPoint, b: &BranchPoint, scheme: &Scheme, config: &ContinuationConfig) -> CriticalSearch {
    let mut out = CriticalSearch::default();
    if a.neg_count == b.neg_count {
        return out;
    }
    let Some((dir, len)) = Direction::secant(&a.state, &b.state, config.theta) else {
        return out;
    };
    let search = BracketSearch {
        scheme,
        config,
        base: a,
        dir,
    };
    let lo = Probe {
        delta: 0.0,
        state: a.state.clone(),
        count: a.neg_count,
    };
    let hi = Probe {
        delta: len,
        state: b.state.clone(),
        count: b.neg_count,
    };
    search.refine(lo, hi, &mut out);
    out
}

/// Locates and classifies every critical point along a trace, in branch
/// order.
pub fn locate_critical_points(trace: &[BranchPoint], scheme: &Scheme, config: &ContinuationConfig) -> CriticalSearch {
    let mut out = CriticalSearch::default();
    for w in trace.windows(2) {
        out.extend(locate_in_bracket(&w[0], &w[1], scheme, config));
    }
    out
}

/// Result of [`trace_to_first_bifurcation`].
#[derive(Debug, Clone)]
pub struct BifurcationSearch {
    pub trace: Vec<BranchPoint>,
    pub critical: CriticalSearch,
    /// Set when tracing stopped on an error; the trace holds the points
    /// accepted before it.
    pub error: Option<BratuError>,
}

impl BifurcationSearch {
    pub fn first_bifurcation(&self) -> Option<&CriticalPoint> {
        self.critical.points.iter().find(|p| p.kind == CriticalKind::Bifurcation)
    }
}

/// Traces the branch, locating critical points as their brackets appear,
/// and stops at the first bifurcation or when `config.target_u_star` is
/// reached.
pub fn trace_to_first_bifurcation(scheme: &Scheme, grid: Arc<Grid>, config: &ContinuationConfig) -> Result<BifurcationSearch> {
    let mut tracer = BranchTracer::new(*scheme, grid, *config)?;
    let mut out = BifurcationSearch {
        trace: Vec::new(),
        critical: CriticalSearch::default(),
        error: None,
    };
    loop {
        match tracer.next_point() {
            Ok(Some(p)) => {
                if let Some(prev) = out.trace.last() {
                    out.critical.extend(locate_in_bracket(prev, &p, scheme, config));
                }
                out.trace.push(p);
                if out.first_bifurcation().is_some() {
                    break;
                }
            }
            Ok(None) => break,
            Err(e) => {
                out.error = Some(e);
                break;
            }
        }
    }
    Ok(out)
}
