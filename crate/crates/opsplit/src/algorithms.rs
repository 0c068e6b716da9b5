//! One-step transition maps and trace-producing runners.
//!
//! All methods run with unit prox parameter; the step functions are pure and
//! the runner owns its state. For the composite problem min f(Ly) + g(y) the
//! DR and PR iterations run on the Fenchel-Rockafellar dual, with
//! `Prox_{(g*∘L*)*} = L(L*L+∂g)⁻¹L*` as the second prox.

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, RealVector};
use crate::problems::{ProblemBundle, ProblemForm};
use crate::prox::ProxFunction;
use crate::resolvent::GeneralizedResolvent;

/// Anything usable as a prox in a splitting step: a catalog function or a
/// generalized-resolvent-backed dual prox.
pub trait ProxOracle {
    fn dim(&self) -> usize;
    fn prox_map(&self, x: &RealVector) -> Result<RealVector>;
}

impl ProxOracle for ProxFunction {
    fn dim(&self) -> usize {
        ProxFunction::dim(self)
    }

    fn prox_map(&self, x: &RealVector) -> Result<RealVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self.prox(x))
    }
}

/// `Prox_{(g*∘L*)*}` viewed as a prox oracle on X.
pub struct DualProx<'a>(pub &'a GeneralizedResolvent);

impl ProxOracle for DualProx<'_> {
    fn dim(&self) -> usize {
        self.0.operator().rows()
    }

    fn prox_map(&self, x: &RealVector) -> Result<RealVector> {
        self.0.prox_dual_composition(x)
    }
}

/// DR governing state: x and its shadow y = Prox_f x.
#[derive(Debug, Clone)]
pub struct DRState {
    pub x: RealVector,
    pub y: RealVector,
}

/// ADMM state (a, u); b is produced by the step that computes it.
#[derive(Debug, Clone)]
pub struct ADMMState {
    pub a: RealVector,
    pub u: RealVector,
    pub b: Option<RealVector>,
}

impl ADMMState {
    pub fn new(a: RealVector, u: RealVector) -> Self {
        Self { a, u, b: None }
    }
}

/// ADMM-with-intermediate-multiplier state (a, u); b and w are produced per step.
#[derive(Debug, Clone)]
pub struct ADMMIntermediateState {
    pub a: RealVector,
    pub u: RealVector,
    pub w: Option<RealVector>,
    pub b: Option<RealVector>,
}

impl ADMMIntermediateState {
    pub fn new(a: RealVector, u: RealVector) -> Self {
        Self { a, u, w: None, b: None }
    }
}

/// Chambolle-Pock primal-dual pair.
#[derive(Debug, Clone)]
pub struct CPState {
    pub u: RealVector,
    pub v: RealVector,
}

/// Dykstra state with its two correction terms.
#[derive(Debug, Clone)]
pub struct DykstraState {
    pub x: RealVector,
    pub y: Option<RealVector>,
    pub p: RealVector,
    pub q: RealVector,
}

impl DykstraState {
    /// Standard start: p = q = 0.
    pub fn new(x0: RealVector) -> Self {
        let dim = x0.dim();
        Self {
            x: x0,
            y: None,
            p: RealVector::zeros(dim),
            q: RealVector::zeros(dim),
        }
    }
}

/// One DR step: y = Prox_f x, x⁺ = x − y + Prox_g(2y − x).
pub fn dr_step(
    prox_f: &dyn ProxOracle,
    prox_g: &dyn ProxOracle,
    x: &RealVector,
) -> Result<(RealVector, RealVector)> {
    let y = prox_f.prox_map(x)?;
    let reflected = &(&y * 2.0) - x;
    let x_next = &(x - &y) + &prox_g.prox_map(&reflected)?;
    Ok((x_next, y))
}

/// The DR step rewritten through the conjugate: x⁺ = y − Prox_{g*}(2y − x).
pub fn dr_step_via_conjugate(
    prox_f: &dyn ProxOracle,
    prox_g_conj: &dyn ProxOracle,
    x: &RealVector,
) -> Result<(RealVector, RealVector)> {
    let y = prox_f.prox_map(x)?;
    let reflected = &(&y * 2.0) - x;
    let x_next = &y - &prox_g_conj.prox_map(&reflected)?;
    Ok((x_next, y))
}

/// One PR step: x⁺ = R_g R_f x, with y = Prox_f x.
pub fn pr_step(
    prox_f: &dyn ProxOracle,
    prox_g: &dyn ProxOracle,
    x: &RealVector,
) -> Result<(RealVector, RealVector)> {
    let y = prox_f.prox_map(x)?;
    let reflected = &(&y * 2.0) - x;
    let x_next = &(&prox_g.prox_map(&reflected)? * 2.0) - &reflected;
    Ok((x_next, y))
}

/// One ADMM step:
/// b⁺ = (L*L+∂g)⁻¹ L*(a−u), a⁺ = Prox_f(Lb⁺+u), u⁺ = u + Lb⁺ − a⁺.
pub fn admm_step(
    res: &GeneralizedResolvent,
    prox_f: &dyn ProxOracle,
    state: &ADMMState,
) -> Result<ADMMState> {
    let l = res.operator();
    let b = res.solve(&l.adjoint_apply(&(&state.a - &state.u))?)?;
    let lb = l.apply(&b)?;
    let a = prox_f.prox_map(&(&lb + &state.u))?;
    let u = &(&state.u + &lb) - &a;
    Ok(ADMMState { a, u, b: Some(b) })
}

/// One ADMM step with intermediate multiplier update:
/// b⁺ as in ADMM, w⁺ = u + Lb⁺ − a, a⁺ = Prox_f(Lb⁺+w⁺), u⁺ = w⁺ + Lb⁺ − a⁺.
pub fn admm_intermediate_step(
    res: &GeneralizedResolvent,
    prox_f: &dyn ProxOracle,
    state: &ADMMIntermediateState,
) -> Result<ADMMIntermediateState> {
    if res.function().strongly_convex_modulus() <= 0.0 {
        log::warn!(
            "ADMM with intermediate multiplier update: g is not strongly convex; \
             the iteration is well-defined but convergence is not guaranteed"
        );
    }
    let l = res.operator();
    let b = res.solve(&l.adjoint_apply(&(&state.a - &state.u))?)?;
    let lb = l.apply(&b)?;
    let w = &(&state.u + &lb) - &state.a;
    let a = prox_f.prox_map(&(&lb + &w))?;
    let u = &(&w + &lb) - &a;
    Ok(ADMMIntermediateState {
        a,
        u,
        w: Some(w),
        b: Some(b),
    })
}

/// One Chambolle-Pock step:
/// u⁺ = Prox_f(u − A*v), v⁺ = Prox_{g*}(v + A(2u⁺ − u)). Requires ‖A‖ ≤ 1.
pub fn cp_step(
    prox_f: &dyn ProxOracle,
    prox_g_conj: &dyn ProxOracle,
    a_op: &DenseOperator,
    state: &CPState,
) -> Result<CPState> {
    let norm = a_op.operator_norm();
    if norm > 1.0 + 1e-10 {
        return Err(Error::NormExceedsOne { norm });
    }
    let u_next = prox_f.prox_map(&(&state.u - &a_op.adjoint_apply(&state.v)?))?;
    let drive = a_op.apply(&(&(&u_next * 2.0) - &state.u))?;
    let v_next = prox_g_conj.prox_map(&(&state.v + &drive))?;
    Ok(CPState {
        u: u_next,
        v: v_next,
    })
}

/// One Dykstra step:
/// y⁺ = P_V(x+p), p⁺ = x+p−y⁺, x⁺ = P_U(y⁺+q), q⁺ = y⁺+q−x⁺.
pub fn dykstra_step(
    pu: &ProxFunction,
    pv: &ProxFunction,
    state: &DykstraState,
) -> Result<DykstraState> {
    if !pu.is_indicator() || !pv.is_indicator() {
        return Err(Error::NotAnIndicator);
    }
    let y = pv.prox(&(&state.x + &state.p));
    let p = &(&state.x + &state.p) - &y;
    let x = pu.prox(&(&y + &state.q));
    let q = &(&y + &state.q) - &x;
    Ok(DykstraState {
        x,
        y: Some(y),
        p,
        q,
    })
}

/// One alternating-projections step: x ↦ P_U P_V x.
pub fn map_step(pu: &ProxFunction, pv: &ProxFunction, x: &RealVector) -> Result<RealVector> {
    if !pu.is_indicator() || !pv.is_indicator() {
        return Err(Error::NotAnIndicator);
    }
    Ok(pu.prox(&pv.prox(x)))
}

/// Forward-backward on (½d²_U, ι_V) with unit step.
///
/// The forward step x − ∇½d²_U(x) collapses to P_U x, so the update is
/// exactly P_V P_U x.
pub fn fb_feasibility_step(
    pu: &ProxFunction,
    pv: &ProxFunction,
    x: &RealVector,
) -> Result<RealVector> {
    if !pu.is_indicator() || !pv.is_indicator() {
        return Err(Error::NotAnIndicator);
    }
    Ok(pv.prox(&pu.prox(x)))
}

/// Method selector shared by the runner and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dr,
    Pr,
    Cp,
    Admm,
    AdmmIntermediate,
    Dykstra,
    Map,
    Fb,
}

impl Method {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "dr" => Some(Self::Dr),
            "pr" => Some(Self::Pr),
            "cp" => Some(Self::Cp),
            "admm" => Some(Self::Admm),
            "admm-int" => Some(Self::AdmmIntermediate),
            "dykstra" => Some(Self::Dykstra),
            "map" => Some(Self::Map),
            "fb" => Some(Self::Fb),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dr => "dr",
            Self::Pr => "pr",
            Self::Cp => "cp",
            Self::Admm => "admm",
            Self::AdmmIntermediate => "admm-int",
            Self::Dykstra => "dykstra",
            Self::Map => "map",
            Self::Fb => "fb",
        }
    }
}

/// Starting data; which variant is required depends on the method.
#[derive(Debug, Clone)]
pub enum StartState {
    /// x0 for dr / pr / dykstra / map / fb.
    Point(RealVector),
    /// (a0, u0) for the ADMM variants.
    MultiplierPair { a0: RealVector, u0: RealVector },
    /// (u0, v0) for cp.
    PrimalDualPair { u0: RealVector, v0: RealVector },
}

/// A full run: one state snapshot per iteration (the initial state included)
/// and one residual per performed step.
#[derive(Debug, Clone)]
pub struct Trace {
    pub method: Method,
    pub columns: Vec<String>,
    pub snapshots: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub stopped_early: bool,
}

impl Trace {
    fn new(method: Method, columns: Vec<String>) -> Self {
        Self {
            method,
            columns,
            snapshots: Vec::new(),
            residuals: Vec::new(),
            stopped_early: false,
        }
    }

    /// Number of steps actually performed.
    pub fn steps(&self) -> usize {
        self.snapshots.len().saturating_sub(1)
    }
}

fn columns_for(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("{prefix}{i}")).collect()
}

fn push_vec(row: &mut Vec<f64>, v: &RealVector) {
    row.extend_from_slice(v.as_slice());
}

fn push_opt(row: &mut Vec<f64>, v: &Option<RealVector>, dim: usize) {
    match v {
        Some(v) => push_vec(row, v),
        None => row.extend(std::iter::repeat(f64::NAN).take(dim)),
    }
}

/// Runs `method` on `bundle` for at most `iterations` steps, stopping early
/// once the method residual drops to `stop_tol` or below.
pub fn run(
    method: Method,
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    match method {
        Method::Dr | Method::Pr => run_dr_pr(method, bundle, start, iterations, stop_tol),
        Method::Cp => run_cp(bundle, start, iterations, stop_tol),
        Method::Admm => run_admm(bundle, start, iterations, stop_tol),
        Method::AdmmIntermediate => run_admm_intermediate(bundle, start, iterations, stop_tol),
        Method::Dykstra => run_dykstra(bundle, start, iterations, stop_tol),
        Method::Map | Method::Fb => run_projection_method(method, bundle, start, iterations, stop_tol),
    }
}

fn expect_point(start: &StartState) -> Result<&RealVector> {
    match start {
        StartState::Point(x) => Ok(x),
        _ => Err(Error::InvalidParameter(
            "this method starts from a single point x0".into(),
        )),
    }
}

fn run_dr_pr(
    method: Method,
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    let x0 = expect_point(start)?.clone();
    let f = &bundle.f;

    // The second prox: the dual composition for composite problems, plain
    // Prox_g when L = Id (feasibility form).
    let res;
    let second: Box<dyn ProxOracle> = match bundle.form {
        ProblemForm::CompositeL => {
            res = GeneralizedResolvent::new(bundle.op.clone(), bundle.g.clone())?;
            Box::new(DualProx(&res))
        }
        ProblemForm::Feasibility => Box::new(bundle.g.clone()),
        ProblemForm::CompositeA => {
            return Err(Error::InvalidParameter(
                "dr/pr run on composite-L or feasibility bundles".into(),
            ))
        }
    };

    let dim = x0.dim();
    let mut columns = columns_for("x", dim);
    columns.extend(columns_for("y", dim));
    let mut trace = Trace::new(method, columns);

    let mut x = x0;
    let mut y = f.prox_map(&x)?;
    let mut row = Vec::new();
    push_vec(&mut row, &x);
    push_vec(&mut row, &y);
    trace.snapshots.push(row);

    for _ in 0..iterations {
        let (x_next, _) = match method {
            Method::Dr => dr_step(f, second.as_ref(), &x)?,
            Method::Pr => pr_step(f, second.as_ref(), &x)?,
            _ => unreachable!(),
        };
        let residual = (&x_next - &x).norm();
        x = x_next;
        y = f.prox_map(&x)?;
        let mut row = Vec::new();
        push_vec(&mut row, &x);
        push_vec(&mut row, &y);
        trace.snapshots.push(row);
        trace.residuals.push(residual);
        if residual <= stop_tol {
            trace.stopped_early = true;
            break;
        }
    }
    Ok(trace)
}

fn run_cp(
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    let (u0, v0) = match start {
        StartState::PrimalDualPair { u0, v0 } => (u0.clone(), v0.clone()),
        _ => {
            return Err(Error::InvalidParameter(
                "cp starts from a primal-dual pair (u0, v0)".into(),
            ))
        }
    };
    if !matches!(bundle.form, ProblemForm::CompositeA | ProblemForm::Feasibility) {
        return Err(Error::InvalidParameter(
            "cp runs on composite-A or feasibility bundles".into(),
        ));
    }
    let g_conj = bundle.g.conjugate();

    let mut columns = columns_for("u", u0.dim());
    columns.extend(columns_for("v", v0.dim()));
    let mut trace = Trace::new(Method::Cp, columns);

    let mut state = CPState { u: u0, v: v0 };
    let mut row = Vec::new();
    push_vec(&mut row, &state.u);
    push_vec(&mut row, &state.v);
    trace.snapshots.push(row);

    for _ in 0..iterations {
        let next = cp_step(&bundle.f, &g_conj, &bundle.op, &state)?;
        let residual = (&next.u - &state.u).norm() + (&next.v - &state.v).norm();
        state = next;
        let mut row = Vec::new();
        push_vec(&mut row, &state.u);
        push_vec(&mut row, &state.v);
        trace.snapshots.push(row);
        trace.residuals.push(residual);
        if residual <= stop_tol {
            trace.stopped_early = true;
            break;
        }
    }
    Ok(trace)
}

fn expect_multiplier_pair(start: &StartState) -> Result<(RealVector, RealVector)> {
    match start {
        StartState::MultiplierPair { a0, u0 } => Ok((a0.clone(), u0.clone())),
        _ => Err(Error::InvalidParameter(
            "admm variants start from a multiplier pair (a0, u0)".into(),
        )),
    }
}

fn admm_bundle_resolvent(bundle: &ProblemBundle) -> Result<GeneralizedResolvent> {
    if !matches!(bundle.form, ProblemForm::CompositeL | ProblemForm::Feasibility) {
        return Err(Error::InvalidParameter(
            "admm runs on composite-L or feasibility bundles".into(),
        ));
    }
    GeneralizedResolvent::new(bundle.op.clone(), bundle.g.clone())
}

fn run_admm(
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    let (a0, u0) = expect_multiplier_pair(start)?;
    let res = admm_bundle_resolvent(bundle)?;
    let dim_x = a0.dim();
    let dim_y = bundle.op.cols();

    let mut columns = columns_for("a", dim_x);
    columns.extend(columns_for("u", dim_x));
    columns.extend(columns_for("b", dim_y));
    let mut trace = Trace::new(Method::Admm, columns);

    let mut state = ADMMState::new(a0, u0);
    let mut row = Vec::new();
    push_vec(&mut row, &state.a);
    push_vec(&mut row, &state.u);
    push_opt(&mut row, &state.b, dim_y);
    trace.snapshots.push(row);

    for _ in 0..iterations {
        let next = admm_step(&res, &bundle.f, &state)?;
        let residual = (&next.a - &state.a).norm() + (&next.u - &state.u).norm();
        state = next;
        let mut row = Vec::new();
        push_vec(&mut row, &state.a);
        push_vec(&mut row, &state.u);
        push_opt(&mut row, &state.b, dim_y);
        trace.snapshots.push(row);
        trace.residuals.push(residual);
        if residual <= stop_tol {
            trace.stopped_early = true;
            break;
        }
    }
    Ok(trace)
}

fn run_admm_intermediate(
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    let (a0, u0) = expect_multiplier_pair(start)?;
    let res = admm_bundle_resolvent(bundle)?;
    let dim_x = a0.dim();
    let dim_y = bundle.op.cols();

    let mut columns = columns_for("a", dim_x);
    columns.extend(columns_for("u", dim_x));
    columns.extend(columns_for("w", dim_x));
    columns.extend(columns_for("b", dim_y));
    let mut trace = Trace::new(Method::AdmmIntermediate, columns);

    let mut state = ADMMIntermediateState::new(a0, u0);
    let mut row = Vec::new();
    push_vec(&mut row, &state.a);
    push_vec(&mut row, &state.u);
    push_opt(&mut row, &state.w, dim_x);
    push_opt(&mut row, &state.b, dim_y);
    trace.snapshots.push(row);

    for _ in 0..iterations {
        let next = admm_intermediate_step(&res, &bundle.f, &state)?;
        let residual = (&next.a - &state.a).norm() + (&next.u - &state.u).norm();
        state = next;
        let mut row = Vec::new();
        push_vec(&mut row, &state.a);
        push_vec(&mut row, &state.u);
        push_opt(&mut row, &state.w, dim_x);
        push_opt(&mut row, &state.b, dim_y);
        trace.snapshots.push(row);
        trace.residuals.push(residual);
        if residual <= stop_tol {
            trace.stopped_early = true;
            break;
        }
    }
    Ok(trace)
}

fn feasibility_projectors(bundle: &ProblemBundle) -> Result<(&ProxFunction, &ProxFunction)> {
    if bundle.form != ProblemForm::Feasibility {
        return Err(Error::InvalidParameter(
            "projection methods run on feasibility bundles".into(),
        ));
    }
    if !bundle.f.is_indicator() || !bundle.g.is_indicator() {
        return Err(Error::NotAnIndicator);
    }
    Ok((&bundle.f, &bundle.g))
}

fn run_dykstra(
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    let x0 = expect_point(start)?.clone();
    let (pu, pv) = feasibility_projectors(bundle)?;
    let dim = x0.dim();

    let mut columns = columns_for("x", dim);
    columns.extend(columns_for("y", dim));
    columns.extend(columns_for("p", dim));
    columns.extend(columns_for("q", dim));
    let mut trace = Trace::new(Method::Dykstra, columns);

    let mut state = DykstraState::new(x0);
    let mut row = Vec::new();
    push_vec(&mut row, &state.x);
    push_opt(&mut row, &state.y, dim);
    push_vec(&mut row, &state.p);
    push_vec(&mut row, &state.q);
    trace.snapshots.push(row);

    for _ in 0..iterations {
        let next = dykstra_step(pu, pv, &state)?;
        let residual = (&next.x - &state.x).norm()
            + (&next.p - &state.p).norm()
            + (&next.q - &state.q).norm();
        state = next;
        let mut row = Vec::new();
        push_vec(&mut row, &state.x);
        push_opt(&mut row, &state.y, dim);
        push_vec(&mut row, &state.p);
        push_vec(&mut row, &state.q);
        trace.snapshots.push(row);
        trace.residuals.push(residual);
        if residual <= stop_tol {
            trace.stopped_early = true;
            break;
        }
    }
    Ok(trace)
}

fn run_projection_method(
    method: Method,
    bundle: &ProblemBundle,
    start: &StartState,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trace> {
    let x0 = expect_point(start)?.clone();
    let (pu, pv) = feasibility_projectors(bundle)?;

    let mut trace = Trace::new(method, columns_for("x", x0.dim()));
    let mut x = x0;
    let mut row = Vec::new();
    push_vec(&mut row, &x);
    trace.snapshots.push(row);

    for _ in 0..iterations {
        let x_next = match method {
            Method::Map => map_step(pu, pv, &x)?,
            Method::Fb => fb_feasibility_step(pu, pv, &x)?,
            _ => unreachable!(),
        };
        let residual = (&x_next - &x).norm();
        x = x_next;
        let mut row = Vec::new();
        push_vec(&mut row, &x);
        trace.snapshots.push(row);
        trace.residuals.push(residual);
        if residual <= stop_tol {
            trace.stopped_early = true;
            break;
        }
    }
    Ok(trace)
}
