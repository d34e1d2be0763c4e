//! Compositions of the linear decomposition step (A) with the frozen
//! nonlinear flow (B), plus the standard kinetic/potential split.

use std::fmt;
use std::str::FromStr;

use rotsplit_core::{
    decompose_affine_step, decompose_step, magnus::dissipative_step_scale, MagnusOrder, QuadraticHamiltonian,
};

use crate::error::{Result, RotError};
use crate::nonlinear::{b_flow, nonlinear_flow_with, NonlinearTerm};
use crate::spectral::{apply_tx, apply_ty, rot_step, rot_step_affine, trap_potential};
use crate::wave::WaveFunction;

/// Recursion depth for splitting an A step whose coefficients do not solve.
const MAX_HALVINGS: u32 = 4;

/// Everything a step needs besides the state.
#[derive(Clone)]
pub struct Problem {
    pub h_a: QuadraticHamiltonian,
    pub term: NonlinearTerm,
    pub magnus: MagnusOrder,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("rotation", &self.h_a.rotation)
            .field("term", &self.term)
            .field("magnus", &self.magnus)
            .finish()
    }
}

impl Problem {
    /// The damping of `term` is copied into `h_a`.
    pub fn new(h_a: QuadraticHamiltonian, term: NonlinearTerm, magnus: MagnusOrder) -> Result<Self> {
        h_a.validate()?;
        let h_a = h_a.with_dissipation(term.lambda);
        Ok(Problem { h_a, term, magnus })
    }

    pub fn lambda(&self) -> f64 {
        self.term.lambda
    }

    pub fn is_dissipative(&self) -> bool {
        self.term.lambda != 0.0
    }
}

/// Counters shared by the stages of one integration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepStats {
    /// A steps that had to be split because the coefficient solve failed.
    pub halvings: u32,
    /// Largest solver residual accepted.
    pub max_residual: f64,
}

/// Time-stepping method identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Nonlinear Strang wrap of the decomposition.
    Rot2,
    /// Kinetic/potential split with six transforms.
    Std2,
    /// Triple jump of STD2.
    Y4Std,
    /// Triple jump of ROT2.
    Y4Rot,
    /// Optimized SRKN composition around the decomposition.
    Bm4Rot,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Rot2, Method::Std2, Method::Y4Std, Method::Y4Rot, Method::Bm4Rot];

    pub fn id(self) -> &'static str {
        match self {
            Method::Rot2 => "ROT2",
            Method::Std2 => "STD2",
            Method::Y4Std => "Y4-STD",
            Method::Y4Rot => "Y4-ROT",
            Method::Bm4Rot => "BM4-ROT",
        }
    }

    /// Nominal order in the step size.
    pub fn order(self) -> u32 {
        match self {
            Method::Rot2 | Method::Std2 => 2,
            _ => 4,
        }
    }

    pub fn uses_negative_steps(self) -> bool {
        matches!(self, Method::Y4Std | Method::Y4Rot | Method::Bm4Rot)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = RotError;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase();
        Method::ALL.into_iter().find(|m| m.id() == wanted).ok_or_else(|| {
            let ids: Vec<_> = Method::ALL.iter().map(|m| m.id()).collect();
            RotError::Invalid(format!("unknown method `{s}`, expected one of {}", ids.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    /// Decomposition step over `coefficient * h`, advancing time.
    A,
    /// Nonlinear flow frozen at the current stage time.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub kind: StageKind,
    pub coefficient: f64,
}

/// Ordered A/B stage list of a composition.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingScheme {
    pub name: &'static str,
    pub stages: Vec<Stage>,
    pub order: u32,
    pub generalized_order: Option<(u32, u32)>,
}

impl SplittingScheme {
    fn from_pairs(name: &'static str, b: &[f64], a: &[f64], order: u32) -> Self {
        let mut stages = Vec::with_capacity(a.len() + b.len());
        for (j, &bj) in b.iter().enumerate() {
            stages.push(Stage { kind: StageKind::B, coefficient: bj });
            if let Some(&aj) = a.get(j) {
                stages.push(Stage { kind: StageKind::A, coefficient: aj });
            }
        }
        SplittingScheme { name, stages, order, generalized_order: None }
    }

    /// `B_{h/2} A_h B_{h/2}`.
    pub fn strang() -> Self {
        let mut s = Self::from_pairs("Strang", &[0.5, 0.5], &[1.0], 2);
        s.generalized_order = Some((4, 2));
        s
    }

    /// Blanes and Moan, J. Comput. Appl. Math. 142 (2002), SRKN_6^b.
    pub fn bm4() -> Self {
        let (a1, a2) = (0.245298957184271, 0.604872665711080);
        let a3 = 0.5 - (a1 + a2);
        let (b1, b2, b3) = (0.0829844064174052, 0.396309801498368, -0.0390563049223486);
        let b4 = 1.0 - 2.0 * (b1 + b2 + b3);
        Self::from_pairs("SRKN6b", &[b1, b2, b3, b4, b3, b2, b1], &[a1, a2, a3, a3, a2, a1], 4)
    }

    fn sum(&self, kind: StageKind) -> f64 {
        self.stages.iter().filter(|s| s.kind == kind).map(|s| s.coefficient).sum()
    }

    pub fn a_sum(&self) -> f64 {
        self.sum(StageKind::A)
    }

    pub fn b_sum(&self) -> f64 {
        self.sum(StageKind::B)
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.stages.len();
        (0..n / 2).all(|j| {
            let (p, q) = (self.stages[j], self.stages[n - 1 - j]);
            p.kind == q.kind && (p.coefficient - q.coefficient).abs() <= 1e-15
        })
    }

    pub fn has_negative_a(&self) -> bool {
        self.stages.iter().any(|s| s.kind == StageKind::A && s.coefficient < 0.0)
    }

    pub fn a_stage_count(&self) -> usize {
        self.stages.iter().filter(|s| s.kind == StageKind::A).count()
    }
}

/// Linear flow of `H_A` over `[t, t + h]` through the four-factor (or
/// five-factor affine) decomposition. A failed solve is retried as two half
/// steps.
pub fn a_flow(psi: &mut WaveFunction, problem: &Problem, t: f64, h: f64, stats: &mut StepStats) -> Result<()> {
    a_flow_depth(psi, problem, t, h, stats, 0)
}

fn a_flow_depth(
    psi: &mut WaveFunction,
    problem: &Problem,
    t: f64,
    h: f64,
    stats: &mut StepStats,
    depth: u32,
) -> Result<()> {
    let solved = if problem.h_a.has_linear_terms() {
        decompose_affine_step(&problem.h_a, t, h, problem.magnus, 1e-12).map(|c| (c.residual, Some(c), None))
    } else {
        decompose_step(&problem.h_a, t, h, problem.magnus).map(|c| (c.residual, None, Some(c)))
    };
    match solved {
        Ok((residual, affine, quad)) => {
            stats.max_residual = stats.max_residual.max(residual);
            if let Some(c) = affine {
                rot_step_affine(psi, &c)
            } else {
                rot_step(psi, &quad.expect("quadratic coefficients"))
            }
        }
        Err(e @ rotsplit_core::Error::NotConverged { .. }) => {
            if depth >= MAX_HALVINGS {
                return Err(RotError::Solver { t, h, source: e });
            }
            stats.halvings += 1;
            a_flow_depth(psi, problem, t, h / 2.0, stats, depth + 1)?;
            a_flow_depth(psi, problem, t + h / 2.0, h / 2.0, stats, depth + 1)
        }
        Err(e) => Err(RotError::Solver { t, h, source: e }),
    }
}

/// ROT2: `B(t + h)_{h/2} A_{t, t+h} B(t)_{h/2}`.
pub fn strang_wrap(psi: &mut WaveFunction, problem: &Problem, t: f64, h: f64, stats: &mut StepStats) -> Result<()> {
    b_flow(psi, &problem.term, t, h / 2.0)?;
    a_flow(psi, problem, t, h, stats)?;
    b_flow(psi, &problem.term, t + h, h / 2.0)
}

/// STD2: the trap and nonlinearity at the ends, `T_x` half steps around a
/// full `T_y` step; six transforms.
pub fn std2_step(psi: &mut WaveFunction, problem: &Problem, t: f64, h: f64) -> Result<()> {
    let h_a = &problem.h_a;
    let rotation = h_a.rotation;
    let mid = t + h / 2.0;
    let step = dissipative_step_scale(h, problem.lambda());
    let half = step * 0.5;
    w_flow(psi, problem, t, h / 2.0)?;
    apply_tx(psi, half, h_a.mass_x_at(mid), rotation)?;
    apply_ty(psi, step, h_a.mass_y_at(mid), rotation)?;
    apply_tx(psi, half, h_a.mass_x_at(mid), rotation)?;
    w_flow(psi, problem, t + h, h / 2.0)
}

/// Trap plus frozen nonlinearity at `t`; the damped closed form sees the
/// trap as part of its potential.
fn w_flow(psi: &mut WaveFunction, problem: &Problem, t: f64, h: f64) -> Result<()> {
    let trap = trap_potential(&problem.h_a, t);
    nonlinear_flow_with(psi, &problem.term, t, h, trap)
}

/// `Psi_{gamma h} Psi_{(1 - 2 gamma) h} Psi_{gamma h}` with
/// `gamma = 1/(2 - 2^{1/3})`.
pub fn triple_jump(
    mut base_step: impl FnMut(&mut WaveFunction, f64, f64) -> Result<()>,
    psi: &mut WaveFunction,
    t: f64,
    h: f64,
) -> Result<()> {
    let gamma = triple_jump_gamma();
    let inner = (1.0 - 2.0 * gamma) * h;
    base_step(psi, t, gamma * h)?;
    base_step(psi, t + gamma * h, inner)?;
    base_step(psi, t + gamma * h + inner, gamma * h)
}

pub fn triple_jump_gamma() -> f64 {
    1.0 / (2.0 - 2f64.cbrt())
}

/// One step of a B-first A/B composition; A stages advance time, B stages
/// are frozen at the accumulated time.
pub fn srkn_step(
    psi: &mut WaveFunction,
    scheme: &SplittingScheme,
    problem: &Problem,
    t: f64,
    h: f64,
    stats: &mut StepStats,
) -> Result<()> {
    if problem.is_dissipative() && scheme.has_negative_a() {
        return Err(RotError::Invalid(format!(
            "{} has negative A stages, which are unstable with damping",
            scheme.name
        )));
    }
    let mut tau = t;
    for stage in &scheme.stages {
        let dt = stage.coefficient * h;
        match stage.kind {
            StageKind::B => b_flow(psi, &problem.term, tau, dt)?,
            StageKind::A => {
                a_flow(psi, problem, tau, dt, stats)?;
                tau += dt;
            }
        }
    }
    Ok(())
}

/// One step of `method`.
pub fn method_step(
    method: Method,
    psi: &mut WaveFunction,
    problem: &Problem,
    t: f64,
    h: f64,
    stats: &mut StepStats,
) -> Result<()> {
    if problem.is_dissipative() && method.uses_negative_steps() {
        return Err(RotError::Invalid(format!(
            "{method} uses negative substeps, which are unstable with damping"
        )));
    }
    match method {
        Method::Rot2 => strang_wrap(psi, problem, t, h, stats),
        Method::Std2 => std2_step(psi, problem, t, h),
        Method::Y4Std => triple_jump(|p, t, h| std2_step(p, problem, t, h), psi, t, h),
        Method::Y4Rot => triple_jump(|p, t, h| strang_wrap(p, problem, t, h, stats), psi, t, h),
        Method::Bm4Rot => srkn_step(psi, &SplittingScheme::bm4(), problem, t, h, stats),
    }
}

/// Per-run instrumentation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Norm after each step, starting with the initial norm.
    pub norms: Vec<f64>,
    /// Largest mass seen in the two outermost cells along any edge.
    pub boundary_mass: f64,
    pub fft_count: u64,
    pub stats: StepStats,
}

impl Diagnostics {
    /// Largest deviation of the norm from its initial value.
    pub fn norm_drift(&self) -> f64 {
        let first = self.norms.first().copied().unwrap_or(0.0);
        self.norms.iter().map(|n| (n - first).abs()).fold(0.0, f64::max)
    }

    pub fn norm_strictly_decreasing(&self) -> bool {
        self.norms.windows(2).all(|w| w[1] < w[0])
    }
}

/// Advances `psi0` from `t0` to `t_end` in `n_steps` uniform steps.
pub fn integrate(
    psi0: &WaveFunction,
    method: Method,
    problem: &Problem,
    t0: f64,
    t_end: f64,
    n_steps: usize,
) -> Result<(WaveFunction, Diagnostics)> {
    if n_steps == 0 {
        return Err(RotError::Invalid("n_steps must be at least 1".into()));
    }
    if !(t_end - t0).is_finite() {
        return Err(RotError::Invalid("non-finite time interval".into()));
    }
    let h = (t_end - t0) / n_steps as f64;
    let mut psi = psi0.clone();
    psi.reset_fft_count();
    let mut diag = Diagnostics { norms: Vec::with_capacity(n_steps + 1), ..Diagnostics::default() };
    diag.norms.push(psi.norm());
    diag.boundary_mass = psi.boundary_mass()?;
    let mut stats = StepStats::default();
    for j in 0..n_steps {
        let t = t0 + j as f64 * h;
        method_step(method, &mut psi, problem, t, h, &mut stats)?;
        diag.norms.push(psi.norm());
        diag.boundary_mass = diag.boundary_mass.max(psi.boundary_mass()?);
    }
    diag.fft_count = psi.fft_count();
    diag.stats = stats;
    Ok((psi, diag))
}
