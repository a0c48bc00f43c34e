//! Minimizing movements: each step minimizes
//! `∫|∇u|² + Per(E) + (1/dt) ∫_{E Δ E0} dist(x, ∂E0)` over admissible sets.
//!
//! The per-step minimization is a descent method. The starting iterate is the
//! smooth flow from `E0` run for time `dt` (at most `max_inner` steps); from
//! there the set is evolved in pseudo-time with `V = u_ν² - H - d0/dt`, where
//! `d0` is the signed distance to `∂E0` read at the foot point. The
//! lowest-energy iterate wins, and `E0` itself always competes.

use crate::capacity::{
    dirichlet_energy, solve_capacity_with, DomainConfig, PotentialSolution, SolverOpts,
};
use crate::error::{Error, Result};
use crate::grid::{self, redistance, LevelSetField};
use crate::smoothflow::{
    apply_velocity, band_nodes, cfl_dt, check_confinement, clamp_to_domain, min_distance_to,
    nodal_velocity, step, upwind_norm, FlowState, Motion, StepControl, StepOutcome,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub perimeter: f64,
    pub penalty: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.dirichlet + self.perimeter + self.penalty
    }

    /// Dirichlet energy plus perimeter.
    pub fn bulk(&self) -> f64 {
        self.dirichlet + self.perimeter
    }
}

/// Inner-loop controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerOpts {
    /// Stop once the energy drops by less than this fraction over `window` iterations.
    pub tol_rel: f64,
    pub window: usize,
    pub max_inner: usize,
    pub cfl_curvature: f64,
    pub cfl_advect: f64,
    pub reinit_every: usize,
}

impl Default for InnerOpts {
    fn default() -> Self {
        let c = StepControl::default();
        Self {
            tol_rel: 1e-5,
            window: 10,
            max_inner: 500,
            cfl_curvature: c.cfl_curvature,
            cfl_advect: c.cfl_advect,
            reinit_every: c.reinit_every,
        }
    }
}

impl InnerOpts {
    fn control(&self) -> StepControl {
        StepControl {
            cfl_curvature: self.cfl_curvature,
            cfl_advect: self.cfl_advect,
            reinit_every: self.reinit_every,
            t_end: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.control().validate()?;
        if !(self.tol_rel > 0.0) || self.window == 0 {
            return Err(Error::OutOfDomain(
                "tol_rel must be positive and window at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one minimizing-movement step.
#[derive(Clone, Debug)]
pub struct FlatStep {
    pub set: LevelSetField,
    pub potential: PotentialSolution,
    /// Penalty measured against the previous set.
    pub energy: EnergyBreakdown,
    /// Descent iterations performed.
    pub inner_iterations: usize,
    /// Smooth-flow steps taken to build the starting iterate.
    pub predictor_steps: usize,
    /// False when `max_inner` was hit before the energy settled.
    pub stationary: bool,
    /// Smallest distance from `∂E` to `∂D_in`.
    pub min_dist_din: f64,
}

#[derive(Clone, Debug)]
pub struct ApproximateFlow {
    dt: f64,
    /// Entry 0 is the initial set, with zero penalty.
    steps: Vec<FlatStep>,
}

impl ApproximateFlow {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> &[FlatStep] {
        &self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// The piecewise-constant flow: the set of the last step at or before `t`.
    pub fn set_at(&self, t: f64) -> &LevelSetField {
        let k = ((t / self.dt).floor().max(0.0) as usize).min(self.steps.len() - 1);
        &self.steps[k].set
    }

    /// Iterations per step, initial set excluded.
    pub fn inner_iterations(&self) -> Vec<usize> {
        self.steps[1..].iter().map(|s| s.inner_iterations).collect()
    }
}

/// Energy of `e` with penalty against `e0`, whose values are read as the
/// signed distance to `∂E0`.
pub fn energy(
    domain: &DomainConfig,
    e: &LevelSetField,
    e0: &LevelSetField,
    dt: f64,
    solver: &SolverOpts,
) -> Result<EnergyBreakdown> {
    check_dt(dt)?;
    domain.require_bounded()?;
    check_confinement(domain, e)?;
    let u = solve_capacity_with(domain, e, solver, None)?;
    breakdown(&u, e, e0, dt)
}

fn breakdown(
    u: &PotentialSolution,
    e: &LevelSetField,
    e0: &LevelSetField,
    dt: f64,
) -> Result<EnergyBreakdown> {
    Ok(EnergyBreakdown {
        dirichlet: dirichlet_energy(u),
        perimeter: grid::perimeter(e),
        penalty: grid::distance_integral(e, e0)? / dt,
    })
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("dt must be positive, got {dt}")))
    }
}

/// One step from `e0`, which should be close to a signed distance function.
pub fn minimize_step(
    domain: &DomainConfig,
    e0: &LevelSetField,
    dt: f64,
    opts: &InnerOpts,
    solver: &SolverOpts,
) -> Result<FlatStep> {
    check_dt(dt)?;
    opts.validate()?;
    domain.require_bounded()?;
    domain.spec().same_grid(e0.spec())?;
    check_confinement(domain, e0)?;
    let u0 = solve_capacity_with(domain, e0, solver, None)?;
    minimize_from(domain, e0, u0, dt, opts, solver)
}

fn minimize_from(
    domain: &DomainConfig,
    e0: &LevelSetField,
    u0: PotentialSolution,
    dt: f64,
    opts: &InnerOpts,
    solver: &SolverOpts,
) -> Result<FlatStep> {
    let ctl = opts.control();
    let mut best = FlatStep {
        set: e0.clone(),
        energy: breakdown(&u0, e0, e0, dt)?,
        potential: u0,
        inner_iterations: 0,
        predictor_steps: 0,
        stationary: false,
        min_dist_din: 0.0,
    };

    // predictor: the smooth flow from E0 run for time dt
    let pred_ctl = StepControl { t_end: dt, ..ctl };
    let mut state = FlowState::from_parts(e0.clone(), best.potential.clone());
    let mut predictor_steps = 0;
    while state.t() < dt && predictor_steps < opts.max_inner {
        match step(&state, domain, &pred_ctl, solver)? {
            StepOutcome::Advanced(next) => state = next,
            StepOutcome::Extinct(_) => break,
        }
        predictor_steps += 1;
    }
    let (mut e, mut u) = state.into_parts();

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut stationary = false;
    loop {
        let en = breakdown(&u, &e, e0, dt)?;
        if en.total() < best.energy.total() {
            best.set = e.clone();
            best.potential = u.clone();
            best.energy = en;
        }
        history.push(en.total());
        if history.len() > opts.window {
            let old = history[history.len() - 1 - opts.window];
            if (old - en.total()) < opts.tol_rel * en.total().abs() {
                stationary = true;
                break;
            }
        }
        if iterations == opts.max_inner {
            break;
        }
        let m = descent(&e, &u, e0, dt)?;
        let tau = cfl_dt(e.spec(), &m, &ctl);
        let (next, _) = apply_velocity(&e, &m.band, &m.vel, &m.grad, tau, domain);
        if !next.has_interface() {
            break;
        }
        iterations += 1;
        e = if iterations % opts.reinit_every == 0 {
            let mut r = redistance(&next)?;
            clamp_to_domain(&mut r, domain);
            r
        } else {
            next
        };
        u = solve_capacity_with(domain, &e, solver, Some(u.u()))?;
    }
    best.inner_iterations = iterations;
    best.predictor_steps = predictor_steps;
    best.stationary = stationary;
    best.min_dist_din = min_distance_to(&best.set, domain.d_in());
    Ok(best)
}

/// Descent velocity `u_ν² - H - d0/dt` on the band, with `d0` taken at the
/// foot point `x - e(x) n`.
fn descent(
    e: &LevelSetField,
    u: &PotentialSolution,
    e0: &LevelSetField,
    dt: f64,
) -> Result<Motion> {
    let v = nodal_velocity(e, u)?;
    let band = band_nodes(e);
    let (ev, e0v) = (e.values(), e0.values());
    let vel: Vec<f64> = band
        .iter()
        .map(|&i| v.values()[i] - (e0v[i] - ev[i]) / dt)
        .collect();
    let grad = band
        .iter()
        .zip(&vel)
        .map(|(&i, &vi)| upwind_norm(e, i, vi))
        .collect();
    Ok(Motion { band, vel, grad })
}

/// `k_steps` minimizing movements from `e0`, each penalized against the last.
pub fn approximate_flow(
    domain: &DomainConfig,
    e0: &LevelSetField,
    dt: f64,
    k_steps: usize,
    opts: &InnerOpts,
    solver: &SolverOpts,
) -> Result<ApproximateFlow> {
    check_dt(dt)?;
    opts.validate()?;
    domain.require_bounded()?;
    domain.spec().same_grid(e0.spec())?;
    check_confinement(domain, e0)?;
    let mut start = redistance(e0)?;
    clamp_to_domain(&mut start, domain);
    let u0 = solve_capacity_with(domain, &start, solver, None)?;
    let mut steps = vec![FlatStep {
        energy: breakdown(&u0, &start, &start, dt)?,
        min_dist_din: min_distance_to(&start, domain.d_in()),
        set: start,
        potential: u0,
        inner_iterations: 0,
        predictor_steps: 0,
        stationary: true,
    }];
    for _ in 0..k_steps {
        let prev = steps.last().expect("initial step");
        let next = minimize_from(domain, &prev.set, prev.potential.clone(), dt, opts, solver)?;
        steps.push(next);
    }
    Ok(ApproximateFlow { dt, steps })
}

/// Outcome of the Hölder-in-time check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoelderFit {
    /// `C` fitted on the pair `(0, 1)`.
    pub fitted_c: f64,
    pub exponent: f64,
    /// Pairs with `|E_{k+N} Δ E_k| > 2 C (N dt)^exponent`.
    pub violations: usize,
    pub pairs: usize,
    /// Largest ratio `|E_{k+N} Δ E_k| / (C (N dt)^exponent)`.
    pub worst_ratio: f64,
}

pub fn hoelder_check(flow: &ApproximateFlow) -> Result<HoelderFit> {
    let sets: Vec<&LevelSetField> = flow.steps.iter().map(|s| &s.set).collect();
    hoelder_fit(&sets, flow.dt)
}

/// Fits `|E_{k+N} Δ E_k| <= C (N dt)^{1/(n+1)}` on the first pair and counts
/// the pairs exceeding twice the fitted bound.
pub fn hoelder_fit(sets: &[&LevelSetField], dt: f64) -> Result<HoelderFit> {
    check_dt(dt)?;
    if sets.len() < 2 {
        return Err(Error::OutOfDomain("need at least two sets".into()));
    }
    let exponent = 1.0 / (sets[0].spec().n() as f64 + 1.0);
    let bound = |steps: usize| (steps as f64 * dt).powf(exponent);
    let fitted_c = grid::sym_diff_measure(sets[1], sets[0])? / bound(1);
    let (mut violations, mut pairs, mut worst_ratio) = (0, 0, 0.0f64);
    for k in 0..sets.len() {
        for j in k + 1..sets.len() {
            let m = grid::sym_diff_measure(sets[j], sets[k])?;
            let b = fitted_c * bound(j - k);
            pairs += 1;
            if m > 2.0 * b {
                violations += 1;
            }
            if b > 0.0 {
                worst_ratio = worst_ratio.max(m / b);
            } else if m > 0.0 {
                worst_ratio = f64::INFINITY;
            }
        }
    }
    Ok(HoelderFit {
        fitted_c,
        exponent,
        violations,
        pairs,
        worst_ratio,
    })
}
