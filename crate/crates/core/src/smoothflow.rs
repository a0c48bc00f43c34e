//! Explicit level-set evolution with outward normal velocity `V = u_ν² - H`.
//!
//! With `e` negative inside, the update is `e <- e - dt V |∇e|` in the band
//! `|e| < 3h`, with Godunov upwinding of `|∇e|`. After every update the set
//! is clamped between `D_in` and `D_out`, periodically redistanced, and the
//! capacity potential is re-solved from the previous one.

use crate::capacity::{
    dirichlet_energy, normal_derivative_sq, solve_capacity_with, DomainConfig, PotentialSolution,
    SolverOpts,
};
use crate::error::{Error, Result};
use crate::grid::{self, mean_curvature_at, redistance, GridSpec, LevelSetField, ScalarField};

/// Half-width of the update band, in grid spacings.
pub const BAND_CELLS: f64 = 3.0;

/// Slack of the maximum-principle check on every solve.
pub const MAX_PRINCIPLE_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub cfl_curvature: f64,
    pub cfl_advect: f64,
    pub reinit_every: usize,
    pub t_end: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_curvature: 0.4,
            cfl_advect: 0.5,
            reinit_every: 5,
            t_end: 1.0,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let ok = |c: f64| c > 0.0 && c <= 1.0;
        if !ok(self.cfl_curvature) || !ok(self.cfl_advect) {
            return Err(Error::OutOfDomain("CFL factors must lie in (0, 1]".into()));
        }
        if self.reinit_every == 0 {
            return Err(Error::OutOfDomain("reinit_every must be at least 1".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::OutOfDomain(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        Ok(())
    }
}

/// Per-sample geometric and energetic quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub volume: f64,
    pub perimeter: f64,
    pub dirichlet: f64,
    /// Smallest distance from `∂E` to `∂D_in`, measured at the edge crossings.
    pub min_dist_din: f64,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    t: f64,
    steps: usize,
    e: LevelSetField,
    u: PotentialSolution,
    /// Potential of the previous step, for extrapolated initial guesses.
    prev_u: Option<ScalarField>,
    clamped: bool,
}

impl FlowState {
    /// Validates containment, redistances and solves for the potential.
    pub fn new(domain: &DomainConfig, e0: LevelSetField, solver: &SolverOpts) -> Result<Self> {
        domain.spec().same_grid(e0.spec())?;
        check_confinement(domain, &e0)?;
        let e = redistance(&e0)?;
        let u = solve_capacity_with(domain, &e, solver, None)?;
        Ok(Self {
            t: 0.0,
            steps: 0,
            e,
            u,
            prev_u: None,
            clamped: false,
        })
    }

    /// A state at time zero from a set and its already solved potential.
    pub(crate) fn from_parts(e: LevelSetField, u: PotentialSolution) -> Self {
        Self {
            t: 0.0,
            steps: 0,
            e,
            u,
            prev_u: None,
            clamped: false,
        }
    }

    pub(crate) fn into_parts(self) -> (LevelSetField, PotentialSolution) {
        (self.e, self.u)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn set(&self) -> &LevelSetField {
        &self.e
    }

    pub fn potential(&self) -> &PotentialSolution {
        &self.u
    }

    /// True when the step that produced this state had to clamp the set.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    pub fn diagnostics(&self, domain: &DomainConfig) -> Diagnostics {
        Diagnostics {
            volume: grid::volume(&self.e),
            perimeter: grid::perimeter(&self.e),
            dirichlet: dirichlet_energy(&self.u),
            min_dist_din: min_distance_to(&self.e, domain.d_in()),
        }
    }
}

pub(crate) fn min_distance_to(e: &LevelSetField, other: &LevelSetField) -> f64 {
    e.interface_points()
        .iter()
        .map(|&p| other.field().interpolate(p))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn check_confinement(domain: &DomainConfig, e: &LevelSetField) -> Result<()> {
    let spec = e.spec();
    for idx in 0..spec.len() {
        if domain.d_in().contains(idx) && !e.contains(idx) {
            return Err(Error::Geometry(format!(
                "initial set does not contain D_in at {:?}",
                spec.coord(idx)
            )));
        }
        if e.contains(idx) && !domain.d_out().contains(idx) {
            return Err(Error::Geometry(format!(
                "initial set leaves D_out at {:?}",
                spec.coord(idx)
            )));
        }
    }
    Ok(())
}

/// Nodal velocity `u_ν² - H` in the band `|e| < 3h`, zero elsewhere.
pub fn nodal_velocity(e: &LevelSetField, sol: &PotentialSolution) -> Result<ScalarField> {
    let spec = *e.spec();
    let unu = normal_derivative_sq(sol, e)?;
    let band = band_nodes(e);
    let curv = mean_curvature_at(e, &band);
    let mut v = vec![0.0; spec.len()];
    for (&idx, &k) in band.iter().zip(&curv) {
        v[idx] = unu.values()[idx] - k;
    }
    ScalarField::new(spec, v)
}

/// Interior nodes with `|e| < 3h`.
pub(crate) fn band_nodes(e: &LevelSetField) -> Vec<usize> {
    let spec = e.spec();
    let w = BAND_CELLS * spec.h();
    (0..spec.len())
        .filter(|&i| e.values()[i].abs() < w && !spec.on_boundary(spec.multi_index(i)))
        .collect()
}

/// Godunov upwind `|∇e|` for a front moving outward with speed `v`.
pub(crate) fn upwind_norm(e: &LevelSetField, idx: usize, v: f64) -> f64 {
    let spec: &GridSpec = e.spec();
    let h = spec.h();
    let f = e.values();
    let mut s = 0.0;
    for a in 0..spec.dims() {
        let (Some(fw), Some(bw)) = (spec.neighbor(idx, a, true), spec.neighbor(idx, a, false)) else {
            continue;
        };
        let dm = (f[idx] - f[bw]) / h;
        let dp = (f[fw] - f[idx]) / h;
        s += if v > 0.0 {
            dm.max(0.0).powi(2) + dp.min(0.0).powi(2)
        } else {
            dp.max(0.0).powi(2) + dm.min(0.0).powi(2)
        };
    }
    s.sqrt()
}

/// Explicit update `e - dt V |∇e|` of the band nodes, followed by clamping
/// to `D_in ⊂ E ⊂ D_out`. Returns the new field and whether clamping changed
/// the membership of any node.
pub(crate) fn apply_velocity(
    e: &LevelSetField,
    band: &[usize],
    vel: &[f64],
    grad: &[f64],
    dt: f64,
    domain: &DomainConfig,
) -> (LevelSetField, bool) {
    let mut next = e.clone();
    {
        let vals = next.values_mut();
        for ((&idx, &v), &g) in band.iter().zip(vel).zip(grad) {
            vals[idx] -= dt * v * g;
        }
    }
    let clamped = clamp_to_domain(&mut next, domain);
    (next, clamped)
}

pub(crate) fn clamp_to_domain(e: &mut LevelSetField, domain: &DomainConfig) -> bool {
    let d_in = domain.d_in().values();
    let d_out = domain.d_out().values();
    let mut changed = false;
    for (idx, v) in e.values_mut().iter_mut().enumerate() {
        let before = *v <= 0.0;
        *v = v.max(d_out[idx]).min(d_in[idx]);
        changed |= (*v <= 0.0) != before;
    }
    changed
}

/// Velocity, upwind gradient norms and the band they live on.
pub(crate) struct Motion {
    pub band: Vec<usize>,
    pub vel: Vec<f64>,
    pub grad: Vec<f64>,
}

fn motion(state: &FlowState) -> Result<Motion> {
    let v = nodal_velocity(&state.e, &state.u)?;
    let band = band_nodes(&state.e);
    let vel: Vec<f64> = band.iter().map(|&i| v.values()[i]).collect();
    let grad = band
        .iter()
        .zip(&vel)
        .map(|(&i, &vi)| upwind_norm(&state.e, i, vi))
        .collect();
    Ok(Motion { band, vel, grad })
}

fn max_speed(m: &Motion) -> f64 {
    m.vel
        .iter()
        .zip(&m.grad)
        .map(|(v, g)| (v * g).abs())
        .fold(0.0, f64::max)
}

/// Largest step allowed by the two CFL conditions (ignoring `t_end`).
pub fn stable_dt(state: &FlowState, ctl: &StepControl) -> Result<f64> {
    let m = motion(state)?;
    Ok(cfl_dt(state.e.spec(), &m, ctl))
}

pub(crate) fn cfl_dt(spec: &GridSpec, m: &Motion, ctl: &StepControl) -> f64 {
    let h = spec.h();
    let parabolic = ctl.cfl_curvature * h * h / (2.0 * spec.n() as f64);
    let speed = max_speed(m);
    if speed > 0.0 {
        parabolic.min(ctl.cfl_advect * h / speed)
    } else {
        parabolic
    }
}

/// `2 u_n - u_{n-1}`, or `u_n` on the first step.
fn extrapolated_guess(u: &PotentialSolution, prev: Option<&ScalarField>) -> ScalarField {
    match prev {
        Some(p) => {
            let values = u
                .u()
                .values()
                .iter()
                .zip(p.values())
                .map(|(a, b)| 2.0 * a - b)
                .collect();
            ScalarField::new(*u.u().spec(), values).expect("finite guess")
        }
        None => u.u().clone(),
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Advanced(FlowState),
    /// The interface vanished; the state is the last one that still had one.
    Extinct(FlowState),
}

/// One step of size `min(stable dt, t_end - t)`.
pub fn step(
    state: &FlowState,
    domain: &DomainConfig,
    ctl: &StepControl,
    solver: &SolverOpts,
) -> Result<StepOutcome> {
    let m = motion(state)?;
    let dt = cfl_dt(state.e.spec(), &m, ctl).min(ctl.t_end - state.t);
    advance_with(state, domain, ctl, solver, m, dt)
}

/// One step of a prescribed size, which must not exceed [`stable_dt`].
pub fn advance(
    state: &FlowState,
    domain: &DomainConfig,
    ctl: &StepControl,
    solver: &SolverOpts,
    dt: f64,
) -> Result<StepOutcome> {
    let m = motion(state)?;
    advance_with(state, domain, ctl, solver, m, dt)
}

fn advance_with(
    state: &FlowState,
    domain: &DomainConfig,
    ctl: &StepControl,
    solver: &SolverOpts,
    m: Motion,
    dt: f64,
) -> Result<StepOutcome> {
    if !(dt > 0.0) {
        return Err(Error::OutOfDomain(format!("time step must be positive, got {dt}")));
    }
    let (mut e, clamped) = apply_velocity(&state.e, &m.band, &m.vel, &m.grad, dt, domain);
    if !e.has_interface() {
        return Ok(StepOutcome::Extinct(state.clone()));
    }
    let steps = state.steps + 1;
    if steps % ctl.reinit_every == 0 {
        e = redistance(&e)?;
    }
    let guess = extrapolated_guess(&state.u, state.prev_u.as_ref());
    let u = solve_capacity_with(domain, &e, solver, Some(&guess))?;
    Ok(StepOutcome::Advanced(FlowState {
        t: state.t + dt,
        steps,
        e,
        prev_u: Some(state.u.u().clone()),
        u,
        clamped,
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub steps: usize,
    pub solves: usize,
    /// Red-black sweeps summed over all solves.
    pub solver_iterations: usize,
    /// Solves whose potential left `[-1e-10, sup φ + 1e-10]`.
    pub max_principle_violations: usize,
    /// Steps in which clamping changed the set.
    pub clamp_events: usize,
    pub extinct: bool,
}

impl RunStats {
    pub(crate) fn record_solve(&mut self, sol: &PotentialSolution, domain: &DomainConfig) {
        self.solves += 1;
        self.solver_iterations += sol.iterations();
        let u = sol.u();
        if u.min() < -MAX_PRINCIPLE_SLACK || u.max() > domain.phi_sup() + MAX_PRINCIPLE_SLACK {
            self.max_principle_violations += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub samples: Vec<FlowState>,
    pub stats: RunStats,
}

/// Steps until `t_end` or extinction, handing every state (the initial one
/// included) to `observe`. Returns the final state.
pub fn run_with(
    state0: FlowState,
    domain: &DomainConfig,
    ctl: &StepControl,
    solver: &SolverOpts,
    mut observe: impl FnMut(&FlowState) -> Result<()>,
) -> Result<(FlowState, RunStats)> {
    ctl.validate()?;
    let mut stats = RunStats::default();
    stats.record_solve(&state0.u, domain);
    observe(&state0)?;
    let mut state = state0;
    let tiny = 1e-12 * ctl.t_end.max(1.0);
    while state.t < ctl.t_end - tiny {
        match step(&state, domain, ctl, solver)? {
            StepOutcome::Advanced(next) => {
                stats.steps += 1;
                stats.record_solve(&next.u, domain);
                if next.clamped {
                    stats.clamp_events += 1;
                }
                state = next;
                observe(&state)?;
            }
            StepOutcome::Extinct(last) => {
                stats.extinct = true;
                state = last;
                break;
            }
        }
    }
    Ok((state, stats))
}

/// Steps until `t_end` or extinction. Every `sample_every`-th state is kept,
/// together with the first and the last.
pub fn run(
    state0: FlowState,
    domain: &DomainConfig,
    ctl: &StepControl,
    solver: &SolverOpts,
    sample_every: usize,
) -> Result<FlowRun> {
    let every = sample_every.max(1);
    let mut samples = Vec::new();
    let (last, stats) = run_with(state0, domain, ctl, solver, |s| {
        if s.steps % every == 0 {
            samples.push(s.clone());
        }
        Ok(())
    })?;
    if samples.last().map(|s| s.steps) != Some(last.steps) {
        samples.push(last);
    }
    Ok(FlowRun { samples, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{OuterDomain, Phi};
    use crate::grid::make_ball;
    use crate::radial::{integrate, r_opt, RadialConfig};

    fn radial_domain(spec: GridSpec, phi: f64, r_in: f64) -> DomainConfig {
        let c = vec![0.0; spec.dims()];
        let d_in = make_ball(&spec, &c, r_in).unwrap();
        DomainConfig::new(d_in, OuterDomain::Unbounded, Phi::Constant(phi)).unwrap()
    }

    fn ball(spec: &GridSpec, r: f64) -> LevelSetField {
        make_ball(spec, &vec![0.0; spec.dims()], r).unwrap()
    }

    fn radius(s: &FlowState) -> f64 {
        s.set().interface_radius(&[0.0, 0.0, 0.0]).unwrap().0
    }

    #[test]
    fn zero_end_time_keeps_only_the_initial_state() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.04).unwrap();
        let dom = radial_domain(g, 0.0, 0.1);
        let s0 = FlowState::new(&dom, ball(&g, 0.5), &SolverOpts::default()).unwrap();
        let ctl = StepControl {
            t_end: 0.0,
            ..StepControl::default()
        };
        let r = run(s0, &dom, &ctl, &SolverOpts::default(), 1).unwrap();
        assert_eq!(r.samples.len(), 1);
        assert_eq!(r.stats.steps, 0);
    }

    #[test]
    fn shrinking_circle_follows_mean_curvature_flow() {
        let g = GridSpec::cube(2, -0.75, 0.75, 0.01).unwrap();
        let dom = radial_domain(g, 0.0, 0.05);
        let solver = SolverOpts::default();
        let s0 = FlowState::new(&dom, ball(&g, 0.5), &solver).unwrap();
        let ctl = StepControl {
            t_end: 0.04,
            ..StepControl::default()
        };
        let r = run(s0, &dom, &ctl, &solver, 50).unwrap();
        for s in &r.samples {
            let exact = (0.25 - 2.0 * s.t()).sqrt();
            assert!((radius(s) - exact).abs() <= 3.0 * g.h(), "t {} r {}", s.t(), radius(s));
        }
        let last = r.samples.last().unwrap();
        assert!((last.t() - 0.04).abs() < 1e-12);
        assert!((radius(last) - 0.17f64.sqrt()).abs() <= 3.0 * g.h());
    }

    #[test]
    fn initial_radial_speed() {
        let g = GridSpec::meridian(-2.4, 2.4, 0.04).unwrap();
        let dom = radial_domain(g, 1.0, 1.0);
        let solver = SolverOpts::default();
        let s0 = FlowState::new(&dom, ball(&g, 2.0), &solver).unwrap();
        let ctl = StepControl {
            t_end: 0.02,
            ..StepControl::default()
        };
        let r = run(s0, &dom, &ctl, &solver, 1000).unwrap();
        let last = r.samples.last().unwrap();
        let rate = (radius(last) - radius(&r.samples[0])) / last.t();
        assert!((rate + 0.75).abs() < 0.1, "{rate}");
    }

    #[test]
    fn velocity_matches_radial_value() {
        let g = GridSpec::meridian(-2.4, 2.4, 0.04).unwrap();
        let dom = radial_domain(g, 1.0, 1.0);
        let s0 = FlowState::new(&dom, ball(&g, 2.0), &SolverOpts::default()).unwrap();
        let v = nodal_velocity(s0.set(), s0.potential()).unwrap();
        let tol = f64::max(0.05, 10.0 * g.h());
        for i in s0.set().band(0.5 * g.h()) {
            let x = g.coord(i);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            // u_ν² - H for the sphere of radius r around B_1
            let exact = (1.0 / (r * (r - 1.0))).powi(2) - 2.0 / r;
            assert!((v.values()[i] - exact).abs() <= tol, "{} vs {exact}", v.values()[i]);
        }
    }

    #[test]
    fn stationary_sphere_stays_put() {
        let g = GridSpec::meridian(-2.0, 2.0, 0.04).unwrap();
        let dom = radial_domain(g, 1.0, 1.0);
        let solver = SolverOpts::default();
        let r0 = r_opt(&RadialConfig::new(3, 1.0).unwrap());
        let mut s = FlowState::new(&dom, ball(&g, r0), &solver).unwrap();
        let ctl = StepControl {
            t_end: f64::INFINITY,
            ..StepControl::default()
        };
        let start = radius(&s);
        for _ in 0..100 {
            s = match step(&s, &dom, &ctl, &solver).unwrap() {
                StepOutcome::Advanced(n) => n,
                StepOutcome::Extinct(_) => panic!("extinct"),
            };
        }
        assert!((radius(&s) - start).abs() <= 2.0 * g.h());
    }

    #[test]
    fn radial_run_tracks_the_oracle() {
        let h = 0.04;
        let g = GridSpec::meridian(-2.4, 2.4, h).unwrap();
        let dom = radial_domain(g, 1.0, 1.0);
        let solver = SolverOpts::default();
        let s0 = FlowState::new(&dom, ball(&g, 2.0), &solver).unwrap();
        let ctl = StepControl {
            t_end: 2.0,
            ..StepControl::default()
        };
        let r = run(s0, &dom, &ctl, &solver, 200).unwrap();
        let oracle = integrate(2.0, 2.0, 1e-3, &RadialConfig::new(3, 1.0).unwrap()).unwrap();
        assert_eq!(r.stats.max_principle_violations, 0);
        for s in &r.samples {
            let (mean, sd) = s.set().interface_radius(&[0.0, 0.0]).unwrap();
            assert!((mean - oracle.radius_at(s.t())).abs() <= 3.0 * h, "t {}: {mean}", s.t());
            assert!(sd <= 2.0 * h);
            assert!(s.diagnostics(&dom).min_dist_din > 0.0);
        }
    }

    #[test]
    fn confinement_and_step_size() {
        let g = GridSpec::cube(2, -1.5, 1.5, 0.04).unwrap();
        let d_in = make_ball(&g, &[0.0, 0.0], 0.3).unwrap();
        let d_out = make_ball(&g, &[0.0, 0.0], 1.0).unwrap();
        let dom = DomainConfig::new(d_in, OuterDomain::Bounded(d_out), Phi::Constant(2.0)).unwrap();
        let solver = SolverOpts::default();
        // an ellipse pushed outward against D_out
        let e0 = LevelSetField::from_fn(g, |x| {
            ((x[0] / 0.95).powi(2) + (x[1] / 0.45).powi(2)).sqrt() - 1.0
        });
        let mut s = FlowState::new(&dom, e0, &solver).unwrap();
        let ctl = StepControl {
            t_end: f64::INFINITY,
            ..StepControl::default()
        };
        for _ in 0..60 {
            let next = match step(&s, &dom, &ctl, &solver).unwrap() {
                StepOutcome::Advanced(n) => n,
                StepOutcome::Extinct(_) => panic!("extinct"),
            };
            if next.steps() % ctl.reinit_every != 0 {
                for i in band_nodes(s.set()) {
                    let d = (next.set().values()[i] - s.set().values()[i]).abs();
                    let clamped = next.set().values()[i] == dom.d_in().values()[i]
                        || next.set().values()[i] == dom.d_out().values()[i];
                    assert!(clamped || d <= g.h() + 1e-12, "change {d}");
                }
            }
            for i in 0..g.len() {
                if dom.d_in().contains(i) {
                    assert!(next.set().contains(i));
                }
                if next.set().contains(i) {
                    assert!(dom.d_out().contains(i));
                }
            }
            s = next;
        }
    }

    #[test]
    fn clamping_restores_containment() {
        let g = GridSpec::cube(2, -1.5, 1.5, 0.04).unwrap();
        let d_in = make_ball(&g, &[0.0, 0.0], 0.3).unwrap();
        let d_out = make_ball(&g, &[0.0, 0.0], 1.0).unwrap();
        let dom = DomainConfig::new(d_in, OuterDomain::Bounded(d_out), Phi::Constant(1.0)).unwrap();
        let mut e = make_ball(&g, &[0.4, 0.0], 0.9).unwrap();
        assert!(clamp_to_domain(&mut e, &dom));
        for i in 0..g.len() {
            assert!(!dom.d_in().contains(i) || e.contains(i));
            assert!(!e.contains(i) || dom.d_out().contains(i));
        }
        let mut inside = make_ball(&g, &[0.0, 0.0], 0.6).unwrap();
        assert!(!clamp_to_domain(&mut inside, &dom));
    }

    #[test]
    fn nested_circles_stay_nested() {
        let h = 0.04;
        let g = GridSpec::cube(2, -1.6, 1.6, h).unwrap();
        let dom = radial_domain(g, 1.0, 0.3);
        let solver = SolverOpts::default();
        let ctl = StepControl {
            t_end: 0.2,
            ..StepControl::default()
        };
        let mut f = FlowState::new(&dom, make_ball(&g, &[0.05, 0.0], 0.6).unwrap(), &solver).unwrap();
        let mut gs = FlowState::new(&dom, make_ball(&g, &[0.0, 0.05], 0.9).unwrap(), &solver).unwrap();
        while f.t() < ctl.t_end - 1e-12 {
            let dt = stable_dt(&f, &ctl)
                .unwrap()
                .min(stable_dt(&gs, &ctl).unwrap())
                .min(ctl.t_end - f.t());
            let adv = |s: &FlowState| match advance(s, &dom, &ctl, &solver, dt).unwrap() {
                StepOutcome::Advanced(n) => n,
                StepOutcome::Extinct(_) => panic!("extinct"),
            };
            f = adv(&f);
            gs = adv(&gs);
            for (a, b) in f.set().values().iter().zip(gs.set().values()) {
                assert!(*a >= b - 2.0 * h);
            }
        }
    }

    #[test]
    fn control_validation() {
        assert!(StepControl::default().validate().is_ok());
        for bad in [
            StepControl { cfl_curvature: 0.0, ..StepControl::default() },
            StepControl { cfl_advect: 1.5, ..StepControl::default() },
            StepControl { reinit_every: 0, ..StepControl::default() },
            StepControl { t_end: -1.0, ..StepControl::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
