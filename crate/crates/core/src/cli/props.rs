//! The acceptance suite: one named check per criterion, each with its
//! tolerance fixed here.

use super::config::{GridGeometry, Mode, RunConfig, Shape};
use super::run::{compare, setup, Comparison};
use crate::capacity::{DomainConfig, OuterDomain, Phi, SolverOpts};
use crate::error::{Error, Result};
use crate::flatflow::hoelder_check;
use crate::grid::{make_ball, GridSpec, LevelSetField};
use crate::radial::{integrate, ode_rhs, r_opt, RadialConfig};
use crate::smoothflow::{advance, run_with, stable_dt, FlowState, RunStats, StepControl, StepOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn check(id: usize, name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        id,
        name,
        passed,
        detail,
    }
}

pub fn radial_fixed_point() -> Check {
    let start = Instant::now();
    let rc = RadialConfig::new(3, 1.0).expect("valid radial config");
    let r = r_opt(&rc);
    let residual = (r * (r - 1.0).powi(2) - 0.5).abs();
    let rhs = ode_rhs(r, &rc).map(f64::abs).unwrap_or(f64::INFINITY);
    let elapsed = start.elapsed();
    check(
        1,
        "radial fixed point",
        residual <= 1e-10 && rhs <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("R_opt={r:.12} residual={residual:.1e} ode_rhs={rhs:.1e} time={elapsed:.2?}"),
    )
}

pub fn radial_long_time() -> Check {
    let start = Instant::now();
    let rc = RadialConfig::new(3, 1.0).expect("valid radial config");
    let r = r_opt(&rc);
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for l0 in [1.1, 2.0, 5.0] {
        match integrate(l0, 50.0, 1e-3, &rc) {
            Ok(traj) => {
                let gaps: Vec<f64> = traj.samples().iter().map(|&(_, l)| l - r).collect();
                monotone &= gaps.windows(2).all(|w| w[1].abs() <= w[0].abs() && w[1] * w[0] >= 0.0);
                worst = worst.max(gaps.last().map(|g| g.abs()).unwrap_or(f64::INFINITY));
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    let elapsed = start.elapsed();
    check(
        2,
        "radial long-time convergence",
        worst <= 1e-6 && monotone && elapsed < Duration::from_secs(1),
        format!("max |L(50) - R_opt|={worst:.1e} monotone={monotone} time={elapsed:.2?}"),
    )
}

/// Half-width of the box of the smooth-flow oracle runs.
pub const ORACLE_BOX: f64 = 2.25;

/// Smooth flow from `B_2` around `D_in = B_1`, `phi = 1`, to `t = 1`, compared
/// with the radial solution after every step.
#[derive(Clone, Copy, Debug)]
pub struct OracleRun {
    pub n: usize,
    pub h: f64,
    pub max_error: f64,
    pub stats: RunStats,
    pub elapsed: Duration,
}

pub fn smooth_oracle_run(n: usize, h: f64) -> Result<OracleRun> {
    let start = Instant::now();
    let spec = if n == 2 {
        GridSpec::cube(2, -ORACLE_BOX, ORACLE_BOX, h)?
    } else {
        GridSpec::meridian(-ORACLE_BOX, ORACLE_BOX, h)?
    };
    let d_in = make_ball(&spec, &[0.0, 0.0], 1.0)?;
    let domain = DomainConfig::new(d_in, OuterDomain::Unbounded, Phi::Constant(1.0))?;
    let solver = SolverOpts::default();
    let ctl = StepControl::default();
    let oracle = integrate(2.0, ctl.t_end, 1e-3, &RadialConfig::new(n, 1.0)?)?;
    let state0 = FlowState::new(&domain, make_ball(&spec, &[0.0, 0.0], 2.0)?, &solver)?;
    let mut max_error: f64 = 0.0;
    let (_, stats) = run_with(state0, &domain, &ctl, &solver, |s| {
        let (r, _) = s.set().interface_radius(&[0.0, 0.0]).ok_or(Error::NoInterface)?;
        max_error = max_error.max((r - oracle.radius_at(s.t())).abs());
        Ok(())
    })?;
    Ok(OracleRun {
        n,
        h,
        max_error,
        stats,
        elapsed: start.elapsed(),
    })
}

pub fn smooth_oracle(fine: &[OracleRun]) -> Check {
    let passed = fine.iter().all(|r| r.max_error <= 3.0 * r.h)
        && fine.iter().map(|r| r.elapsed).sum::<Duration>() < Duration::from_secs(600);
    let detail = fine
        .iter()
        .map(|r| {
            format!(
                "n={} h={}: max error {:.5} ({:.3} h) in {} steps, {:.1?}",
                r.n,
                r.h,
                r.max_error,
                r.max_error / r.h,
                r.stats.steps,
                r.elapsed
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    check(3, "smooth flow vs radial oracle", passed, detail)
}

/// With `phi = 0` the flow is mean curvature flow: a circle of radius
/// `r0` has radius `sqrt(r0^2 - 2t)`.
pub fn mcf_reduction() -> Result<(Check, RunStats)> {
    let start = Instant::now();
    let h = 0.01;
    let r0: f64 = 0.5;
    let spec = GridSpec::cube(2, -0.75, 0.75, h)?;
    let d_in = make_ball(&spec, &[0.0, 0.0], 0.05)?;
    let domain = DomainConfig::new(d_in, OuterDomain::Unbounded, Phi::Constant(0.0))?;
    let solver = SolverOpts::default();
    let ctl = StepControl {
        t_end: 0.04,
        ..StepControl::default()
    };
    let state0 = FlowState::new(&domain, make_ball(&spec, &[0.0, 0.0], r0)?, &solver)?;
    let mut max_error: f64 = 0.0;
    let (_, stats) = run_with(state0, &domain, &ctl, &solver, |s| {
        let (r, _) = s.set().interface_radius(&[0.0, 0.0]).ok_or(Error::NoInterface)?;
        max_error = max_error.max((r - (r0 * r0 - 2.0 * s.t()).sqrt()).abs());
        Ok(())
    })?;
    let elapsed = start.elapsed();
    Ok((
        check(
            4,
            "mean curvature flow reduction",
            max_error <= 3.0 * h && elapsed < Duration::from_secs(120),
            format!(
                "max |r - sqrt(r0^2 - 2t)|={max_error:.5} ({:.3} h) in {} steps, {elapsed:.1?}",
                max_error / h,
                stats.steps
            ),
        ),
        stats,
    ))
}

/// A random pair of nested balls `B_f ⊂ B_g`, both containing `D_in`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NestedPair {
    pub inner: ([f64; 2], f64),
    pub outer: ([f64; 2], f64),
}

pub const INCLUSION_DIN_RADIUS: f64 = 0.4;
const INCLUSION_BOX: f64 = 2.25;
const INCLUSION_H: f64 = 0.04;

pub fn nested_pairs(seed: u64, count: usize) -> Vec<NestedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let reach = INCLUSION_BOX - 5.0 * INCLUSION_H;
    while out.len() < count {
        let rf: f64 = rng.gen_range(0.7..1.1);
        let cf = disc_point(&mut rng, rf - INCLUSION_DIN_RADIUS - 0.15);
        let rg: f64 = rng.gen_range(rf + 0.2..rf + 0.6);
        let off = disc_point(&mut rng, rg - rf);
        let cg = [cf[0] + off[0], cf[1] + off[1]];
        let norm = |c: [f64; 2]| c[0].hypot(c[1]);
        if norm(off) + rf <= rg && norm(cg) + rg <= reach {
            out.push(NestedPair {
                inner: (cf, rf),
                outer: (cg, rg),
            });
        }
    }
    out
}

fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 2] {
    let r = radius.max(0.0) * rng.gen::<f64>().sqrt();
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    [r * a.cos(), r * a.sin()]
}

/// Both flows share every time step; returns the number of nodes (over all
/// samples) with `d_f < d_g - 2h`.
pub fn inclusion_run(pair: &NestedPair, t_end: f64, stats: &mut RunStats) -> Result<usize> {
    let h = INCLUSION_H;
    let spec = GridSpec::cube(2, -INCLUSION_BOX, INCLUSION_BOX, h)?;
    let d_in = make_ball(&spec, &[0.0, 0.0], INCLUSION_DIN_RADIUS)?;
    let domain = DomainConfig::new(d_in, OuterDomain::Unbounded, Phi::Constant(1.0))?;
    let solver = SolverOpts::default();
    let ctl = StepControl {
        t_end,
        ..StepControl::default()
    };
    let mut f = FlowState::new(&domain, make_ball(&spec, &pair.inner.0, pair.inner.1)?, &solver)?;
    let mut g = FlowState::new(&domain, make_ball(&spec, &pair.outer.0, pair.outer.1)?, &solver)?;
    stats.record_solve(f.potential(), &domain);
    stats.record_solve(g.potential(), &domain);
    let violations = |f: &LevelSetField, g: &LevelSetField| {
        f.values()
            .iter()
            .zip(g.values())
            .filter(|(a, b)| **a < **b - 2.0 * h)
            .count()
    };
    let mut total = violations(f.set(), g.set());
    while f.t() < t_end - 1e-12 {
        let dt = stable_dt(&f, &ctl)?.min(stable_dt(&g, &ctl)?).min(t_end - f.t());
        let next = |s: &FlowState| -> Result<FlowState> {
            match advance(s, &domain, &ctl, &solver, dt)? {
                StepOutcome::Advanced(x) => Ok(x),
                StepOutcome::Extinct(_) => Err(Error::NoInterface),
            }
        };
        f = next(&f)?;
        g = next(&g)?;
        stats.steps += 1;
        stats.record_solve(f.potential(), &domain);
        stats.record_solve(g.potential(), &domain);
        total += violations(f.set(), g.set());
    }
    Ok(total)
}

pub fn inclusion_principle(seed: u64) -> Result<(Check, RunStats)> {
    let start = Instant::now();
    let mut stats = RunStats::default();
    let mut total = 0;
    let pairs = nested_pairs(seed, 5);
    for p in &pairs {
        total += inclusion_run(p, 0.5, &mut stats)?;
    }
    Ok((
        check(
            5,
            "inclusion principle",
            total == 0,
            format!(
                "{} nested pairs (seed {seed}), {} lockstep steps, {total} node violations of d_f >= d_g - 2h, {:.1?}",
                pairs.len(),
                stats.steps,
                start.elapsed()
            ),
        ),
        stats,
    ))
}

pub fn maximum_principle(stats: &[RunStats]) -> Check {
    let solves: usize = stats.iter().map(|s| s.solves).sum();
    let bad: usize = stats.iter().map(|s| s.max_principle_violations).sum();
    check(
        6,
        "maximum principle",
        bad == 0 && solves > 0,
        format!("{bad} of {solves} capacity solves left [0, sup phi] by more than 1e-10"),
    )
}

/// The flat-flow setup shared by the energy, Hölder and cross-validation
/// checks: axisymmetric `n = 3`, `D_in = B_1`, `D_out = B_2.4`, `E0 = B_2`.
pub fn flat_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.mode = Mode::Compare;
    cfg.grid.n = 3;
    cfg.grid.geometry = GridGeometry::Meridian;
    cfg.grid.lower = -2.8;
    cfg.grid.upper = 2.8;
    cfg.grid.h = 0.05;
    cfg.domain.d_out = Some(Shape::ball(&[0.0, 0.0], 2.4));
    cfg.flat.dt = 0.05;
    cfg.flat.k_steps = 40;
    cfg
}

pub fn flat_comparison() -> Result<(Comparison, f64)> {
    let cfg = flat_config();
    cfg.validate()?;
    let st = setup(&cfg)?;
    Ok((compare(&cfg, &st)?, cfg.grid.h))
}

pub fn flat_energy(c: &Comparison) -> Check {
    let steps = c.flow.steps();
    let bulk: Vec<f64> = steps.iter().map(|s| s.energy.bulk()).collect();
    let worst_rise = bulk
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let penalties: f64 = steps[1..].iter().map(|s| s.energy.penalty).sum();
    let passed = worst_rise <= 1e-4 && penalties <= bulk[0] * (1.0 + 1e-3);
    check(
        7,
        "flat flow energy monotonicity",
        passed,
        format!(
            "{} steps, largest relative bulk rise {worst_rise:.2e}, sum of penalties {penalties:.4} vs initial bulk {:.4}",
            steps.len() - 1,
            bulk[0]
        ),
    )
}

pub fn flat_hoelder(c: &Comparison) -> Check {
    match hoelder_check(&c.flow) {
        Ok(fit) => check(
            8,
            "Hoelder-in-time bound",
            fit.violations == 0,
            format!(
                "C={:.4} exponent={:.4}: {} of {} pairs exceed 2C(N dt)^exponent, worst ratio {:.2}",
                fit.fitted_c, fit.exponent, fit.violations, fit.pairs, fit.worst_ratio
            ),
        ),
        Err(e) => check(8, "Hoelder-in-time bound", false, e.to_string()),
    }
}

pub fn cross_validation(c: &Comparison, h: f64) -> Check {
    let d = c.flat_vs_oracle();
    check(
        9,
        "flat/smooth/oracle cross-validation",
        d <= 5.0 * h,
        format!(
            "max |flat - oracle|={d:.5} ({:.3} h), max |smooth - oracle|={:.5}, max |flat - smooth|={:.5}",
            d / h,
            c.smooth_vs_oracle(),
            c.flat_vs_smooth()
        ),
    )
}

pub fn grid_convergence(coarse: &[OracleRun], fine: &[OracleRun]) -> Check {
    let mut passed = coarse.len() == fine.len() && !fine.is_empty();
    let mut parts = Vec::new();
    for (c, f) in coarse.iter().zip(fine) {
        let ratio = c.max_error / f.max_error;
        passed &= ratio >= 1.5;
        parts.push(format!(
            "n={}: {:.5} (h={}) -> {:.5} (h={}), ratio {ratio:.2}",
            c.n, c.max_error, c.h, f.max_error, f.h
        ));
    }
    check(10, "grid convergence", passed, parts.join("; "))
}

/// Runs every criterion in order, reporting each as soon as it is known.
pub fn run_suite(seed: u64, mut report: impl FnMut(&Check)) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |c: Check, out: &mut Vec<Check>| {
        report(&c);
        out.push(c);
    };
    push(radial_fixed_point(), &mut out);
    push(radial_long_time(), &mut out);
    let fine = [smooth_oracle_run(2, 0.02)?, smooth_oracle_run(3, 0.02)?];
    push(smooth_oracle(&fine), &mut out);
    let (c4, s4) = mcf_reduction()?;
    push(c4, &mut out);
    let (c5, s5) = inclusion_principle(seed)?;
    push(c5, &mut out);
    let (cmp, h) = flat_comparison()?;
    push(
        maximum_principle(&[fine[0].stats, fine[1].stats, s4, s5, cmp.smooth_stats]),
        &mut out,
    );
    push(flat_energy(&cmp), &mut out);
    push(flat_hoelder(&cmp), &mut out);
    push(cross_validation(&cmp, h), &mut out);
    let coarse = [smooth_oracle_run(2, 0.04)?, smooth_oracle_run(3, 0.04)?];
    push(grid_convergence(&coarse, &fine), &mut out);
    Ok(out)
}
