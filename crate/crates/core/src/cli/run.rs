//! Builds grids and domains from a [`RunConfig`] and runs one mode.

use super::config::{GridGeometry, Mode, RunConfig, Shape};
use super::csv::{emit_csv, emit_table, Row};
use super::props;
use crate::capacity::{DomainConfig, OuterDomain, Phi};
use crate::error::{Error, Result};
use crate::flatflow::{approximate_flow, ApproximateFlow};
use crate::grid::{self, make_ball, set_union, write_dump, GridSpec, LevelSetField, ScalarField};
use crate::radial::{integrate, r_opt, radial_dirichlet_energy, radial_energy, RadialConfig};
use crate::smoothflow::{run, step, FlowState, RunStats, StepControl, StepOutcome};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

/// Files written and a human-readable summary.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    /// False when props mode found a failing criterion.
    pub success: bool,
}

pub fn build_grid(cfg: &RunConfig) -> Result<GridSpec> {
    let g = &cfg.grid;
    match g.geometry {
        GridGeometry::Cartesian => GridSpec::cube(g.n, g.lower, g.upper, g.h),
        GridGeometry::Meridian => GridSpec::meridian(g.lower, g.upper, g.h),
    }
}

pub fn build_shape(spec: &GridSpec, shape: &Shape) -> Result<LevelSetField> {
    let mut acc: Option<LevelSetField> = None;
    for b in &shape.0 {
        let f = make_ball(spec, &b.center, b.radius)?;
        acc = Some(match acc {
            None => f,
            Some(a) => set_union(&a, &f)?,
        });
    }
    acc.ok_or_else(|| Error::DomainFit("empty shape".into()))
}

pub fn build_domain(cfg: &RunConfig, spec: &GridSpec) -> Result<DomainConfig> {
    let d_in = build_shape(spec, &cfg.domain.d_in)?;
    let outer = match &cfg.domain.d_out {
        None => OuterDomain::Unbounded,
        Some(s) => OuterDomain::Bounded(build_shape(spec, s)?),
    };
    DomainConfig::new(d_in, outer, Phi::Constant(cfg.domain.phi))
}

/// Grid, domain and initial set of a configuration.
pub struct Setup {
    pub spec: GridSpec,
    pub domain: DomainConfig,
    pub e0: LevelSetField,
}

/// Everything that can fail before any time stepping; these failures are
/// configuration errors.
pub fn setup(cfg: &RunConfig) -> Result<Setup> {
    let spec = build_grid(cfg)?;
    let domain = build_domain(cfg, &spec)?;
    let e0 = build_shape(&spec, &cfg.initial)?;
    Ok(Setup { spec, domain, e0 })
}

fn flags(items: &[(bool, &str)]) -> String {
    items
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, s)| *s)
        .collect::<Vec<_>>()
        .join(";")
}

fn dump(dir: &Path, name: String, field: &ScalarField, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    write_dump(field, BufWriter::new(File::create(&path)?))?;
    files.push(path);
    Ok(())
}

pub fn run_mode(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.mode == Mode::Props {
        return run_props(cfg);
    }
    fs::create_dir_all(&cfg.output.dir)?;
    match cfg.mode {
        Mode::Radial => run_radial(cfg),
        Mode::Smooth => run_smooth(cfg, &setup(cfg)?),
        Mode::Flat => run_flat(cfg, &setup(cfg)?),
        Mode::Compare => run_compare(cfg, &setup(cfg)?),
        Mode::Props => unreachable!(),
    }
}

fn run_radial(cfg: &RunConfig) -> Result<Outcome> {
    let rc = RadialConfig::new(cfg.grid.n, cfg.domain.phi)?;
    let traj = integrate(cfg.radial.l0, cfg.radial.t_end, cfg.radial.dt, &rc)?;
    let s = traj.samples();
    let mut rows = Vec::new();
    for (k, &(t, l)) in s.iter().enumerate() {
        if k % cfg.output.sample_every == 0 || k + 1 == s.len() {
            let dir = radial_dirichlet_energy(l, &rc)?;
            let total = radial_energy(l, &rc)?;
            rows.push(vec![t, l, dir, total - dir, total]);
        }
    }
    let path = cfg.output.dir.join("radial.csv");
    emit_table(&["t", "radius", "dirichlet", "perimeter", "total_energy"], &rows, &path)?;
    let r = r_opt(&rc);
    Ok(Outcome {
        files: vec![path],
        summary: vec![format!(
            "radial n={} L0={} t_end={}: final L={:.12} r_opt={:.12} |L - r_opt|={:.3e}",
            rc.n(),
            cfg.radial.l0,
            cfg.radial.t_end,
            traj.final_radius(),
            r,
            (traj.final_radius() - r).abs()
        )],
        success: true,
    })
}

fn run_smooth(cfg: &RunConfig, st: &Setup) -> Result<Outcome> {
    let state0 = FlowState::new(&st.domain, st.e0.clone(), &cfg.solver)?;
    let flow = run(state0, &st.domain, &cfg.smooth, &cfg.solver, cfg.output.sample_every)?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let last = flow.samples.len() - 1;
    for (k, s) in flow.samples.iter().enumerate() {
        let d = s.diagnostics(&st.domain);
        let sym = if k == 0 {
            0.0
        } else {
            grid::sym_diff_measure(s.set(), flow.samples[k - 1].set())?
        };
        rows.push(Row {
            t: s.t(),
            volume: d.volume,
            perimeter: d.perimeter,
            dirichlet: d.dirichlet,
            penalty: 0.0,
            total_energy: d.dirichlet + d.perimeter,
            sym_diff_prev: sym,
            min_dist_din: d.min_dist_din,
            flags: flags(&[
                (s.clamped(), "clamped"),
                (k == last && flow.stats.extinct, "extinct"),
            ]),
        });
        if cfg.output.dumps {
            dump(&cfg.output.dir, format!("smooth_set_{k:05}.grid"), s.set().field(), &mut files)?;
            dump(&cfg.output.dir, format!("smooth_u_{k:05}.grid"), s.potential().u(), &mut files)?;
        }
    }
    let path = cfg.output.dir.join("smooth.csv");
    emit_csv(&rows, &path)?;
    files.insert(0, path);
    let st_ = flow.stats;
    Ok(Outcome {
        files,
        summary: vec![format!(
            "smooth: {} steps to t={:.6}, {} solves ({} sweeps), {} clamp events, {} max-principle violations{}",
            st_.steps,
            flow.samples[last].t(),
            st_.solves,
            st_.solver_iterations,
            st_.clamp_events,
            st_.max_principle_violations,
            if st_.extinct { ", extinct" } else { "" }
        )],
        success: true,
    })
}

pub fn flat_rows(flow: &ApproximateFlow) -> Result<Vec<Row>> {
    let steps = flow.steps();
    let mut rows = Vec::with_capacity(steps.len());
    for (k, s) in steps.iter().enumerate() {
        let sym = if k == 0 {
            0.0
        } else {
            grid::sym_diff_measure(&s.set, &steps[k - 1].set)?
        };
        rows.push(Row {
            t: flow.time(k),
            volume: grid::volume(&s.set),
            perimeter: s.energy.perimeter,
            dirichlet: s.energy.dirichlet,
            penalty: s.energy.penalty,
            total_energy: s.energy.total(),
            sym_diff_prev: sym,
            min_dist_din: s.min_dist_din,
            flags: flags(&[(!s.stationary, "nonstationary")]),
        });
    }
    Ok(rows)
}

fn run_flat(cfg: &RunConfig, st: &Setup) -> Result<Outcome> {
    let flow = approximate_flow(
        &st.domain,
        &st.e0,
        cfg.flat.dt,
        cfg.flat.k_steps,
        &cfg.inner_opts(),
        &cfg.solver,
    )?;
    let rows = flat_rows(&flow)?;
    let mut files = Vec::new();
    if cfg.output.dumps {
        for (k, s) in flow.steps().iter().enumerate() {
            dump(&cfg.output.dir, format!("flat_set_{k:05}.grid"), s.set.field(), &mut files)?;
            dump(&cfg.output.dir, format!("flat_u_{k:05}.grid"), s.potential.u(), &mut files)?;
        }
    }
    let path = cfg.output.dir.join("flat.csv");
    emit_csv(&rows, &path)?;
    files.insert(0, path);
    let its = flow.inner_iterations();
    Ok(Outcome {
        files,
        summary: vec![format!(
            "flat: {} steps of dt={}, {} inner iterations in total, {} steps hit max_inner",
            cfg.flat.k_steps,
            cfg.flat.dt,
            its.iter().sum::<usize>(),
            flow.steps()[1..].iter().filter(|s| !s.stationary).count()
        )],
        success: true,
    })
}

/// Radius trajectories of the smooth flow, the flat flow and the radial
/// solution at the flat-flow times `k dt`.
pub struct Comparison {
    pub times: Vec<f64>,
    pub smooth: Vec<f64>,
    pub flat: Vec<f64>,
    pub oracle: Vec<f64>,
    pub flow: ApproximateFlow,
    pub smooth_stats: RunStats,
}

impl Comparison {
    fn max_dev(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    pub fn smooth_vs_oracle(&self) -> f64 {
        Self::max_dev(&self.smooth, &self.oracle)
    }

    pub fn flat_vs_oracle(&self) -> f64 {
        Self::max_dev(&self.flat, &self.oracle)
    }

    pub fn flat_vs_smooth(&self) -> f64 {
        Self::max_dev(&self.flat, &self.smooth)
    }
}

fn radius(e: &LevelSetField) -> Result<f64> {
    e.interface_radius(&[0.0; 3])
        .map(|r| r.0)
        .ok_or(Error::NoInterface)
}

/// Runs the concentric comparison. The smooth flow lands exactly on every
/// multiple of `flat.dt`.
pub fn compare(cfg: &RunConfig, st: &Setup) -> Result<Comparison> {
    let l0 = cfg
        .initial
        .single()
        .ok_or_else(|| Error::Geometry("compare needs a single initial ball".into()))?
        .radius;
    let dt = cfg.flat.dt;
    let k_steps = cfg.flat.k_steps;
    let flow = approximate_flow(&st.domain, &st.e0, dt, k_steps, &cfg.inner_opts(), &cfg.solver)?;
    let rc = RadialConfig::new(cfg.grid.n, cfg.domain.phi)?;
    let traj = integrate(l0, dt * k_steps as f64, cfg.radial.dt.min(dt), &rc)?;

    let mut stats = RunStats::default();
    let mut state = FlowState::new(&st.domain, st.e0.clone(), &cfg.solver)?;
    stats.record_solve(state.potential(), &st.domain);
    let mut times = vec![0.0];
    let mut smooth = vec![radius(state.set())?];
    for k in 1..=k_steps {
        let t_k = dt * k as f64;
        let ctl = StepControl {
            t_end: t_k,
            ..cfg.smooth
        };
        while state.t() < t_k - 1e-12 * t_k.max(1.0) {
            state = match step(&state, &st.domain, &ctl, &cfg.solver)? {
                StepOutcome::Advanced(next) => next,
                StepOutcome::Extinct(_) => return Err(Error::NoInterface),
            };
            stats.steps += 1;
            stats.record_solve(state.potential(), &st.domain);
        }
        times.push(t_k);
        smooth.push(radius(state.set())?);
    }
    let flat = flow
        .steps()
        .iter()
        .map(|s| radius(&s.set))
        .collect::<Result<Vec<_>>>()?;
    let oracle = times.iter().map(|&t| traj.radius_at(t)).collect();
    Ok(Comparison {
        times,
        smooth,
        flat,
        oracle,
        flow,
        smooth_stats: stats,
    })
}

fn run_compare(cfg: &RunConfig, st: &Setup) -> Result<Outcome> {
    let c = compare(cfg, st)?;
    let rows: Vec<Vec<f64>> = (0..c.times.len())
        .map(|k| vec![c.times[k], c.smooth[k], c.flat[k], c.oracle[k]])
        .collect();
    let path = cfg.output.dir.join("compare.csv");
    emit_table(&["t", "radius_smooth", "radius_flat", "radius_oracle"], &rows, &path)?;
    let h = cfg.grid.h;
    let line = |what: &str, d: f64| format!("max |{what}| = {d:.6} ({:.3} h)", d / h);
    Ok(Outcome {
        files: vec![path],
        summary: vec![
            line("smooth - oracle", c.smooth_vs_oracle()),
            line("flat - oracle", c.flat_vs_oracle()),
            line("flat - smooth", c.flat_vs_smooth()),
        ],
        success: true,
    })
}

fn run_props(cfg: &RunConfig) -> Result<Outcome> {
    let checks = props::run_suite(cfg.seed, |c| println!("{c}"))?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.id.to_string())
        .collect();
    let summary = if failed.is_empty() {
        format!("all {} criteria passed", checks.len())
    } else {
        format!("{} of {} criteria failed: {}", failed.len(), checks.len(), failed.join(", "))
    };
    Ok(Outcome {
        files: Vec::new(),
        summary: vec![summary],
        success: failed.is_empty(),
    })
}
