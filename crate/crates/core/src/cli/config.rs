//! Line-based `key = value` run configuration.
//!
//! Keys (defaults in parentheses):
//!
//! | key | meaning |
//! |-----|---------|
//! | `mode` | `radial`, `smooth`, `flat`, `compare` or `props` (`props`) |
//! | `seed` | seed for randomized property instances (`0`) |
//! | `output.dir` | output directory (`out`) |
//! | `output.sample_every` | keep every k-th step in the time series (`10`) |
//! | `output.dumps` | write grid dumps of every sample (`false`) |
//! | `grid.n` | dimension, 2 or 3 (`2`) |
//! | `grid.geometry` | `cartesian` or `meridian` (3-d axisymmetric) (`cartesian`) |
//! | `grid.lower`, `grid.upper` | box `[lower, upper]^dims` (`-2.25`, `2.25`) |
//! | `grid.h` | spacing (`0.04`) |
//! | `domain.d_in` | shape (`ball(0, 0; 1)`) |
//! | `domain.d_out` | shape or `unbounded` (`unbounded`) |
//! | `domain.phi` | constant boundary value on `D_in` (`1`) |
//! | `initial.e0` | initial set (`ball(0, 0; 2)`) |
//! | `smooth.cfl_curvature`, `smooth.cfl_advect` | CFL factors (`0.4`, `0.5`) |
//! | `smooth.reinit_every` | steps between redistancing (`5`) |
//! | `smooth.t_end` | final time of smooth runs (`1`) |
//! | `solver.tol`, `solver.max_iter`, `solver.omega` | SOR controls (`1e-8`, `20000`, `1.8`) |
//! | `flat.dt`, `flat.k_steps` | minimizing-movement step and count (`0.05`, `40`) |
//! | `flat.tol_rel`, `flat.window`, `flat.max_inner` | inner stopping rule (`1e-5`, `10`, `500`) |
//! | `radial.l0`, `radial.t_end`, `radial.dt` | radial ODE run (`2`, `50`, `0.001`) |
//!
//! Shapes are unions of balls: `ball(c1, c2; r) | ball(c1, c2; r)`, with one
//! center coordinate per stored grid axis. The flat inner loop reuses the
//! `smooth.*` CFL factors and redistancing cadence.

use crate::capacity::SolverOpts;
use crate::error::{Error, Result};
use crate::flatflow::InnerOpts;
use crate::smoothflow::StepControl;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Radial,
    Smooth,
    Flat,
    Compare,
    Props,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Radial => "radial",
            Mode::Smooth => "smooth",
            Mode::Flat => "flat",
            Mode::Compare => "compare",
            Mode::Props => "props",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "radial" => Mode::Radial,
            "smooth" => Mode::Smooth,
            "flat" => Mode::Flat,
            "compare" => Mode::Compare,
            "props" => Mode::Props,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridGeometry {
    Cartesian,
    Meridian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// A finite union of balls.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape(pub Vec<Ball>);

impl Shape {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        Shape(vec![Ball {
            center: center.to_vec(),
            radius,
        }])
    }

    /// The single ball, if the shape is one.
    pub fn single(&self) -> Option<&Ball> {
        match self.0.as_slice() {
            [b] => Some(b),
            _ => None,
        }
    }

    fn render(&self) -> String {
        let balls: Vec<String> = self
            .0
            .iter()
            .map(|b| {
                let c: Vec<String> = b.center.iter().map(|x| x.to_string()).collect();
                format!("ball({}; {})", c.join(", "), b.radius)
            })
            .collect();
        balls.join(" | ")
    }

    fn parse(s: &str) -> Result<Self, String> {
        let mut balls = Vec::new();
        for part in s.split('|') {
            let part = part.trim();
            let inner = part
                .strip_prefix("ball(")
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| format!("expected `ball(c1, c2; r)`, got `{part}`"))?;
            let (c, r) = inner
                .split_once(';')
                .ok_or_else(|| format!("missing `;` before the radius in `{part}`"))?;
            let center = c
                .split(',')
                .map(|x| parse_f64(x.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            balls.push(Ball {
                center,
                radius: parse_f64(r.trim())?,
            });
        }
        Ok(Shape(balls))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridParams {
    pub n: usize,
    pub geometry: GridGeometry,
    pub lower: f64,
    pub upper: f64,
    pub h: f64,
}

impl GridParams {
    /// Number of stored axes.
    pub fn dims(&self) -> usize {
        match self.geometry {
            GridGeometry::Cartesian => self.n,
            GridGeometry::Meridian => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainParams {
    pub d_in: Shape,
    /// `None` is the unbounded outer domain.
    pub d_out: Option<Shape>,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatParams {
    pub dt: f64,
    pub k_steps: usize,
    pub tol_rel: f64,
    pub window: usize,
    pub max_inner: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialParams {
    pub l0: f64,
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputParams {
    pub dir: PathBuf,
    pub sample_every: usize,
    pub dumps: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub grid: GridParams,
    pub domain: DomainParams,
    pub initial: Shape,
    pub smooth: StepControl,
    pub solver: SolverOpts,
    pub flat: FlatParams,
    pub radial: RadialParams,
    pub output: OutputParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        let inner = InnerOpts::default();
        Self {
            mode: Mode::Props,
            seed: 0,
            grid: GridParams {
                n: 2,
                geometry: GridGeometry::Cartesian,
                lower: -2.25,
                upper: 2.25,
                h: 0.04,
            },
            domain: DomainParams {
                d_in: Shape::ball(&[0.0, 0.0], 1.0),
                d_out: None,
                phi: 1.0,
            },
            initial: Shape::ball(&[0.0, 0.0], 2.0),
            smooth: StepControl::default(),
            solver: SolverOpts::default(),
            flat: FlatParams {
                dt: 0.05,
                k_steps: 40,
                tol_rel: inner.tol_rel,
                window: inner.window,
                max_inner: inner.max_inner,
            },
            radial: RadialParams {
                l0: 2.0,
                t_end: 50.0,
                dt: 1e-3,
            },
            output: OutputParams {
                dir: PathBuf::from("out"),
                sample_every: 10,
                dumps: false,
            },
        }
    }
}

pub const KEYS: &[&str] = &[
    "mode",
    "seed",
    "output.dir",
    "output.sample_every",
    "output.dumps",
    "grid.n",
    "grid.geometry",
    "grid.lower",
    "grid.upper",
    "grid.h",
    "domain.d_in",
    "domain.d_out",
    "domain.phi",
    "initial.e0",
    "smooth.cfl_curvature",
    "smooth.cfl_advect",
    "smooth.reinit_every",
    "smooth.t_end",
    "solver.tol",
    "solver.max_iter",
    "solver.omega",
    "flat.dt",
    "flat.k_steps",
    "flat.tol_rel",
    "flat.window",
    "flat.max_inner",
    "radial.l0",
    "radial.t_end",
    "radial.dt",
];

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got `{s}`")),
    }
}

fn parse_int<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected `true` or `false`, got `{s}`")),
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "mode" => self.mode = value.parse()?,
            "seed" => self.seed = parse_int(value)?,
            "output.dir" => {
                if value.is_empty() {
                    return Err("output directory must not be empty".into());
                }
                self.output.dir = PathBuf::from(value)
            }
            "output.sample_every" => self.output.sample_every = parse_int(value)?,
            "output.dumps" => self.output.dumps = parse_bool(value)?,
            "grid.n" => self.grid.n = parse_int(value)?,
            "grid.geometry" => {
                self.grid.geometry = match value {
                    "cartesian" => GridGeometry::Cartesian,
                    "meridian" => GridGeometry::Meridian,
                    _ => return Err(format!("expected `cartesian` or `meridian`, got `{value}`")),
                }
            }
            "grid.lower" => self.grid.lower = parse_f64(value)?,
            "grid.upper" => self.grid.upper = parse_f64(value)?,
            "grid.h" => self.grid.h = parse_f64(value)?,
            "domain.d_in" => self.domain.d_in = Shape::parse(value)?,
            "domain.d_out" => {
                self.domain.d_out = if value == "unbounded" {
                    None
                } else {
                    Some(Shape::parse(value)?)
                }
            }
            "domain.phi" => self.domain.phi = parse_f64(value)?,
            "initial.e0" => self.initial = Shape::parse(value)?,
            "smooth.cfl_curvature" => self.smooth.cfl_curvature = parse_f64(value)?,
            "smooth.cfl_advect" => self.smooth.cfl_advect = parse_f64(value)?,
            "smooth.reinit_every" => self.smooth.reinit_every = parse_int(value)?,
            "smooth.t_end" => self.smooth.t_end = parse_f64(value)?,
            "solver.tol" => self.solver.tol = parse_f64(value)?,
            "solver.max_iter" => self.solver.max_iter = parse_int(value)?,
            "solver.omega" => self.solver.omega = parse_f64(value)?,
            "flat.dt" => self.flat.dt = parse_f64(value)?,
            "flat.k_steps" => self.flat.k_steps = parse_int(value)?,
            "flat.tol_rel" => self.flat.tol_rel = parse_f64(value)?,
            "flat.window" => self.flat.window = parse_int(value)?,
            "flat.max_inner" => self.flat.max_inner = parse_int(value)?,
            "radial.l0" => self.radial.l0 = parse_f64(value)?,
            "radial.t_end" => self.radial.t_end = parse_f64(value)?,
            "radial.dt" => self.radial.dt = parse_f64(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Textual value of a key, in the form accepted by [`RunConfig::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "mode" => self.mode.name().to_string(),
            "seed" => self.seed.to_string(),
            "output.dir" => self.output.dir.display().to_string(),
            "output.sample_every" => self.output.sample_every.to_string(),
            "output.dumps" => self.output.dumps.to_string(),
            "grid.n" => self.grid.n.to_string(),
            "grid.geometry" => match self.grid.geometry {
                GridGeometry::Cartesian => "cartesian".into(),
                GridGeometry::Meridian => "meridian".into(),
            },
            "grid.lower" => self.grid.lower.to_string(),
            "grid.upper" => self.grid.upper.to_string(),
            "grid.h" => self.grid.h.to_string(),
            "domain.d_in" => self.domain.d_in.render(),
            "domain.d_out" => match &self.domain.d_out {
                None => "unbounded".into(),
                Some(s) => s.render(),
            },
            "domain.phi" => self.domain.phi.to_string(),
            "initial.e0" => self.initial.render(),
            "smooth.cfl_curvature" => self.smooth.cfl_curvature.to_string(),
            "smooth.cfl_advect" => self.smooth.cfl_advect.to_string(),
            "smooth.reinit_every" => self.smooth.reinit_every.to_string(),
            "smooth.t_end" => self.smooth.t_end.to_string(),
            "solver.tol" => self.solver.tol.to_string(),
            "solver.max_iter" => self.solver.max_iter.to_string(),
            "solver.omega" => self.solver.omega.to_string(),
            "flat.dt" => self.flat.dt.to_string(),
            "flat.k_steps" => self.flat.k_steps.to_string(),
            "flat.tol_rel" => self.flat.tol_rel.to_string(),
            "flat.window" => self.flat.window.to_string(),
            "flat.max_inner" => self.flat.max_inner.to_string(),
            "radial.l0" => self.radial.l0.to_string(),
            "radial.t_end" => self.radial.t_end.to_string(),
            "radial.dt" => self.radial.dt.to_string(),
            _ => return None,
        })
    }

    /// Every key with its current value, one per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("listed key"));
        }
        out
    }

    pub fn inner_opts(&self) -> InnerOpts {
        InnerOpts {
            tol_rel: self.flat.tol_rel,
            window: self.flat.window,
            max_inner: self.flat.max_inner,
            cfl_curvature: self.smooth.cfl_curvature,
            cfl_advect: self.smooth.cfl_advect,
            reinit_every: self.smooth.reinit_every,
        }
    }

    /// Range and consistency checks. `line` maps a key to the line that set
    /// it (0 when it kept its default or came from the command line).
    pub fn validate_with(&self, line: &dyn Fn(&str) -> usize) -> Result<()> {
        let fail = |key: &str, msg: String| Err(Error::config(line(key), key, msg));
        let g = &self.grid;
        if !(g.n == 2 || g.n == 3) {
            return fail("grid.n", format!("dimension must be 2 or 3, got {}", g.n));
        }
        if g.geometry == GridGeometry::Meridian && g.n != 3 {
            return fail("grid.geometry", "a meridian grid needs grid.n = 3".into());
        }
        if !(g.h > 0.0) {
            return fail("grid.h", format!("spacing must be positive, got {}", g.h));
        }
        if !(g.upper > g.lower) {
            return fail("grid.upper", "grid.upper must exceed grid.lower".into());
        }
        if (g.upper - g.lower) / g.h < 4.0 {
            return fail("grid.h", "the box must span at least 4 cells".into());
        }
        let shapes = [
            ("domain.d_in", Some(&self.domain.d_in)),
            ("domain.d_out", self.domain.d_out.as_ref()),
            ("initial.e0", Some(&self.initial)),
        ];
        let uses_shapes = matches!(self.mode, Mode::Smooth | Mode::Flat | Mode::Compare);
        for (key, shape) in shapes.into_iter().filter(|_| uses_shapes) {
            let Some(shape) = shape else { continue };
            for b in &shape.0 {
                if b.center.len() != g.dims() {
                    return fail(
                        key,
                        format!("ball centers need {} coordinates on this grid", g.dims()),
                    );
                }
                if !(b.radius > 0.0) {
                    return fail(key, format!("ball radius must be positive, got {}", b.radius));
                }
                if g.geometry == GridGeometry::Meridian && b.center[0] != 0.0 {
                    return fail(key, "on a meridian grid ball centers need x = 0".into());
                }
            }
        }
        if !(self.domain.phi >= 0.0) {
            return fail("domain.phi", format!("phi must be >= 0, got {}", self.domain.phi));
        }
        let s = &self.smooth;
        for (key, c) in [
            ("smooth.cfl_curvature", s.cfl_curvature),
            ("smooth.cfl_advect", s.cfl_advect),
        ] {
            if !(c > 0.0 && c <= 1.0) {
                return fail(key, format!("CFL factor must lie in (0, 1], got {c}"));
            }
        }
        if s.reinit_every == 0 {
            return fail("smooth.reinit_every", "must be at least 1".into());
        }
        if !(s.t_end >= 0.0) {
            return fail("smooth.t_end", format!("must be >= 0, got {}", s.t_end));
        }
        if !(self.solver.tol > 0.0) {
            return fail("solver.tol", format!("must be positive, got {}", self.solver.tol));
        }
        if self.solver.max_iter == 0 {
            return fail("solver.max_iter", "must be at least 1".into());
        }
        if !(self.solver.omega > 0.0 && self.solver.omega < 2.0) {
            return fail("solver.omega", format!("must lie in (0, 2), got {}", self.solver.omega));
        }
        let f = &self.flat;
        if !(f.dt > 0.0) {
            return fail("flat.dt", format!("time step must be positive, got {}", f.dt));
        }
        if !(f.tol_rel > 0.0) {
            return fail("flat.tol_rel", format!("must be positive, got {}", f.tol_rel));
        }
        if f.window == 0 {
            return fail("flat.window", "must be at least 1".into());
        }
        if f.max_inner == 0 {
            return fail("flat.max_inner", "must be at least 1".into());
        }
        let r = &self.radial;
        if !(r.l0 > 1.0) {
            return fail("radial.l0", format!("must exceed the inner radius 1, got {}", r.l0));
        }
        if !(r.t_end >= 0.0) {
            return fail("radial.t_end", format!("must be >= 0, got {}", r.t_end));
        }
        if !(r.dt > 0.0) {
            return fail("radial.dt", format!("time step must be positive, got {}", r.dt));
        }
        if self.output.sample_every == 0 {
            return fail("output.sample_every", "must be at least 1".into());
        }
        if matches!(self.mode, Mode::Flat | Mode::Compare) && self.domain.d_out.is_none() {
            return fail(
                "domain.d_out",
                format!(
                    "{} mode needs a bounded outer domain D_out; `unbounded` is not allowed",
                    self.mode.name()
                ),
            );
        }
        if matches!(self.mode, Mode::Radial | Mode::Compare) && !(self.domain.phi > 0.0) {
            return fail("domain.phi", "the radial solution needs phi > 0".into());
        }
        if self.mode == Mode::Compare {
            let centered = |b: &Ball| b.center.iter().all(|&c| c == 0.0);
            match self.domain.d_in.single() {
                Some(b) if centered(b) && b.radius == 1.0 => {}
                _ => {
                    return fail(
                        "domain.d_in",
                        "compare mode needs D_in = one unit ball at the origin".into(),
                    )
                }
            }
            match self.initial.single() {
                Some(b) if centered(b) && b.radius > 1.0 => {}
                _ => {
                    return fail(
                        "initial.e0",
                        "compare mode needs one ball of radius > 1 at the origin".into(),
                    )
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(&|_| 0)
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// Like [`parse_config`], with `(key, value)` overrides (command-line flags)
/// applied before validation. Errors in overrides report line 0.
pub fn parse_config_with(text: &str, overrides: &[(&str, String)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::config(line, content, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if let Some(first) = seen.get(key) {
            return Err(Error::config(line, key, format!("already set on line {first}")));
        }
        cfg.set(key, value).map_err(|m| Error::config(line, key, m))?;
        seen.insert(key.to_string(), line);
    }
    for (key, value) in overrides {
        cfg.set(key, value).map_err(|m| Error::config(0, *key, m))?;
        seen.insert(key.to_string(), 0);
    }
    cfg.validate_with(&|key| seen.get(key).copied().unwrap_or(0))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key_of(err: Error) -> (usize, String, String) {
        match err {
            Error::Config { line, key, message } => (line, key, message),
            other => panic!("not a config error: {other}"),
        }
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.mode, Mode::Props);
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), cfg);
    }

    #[test]
    fn negative_spacing_is_rejected() {
        let (line, key, _) = key_of(parse_config("mode = smooth\ngrid.h = -0.1\n").unwrap_err());
        assert_eq!((line, key.as_str()), (2, "grid.h"));
    }

    #[test]
    fn flat_mode_needs_bounded_outer_domain() {
        let (_, key, msg) =
            key_of(parse_config("mode = flat\ndomain.d_out = unbounded\n").unwrap_err());
        assert_eq!(key, "domain.d_out");
        assert!(msg.contains("bounded"));
        parse_config("mode = flat\ndomain.d_out = ball(0, 0; 2.4)\n").unwrap();
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let (line, key, _) = key_of(parse_config("\ngrid.hh = 0.1").unwrap_err());
        assert_eq!((line, key.as_str()), (2, "grid.hh"));
        let (line, _, msg) = key_of(parse_config("seed = 1\nseed = 2").unwrap_err());
        assert_eq!(line, 2);
        assert!(msg.contains("line 1"));
        key_of(parse_config("just words").unwrap_err());
    }

    #[test]
    fn shapes_parse_and_check_their_dimension() {
        let cfg = parse_config("initial.e0 = ball(0, 0.5; 2) | ball(-1, 0; 0.5)  # two").unwrap();
        assert_eq!(cfg.initial.0.len(), 2);
        assert_eq!(cfg.initial.0[1].center, vec![-1.0, 0.0]);
        let (_, key, _) =
            key_of(parse_config("mode = smooth\ninitial.e0 = ball(0, 0, 0; 2)").unwrap_err());
        assert_eq!(key, "initial.e0");
        key_of(parse_config("initial.e0 = box(0, 0; 2)").unwrap_err());
        key_of(
            parse_config("mode = flat\ngrid.n = 3\ngrid.geometry = meridian\ninitial.e0 = ball(1, 0; 0.5)")
                .unwrap_err(),
        );
        // radial runs never build the shapes
        parse_config("mode = radial\ngrid.n = 3").unwrap();
    }

    #[test]
    fn overrides_apply_before_validation() {
        let text = "mode = flat\n";
        assert!(parse_config(text).is_err());
        let cfg = parse_config_with(text, &[("mode", "radial".into()), ("seed", "4".into())]).unwrap();
        assert_eq!((cfg.mode, cfg.seed), (Mode::Radial, 4));
        let (line, key, _) = key_of(parse_config_with("", &[("seed", "x".into())]).unwrap_err());
        assert_eq!((line, key.as_str()), (0, "seed"));
    }

    #[test]
    fn compare_mode_checks_the_radial_setup() {
        let base = "mode = compare\ndomain.d_out = ball(0, 0; 2.4)\n";
        parse_config(base).unwrap();
        let (_, key, _) =
            key_of(parse_config(&format!("{base}domain.d_in = ball(0, 0; 0.5)")).unwrap_err());
        assert_eq!(key, "domain.d_in");
    }

    fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
        lo..hi
    }

    fn shape(dims: usize, meridian: bool) -> impl Strategy<Value = Shape> {
        prop::collection::vec(
            (prop::collection::vec(finite(-1.0, 1.0), dims), finite(0.1, 2.0)),
            1..3,
        )
        .prop_map(move |balls| {
            Shape(
                balls
                    .into_iter()
                    .map(|(mut center, radius)| {
                        if meridian {
                            center[0] = 0.0;
                        }
                        Ball { center, radius }
                    })
                    .collect(),
            )
        })
    }

    fn config() -> impl Strategy<Value = RunConfig> {
        (0usize..3, any::<u64>(), finite(0.005, 0.2), finite(-3.0, -1.0), any::<bool>())
            .prop_flat_map(|(g, seed, h, lower, bounded)| {
                let (n, geometry) = match g {
                    0 => (2, GridGeometry::Cartesian),
                    1 => (3, GridGeometry::Cartesian),
                    _ => (3, GridGeometry::Meridian),
                };
                let dims = if geometry == GridGeometry::Meridian { 2 } else { n };
                let mer = geometry == GridGeometry::Meridian;
                (
                    Just((n, geometry, seed, h, lower)),
                    shape(dims, mer),
                    if bounded { shape(dims, mer).prop_map(Some).boxed() } else { Just(None).boxed() },
                    shape(dims, mer),
                    (finite(0.0, 3.0), finite(0.01, 1.0), 1usize..20, finite(0.0, 5.0)),
                    (finite(1e-12, 1e-3), 1usize..100_000, finite(0.1, 1.99)),
                    (finite(1e-4, 1.0), 0usize..100, finite(1e-9, 1e-2), 1usize..50),
                    (finite(1.01, 10.0), finite(0.0, 100.0), finite(1e-5, 0.1), any::<bool>()),
                )
            })
            .prop_map(|((n, geometry, seed, h, lower), d_in, d_out, e0, sm, so, fl, ra)| {
                let mut cfg = RunConfig::default();
                cfg.mode = if d_out.is_some() { Mode::Flat } else { Mode::Smooth };
                cfg.seed = seed;
                cfg.grid = GridParams {
                    n,
                    geometry,
                    lower,
                    upper: -lower,
                    h,
                };
                cfg.domain = DomainParams { d_in, d_out, phi: sm.0 };
                cfg.initial = e0;
                cfg.smooth = StepControl {
                    cfl_curvature: sm.1,
                    cfl_advect: sm.1,
                    reinit_every: sm.2,
                    t_end: sm.3,
                };
                cfg.solver = SolverOpts {
                    tol: so.0,
                    max_iter: so.1,
                    omega: so.2,
                };
                cfg.flat = FlatParams {
                    dt: fl.0,
                    k_steps: fl.1,
                    tol_rel: fl.2,
                    window: fl.3,
                    max_inner: fl.3 + 1,
                };
                cfg.radial = RadialParams {
                    l0: ra.0,
                    t_end: ra.1,
                    dt: ra.2,
                };
                cfg.output = OutputParams {
                    dir: PathBuf::from(format!("runs/out_{seed}")),
                    sample_every: sm.2,
                    dumps: ra.3,
                };
                cfg
            })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(cfg in config()) {
            let text = cfg.render();
            let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(back, cfg);
        }
    }
}
