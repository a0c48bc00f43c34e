//! Capacity potential of `(phi, D_in)` relative to a set `E`: harmonic in
//! `E \ D_in`, equal to `phi` on `D_in` and zero outside `E`.
//!
//! The discrete problem is the standard 5/7-point Laplacian (flux form with the
//! `|x|` weight on meridian grids) with ghost-node Dirichlet conditions at the
//! linearly interpolated crossings of `∂E` and `∂D_in` along grid lines. It is
//! solved by red-black SOR.

use crate::error::{Error, Result};
use crate::grid::{box_interior, GridSpec, LevelSetField, ScalarField};

/// Crossing fractions below this snap the node onto the boundary value.
pub const SNAP_FRACTION: f64 = 1e-3;

/// Unbounded outer domains are replaced by the grid box shrunk by this many
/// cells, so the interface band never reaches the grid edge.
pub const OUTER_MARGIN_CELLS: f64 = 3.0;

/// Boundary data on `D_in`.
#[derive(Clone, Debug, PartialEq)]
pub enum Phi {
    Constant(f64),
    /// `phi(x) = sum_k coeffs[k] * |x - center|^k`.
    Radial { center: [f64; 3], coeffs: Vec<f64> },
}

impl Phi {
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        match self {
            Phi::Constant(c) => *c,
            Phi::Radial { center, coeffs } => {
                let r = (0..3).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>().sqrt();
                coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
            }
        }
    }
}

/// Outer obstacle.
#[derive(Clone, Debug)]
pub enum OuterDomain {
    /// The whole space, clipped to the grid box.
    Unbounded,
    Bounded(LevelSetField),
}

#[derive(Clone, Debug)]
pub struct DomainConfig {
    d_in: LevelSetField,
    d_out: LevelSetField,
    bounded: bool,
    phi: Phi,
    d_sup: f64,
    phi_sup: f64,
    phi_nodes: Vec<f64>,
    interior: Vec<bool>,
    parity: Vec<u8>,
}

impl DomainConfig {
    pub fn new(d_in: LevelSetField, outer: OuterDomain, phi: Phi) -> Result<Self> {
        let spec = *d_in.spec();
        let (d_out, bounded) = match outer {
            OuterDomain::Unbounded => (box_interior(&spec, OUTER_MARGIN_CELLS * spec.h()), false),
            OuterDomain::Bounded(f) => {
                spec.same_grid(f.spec())?;
                (f, true)
            }
        };
        if !d_in.values().iter().any(|&v| v <= 0.0) {
            return Err(Error::Geometry("D_in contains no grid node".into()));
        }
        let h = spec.h();
        for (idx, (&a, &b)) in d_in.values().iter().zip(d_out.values()).enumerate() {
            if a.abs() <= h && a - b <= 2.0 * h {
                return Err(Error::Geometry(format!(
                    "D_in is not compactly inside D_out near {:?}: separation {:.4} <= 2h",
                    spec.coord(idx),
                    a - b
                )));
            }
        }
        let mut d_sup = 0.0f64;
        let mut phi_sup = 0.0f64;
        for idx in 0..spec.len() {
            let x = spec.coord(idx);
            if d_out.values()[idx] <= 0.0 {
                d_sup = d_sup.max((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt());
            }
            if d_in.values()[idx] <= h {
                let p = phi.eval(x);
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::Geometry(format!("phi is {p} at {x:?}; it must be finite and >= 0")));
                }
                phi_sup = phi_sup.max(p);
            }
        }
        let mut phi_nodes = vec![0.0; spec.len()];
        let mut interior = vec![false; spec.len()];
        let mut parity = vec![0u8; spec.len()];
        for idx in 0..spec.len() {
            let mi = spec.multi_index(idx);
            if d_in.values()[idx] <= 0.0 {
                phi_nodes[idx] = phi.eval(spec.coord(idx));
            }
            interior[idx] = !spec.on_boundary(mi);
            parity[idx] = ((mi[0] + mi[1] + mi[2]) % 2) as u8;
        }
        Ok(Self {
            d_in,
            d_out,
            bounded,
            phi,
            d_sup,
            phi_sup,
            phi_nodes,
            interior,
            parity,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        self.d_in.spec()
    }

    pub fn n(&self) -> usize {
        self.spec().n()
    }

    pub fn d_in(&self) -> &LevelSetField {
        &self.d_in
    }

    /// Signed distance of the outer domain (the shrunk grid box when unbounded).
    pub fn d_out(&self) -> &LevelSetField {
        &self.d_out
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    /// `sup |z|` over `D_out`.
    pub fn d_sup(&self) -> f64 {
        self.d_sup
    }

    /// Largest value of `phi` near `D_in`.
    pub fn phi_sup(&self) -> f64 {
        self.phi_sup
    }

    pub fn require_positive_phi(&self) -> Result<()> {
        let spec = self.spec();
        for idx in 0..spec.len() {
            if self.d_in.values()[idx] <= 0.0 && self.phi.eval(spec.coord(idx)) <= 0.0 {
                return Err(Error::Geometry("phi must be positive on D_in".into()));
            }
        }
        Ok(())
    }

    pub fn require_bounded(&self) -> Result<()> {
        if self.bounded {
            Ok(())
        } else {
            Err(Error::Geometry("D_out must be bounded".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOpts {
    /// Stop when the largest Gauss-Seidel correction falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor in `(0, 2)`.
    pub omega: f64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 20_000,
            omega: 1.8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PotentialSolution {
    u: ScalarField,
    residual: f64,
    iterations: usize,
    e: LevelSetField,
    d_in: LevelSetField,
    phi: Phi,
}

impl PotentialSolution {
    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    /// Largest diagonally scaled residual over the free nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// The set the potential was solved on.
    pub fn set(&self) -> &LevelSetField {
        &self.e
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Outside,
    Fixed(f64),
    Free,
}

/// Flux weight of one side of the stencil; `x` is the node's axis-0 coordinate.
fn axis_kappa(spec: &GridSpec, x: f64, axis: usize, signed_offset: f64) -> f64 {
    if spec.is_axisymmetric() && axis == 0 {
        if x.abs() < 0.5 * spec.h() {
            2.0
        } else {
            (x + 0.5 * signed_offset).abs() / x.abs()
        }
    } else {
        1.0
    }
}

fn point_along(spec: &GridSpec, idx: usize, axis: usize, offset: f64) -> [f64; 3] {
    let mut p = spec.coord(idx);
    p[axis] += offset;
    p
}

/// Solve with default options.
pub fn solve_capacity(
    domain: &DomainConfig,
    e: &LevelSetField,
    tol: f64,
    max_iter: usize,
) -> Result<PotentialSolution> {
    let opts = SolverOpts {
        tol,
        max_iter,
        ..SolverOpts::default()
    };
    solve_capacity_with(domain, e, &opts, None)
}

/// Solve, optionally starting from an initial guess on the same grid (for
/// example the potential of a nearby set).
pub fn solve_capacity_with(
    domain: &DomainConfig,
    e: &LevelSetField,
    opts: &SolverOpts,
    guess: Option<&ScalarField>,
) -> Result<PotentialSolution> {
    let spec = *e.spec();
    spec.same_grid(domain.spec())?;
    let h = spec.h();
    let dims = spec.dims();
    let ve = e.values();
    let vin = domain.d_in.values();
    let phi = &domain.phi;
    let n = spec.len();

    let strides = spec.strides();
    let mut kind = vec![Kind::Outside; n];
    for idx in 0..n {
        if vin[idx] <= 0.0 {
            if ve[idx] > 0.0 {
                return Err(Error::Geometry(format!(
                    "D_in is not contained in E at {:?}",
                    spec.coord(idx)
                )));
            }
            kind[idx] = Kind::Fixed(domain.phi_nodes[idx]);
        } else if ve[idx] <= 0.0 && domain.interior[idx] {
            kind[idx] = Kind::Free;
        }
    }

    // boundary crossing seen from free node `i` towards neighbor `j`
    let crossing = |i: usize, j: usize, axis: usize, sgn: f64, outside_j: bool| {
        if ve[j] > 0.0 {
            Some((ve[i] / (ve[i] - ve[j]), 0.0))
        } else if vin[j] <= 0.0 {
            let t = vin[i] / (vin[i] - vin[j]);
            let val = match phi {
                Phi::Constant(c) => *c,
                _ => phi.eval(point_along(&spec, i, axis, sgn * t * h)),
            };
            Some((t, val))
        } else if outside_j {
            Some((1.0, 0.0))
        } else {
            None
        }
    };
    let is_outside = |k: Kind| matches!(k, Kind::Outside);

    // snap free nodes sitting almost on a boundary; free nodes are interior,
    // so both axis neighbors exist
    for idx in 0..n {
        if !matches!(kind[idx], Kind::Free) {
            continue;
        }
        let mut best: Option<(f64, f64)> = None;
        for a in 0..dims {
            for (j, sgn) in [(idx + strides[a], 1.0), (idx - strides[a], -1.0)] {
                if let Some((t, val)) = crossing(idx, j, a, sgn, is_outside(kind[j])) {
                    if t < SNAP_FRACTION && best.map_or(true, |b| t < b.0) {
                        best = Some((t, val));
                    }
                }
            }
        }
        if let Some((_, val)) = best {
            kind[idx] = Kind::Fixed(val);
        }
    }

    let mut local = vec![usize::MAX; n];
    let mut colors = [Vec::new(), Vec::new()];
    for idx in 0..n {
        if matches!(kind[idx], Kind::Free) {
            colors[domain.parity[idx] as usize].push(idx);
        }
    }
    let [mut nodes, black] = colors;
    nodes.extend(black);
    for (k, &idx) in nodes.iter().enumerate() {
        local[idx] = k;
    }
    let nfree = nodes.len();
    let mut diag = vec![0.0; nfree];
    let mut rhs = vec![0.0; nfree];
    // fixed-width neighbor lists; unused slots point at a zero entry past the end
    let width = 2 * dims;
    let mut nbr = vec![nfree; width * nfree];
    let mut coef = vec![0.0; width * nfree];
    let axisym = spec.is_axisymmetric();
    for (k, &idx) in nodes.iter().enumerate() {
        let mut slot = k * width;
        let x0 = spec.axis_coord(0, idx / strides[0]);
        for a in 0..dims {
            for (j, sgn) in [(idx + strides[a], 1.0), (idx - strides[a], -1.0)] {
                let radial = axisym && a == 0;
                match crossing(idx, j, a, sgn, is_outside(kind[j])) {
                    Some((t, val)) => {
                        let kap = if radial { axis_kappa(&spec, x0, a, sgn * t * h) } else { 1.0 };
                        let c = kap / t;
                        diag[k] += c;
                        rhs[k] += c * val;
                    }
                    None => {
                        let c = if radial { axis_kappa(&spec, x0, a, sgn * h) } else { 1.0 };
                        diag[k] += c;
                        match kind[j] {
                            Kind::Fixed(val) => rhs[k] += c * val,
                            _ => {
                                nbr[slot] = local[j];
                                coef[slot] = c;
                                slot += 1;
                            }
                        }
                    }
                }
            }
        }
    }

    let phi_sup = domain.phi_sup;
    let mut x: Vec<f64> = match guess {
        Some(g) if g.spec() == &spec => nodes
            .iter()
            .map(|&idx| g.values()[idx].clamp(0.0, phi_sup))
            .collect(),
        _ => nodes
            .iter()
            .map(|&idx| phi_sup * (-ve[idx]) / (vin[idx] - ve[idx]))
            .collect(),
    };
    x.push(0.0);
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();

    let sweep = |x: &mut [f64], omega: f64| -> f64 {
        let mut max_corr = 0.0f64;
        for k in 0..nfree {
            let mut s = rhs[k];
            let row = k * width..(k + 1) * width;
            for (&c, &j) in coef[row.clone()].iter().zip(&nbr[row]) {
                s += c * x[j];
            }
            let d = s * inv_diag[k] - x[k];
            max_corr = max_corr.max(d.abs());
            x[k] += omega * d;
        }
        max_corr
    };

    let mut iterations = 0;
    let mut residual = if nfree == 0 { 0.0 } else { f64::INFINITY };
    while nfree > 0 {
        if iterations >= opts.max_iter {
            return Err(Error::Convergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        residual = sweep(&mut x, opts.omega);
        if residual <= opts.tol {
            break;
        }
    }
    if nfree > 0 {
        let mut y = x.clone();
        residual = sweep(&mut y, 0.0);
    }

    let values = (0..n)
        .map(|idx| match kind[idx] {
            Kind::Outside => 0.0,
            Kind::Fixed(v) => v,
            Kind::Free => x[local[idx]],
        })
        .collect();
    Ok(PotentialSolution {
        u: ScalarField::new(spec, values)?,
        residual,
        iterations,
        e: e.clone(),
        d_in: domain.d_in.clone(),
        phi: domain.phi.clone(),
    })
}

/// `u` extended one layer outside `E` by linear extrapolation to zero at the
/// crossing, so one-sided samples near `∂E` can be interpolated.
fn extended_potential(sol: &PotentialSolution) -> ScalarField {
    let spec = *sol.u.spec();
    let u = sol.u.values();
    let ve = sol.e.values();
    let mut out = u.to_vec();
    for idx in 0..spec.len() {
        if ve[idx] <= 0.0 {
            continue;
        }
        let (mut good, mut ng) = (0.0, 0usize);
        let (mut poor, mut np) = (0.0, 0usize);
        for a in 0..spec.dims() {
            for fw in [true, false] {
                if let Some(j) = spec.neighbor(idx, a, fw) {
                    if ve[j] <= 0.0 {
                        let t = ve[j] / (ve[j] - ve[idx]);
                        let val = -(1.0 - t) / t.max(SNAP_FRACTION) * u[j];
                        if t >= SNAP_FRACTION {
                            good += val;
                            ng += 1;
                        } else {
                            poor += val;
                            np += 1;
                        }
                    }
                }
            }
        }
        out[idx] = if ng > 0 {
            good / ng as f64
        } else if np > 0 {
            poor / np as f64
        } else {
            0.0
        };
    }
    ScalarField::new(spec, out).expect("finite extension")
}

/// `u_ν^2` in the band `|e| < 3h`, zero elsewhere.
///
/// Each band node is projected to its foot point on `∂E`; the potential is
/// sampled at distances `h` and `2h` along the inward normal and `u_ν` is the
/// slope at zero of the quadratic through `(0, 0)` and those samples.
pub fn normal_derivative_sq(sol: &PotentialSolution, e: &LevelSetField) -> Result<ScalarField> {
    let spec = *e.spec();
    spec.same_grid(sol.u.spec())?;
    let h = spec.h();
    let band = crate::smoothflow::BAND_CELLS * h;
    let ext = extended_potential(sol);
    let ve = e.values();
    let mut out = vec![0.0; spec.len()];
    for idx in 0..spec.len() {
        if ve[idx].abs() >= band {
            continue;
        }
        let g = e.field().gradient(idx);
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if norm < 0.5 {
            let on_interface = (0..spec.dims()).any(|a| {
                [true, false].iter().any(|&fw| {
                    spec.neighbor(idx, a, fw)
                        .is_some_and(|j| (ve[j] <= 0.0) != (ve[idx] <= 0.0))
                })
            });
            if on_interface {
                return Err(Error::Geometry(format!(
                    "degenerate normal (|grad e| = {norm:.3}) at {:?}",
                    spec.coord(idx)
                )));
            }
            continue;
        }
        let nrm = [g[0] / norm, g[1] / norm, g[2] / norm];
        let x = spec.coord(idx);
        let foot = [
            x[0] - ve[idx] * nrm[0],
            x[1] - ve[idx] * nrm[1],
            x[2] - ve[idx] * nrm[2],
        ];
        let at = |s: f64| ext.interpolate([foot[0] - s * nrm[0], foot[1] - s * nrm[1], foot[2] - s * nrm[2]]);
        let (u1, u2) = (at(h), at(2.0 * h));
        let slope = (4.0 * u1 - u2) / (2.0 * h);
        out[idx] = slope * slope;
    }
    ScalarField::new(spec, out)
}

/// `∫ |∇u|^2` by edge-wise midpoint quadrature. Edges cut by `∂E` or `∂D_in`
/// are split at the crossing and each piece uses its own one-sided difference.
pub fn dirichlet_energy(sol: &PotentialSolution) -> f64 {
    let spec = *sol.u.spec();
    let h = spec.h();
    let dims = spec.dims();
    let u = sol.u.values();
    let ve = sol.e.values();
    let vin = sol.d_in.values();
    let weights: Vec<Vec<f64>> = (0..dims).map(|a| spec.axis_weights(a)).collect();
    let mut total = 0.0;
    for i in 0..spec.len() {
        let mi = spec.multi_index(i);
        for a in 0..dims {
            let Some(j) = spec.neighbor(i, a, true) else {
                continue;
            };
            let (out_i, out_j) = (ve[i] > 0.0, ve[j] > 0.0);
            if out_i && out_j {
                continue;
            }
            let cross: f64 = (0..dims).filter(|&b| b != a).map(|b| weights[b][mi[b]]).product();
            let x0 = spec.axis_coord(a, mi[a]);
            // piece of the edge between fractions t0 < t1 with values v0, v1
            let piece = |t0: f64, t1: f64, v0: f64, v1: f64| -> f64 {
                let len = (t1 - t0) * h;
                if len <= 1e-12 * h {
                    return 0.0;
                }
                let g = (v1 - v0) / len;
                g * g * spec.interval_measure(a, x0 + t0 * h, x0 + t1 * h)
            };
            let contrib = if out_i != out_j {
                let t = ve[i] / (ve[i] - ve[j]);
                if out_j {
                    piece(0.0, t, u[i], 0.0)
                } else {
                    piece(t, 1.0, 0.0, u[j])
                }
            } else if (vin[i] <= 0.0) != (vin[j] <= 0.0) {
                let t = vin[i] / (vin[i] - vin[j]);
                let pc = sol.phi.eval(point_along(&spec, i, a, t * h));
                piece(0.0, t, u[i], pc) + piece(t, 1.0, pc, u[j])
            } else {
                piece(0.0, 1.0, u[i], u[j])
            };
            total += cross * contrib;
        }
    }
    total
}
