//! Uniform Cartesian grids and node-valued fields.
//!
//! A [`GridSpec`] describes either a plain Cartesian grid in two or three
//! dimensions, or a two-dimensional meridian grid carrying a rotationally
//! symmetric three-dimensional problem. In the meridian case axis 0 is the
//! signed distance `x` from the symmetry axis and axis 1 is the axial
//! coordinate `z`; a point `(x, z)` stands for the circle of radius `|x|`.
//! Distances measured inside the meridian plane equal the three-dimensional
//! distances for rotationally symmetric sets, so signed-distance machinery is
//! shared. Measures and Laplacians pick up the `|x|` weight.
//!
//! Sets are closed sublevel sets `{f <= 0}` of a [`LevelSetField`], with the
//! signed distance negative inside and positive outside.

mod dump;
mod measure;
mod redistance;

pub use dump::{read_dump, write_dump};
pub use measure::{
    delta, distance_integral, indicator, perimeter, sym_diff_measure, volume, NEAR_LAYER_CELLS,
    SMOOTHING_WIDTH,
};
pub use redistance::{redistance, REDISTANCE_TOL};

use crate::error::{Error, Result};

/// How the stored grid maps to physical space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Cartesian,
    /// Meridian half-plane representation of an axisymmetric 3D problem.
    Axisymmetric,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    geometry: Geometry,
    shape: [usize; 3],
    origin: [f64; 3],
    h: f64,
}

const MIN_NODES: usize = 8;

impl GridSpec {
    /// Cartesian grid of dimension `shape.len()`.
    pub fn new(shape: &[usize], origin: &[f64], h: f64) -> Result<Self> {
        let n = shape.len();
        if !(n == 2 || n == 3) {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {n}")));
        }
        Self::build(n, Geometry::Cartesian, shape, origin, h)
    }

    /// Meridian grid for an axisymmetric problem in three dimensions.
    pub fn axisymmetric(shape: [usize; 2], origin: [f64; 2], h: f64) -> Result<Self> {
        Self::build(3, Geometry::Axisymmetric, &shape, &origin, h)
    }

    fn build(n: usize, geometry: Geometry, shape: &[usize], origin: &[f64], h: f64) -> Result<Self> {
        if origin.len() != shape.len() {
            return Err(Error::InvalidGrid(format!(
                "origin has {} coordinates for {} axes",
                origin.len(),
                shape.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if let Some(c) = shape.iter().find(|&&c| c < MIN_NODES) {
            return Err(Error::InvalidGrid(format!(
                "every axis needs at least {MIN_NODES} nodes, got {c}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        let mut s = [1usize; 3];
        let mut o = [0.0; 3];
        s[..shape.len()].copy_from_slice(shape);
        o[..origin.len()].copy_from_slice(origin);
        Ok(Self {
            n,
            geometry,
            shape: s,
            origin: o,
            h,
        })
    }

    /// Box `[lower, upper]^n` (Cartesian) with spacing `h`; the upper bound is
    /// rounded to the nearest whole number of cells.
    pub fn cube(n: usize, lower: f64, upper: f64, h: f64) -> Result<Self> {
        let count = ((upper - lower) / h).round() as usize + 1;
        Self::new(&vec![count; n], &vec![lower; n], h)
    }

    /// Meridian box `[lower, upper]^2` for an axisymmetric problem.
    pub fn meridian(lower: f64, upper: f64, h: f64) -> Result<Self> {
        let count = ((upper - lower) / h).round() as usize + 1;
        Self::axisymmetric([count; 2], [lower; 2], h)
    }

    /// Physical dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn is_axisymmetric(&self) -> bool {
        self.geometry == Geometry::Axisymmetric
    }

    /// Number of stored axes.
    pub fn dims(&self) -> usize {
        match self.geometry {
            Geometry::Cartesian => self.n,
            Geometry::Axisymmetric => 2,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dims()]
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dims()]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides, last axis fastest; unused axes have extent 1.
    pub fn strides(&self) -> [usize; 3] {
        [self.shape[1] * self.shape[2], self.shape[2], 1]
    }

    pub fn raw_shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn index(&self, mi: [usize; 3]) -> usize {
        let s = self.strides();
        mi[0] * s[0] + mi[1] * s[1] + mi[2]
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let s = self.strides();
        [idx / s[0], (idx % s[0]) / s[1], idx % s[1]]
    }

    /// Coordinate of node `i` along `axis`.
    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.h
    }

    /// Physical coordinates of a node (unused axes are zero).
    pub fn coord(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let mut x = [0.0; 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dims()) {
            *xa = self.axis_coord(a, mi[a]);
        }
        x
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.origin[axis] + (self.shape[axis] - 1) as f64 * self.h
    }

    /// Neighbor of `idx` one step along `axis` in direction `dir` (+1/-1).
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let mi = self.multi_index(idx);
        let stride = self.strides()[axis];
        if forward {
            (mi[axis] + 1 < self.shape[axis]).then(|| idx + stride)
        } else {
            (mi[axis] > 0).then(|| idx - stride)
        }
    }

    /// True when the node lies on the outer boundary of the grid.
    pub fn on_boundary(&self, mi: [usize; 3]) -> bool {
        (0..self.dims()).any(|a| mi[a] == 0 || mi[a] + 1 == self.shape[a])
    }

    /// Quadrature weights per axis: the measure of the dual cell of each node,
    /// clipped to the grid extent. The axisymmetric radial axis carries the
    /// `pi |x|` factor, so the product of axis weights integrates over the
    /// solid of revolution.
    pub fn axis_weights(&self, axis: usize) -> Vec<f64> {
        let lo = self.lower(axis);
        let hi = self.upper(axis);
        let half = 0.5 * self.h;
        (0..self.shape[axis])
            .map(|i| {
                let x = self.axis_coord(axis, i);
                let a = (x - half).max(lo);
                let b = (x + half).min(hi);
                self.interval_measure(axis, a, b)
            })
            .collect()
    }

    /// Measure of `[a, b]` along `axis` (with the revolution weight on the
    /// radial axis of a meridian grid).
    pub fn interval_measure(&self, axis: usize, a: f64, b: f64) -> f64 {
        if self.is_axisymmetric() && axis == 0 {
            let prim = |t: f64| t * t.abs();
            0.5 * std::f64::consts::PI * (prim(b) - prim(a))
        } else {
            b - a
        }
    }

    /// Quadrature weight of every node.
    pub fn node_weights(&self) -> Vec<f64> {
        let w: Vec<Vec<f64>> = (0..3)
            .map(|a| {
                if a < self.dims() {
                    self.axis_weights(a)
                } else {
                    vec![1.0]
                }
            })
            .collect();
        let mut out = Vec::with_capacity(self.len());
        for w0 in &w[0] {
            for w1 in &w[1] {
                for w2 in &w[2] {
                    out.push(w0 * w1 * w2);
                }
            }
        }
        out
    }

    /// Measure of the largest single grid cell.
    pub fn cell_measure(&self) -> f64 {
        match self.geometry {
            Geometry::Cartesian => self.h.powi(self.n as i32),
            Geometry::Axisymmetric => {
                let r = self.lower(0).abs().max(self.upper(0).abs());
                std::f64::consts::PI * r * self.h * self.h
            }
        }
    }

    /// Total measure of the grid box.
    pub fn extent_measure(&self) -> f64 {
        (0..self.dims())
            .map(|a| self.interval_measure(a, self.lower(a), self.upper(a)))
            .product()
    }

    pub fn same_grid(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Shape(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Node-valued real field on a grid, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("field contains non-finite values".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| f(spec.coord(i))).collect();
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Central-difference gradient at a node, one-sided on the grid boundary.
    pub fn gradient(&self, idx: usize) -> [f64; 3] {
        let spec = &self.spec;
        let mut g = [0.0; 3];
        for (a, ga) in g.iter_mut().enumerate().take(spec.dims()) {
            let fwd = spec.neighbor(idx, a, true);
            let bwd = spec.neighbor(idx, a, false);
            *ga = match (bwd, fwd) {
                (Some(b), Some(f)) => (self.values[f] - self.values[b]) / (2.0 * spec.h),
                (None, Some(f)) => (self.values[f] - self.values[idx]) / spec.h,
                (Some(b), None) => (self.values[idx] - self.values[b]) / spec.h,
                (None, None) => 0.0,
            };
        }
        g
    }

    /// Multilinear interpolation at a physical point (clamped to the grid).
    pub fn interpolate(&self, p: [f64; 3]) -> f64 {
        let spec = &self.spec;
        let dims = spec.dims();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..dims {
            let s = ((p[a] - spec.lower(a)) / spec.h).clamp(0.0, (spec.shape[a] - 1) as f64);
            let i = (s.floor() as usize).min(spec.shape[a] - 2);
            base[a] = i;
            frac[a] = s - i as f64;
        }
        let strides = spec.strides();
        let mut acc = 0.0;
        for corner in 0..(1usize << dims) {
            let mut w = 1.0;
            let mut idx = 0;
            for a in 0..dims {
                let bit = (corner >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                idx += (base[a] + bit) * strides[a];
            }
            if w != 0.0 {
                acc += w * self.values[idx];
            }
        }
        acc
    }
}

/// A scalar field read as a level-set function; the represented set is the
/// closed sublevel set `{value <= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetField(ScalarField);

impl LevelSetField {
    pub fn new(field: ScalarField) -> Self {
        Self(field)
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self(ScalarField::from_fn(spec, f))
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }

    pub fn spec(&self) -> &GridSpec {
        self.0.spec()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        self.0.values_mut()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.values[idx] <= 0.0
    }

    /// Field representing the closure of the complement.
    pub fn complement(&self) -> Self {
        let mut f = self.0.clone();
        f.values.iter_mut().for_each(|v| *v = -*v);
        Self(f)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut f = self.0.clone();
        f.values.iter_mut().for_each(|v| *v *= c);
        Self(f)
    }

    /// True when the field takes both signs (some node `<= 0`, some `> 0`).
    pub fn has_interface(&self) -> bool {
        let v = self.values();
        v.iter().any(|&x| x <= 0.0) && v.iter().any(|&x| x > 0.0)
    }

    /// Nodes with `|value| <= width`.
    pub fn band(&self, width: f64) -> Vec<usize> {
        self.values()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() <= width)
            .map(|(i, _)| i)
            .collect()
    }

    /// Points where the zero level crosses a grid edge, located by linear
    /// interpolation along the edge.
    pub fn interface_points(&self) -> Vec<[f64; 3]> {
        let spec = self.spec();
        let v = self.values();
        let mut pts = Vec::new();
        for idx in 0..spec.len() {
            for a in 0..spec.dims() {
                if let Some(j) = spec.neighbor(idx, a, true) {
                    let (fi, fj) = (v[idx], v[j]);
                    if (fi <= 0.0) != (fj <= 0.0) {
                        let theta = fi / (fi - fj);
                        let mut p = spec.coord(idx);
                        p[a] += theta * spec.h();
                        pts.push(p);
                    }
                }
            }
        }
        pts
    }

    /// Mean and standard deviation of the distance from `center` to the
    /// interface crossing points.
    pub fn interface_radius(&self, center: &[f64]) -> Option<(f64, f64)> {
        let pts = self.interface_points();
        if pts.is_empty() {
            return None;
        }
        let radii: Vec<f64> = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(center.iter().chain(std::iter::repeat(&0.0)))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let m = radii.iter().sum::<f64>() / radii.len() as f64;
        let var = radii.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / radii.len() as f64;
        Some((m, var.sqrt()))
    }
}

/// Exact signed distance of the ball `|x - center| <= radius`.
///
/// On a meridian grid the center must lie on the symmetry axis.
pub fn make_ball(spec: &GridSpec, center: &[f64], radius: f64) -> Result<LevelSetField> {
    let dims = spec.dims();
    if center.len() != dims {
        return Err(Error::DomainFit(format!(
            "ball center has {} coordinates, grid has {dims} axes",
            center.len()
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::DomainFit(format!("radius must be positive, got {radius}")));
    }
    if spec.is_axisymmetric() && center[0] != 0.0 {
        return Err(Error::DomainFit(
            "on a meridian grid the ball center must lie on the axis (x = 0)".into(),
        ));
    }
    let margin = radius + 3.0 * spec.h();
    for (a, &c) in center.iter().enumerate() {
        if c - margin < spec.lower(a) - 1e-12 || c + margin > spec.upper(a) + 1e-12 {
            return Err(Error::DomainFit(format!(
                "ball (center {center:?}, radius {radius}) plus a 3h margin leaves the grid along axis {a}"
            )));
        }
    }
    let mut c = [0.0; 3];
    c[..dims].copy_from_slice(center);
    Ok(LevelSetField::from_fn(*spec, |x| {
        let d2: f64 = (0..3).map(|a| (x[a] - c[a]) * (x[a] - c[a])).sum();
        d2.sqrt() - radius
    }))
}

/// Signed distance of the whole grid box shrunk by `margin`: the stand-in for
/// an unbounded outer domain. Exact inside the box and along face normals.
pub fn box_interior(spec: &GridSpec, margin: f64) -> LevelSetField {
    let dims = spec.dims();
    LevelSetField::from_fn(*spec, |x| {
        let mut outside = 0.0f64;
        let mut inside = f64::NEG_INFINITY;
        for a in 0..dims {
            let lo = spec.lower(a) + margin;
            let hi = spec.upper(a) - margin;
            let q = (lo - x[a]).max(x[a] - hi);
            outside += q.max(0.0).powi(2);
            inside = inside.max(q);
        }
        if outside > 0.0 {
            outside.sqrt()
        } else {
            inside
        }
    })
}

/// Union of two sets: pointwise minimum. Not an exact signed distance in
/// general; redistance afterwards if one is needed.
pub fn set_union(a: &LevelSetField, b: &LevelSetField) -> Result<LevelSetField> {
    combine(a, b, f64::min)
}

/// Intersection of two sets: pointwise maximum.
pub fn set_intersection(a: &LevelSetField, b: &LevelSetField) -> Result<LevelSetField> {
    combine(a, b, f64::max)
}

fn combine(a: &LevelSetField, b: &LevelSetField, op: fn(f64, f64) -> f64) -> Result<LevelSetField> {
    a.spec().same_grid(b.spec())?;
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| op(x, y))
        .collect();
    Ok(LevelSetField(ScalarField::new(*a.spec(), values)?))
}

/// Laplacian of a node-valued field with the revolution term on meridian
/// grids; zero on the outer grid boundary.
pub(crate) fn laplacian_at(f: &ScalarField, idx: usize, mi: [usize; 3]) -> f64 {
    let spec = f.spec();
    if spec.on_boundary(mi) {
        return 0.0;
    }
    let v = f.values();
    let strides = spec.strides();
    let h2 = spec.h() * spec.h();
    let mut lap = 0.0;
    for a in 0..spec.dims() {
        let s = strides[a];
        let (fw, bw, c) = (v[idx + s], v[idx - s], v[idx]);
        let second = (fw - 2.0 * c + bw) / h2;
        if spec.is_axisymmetric() && a == 0 {
            let x = spec.axis_coord(0, mi[0]);
            if x.abs() < 0.5 * spec.h() {
                lap += 2.0 * second;
            } else {
                lap += second + (fw - bw) / (2.0 * spec.h() * x);
            }
        } else {
            lap += second;
        }
    }
    lap
}

/// Mean curvature of the level sets of a signed-distance field, as the
/// Laplacian of the field (sum of principal curvatures, positive for convex
/// sets). Values are clipped to `[-1/h, 1/h]`, the resolution limit.
pub fn curvature(f: &LevelSetField) -> ScalarField {
    let spec = *f.spec();
    let cap = 1.0 / spec.h();
    let values = (0..spec.len())
        .map(|idx| {
            let mi = spec.multi_index(idx);
            laplacian_at(f.field(), idx, mi).clamp(-cap, cap)
        })
        .collect();
    ScalarField { spec, values }
}

/// Curvature at selected nodes only.
pub fn curvature_at(f: &LevelSetField, nodes: &[usize]) -> Vec<f64> {
    let spec = f.spec();
    let cap = 1.0 / spec.h();
    nodes
        .iter()
        .map(|&idx| laplacian_at(f.field(), idx, spec.multi_index(idx)).clamp(-cap, cap))
        .collect()
}

/// Mean curvature of the level sets, `div(∇f/|∇f|)`, by central differences,
/// with the revolution term `n_r / r` on meridian grids. Unlike [`curvature`]
/// it does not assume `|∇f| = 1`, so a field whose profile across the
/// interface has drifted away from a distance function still gives the
/// curvature of its level sets. Clipped to `[-1/h, 1/h]`; zero on the grid
/// boundary.
pub fn mean_curvature_at(f: &LevelSetField, nodes: &[usize]) -> Vec<f64> {
    let spec = f.spec();
    let h = spec.h();
    let cap = 1.0 / h;
    nodes
        .iter()
        .map(|&idx| {
            let mi = spec.multi_index(idx);
            if spec.on_boundary(mi) {
                return 0.0;
            }
            level_curvature(f.field(), idx, mi).clamp(-cap, cap)
        })
        .collect()
}

fn level_curvature(f: &ScalarField, idx: usize, mi: [usize; 3]) -> f64 {
    let spec = f.spec();
    let dims = spec.dims();
    let h = spec.h();
    let v = f.values();
    let st = spec.strides();
    let mut g = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for a in 0..dims {
        let (p, m) = (v[idx + st[a]], v[idx - st[a]]);
        g[a] = (p - m) / (2.0 * h);
        hess[a][a] = (p - 2.0 * v[idx] + m) / (h * h);
        for b in 0..a {
            let d = v[idx + st[a] + st[b]] - v[idx + st[a] - st[b]] - v[idx - st[a] + st[b]]
                + v[idx - st[a] - st[b]];
            hess[a][b] = d / (4.0 * h * h);
            hess[b][a] = hess[a][b];
        }
    }
    let g2: f64 = g.iter().map(|x| x * x).sum();
    if g2 < 1e-24 {
        return laplacian_at(f, idx, mi);
    }
    let norm = g2.sqrt();
    let mut trace = 0.0;
    let mut ghg = 0.0;
    for a in 0..dims {
        trace += hess[a][a];
        for b in 0..dims {
            ghg += g[a] * hess[a][b] * g[b];
        }
    }
    let mut k = (g2 * trace - ghg) / (g2 * norm);
    if spec.is_axisymmetric() {
        let x = spec.axis_coord(0, mi[0]);
        k += if x.abs() < 0.5 * h {
            // n_r / r tends to d(n_r)/dr on the axis, where the gradient is axial
            hess[0][0] / norm
        } else {
            g[0] / (norm * x)
        };
    }
    k
}
