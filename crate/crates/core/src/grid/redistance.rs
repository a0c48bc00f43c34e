//! Signed-distance reconstruction.
//!
//! Nodes within `PROJECT_CELLS` of the interface get their distance from a
//! closest-point projection onto the zero set of a Catmull-Rom interpolant of
//! the input, found by Newton iteration. The result is smooth along the
//! interface, so curvatures computed from it by finite differences converge.
//! Where the projection fails (kinks, flat gradients) nodes next to a sign
//! change fall back to `f / |∇f|` bounded by the grid-line crossing distance.
//! Everything else gets the first-order Godunov solution of `|∇d| = 1`, computed
//! with Gauss-Seidel sweeps over the `2^dims` axis orderings until the largest
//! update falls below `REDISTANCE_TOL * h`.

use super::{LevelSetField, ScalarField};
use crate::error::{Error, Result};

/// Sweep termination threshold, in grid spacings.
pub const REDISTANCE_TOL: f64 = 1e-4;

const MAX_ROUNDS: usize = 64;

/// Layers of nodes around the interface that keep their linearized distance.
const PIN_LAYERS: usize = 3;

/// Reach of the closest-point projection, in grid spacings.
pub const PROJECT_CELLS: f64 = 6.0;

const NEWTON_ITERS: usize = 40;

pub fn redistance(f: &LevelSetField) -> Result<LevelSetField> {
    if !f.has_interface() {
        return Err(Error::NoInterface);
    }
    let spec = *f.spec();
    let dims = spec.dims();
    let h = spec.h();
    let v = f.values();
    let n = spec.len();
    let shape = spec.raw_shape();
    let strides = spec.strides();

    let mut dist = vec![f64::INFINITY; n];
    let mut pinned = vec![false; n];

    let mut crossing = vec![f64::INFINITY; n];
    for idx in 0..n {
        let inside = v[idx] <= 0.0;
        for a in 0..dims {
            for fw in [true, false] {
                if let Some(j) = spec.neighbor(idx, a, fw) {
                    if (v[j] <= 0.0) != inside {
                        let theta = v[idx] / (v[idx] - v[j]);
                        crossing[idx] = crossing[idx].min(theta * h);
                    }
                }
            }
        }
    }
    // interface nodes plus PIN_LAYERS - 1 rings of axis neighbors
    let mut ring: Vec<usize> = (0..n).filter(|&i| crossing[i].is_finite()).collect();
    ring.iter().for_each(|&i| pinned[i] = true);
    for _ in 1..PIN_LAYERS {
        let mut next = Vec::new();
        for &i in &ring {
            for a in 0..dims {
                for fw in [true, false] {
                    if let Some(j) = spec.neighbor(i, a, fw) {
                        if !pinned[j] {
                            pinned[j] = true;
                            next.push(j);
                        }
                    }
                }
            }
        }
        ring = next;
    }
    for idx in 0..n {
        if !pinned[idx] {
            continue;
        }
        let g = f.field().gradient(idx);
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        dist[idx] = if norm > 1e-12 {
            (v[idx].abs() / norm).min(crossing[idx])
        } else {
            crossing[idx]
        };
        if !dist[idx].is_finite() {
            pinned[idx] = false;
        }
    }
    for idx in 0..n {
        let g = f.field().gradient(idx);
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if !(norm > 1e-12 && v[idx].abs() < PROJECT_CELLS * norm * h) {
            continue;
        }
        if let Some(d) = project(f.field(), spec.coord(idx), h) {
            if d <= crossing[idx] + 0.5 * h && d <= (PROJECT_CELLS + 2.0) * h {
                dist[idx] = d;
                pinned[idx] = true;
            }
        }
    }

    let tol = REDISTANCE_TOL * h;
    for _ in 0..MAX_ROUNDS {
        let mut max_change = 0.0f64;
        for order in 0..(1usize << dims) {
            let rev = |a: usize| (order >> a) & 1 == 1;
            let axis_iter = |a: usize| -> Vec<usize> {
                let c = shape[a];
                if rev(a) {
                    (0..c).rev().collect()
                } else {
                    (0..c).collect()
                }
            };
            let (r0, r1, r2) = (axis_iter(0), axis_iter(1), axis_iter(2));
            for &i0 in &r0 {
                for &i1 in &r1 {
                    for &i2 in &r2 {
                        let mi = [i0, i1, i2];
                        let idx = i0 * strides[0] + i1 * strides[1] + i2;
                        if pinned[idx] {
                            continue;
                        }
                        let mut a = [f64::INFINITY; 3];
                        for ax in 0..dims {
                            let s = strides[ax];
                            let lo = if mi[ax] > 0 { dist[idx - s] } else { f64::INFINITY };
                            let hi = if mi[ax] + 1 < shape[ax] {
                                dist[idx + s]
                            } else {
                                f64::INFINITY
                            };
                            a[ax] = lo.min(hi);
                        }
                        let cand = godunov(a, dims, h);
                        if cand < dist[idx] {
                            let change = if dist[idx].is_finite() {
                                dist[idx] - cand
                            } else {
                                f64::INFINITY
                            };
                            max_change = max_change.max(change);
                            dist[idx] = cand;
                        }
                    }
                }
            }
        }
        if max_change < tol {
            break;
        }
    }

    let values = dist
        .iter()
        .zip(v)
        .map(|(&d, &x)| if x <= 0.0 { -d } else { d })
        .collect();
    Ok(LevelSetField::new(ScalarField::new(spec, values)?))
}

/// Distance from `x` to the zero set of the cubic interpolant of `f`, if the
/// Newton iteration for the foot point converges.
fn project(f: &ScalarField, x: [f64; 3], h: f64) -> Option<f64> {
    let dims = f.spec().dims();
    let (fx, gx) = cubic(f, x);
    let g2: f64 = gx[..dims].iter().map(|c| c * c).sum();
    if g2 < 1e-20 {
        return None;
    }
    // start from the linearized foot point
    let mut y = x;
    for a in 0..dims {
        y[a] -= fx * gx[a] / g2;
    }
    for _ in 0..NEWTON_ITERS {
        let (fy, g) = cubic(f, y);
        let g2: f64 = g[..dims].iter().map(|c| c * c).sum();
        if g2 < 1e-20 {
            return None;
        }
        let proj: f64 = (0..dims).map(|a| (x[a] - y[a]) * g[a]).sum::<f64>() / g2;
        let mut step = [0.0; 3];
        for a in 0..dims {
            step[a] = -fy * g[a] / g2 + (x[a] - y[a]) - proj * g[a];
        }
        let len = step[..dims].iter().map(|c| c * c).sum::<f64>().sqrt();
        let scale = if len > h { h / len } else { 1.0 };
        for a in 0..dims {
            y[a] += scale * step[a];
        }
        if len < 1e-8 * h {
            let d2: f64 = (0..dims).map(|a| (x[a] - y[a]) * (x[a] - y[a])).sum();
            return Some(d2.sqrt());
        }
    }
    None
}

/// Catmull-Rom interpolant of `f` and its gradient at `y`.
fn cubic(f: &ScalarField, y: [f64; 3]) -> (f64, [f64; 3]) {
    let spec = f.spec();
    let dims = spec.dims();
    let h = spec.h();
    let shape = spec.raw_shape();
    let strides = spec.strides();
    // unused axes get a single tap of weight one
    let mut w = [[1.0, 0.0, 0.0, 0.0]; 3];
    let mut dw = [[0.0; 4]; 3];
    let mut taps = [1usize; 3];
    let mut off = [[0usize; 4]; 3];
    for a in 0..dims {
        let s = (y[a] - spec.lower(a)) / h;
        let i = (s.floor() as isize).clamp(0, shape[a] as isize - 2);
        let t = s - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        taps[a] = 4;
        w[a] = [
            0.5 * (-t3 + 2.0 * t2 - t),
            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2),
        ];
        dw[a] = [
            0.5 * (-3.0 * t2 + 4.0 * t - 1.0) / h,
            0.5 * (9.0 * t2 - 10.0 * t) / h,
            0.5 * (-9.0 * t2 + 8.0 * t + 1.0) / h,
            0.5 * (3.0 * t2 - 2.0 * t) / h,
        ];
        for (k, o) in off[a].iter_mut().enumerate() {
            let j = (i - 1 + k as isize).clamp(0, shape[a] as isize - 1) as usize;
            *o = j * strides[a];
        }
    }
    let vals = f.values();
    let (mut val, mut g0, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0);
    for k0 in 0..taps[0] {
        for k1 in 0..taps[1] {
            let base = off[0][k0] + off[1][k1];
            let (a01, d0, d1) = (w[0][k0] * w[1][k1], dw[0][k0] * w[1][k1], w[0][k0] * dw[1][k1]);
            for k2 in 0..taps[2] {
                let fv = vals[base + off[2][k2]];
                val += a01 * w[2][k2] * fv;
                g0 += d0 * w[2][k2] * fv;
                g1 += d1 * w[2][k2] * fv;
                g2 += a01 * dw[2][k2] * fv;
            }
        }
    }
    (val, [g0, g1, g2])
}

/// Upwind solution of `sum_k ((d - a_k)^+)^2 = h^2`.
fn godunov(mut a: [f64; 3], dims: usize, h: f64) -> f64 {
    let a = &mut a[..dims];
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if !a[0].is_finite() {
        return f64::INFINITY;
    }
    let mut d = a[0] + h;
    if dims >= 2 && d > a[1] {
        let diff = a[0] - a[1];
        d = 0.5 * (a[0] + a[1] + (2.0 * h * h - diff * diff).sqrt());
        if dims == 3 && d > a[2] {
            let s = a[0] + a[1] + a[2];
            let q = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] - h * h;
            d = (s + (s * s - 3.0 * q).max(0.0).sqrt()) / 3.0;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_ball, GridSpec};

    fn near_interface(f: &LevelSetField, width: f64) -> Vec<usize> {
        f.band(width)
    }

    #[test]
    fn godunov_is_exact_for_planes() {
        let h = 0.1;
        // plane through the origin with unit normal (cos t, sin t)
        let t: f64 = 0.4;
        let (c, s) = (t.cos(), t.sin());
        let d = godunov([1.0 - h * c, 1.0 - h * s, f64::INFINITY], 2, h);
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(godunov([0.3, 5.0, f64::INFINITY], 2, 0.1), 0.4);
    }

    #[test]
    fn exact_distance_is_a_fixed_point() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.02).unwrap();
        let f = make_ball(&g, &[0.05, -0.1], 0.5).unwrap();
        let r = redistance(&f).unwrap();
        for i in near_interface(&f, g.h()) {
            assert!((r.values()[i] - f.values()[i]).abs() < 0.01 * g.h());
        }
    }

    #[test]
    fn scaling_is_undone() {
        let g = GridSpec::cube(3, -1.0, 1.0, 0.05).unwrap();
        let f = make_ball(&g, &[0.0, 0.0, 0.0], 0.6).unwrap();
        let r = redistance(&f.scaled(2.0)).unwrap();
        for i in near_interface(&f, g.h()) {
            assert!((r.values()[i] - f.values()[i]).abs() < 0.01 * g.h());
        }
    }

    #[test]
    fn eikonal_residual_near_interface() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.02).unwrap();
        let f = make_ball(&g, &[0.0, 0.0], 0.5).unwrap();
        let warped = LevelSetField::from_fn(g, |x| {
            let d = (x[0] * x[0] + x[1] * x[1]).sqrt() - 0.5;
            d * (1.0 + 0.5 * x[0] * x[0]) + 0.3 * d * d
        });
        let r = redistance(&warped).unwrap();
        for i in near_interface(&r, 5.0 * g.h()) {
            let gr = r.field().gradient(i);
            let norm = (gr[0] * gr[0] + gr[1] * gr[1]).sqrt();
            assert!((norm - 1.0).abs() <= 0.1, "{norm}");
            assert!((r.values()[i] - f.values()[i]).abs() < 0.5 * g.h());
        }
    }

    #[test]
    fn redistance_is_idempotent() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.025).unwrap();
        let ellipse = LevelSetField::from_fn(g, |x| {
            (x[0] * x[0] / 0.36 + x[1] * x[1] / 0.16).sqrt() - 1.0
        });
        let r1 = redistance(&ellipse).unwrap();
        let r2 = redistance(&r1).unwrap();
        for i in near_interface(&r1, g.h()) {
            assert!((r1.values()[i] - r2.values()[i]).abs() <= 0.01 * g.h());
        }
    }

    #[test]
    fn union_membership_is_preserved() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.025).unwrap();
        let a = make_ball(&g, &[-0.3, 0.0], 0.4).unwrap();
        let b = make_ball(&g, &[0.3, 0.1], 0.35).unwrap();
        let u = crate::grid::set_union(&a, &b).unwrap();
        let r = redistance(&u).unwrap();
        for i in 0..g.len() {
            assert_eq!(u.contains(i), r.contains(i));
        }
        // away from the two concave corners the union distance is exact
        for i in u.band(g.h()) {
            let x = g.coord(i);
            if x[0].abs() > 0.2 {
                assert!((r.values()[i] - u.values()[i]).abs() < 0.01 * g.h());
            }
        }
    }

    #[test]
    fn curvature_survives_redistancing() {
        // a warped field, so the projection has real work to do
        let g = GridSpec::cube(2, -1.5, 1.5, 0.03).unwrap();
        let warped = LevelSetField::from_fn(g, |x| {
            let d = (x[0] * x[0] + x[1] * x[1]).sqrt() - 0.8;
            d * (1.0 + 0.4 * x[1]) + 0.5 * d * d
        });
        let r = redistance(&warped).unwrap();
        let band = r.band(3.0 * g.h());
        let k = crate::grid::mean_curvature_at(&r, &band);
        for (&i, &ki) in band.iter().zip(&k) {
            let x = g.coord(i);
            let rad = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert!((ki - 1.0 / rad).abs() < 0.01, "{ki} vs {}", 1.0 / rad);
        }
    }

    #[test]
    fn one_signed_field_has_no_interface() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.1).unwrap();
        let f = LevelSetField::new(ScalarField::constant(g, 0.7));
        assert!(matches!(redistance(&f), Err(Error::NoInterface)));
    }

    #[test]
    fn membership_is_preserved() {
        let g = GridSpec::meridian(-1.0, 1.0, 0.05).unwrap();
        let f = make_ball(&g, &[0.0, 0.2], 0.5).unwrap().scaled(0.3);
        let r = redistance(&f).unwrap();
        for i in 0..g.len() {
            assert_eq!(f.contains(i), r.contains(i));
        }
    }
}
