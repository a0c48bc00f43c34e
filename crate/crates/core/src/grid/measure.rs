//! Smoothed-indicator quadratures of sets given by level-set fields.
//!
//! All measures use a cosine-profile smoothed Heaviside of half-width
//! `SMOOTHING_WIDTH * h` and the trapezoidal node weights of the grid.

use super::{curvature_at, GridSpec, LevelSetField};
use crate::error::Result;
use std::f64::consts::PI;

/// Half-width of the smoothed Heaviside/delta, in grid spacings.
pub const SMOOTHING_WIDTH: f64 = 1.5;

/// Smoothed indicator of `{f <= 0}` evaluated at a level-set value.
pub fn indicator(f: f64, eps: f64) -> f64 {
    let s = -f;
    if s <= -eps {
        0.0
    } else if s >= eps {
        1.0
    } else {
        0.5 * (1.0 + s / eps + (PI * s / eps).sin() / PI)
    }
}

/// Smoothed delta function matching [`indicator`].
pub fn delta(f: f64, eps: f64) -> f64 {
    if f.abs() >= eps {
        0.0
    } else {
        (1.0 + (PI * f / eps).cos()) / (2.0 * eps)
    }
}

fn eps(spec: &GridSpec) -> f64 {
    SMOOTHING_WIDTH * spec.h()
}

/// Measure of `{f <= 0}`.
pub fn volume(f: &LevelSetField) -> f64 {
    let spec = f.spec();
    let e = eps(spec);
    spec.node_weights()
        .iter()
        .zip(f.values())
        .map(|(w, &v)| w * indicator(v, e))
        .sum()
}

/// Interface measure (perimeter in 2D, surface area in 3D).
pub fn perimeter(f: &LevelSetField) -> f64 {
    let spec = f.spec();
    let e = eps(spec);
    let w = spec.node_weights();
    let v = f.values();
    let mut acc = 0.0;
    for idx in 0..spec.len() {
        let d = delta(v[idx], e);
        if d == 0.0 {
            continue;
        }
        let g = f.field().gradient(idx);
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        acc += w[idx] * d * norm;
    }
    acc
}

/// Measure of the symmetric difference `{a <= 0} Δ {b <= 0}`.
pub fn sym_diff_measure(a: &LevelSetField, b: &LevelSetField) -> Result<f64> {
    a.spec().same_grid(b.spec())?;
    let e = eps(a.spec());
    Ok(a.spec()
        .node_weights()
        .iter()
        .zip(a.values().iter().zip(b.values()))
        .map(|(w, (&x, &y))| w * (indicator(x, e) - indicator(y, e)).abs())
        .sum())
}

/// Width of the layer around `∂E0` where [`distance_integral`] works in
/// normal coordinates, in grid spacings.
pub const NEAR_LAYER_CELLS: f64 = 3.0;

/// `∫_{E Δ E0} dist(x, ∂E0) dx`, reading `|e0|` as the distance to `∂E0`.
///
/// Within `NEAR_LAYER_CELLS * h` of `∂E0` the integral is taken along normals:
/// a point of `∂E0` whose normal meets `∂E` at offset `D = e0 - e` contributes
/// `∫_0^D s (1 + H s) ds`, with `H` the mean curvature of `∂E0`, and these
/// contributions are summed with the smoothed delta of `e0`. This keeps the
/// result quadratic in sub-cell offsets. Farther out `|e0|` is integrated
/// against the smoothed indicators.
pub fn distance_integral(e: &LevelSetField, e0: &LevelSetField) -> Result<f64> {
    e.spec().same_grid(e0.spec())?;
    let spec = e0.spec();
    let eps = eps(spec);
    let near = NEAR_LAYER_CELLS * spec.h();
    let w = spec.node_weights();
    let (v, v0) = (e.values(), e0.values());

    let shell: Vec<usize> = (0..spec.len())
        .filter(|&i| v0[i].abs() < eps && !spec.on_boundary(spec.multi_index(i)))
        .collect();
    let curv = curvature_at(e0, &shell);
    let mut acc = 0.0;
    for (&i, &k) in shell.iter().zip(&curv) {
        let d = (v0[i] - v[i]).clamp(-near, near);
        let g = e0.field().gradient(i);
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        let along = 0.5 * d * d * (1.0 + 2.0 * k * d / 3.0).max(0.0);
        acc += w[i] * delta(v0[i], eps) * norm * along;
    }
    for i in 0..spec.len() {
        if v0[i].abs() >= near {
            acc += w[i] * v0[i].abs() * (indicator(v[i], eps) - indicator(v0[i], eps)).abs();
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_ball, ScalarField};

    fn disk(h: f64, r: f64) -> LevelSetField {
        let g = GridSpec::cube(2, -1.6, 1.6, h).unwrap();
        make_ball(&g, &[0.0, 0.0], r).unwrap()
    }

    #[test]
    fn indicator_and_delta_are_consistent() {
        let e = 0.3;
        assert_eq!(indicator(-1.0, e), 1.0);
        assert_eq!(indicator(1.0, e), 0.0);
        assert!((indicator(0.0, e) - 0.5).abs() < 1e-15);
        // delta integrates to one and is the derivative of the indicator
        let n = 10_000;
        let dx = 2.0 * e / n as f64;
        let s: f64 = (0..n).map(|i| delta(-e + (i as f64 + 0.5) * dx, e) * dx).sum();
        assert!((s - 1.0).abs() < 1e-6);
        let x = 0.1;
        let fd = (indicator(x - 1e-6, e) - indicator(x + 1e-6, e)) / 2e-6;
        assert!((fd - delta(x, e)).abs() < 1e-6);
    }

    #[test]
    fn disk_area_and_circumference() {
        let f = disk(0.02, 1.0);
        assert!((volume(&f) - PI).abs() < 0.05, "{}", volume(&f));
        assert!((perimeter(&f) - 2.0 * PI).abs() < 0.1, "{}", perimeter(&f));
    }

    #[test]
    fn ball_volume_and_sphere_area() {
        let g = GridSpec::cube(3, -1.5, 1.5, 0.05).unwrap();
        let b = make_ball(&g, &[0.0, 0.0, 0.0], 1.0).unwrap();
        assert!((volume(&b) - 4.0 * PI / 3.0).abs() < 0.15);
        let g2 = GridSpec::cube(3, -2.5, 2.5, 0.05).unwrap();
        let s = make_ball(&g2, &[0.0, 0.0, 0.0], 2.0).unwrap();
        assert!((perimeter(&s) - 16.0 * PI).abs() < 1.0, "{}", perimeter(&s));
    }

    #[test]
    fn meridian_measures_match_3d_formulas() {
        let g = GridSpec::meridian(-2.5, 2.5, 0.02).unwrap();
        let s = make_ball(&g, &[0.0, 0.0], 2.0).unwrap();
        assert!((volume(&s) - 32.0 * PI / 3.0).abs() < 0.1, "{}", volume(&s));
        assert!((perimeter(&s) - 16.0 * PI).abs() < 0.2, "{}", perimeter(&s));
        assert!((g.extent_measure() - PI * 2.5 * 2.5 * 5.0).abs() < 1e-9);
    }

    #[test]
    fn empty_set_has_no_measure() {
        let g = GridSpec::cube(2, -1.0, 1.0, 0.1).unwrap();
        let f = LevelSetField::new(ScalarField::constant(g, 1.0));
        assert_eq!(volume(&f), 0.0);
        assert_eq!(perimeter(&f), 0.0);
    }

    #[test]
    fn complement_measures_add_up_to_the_box() {
        for g in [
            GridSpec::cube(2, -1.6, 1.6, 0.02).unwrap(),
            GridSpec::meridian(-1.6, 1.6, 0.02).unwrap(),
        ] {
            let f = make_ball(&g, &[0.0, 0.0], 1.0).unwrap();
            let total = volume(&f) + volume(&f.complement());
            assert!((total / g.extent_measure() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn annulus_sym_diff_and_distance_integral() {
        let a = disk(0.02, 1.0);
        let b = disk(0.02, 1.2);
        assert_eq!(sym_diff_measure(&a, &a).unwrap(), 0.0);
        assert_eq!(distance_integral(&a, &a).unwrap(), 0.0);
        let m = sym_diff_measure(&a, &b).unwrap();
        assert!((m - 0.44 * PI).abs() < 0.05, "{m}");
        // 2π ∫_1^1.2 (r - 1) r dr
        let exact = 2.0 * PI * (0.2f64.powi(3) / 3.0 + 0.2f64.powi(2) / 2.0);
        let d = distance_integral(&b, &a).unwrap();
        assert!((d - exact).abs() < 0.01, "{d} vs {exact}");
    }

    #[test]
    fn shell_sym_diff_and_distance_integral() {
        let g = GridSpec::cube(3, -1.5, 1.5, 0.05).unwrap();
        let a = make_ball(&g, &[0.0, 0.0, 0.0], 1.0).unwrap();
        let b = make_ball(&g, &[0.0, 0.0, 0.0], 1.2).unwrap();
        let m = sym_diff_measure(&a, &b).unwrap();
        assert!((m - 4.0 * PI / 3.0 * 0.728).abs() < 0.15, "{m}");
        // 4π ∫_1^1.2 (r - 1) r^2 dr
        let exact = 4.0 * PI * (1.2f64.powi(4) / 4.0 - 1.2f64.powi(3) / 3.0 - 0.25 + 1.0 / 3.0);
        let d = distance_integral(&b, &a).unwrap();
        assert!((d - exact).abs() < 0.02, "{d} vs {exact}");
    }

    #[test]
    fn distance_integral_is_quadratic_in_small_offsets() {
        let a = disk(0.02, 1.0);
        for off in [0.004, 0.01, -0.01, 0.03] {
            let b = disk(0.02, 1.0 + off);
            // 2π ∫ |r - 1| r dr between the two circles
            let exact = 2.0 * PI * (off * off / 2.0 + off.powi(3) / 3.0);
            let d = distance_integral(&b, &a).unwrap();
            assert!((d - exact).abs() < 0.05 * exact, "offset {off}: {d} vs {exact}");
        }
    }

    #[test]
    fn perimeter_error_is_within_first_order_bound() {
        // The smoothing width scales with h, so the quadrature keeps a small
        // h-independent floor; the error must stay below h at every level.
        for h in [0.04, 0.02, 0.01] {
            let err = (perimeter(&disk(h, 1.0)) - 2.0 * PI).abs();
            assert!(err <= h, "h = {h}: error {err}");
        }
    }
}
