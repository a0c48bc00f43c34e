//! Exact radial solutions: `D_in = B_1`, constant boundary value `phi0`,
//! `E = B_R`.
//!
//! For `n = 3` these are the closed forms of the radially symmetric
//! configuration (harmonic potential `~ 1/|x|`); `n = 2` uses the logarithmic
//! capacity potential instead, since `|x|^{2-n}` degenerates there. The
//! potential scales linearly in `phi0` and the Dirichlet term quadratically;
//! `phi0 = 1` gives the unscaled formulas.
//!
//! The interface radius `L(t)` of the smooth flow obeys
//! `L' = u_ν(L)^2 - (n-1)/L`, whose unique zero on `(1, ∞)` is the radius
//! minimizing Dirichlet energy plus perimeter.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialConfig {
    n: usize,
    phi0: f64,
}

impl RadialConfig {
    pub fn new(n: usize, phi0: f64) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::OutOfDomain(format!("radial dimension must be 2 or 3, got {n}")));
        }
        if !(phi0 > 0.0 && phi0.is_finite()) {
            return Err(Error::OutOfDomain(format!("phi0 must be positive, got {phi0}")));
        }
        Ok(Self { n, phi0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Surface area of the unit sphere, `n ω_n`.
    pub fn unit_sphere_area(&self) -> f64 {
        match self.n {
            2 => 2.0 * PI,
            _ => 4.0 * PI,
        }
    }
}

fn check_radius(r: f64, what: &str) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("{what} must exceed the inner radius 1, got {r}")))
    }
}

/// Residual of the defining equation of the optimal radius:
/// `R (R - 1)^2 - phi0^2 / 2` for `n = 3`, `R log(R)^2 - phi0^2` for `n = 2`.
pub fn r_opt_residual(r: f64, cfg: &RadialConfig) -> f64 {
    let p2 = cfg.phi0 * cfg.phi0;
    match cfg.n {
        2 => r * r.ln().powi(2) - p2,
        _ => r * (r - 1.0).powi(2) - 0.5 * p2,
    }
}

/// Stationary radius, by bisection of [`r_opt_residual`] (increasing on
/// `(1, ∞)` and negative at 1).
pub fn r_opt(cfg: &RadialConfig) -> f64 {
    let mut lo = 1.0;
    let mut hi = 100.0;
    while r_opt_residual(hi, cfg) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if r_opt_residual(mid, cfg) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dirichlet energy of the radial potential on `B_R \ B_1`.
pub fn radial_dirichlet_energy(r: f64, cfg: &RadialConfig) -> Result<f64> {
    check_radius(r, "R")?;
    let p2 = cfg.phi0 * cfg.phi0;
    Ok(match cfg.n {
        2 => p2 * 2.0 * PI / r.ln(),
        _ => p2 * r / (r - 1.0) * 4.0 * PI,
    })
}

/// Dirichlet energy plus perimeter of `B_R`.
pub fn radial_energy(r: f64, cfg: &RadialConfig) -> Result<f64> {
    let perimeter = cfg.unit_sphere_area() * r.powi(cfg.n as i32 - 1);
    Ok(radial_dirichlet_energy(r, cfg)? + perimeter)
}

/// `|u'(R)|`, the normal derivative of the radial potential at the outer
/// boundary.
pub fn potential_slope(r: f64, cfg: &RadialConfig) -> Result<f64> {
    check_radius(r, "R")?;
    Ok(match cfg.n {
        2 => cfg.phi0 / (r * r.ln()),
        _ => cfg.phi0 / (r * (r - 1.0)),
    })
}

/// `dL/dt = u_ν(L)^2 - (n-1)/L`.
pub fn ode_rhs(l: f64, cfg: &RadialConfig) -> Result<f64> {
    let s = potential_slope(l, cfg)?;
    Ok(s * s - (cfg.n as f64 - 1.0) / l)
}

/// Radial capacity potential at distance `r` from the center when `E = B_R`.
pub fn radial_potential(r: f64, big_r: f64, cfg: &RadialConfig) -> Result<f64> {
    check_radius(big_r, "R")?;
    Ok(if r <= 1.0 {
        cfg.phi0
    } else if r >= big_r {
        0.0
    } else {
        match cfg.n {
            2 => cfg.phi0 * (big_r / r).ln() / big_r.ln(),
            _ => cfg.phi0 * (big_r / r - 1.0) / (big_r - 1.0),
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialTrajectory {
    samples: Vec<(f64, f64)>,
    cfg: RadialConfig,
    l0: f64,
}

impl RadialTrajectory {
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.cfg.n
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn config(&self) -> &RadialConfig {
        &self.cfg
    }

    pub fn final_radius(&self) -> f64 {
        self.samples.last().map(|s| s.1).unwrap_or(self.l0)
    }

    /// Radius at an arbitrary time inside the sampled range, by cubic Hermite
    /// interpolation using the ODE right-hand side as the slope.
    pub fn radius_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        let k = s.partition_point(|&(ts, _)| ts < t);
        if k >= s.len() {
            return s[s.len() - 1].1;
        }
        let (t0, y0) = s[k - 1];
        let (t1, y1) = s[k];
        let dt = t1 - t0;
        let m0 = ode_rhs(y0, &self.cfg).unwrap_or(0.0) * dt;
        let m1 = ode_rhs(y1, &self.cfg).unwrap_or(0.0) * dt;
        let u = (t - t0) / dt;
        let (u2, u3) = (u * u, u * u * u);
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1
    }
}

fn rk4_step(l: f64, dt: f64, cfg: &RadialConfig) -> Result<f64> {
    let k1 = ode_rhs(l, cfg)?;
    let k2 = ode_rhs(l + 0.5 * dt * k1, cfg)?;
    let k3 = ode_rhs(l + 0.5 * dt * k2, cfg)?;
    let k4 = ode_rhs(l + dt * k3, cfg)?;
    Ok(l + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Classical RK4 from `L(0) = l0` to `t_end`. A step is halved while
/// `|rhs| * dt > 0.1 (L - 1)`, which keeps the iterate away from the pole at
/// `L = 1`. Every accepted step is sampled; the last one lands on `t_end`.
pub fn integrate(l0: f64, t_end: f64, dt: f64, cfg: &RadialConfig) -> Result<RadialTrajectory> {
    check_radius(l0, "L0")?;
    if !(dt > 0.0) {
        return Err(Error::OutOfDomain(format!("dt must be positive, got {dt}")));
    }
    let mut samples = vec![(0.0, l0)];
    let (mut t, mut l) = (0.0, l0);
    while t < t_end {
        let mut step = dt.min(t_end - t);
        let rhs = ode_rhs(l, cfg)?;
        while rhs.abs() * step > 0.1 * (l - 1.0) {
            step *= 0.5;
        }
        l = rk4_step(l, step, cfg)?;
        t = if t_end - t - step < 1e-12 * t_end.max(1.0) {
            t_end
        } else {
            t + step
        };
        samples.push((t, l));
    }
    Ok(RadialTrajectory {
        samples,
        cfg: *cfg,
        l0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, phi0: f64) -> RadialConfig {
        RadialConfig::new(n, phi0).unwrap()
    }

    #[test]
    fn optimal_radius_three_dimensions() {
        let c = cfg(3, 1.0);
        let r = r_opt(&c);
        // independent root of R (R-1)^2 = 1/2 to 30 digits
        assert!((r - 1.565_197_717_383_639_4).abs() < 1e-11);
        assert!((r * (r - 1.0).powi(2) - 0.5).abs() <= 1e-10);
        assert!(ode_rhs(r, &c).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn optimal_radius_two_dimensions_matches_energy_scan() {
        let c = cfg(2, 1.0);
        let r = r_opt(&c);
        assert!(r_opt_residual(r, &c).abs() <= 1e-10);
        // brute-force scan of 2π/log R + 2πR
        let (mut best, mut best_e) = (0.0, f64::INFINITY);
        for k in 0..400_000 {
            let rr = 1.01 + k as f64 * 1e-5;
            let e = 2.0 * PI / rr.ln() + 2.0 * PI * rr;
            if e < best_e {
                best_e = e;
                best = rr;
            }
        }
        assert!((r - best).abs() < 2e-5, "{r} vs scan {best}");
        assert!((r - 2.020_747_358_611_857_7).abs() < 1e-11);
    }

    #[test]
    fn stationarity_identity() {
        for n in [2, 3] {
            for phi0 in [0.5, 1.0, 2.0] {
                let c = cfg(n, phi0);
                assert!(ode_rhs(r_opt(&c), &c).unwrap().abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn energy_values() {
        let c3 = cfg(3, 1.0);
        assert!((radial_energy(2.0, &c3).unwrap() - 24.0 * PI).abs() < 1e-12);
        assert!(radial_energy(1.001, &c3).unwrap() > 1e4);
        assert!(radial_energy(1.0, &c3).is_err());
        assert!(radial_energy(0.5, &c3).is_err());
        let c2 = cfg(2, 1.0);
        let e = std::f64::consts::E;
        assert!((radial_energy(e, &c2).unwrap() - (2.0 * PI + 2.0 * PI * e)).abs() < 1e-12);
    }

    #[test]
    fn energy_is_minimal_at_r_opt() {
        for n in [2, 3] {
            for phi0 in [0.5, 1.0, 2.0] {
                let c = cfg(n, phi0);
                let r = r_opt(&c);
                let e0 = radial_energy(r, &c).unwrap();
                for d in [1e-3, 1e-2, 1e-1] {
                    assert!(radial_energy(r + d, &c).unwrap() > e0);
                    if r - d > 1.0 {
                        assert!(radial_energy(r - d, &c).unwrap() > e0);
                    }
                }
            }
        }
    }

    #[test]
    fn ode_rhs_values() {
        let c = cfg(3, 1.0);
        assert!((ode_rhs(2.0, &c).unwrap() + 0.75).abs() < 1e-14);
        let expected = (1.0f64 / 0.11).powi(2) - 2.0 / 1.1;
        assert!((ode_rhs(1.1, &c).unwrap() - expected).abs() < 1e-10);
        assert!((expected - 80.8264).abs() < 1e-4);
        assert!(ode_rhs(1.0, &c).is_err());
    }

    #[test]
    fn potential_values() {
        let c3 = cfg(3, 1.0);
        assert_eq!(radial_potential(1.0, 2.0, &c3).unwrap(), 1.0);
        assert_eq!(radial_potential(2.0, 2.0, &c3).unwrap(), 0.0);
        assert!((radial_potential(1.5, 2.0, &c3).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let c2 = cfg(2, 1.0);
        let v = radial_potential(1.5, 2.0, &c2).unwrap();
        assert!((v - (4.0f64 / 3.0).ln() / 2.0f64.ln()).abs() < 1e-14);
        assert!((v - 0.415).abs() < 1e-3);
        assert!(radial_potential(1.5, 0.9, &c2).is_err());
    }

    #[test]
    fn potential_slope_drives_the_ode() {
        for n in [2, 3] {
            for phi0 in [0.5, 1.0, 2.0] {
                let c = cfg(n, phi0);
                for big_r in [1.3, 2.0, 3.7] {
                    // centered finite difference of the closed-form potential
                    let eps = 1e-6;
                    let fd = (radial_potential(big_r - 2.0 * eps, big_r, &c).unwrap()
                        - radial_potential(big_r - eps, big_r, &c).unwrap())
                        / eps;
                    let slope = potential_slope(big_r, &c).unwrap();
                    assert!((fd - slope).abs() < 1e-5 * slope.max(1.0));
                    let lhs = slope * slope;
                    let rhs = ode_rhs(big_r, &c).unwrap() + (n as f64 - 1.0) / big_r;
                    assert!((lhs - rhs).abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn integrate_zero_time() {
        let t = integrate(2.0, 0.0, 0.01, &cfg(3, 1.0)).unwrap();
        assert_eq!(t.samples(), &[(0.0, 2.0)]);
    }

    #[test]
    fn long_time_convergence_is_monotone() {
        let c = cfg(3, 1.0);
        let r = r_opt(&c);
        for l0 in [1.1, 2.0, 5.0] {
            let traj = integrate(l0, 50.0, 0.01, &c).unwrap();
            assert!((traj.final_radius() - r).abs() <= 1e-6);
            let s = traj.samples();
            for w in s.windows(2) {
                assert!(w[1].0 > w[0].0);
                assert!(w[1].1 > 1.0);
                if l0 < r {
                    assert!(w[1].1 >= w[0].1);
                } else {
                    assert!(w[1].1 <= w[0].1);
                }
            }
        }
    }

    #[test]
    fn energy_decreases_along_trajectories() {
        for n in [2, 3] {
            let c = cfg(n, 1.0);
            for l0 in [1.1, 1.6, 3.0] {
                let traj = integrate(l0, 5.0, 0.01, &c).unwrap();
                let e: Vec<f64> = traj
                    .samples()
                    .iter()
                    .map(|&(_, l)| radial_energy(l, &c).unwrap())
                    .collect();
                assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            }
        }
    }

    #[test]
    fn integrator_is_fourth_order() {
        let c = cfg(3, 1.0);
        let dt = 0.05;
        let reference = integrate(2.0, 1.0, dt / 16.0, &c).unwrap().final_radius();
        let e1 = (integrate(2.0, 1.0, dt, &c).unwrap().final_radius() - reference).abs();
        let e2 = (integrate(2.0, 1.0, dt / 2.0, &c).unwrap().final_radius() - reference).abs();
        let ratio = e1 / e2;
        assert!((ratio / 16.0 - 1.0).abs() <= 0.3, "ratio {ratio}");
    }

    #[test]
    fn hermite_sampling_matches_fine_integration() {
        let c = cfg(3, 1.0);
        let coarse = integrate(2.0, 2.0, 0.01, &c).unwrap();
        for t in [0.013, 0.5, 1.2345, 1.999] {
            let fine = integrate(2.0, t, 1e-4, &c).unwrap().final_radius();
            assert!((coarse.radius_at(t) - fine).abs() < 1e-7);
        }
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(RadialConfig::new(4, 1.0).is_err());
        assert!(RadialConfig::new(3, 0.0).is_err());
        assert!(integrate(0.9, 1.0, 0.1, &cfg(3, 1.0)).is_err());
    }
}
