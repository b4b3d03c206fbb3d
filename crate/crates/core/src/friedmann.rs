//! Classical Friedmann–scalar-field evolution in cosmic time (lapse N = 1).
//!
//! The state (a, ȧ, φ, φ̇) is advanced with fixed-step RK4 using the
//! acceleration and Klein-Gordon equations; the first Friedmann equation is
//! kept as a constraint and monitored along the trajectory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::PotentialFn;

pub const INITIAL_CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FriedmannInitial {
    pub a0: f64,
    pub phi0: f64,
    pub phidot0: f64,
    /// Initial expansion rate; the positive root of the constraint when `None`.
    pub adot0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FriedmannPoint {
    pub t: f64,
    pub a: f64,
    pub adot: f64,
    pub phi: f64,
    pub phidot: f64,
    /// 3ȧ²/a² + 3k/a² − Λ − φ̇²/2 − V(φ).
    pub constraint: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FriedmannTrajectory {
    pub points: Vec<FriedmannPoint>,
}

impl FriedmannTrajectory {
    pub fn max_constraint_residual(&self) -> f64 {
        self.points.iter().fold(0.0f64, |acc, p| acc.max(p.constraint.abs()))
    }
}

fn constraint(v: &PotentialFn, lambda: f64, k: f64, s: [f64; 4]) -> f64 {
    let [a, adot, phi, phidot] = s;
    3.0 * adot * adot / (a * a) + 3.0 * k / (a * a) - lambda - 0.5 * phidot * phidot - v.value(phi)
}

fn rhs(v: &PotentialFn, lambda: f64, k: f64, s: [f64; 4]) -> [f64; 4] {
    let [a, adot, phi, phidot] = s;
    let h = adot / a;
    let addot = a * 0.5 * (-h * h - k / (a * a) + lambda - 0.5 * phidot * phidot + v.value(phi));
    let phiddot = -3.0 * h * phidot - v.derivative(phi);
    [adot, addot, phidot, phiddot]
}

fn axpy(s: [f64; 4], h: f64, d: [f64; 4]) -> [f64; 4] {
    [s[0] + h * d[0], s[1] + h * d[1], s[2] + h * d[2], s[3] + h * d[3]]
}

pub fn friedmann_evolve(
    v: &PotentialFn,
    init: FriedmannInitial,
    lambda: f64,
    k: f64,
    t_span: (f64, f64),
    dt: f64,
) -> Result<FriedmannTrajectory> {
    if !(init.a0 > 0.0) {
        return Err(Error::InvalidArgument(format!("a0 must be positive, got {}", init.a0)));
    }
    if !(dt > 0.0) || !(t_span.1 >= t_span.0) {
        return Err(Error::InvalidArgument("need dt > 0 and t_end >= t_start".into()));
    }
    let a0 = init.a0;
    let radicand = a0 * a0 * (lambda + 0.5 * init.phidot0 * init.phidot0 + v.value(init.phi0)) / 3.0 - k;
    let adot0 = match init.adot0 {
        Some(adot) => {
            let s = [a0, adot, init.phi0, init.phidot0];
            let residual = constraint(v, lambda, k, s);
            if residual.abs() > INITIAL_CONSTRAINT_TOL {
                return Err(Error::InconsistentInitialData { residual });
            }
            adot
        }
        None => {
            if radicand < 0.0 {
                return Err(Error::Domain(format!(
                    "negative expansion radicand {radicand:.6e} at t = {}",
                    t_span.0
                )));
            }
            radicand.sqrt()
        }
    };

    let mut s = [a0, adot0, init.phi0, init.phidot0];
    let steps = ((t_span.1 - t_span.0) / dt).round() as usize;
    let mut points = Vec::with_capacity(steps + 1);
    let record = |t: f64, s: [f64; 4]| FriedmannPoint {
        t,
        a: s[0],
        adot: s[1],
        phi: s[2],
        phidot: s[3],
        constraint: constraint(v, lambda, k, s),
    };
    points.push(record(t_span.0, s));
    for i in 0..steps {
        let k1 = rhs(v, lambda, k, s);
        let k2 = rhs(v, lambda, k, axpy(s, dt / 2.0, k1));
        let k3 = rhs(v, lambda, k, axpy(s, dt / 2.0, k2));
        let k4 = rhs(v, lambda, k, axpy(s, dt, k3));
        for j in 0..4 {
            s[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !s.iter().all(|x| x.is_finite()) || s[0] <= 0.0 {
            return Err(Error::Domain(format!(
                "trajectory left the physical region at t = {}",
                t_span.0 + (i + 1) as f64 * dt
            )));
        }
        points.push(record(t_span.0 + (i + 1) as f64 * dt, s));
    }
    Ok(FriedmannTrajectory { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{starobinsky_potential, StarobinskyParams};

    fn init(a0: f64, phi0: f64, phidot0: f64) -> FriedmannInitial {
        FriedmannInitial {
            a0,
            phi0,
            phidot0,
            adot0: None,
        }
    }

    #[test]
    fn de_sitter_growth() {
        let lambda = 0.3;
        let traj = friedmann_evolve(&PotentialFn::zero(), init(1.0, 0.0, 0.0), lambda, 0.0, (0.0, 5.0), 1e-3).unwrap();
        let h = (lambda / 3.0).sqrt();
        for p in traj.points.iter().step_by(500) {
            let exact = (h * p.t).exp();
            assert!(
                (p.a - exact).abs() <= 1e-6 * exact,
                "t={} a={} exact={}",
                p.t,
                p.a,
                exact
            );
        }
        assert!(traj.max_constraint_residual() <= 1e-6);
    }

    #[test]
    fn static_universe() {
        let traj = friedmann_evolve(&PotentialFn::zero(), init(2.0, 0.0, 0.0), 0.0, 0.0, (0.0, 3.0), 0.01).unwrap();
        assert!(traj.points.iter().all(|p| p.a == 2.0));
    }

    #[test]
    fn inconsistent_initial_rate_rejected() {
        let bad = FriedmannInitial {
            adot0: Some(1.0),
            ..init(1.0, 0.0, 0.0)
        };
        let err = friedmann_evolve(&PotentialFn::zero(), bad, 0.3, 0.0, (0.0, 1.0), 0.01).unwrap_err();
        assert!(matches!(err, Error::InconsistentInitialData { .. }));
    }

    #[test]
    fn closed_universe_without_sources_is_imaginary() {
        let err = friedmann_evolve(&PotentialFn::zero(), init(1.0, 0.0, 0.0), 0.0, 1.0, (0.0, 1.0), 0.01).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn starobinsky_roll_and_oscillation() {
        let v = starobinsky_potential(&StarobinskyParams::default());
        let traj = friedmann_evolve(&v, init(1.0, -12.0, 0.0), 0.0, 0.0, (0.0, 60.0), 1e-3).unwrap();
        assert!(traj.max_constraint_residual() <= 1e-6);
        let phis: Vec<f64> = traj.points.iter().map(|p| p.phi).collect();
        let first_cross = phis.iter().position(|&p| p >= 0.0).expect("reaches the minimum");
        assert!(phis[..first_cross].windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let tail = &phis[first_cross..];
        let crossings = tail.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        assert!(crossings >= 3, "crossings {crossings}");
        let early = tail[..tail.len() / 4].iter().fold(0.0f64, |m, p| m.max(p.abs()));
        let late = tail[3 * tail.len() / 4..].iter().fold(0.0f64, |m, p| m.max(p.abs()));
        assert!(late < early);
    }
}
