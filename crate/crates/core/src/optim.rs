//! Budgeted unconstrained minimizers: adaptive Nelder-Mead, a COBYLA-style
//! linear-model trust region, and forward-difference BFGS with Armijo
//! backtracking.
//!
//! All three draw evaluations through an [`Evaluator`], which enforces the
//! evaluation budget, tracks the best point and detects stagnation.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    NelderMead,
    Cobyla,
    #[serde(rename = "gradient")]
    FiniteDiffGradientDescent,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 3] = [
        OptimizerKind::NelderMead,
        OptimizerKind::Cobyla,
        OptimizerKind::FiniteDiffGradientDescent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::NelderMead => "nelder-mead",
            OptimizerKind::Cobyla => "cobyla",
            OptimizerKind::FiniteDiffGradientDescent => "gradient",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "nelder-mead" | "neldermead" | "nm" => Ok(OptimizerKind::NelderMead),
            "cobyla" => Ok(OptimizerKind::Cobyla),
            "gradient" | "fd-gradient" | "slsqp" | "bfgs" => Ok(OptimizerKind::FiniteDiffGradientDescent),
            other => Err(Error::Parse(format!(
                "unknown optimizer '{other}' (expected nelder-mead|cobyla|gradient)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub budget: usize,
    pub tol: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(kind: OptimizerKind, budget: usize, seed: u64) -> Self {
        Self {
            kind,
            budget,
            tol: 1e-9,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Budget- and stagnation-aware wrapper around the objective.
pub struct Evaluator<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> f64,
    budget: usize,
    evals: usize,
    window: usize,
    tol: f64,
    recent: VecDeque<f64>,
    best_x: Vec<f64>,
    best_f: f64,
    converged: bool,
}

impl<'a> Evaluator<'a> {
    /// Stops once `budget` evaluations are spent or the last `window`
    /// values all lie within `tol` of each other.
    pub fn new(f: &'a mut dyn FnMut(&[f64]) -> f64, budget: usize, window: usize, tol: f64) -> Self {
        Self {
            f,
            budget,
            evals: 0,
            window: window.max(2),
            tol,
            recent: VecDeque::new(),
            best_x: Vec::new(),
            best_f: f64::INFINITY,
            converged: false,
        }
    }

    pub fn done(&self) -> bool {
        self.converged || self.evals >= self.budget
    }

    pub fn evaluations(&self) -> usize {
        self.evals
    }

    pub fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.done() {
            return None;
        }
        let v = (self.f)(x);
        self.evals += 1;
        if v < self.best_f || self.best_x.is_empty() {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        self.recent.push_back(v);
        if self.recent.len() > self.window {
            self.recent.pop_front();
        }
        if self.recent.len() == self.window {
            let (lo, hi) = self
                .recent
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &e| (l.min(e), h.max(e)));
            if hi - lo < self.tol {
                self.converged = true;
            }
        }
        Some(v)
    }

    pub fn mark_converged(&mut self) {
        self.converged = true;
    }

    pub fn finish(self) -> OptimResult {
        OptimResult {
            x: self.best_x,
            fx: self.best_f,
            evaluations: self.evals,
            converged: self.converged,
        }
    }
}

pub fn minimize(kind: OptimizerKind, ev: &mut Evaluator<'_>, x0: &[f64]) {
    match kind {
        OptimizerKind::NelderMead => nelder_mead(ev, x0, 0.5),
        OptimizerKind::Cobyla => cobyla(ev, x0, 0.5, 1e-8),
        OptimizerKind::FiniteDiffGradientDescent => fd_bfgs(ev, x0),
    }
}

/// Nelder-Mead with dimension-adaptive coefficients.
pub fn nelder_mead(ev: &mut Evaluator<'_>, x0: &[f64], step: f64) {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf.max(2.0);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(f0) = ev.eval(x0) else { return };
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let Some(f) = ev.eval(&x) else { return };
        simplex.push((x, f));
    }

    let point =
        |c: &[f64], w: &[f64], t: f64| -> Vec<f64> { c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect() };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if spread.abs() < 1e-15 && diameter < 1e-12 {
            ev.mark_converged();
            return;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let worst = simplex[n].0.clone();
        let xr = point(&centroid, &worst, -alpha);
        let Some(fr) = ev.eval(&xr) else { return };

        if fr < simplex[0].1 {
            let xe = point(&centroid, &worst, -alpha * gamma);
            let Some(fe) = ev.eval(&xe) else { return };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = point(&centroid, &xr, rho);
            let Some(fc) = ev.eval(&xc) else { return };
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst, rho);
            let Some(fc) = ev.eval(&xc) else { return };
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let xs = point(&best, &entry.0, sigma);
            let Some(fs) = ev.eval(&xs) else { return };
            *entry = (xs, fs);
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Derivative-free trust region on a linear interpolation model through
/// n + 1 points, with radius halving when the model stops predicting descent.
pub fn cobyla(ev: &mut Evaluator<'_>, x0: &[f64], rho_beg: f64, rho_end: f64) {
    let n = x0.len();
    let mut rho = rho_beg;
    let Some(mut f0) = ev.eval(x0) else { return };
    let mut base = x0.to_vec();

    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
    let reseed = |ev: &mut Evaluator<'_>, base: &[f64], rho: f64, pts: &mut Vec<(Vec<f64>, f64)>| -> bool {
        pts.clear();
        for i in 0..n {
            let mut x = base.to_vec();
            x[i] += rho;
            let Some(f) = ev.eval(&x) else { return false };
            pts.push((x, f));
        }
        true
    };
    if !reseed(ev, &base, rho, &mut pts) {
        return;
    }

    loop {
        if rho < rho_end {
            ev.mark_converged();
            return;
        }
        let d = DMatrix::from_fn(n, n, |i, j| pts[i].0[j] - base[j]);
        let df = DVector::from_fn(n, |i, _| pts[i].1 - f0);
        let g = match d.lu().solve(&df) {
            Some(g) if g.iter().all(|v| v.is_finite()) => g,
            _ => {
                if !reseed(ev, &base, rho, &mut pts) {
                    return;
                }
                continue;
            }
        };
        let gnorm = g.norm();
        if gnorm == 0.0 {
            rho *= 0.5;
            if !reseed(ev, &base, rho, &mut pts) {
                return;
            }
            continue;
        }
        let trial: Vec<f64> = base.iter().zip(g.iter()).map(|(b, gi)| b - rho * gi / gnorm).collect();
        let cached = pts
            .iter()
            .find(|(x, _)| distance(x, &trial) <= 1e-14 * (1.0 + trial.iter().map(|v| v.abs()).sum::<f64>()))
            .map(|(_, f)| *f);
        let ft = match cached {
            Some(f) => f,
            None => {
                let Some(f) = ev.eval(&trial) else { return };
                f
            }
        };
        let predicted = rho * gnorm;
        let ratio = (f0 - ft) / predicted;

        let far = (0..n)
            .max_by(|&a, &b| distance(&pts[a].0, &base).total_cmp(&distance(&pts[b].0, &base)))
            .expect("n >= 1");
        if ft < f0 {
            let old = (std::mem::replace(&mut base, trial), f0);
            f0 = ft;
            let far_new = (0..n)
                .max_by(|&a, &b| distance(&pts[a].0, &base).total_cmp(&distance(&pts[b].0, &base)))
                .expect("n >= 1");
            pts[far_new] = old;
            if ratio >= 0.1 {
                continue;
            }
        } else if distance(&trial, &base) < distance(&pts[far].0, &base) {
            pts[far] = (trial, ft);
        }

        let far = (0..n)
            .max_by(|&a, &b| distance(&pts[a].0, &base).total_cmp(&distance(&pts[b].0, &base)))
            .expect("n >= 1");
        if distance(&pts[far].0, &base) > 2.0 * rho {
            let mut x = base.clone();
            x[far] += rho;
            let Some(f) = ev.eval(&x) else { return };
            pts[far] = (x, f);
        } else {
            rho *= 0.5;
        }
    }
}

/// Forward-difference gradient with step h = 1e-6·(1 + |θᵢ|).
fn fd_gradient(ev: &mut Evaluator<'_>, x: &[f64], fx: f64) -> Option<DVector<f64>> {
    let mut g = DVector::zeros(x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let f = ev.eval(&xp)?;
        g[i] = (f - fx) / h;
        xp[i] = x[i];
    }
    Some(g)
}

/// Quasi-Newton descent on finite-difference gradients: BFGS inverse-Hessian
/// directions with Armijo backtracking, resetting to steepest descent when the
/// direction fails.
pub fn fd_bfgs(ev: &mut Evaluator<'_>, x0: &[f64]) {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let Some(mut fx) = ev.eval(x.as_slice()) else { return };
    let Some(mut g) = fd_gradient(ev, x.as_slice(), fx) else {
        return;
    };
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;

    loop {
        if g.norm() < 1e-10 {
            ev.mark_converged();
            return;
        }
        let mut dir = -(&hinv * &g);
        let mut slope = g.dot(&dir);
        if slope >= 0.0 {
            hinv = DMatrix::identity(n, n);
            dir = -g.clone();
            slope = g.dot(&dir);
            fresh = true;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xt = &x + &dir * step;
            let Some(ft) = ev.eval(xt.as_slice()) else { return };
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((xt, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            if fresh {
                ev.mark_converged();
                return;
            }
            hinv = DMatrix::identity(n, n);
            fresh = true;
            continue;
        };
        let Some(gn) = fd_gradient(ev, xn.as_slice(), fnew) else {
            return;
        };
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        x = xn;
        fx = fnew;
        g = gn;
        fresh = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(x: &[f64]) -> f64 {
        x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum()
    }

    fn run(kind: OptimizerKind, n: usize, budget: usize) -> OptimResult {
        let mut f = |x: &[f64]| quadratic(x);
        let mut ev = Evaluator::new(&mut f, budget, 2 * n, 1e-12);
        minimize(kind, &mut ev, &vec![-0.7; n]);
        ev.finish()
    }

    #[test]
    fn every_optimizer_solves_the_convex_quadratic() {
        for kind in OptimizerKind::ALL {
            for n in [1, 4, 8] {
                let r = run(kind, n, 4000);
                assert!(r.fx <= 1e-6, "{kind} n={n}: f={} after {}", r.fx, r.evaluations);
            }
        }
    }

    #[test]
    fn budget_is_respected() {
        for kind in OptimizerKind::ALL {
            let r = run(kind, 6, 17);
            assert!(r.evaluations <= 17);
            assert!(!r.converged);
        }
    }

    #[test]
    fn rosenbrock_nelder_mead() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let mut ev = Evaluator::new(&mut f, 5000, 4, 1e-14);
        nelder_mead(&mut ev, &[-1.2, 1.0], 0.5);
        let r = ev.finish();
        assert!(r.fx < 1e-8, "{}", r.fx);
    }

    #[test]
    fn stagnation_window_stops_early() {
        let mut f = |_: &[f64]| 3.0;
        let mut ev = Evaluator::new(&mut f, 1000, 5, 1e-9);
        for _ in 0..5 {
            ev.eval(&[0.0]);
        }
        assert!(ev.done());
        assert!(ev.finish().converged);
    }

    #[test]
    fn names_parse() {
        for k in OptimizerKind::ALL {
            assert_eq!(k.name().parse::<OptimizerKind>().unwrap(), k);
        }
        assert_eq!(
            "slsqp".parse::<OptimizerKind>().unwrap(),
            OptimizerKind::FiniteDiffGradientDescent
        );
        assert!("adam".parse::<OptimizerKind>().is_err());
    }
}
