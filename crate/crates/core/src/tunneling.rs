//! Metastable-minimum expansion, thin-wall tunneling action and lifetime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::PotentialFn;

pub const DERIVATIVE_STEP: f64 = 1e-3;
/// Base step for the third derivative, which is Richardson-extrapolated
/// from this step and its double.
pub const THIRD_DERIVATIVE_STEP: f64 = 1e-2;
pub const PLANCK_TIME_S: f64 = 5.391e-44;
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86400.0;

/// V(φ) ≈ V_min + (M²/2)x² − (δ/3)x³ with x = φ − φ_min.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicExpansion {
    pub phi_min: f64,
    #[serde(rename = "V_min")]
    pub v_min: f64,
    #[serde(rename = "M_sq")]
    pub m_sq: f64,
    pub delta: f64,
    /// Max deviation of the cubic from V at x = ±0.1.
    pub fit_residual: f64,
}

fn second_derivative(v: &PotentialFn, x: f64, h: f64) -> f64 {
    let f = |d: f64| v.value(x + d);
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

fn third_derivative(v: &PotentialFn, x: f64, h: f64) -> f64 {
    let f = |d: f64| v.value(x + d);
    (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h)
}

fn golden_section(v: &PotentialFn, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (v.value(c), v.value(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = v.value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = v.value(d);
        }
    }
    0.5 * (a + b)
}

/// Locates the minimum in [guess − half_width, guess + half_width] and
/// expands V about it.
pub fn expand_about_minimum(v: &PotentialFn, guess: f64, half_width: f64) -> Result<CubicExpansion> {
    let (lo, hi) = (guess - half_width, guess + half_width);
    let mut phi = golden_section(v, lo, hi, 1e-10);
    // Newton polish on V′ where golden section stalls at √ε in V.
    for _ in 0..3 {
        let d2 = second_derivative(v, phi, DERIVATIVE_STEP);
        if !(d2 > 0.0) {
            break;
        }
        let step = v.derivative_with_step(phi, DERIVATIVE_STEP) / d2;
        if step.abs() > 1e-3 {
            break;
        }
        phi -= step;
    }
    let edge = 1e-6 * half_width.max(1.0);
    if phi - lo < edge || hi - phi < edge {
        return Err(Error::NoMinimum { lo, hi });
    }
    let m_sq = second_derivative(v, phi, DERIVATIVE_STEP);
    if !(m_sq > 0.0) {
        return Err(Error::NoMinimum { lo, hi });
    }
    let h3 = THIRD_DERIVATIVE_STEP;
    let d3 = (4.0 * third_derivative(v, phi, h3) - third_derivative(v, phi, 2.0 * h3)) / 3.0;
    let delta = -d3 / 2.0;
    let v_min = v.value(phi);
    let cubic = |x: f64| v_min + 0.5 * m_sq * x * x - delta / 3.0 * x * x * x;
    let fit_residual = [-0.1, 0.1]
        .iter()
        .map(|&x| (v.value(phi + x) - cubic(x)).abs())
        .fold(0.0, f64::max);
    Ok(CubicExpansion {
        phi_min: phi,
        v_min,
        m_sq,
        delta,
        fit_residual,
    })
}

/// Thin-wall estimate S_E = 205 M²/δ².
pub fn tunneling_action(e: &CubicExpansion) -> Result<f64> {
    action_from(e.m_sq, e.delta)
}

pub fn action_from(m_sq: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::NoBarrier);
    }
    Ok(205.0 * m_sq / (delta * delta))
}

/// Lifetime e^{S_E/4} in Planck times, kept in log₁₀ form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lifetime {
    pub log10_planck: f64,
    /// m with lifetime = m × 10^exponent Planck times.
    pub mantissa: f64,
    pub exponent: i64,
    pub log10_years: f64,
}

pub fn lifetime_log10(s_e: f64) -> Result<Lifetime> {
    if !(s_e >= 0.0) {
        return Err(Error::Domain(format!("action must be non-negative, got {s_e}")));
    }
    let log10_planck = s_e / 4.0 * std::f64::consts::LOG10_E;
    let exponent = log10_planck.floor();
    Ok(Lifetime {
        log10_planck,
        mantissa: 10f64.powf(log10_planck - exponent),
        exponent: exponent as i64,
        log10_years: log10_planck + (PLANCK_TIME_S / SECONDS_PER_YEAR).log10(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunnelingReport {
    pub phi_min: f64,
    #[serde(rename = "V_min")]
    pub v_min: f64,
    #[serde(rename = "M_sq")]
    pub m_sq: f64,
    pub delta: f64,
    #[serde(rename = "S_E")]
    pub s_e: f64,
    #[serde(rename = "S_E_over_4")]
    pub s_e_over_4: f64,
    pub log10_lifetime_planck: f64,
    pub log10_lifetime_years: f64,
}

pub fn tunneling_report(v: &PotentialFn, guess: f64, half_width: f64) -> Result<TunnelingReport> {
    let e = expand_about_minimum(v, guess, half_width)?;
    let s_e = tunneling_action(&e)?;
    let life = lifetime_log10(s_e)?;
    Ok(TunnelingReport {
        phi_min: e.phi_min,
        v_min: e.v_min,
        m_sq: e.m_sq,
        delta: e.delta,
        s_e,
        s_e_over_4: s_e / 4.0,
        log10_lifetime_planck: life.log10_planck,
        log10_lifetime_years: life.log10_years,
    })
}
