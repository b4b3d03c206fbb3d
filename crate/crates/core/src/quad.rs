//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.

use crate::error::{Error, Result};
use crate::operator::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).norm();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NoConvergence(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Segment { a, b, value, error })
}

/// ∫_a^b f for complex-valued f.
pub fn integrate_complex<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut segs = vec![gk15(&mut f, a, b)?];
    loop {
        let total: C64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
            return Ok(total);
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::NoConvergence(format!(
                "error estimate {err:.3e} after {} subintervals on [{a}, {b}]",
                segs.len()
            )));
        }
        let (worst, _) = segs.iter().enumerate().fold(
            (0, -1.0),
            |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc },
        );
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        segs.push(gk15(&mut f, s.a, m)?);
        segs.push(gk15(&mut f, m, s.b)?);
    }
}

pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    integrate_complex(|x| C64::new(f(x), 0.0), a, b, opts).map(|z| z.re)
}

/// ∫_a^b f as a sum over consecutive panels of width `panel`, each
/// integrated adaptively; suited to long oscillatory ranges.
pub fn integrate_panels<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, panel: f64, opts: QuadOptions) -> Result<C64> {
    if !(panel > 0.0) {
        return Err(Error::InvalidArgument("panel width must be positive".into()));
    }
    let n = ((b - a) / panel).ceil().max(1.0) as usize;
    let width = (b - a) / n as f64;
    let mut total = C64::new(0.0, 0.0);
    for i in 0..n {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == n { b } else { lo + width };
        total += integrate_complex(&mut f, lo, hi, opts)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate(|x| (-x * x).exp(), -10.0, 10.0, QuadOptions::default()).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x| x.sqrt().recip(), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn complex_oscillation() {
        let v = integrate_panels(|x| C64::new(0.0, 3.0 * x).exp(), 0.0, 10.0, 1.0, QuadOptions::default()).unwrap();
        let exact = (C64::new(0.0, 30.0).exp() - 1.0) / C64::new(0.0, 3.0);
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn non_finite_reported() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, QuadOptions::default());
        assert!(matches!(r, Err(Error::NoConvergence(_))));
    }

    #[test]
    fn reversed_limits_negate() {
        let o = QuadOptions::default();
        let a = integrate(f64::sin, 0.0, 2.0, o).unwrap();
        let b = integrate(f64::sin, 2.0, 0.0, o).unwrap();
        assert!((a + b).abs() < 1e-15);
    }
}
