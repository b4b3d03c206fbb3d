//! Wheeler-DeWitt special functions, analytic proper-time kernels, the
//! flat-space Green's function by quadrature, and zero-energy ODE solutions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::g17;
use crate::models::{minisuperspace_potential, MinisuperspaceKind, MinisuperspaceParams};
use crate::operator::C64;
use crate::quad::{integrate, integrate_complex, integrate_panels, QuadOptions};

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("argument must be positive, got {x}")));
    }
    Ok(())
}

/// ∫₀^∞ e^{−x cosh t} cos(νt) dt, truncated where the integrand falls
/// below e^{−x−40}.
fn bessel_k_integral(nu: f64, x: f64) -> Result<f64> {
    check_positive(x)?;
    let t_max = (1.0 + 40.0 / x).acosh();
    let scale = (-x).exp();
    let opts = QuadOptions {
        abs_tol: 1e-15 * scale,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    integrate(|t| (-x * t.cosh()).exp() * (nu * t).cos(), 0.0, t_max, opts)
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    bessel_k_integral(0.0, x)
}

/// K_{iν}(x) for real ν; real-valued.
pub fn bessel_k_imag_order(nu: f64, x: f64) -> Result<f64> {
    bessel_k_integral(nu, x)
}

/// (2πiτ)^{−1/2} on the principal branch.
fn free_prefactor(tau: C64) -> C64 {
    (C64::new(0.0, 2.0 * PI) * tau).sqrt().inv()
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

pub fn free_kernel(y: f64, y_prime: f64, tau: f64) -> Result<C64> {
    check_tau(tau)?;
    Ok(free_kernel_complex(C64::new(y, 0.0), C64::new(y_prime, 0.0), tau))
}

/// Analytic continuation to complex positions.
pub fn free_kernel_complex(y: C64, yp: C64, tau: f64) -> C64 {
    let d = y - yp;
    free_prefactor(C64::new(tau, 0.0)) * (C64::i() * d * d / (2.0 * tau)).exp()
}

pub fn inverted_oscillator_kernel(y: f64, y_prime: f64, tau: f64, omega: f64) -> Result<C64> {
    check_tau(tau)?;
    if (omega * tau).sinh() == 0.0 {
        return Err(Error::Domain("sinh(omega tau) vanishes".into()));
    }
    Ok(inverted_oscillator_kernel_complex(
        C64::new(y, 0.0),
        C64::new(y_prime, 0.0),
        tau,
        omega,
    ))
}

pub fn inverted_oscillator_kernel_complex(y: C64, yp: C64, tau: f64, omega: f64) -> C64 {
    let sh = (omega * tau).sinh();
    let ch = (omega * tau).cosh();
    let pre = (C64::new(omega, 0.0) / (C64::new(0.0, 2.0 * PI) * sh)).sqrt();
    let phase = C64::new(0.0, omega / (2.0 * sh)) * ((y * y + yp * yp) * ch - 2.0 * y * yp);
    pre * phase.exp()
}

/// Kernel of H = P²/2 − f x.
pub fn inverted_linear_kernel(x: f64, x_prime: f64, tau: f64, f: f64) -> Result<C64> {
    check_tau(tau)?;
    Ok(inverted_linear_kernel_complex(
        C64::new(x, 0.0),
        C64::new(x_prime, 0.0),
        tau,
        f,
    ))
}

pub fn inverted_linear_kernel_complex(x: C64, xp: C64, tau: f64, f: f64) -> C64 {
    let d = x - xp;
    let phase = d * d / (2.0 * tau) + f * tau * (x + xp) / 2.0 - f * f * tau.powi(3) / 24.0;
    free_prefactor(C64::new(tau, 0.0)) * (C64::i() * phase).exp()
}

pub const DEFAULT_GREENS_EPS: f64 = 1e-3;

/// G(T, X) = (1/4π) ∫₀^∞ (dτ/τ) e^{−iΛτ} e^{i(X²−T²)/(4τ)}.
///
/// The integral is taken along rays τ = t(1 + iσ) with |σ| = `eps`: near the
/// origin the tilt sign damps e^{is/4τ}, at large t it damps e^{−iΛτ}, and
/// a vertical segment joins the two rays.
pub fn flat_greens_quadrature(t: f64, x: f64, lambda: f64, eps: f64) -> Result<C64> {
    if t == 0.0 && x == 0.0 {
        return Err(Error::Domain("coincident points".into()));
    }
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 0.1], got {eps}")));
    }
    let s = x * x - t * t;
    if s.abs() <= 1e-12 * (x * x + t * t) {
        return Err(Error::NoConvergence(
            "null separation: the proper-time integral diverges".into(),
        ));
    }
    if lambda == 0.0 {
        return Err(Error::NoConvergence(
            "Lambda = 0: the proper-time integral diverges".into(),
        ));
    }
    let g = |tau: C64| -> C64 { (C64::new(0.0, -lambda) * tau + C64::new(0.0, s / 4.0) / tau).exp() };
    let sigma_near = -s.signum() * eps;
    let sigma_far = -lambda.signum() * eps;
    let t_join = (s.abs() / (4.0 * lambda.abs())).sqrt();
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_intervals: 2000,
    };
    let cutoff = 40.0;

    // Near ray in u = 1/t: dτ/τ = −du/u, damping e^{−|s| ε u/4}.
    let near_dir = C64::new(1.0, sigma_near);
    let u0 = 1.0 / t_join;
    let u1 = u0 + cutoff * 4.0 / (s.abs() * eps);
    let u_period = 8.0 * PI / s.abs();
    let near = integrate_panels(|u| g(near_dir / u) / u, u0, u1, u_period, opts)?;

    let segment = integrate_complex(
        |y| {
            let tau = C64::new(t_join, y);
            g(tau) / tau * C64::i()
        },
        t_join * sigma_near,
        t_join * sigma_far,
        opts,
    )?;

    let far_dir = C64::new(1.0, sigma_far);
    let t1 = t_join + cutoff / (lambda.abs() * eps);
    let t_period = 2.0 * PI / lambda.abs();
    let far = integrate_panels(|tt| g(far_dir * tt) / tt, t_join, t1, t_period, opts)?;

    Ok((near + segment + far) / (4.0 * PI))
}

/// Closed form (1/2π) K₀(√(Λ s)) on the spacelike side s = X² − T² > 0.
pub fn flat_greens_spacelike(t: f64, x: f64, lambda: f64) -> Result<f64> {
    let s = x * x - t * t;
    check_positive(s)?;
    check_positive(lambda)?;
    Ok(bessel_k0((lambda * s).sqrt())? / (2.0 * PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPair {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
}

pub fn bogoliubov_coeffs(k: f64) -> Result<BogoliubovPair> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("mode number must be positive, got {k}")));
    }
    let q = (-2.0 * PI * k).exp();
    let d = -(-2.0 * PI * k).exp_m1();
    Ok(BogoliubovPair {
        alpha: (1.0 / d).sqrt(),
        beta: (q / d).sqrt(),
        k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WdwSolution {
    pub grid: Vec<f64>,
    pub psi: Vec<C64>,
    pub v_eff: Vec<f64>,
    pub p_phi: f64,
    /// Max |ψ″ − Wψ| by centered differences on the integration grid,
    /// relative to max(1, max |Wψ|).
    pub residual: f64,
}

impl WdwSolution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re_psi,im_psi,V_eff\n");
        for ((x, p), v) in self.grid.iter().zip(&self.psi).zip(&self.v_eff) {
            out.push_str(&format!("{},{},{},{}\n", g17(*x), g17(p.re), g17(p.im), g17(*v)));
        }
        out
    }

    /// Abscissae where Re ψ changes sign, by linear interpolation.
    pub fn zeros(&self) -> Vec<f64> {
        self.grid
            .windows(2)
            .zip(self.psi.windows(2))
            .filter(|(_, p)| p[0].re.signum() != p[1].re.signum() && p[0].re != 0.0)
            .map(|(x, p)| x[0] + (x[1] - x[0]) * p[0].re / (p[0].re - p[1].re))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeOptions {
    /// Target product of step and local wavenumber √|W|.
    pub phase_step: f64,
    pub min_steps: usize,
    pub max_steps: usize,
    /// Upper bound on stored output samples.
    pub max_output: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            phase_step: 0.004,
            min_steps: 4000,
            max_steps: 20_000_000,
            max_output: 4001,
        }
    }
}

/// Solves ψ″ = W(x)ψ on `domain` with RK4 from (ψ, ψ′) at the left edge.
/// `v_eff` is only sampled for output.
pub fn solve_linear_ode(
    w: impl Fn(f64) -> f64,
    v_eff: impl Fn(f64) -> f64,
    domain: (f64, f64),
    init: (C64, C64),
    opts: OdeOptions,
) -> Result<(Vec<f64>, Vec<C64>, Vec<f64>, f64)> {
    let (x0, x1) = domain;
    if !(x1 > x0) {
        return Err(Error::InvalidArgument(format!("empty domain [{x0}, {x1}]")));
    }
    if !(init.0.re.is_finite() && init.0.im.is_finite() && init.1.re.is_finite() && init.1.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite initial data".into()));
    }
    let probe = 2048;
    let mut kmax = 0.0f64;
    for i in 0..=probe {
        let x = x0 + (x1 - x0) * i as f64 / probe as f64;
        let wx = w(x);
        if !wx.is_finite() {
            return Err(Error::DomainTruncation {
                safe_bound: safe_bound(&w, x0, x),
            });
        }
        kmax = kmax.max(wx.abs().sqrt());
    }
    let wanted = ((x1 - x0) * kmax / opts.phase_step).ceil() as usize;
    if wanted > opts.max_steps {
        let bound = bisect_bound(x0, x1, |b| {
            let k = (0..=probe)
                .map(|i| w(x0 + (b - x0) * i as f64 / probe as f64).abs().sqrt())
                .fold(0.0f64, f64::max);
            (b - x0) * k / opts.phase_step <= opts.max_steps as f64
        });
        return Err(Error::DomainTruncation { safe_bound: bound });
    }
    let n = wanted.max(opts.min_steps);
    let h = (x1 - x0) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| x0 + h * i as f64).collect();
    let mut psi = Vec::with_capacity(n + 1);
    let (mut y, mut dy) = init;
    psi.push(y);
    for i in 0..n {
        let x = xs[i];
        let (wa, wm, wb) = (w(x), w(x + 0.5 * h), w(x + h));
        let k1 = (dy, y * wa);
        let k2 = (dy + 0.5 * h * k1.1, (y + 0.5 * h * k1.0) * wm);
        let k3 = (dy + 0.5 * h * k2.1, (y + 0.5 * h * k2.0) * wm);
        let k4 = (dy + h * k3.1, (y + h * k3.0) * wb);
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        dy += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !(y.re.is_finite() && y.im.is_finite() && y.norm() < 1e150) {
            return Err(Error::DomainTruncation { safe_bound: x });
        }
        psi.push(y);
    }
    let mut res = 0.0f64;
    let mut scale = 1.0f64;
    for i in 1..n {
        let wpsi = psi[i] * w(xs[i]);
        let d2 = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h * h);
        res = res.max((d2 - wpsi).norm());
        scale = scale.max(wpsi.norm());
    }
    let stride = n.div_ceil(opts.max_output.max(2) - 1).max(1);
    let mut grid = Vec::new();
    let mut out = Vec::new();
    for i in (0..=n).step_by(stride) {
        grid.push(xs[i]);
        out.push(psi[i]);
    }
    if *grid.last().unwrap() != xs[n] {
        grid.push(xs[n]);
        out.push(psi[n]);
    }
    let v = grid.iter().map(|&x| v_eff(x)).collect();
    Ok((grid, out, v, res / scale))
}

fn safe_bound(w: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    bisect_bound(lo, hi, |b| w(b).is_finite())
}

/// Largest b in [lo, hi] with ok(b), assuming ok is monotone.
fn bisect_bound(lo: f64, hi: f64, ok: impl Fn(f64) -> bool) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if ok(m) {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

/// Zero-energy Wheeler-DeWitt equation ψ″ = 2 V_eff ψ for one kind.
pub fn wdw_solve_ode(
    kind: MinisuperspaceKind,
    params: &MinisuperspaceParams,
    domain: (f64, f64),
    init: (C64, C64),
    opts: OdeOptions,
) -> Result<WdwSolution> {
    if kind.singular_at_origin() && domain.0 <= 0.0 && domain.1 >= 0.0 {
        return Err(Error::Domain(format!("{kind} is singular at x = 0")));
    }
    let p = *params;
    let v = move |x: f64| minisuperspace_potential(kind, &p, x);
    let (grid, psi, v_eff, residual) = solve_linear_ode(|x| 2.0 * v(x), v, domain, init, opts)?;
    Ok(WdwSolution {
        grid,
        psi,
        v_eff,
        p_phi: params.p_phi,
        residual,
    })
}
