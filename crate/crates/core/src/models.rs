//! Model Hamiltonians and classical potentials.
//!
//! Every Hamiltonian is built from the truncated operators of
//! [`crate::operator`] and returned Hermitian-projected.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    apply_joint_function, apply_scalar_function, build_momentum, build_momentum_squared, build_position, lift_to_mode,
    BasisKind, BosonRegister, DiscreteOperator,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarobinskyParams {
    #[serde(rename = "M1_4")]
    pub m1_4: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
}

impl Default for StarobinskyParams {
    fn default() -> Self {
        Self {
            m1_4: 29.167,
            m2: 7.638,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DarkEnergyParams {
    #[serde(rename = "Q4_sq")]
    pub q4_sq: f64,
    pub k: f64,
    pub c: f64,
    #[serde(rename = "Lambda8")]
    pub lambda8: f64,
}

impl Default for DarkEnergyParams {
    fn default() -> Self {
        Self {
            q4_sq: 29.166,
            k: 58.33,
            c: 45.84,
            lambda8: 34.55,
        }
    }
}

/// Two-radius compactification. The fluxes have no published defaults; the
/// single-radius flux is used as a placeholder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoRadiusParams {
    pub mu1_4: f64,
    pub mu2: f64,
    #[serde(rename = "Q1_sq")]
    pub q1_sq: f64,
    #[serde(rename = "Q2_sq")]
    pub q2_sq: f64,
    #[serde(rename = "Lambda8")]
    pub lambda8: f64,
}

impl Default for TwoRadiusParams {
    fn default() -> Self {
        Self {
            mu1_4: 200.0,
            mu2: 8.0,
            q1_sq: 29.166,
            q2_sq: 29.166,
            lambda8: 34.55,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DarkMatterParams {
    #[serde(rename = "lambda_X")]
    pub lambda_x: f64,
    #[serde(rename = "lambda_Y")]
    pub lambda_y: f64,
    pub lambda_mix: f64,
    pub a_scale: f64,
    #[serde(rename = "g_X")]
    pub g_x: f64,
    #[serde(rename = "g_Y")]
    pub g_y: f64,
    #[serde(rename = "theta_Y")]
    pub theta_y: f64,
}

impl Default for DarkMatterParams {
    fn default() -> Self {
        Self {
            lambda_x: 0.005,
            lambda_y: 0.005,
            lambda_mix: 0.001,
            a_scale: 1.0,
            g_x: 0.005f64.sqrt(),
            g_y: 0.005f64.sqrt(),
            theta_y: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinisuperspaceKind {
    InvLiouville,
    InvOscillator,
    InvLinear,
    InvQuartic,
    MorseS2,
    NegLambdaMorse,
    KantowskiSachs,
}

impl MinisuperspaceKind {
    pub const ALL: [MinisuperspaceKind; 7] = [
        MinisuperspaceKind::InvLiouville,
        MinisuperspaceKind::InvOscillator,
        MinisuperspaceKind::InvLinear,
        MinisuperspaceKind::InvQuartic,
        MinisuperspaceKind::MorseS2,
        MinisuperspaceKind::NegLambdaMorse,
        MinisuperspaceKind::KantowskiSachs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MinisuperspaceKind::InvLiouville => "inv_liouville",
            MinisuperspaceKind::InvOscillator => "inv_oscillator",
            MinisuperspaceKind::InvLinear => "inv_linear",
            MinisuperspaceKind::InvQuartic => "inv_quartic",
            MinisuperspaceKind::MorseS2 => "morse_s2",
            MinisuperspaceKind::NegLambdaMorse => "neg_lambda_morse",
            MinisuperspaceKind::KantowskiSachs => "kantowski_sachs",
        }
    }

    /// Spatial volume of the unit section: T³, S³, S² or S¹×S².
    pub fn default_volume(self) -> f64 {
        match self {
            MinisuperspaceKind::InvLiouville | MinisuperspaceKind::InvOscillator => (2.0 * PI).powi(3),
            MinisuperspaceKind::InvLinear | MinisuperspaceKind::InvQuartic => 2.0 * PI * PI,
            MinisuperspaceKind::MorseS2 | MinisuperspaceKind::NegLambdaMorse => 4.0 * PI,
            MinisuperspaceKind::KantowskiSachs => 8.0 * PI * PI,
        }
    }

    /// Whether V_eff has a 1/x² term and is singular at the origin.
    pub fn singular_at_origin(self) -> bool {
        matches!(
            self,
            MinisuperspaceKind::InvOscillator | MinisuperspaceKind::InvLinear | MinisuperspaceKind::InvQuartic
        )
    }
}

impl fmt::Display for MinisuperspaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MinisuperspaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
            Error::Parse(format!(
                "unknown minisuperspace kind '{s}' (known: {})",
                known.join(", ")
            ))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinisuperspaceParams {
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub k_curv: f64,
    /// Overrides the kind's unit-section volume when set.
    pub v_volume: Option<f64>,
    pub p_phi: f64,
}

impl Default for MinisuperspaceParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            k_curv: 1.0,
            v_volume: None,
            p_phi: 0.0,
        }
    }
}

impl MinisuperspaceParams {
    pub fn volume(&self, kind: MinisuperspaceKind) -> f64 {
        self.v_volume.unwrap_or_else(|| kind.default_volume())
    }
}

/// Real potential of one variable with a declared domain.
#[derive(Clone)]
pub struct PotentialFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: (f64, f64),
}

impl fmt::Debug for PotentialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl PotentialFn {
    pub fn new(name: impl Into<String>, domain: (f64, f64), f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            domain,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Five-point central difference with step `h`.
    pub fn derivative_with_step(&self, x: f64, h: f64) -> f64 {
        let f = |d: f64| self.value(x + d);
        (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.derivative_with_step(x, 1e-4 * (1.0 + x.abs()))
    }

    pub fn zero() -> Self {
        Self::new("zero", (f64::NEG_INFINITY, f64::INFINITY), |_| 0.0)
    }
}

pub fn starobinsky_potential(p: &StarobinskyParams) -> PotentialFn {
    let p = *p;
    PotentialFn::new("starobinsky", (f64::NEG_INFINITY, f64::INFINITY), move |phi| {
        let s = 1.0 - (phi / p.m2).exp();
        p.m1_4 * s * s
    })
}

pub fn dark_energy_potential(p: &DarkEnergyParams) -> PotentialFn {
    let p = *p;
    PotentialFn::new("dark_energy", (f64::NEG_INFINITY, f64::INFINITY), move |phi| {
        let e = (-2.0 * phi / p.c).exp();
        e * e * (p.q4_sq * e.powi(4) - p.k * e + p.lambda8)
    })
}

/// Radii (R₁, R₂) of the two internal spheres for canonical fields (φ₁, φ₂).
pub fn two_radius_radii(p: &TwoRadiusParams, phi1: f64, phi2: f64) -> (f64, f64) {
    let mix = (3f64.sqrt() - 1.0) / (2.0 * 3f64.sqrt()) * (phi1 + phi2) / SQRT_2;
    let r1 = ((phi1 / SQRT_2 - mix) / p.mu2).exp();
    let r2 = ((phi2 / SQRT_2 - mix) / p.mu2).exp();
    (r1, r2)
}

pub fn two_radius_potential(p: &TwoRadiusParams, phi1: f64, phi2: f64) -> f64 {
    let (r1, r2) = two_radius_radii(p, phi1, phi2);
    let (s1, s2) = (1.0 / (r1 * r1), 1.0 / (r2 * r2));
    p.mu1_4 * s1 * s2 * (p.q1_sq * s1 * s1 + p.q2_sq * s2 * s2 - s1 - s2 + p.lambda8)
}

/// Effective potential V_eff(x) with H = P²/2 + V_eff and H ψ = 0 the
/// Wheeler-DeWitt equation for fixed scalar momentum p_φ.
pub fn minisuperspace_potential(kind: MinisuperspaceKind, p: &MinisuperspaceParams, x: f64) -> f64 {
    let v = p.volume(kind);
    let (lam, k, pp) = (p.lambda, p.k_curv, p.p_phi * p.p_phi);
    match kind {
        MinisuperspaceKind::InvLiouville => -3.0 * pp - 6.0 * v * v * lam * (6.0 * x).exp(),
        MinisuperspaceKind::InvOscillator => -4.0 / 3.0 * pp / (x * x) - 8.0 / 3.0 * v * v * lam * x * x,
        MinisuperspaceKind::InvLinear => 4.5 * v * v * k - 0.75 * pp / (x * x) - 1.5 * v * v * lam * x,
        MinisuperspaceKind::InvQuartic => 18.0 * v * v * k * x * x - 3.0 * pp / (x * x) - 6.0 * v * v * lam * x.powi(4),
        MinisuperspaceKind::MorseS2 | MinisuperspaceKind::NegLambdaMorse => {
            2.0 * v * v * k * (2.0 * x).exp() - 2.0 * v * v * lam * (4.0 * x).exp() - pp
        }
        MinisuperspaceKind::KantowskiSachs => 2.0 * v * v * k * (2.0 * x).exp() - 0.5 * pp,
    }
}

pub fn minisuperspace_potential_fn(kind: MinisuperspaceKind, p: &MinisuperspaceParams) -> PotentialFn {
    let p = *p;
    let domain = if kind.singular_at_origin() {
        (0.0, f64::INFINITY)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    PotentialFn::new(kind.name(), domain, move |x| minisuperspace_potential(kind, &p, x))
}

/// Negative-Λ Morse potential rewritten in a = e^α: a quartic double well
/// V(a) = −2v²|k|a² + 2v²|Λ|a⁴ − p_φ².
pub fn double_well_potential(p: &MinisuperspaceParams, a: f64) -> f64 {
    let v = p.volume(MinisuperspaceKind::NegLambdaMorse);
    -2.0 * v * v * p.k_curv.abs() * a * a + 2.0 * v * v * p.lambda.abs() * a.powi(4) - p.p_phi * p.p_phi
}

/// Positive location √(|k|/(2|Λ|)) of the double-well minima.
pub fn double_well_minimum(p: &MinisuperspaceParams) -> f64 {
    (p.k_curv.abs() / (2.0 * p.lambda.abs())).sqrt()
}

fn check_qubits(n: usize) -> Result<usize> {
    if !(2..=12).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "qubits per mode must be in 2..=12, got {n}"
        )));
    }
    Ok(1usize << n)
}

/// P²/2 + V(X̂) on one mode.
pub fn single_mode_hamiltonian(v: impl Fn(f64) -> f64, n_qubits: usize, basis: BasisKind) -> Result<DiscreteOperator> {
    let dim = check_qubits(n_qubits)?;
    let x = build_position(basis, dim)?;
    let p2 = build_momentum_squared(basis, dim)?;
    let vx = apply_scalar_function(&x, v)?;
    Ok((&p2.scale(0.5) + &vx).hermitian_part())
}

pub fn starobinsky_hamiltonian(p: &StarobinskyParams, n_qubits: usize, basis: BasisKind) -> Result<DiscreteOperator> {
    let v = starobinsky_potential(p);
    single_mode_hamiltonian(|x| v.value(x), n_qubits, basis)
}

pub fn dark_energy_single_radius(p: &DarkEnergyParams, n_qubits: usize, basis: BasisKind) -> Result<DiscreteOperator> {
    let v = dark_energy_potential(p);
    single_mode_hamiltonian(|x| v.value(x), n_qubits, basis)
}

pub fn dark_energy_two_radius(
    p: &TwoRadiusParams,
    qubits_per_mode: usize,
    basis: BasisKind,
) -> Result<DiscreteOperator> {
    let dim = check_qubits(qubits_per_mode)?;
    let reg = BosonRegister::uniform(2, dim)?;
    let x = build_position(basis, dim)?;
    let p2 = build_momentum_squared(basis, dim)?.scale(0.5);
    let kinetic = &lift_to_mode(&p2, 0, &reg)? + &lift_to_mode(&p2, 1, &reg)?;
    let p = *p;
    let v = apply_joint_function(&[x.clone(), x], |a| two_radius_potential(&p, a[0], a[1]))?;
    Ok((&kinetic + &v).hermitian_part())
}

struct TwoModeOscillator {
    x: DiscreteOperator,
    y: DiscreteOperator,
    px: DiscreteOperator,
    py: DiscreteOperator,
}

impl TwoModeOscillator {
    fn new(qubits_per_mode: usize) -> Result<Self> {
        let dim = check_qubits(qubits_per_mode)?;
        let reg = BosonRegister::uniform(2, dim)?;
        let x = build_position(BasisKind::Oscillator, dim)?;
        let p = build_momentum(BasisKind::Oscillator, dim)?;
        Ok(Self {
            x: lift_to_mode(&x, 0, &reg)?,
            y: lift_to_mode(&x, 1, &reg)?,
            px: lift_to_mode(&p, 0, &reg)?,
            py: lift_to_mode(&p, 1, &reg)?,
        })
    }
}

/// Two conformally coupled quartic oscillators with an X⁴Y⁴ mixing term.
pub fn dark_matter_model_one(p: &DarkMatterParams, qubits_per_mode: usize) -> Result<DiscreteOperator> {
    let m = TwoModeOscillator::new(qubits_per_mode)?;
    let x2 = &m.x * &m.x;
    let y2 = &m.y * &m.y;
    let x4 = &x2 * &x2;
    let y4 = &y2 * &y2;
    let quad = (&(&m.px * &m.px) + &x2) + (&(&m.py * &m.py) + &y2);
    let mix = (&x4 * &y4).scale(p.lambda_mix / p.a_scale.powi(4));
    let h = quad.scale(0.5) + x4.scale(p.lambda_x) + y4.scale(p.lambda_y) + mix;
    Ok(h.hermitian_part())
}

/// Gauge-field glueball model with optional dark theta term. Products of
/// non-commuting factors are replaced by their symmetrized average.
pub fn dark_matter_model_two(p: &DarkMatterParams, qubits_per_mode: usize) -> Result<DiscreteOperator> {
    let m = TwoModeOscillator::new(qubits_per_mode)?;
    let x2 = &m.x * &m.x;
    let y2 = &m.y * &m.y;
    let x4 = &x2 * &x2;
    let y4 = &y2 * &y2;
    let theta = p.theta_y;
    let shifted = &m.py + &y2.scale(theta);
    let a = &m.px + &x2;
    let b = &shifted + &y2;
    let mix = (&(&a * &a) * &(&b * &b)).scale(p.lambda_mix / p.a_scale.powi(4));
    let h = (&m.px * &m.px).scale(0.5)
        + x4.scale(p.g_x * p.g_x)
        + (&shifted * &shifted).scale(0.5)
        + y4.scale(p.g_y * p.g_y)
        + mix
        + shifted.sym_product(&y2).scale(theta);
    Ok(h.hermitian_part())
}

pub fn minisuperspace_hamiltonian(
    kind: MinisuperspaceKind,
    p: &MinisuperspaceParams,
    n_qubits: usize,
    basis: BasisKind,
) -> Result<DiscreteOperator> {
    let p = *p;
    single_mode_hamiltonian(|x| minisuperspace_potential(kind, &p, x), n_qubits, basis)
}

/// Permutation exchanging the two modes of a `dim ⊗ dim` register.
pub fn mode_swap(dim: usize) -> DiscreteOperator {
    DiscreteOperator::from_real(dim * dim, |r, c| {
        let (i, j) = (c / dim, c % dim);
        if r == j * dim + i {
            1.0
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ground(h: &DiscreteOperator) -> f64 {
        h.eigenvalues().unwrap()[0]
    }

    #[test]
    fn free_starobinsky_is_psd() {
        let p = StarobinskyParams { m1_4: 0.0, m2: 7.638 };
        let h = starobinsky_hamiltonian(&p, 4, BasisKind::Oscillator).unwrap();
        assert!(ground(&h) >= -1e-12);
    }

    #[test]
    fn constant_shift_moves_ground() {
        let h = starobinsky_hamiltonian(&StarobinskyParams::default(), 4, BasisKind::Oscillator).unwrap();
        let shifted = &h + &DiscreteOperator::identity(16).scale(-0.75);
        assert_abs_diff_eq!(ground(&shifted), ground(&h) - 0.75, epsilon = 1e-12);
    }

    #[test]
    fn model_one_free_limit() {
        let p = DarkMatterParams {
            lambda_x: 0.0,
            lambda_y: 0.0,
            lambda_mix: 0.0,
            ..Default::default()
        };
        let h = dark_matter_model_one(&p, 2).unwrap();
        assert_abs_diff_eq!(ground(&h), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn model_one_separates_without_mixing() {
        let p = DarkMatterParams {
            lambda_x: 0.01,
            lambda_y: 0.03,
            lambda_mix: 0.0,
            ..Default::default()
        };
        let h = dark_matter_model_one(&p, 3).unwrap();
        let x = build_position(BasisKind::Oscillator, 8).unwrap();
        let pp = build_momentum_squared(BasisKind::Oscillator, 8).unwrap();
        let x2 = &x * &x;
        let single = |l: f64| {
            let hm = &(&pp + &x2).scale(0.5) + &(&x2 * &x2).scale(l);
            ground(&hm)
        };
        assert_abs_diff_eq!(ground(&h), single(0.01) + single(0.03), epsilon = 1e-10);
    }

    #[test]
    fn model_two_free_limit_is_psd() {
        let p = DarkMatterParams {
            lambda_mix: 0.0,
            g_x: 0.0,
            g_y: 0.0,
            ..Default::default()
        };
        let h = dark_matter_model_two(&p, 2).unwrap();
        assert!(ground(&h) >= -1e-12);
    }

    #[test]
    fn swap_symmetry_of_symmetric_models() {
        let s = mode_swap(4);
        let h1 = dark_matter_model_one(&DarkMatterParams::default(), 2).unwrap();
        assert!(h1.commutator(&s).max_abs() <= 1e-10);
        let h2 = dark_energy_two_radius(&TwoRadiusParams::default(), 2, BasisKind::Oscillator).unwrap();
        assert!(h2.commutator(&s).max_abs() <= 1e-10 * h2.max_abs().max(1.0));
    }

    #[test]
    fn two_radius_potential_is_swap_symmetric() {
        let p = TwoRadiusParams::default();
        for (a, b) in [(0.3, -1.2), (2.0, 0.5), (-3.0, 4.0)] {
            let d = two_radius_potential(&p, a, b) - two_radius_potential(&p, b, a);
            assert!(d.abs() <= 1e-12 * two_radius_potential(&p, a, b).abs().max(1.0));
        }
    }

    #[test]
    fn liouville_without_lambda_is_free() {
        let p = MinisuperspaceParams {
            lambda: 0.0,
            p_phi: 0.0,
            ..Default::default()
        };
        let h = minisuperspace_hamiltonian(MinisuperspaceKind::InvLiouville, &p, 3, BasisKind::Oscillator).unwrap();
        let free = build_momentum_squared(BasisKind::Oscillator, 8).unwrap().scale(0.5);
        assert!(h.max_abs_diff(&free) <= 1e-12);
    }

    #[test]
    fn inverted_oscillator_formula() {
        let p = MinisuperspaceParams {
            lambda: 0.7,
            p_phi: 1.3,
            ..Default::default()
        };
        let v = (2.0 * PI).powi(3);
        for y in [0.2, 0.9, 1.7] {
            let direct = -(4.0 / 3.0) * 1.69 / (y * y) - (8.0 / 3.0) * v * v * 0.7 * y * y;
            let got = minisuperspace_potential(MinisuperspaceKind::InvOscillator, &p, y);
            assert!((got - direct).abs() <= 1e-12 * direct.abs());
        }
    }

    #[test]
    fn negative_lambda_morse_is_bounded_below() {
        let p = MinisuperspaceParams {
            lambda: -0.25,
            k_curv: -1.0,
            v_volume: Some(1.0),
            p_phi: 0.0,
        };
        let v = minisuperspace_potential_fn(MinisuperspaceKind::NegLambdaMorse, &p);
        let min = (-400..400)
            .map(|i| v.value(i as f64 * 0.01))
            .fold(f64::INFINITY, f64::min);
        assert!(min.is_finite() && min > -1e3);
        let h = minisuperspace_hamiltonian(MinisuperspaceKind::NegLambdaMorse, &p, 4, BasisKind::Oscillator).unwrap();
        assert!(ground(&h).is_finite());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in MinisuperspaceKind::ALL {
            assert_eq!(k.name().parse::<MinisuperspaceKind>().unwrap(), k);
        }
        assert!("bogus".parse::<MinisuperspaceKind>().is_err());
    }

    #[test]
    fn potential_derivative_matches_closed_form() {
        let p = StarobinskyParams::default();
        let v = starobinsky_potential(&p);
        for phi in [-5.0, -1.0, 0.5] {
            let e = (phi / p.m2).exp();
            let exact = -2.0 * p.m1_4 * (1.0 - e) * e / p.m2;
            assert_abs_diff_eq!(v.derivative(phi), exact, epsilon = 1e-9);
        }
    }

    #[test]
    fn params_reject_unknown_keys() {
        let ok: StarobinskyParams = serde_json::from_str(r#"{"M1_4": 1.0}"#).unwrap();
        assert_eq!(ok.m2, 7.638);
        assert!(serde_json::from_str::<StarobinskyParams>(r#"{"M3": 1.0}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn double_well_minimum_is_stationary(lam in 0.05f64..2.0, k in 0.1f64..2.0, v in 0.5f64..2.0) {
            let p = MinisuperspaceParams { lambda: -lam, k_curv: -k, v_volume: Some(v), p_phi: 0.0 };
            let a = double_well_minimum(&p);
            let h = 1e-5 * a;
            let slope = (double_well_potential(&p, a + h) - double_well_potential(&p, a - h)) / (2.0 * h);
            prop_assert!(slope.abs() <= 1e-6 * (1.0 + double_well_potential(&p, a).abs()) / a);
            prop_assert!(double_well_potential(&p, a) < double_well_potential(&p, 0.0));
        }

        #[test]
        fn model_two_is_hermitian(lx in 0.0f64..0.05, gx in 0.0f64..0.3, gy in 0.0f64..0.3,
                                  lm in 0.0f64..0.05, th in -0.5f64..0.5) {
            let p = DarkMatterParams { lambda_x: lx, lambda_y: lx, lambda_mix: lm, a_scale: 1.0,
                                       g_x: gx, g_y: gy, theta_y: th };
            let h = dark_matter_model_two(&p, 2).unwrap();
            prop_assert!(h.hermiticity_defect() <= 1e-12);
        }
    }
}
