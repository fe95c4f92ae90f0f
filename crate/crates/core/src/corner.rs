//! Inner expansion at the singular point Q (ξ = κ₀, β = π), where the
//! reflected shock meets the diffracted wavefront.
//!
//! Stretched variables r′ = (ξ − κ₀)/ε, β′ = (β − π)/√ε and the shifted
//! radius r̃ = r′ + 2κ₀ (both adjacent states give U_i⁽¹⁾ − ρ_i⁽¹⁾ = −2 at
//! β = π, velocities in units of a0). The leading-order density
//! ρ/ρ0 = 1 + ερ̄ obeys the mixed-type equation
//! κ₀(ϑρ̄ − r̃)ρ̄_r̃r̃ + κ₀ϑρ̄_r̃² − κ₀ρ̄_r̃ + ρ̄_β′β′ = 0.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gas::GasModel;

/// Exponent Δ of the angular gauge ε^Δ.
pub const GAUGE: f64 = 0.5;

/// r̃ − r′ in units of κ₀.
const SHIFT: f64 = 2.0;

/// Power of ε multiplying the β′β′ term of the stretched linear equation,
/// 1 − 2Δ. Zero exactly when every term is kept.
pub fn angular_term_exponent(delta: f64) -> f64 {
    1.0 - 2.0 * delta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CornerCoords {
    pub r_prime: f64,
    pub beta_prime: f64,
    pub r_tilde: f64,
    /// 2r̃/(κ₀β′²); ±∞ on β′ = 0.
    pub eta: f64,
}

impl CornerCoords {
    pub fn from_stretched(gas: &GasModel, r_prime: f64, beta_prime: f64) -> Self {
        let k0 = gas.kappa0();
        let r_tilde = r_prime + SHIFT * k0;
        CornerCoords {
            r_prime,
            beta_prime,
            r_tilde,
            eta: 2.0 * r_tilde / (k0 * beta_prime * beta_prime),
        }
    }

    pub fn from_self_similar(gas: &GasModel, eps: f64, xi: f64, beta: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        let r_prime = (xi - gas.kappa0()) / eps;
        let beta_prime = (beta - PI) / eps.powf(GAUGE);
        Ok(Self::from_stretched(gas, r_prime, beta_prime))
    }

    pub fn to_self_similar(&self, gas: &GasModel, eps: f64) -> (f64, f64) {
        (
            gas.kappa0() + eps * self.r_prime,
            PI + eps.powf(GAUGE) * self.beta_prime,
        )
    }
}

/// Shock parabolas and sonic lines of the corner region.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CornerGeometry {
    pub beta0: f64,
    /// (1/π)tan⁻¹√(−η) behind the diffracted shock, in [0, 1/2].
    pub chi: f64,
    kappa0: f64,
    theta: f64,
}

impl CornerGeometry {
    pub fn new(gas: &GasModel, beta0: f64, chi: f64) -> Result<Self> {
        check_chi(chi)?;
        if !beta0.is_finite() {
            return Err(Error::domain(format!("beta0 must be finite, got {beta0}")));
        }
        Ok(CornerGeometry { beta0, chi, kappa0: gas.kappa0(), theta: gas.theta() })
    }

    pub fn reflected(&self, beta_prime: f64) -> f64 {
        let d = beta_prime - self.beta0;
        0.5 * self.kappa0 * d * d + 1.5 * self.theta
    }

    pub fn diffracted(&self, beta_prime: f64) -> f64 {
        let d = beta_prime - self.beta0;
        0.5 * self.kappa0 * d * d + 0.5 * self.theta * (3.0 - self.chi)
    }

    /// dS/dβ′, shared by both parabolas.
    pub fn slope(&self, beta_prime: f64) -> f64 {
        self.kappa0 * (beta_prime - self.beta0)
    }

    /// S₁: r̃ = ϑ.
    pub fn sonic1(&self) -> f64 {
        self.theta
    }

    /// S₂: r̃ = 2ϑ.
    pub fn sonic2(&self) -> f64 {
        2.0 * self.theta
    }
}

fn check_chi(chi: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&chi) {
        return Err(Error::domain(format!("chi must lie in [0, 1/2], got {chi}")));
    }
    Ok(())
}

/// 2 − (1/π)·atan2(√(−2r′/κ₀), β′): the linear field seen from the corner.
pub fn corner_limit_of_linear(gas: &GasModel, r_prime: f64, beta_prime: f64) -> Result<f64> {
    if !(r_prime < 0.0) {
        return Err(Error::domain(format!("corner limit needs r' < 0, got {r_prime}")));
    }
    Ok(2.0 - (-2.0 * r_prime / gas.kappa0()).sqrt().atan2(beta_prime) / PI)
}

/// (κ₀/2)(β′ − β₀)² + (3κ₀/4)(γ + 1)/(1 − b̃).
pub fn reflected_parabola(gas: &GasModel, beta0: f64, beta_prime: f64) -> f64 {
    let d = beta_prime - beta0;
    0.5 * gas.kappa0() * d * d + 0.75 * gas.kappa0() * (gas.gamma() + 1.0) / (1.0 - gas.b_tilde())
}

/// (κ₀/2)(β′ − β₀)² + (κ₀/4)(γ + 1)(3 − χ)/(1 − b̃).
pub fn diffracted_parabola(gas: &GasModel, beta0: f64, beta_prime: f64, chi: f64) -> Result<f64> {
    check_chi(chi)?;
    let d = beta_prime - beta0;
    Ok(0.5 * gas.kappa0() * d * d
        + 0.25 * gas.kappa0() * (gas.gamma() + 1.0) * (3.0 - chi) / (1.0 - gas.b_tilde()))
}

/// 2κ₀ϑ⟨ρ̄⟩ + S′² − 2κ₀S for a shock r̃ = S(β′).
pub fn averaged_jump_residual(gas: &GasModel, s: f64, s_prime: f64, mean_rho: f64) -> f64 {
    let k0 = gas.kappa0();
    2.0 * k0 * gas.theta() * mean_rho + s_prime * s_prime - 2.0 * k0 * s
}

/// Residuals of κ₀[V̄̄] + S′[ρ̄] = 0 and ϑ[ρ̄²] − S′[V̄̄] − 2S[ρ̄] = 0, with
/// [V̄̄] taken from the first relation.
pub fn shock_condition_residuals(
    gas: &GasModel,
    s: f64,
    s_prime: f64,
    rho_ahead: f64,
    rho_behind: f64,
) -> [f64; 2] {
    let k0 = gas.kappa0();
    let jump = rho_behind - rho_ahead;
    let v_jump = -s_prime * jump / k0;
    [
        k0 * v_jump + s_prime * jump,
        gas.theta() * (rho_behind * rho_behind - rho_ahead * rho_ahead) - s_prime * v_jump
            - 2.0 * s * jump,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CornerMode {
    Reflected,
    Diffracted,
    Fan,
}

/// 2 − (1/π)tan⁻¹√(−η) with η clamped to η ≤ 0.
pub fn eta_datum(eta: f64) -> f64 {
    2.0 - (-eta.min(0.0)).sqrt().atan() / PI
}

/// Piecewise ρ̄ of the three closed-form corner solutions.
///
/// Below the diffracted shock the datum is the corner limit of the linear
/// field, evaluated at r′ = r̃ − 2κ₀; for r′ ≥ 0 it takes its r′ → 0⁻ value
/// (1 for β′ < 0, 2 otherwise).
pub fn corner_density(
    gas: &GasModel,
    geometry: &CornerGeometry,
    r_tilde: f64,
    beta_prime: f64,
    mode: CornerMode,
) -> Result<f64> {
    if !r_tilde.is_finite() || !beta_prime.is_finite() {
        return Err(Error::domain(format!(
            "corner coordinates must be finite (r~ = {r_tilde}, beta' = {beta_prime})"
        )));
    }
    let theta = gas.theta();
    match mode {
        CornerMode::Reflected => Ok(if r_tilde > geometry.reflected(beta_prime) { 1.0 } else { 2.0 }),
        CornerMode::Diffracted => {
            if r_tilde > geometry.diffracted(beta_prime) {
                return Ok(1.0);
            }
            let r_prime = r_tilde - SHIFT * gas.kappa0();
            if r_prime < 0.0 {
                corner_limit_of_linear(gas, r_prime, beta_prime)
            } else if beta_prime < 0.0 {
                Ok(1.0)
            } else {
                Ok(2.0)
            }
        }
        CornerMode::Fan => {
            if beta_prime == 0.0 {
                return Err(Error::domain("fan solution is undefined on beta' = 0"));
            }
            let b2 = beta_prime * beta_prime;
            let m = r_tilde / b2;
            if m > 2.0 * theta / b2 {
                Ok(2.0)
            } else if m > theta / b2 {
                Ok(b2 * m.sqrt())
            } else {
                Ok(eta_datum(2.0 * r_tilde / (gas.kappa0() * b2)))
            }
        }
    }
}

/// max over `points` of the centered-difference residual of
/// κ₀(ϑρ̄ − r̃)ρ̄_r̃r̃ + κ₀ϑρ̄_r̃² − κ₀ρ̄_r̃ + ρ̄_β′β′.
pub fn utsd_residual(
    gas: &GasModel,
    field: impl Fn(f64, f64) -> f64,
    points: &[(f64, f64)],
    h: f64,
) -> f64 {
    let k0 = gas.kappa0();
    let th = gas.theta();
    points
        .iter()
        .map(|&(r, b)| {
            let f0 = field(r, b);
            let fr = (field(r + h, b) - field(r - h, b)) / (2.0 * h);
            let frr = (field(r + h, b) - 2.0 * f0 + field(r - h, b)) / (h * h);
            let fbb = (field(r, b + h) - 2.0 * f0 + field(r, b - h)) / (h * h);
            (k0 * (th * f0 - r) * frr + k0 * th * fr * fr - k0 * fr + fbb).abs()
        })
        .fold(0.0, f64::max)
}

/// Left side of the similarity equation
/// (4m² + (2κ₀/β′²)(ϑβ′²f − r̃))f″ − (κ₀ + 2m)f′ + 2κ₀f′² + 2f
/// for f(m) = √m, r̃ = mβ′². The β′ dependence cancels.
pub fn similarity_residual(gas: &GasModel, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::domain(format!("similarity variable must be positive, got {m}")));
    }
    let k0 = gas.kappa0();
    let th = gas.theta();
    let f = m.sqrt();
    let f1 = 0.5 / f;
    let f2 = -0.25 / (m * f);
    Ok((4.0 * m * m + 2.0 * k0 * (th * f - m)) * f2 - (k0 + 2.0 * m) * f1 + 2.0 * k0 * f1 * f1 + 2.0 * f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CornerRegime {
    Hyperbolic,
    Elliptic,
    Sonic,
}

/// Type of the corner equation at a state: hyperbolic iff ϑρ̄ < r̃.
pub fn classify_corner_regime(gas: &GasModel, r_tilde: f64, rho_bar: f64) -> CornerRegime {
    let lhs = gas.theta() * rho_bar;
    let tol = 1e-12 * lhs.abs().max(r_tilde.abs()).max(1.0);
    if (lhs - r_tilde).abs() <= tol {
        CornerRegime::Sonic
    } else if lhs < r_tilde {
        CornerRegime::Hyperbolic
    } else {
        CornerRegime::Elliptic
    }
}

/// Leading-order corner velocities (Ū, V̄) in units of a0 and the sound
/// speed perturbation ā = (γ − 1 + 2b̃)ρ̄/(2(1 − b̃)). Ū − U_i⁽¹⁾ = ρ̄ − ρ_i⁽¹⁾
/// with U_i⁽¹⁾ − ρ_i⁽¹⁾ = −2 on both sides of β = π; V̄ vanishes with V_i⁽¹⁾.
pub fn corner_state(gas: &GasModel, rho_bar: f64) -> (f64, f64, f64) {
    (rho_bar - SHIFT, 0.0, gas.sound_speed_slope() * rho_bar)
}
