//! Nonlinear layer at the diffracted front ξ ≈ κ₀, away from β = π.
//!
//! With ρ/ρ0 = 1 + ερ_i⁽¹⁾ + ε²ρ̂(τ, β) and x = ρ̂ − ρ_i⁽²⁾ the transport
//! equation (Bx − 2(τ − K))x_τ + x = 0, B = κ₀(γ + 1)/(1 − b̃), has the
//! first integral C x² + B x − (τ − K) = 0. Matching to the linear field
//! fixes C(β) = −3κ₀π²(1 + 2cos(2β/3))²/8.
//!
//! Branches: the shock branch is the root that grows as τ → −∞ (x > 0,
//! β < π) and is cut by a shock at τ_s; the expansion branch is the root
//! through x = 0 at τ = K (x < 0 for τ < K, β > π).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::hugoniot::{SeriesState, StateRegion};

/// Half-width of the cone around β = π where this layer is not used.
pub const SINGULAR_CONE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Shock,
    Expansion,
}

#[derive(Debug, Clone, Serialize)]
pub struct WavefrontCoeffs {
    pub beta: f64,
    pub region: StateRegion,
    pub k: f64,
    pub c: f64,
    pub rho_i2: f64,
    /// B = κ₀(γ + 1)/(1 − b̃).
    pub nonlinearity: f64,
    /// a_i⁽¹⁾ + U_i⁽¹⁾(β) in units of c0: O(ε) shift of the layer centre.
    pub anchor_shift: f64,
}

fn angle_factor(beta: f64) -> f64 {
    1.0 + 2.0 * (2.0 * beta / 3.0).cos()
}

fn check_cone(beta: f64) -> Result<()> {
    if (beta - PI).abs() < SINGULAR_CONE {
        return Err(Error::SingularDirection { beta, tolerance: SINGULAR_CONE });
    }
    Ok(())
}

/// C(β) = −3κ₀π²(1 + 2cos(2β/3))²/8.
pub fn integration_constant(gas: &GasModel, beta: f64) -> f64 {
    let d = angle_factor(beta);
    -3.0 * gas.kappa0() * PI * PI * d * d / 8.0
}

pub fn wavefront_coeffs(gas: &GasModel, region: StateRegion, beta: f64) -> Result<WavefrontCoeffs> {
    check_cone(beta)?;
    let series = SeriesState::new(gas, region, beta)?;
    let g = gas.gamma();
    let b = gas.b_tilde();
    let k0 = gas.kappa0();
    let omb = 1.0 - b;
    // Series velocities carry a factor κ₀; the layer scales it out.
    let rho1 = series.rho[1];
    let k = series.u[2] + 0.5 * k0 * series.rho[2] * (g - 1.0 + 2.0 * b) / omb
        - 0.5 * series.v[1] * series.u1_beta / k0
        + k0 * ((g - 1.0) * (g - 3.0 + g * b + 5.0 * b) * rho1 * rho1 / (8.0 * omb)
            + (g + 1.0) * (g + 3.0) * b * b * rho1 * rho1 / (8.0 * omb * omb));
    Ok(WavefrontCoeffs {
        beta,
        region,
        k,
        c: integration_constant(gas, beta),
        rho_i2: series.rho[2],
        nonlinearity: k0 * (g + 1.0) / omb,
        anchor_shift: series.a[1] + series.u[1],
    })
}

fn coeffs_for(gas: &GasModel, beta: f64) -> Result<WavefrontCoeffs> {
    wavefront_coeffs(gas, StateRegion::for_beta(beta), beta)
}

impl WavefrontCoeffs {
    pub fn discriminant(&self, tau: f64) -> f64 {
        let b = self.nonlinearity;
        b * b + 4.0 * self.c * (tau - self.k)
    }

    /// τ at the parabola vertex; both roots exist only for τ ≤ this value.
    pub fn tau_vertex(&self) -> f64 {
        self.k - self.nonlinearity * self.nonlinearity / (4.0 * self.c)
    }

    /// x = ρ̂ − ρ_i⁽²⁾ on the chosen root of C x² + B x − (τ − K) = 0.
    pub fn parabola_root(&self, branch: Branch, tau: f64) -> Result<f64> {
        let disc = self.discriminant(tau);
        if disc < 0.0 {
            return Err(Error::NegativeDiscriminant(disc));
        }
        let s = disc.sqrt();
        Ok(match branch {
            Branch::Shock => (-self.nonlinearity - s) / (2.0 * self.c),
            Branch::Expansion => 2.0 * (tau - self.k) / (self.nonlinearity + s),
        })
    }

    /// −3(B/4)²/C + K.
    pub fn tau_shock(&self) -> f64 {
        let q = self.nonlinearity / 4.0;
        -3.0 * q * q / self.c + self.k
    }

    /// Edge of the disturbed zone: τ_s on the shock branch, K (where the
    /// expansion branch meets x = 0) otherwise.
    pub fn tau_edge(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Shock => self.tau_shock(),
            Branch::Expansion => self.k,
        }
    }

    /// ρ̂ with the undisturbed value ρ_i⁽²⁾ beyond the edge.
    pub fn rho_hat(&self, branch: Branch, tau: f64) -> Result<f64> {
        if tau > self.tau_edge(branch) {
            return Ok(self.rho_i2);
        }
        Ok(self.rho_i2 + self.parabola_root(branch, tau)?)
    }

    /// dx/dτ on a root, from implicit differentiation of the first integral.
    pub fn slope(&self, x: f64) -> f64 {
        1.0 / (2.0 * self.c * x + self.nonlinearity)
    }
}

/// First term of the shock location, (γ + 1)²/(2π²(1 − b̃)^((γ+5)/2)(1 + 2cos(2β/3))²).
pub fn tau_shock_offset(gas: &GasModel, beta: f64) -> Result<f64> {
    check_cone(beta)?;
    let g = gas.gamma();
    let d = angle_factor(beta);
    Ok((g + 1.0).powi(2) / (2.0 * PI * PI * (1.0 - gas.b_tilde()).powf((g + 5.0) / 2.0) * d * d))
}

/// τ_s for the diffracted shock (β < π).
pub fn tau_shock(gas: &GasModel, beta: f64) -> Result<f64> {
    if !(0.0..PI).contains(&beta) {
        return Err(Error::domain(format!("the diffracted shock needs beta in [0, pi), got {beta}")));
    }
    let c = coeffs_for(gas, beta)?;
    Ok(tau_shock_offset(gas, beta)? + c.k)
}

pub fn rho_hat(gas: &GasModel, beta: f64, branch: Branch, tau: f64) -> Result<f64> {
    coeffs_for(gas, beta)?.rho_hat(branch, tau)
}

/// Density jump across the diffracted shock as usually quoted,
/// 2(γ + 1)/(3π²(1 − b̃)(1 + 2cos(2β/3))²). This is the smaller root of the
/// first integral at τ_s; the jump of the fitted profile is three times it
/// (see [`profile_jump`]).
pub fn jump_strength(gas: &GasModel, beta: f64) -> Result<f64> {
    if !(0.0..PI).contains(&beta) {
        return Err(Error::domain(format!("the diffracted shock needs beta in [0, pi), got {beta}")));
    }
    check_cone(beta)?;
    let d = angle_factor(beta);
    Ok(2.0 * (gas.gamma() + 1.0) / (3.0 * PI * PI * (1.0 - gas.b_tilde()) * d * d))
}

/// ρ̂(τ_s⁻) − ρ̂(τ_s⁺) of the shock-branch profile.
pub fn profile_jump(gas: &GasModel, beta: f64) -> Result<f64> {
    let c = coeffs_for(gas, beta)?;
    // ρ̂(τ_s⁺) is the undisturbed ρ_i⁽²⁾
    c.parabola_root(Branch::Shock, c.tau_shock())
}

/// Density-gradient jump across the sonic arc in its quoted form,
/// 2(1 − b̃)^(γ + 3/2)/(γ + 1).
pub fn expansion_gradient(gas: &GasModel) -> f64 {
    let g = gas.gamma();
    2.0 * (1.0 - gas.b_tilde()).powf(g + 1.5) / (g + 1.0)
}

/// Slope of the expansion branch where it leaves x = 0, 1/B =
/// (1 − b̃)^((γ+3)/2)/(γ + 1).
pub fn expansion_branch_slope(gas: &GasModel) -> f64 {
    let g = gas.gamma();
    (1.0 - gas.b_tilde()).powf((g + 3.0) / 2.0) / (g + 1.0)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OdeReport {
    pub max_residual: f64,
    /// [B x²/2 − 2(τ − K)x] across τ_s, shock branch only.
    pub rh_bracket: Option<f64>,
    pub tau_shock: Option<f64>,
}

/// Substitutes the branch into (Bx − 2(τ − K))x_τ + x with x_τ from the
/// first integral; points beyond the edge are skipped.
pub fn ode_residual(gas: &GasModel, beta: f64, branch: Branch, taus: &[f64]) -> Result<OdeReport> {
    let c = coeffs_for(gas, beta)?;
    let edge = c.tau_edge(branch);
    let mut worst: f64 = 0.0;
    for &tau in taus.iter().filter(|&&t| t <= edge) {
        let x = c.parabola_root(branch, tau)?;
        let res = (c.nonlinearity * x - 2.0 * (tau - c.k)) * c.slope(x) + x;
        worst = worst.max(res.abs());
    }
    let (rh_bracket, tau_shock) = match branch {
        Branch::Shock => {
            let ts = c.tau_shock();
            let x = c.parabola_root(Branch::Shock, ts)?;
            let flux = |x: f64| 0.5 * c.nonlinearity * x * x - 2.0 * (ts - c.k) * x;
            (Some(flux(x) - flux(0.0)), Some(ts))
        }
        Branch::Expansion => (None, None),
    };
    Ok(OdeReport { max_residual: worst, rh_bracket, tau_shock })
}

/// ξ ↔ τ for a fixed ε: ξ = κ₀ + ε(a_i⁽¹⁾ + U_i⁽¹⁾) + ε²τ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauConverter {
    pub xi_anchor: f64,
    pub eps: f64,
}

impl TauConverter {
    pub fn new(gas: &GasModel, beta: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        let c = coeffs_for(gas, beta)?;
        Ok(TauConverter { xi_anchor: gas.kappa0() + eps * c.anchor_shift, eps })
    }

    pub fn to_tau(&self, xi: f64) -> f64 {
        (xi - self.xi_anchor) / (self.eps * self.eps)
    }

    pub fn to_xi(&self, tau: f64) -> f64 {
        self.xi_anchor + self.eps * self.eps * tau
    }
}

/// Sampled profile ρ̂(τ) for output.
#[derive(Debug, Clone, Serialize)]
pub struct WaveProfile {
    pub beta: f64,
    pub branch: Branch,
    pub tau_s: Option<f64>,
    pub k: f64,
    pub rho_i2: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn wave_profile(gas: &GasModel, beta: f64, taus: &[f64]) -> Result<WaveProfile> {
    let c = coeffs_for(gas, beta)?;
    let branch = match c.region {
        StateRegion::State1 => Branch::Shock,
        StateRegion::State2 => Branch::Expansion,
    };
    let samples = taus
        .iter()
        .map(|&t| Ok((t, c.rho_hat(branch, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveProfile {
        beta,
        branch,
        tau_s: (branch == Branch::Shock).then(|| c.tau_shock()),
        k: c.k,
        rho_i2: c.rho_i2,
        samples,
    })
}
