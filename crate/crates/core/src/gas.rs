//! Covolume ("van der Waals type") gas: p(V − b) = RT, with
//! e = p(V − b)/(γ − 1), h = p(γV − b)/(γ − 1) and S = cv ln(p(V − b)^γ).
//!
//! [`GasModel`] is the only place that holds dimensional constants. Every
//! other module works with densities scaled by ρ0, speeds by c0 = a0/κ₀ and
//! the self-similar radius ξ = ζ/c0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hugoniot;

#[derive(Debug, Clone, Serialize)]
pub struct GasModel {
    gamma: f64,
    b_tilde: f64,
    rho0: f64,
    p0: f64,
    cv: f64,
    a0: f64,
    c0: f64,
    kappa0: f64,
    theta: f64,
    /// Second-order density coefficient behind the reflected shock. Not a
    /// closed-form quantity of the asymptotic theory; extracted once from the
    /// exact reflection by Richardson extrapolation.
    rho2_second: f64,
}

impl GasModel {
    pub fn new(gamma: f64, b_tilde: f64, rho0: f64, p0: f64, cv: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(0.0..1.0).contains(&b_tilde) {
            return Err(Error::domain(format!("b_tilde must lie in [0, 1), got {b_tilde}")));
        }
        for (name, v) in [("rho0", rho0), ("p0", p0), ("cv", cv)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        let one_minus_b = 1.0 - b_tilde;
        let a0 = (gamma * p0 / (rho0 * one_minus_b)).sqrt();
        let kappa0 = one_minus_b.powf(-(gamma + 1.0) / 2.0);
        let mut gas = GasModel {
            gamma,
            b_tilde,
            rho0,
            p0,
            cv,
            a0,
            c0: a0 / kappa0,
            kappa0,
            theta: 0.5 * kappa0 * (gamma + 1.0) / one_minus_b,
            rho2_second: f64::NAN,
        };
        gas.rho2_second = hugoniot::extract_rho2_second(&gas)?;
        Ok(gas)
    }

    /// Unit upstream state (ρ0 = p0 = cv = 1).
    pub fn scaled(gamma: f64, b_tilde: f64) -> Result<Self> {
        Self::new(gamma, b_tilde, 1.0, 1.0, 1.0)
    }

    /// Overwrites κ₀ without touching a0 or c0. Only used to check that the
    /// verification harness notices an inconsistent model.
    #[doc(hidden)]
    pub fn with_corrupted_kappa0(mut self, factor: f64) -> Self {
        self.kappa0 *= factor;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b_tilde(&self) -> f64 {
        self.b_tilde
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn cv(&self) -> f64 {
        self.cv
    }

    /// Dimensional covolume b = b̃/ρ0.
    pub fn covolume(&self) -> f64 {
        self.b_tilde / self.rho0
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// κ₀ = (1 − b̃)^(−(γ+1)/2), the sonic radius in units of c0.
    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    /// ϑ = (κ₀/2)(γ + 1)/(1 − b̃).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho2_second(&self) -> f64 {
        self.rho2_second
    }

    /// (γ − 1 + 2b̃)/(2(1 − b̃)): linear response of a/a0 to δρ/ρ0 at
    /// constant entropy.
    pub fn sound_speed_slope(&self) -> f64 {
        (self.gamma - 1.0 + 2.0 * self.b_tilde) / (2.0 * (1.0 - self.b_tilde))
    }

    fn check_state(&self, rho: f64, p: f64) -> Result<()> {
        if !(rho > 0.0) || !(p > 0.0) {
            return Err(Error::domain(format!(
                "density and pressure must be positive (rho = {rho}, p = {p})"
            )));
        }
        if self.covolume() * rho >= 1.0 {
            return Err(Error::domain(format!(
                "equation of state breaks down: b*rho = {} >= 1",
                self.covolume() * rho
            )));
        }
        Ok(())
    }

    /// a = √(γp/(ρ(1 − bρ))).
    pub fn sound_speed(&self, rho: f64, p: f64) -> Result<f64> {
        self.check_state(rho, p)?;
        Ok((self.gamma * p / (rho * (1.0 - self.covolume() * rho))).sqrt())
    }

    pub fn thermo(&self, rho: f64, p: f64) -> Result<Thermo> {
        self.check_state(rho, p)?;
        let v = 1.0 / rho;
        let b = self.covolume();
        let gm1 = self.gamma - 1.0;
        Ok(Thermo {
            e: p * (v - b) / gm1,
            h: p * (self.gamma * v - b) / gm1,
            s: self.entropy_from_reference(rho, p),
        })
    }

    /// (S − S0) written in ratio form so that weak jumps keep their digits.
    fn entropy_from_reference(&self, rho: f64, p: f64) -> f64 {
        let b = self.covolume();
        let v = 1.0 / rho;
        let v0 = 1.0 / self.rho0;
        let dp = (p - self.p0) / self.p0;
        let dv = (v - v0) / (v0 - b);
        self.cv * (dp.ln_1p() + self.gamma * dv.ln_1p())
    }
}

/// Caloric part of a state: specific internal energy, enthalpy and entropy
/// (entropy zero at the upstream state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thermo {
    pub e: f64,
    pub h: f64,
    pub s: f64,
}

/// Exact dimensional state used by the Rankine–Hugoniot oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub e: f64,
    pub h: f64,
    pub s: f64,
}

impl ThermoState {
    pub fn new(gas: &GasModel, rho: f64, u: f64, v: f64, p: f64) -> Result<Self> {
        let Thermo { e, h, s } = gas.thermo(rho, p)?;
        Ok(ThermoState { rho, u, v, p, e, h, s })
    }

    pub fn upstream(gas: &GasModel) -> Self {
        ThermoState::new(gas, gas.rho0, 0.0, 0.0, gas.p0).expect("upstream state is admissible")
    }

    pub fn sound_speed(&self, gas: &GasModel) -> f64 {
        gas.sound_speed(self.rho, self.p).expect("state was validated at construction")
    }

    /// Self-similar components (U, V) = (u cos β + v sin β, −u sin β + v cos β).
    pub fn polar_velocity(&self, beta: f64) -> (f64, f64) {
        let (s, c) = beta.sin_cos();
        (self.u * c + self.v * s, -self.u * s + self.v * c)
    }
}
