//! Incident and reflected shocks: exact Rankine–Hugoniot states, their
//! expansions in the shock strength ε = (ρ1 − ρ0)/ρ0, the leading-order shock
//! loci and the piecewise-constant first-order field outside the diffracted
//! region.
//!
//! Exact states are dimensional [`ThermoState`]s. Series coefficients are in
//! the scaled variables ρ/ρ0, U/c0, V/c0, p/p0, a/c0 and (S − S0)/cv.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasModel, ThermoState};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Upper end of the ε range exercised by the library.
pub const EPS_MAX: f64 = 0.2;

/// Flow regions of the self-similar plane. The first three are the constant
/// states outside the diffracted region; the last two are the nonlinear
/// layers used by the composite field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "omega0")]
    Omega0,
    #[serde(rename = "omega1")]
    Omega1,
    #[serde(rename = "omega2")]
    Omega2,
    #[serde(rename = "omega_tilde")]
    OmegaTilde,
    #[serde(rename = "wavefront")]
    WavefrontLayer,
    #[serde(rename = "corner")]
    CornerLayer,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Omega0 => "omega0",
            Region::Omega1 => "omega1",
            Region::Omega2 => "omega2",
            Region::OmegaTilde => "omega_tilde",
            Region::WavefrontLayer => "wavefront",
            Region::CornerLayer => "corner",
        }
    }
}

/// Which constant state borders the diffracted region: state 1 behind the
/// incident shock, state 2 behind the reflected shock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateRegion {
    State1,
    State2,
}

impl StateRegion {
    /// State bordering the diffracted front in direction β.
    pub fn for_beta(beta: f64) -> Self {
        if beta < PI {
            StateRegion::State1
        } else {
            StateRegion::State2
        }
    }

    /// First-order density coefficient ρ_i⁽¹⁾.
    pub fn rho_first(self) -> f64 {
        match self {
            StateRegion::State1 => 1.0,
            StateRegion::State2 => 2.0,
        }
    }
}

// Scaled units for the exact solves: ρ/ρ0, velocities/a0, p/(ρ0 a0²).
struct Scaled {
    gamma: f64,
    b: f64,
    p0: f64,
}

impl Scaled {
    fn new(gas: &GasModel) -> Self {
        Scaled {
            gamma: gas.gamma(),
            b: gas.b_tilde(),
            p0: (1.0 - gas.b_tilde()) / gas.gamma(),
        }
    }

    fn rho_e(&self, rho: f64, p: f64) -> f64 {
        p * (1.0 - self.b * rho) / (self.gamma - 1.0)
    }

    fn h(&self, rho: f64, p: f64) -> f64 {
        p * (self.gamma / rho - self.b) / (self.gamma - 1.0)
    }

    /// (ρ1, u1, p1) behind the incident shock, scaled.
    fn incident(&self, eps: f64) -> Result<(f64, f64, f64)> {
        let rho1 = 1.0 + eps;
        if self.b * rho1 >= 1.0 {
            return Err(Error::domain(format!(
                "b_tilde*(1 + eps) = {} >= 1",
                self.b * rho1
            )));
        }
        let den = (self.gamma + 1.0) - (self.gamma - 1.0) * rho1 - 2.0 * self.b * rho1;
        if den <= 0.0 {
            return Err(Error::domain(format!(
                "shock too strong for the model: pressure-ratio denominator {den} <= 0"
            )));
        }
        // p1/p0 − 1 = 2γ(ρ1 − ρ0)/den, kept in difference form.
        let dp = self.p0 * 2.0 * self.gamma * eps / den;
        let p1 = self.p0 + dp;
        let u1 = (dp * eps / rho1).sqrt();
        Ok((rho1, u1, p1))
    }
}

/// State behind the incident shock from the exact jump relations.
pub fn exact_incident_state(gas: &GasModel, eps: f64) -> Result<ThermoState> {
    check_eps(eps)?;
    if eps == 0.0 {
        return Ok(ThermoState::upstream(gas));
    }
    let sc = Scaled::new(gas);
    let (rho1, u1, p1) = sc.incident(eps)?;
    let a0 = gas.a0();
    ThermoState::new(
        gas,
        rho1 * gas.rho0(),
        u1 * a0,
        0.0,
        p1 * gas.rho0() * a0 * a0,
    )
}

/// Lab-frame speed of the exact incident shock, ρ1u1/(ρ1 − ρ0).
pub fn incident_shock_speed(gas: &GasModel, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if eps == 0.0 {
        return Ok(gas.a0());
    }
    let s1 = exact_incident_state(gas, eps)?;
    Ok(s1.rho * s1.u / (s1.rho - gas.rho0()))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("eps must be non-negative, got {eps}")));
    }
    Ok(())
}

/// Residuals of the four two-dimensional jump conditions
/// G′[q] = μ[F(q)] + ν[G(q)] across a straight shock with unit normal
/// (μ, ν) and normal speed G′, scaled by ρ0 a0, ρ0 a0², ρ0 a0² and ρ0 a0³.
pub fn jump_residuals(
    gas: &GasModel,
    ahead: &ThermoState,
    behind: &ThermoState,
    normal: (f64, f64),
    speed: f64,
) -> [f64; 4] {
    let (mu, nu) = normal;
    let flux = |s: &ThermoState| {
        let q2 = s.u * s.u + s.v * s.v;
        let cons = [
            s.rho,
            s.rho * s.u,
            s.rho * s.v,
            s.rho * (s.e + 0.5 * q2),
        ];
        let total_h = s.h + 0.5 * q2;
        let fx = [
            s.rho * s.u,
            s.rho * s.u * s.u + s.p,
            s.rho * s.u * s.v,
            s.rho * s.u * total_h,
        ];
        let fy = [
            s.rho * s.v,
            s.rho * s.u * s.v,
            s.rho * s.v * s.v + s.p,
            s.rho * s.v * total_h,
        ];
        (cons, fx, fy)
    };
    let (c1, fx1, fy1) = flux(behind);
    let (c0, fx0, fy0) = flux(ahead);
    let a0 = gas.a0();
    let r0 = gas.rho0();
    let scale = [r0 * a0, r0 * a0 * a0, r0 * a0 * a0, r0 * a0 * a0 * a0];
    let mut out = [0.0; 4];
    for k in 0..4 {
        let lhs = speed * (c1[k] - c0[k]);
        let rhs = mu * (fx1[k] - fx0[k]) + nu * (fy1[k] - fy0[k]);
        out[k] = (lhs - rhs) / scale[k];
    }
    out
}

/// Normal reflection of state 1 from the wedge face: state 2 at rest.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReflectedShock {
    pub state: ThermoState,
    /// Lab-frame velocity of the reflected shock along the incident
    /// direction (negative: it travels back into state 1).
    pub speed: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Newton solve of the normal jump conditions for (ρ2, p2, shock speed),
/// upstream state 1 and zero velocity behind.
pub fn exact_reflected_state(gas: &GasModel, eps: f64) -> Result<ReflectedShock> {
    check_eps(eps)?;
    let a0 = gas.a0();
    let rho0 = gas.rho0();
    if eps == 0.0 {
        return Ok(ReflectedShock {
            state: ThermoState::upstream(gas),
            speed: -a0,
            iterations: 0,
            residual: 0.0,
        });
    }
    let sc = Scaled::new(gas);
    let (rho1, u1, p1) = sc.incident(eps)?;
    let m1 = rho1 * u1;
    let total1 = rho1 * u1 * (sc.h(rho1, p1) + 0.5 * u1 * u1);
    let energy1 = sc.rho_e(rho1, p1) + 0.5 * rho1 * u1 * u1;
    let gm1 = sc.gamma - 1.0;

    let residual = |x: [f64; 3]| -> [f64; 3] {
        let [rho2, p2, sigma] = x;
        [
            sigma * (rho2 - rho1) + m1,
            -sigma * m1 - (p2 - m1 * u1 - p1),
            sigma * (sc.rho_e(rho2, p2) - energy1) + total1,
        ]
    };

    let b = sc.b;
    let mut x = [
        1.0 + 2.0 * eps,
        sc.p0 * (1.0 + 2.0 * sc.gamma * eps / (1.0 - b)),
        -1.0,
    ];
    let mut f = residual(x);
    let mut norm = max_abs(&f);
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER {
        if norm <= 1e-15 {
            break;
        }
        let [rho2, p2, sigma] = x;
        let jac = [
            [sigma, 0.0, rho2 - rho1],
            [0.0, -1.0, -m1],
            [
                -sigma * p2 * b / gm1,
                sigma * (1.0 - b * rho2) / gm1,
                sc.rho_e(rho2, p2) - energy1,
            ],
        ];
        let step = solve3(jac, [-f[0], -f[1], -f[2]])
            .ok_or(Error::NoConvergence { iterations, residual: norm })?;
        for k in 0..3 {
            x[k] += step[k];
        }
        iterations += 1;
        let f_new = residual(x);
        let norm_new = max_abs(&f_new);
        let stalled = max_abs(&step) <= 4.0 * f64::EPSILON * max_abs(&x);
        f = f_new;
        norm = norm_new;
        if stalled {
            break;
        }
    }
    if !(norm <= NEWTON_TOL) || x[0] * b >= 1.0 {
        return Err(Error::NoConvergence { iterations, residual: norm });
    }
    let state = ThermoState::new(gas, x[0] * rho0, 0.0, 0.0, x[1] * rho0 * a0 * a0)?;
    Ok(ReflectedShock { state, speed: x[2] * a0, iterations, residual: norm })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc -= a[row][k] * out[k];
        }
        out[row] = acc / a[row][row];
    }
    Some(out)
}

/// ρ₂⁽²⁾ by two-level Richardson extrapolation of (ρ2/ρ0 − 1 − 2ε)/ε².
pub(crate) fn extract_rho2_second(gas: &GasModel) -> Result<f64> {
    let b = gas.b_tilde();
    // keep the step inside the admissible strength range of dense gases
    let limit = 2.0 * (1.0 - b) / (gas.gamma() - 1.0 + 2.0 * b);
    let h = 1e-3_f64.min(0.05 * limit);
    let q = |eps: f64| -> Result<f64> {
        let r = exact_reflected_state(gas, eps)?;
        let ratio = r.state.rho / gas.rho0();
        Ok((ratio - 1.0 - 2.0 * eps) / (eps * eps))
    };
    let (q1, q2, q4) = (q(h)?, q(h / 2.0)?, q(h / 4.0)?);
    Ok((8.0 * q4 - 6.0 * q2 + q1) / 3.0)
}

/// Perturbation coefficients of a constant state as power series in ε.
/// Index k of each array is the coefficient of εᵏ; `a[0]` is κ₀.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesState {
    pub region: StateRegion,
    pub beta: f64,
    pub rho: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub p: [f64; 3],
    pub a: [f64; 3],
    /// (S − S0)/cv vanishes through O(ε²); only state 1 carries a known
    /// cubic coefficient.
    pub s: [f64; 3],
    pub s_cubic: Option<f64>,
    /// ∂U⁽¹⁾/∂β and ∂V⁽¹⁾/∂β.
    pub u1_beta: f64,
    pub v1_beta: f64,
}

/// Values of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValues {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub a: f64,
    pub s: f64,
}

impl SeriesState {
    pub fn new(gas: &GasModel, region: StateRegion, beta: f64) -> Result<Self> {
        let g = gas.gamma();
        let b = gas.b_tilde();
        let k0 = gas.kappa0();
        let omb = 1.0 - b;
        let (sin, cos) = beta.sin_cos();
        match region {
            StateRegion::State1 => {
                if !(0.0..=PI).contains(&beta) {
                    return Err(Error::domain(format!(
                        "state 1 requires beta in [0, pi], got {beta}"
                    )));
                }
                let rho = [1.0, 1.0, 0.0];
                let p = [1.0, g / omb, g * (g - 1.0 + 2.0 * b) / (2.0 * omb * omb)];
                let u = [0.0, k0 * cos, (g - 3.0 + 4.0 * b) * k0 * cos / (4.0 * omb)];
                let v = [0.0, -k0 * sin, (3.0 - g - 4.0 * b) * k0 * sin / (4.0 * omb)];
                Ok(SeriesState {
                    region,
                    beta,
                    a: sound_speed_series(gas, &rho, &p),
                    rho,
                    u,
                    v,
                    p,
                    s: [0.0; 3],
                    s_cubic: Some(g * (g * g - 1.0) / (12.0 * omb.powi(3))),
                    u1_beta: -k0 * sin,
                    v1_beta: -k0 * cos,
                })
            }
            StateRegion::State2 => {
                if !(PI..=1.5 * PI).contains(&beta) {
                    return Err(Error::domain(format!(
                        "state 2 requires beta in [pi, 3pi/2], got {beta}"
                    )));
                }
                // State 2 is at rest behind a normal reflection, so its
                // velocity series vanish identically.
                let rho = [1.0, 2.0, gas.rho2_second()];
                let p = [1.0, 2.0 * g / omb, g * (3.0 * g - 1.0 + 4.0 * b) / (2.0 * omb * omb)];
                Ok(SeriesState {
                    region,
                    beta,
                    a: sound_speed_series(gas, &rho, &p),
                    rho,
                    u: [0.0; 3],
                    v: [0.0; 3],
                    p,
                    s: [0.0; 3],
                    s_cubic: None,
                    u1_beta: 0.0,
                    v1_beta: 0.0,
                })
            }
        }
    }

    /// Sum through εᵒʳᵈᵉʳ (order ≤ 2; the entropy cubic is added for order 3).
    pub fn evaluate(&self, eps: f64, order: usize) -> SeriesValues {
        let sum = |c: &[f64; 3]| {
            let mut acc = 0.0;
            let mut pow = 1.0;
            for (k, ck) in c.iter().enumerate() {
                if k > order {
                    break;
                }
                acc += ck * pow;
                pow *= eps;
            }
            acc
        };
        let mut s = sum(&self.s);
        if order >= 3 {
            s += self.s_cubic.unwrap_or(0.0) * eps.powi(3);
        }
        SeriesValues {
            rho: sum(&self.rho),
            u: sum(&self.u),
            v: sum(&self.v),
            p: sum(&self.p),
            a: sum(&self.a),
            s,
        }
    }
}

/// a/c0 through O(ε²) from the density and pressure series, expanding
/// a/a0 = √((p/p0)(1 − b̃)/((ρ/ρ0)(1 − b̃ρ/ρ0))).
fn sound_speed_series(gas: &GasModel, rho: &[f64; 3], p: &[f64; 3]) -> [f64; 3] {
    let b = gas.b_tilde();
    let q = b / (1.0 - b);
    let (r1, r2, p1, p2) = (rho[1], rho[2], p[1], p[2]);
    let f1 = 0.5 * (p1 - r1 + q * r1);
    let f2 = 0.5 * ((p2 - 0.5 * p1 * p1) - (r2 - 0.5 * r1 * r1) + q * r2 + 0.5 * q * q * r1 * r1);
    let k0 = gas.kappa0();
    [k0, k0 * f1, k0 * (f2 + 0.5 * f1 * f1)]
}

pub fn state_series(
    gas: &GasModel,
    region: StateRegion,
    beta: f64,
    eps: f64,
) -> Result<(SeriesState, SeriesValues)> {
    check_eps(eps)?;
    let series = SeriesState::new(gas, region, beta)?;
    let values = series.evaluate(eps, 3);
    Ok((series, values))
}

/// Second-order state-2 coefficients in the form they are usually quoted:
/// p₂⁽²⁾ = γ(2γ − 1 + 3b̃)/(1 − b̃)² and U₂⁽²⁾ = κ₀(1 − γ − 2b̃)cos β/(2(1 − b̃)).
/// Neither agrees with the exact reflection (see the tests); kept only for
/// comparison output.
pub fn quoted_state2_second_order(gas: &GasModel, beta: f64) -> (f64, f64) {
    let g = gas.gamma();
    let b = gas.b_tilde();
    let omb = 1.0 - b;
    (
        g * (2.0 * g - 1.0 + 3.0 * b) / (omb * omb),
        gas.kappa0() * (1.0 - g - 2.0 * b) * beta.cos() / (2.0 * omb),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockKind {
    Incident,
    Reflected,
}

/// Leading-order straight shock in self-similar variables: the incident
/// shock x/t = a0 and the reflected shock x/t = −a0, with ξ = ζ/c0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShockLocus {
    pub kind: ShockKind,
    kappa0: f64,
}

impl ShockLocus {
    pub fn beta_range(&self) -> (f64, f64) {
        match self.kind {
            ShockKind::Incident => (0.0, FRAC_PI_2),
            ShockKind::Reflected => (PI, 1.5 * PI),
        }
    }

    /// ξ(β) = ±κ₀ sec β on the half-open range [start, end).
    pub fn radius(&self, beta: f64) -> Option<f64> {
        let (lo, hi) = self.beta_range();
        if !(lo..hi).contains(&beta) {
            return None;
        }
        let sec = 1.0 / beta.cos();
        Some(match self.kind {
            ShockKind::Incident => self.kappa0 * sec,
            ShockKind::Reflected => -self.kappa0 * sec,
        })
    }

    /// Cartesian unit normal pointing in the direction of propagation.
    pub fn normal(&self) -> (f64, f64) {
        match self.kind {
            ShockKind::Incident => (1.0, 0.0),
            ShockKind::Reflected => (-1.0, 0.0),
        }
    }

    /// Normal speed G′ in units of c0.
    pub fn speed(&self) -> f64 {
        self.kappa0
    }

    /// Signed position along the incident direction, x/(c0 t).
    pub fn signed_position(&self) -> f64 {
        match self.kind {
            ShockKind::Incident => self.kappa0,
            ShockKind::Reflected => -self.kappa0,
        }
    }
}

pub fn shock_loci(gas: &GasModel) -> (ShockLocus, ShockLocus) {
    let k = gas.kappa0();
    (
        ShockLocus { kind: ShockKind::Incident, kappa0: k },
        ShockLocus { kind: ShockKind::Reflected, kappa0: k },
    )
}

/// First-order density outside the diffracted region: 0 ahead of the
/// incident shock, 1 in state 1, 2 between the reflected shock and the wall.
pub fn exterior_first_order(gas: &GasModel, xi: f64, beta: f64) -> Result<(Region, f64)> {
    if !(0.0..=1.5 * PI).contains(&beta) {
        return Err(Error::domain(format!("beta must lie in [0, 3pi/2], got {beta}")));
    }
    let k0 = gas.kappa0();
    if !(xi >= k0) {
        return Err(Error::domain(format!(
            "(xi = {xi}, beta = {beta}) lies inside the diffracted region xi < {k0}"
        )));
    }
    let region = if beta < FRAC_PI_2 {
        if xi > k0 / beta.cos() {
            Region::Omega0
        } else {
            Region::Omega1
        }
    } else if beta <= PI {
        Region::Omega1
    } else if beta >= 1.5 * PI || xi < -k0 / beta.cos() {
        Region::Omega2
    } else {
        Region::Omega1
    };
    let value = match region {
        Region::Omega0 => 0.0,
        Region::Omega1 => 1.0,
        _ => 2.0,
    };
    Ok((region, value))
}
