//! Self-check harness: order tests, residual oracles, monotonicity sweeps
//! and matching checks, collected into a machine-readable report.

use std::f64::consts::PI;

use serde::Serialize;

use crate::corner::{
    averaged_jump_residual, corner_limit_of_linear, similarity_residual, CornerCoords, CornerGeometry,
};
use crate::error::Result;
use crate::field::Scenario;
use crate::gas::GasModel;
use crate::hugoniot::{
    exact_incident_state, exact_reflected_state, incident_shock_speed, shock_loci, SeriesState, StateRegion,
};
use crate::linear_field::{
    laplace_residual, laplace_residual_away_from_q, near_front_coefficient, reconstruct_velocities, rho1_linear, RadialGrid, RadialMap,
};
use crate::wavefront::{
    expansion_gradient, integration_constant, jump_strength, ode_residual, profile_jump, tau_shock_offset,
    wavefront_coeffs, Branch,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Reported only; never fails the run.
    pub informational: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass && !c.informational)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Passes when `measured <= threshold`.
    fn at_most(&mut self, name: impl Into<String>, measured: f64, threshold: f64) {
        self.push(name, measured, threshold, measured <= threshold, false);
    }

    /// Passes when `measured > threshold`.
    fn above(&mut self, name: impl Into<String>, measured: f64, threshold: f64) {
        self.push(name, measured, threshold, measured > threshold, false);
    }

    fn info(&mut self, name: impl Into<String>, measured: f64, threshold: f64) {
        self.push(name, measured, threshold, measured <= threshold, true);
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, threshold: f64, pass: bool, informational: bool) {
        // NaN never passes
        let pass = pass && !measured.is_nan();
        self.0.push(Check { name: name.into(), measured, threshold, pass, informational });
    }

    fn failed(&mut self, name: impl Into<String>, err: impl std::fmt::Display) {
        let name = format!("{}: {err}", name.into());
        self.push(name, f64::NAN, 0.0, false, false);
    }
}

/// Errors of the second-order series for (p₁, U₁, p₂, U₂) against the exact
/// shocks, p in units of p0 and U in units of c0.
pub fn series_errors(gas: &GasModel, eps: f64) -> Result<[f64; 4]> {
    let s1 = exact_incident_state(gas, eps)?;
    let s2 = exact_reflected_state(gas, eps)?.state;
    let c0 = gas.c0();
    let one = SeriesState::new(gas, StateRegion::State1, 0.0)?.evaluate(eps, 2);
    let two = SeriesState::new(gas, StateRegion::State2, PI)?.evaluate(eps, 2);
    Ok([
        (s1.p / gas.p0() - one.p).abs(),
        (s1.u / c0 - one.u).abs(),
        (s2.p / gas.p0() - two.p).abs(),
        (s2.u / c0 - two.u).abs(),
    ])
}

/// Worst |ratio/8 − 1| over successive halvings of ε; errors that are
/// already at rounding level count as exact.
pub fn order_ratio_deviation(errs: &[f64]) -> f64 {
    errs.windows(2)
        .map(|w| if w[0] < 1e-15 && w[1] < 1e-15 { 0.0 } else { (w[0] / w[1] / 8.0 - 1.0).abs() })
        .fold(0.0, f64::max)
}

/// (fitted exponent, Richardson-extrapolated coefficient) of
/// (S₁ − S₀)/cv against ε.
pub fn entropy_fit(gas: &GasModel, eps: &[f64]) -> Result<(f64, f64)> {
    let s: Vec<f64> = eps
        .iter()
        .map(|&e| Ok(exact_incident_state(gas, e)?.s / gas.cv()))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    // s/ε³ = c + O(ε); the two smallest ε differ by a factor of two
    let k = eps.len() - 1;
    let q = |i: usize| s[i] / eps[i].powi(3);
    Ok((sxy / sxx, 2.0 * q(k) - q(k - 1)))
}

/// |ρ̃ − corner limit| at fixed stretched coordinates, for each ε.
pub fn corner_limit_errors(gas: &GasModel, r_prime: f64, beta_prime: f64, eps: &[f64]) -> Result<Vec<f64>> {
    let map = RadialMap::new(gas);
    let limit = corner_limit_of_linear(gas, r_prime, beta_prime)?;
    eps.iter()
        .map(|&e| {
            let (xi, beta) = CornerCoords::from_stretched(gas, r_prime, beta_prime).to_self_similar(gas, e);
            Ok((rho1_linear(gas, map.forward(xi)?, beta)? - limit).abs())
        })
        .collect()
}

fn strictly_monotone(v: &[f64], increasing: bool) -> f64 {
    v.windows(2)
        .map(|w| if increasing { w[1] - w[0] } else { w[0] - w[1] })
        .fold(f64::INFINITY, f64::min)
}

/// Runs every check. Gas-dependent checks use the scenario's γ and b̃ as
/// well as the fixed sweep γ ∈ {1.4, 5/3}, b̃ ∈ {0, 0.3}; fault injection
/// corrupts κ₀ everywhere.
pub fn run_verify(scenario: &Scenario) -> VerifyReport {
    let make = |g: f64, b: f64| -> Result<GasModel> {
        Scenario { gamma: g, b_tilde: b, ..scenario.clone() }.gas()
    };
    let mut c = Checks::default();

    let mut gases = vec![(1.4, 0.0), (1.4, 0.3), (5.0 / 3.0, 0.0), (5.0 / 3.0, 0.3)];
    if !gases.contains(&(scenario.gamma, scenario.b_tilde)) {
        gases.push((scenario.gamma, scenario.b_tilde));
    }
    for &(g, b) in &gases {
        let tag = format!("gamma={g:.4},b={b}");
        match make(g, b) {
            Ok(gas) => gas_checks(&mut c, &gas, &tag),
            Err(e) => c.failed(format!("gas[{tag}]"), e),
        }
    }

    // equation of the linear field
    let probe = GasModel::scaled(1.4, 0.0).expect("reference gas");
    let (r1, r2) = (laplace_residual(&probe, 2e-3), laplace_residual(&probe, 1e-3));
    c.at_most("laplace_order_ratio", (r1 / r2 - 4.0).abs(), 0.5);
    c.at_most("laplace_abs_h1e-3_interior", laplace_residual_away_from_q(&probe, 1e-3, 0.25), 1e-4);
    c.info("laplace_abs_h1e-3_with_q", r2, 1e-4);

    match make(1.4, 0.0) {
        Ok(gas) => {
            ideal_gas_checks(&mut c, &gas);
            reference_anchors(&mut c, &gas);
        }
        Err(e) => c.failed("ideal_gas", e),
    }
    monotonicity_checks(&mut c, &make);

    let passed = c.0.iter().all(|k| k.pass || k.informational);
    VerifyReport { checks: c.0, passed }
}

fn gas_checks(c: &mut Checks, gas: &GasModel, tag: &str) {
    let k0 = gas.kappa0();

    // series against exact shocks
    let eps = [1e-2, 5e-3, 2.5e-3];
    match eps.iter().map(|&e| series_errors(gas, e)).collect::<Result<Vec<_>>>() {
        Ok(errs) => {
            for (i, q) in ["p1", "u1", "p2", "u2"].iter().enumerate() {
                let col: Vec<f64> = errs.iter().map(|e| e[i]).collect();
                c.at_most(format!("rh_order_{q}[{tag}]"), order_ratio_deviation(&col), 0.2);
            }
        }
        Err(e) => c.failed(format!("rh_order[{tag}]"), e),
    }

    match entropy_fit(gas, &[2e-2, 1e-2, 5e-3, 2.5e-3]) {
        Ok((exponent, coef)) => {
            let g = gas.gamma();
            let expect = g * (g * g - 1.0) / (12.0 * (1.0 - gas.b_tilde()).powi(3));
            c.at_most(format!("entropy_exponent[{tag}]"), (exponent - 3.0).abs(), 0.05);
            c.at_most(format!("entropy_coefficient[{tag}]"), (coef / expect - 1.0).abs(), 0.02);
        }
        Err(e) => c.failed(format!("entropy[{tag}]"), e),
    }

    // leading-order loci against the exact shock speeds
    let (inc, refl) = shock_loci(gas);
    let weak = 1e-7;
    match incident_shock_speed(gas, weak) {
        Ok(w) => {
            let rel = (w / gas.c0() - inc.radius(0.0).unwrap_or(f64::NAN)).abs() / k0;
            c.at_most(format!("locus_incident[{tag}]"), rel, 1e-6);
        }
        Err(e) => c.failed(format!("locus_incident[{tag}]"), e),
    }
    match exact_reflected_state(gas, weak) {
        Ok(r) => {
            let rel = (-r.speed / gas.c0() - refl.radius(PI).unwrap_or(f64::NAN)).abs() / k0;
            c.at_most(format!("locus_reflected[{tag}]"), rel, 1e-6);
        }
        Err(e) => c.failed(format!("locus_reflected[{tag}]"), e),
    }

    // boundary and vertex values of the linear field
    let vertex = rho1_linear(gas, 0.0, 0.7).map(|v| (v - 4.0 / 3.0).abs());
    c.at_most(format!("rho1_vertex[{tag}]"), vertex.unwrap_or(f64::NAN), 1e-15);
    let mut edge: f64 = 0.0;
    for j in 0..=20 {
        let b1 = (PI - 0.05) * j as f64 / 20.0;
        let b2 = PI + 0.05 + (0.5 * PI - 0.05) * j as f64 / 20.0;
        edge = edge.max((rho1_linear(gas, 1.0, b1).unwrap_or(f64::NAN) - 1.0).abs());
        edge = edge.max((rho1_linear(gas, 1.0, b2).unwrap_or(f64::NAN) - 2.0).abs());
    }
    c.at_most(format!("rho1_sonic_circle[{tag}]"), edge, 1e-12);
    let h = 1e-3;
    let mut wall: f64 = 0.0;
    for i in 1..20 {
        let r = 0.05 * i as f64;
        let f = |b: f64| rho1_linear(gas, r, b).unwrap_or(f64::NAN);
        wall = wall.max(((-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h)).abs());
    }
    c.at_most(format!("rho1_wall_derivative[{tag}]"), wall, 10.0 * h * h);

    // matching at the front
    let map = RadialMap::new(gas);
    let gap = 1e-6;
    for beta in [0.0, 0.5 * PI, 1.25 * PI] {
        let name = format!("near_front[{tag},beta={beta:.4}]");
        let run = || -> Result<(f64, f64)> {
            let a = near_front_coefficient(gas, beta)?;
            let rho = rho1_linear(gas, map.forward(k0 * (1.0 - gap))?, beta)?;
            let rho_i = StateRegion::for_beta(beta).rho_first();
            let found = (rho - rho_i) / gap.sqrt();
            let cm = a * a * -integration_constant(gas, beta);
            Ok(((found / a - 1.0).abs(), (cm / k0 - 1.0).abs()))
        };
        match run() {
            Ok((rel, cm)) => {
                c.at_most(name.clone(), rel, 0.01);
                c.at_most(format!("{name}_c_matching"), cm, 1e-13);
            }
            Err(e) => c.failed(name, e),
        }
    }

    // wavefront layer
    let taus: Vec<f64> = (0..=80).map(|i| -4.0 + 0.05 * i as f64).collect();
    for beta in [0.0, 0.5 * PI, 0.9 * PI, 1.1 * PI, 1.4 * PI] {
        let name = format!("wavefront[{tag},beta={beta:.4}]");
        let branch = if beta < PI { Branch::Shock } else { Branch::Expansion };
        match ode_residual(gas, beta, branch, &taus) {
            Ok(rep) => {
                c.at_most(format!("{name}_ode"), rep.max_residual, 1e-10);
                if let Some(bracket) = rep.rh_bracket {
                    c.at_most(format!("{name}_rh_bracket"), bracket.abs(), 1e-12);
                }
            }
            Err(e) => c.failed(name.clone(), e),
        }
        if branch == Branch::Shock {
            match (profile_jump(gas, beta), jump_strength(gas, beta)) {
                (Ok(p), Ok(q)) => {
                    c.above(format!("{name}_entropy_inequality"), p, 0.0);
                    c.info(format!("{name}_jump_vs_profile"), (q - p).abs(), 1e-12);
                }
                (Err(e), _) | (_, Err(e)) => c.failed(name, e),
            }
        }
    }

    // corner region
    let mut sr: f64 = 0.0;
    let mut sd: f64 = 0.0;
    for i in -30..=30 {
        let bp = 0.1 * i as f64;
        for beta0 in [0.0, 0.7] {
            let Ok(geo) = CornerGeometry::new(gas, beta0, 0.0) else { continue };
            sr = sr.max(averaged_jump_residual(gas, geo.reflected(bp), geo.slope(bp), 1.5).abs());
            for chi in [0.0, 0.25, 0.5] {
                let geo = CornerGeometry::new(gas, beta0, chi).expect("chi in range");
                let r = averaged_jump_residual(gas, geo.diffracted(bp), geo.slope(bp), 0.5 * (3.0 - chi));
                sd = sd.max(r.abs());
            }
        }
    }
    c.at_most(format!("corner_reflected_jump[{tag}]"), sr, 1e-13);
    c.at_most(format!("corner_diffracted_jump[{tag}]"), sd, 1e-13);
    if let Ok(geo) = CornerGeometry::new(gas, 0.0, 0.0) {
        let bp: f64 = 100.0;
        let ratio = geo.reflected(bp) / (0.5 * k0 * bp * bp);
        c.at_most(format!("corner_reflected_asymptote[{tag}]"), (ratio - 1.0).abs(), 1e-3);
    }
    match corner_limit_errors(gas, -k0, 1.0, &[1.6e-3, 4e-4, 1e-4]) {
        Ok(errs) => {
            let dev = errs.windows(2).map(|w| (w[0] / w[1] / 2.0 - 1.0).abs()).fold(0.0, f64::max);
            c.at_most(format!("corner_limit_order[{tag}]"), dev, 0.15);
        }
        Err(e) => c.failed(format!("corner_limit_order[{tag}]"), e),
    }
    for m in [0.5, 1.0, 2.0] {
        if let Ok(res) = similarity_residual(gas, m) {
            c.info(format!("corner_similarity_residual[{tag},m={m}]"), res, f64::INFINITY);
        }
    }

    // velocity reconstruction
    match reconstruct_velocities(gas, &RadialGrid::standard(gas, 5)) {
        Ok(field) => c.at_most(format!("velocity_continuity[{tag}]"), field.continuity_residual, 1e-6),
        Err(e) => c.failed(format!("velocity_continuity[{tag}]"), e),
    }
}

/// Derived constants against hand-coded ideal-gas forms.
fn ideal_gas_checks(c: &mut Checks, gas: &GasModel) {
    let g = gas.gamma();
    c.at_most("ideal_kappa0", (gas.kappa0() - 1.0).abs(), 1e-14);
    c.at_most("ideal_theta", (gas.theta() - (g + 1.0) / 2.0).abs(), 1e-14);
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let beta = 0.9 * PI * i as f64 / 20.0;
        let d = 1.0 + 2.0 * (2.0 * beta / 3.0).cos();
        let cb = -3.0 * PI * PI * d * d / 8.0;
        let ts = (g + 1.0) * (g + 1.0) / (2.0 * PI * PI * d * d);
        worst = worst.max(((integration_constant(gas, beta) - cb) / cb).abs());
        let off = tau_shock_offset(gas, beta).unwrap_or(f64::NAN);
        worst = worst.max(((off - ts) / ts).abs());
    }
    c.at_most("ideal_wavefront_constants", worst, 1e-14);
}

/// Reference numbers at β = 0, b̃ = 0, γ = 1.4.
fn reference_anchors(c: &mut Checks, gas: &GasModel) {
    let off = tau_shock_offset(gas, 0.0).unwrap_or(f64::NAN);
    c.at_most("anchor_tau_shock_offset", (off - 0.03242).abs(), 1e-5);
    let jump = jump_strength(gas, 0.0).unwrap_or(f64::NAN);
    c.at_most("anchor_jump_strength", (jump - 0.018016).abs(), 1e-5);
    if let Ok(w) = wavefront_coeffs(gas, StateRegion::State1, 0.0) {
        c.info("anchor_profile_jump_ratio", jump / (-3.0 * w.nonlinearity / (4.0 * w.c)), 1.0);
    }
}

fn monotonicity_checks(c: &mut Checks, make: &dyn Fn(f64, f64) -> Result<GasModel>) {
    let gases: Result<Vec<GasModel>> = (0..=6).map(|i| make(1.4, 0.1 * i as f64)).collect();
    let gases = match gases {
        Ok(g) => g,
        Err(e) => return c.failed("monotonicity", e),
    };
    let jumps: Vec<f64> = gases.iter().map(|g| jump_strength(g, 0.0).unwrap_or(f64::NAN)).collect();
    let grads: Vec<f64> = gases.iter().map(expansion_gradient).collect();
    let offs: Vec<f64> = gases.iter().map(|g| tau_shock_offset(g, 0.0).unwrap_or(f64::NAN)).collect();
    let thetas: Vec<f64> = gases.iter().map(GasModel::theta).collect();
    c.above("monotone_jump_strength", strictly_monotone(&jumps, true), 0.0);
    c.above("monotone_expansion_gradient", strictly_monotone(&grads, false), 0.0);
    c.above("monotone_tau_shock_offset", strictly_monotone(&offs, true), 0.0);
    c.above("monotone_theta", strictly_monotone(&thetas, true), 0.0);
    let gap = gases
        .iter()
        .map(|g| match CornerGeometry::new(g, 0.0, 0.0) {
            Ok(geo) => (geo.sonic2() - geo.sonic1() - g.theta()).abs(),
            Err(_) => f64::NAN,
        })
        .fold(0.0, f64::max);
    c.at_most("sonic_gap_equals_theta", gap, 1e-14);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_suite_passes() {
        let rep = run_verify(&Scenario::default());
        let bad: Vec<_> = rep.failures().map(|c| (&c.name, c.measured)).collect();
        assert!(rep.passed, "{bad:?}");
        assert!(rep.checks.iter().any(|c| c.informational && c.name.starts_with("corner_similarity")));
    }

    #[test]
    fn corrupted_kappa0_fails_loci_only_where_expected() {
        let sc = Scenario { inject_fault: true, ..Scenario::default() };
        let rep = run_verify(&sc);
        assert!(!rep.passed);
        let get = |n: &str| rep.checks.iter().find(|c| c.name.starts_with(n)).unwrap();
        assert!(get("laplace_order_ratio").pass);
        assert!(!get("locus_incident").pass);
        assert!(!get("locus_reflected").pass);
    }
}
