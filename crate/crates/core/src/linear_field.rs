//! First-order field in the diffracted region ξ < κ₀.
//!
//! Under r = (ξ/κ₀)/(1 + √(1 − (ξ/κ₀)²)) the density perturbation solves
//! r(rρ_r)_r + ρ_ββ = 0 on the unit disc sector 0 ≤ β ≤ 3π/2 and has a
//! closed form. Velocity perturbations are not closed-form; they are
//! recovered by radial quadrature of the momentum relations.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::hugoniot::StateRegion;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Distance from β = π inside which the near-front coefficient is refused.
pub const SINGULAR_BETA_TOL: f64 = 1e-9;

/// Lower cutoff ξ_min/κ₀ for velocity grids.
pub const XI_MIN_FRACTION: f64 = 0.05;

/// Default continuity tolerance for velocity reconstruction.
pub const DEFAULT_CONTINUITY_TOL: f64 = 1e-6;

/// Radial node count that meets [`DEFAULT_CONTINUITY_TOL`] for γ ≤ 5/3,
/// b̃ ≤ 0.6 (residual ≈ 3e−7 at γ = 1.4, b̃ = 0.3).
pub const DEFAULT_RADIAL_NODES: usize = 32769;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialMap {
    kappa0: f64,
}

impl RadialMap {
    pub fn new(gas: &GasModel) -> Self {
        RadialMap { kappa0: gas.kappa0() }
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn forward(&self, xi: f64) -> Result<f64> {
        if !(0.0..=self.kappa0).contains(&xi) {
            return Err(Error::domain(format!(
                "xi = {xi} outside [0, kappa0 = {}]",
                self.kappa0
            )));
        }
        let x = xi / self.kappa0;
        Ok(x / (1.0 + (1.0 - x * x).sqrt()))
    }

    pub fn inverse(&self, r: f64) -> f64 {
        self.kappa0 * 2.0 * r / (1.0 + r * r)
    }

    /// dξ/dr.
    pub fn derivative(&self, r: f64) -> f64 {
        let q = 1.0 + r * r;
        self.kappa0 * 2.0 * (1.0 - r * r) / (q * q)
    }
}

fn check_disc(r: f64, beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("mapped radius r = {r} outside [0, 1]")));
    }
    if !(0.0..=1.5 * PI).contains(&beta) {
        return Err(Error::domain(format!("beta = {beta} outside [0, 3pi/2]")));
    }
    Ok(())
}

struct Parts {
    n: f64,
    d: f64,
    r13: f64,
    r23: f64,
    cos: f64,
    sin: f64,
}

fn parts(r: f64, beta: f64) -> Parts {
    let r13 = r.cbrt();
    let r23 = r13 * r13;
    let r43 = r23 * r23;
    let (sin, cos) = (2.0 * beta / 3.0).sin_cos();
    Parts {
        n: SQRT3 * (1.0 - r43),
        d: 1.0 + r43 + 4.0 * r23 * cos,
        r13,
        r23,
        cos,
        sin,
    }
}

/// ρ̃⁽¹⁾(r, β). The arctangent is the two-argument form; its numerator is
/// non-negative on the disc so the angle stays in [0, π].
pub fn rho1_linear(_gas: &GasModel, r: f64, beta: f64) -> Result<f64> {
    check_disc(r, beta)?;
    Ok(rho1_unchecked(r, beta))
}

pub(crate) fn rho1_unchecked(r: f64, beta: f64) -> f64 {
    let p = parts(r, beta);
    1.0 + p.n.atan2(p.d) / PI
}

/// (∂ρ̃/∂r, ∂ρ̃/∂β), analytic; r must be positive.
pub fn rho1_gradient(r: f64, beta: f64) -> Result<(f64, f64)> {
    check_disc(r, beta)?;
    if r == 0.0 {
        return Err(Error::domain("radial derivative is unbounded at r = 0"));
    }
    let p = parts(r, beta);
    let q = p.n * p.n + p.d * p.d;
    let n_r = -SQRT3 * 4.0 / 3.0 * p.r13;
    let d_r = 4.0 / 3.0 * p.r13 + 8.0 / 3.0 * p.cos / p.r13;
    let d_b = -8.0 / 3.0 * p.r23 * p.sin;
    Ok((
        (n_r * p.d - p.n * d_r) / (q * PI),
        -p.n * d_b / (q * PI),
    ))
}

/// ∂²ρ̃/∂β², analytic.
pub fn rho1_beta_beta(r: f64, beta: f64) -> f64 {
    let p = parts(r, beta);
    let q = p.n * p.n + p.d * p.d;
    let d_b = -8.0 / 3.0 * p.r23 * p.sin;
    let d_bb = -16.0 / 9.0 * p.r23 * p.cos;
    (-p.n * d_bb / q + 2.0 * p.n * p.d * d_b * d_b / (q * q)) / PI
}

/// Amplitude of the √(1 − ξ/κ₀) term of ρ̃⁽¹⁾ near the sonic circle.
pub fn near_front_coefficient(_gas: &GasModel, beta: f64) -> Result<f64> {
    if !(0.0..=1.5 * PI).contains(&beta) {
        return Err(Error::domain(format!("beta = {beta} outside [0, 3pi/2]")));
    }
    if (beta - PI).abs() < SINGULAR_BETA_TOL {
        return Err(Error::SingularDirection { beta, tolerance: SINGULAR_BETA_TOL });
    }
    Ok((2.0_f64 / 3.0).sqrt() * 2.0 / (PI * (1.0 + 2.0 * (2.0 * beta / 3.0).cos())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Composite {
    pub rho_ratio: f64,
    /// Whether ε < 1 − ξ/κ₀ < 1, where the two-term form is meaningful.
    pub valid: bool,
}

/// ρ/ρ0 ≈ 1 + ερ_i⁽¹⁾ + ε·A(β)·√(1 − ξ/κ₀) just inside the sonic circle.
pub fn composite_first_order(gas: &GasModel, eps: f64, xi: f64, beta: f64) -> Result<Composite> {
    let coef = near_front_coefficient(gas, beta)?;
    let k0 = gas.kappa0();
    if !(0.0..=k0).contains(&xi) {
        return Err(Error::domain(format!("xi = {xi} outside [0, kappa0 = {k0}]")));
    }
    let gap = 1.0 - xi / k0;
    let rho_i = StateRegion::for_beta(beta).rho_first();
    Ok(Composite {
        rho_ratio: 1.0 + eps * rho_i + coef * eps * gap.sqrt(),
        valid: gap > eps && gap < 1.0,
    })
}

/// Nodes for velocity reconstruction: uniform in ln r from r(ξ_min) to 1,
/// one column per listed β.
#[derive(Debug, Clone, Serialize)]
pub struct RadialGrid {
    pub xi_min: f64,
    pub n_r: usize,
    pub betas: Vec<f64>,
    pub tolerance: f64,
}

impl RadialGrid {
    pub fn new(gas: &GasModel, n_r: usize, betas: Vec<f64>) -> Self {
        RadialGrid {
            xi_min: XI_MIN_FRACTION * gas.kappa0(),
            n_r,
            betas,
            tolerance: DEFAULT_CONTINUITY_TOL,
        }
    }

    /// `n_beta` equally spaced angles on [0, 3π/2].
    pub fn uniform(gas: &GasModel, n_r: usize, n_beta: usize) -> Self {
        let n = n_beta.max(2);
        let betas = (0..n).map(|j| 1.5 * PI * j as f64 / (n - 1) as f64).collect();
        Self::new(gas, n_r, betas)
    }

    /// [`DEFAULT_RADIAL_NODES`] radial nodes and `n_beta` uniform angles.
    pub fn standard(gas: &GasModel, n_beta: usize) -> Self {
        Self::uniform(gas, DEFAULT_RADIAL_NODES, n_beta)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Reconstructed first-order field. Velocities are in units of a0 = κ₀c0,
/// so Ũ = cos β, Ṽ = −sin β just inside the front in state 1. The entropy
/// perturbation vanishes identically and is not stored.
#[derive(Debug, Clone, Serialize)]
pub struct LinearField {
    pub r: Vec<f64>,
    pub xi: Vec<f64>,
    pub betas: Vec<f64>,
    /// `rho[j][i]` at (r[i], betas[j]); same layout for the others.
    pub rho: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub v_beta: Vec<Vec<f64>>,
    pub continuity_residual: f64,
}

impl LinearField {
    pub fn s1(&self, _i_beta: usize, _i_r: usize) -> f64 {
        0.0
    }
}

/// Ũ(r) = Ũ(1) − ρ̃(1) + κ₀ρ̃(r)/ξ − ∫_r^1 ρ̃(1 − r²)/(2r²) dr and
/// Ṽ(r) = Ṽ(1) − ∫_r^1 ρ̃_β(1 − r²)/(2r²) dr, integrated by the trapezoidal
/// rule in s = ln r. Fails with [`Error::GridTooCoarse`] when the
/// continuity residual exceeds the grid tolerance.
pub fn reconstruct_velocities(gas: &GasModel, grid: &RadialGrid) -> Result<LinearField> {
    let map = RadialMap::new(gas);
    let k0 = gas.kappa0();
    if grid.n_r < 3 {
        return Err(Error::Usage(format!("need at least 3 radial nodes, got {}", grid.n_r)));
    }
    if !(grid.xi_min > 0.0 && grid.xi_min < k0) {
        return Err(Error::domain(format!("xi_min = {} outside (0, kappa0)", grid.xi_min)));
    }
    for &b in &grid.betas {
        check_disc(0.5, b)?;
    }
    let s0 = map.forward(grid.xi_min)?.ln();
    let n = grid.n_r;
    let h = -s0 / (n - 1) as f64;
    let r: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { 1.0 } else { (s0 + h * i as f64).exp() })
        .collect();
    let xi: Vec<f64> = r.iter().map(|&ri| map.inverse(ri)).collect();
    let weight: Vec<f64> = r.iter().map(|&ri| (1.0 - ri * ri) / (2.0 * ri)).collect();

    let columns: Vec<_> = grid
        .betas
        .par_iter()
        .map(|&beta| {
            let rho: Vec<f64> = r.iter().map(|&ri| rho1_unchecked(ri, beta)).collect();
            let (u_edge, v_edge, v_beta_edge) = if beta < PI {
                (beta.cos(), -beta.sin(), -beta.cos())
            } else {
                (0.0, 0.0, 0.0)
            };
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            let mut vb = vec![0.0; n];
            let (mut iu, mut iv, mut ivb) = (0.0, 0.0, 0.0);
            let f = |i: usize| {
                if i == n - 1 {
                    // weight vanishes on the sonic circle
                    return (0.0, 0.0, 0.0);
                }
                let (_, rb) = rho1_gradient(r[i], beta).unwrap_or((0.0, 0.0));
                (
                    rho[i] * weight[i],
                    rb * weight[i],
                    rho1_beta_beta(r[i], beta) * weight[i],
                )
            };
            let mut prev = f(n - 1);
            for i in (0..n).rev() {
                if i < n - 1 {
                    let cur = f(i);
                    iu += 0.5 * h * (cur.0 + prev.0);
                    iv += 0.5 * h * (cur.1 + prev.1);
                    ivb += 0.5 * h * (cur.2 + prev.2);
                    prev = cur;
                }
                u[i] = u_edge - rho[n - 1] + k0 * rho[i] / xi[i] - iu;
                v[i] = v_edge - iv;
                vb[i] = v_beta_edge - ivb;
            }
            (rho, u, v, vb)
        })
        .collect();

    let mut field = LinearField {
        r,
        xi,
        betas: grid.betas.clone(),
        rho: Vec::with_capacity(columns.len()),
        u: Vec::with_capacity(columns.len()),
        v: Vec::with_capacity(columns.len()),
        v_beta: Vec::with_capacity(columns.len()),
        continuity_residual: 0.0,
    };
    for (rho, u, v, vb) in columns {
        field.rho.push(rho);
        field.u.push(u);
        field.v.push(v);
        field.v_beta.push(vb);
    }
    field.continuity_residual = continuity_residual(gas, &field, h);
    if !(field.continuity_residual <= grid.tolerance) {
        return Err(Error::GridTooCoarse {
            residual: field.continuity_residual,
            tolerance: grid.tolerance,
        });
    }
    Ok(field)
}

/// max |−ξ²ρ̃_ξ + κ₀ξŨ_ξ + κ₀(Ũ + Ṽ_β)| over interior nodes with r ≤ 0.9 and
/// |β − π| ≥ 0.3, with Ũ_ξ from centered differences of the grid values.
fn continuity_residual(gas: &GasModel, field: &LinearField, h: f64) -> f64 {
    let k0 = gas.kappa0();
    let map = RadialMap::new(gas);
    let n = field.r.len();
    let mut worst: f64 = 0.0;
    for (j, &beta) in field.betas.iter().enumerate() {
        if (beta - PI).abs() < 0.3 {
            continue;
        }
        for i in 1..n - 1 {
            let r = field.r[i];
            if r > 0.9 {
                break;
            }
            let dxi_ds = r * map.derivative(r);
            let xi = field.xi[i];
            let (rho_r, _) = rho1_gradient(r, beta).expect("interior node");
            let rho_xi = rho_r / map.derivative(r);
            let u_xi = (field.u[j][i + 1] - field.u[j][i - 1]) / (2.0 * h) / dxi_ds;
            let res = -xi * xi * rho_xi + k0 * xi * u_xi + k0 * (field.u[j][i] + field.v_beta[j][i]);
            worst = worst.max(res.abs());
        }
    }
    worst
}

/// Sample points of the residual probes: r = 0.05, 0.10, …, 0.95 and 65
/// angles spanning [0.05, 3π/2 − 0.05].
fn probe_points() -> impl Iterator<Item = (f64, f64)> {
    (1..=19).flat_map(|i| {
        let r = 0.05 * i as f64;
        (0..65).map(move |j| {
            let beta = 0.05 + (1.5 * PI - 0.1) * j as f64 / 64.0;
            (r, beta)
        })
    })
}

/// Max centered-difference residual of r(rρ_r)_r + ρ_ββ on ρ̃⁽¹⁾.
pub fn laplace_residual(gas: &GasModel, h: f64) -> f64 {
    laplace_residual_away_from_q(gas, h, 0.0)
}

/// As [`laplace_residual`], skipping probes closer than `radius` to Q
/// (r = 1, β = π), where the jump of ρ̃ dominates the truncation error.
pub fn laplace_residual_away_from_q(_gas: &GasModel, h: f64, radius: f64) -> f64 {
    let f = rho1_unchecked;
    probe_points()
        .filter(|&(r, b)| (r * r + 2.0 * r * b.cos() + 1.0).sqrt() >= radius)
        .map(|(r, b)| {
            let radial = r
                * ((r + 0.5 * h) * (f(r + h, b) - f(r, b)) - (r - 0.5 * h) * (f(r, b) - f(r - h, b)))
                / (h * h);
            let angular = (f(r, b + h) - 2.0 * f(r, b) + f(r, b - h)) / (h * h);
            (radial + angular).abs()
        })
        .fold(0.0, f64::max)
}

/// Same probe in the unmapped variable:
/// ξ²((1 − (ξ/κ₀)²)ρ_ξ)_ξ + ρ_ββ + ξρ_ξ with step h in ξ. The outermost
/// probe is about 1.3e−3·κ₀ inside the front, so h must stay well below that.
pub fn laplace_residual_xi(gas: &GasModel, h: f64) -> f64 {
    let map = RadialMap::new(gas);
    let k0 = gas.kappa0();
    let f = |xi: f64, b: f64| rho1_unchecked(map.forward(xi).expect("probe inside disc"), b);
    let w = |xi: f64| 1.0 - (xi / k0) * (xi / k0);
    probe_points()
        .map(|(r, b)| {
            let xi = map.inverse(r);
            let (fp, f0, fm) = (f(xi + h, b), f(xi, b), f(xi - h, b));
            let flux = (w(xi + 0.5 * h) * (fp - f0) - w(xi - 0.5 * h) * (f0 - fm)) / (h * h);
            let angular = (f(xi, b + h) - 2.0 * f0 + f(xi, b - h)) / (h * h);
            let first = xi * (fp - fm) / (2.0 * h);
            (xi * xi * flux + angular + first).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas(b: f64) -> GasModel {
        GasModel::scaled(1.4, b).unwrap()
    }

    #[test]
    fn map_endpoints_and_round_trip() {
        let g = gas(0.3);
        let m = RadialMap::new(&g);
        assert_eq!(m.forward(0.0).unwrap(), 0.0);
        assert_eq!(m.forward(g.kappa0()).unwrap(), 1.0);
        assert!(m.forward(1.1 * g.kappa0()).is_err());
        for k in 0..=100 {
            let xi = g.kappa0() * k as f64 / 100.0;
            assert!((m.inverse(m.forward(xi).unwrap()) - xi).abs() < 1e-14);
        }
    }

    #[test]
    fn vertex_and_edge_values() {
        let g = gas(0.0);
        assert!((rho1_linear(&g, 0.0, 0.7).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((rho1_linear(&g, 1.0, PI / 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((rho1_linear(&g, 1.0, 4.0 * PI / 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(rho1_linear(&g, 1.01, 0.0).is_err());
        assert!(rho1_linear(&g, 0.5, 5.0).is_err());
    }

    #[test]
    fn gradient_matches_differences() {
        for (r, b) in [(0.3, 0.4), (0.7, 2.0), (0.5, 4.0)] {
            let (gr, gb) = rho1_gradient(r, b).unwrap();
            let h = 1e-6;
            let fr = (rho1_unchecked(r + h, b) - rho1_unchecked(r - h, b)) / (2.0 * h);
            let fb = (rho1_unchecked(r, b + h) - rho1_unchecked(r, b - h)) / (2.0 * h);
            assert!((gr - fr).abs() < 1e-8 && (gb - fb).abs() < 1e-8);
            let (_, gbp) = rho1_gradient(r, b + h).unwrap();
            let (_, gbm) = rho1_gradient(r, b - h).unwrap();
            assert!(((gbp - gbm) / (2.0 * h) - rho1_beta_beta(r, b)).abs() < 1e-7);
        }
    }

    #[test]
    fn near_front_values() {
        let g = gas(0.0);
        let c0 = near_front_coefficient(&g, 0.0).unwrap();
        assert!((c0 - 2.0 * 6.0_f64.sqrt() / (9.0 * PI)).abs() < 1e-15);
        assert!(near_front_coefficient(&g, 1.5 * PI).unwrap() < 0.0);
        assert!(matches!(
            near_front_coefficient(&g, PI + 1e-10),
            Err(Error::SingularDirection { .. })
        ));
        assert!(near_front_coefficient(&g, PI - 1e-6).unwrap() > 1e5);
    }

    #[test]
    fn composite_values() {
        let g = gas(0.0);
        let c = composite_first_order(&g, 0.01, 1.0, 0.5).unwrap();
        assert_eq!(c.rho_ratio, 1.01);
        assert!(!c.valid);
        let c = composite_first_order(&g, 1e-3, 1.0 - 1e-2, 0.0).unwrap();
        let expect = 1.0 + 1e-3 + 2.0 * 6.0_f64.sqrt() / (9.0 * PI) * 1e-4;
        assert!((c.rho_ratio - expect).abs() < 1e-15);
        assert!(c.valid);
        let eps: f64 = 1e-2;
        let c = composite_first_order(&g, eps, 1.0 - eps * eps / 2.0, 0.0).unwrap();
        assert!(!c.valid);
    }

    #[test]
    fn wall_velocity_and_entropy_vanish() {
        let g = gas(0.3);
        let grid = RadialGrid::uniform(&g, 513, 7).with_tolerance(f64::INFINITY);
        let field = reconstruct_velocities(&g, &grid).unwrap();
        assert!(field.v[0].iter().all(|v| v.abs() < 1e-15));
        assert_eq!(field.s1(3, 100), 0.0);
        let last = field.r.len() - 1;
        assert!((field.u[0][last] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn continuity_residual_is_second_order() {
        let g = gas(0.0);
        let res = |n: usize| {
            let grid = RadialGrid::uniform(&g, n, 13).with_tolerance(f64::INFINITY);
            reconstruct_velocities(&g, &grid).unwrap().continuity_residual
        };
        let (a, b) = (res(801), res(1601));
        assert!((a / b - 4.0).abs() < 0.5, "{a} {b}");
    }

    #[test]
    fn standard_grid_meets_tolerance() {
        for b in [0.0, 0.6] {
            let g = GasModel::scaled(5.0 / 3.0, b).unwrap();
            let field = reconstruct_velocities(&g, &RadialGrid::standard(&g, 5)).unwrap();
            assert!(field.continuity_residual < DEFAULT_CONTINUITY_TOL);
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        let g = gas(0.0);
        let grid = RadialGrid::uniform(&g, 101, 13);
        match reconstruct_velocities(&g, &grid) {
            Err(Error::GridTooCoarse { residual, tolerance }) => {
                assert!(residual > tolerance);
            }
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn xi_form_probe_converges() {
        let g = gas(0.3);
        // the outermost probe sits 2e-3 inside the front, so h must be smaller
        let a = laplace_residual_xi(&g, 2e-4);
        let b = laplace_residual_xi(&g, 1e-4);
        assert!((a / b - 4.0).abs() < 0.5, "{a} {b}");
    }

    #[test]
    fn probe_error_concentrates_at_q() {
        let g = gas(0.0);
        let all = laplace_residual(&g, 1e-3);
        let away = laplace_residual_away_from_q(&g, 1e-3, 0.25);
        assert!(away < 1e-4 && all > 100.0 * away, "{all} {away}");
    }
}
