//! Composite density field on a (ξ, β) grid and the regime of the full
//! self-similar system at each sample.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corner::{corner_limit_of_linear, CornerCoords, CornerGeometry};
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::hugoniot::{exterior_first_order, Region, SeriesState, StateRegion, EPS_MAX};
use crate::linear_field::{rho1_linear, RadialMap};
use crate::wavefront::{wavefront_coeffs, Branch, TauConverter, SINGULAR_CONE};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SHOCKFAN_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Hyperbolic,
    Mixed,
    Sonic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Hyperbolic => "hyperbolic",
            Regime::Mixed => "mixed",
            Regime::Sonic => "sonic",
        }
    }
}

/// Local flow state for regime classification, in units of c0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalState {
    pub u: f64,
    pub v: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    /// V² + (U − ζ)² − a².
    pub discriminant: f64,
    pub regime: Regime,
    /// Double root V/(ζ(U − ζ)).
    pub streamline_root: Option<f64>,
    /// (V(U − ζ) ± a√disc)/(ζ((U − ζ)² − a²)), when real.
    pub acoustic_roots: Option<(f64, f64)>,
    /// ζ(U − ζ)((U − ζ)² − a²) vanishes: the system is degenerate here.
    pub degenerate: bool,
}

const REGIME_TOL: f64 = 1e-12;

pub fn classify_regime(state: LocalState, zeta: f64) -> RegimeReport {
    let LocalState { u, v, a } = state;
    let w = u - zeta;
    let disc = v * v + w * w - a * a;
    let scale = (v * v + w * w).max(a * a).max(f64::MIN_POSITIVE);
    let regime = if disc.abs() <= REGIME_TOL * scale {
        Regime::Sonic
    } else if disc > 0.0 {
        Regime::Hyperbolic
    } else {
        Regime::Mixed
    };
    let zw = zeta * w;
    let acoustic_den = zeta * (w * w - a * a);
    let degenerate = (zw * (w * w - a * a)).abs()
        <= REGIME_TOL * (zeta.abs() * scale.sqrt() * scale).max(f64::MIN_POSITIVE);
    let streamline_root = (zw.abs() > REGIME_TOL * zeta.abs() * scale.sqrt()).then(|| v / zw);
    let acoustic_roots = (!degenerate && disc >= 0.0 && acoustic_den != 0.0).then(|| {
        let s = a * disc.max(0.0).sqrt();
        ((v * w + s) / acoustic_den, (v * w - s) / acoustic_den)
    });
    RegimeReport { discriminant: disc, regime, streamline_root, acoustic_roots, degenerate }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Absolute ξ range; `None` means [0, 2κ₀].
    pub xi_range: Option<[f64; 2]>,
    pub beta_range: [f64; 2],
    pub n_xi: usize,
    pub n_beta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { xi_range: None, beta_range: [0.0, 1.5 * PI], n_xi: 64, n_beta: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub gamma: f64,
    pub b_tilde: f64,
    pub eps: f64,
    pub grid: GridSpec,
    pub b_tilde_sweep: Option<Vec<f64>>,
    pub beta0: f64,
    pub chi: f64,
    /// Corner patch half-width in β′.
    pub beta_prime_max: f64,
    #[serde(skip)]
    pub inject_fault: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            gamma: 1.4,
            b_tilde: 0.0,
            eps: 0.01,
            grid: GridSpec::default(),
            b_tilde_sweep: None,
            beta0: 0.0,
            chi: 0.0,
            beta_prime_max: 5.0,
            inject_fault: false,
        }
    }
}

impl Scenario {
    pub fn gas(&self) -> Result<GasModel> {
        let gas = GasModel::scaled(self.gamma, self.b_tilde)?;
        Ok(if self.inject_fault { gas.with_corrupted_kappa0(1.05) } else { gas })
    }

    pub fn with_b_tilde(&self, b_tilde: f64) -> Self {
        Scenario { b_tilde, b_tilde_sweep: None, ..self.clone() }
    }

    pub fn xi_range(&self, gas: &GasModel) -> [f64; 2] {
        self.grid.xi_range.unwrap_or([0.0, 2.0 * gas.kappa0()])
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if !(self.eps > 0.0 && self.eps <= EPS_MAX) {
            return usage(format!("eps must lie in (0, {EPS_MAX}], got {}", self.eps));
        }
        if self.grid.n_xi < 2 || self.grid.n_beta < 2 {
            return usage(format!(
                "grid needs at least 2 points per axis, got {}x{}",
                self.grid.n_xi, self.grid.n_beta
            ));
        }
        if !(0.0..=0.5).contains(&self.chi) {
            return usage(format!("chi must lie in [0, 1/2], got {}", self.chi));
        }
        if !(self.beta_prime_max > 0.0) || !self.beta0.is_finite() {
            return usage("beta_prime_max must be positive and beta0 finite".into());
        }
        let bs: Vec<f64> = match &self.b_tilde_sweep {
            Some(list) if list.is_empty() => return usage("empty b_tilde sweep".into()),
            Some(list) => list.clone(),
            None => vec![self.b_tilde],
        };
        for b in bs {
            let gas = self.with_b_tilde(b).gas().map_err(|e| Error::Usage(e.to_string()))?;
            let [x0, x1] = self.xi_range(&gas);
            if !(0.0 <= x0 && x0 < x1 && x1 <= 2.5 * gas.kappa0()) {
                return usage(format!(
                    "xi range [{x0}, {x1}] must be increasing within [0, 2.5*kappa0 = {}]",
                    2.5 * gas.kappa0()
                ));
            }
        }
        let [b0, b1] = self.grid.beta_range;
        if !(0.0 <= b0 && b0 < b1 && b1 <= 1.5 * PI) {
            return usage(format!("beta range [{b0}, {b1}] must be increasing within [0, 3pi/2]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub xi: f64,
    pub beta: f64,
    pub rho_ratio: f64,
    pub region: Region,
    pub regime: Regime,
}

/// Where the nonlinear layers take over from the first-order field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Handoff {
    /// Half-width of the wavefront strip around its anchor, ε^(3/2).
    pub wavefront_half_width: f64,
    /// Corner patch: |β − π| ≤ this.
    pub corner_beta_half_width: f64,
    /// Corner patch: |ξ − κ₀| ≤ this.
    pub corner_xi_half_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldReport {
    pub samples: Vec<FieldSample>,
    pub handoff: Handoff,
    /// Points that could not be evaluated, with the reason.
    pub failures: Vec<String>,
}

fn handoff(gas: &GasModel, sc: &Scenario) -> Handoff {
    let bpm = sc.beta_prime_max;
    Handoff {
        wavefront_half_width: sc.eps.powf(1.5),
        corner_beta_half_width: bpm * sc.eps.sqrt(),
        corner_xi_half_width: sc.eps * gas.kappa0() * bpm * bpm,
    }
}

struct Router<'a> {
    gas: &'a GasModel,
    eps: f64,
    geometry: CornerGeometry,
    handoff: Handoff,
    map: RadialMap,
}

impl Router<'_> {
    fn sample(&self, xi: f64, beta: f64) -> Result<FieldSample> {
        let (region, rho, adjacent) = self.route(xi, beta)?;
        let state = self.local_state(adjacent, beta, rho)?;
        Ok(FieldSample {
            xi,
            beta,
            rho_ratio: rho,
            region,
            regime: classify_regime(state, xi).regime,
        })
    }

    /// (region, ρ/ρ0, adjacent uniform state or None for the quiescent gas).
    fn route(&self, xi: f64, beta: f64) -> Result<(Region, f64, Option<StateRegion>)> {
        let gas = self.gas;
        let eps = self.eps;
        let k0 = gas.kappa0();
        let h = self.handoff;
        let by_beta = Some(StateRegion::for_beta(beta));

        if (beta - PI).abs() <= h.corner_beta_half_width && (xi - k0).abs() <= h.corner_xi_half_width {
            let c = CornerCoords::from_self_similar(gas, eps, xi, beta)?;
            let rho_bar = if c.beta_prime >= 0.0 {
                if c.r_tilde > self.geometry.reflected(c.beta_prime) { 1.0 } else { 2.0 }
            } else if c.r_tilde > self.geometry.diffracted(c.beta_prime) {
                1.0
            } else if c.r_prime < 0.0 {
                corner_limit_of_linear(gas, c.r_prime, c.beta_prime)?
            } else {
                1.0
            };
            return Ok((Region::CornerLayer, 1.0 + eps * rho_bar, by_beta));
        }

        let outside_incident = beta < 0.5 * PI && xi > k0 / beta.cos();
        if (beta - PI).abs() >= SINGULAR_CONE && !outside_incident {
            let conv = TauConverter::new(gas, beta, eps)?;
            if (xi - conv.xi_anchor).abs() <= h.wavefront_half_width {
                let region = StateRegion::for_beta(beta);
                let coeffs = wavefront_coeffs(gas, region, beta)?;
                let branch = match region {
                    StateRegion::State1 => Branch::Shock,
                    StateRegion::State2 => Branch::Expansion,
                };
                let rho_hat = coeffs.rho_hat(branch, conv.to_tau(xi))?;
                let rho = 1.0 + eps * region.rho_first() + eps * eps * rho_hat;
                return Ok((Region::WavefrontLayer, rho, by_beta));
            }
        }

        if xi < k0 {
            let r = self.map.forward(xi)?;
            let rho1 = rho1_linear(gas, r, beta)?;
            return Ok((Region::OmegaTilde, 1.0 + eps * rho1, by_beta));
        }
        let (region, rho1) = exterior_first_order(gas, xi, beta)?;
        let adjacent = match region {
            Region::Omega0 => None,
            Region::Omega2 => Some(StateRegion::State2),
            _ => Some(StateRegion::State1),
        };
        Ok((region, 1.0 + eps * rho1, adjacent))
    }

    /// Velocities of the adjacent uniform state at first order, sound speed
    /// from the local density.
    fn local_state(&self, adjacent: Option<StateRegion>, beta: f64, rho: f64) -> Result<LocalState> {
        let k0 = self.gas.kappa0();
        let a = k0 * (1.0 + self.gas.sound_speed_slope() * (rho - 1.0));
        let Some(region) = adjacent else {
            return Ok(LocalState { u: 0.0, v: 0.0, a });
        };
        // series ranges are closed; β at the Ω₁/Ω₂ border is shared
        let beta = match region {
            StateRegion::State1 => beta.min(PI),
            StateRegion::State2 => beta.max(PI),
        };
        let s = SeriesState::new(self.gas, region, beta)?;
        Ok(LocalState { u: self.eps * s.u[1], v: self.eps * s.v[1], a })
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Samples the composite field, row-major in β then ξ. Points that fail to
/// evaluate are listed in `failures` and left out of `samples`.
pub fn assemble_field(scenario: &Scenario) -> Result<FieldReport> {
    scenario.validate()?;
    let gas = scenario.gas()?;
    assemble_with_gas(scenario, &gas, thread_cap())
}

pub fn assemble_with_gas(scenario: &Scenario, gas: &GasModel, threads: Option<usize>) -> Result<FieldReport> {
    let router = Router {
        gas,
        eps: scenario.eps,
        geometry: CornerGeometry::new(gas, scenario.beta0, scenario.chi)?,
        handoff: handoff(gas, scenario),
        map: RadialMap::new(gas),
    };
    let [x0, x1] = scenario.xi_range(gas);
    let [b0, b1] = scenario.grid.beta_range;
    let points: Vec<(f64, f64)> = linspace(b0, b1, scenario.grid.n_beta)
        .flat_map(|b| linspace(x0, x1, scenario.grid.n_xi).map(move |x| (x, b)))
        .collect();
    let run = || -> Vec<Result<FieldSample>> {
        points.par_iter().map(|&(x, b)| router.sample(x, b)).collect()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut samples = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (res, &(x, b)) in results.into_iter().zip(&points) {
        match res {
            Ok(s) => samples.push(s),
            Err(e) => failures.push(format!("xi = {x}, beta = {b}: {e}")),
        }
    }
    Ok(FieldReport { samples, handoff: router.handoff, failures })
}
