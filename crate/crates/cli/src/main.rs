mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use shockfan::corner::CornerGeometry;
use shockfan::emit::{self, Format};
use shockfan::field::{assemble_field, Scenario};
use shockfan::hugoniot::{exact_incident_state, exact_reflected_state, SeriesState, StateRegion};
use shockfan::verify::run_verify;
use shockfan::wavefront::{wave_profile, Branch};
use shockfan::{Error, GasModel};

/// Weak shock diffraction at a right-angled wedge in a covolume gas.
#[derive(Parser, Debug)]
#[command(name = "shockfan", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Scenario flags. Each may also be given in the `--config` file under the
/// same name; flags win.
#[derive(Args, Debug, Default)]
struct Opts {
    /// key = value scenario file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Ratio of specific heats
    #[arg(long, global = true)]
    gamma: Option<String>,
    /// Covolume ratio b̃ = bρ0 in [0, 1)
    #[arg(long = "b-tilde", global = true)]
    b_tilde: Option<String>,
    /// Shock strength (ρ1 − ρ0)/ρ0 in (0, 0.2]
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Grid size as NXxNB (ξ points by β points)
    #[arg(long, global = true, value_name = "NXxNB")]
    grid: Option<String>,
    /// Axis shift of the corner shock parabolas
    #[arg(long, global = true)]
    beta0: Option<String>,
    /// Strength parameter of the diffracted corner shock, in [0, 1/2]
    #[arg(long, global = true)]
    chi: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<String>,
    /// Comma-separated b̃ values, e.g. 0,0.3,0.6
    #[arg(long = "sweep-b", global = true)]
    sweep_b: Option<String>,
    /// ξ range as LO,HI
    #[arg(long = "xi-range", global = true, allow_hyphen_values = true)]
    xi_range: Option<String>,
    /// β range as LO,HI
    #[arg(long = "beta-range", global = true)]
    beta_range: Option<String>,
    /// Half-width of the corner patch in β′
    #[arg(long = "beta-prime-max", global = true)]
    beta_prime_max: Option<String>,
    #[arg(long = "inject-fault", global = true, hide = true)]
    inject_fault: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sample the composite density field on the (ξ, β) grid
    Field,
    /// Exact and series shock states
    Hugoniot,
    /// Wavefront-layer profiles ρ̂(τ)
    Wavefront {
        /// Comma-separated angles
        #[arg(long, default_value = "0")]
        beta: String,
        /// τ range as LO,HI
        #[arg(long = "tau-range", default_value = "-4,1", allow_hyphen_values = true)]
        tau_range: String,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Corner shock parabolas and sonic lines
    Corner {
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Run the verification suite
    Verify,
}

#[derive(Debug)]
enum Failure {
    Run(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Out<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

struct Settings {
    scenario: Scenario,
    format: Option<Format>,
    out: Option<PathBuf>,
}

fn merged(opts: &Opts) -> Result<BTreeMap<String, String>, Error> {
    let mut map = match &opts.config {
        Some(p) => config::load(p)?,
        None => BTreeMap::new(),
    };
    let flags = [
        ("gamma", &opts.gamma),
        ("b-tilde", &opts.b_tilde),
        ("eps", &opts.eps),
        ("grid", &opts.grid),
        ("beta0", &opts.beta0),
        ("chi", &opts.chi),
        ("format", &opts.format),
        ("out", &opts.out),
        ("sweep-b", &opts.sweep_b),
        ("xi-range", &opts.xi_range),
        ("beta-range", &opts.beta_range),
        ("beta-prime-max", &opts.beta_prime_max),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            map.insert(k.to_string(), v.clone());
        }
    }
    Ok(map)
}

fn number(key: &str, s: &str) -> Result<f64, Error> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| usage(format!("--{key}: '{s}' is not a number")))
}

fn list(key: &str, s: &str) -> Result<Vec<f64>, Error> {
    s.split(',').map(|t| number(key, t)).collect()
}

fn pair(key: &str, s: &str) -> Result<[f64; 2], Error> {
    match list(key, s)?.as_slice() {
        &[a, b] => Ok([a, b]),
        _ => Err(usage(format!("--{key}: expected LO,HI, got '{s}'"))),
    }
}

fn settings(opts: &Opts) -> Result<Settings, Error> {
    let map = merged(opts)?;
    let mut sc = Scenario { inject_fault: opts.inject_fault, ..Scenario::default() };
    for (k, v) in &map {
        match k.as_str() {
            "gamma" => sc.gamma = number(k, v)?,
            "b-tilde" => sc.b_tilde = number(k, v)?,
            "eps" => sc.eps = number(k, v)?,
            "beta0" => sc.beta0 = number(k, v)?,
            "chi" => sc.chi = number(k, v)?,
            "beta-prime-max" => sc.beta_prime_max = number(k, v)?,
            "sweep-b" => sc.b_tilde_sweep = Some(list(k, v)?),
            "xi-range" => sc.grid.xi_range = Some(pair(k, v)?),
            "beta-range" => sc.grid.beta_range = pair(k, v)?,
            "grid" => {
                let parsed = v
                    .to_ascii_lowercase()
                    .split_once('x')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
                let Some((nx, nb)) = parsed else {
                    return Err(usage(format!("--grid: expected NXxNB, got '{v}'")));
                };
                sc.grid.n_xi = nx;
                sc.grid.n_beta = nb;
            }
            _ => {}
        }
    }
    let format = map.get("format").map(|f| f.parse()).transpose()?;
    let out = map.get("out").map(PathBuf::from);
    Ok(Settings { scenario: sc, format, out })
}

fn b_values(sc: &Scenario) -> Vec<f64> {
    sc.b_tilde_sweep.clone().unwrap_or_else(|| vec![sc.b_tilde])
}

fn deliver(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => emit::write_output(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_field(s: &Settings) -> Out<()> {
    s.scenario.validate()?;
    let format = s.format.unwrap_or(Format::Csv);
    let sweep = s.scenario.b_tilde_sweep.is_some();
    if sweep && s.out.is_none() {
        return Err(usage("--sweep-b with the field command needs --out").into());
    }
    for b in b_values(&s.scenario) {
        let sc = s.scenario.with_b_tilde(b);
        let rep = assemble_field(&sc)?;
        for f in &rep.failures {
            eprintln!("warning: {f}");
        }
        let text = emit::render(format, &sc, Some(rep.handoff), &rep.samples)?;
        let path = s.out.as_deref().map(|p| if sweep { emit::sweep_path(p, b) } else { p.to_path_buf() });
        deliver(path.as_deref(), &text)?;
    }
    Ok(())
}

fn cmd_hugoniot(s: &Settings) -> Out<()> {
    let sc = &s.scenario;
    if !(sc.eps > 0.0 && sc.eps <= shockfan::hugoniot::EPS_MAX) {
        return Err(usage(format!("eps must lie in (0, 0.2], got {}", sc.eps)).into());
    }
    let mut rows = Vec::new();
    for b in b_values(sc) {
        let gas = sc.with_b_tilde(b).gas()?;
        let c0 = gas.c0();
        let exact1 = exact_incident_state(&gas, sc.eps)?;
        let exact2 = exact_reflected_state(&gas, sc.eps)?.state;
        let one = SeriesState::new(&gas, StateRegion::State1, 0.0)?.evaluate(sc.eps, 2);
        let two = SeriesState::new(&gas, StateRegion::State2, std::f64::consts::PI)?.evaluate(sc.eps, 2);
        for (state, ex, se) in [("1", exact1, one), ("2", exact2, two)] {
            let pairs = [
                ("rho", ex.rho / gas.rho0(), se.rho),
                ("u", ex.u / c0, se.u),
                ("p", ex.p / gas.p0(), se.p),
                ("a", ex.sound_speed(&gas) / c0, se.a),
            ];
            for (q, e, v) in pairs {
                rows.push((b, state, q, e, v));
            }
        }
    }
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("b_tilde,state,quantity,exact,series,abs_error\n");
            for (b, st, q, e, v) in &rows {
                let _ = writeln!(t, "{b},{st},{q},{e:.16e},{v:.16e},{:.16e}", (e - v).abs());
            }
            t
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(b, st, q, e, v)| json!({"b_tilde": b, "state": st, "quantity": q, "exact": e, "series": v}))
                .collect();
            let doc = json!({"schema_version": 1, "eps": sc.eps, "gamma": sc.gamma, "rows": rows});
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain values"))
        }
    };
    deliver(s.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_wavefront(s: &Settings, betas: &str, tau_range: &str, n: usize) -> Out<()> {
    let betas = list("beta", betas)?;
    let [t0, t1] = pair("tau-range", tau_range)?;
    if n < 2 || !(t0 < t1) {
        return Err(usage("need n >= 2 and an increasing tau range").into());
    }
    let taus: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
    let mut profiles = Vec::new();
    for b in b_values(&s.scenario) {
        let gas = s.scenario.with_b_tilde(b).gas()?;
        for &beta in &betas {
            // the shock branch is cut at τ_s: beyond it the gas is undisturbed
            let mut prof = wave_profile(&gas, beta, &[])?;
            for &t in &taus {
                let v = match prof.tau_s {
                    Some(ts) if t > ts => prof.rho_i2,
                    _ => match shockfan::wavefront::rho_hat(&gas, beta, prof.branch, t) {
                        Ok(v) => v,
                        Err(Error::NegativeDiscriminant(_)) => continue,
                        Err(e) => return Err(e.into()),
                    },
                };
                prof.samples.push((t, v));
            }
            profiles.push((b, prof));
        }
    }
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("b_tilde,beta,branch,tau,rho_hat,tau_s\n");
            for (b, p) in &profiles {
                let branch = if p.branch == Branch::Shock { "shock" } else { "expansion" };
                let ts = p.tau_s.map(|v| format!("{v:.16e}")).unwrap_or_default();
                for (tau, v) in &p.samples {
                    let _ = writeln!(t, "{b},{:.16e},{branch},{tau:.16e},{v:.16e},{ts}", p.beta);
                }
            }
            t
        }
        Format::Json => {
            let items: Vec<_> = profiles.iter().map(|(b, p)| json!({"b_tilde": b, "profile": p})).collect();
            let doc = json!({"schema_version": 1, "gamma": s.scenario.gamma, "profiles": items});
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain values"))
        }
    };
    deliver(s.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_corner(s: &Settings, n: usize) -> Out<()> {
    let sc = &s.scenario;
    if n < 2 {
        return Err(usage("need n >= 2").into());
    }
    let mut rows = Vec::new();
    for b in b_values(sc) {
        let gas: GasModel = sc.with_b_tilde(b).gas()?;
        let geo = CornerGeometry::new(&gas, sc.beta0, sc.chi).map_err(|e| usage(e.to_string()))?;
        for i in 0..n {
            let bp = -sc.beta_prime_max + 2.0 * sc.beta_prime_max * i as f64 / (n - 1) as f64;
            rows.push((b, bp, geo.reflected(bp), geo.diffracted(bp), geo.sonic1(), geo.sonic2()));
        }
    }
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("b_tilde,beta_prime,s_reflected,s_diffracted,sonic1,sonic2\n");
            for (b, bp, r, d, s1, s2) in &rows {
                let _ = writeln!(t, "{b},{bp:.16e},{r:.16e},{d:.16e},{s1:.16e},{s2:.16e}");
            }
            t
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(b, bp, r, d, s1, s2)| {
                    json!({"b_tilde": b, "beta_prime": bp, "s_reflected": r, "s_diffracted": d, "sonic1": s1, "sonic2": s2})
                })
                .collect();
            let doc = json!({"schema_version": 1, "beta0": sc.beta0, "chi": sc.chi, "rows": rows});
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain values"))
        }
    };
    deliver(s.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_verify(s: &Settings) -> Out<()> {
    let rep = run_verify(&s.scenario);
    let text = match s.format {
        Some(Format::Json) => format!("{}\n", serde_json::to_string_pretty(&rep).expect("plain values")),
        _ => {
            let mut t = String::new();
            for c in &rep.checks {
                let tag = match (c.informational, c.pass) {
                    (true, _) => "INFO",
                    (false, true) => "PASS",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(t, "{tag} {} measured={:e} threshold={:e}", c.name, c.measured, c.threshold);
            }
            let failed = rep.failures().count();
            let _ = writeln!(t, "{} checks, {failed} failed", rep.checks.len());
            t
        }
    };
    deliver(s.out.as_deref(), &text)?;
    if rep.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: &Cli) -> Out<()> {
    let s = settings(&cli.opts)?;
    match &cli.cmd {
        Cmd::Field => cmd_field(&s),
        Cmd::Hugoniot => cmd_hugoniot(&s),
        Cmd::Wavefront { beta, tau_range, n } => cmd_wavefront(&s, beta, tau_range, *n),
        Cmd::Corner { n } => cmd_corner(&s, *n),
        Cmd::Verify => cmd_verify(&s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Run(e)) => {
            eprintln!("shockfan: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                _ => 1,
            })
        }
    }
}
