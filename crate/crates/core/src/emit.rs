//! CSV and JSON serialization of sampled fields.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSample, Handoff, Scenario};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "xi,beta,rho_ratio,region,regime";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Usage(format!("unknown format '{s}', expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldDocument {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub handoff: Option<Handoff>,
    pub samples: Vec<FieldSample>,
}

fn nonempty(samples: &[FieldSample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Usage("no samples to write".into()));
    }
    Ok(())
}

/// Floats are written with 17 significant digits.
pub fn to_csv(samples: &[FieldSample]) -> Result<String> {
    nonempty(samples)?;
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{}",
            s.xi,
            s.beta,
            s.rho_ratio,
            s.region.as_str(),
            s.regime.as_str()
        );
    }
    Ok(out)
}

pub fn to_json(scenario: &Scenario, handoff: Option<Handoff>, samples: &[FieldSample]) -> Result<String> {
    nonempty(samples)?;
    let doc = FieldDocument {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.clone(),
        handoff,
        samples: samples.to_vec(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Usage(format!("serialization failed: {e}")))
}

pub fn render(
    format: Format,
    scenario: &Scenario,
    handoff: Option<Handoff>,
    samples: &[FieldSample],
) -> Result<String> {
    match format {
        Format::Csv => to_csv(samples),
        Format::Json => to_json(scenario, handoff, samples),
    }
}

pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// `out.csv` with b̃ = 0.3 becomes `out_b0.3.csv`.
pub fn sweep_path(path: &Path, b_tilde: f64) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_b{b_tilde}.{}", ext.to_string_lossy()),
        None => format!("{stem}_b{b_tilde}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Regime;
    use crate::hugoniot::Region;

    fn sample() -> FieldSample {
        FieldSample {
            xi: 0.1,
            beta: 2.0 / 3.0,
            rho_ratio: 1.0 + 1e-17,
            region: Region::OmegaTilde,
            regime: Regime::Mixed,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample();
        let text = to_csv(&[s]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0].parse::<f64>().unwrap(), s.xi);
        assert_eq!(row[1].parse::<f64>().unwrap(), s.beta);
        assert_eq!(&row[3..], ["omega_tilde", "mixed"]);
    }

    #[test]
    fn json_round_trip() {
        let s = sample();
        let text = to_json(&Scenario::default(), None, &[s]).unwrap();
        let doc: FieldDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.schema_version, 1);
        assert_eq!(doc.samples, vec![s]);
        assert_eq!(doc.scenario, Scenario::default());
    }

    #[test]
    fn empty_and_unwritable() {
        assert!(matches!(to_csv(&[]), Err(Error::Usage(_))));
        let bad = Path::new("/nonexistent-dir/x.csv");
        match write_output(bad, "a") {
            Err(Error::Io { path, .. }) => assert_eq!(path, bad),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_names() {
        assert_eq!(sweep_path(Path::new("d/out.csv"), 0.3), Path::new("d/out_b0.3.csv"));
        assert_eq!(sweep_path(Path::new("out"), 0.0), Path::new("out_b0"));
    }
}
