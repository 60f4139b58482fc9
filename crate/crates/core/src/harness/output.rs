use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::codes::CodeRegistry;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "code_id,encoder_variant,epsilon,energy,p_x,shots,error_rate,std_error,master_seed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub code_id: String,
    pub encoder_variant: String,
    pub epsilon: f64,
    /// ħω₀ units.
    pub energy: f64,
    pub p_x: f64,
    pub shots: u64,
    pub error_rate: f64,
    pub std_error: f64,
    pub master_seed: u64,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv_to<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.code_id.clone(),
            r.encoder_variant.clone(),
            float(r.epsilon),
            float(r.energy),
            float(r.p_x),
            r.shots.to_string(),
            float(r.error_rate),
            float(r.std_error),
            r.master_seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Internal(format!("csv flush: {e}")))?;
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_csv_to(records, &mut buf).map_err(|e| match e {
        Error::Internal(msg) => Error::io(path, std::io::Error::other(msg)),
        other => other,
    })?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Reads a sweep CSV, insisting on the exact header.
pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text.lines().next().unwrap_or_default().trim_end_matches('\r');
    if first != CSV_HEADER {
        return Err(Error::Schema(format!(
            "{}: header is '{first}', expected '{CSV_HEADER}'",
            path.display()
        )));
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<SweepRecord>().enumerate() {
        let r = row.map_err(|e| Error::Schema(format!("{} row {}: {e}", path.display(), i + 2)))?;
        if !(0.0..=1.0).contains(&r.error_rate) {
            return Err(Error::Schema(format!(
                "{} row {}: error_rate {} outside [0, 1]",
                path.display(),
                i + 2,
                r.error_rate
            )));
        }
        out.push(r);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSeed {
    pub code_id: String,
    pub epsilon_index: usize,
    pub p_x_index: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeEntry {
    pub code_id: String,
    pub energy_coefficient: String,
    pub gates: Vec<(String, usize)>,
}

/// Everything needed to rerun a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    pub axis: String,
    pub axis_values: Vec<f64>,
    pub codes: Vec<CodeEntry>,
    pub registry: RegistrySnapshot,
    pub cells: Vec<CellSeed>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegistrySnapshot {
    pub encoders: Vec<String>,
    pub extractors: Vec<String>,
}

impl Manifest {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        config.validate()?;
        let axis = config.axis()?;
        let codes = config
            .code_ids
            .iter()
            .map(|id| -> Result<CodeEntry> {
                let canonical = super::canonical_id(id)?;
                let coef = super::target_coefficient(id)?;
                let gates = match id.strip_prefix(super::GATE_PREFIX) {
                    Some(g) => vec![(g.to_ascii_uppercase(), 1)],
                    None => crate::codes::resolve_code(id)?
                        .circuit()?
                        .gate_counts()
                        .into_iter()
                        .map(|(k, n)| (k.name().to_string(), n))
                        .collect(),
                };
                Ok(CodeEntry {
                    code_id: canonical,
                    energy_coefficient: coef.to_string(),
                    gates,
                })
            })
            .collect::<Result<_>>()?;
        let reg = CodeRegistry::global();
        let families = [
            crate::codes::Family::Bare,
            crate::codes::Family::Repetition(3),
            crate::codes::Family::Perfect5,
            crate::codes::Family::Steane7,
        ];
        let encoders = families
            .iter()
            .flat_map(|f| {
                reg.encoder_names(*f)
                    .into_iter()
                    .map(move |n| format!("{}:{n}", f.key()))
            })
            .collect();
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            axis: match axis {
                super::SweepAxis::Epsilon(_) => "epsilon".into(),
                super::SweepAxis::Energy(_) => "energy".into(),
            },
            axis_values: axis.values().to_vec(),
            codes,
            registry: RegistrySnapshot {
                encoders,
                extractors: reg.extractor_names().into_iter().map(String::from).collect(),
            },
            cells: super::cell_seeds(config)?,
        })
    }
}

pub fn write_manifest(config: &SweepConfig, path: &Path) -> Result<()> {
    let manifest = Manifest::new(config)?;
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Internal(format!("manifest: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> SweepRecord {
        SweepRecord {
            code_id: "rep3:direct".into(),
            encoder_variant: "direct".into(),
            epsilon: 0.1 + 0.2,
            energy: std::f64::consts::PI * 1e5,
            p_x: 0.02,
            shots: 20000,
            error_rate: 1.0 / 3.0,
            std_error: 3.3e-3,
            master_seed: u64::MAX,
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv_to(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn record_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv(&[record()], &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), vec![record()]);
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "code,error\nx,0.1\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::Schema(_))));
        assert!(matches!(
            read_csv(&dir.path().join("missing.csv")),
            Err(Error::Io { .. })
        ));
    }
}
