//! Monte Carlo sweeps over codes, noise strengths and channel rates.
//!
//! Every cell `(code, ε index, p_x index)` gets its own seed derived from
//! the master seed, and shot `i` of a cell draws from stream `i` of that
//! seed, so results do not depend on how work is scheduled.

mod config;
mod output;
mod presets;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::circuit::{Circuit, Executor, RngSource, ShotOutcome};
use crate::codes::resolve_code;
use crate::error::{Error, Result};
use crate::gates::{epsilon_for_energy, estimate_gate_error, gate_catalog, EnergyCoefficient, GateSpec, NoiseModel};

pub use config::{GridSpec, SweepAxis, SweepConfig, MIN_SHOTS};
pub use output::{
    read_csv, read_manifest, write_csv, write_csv_to, write_manifest, CellSeed, Manifest, SweepRecord, CSV_HEADER,
};
pub use presets::{preset, PRESET_NAMES};

/// Prefix for code ids that sweep a single catalog gate instead of a
/// protected computation.
pub const GATE_PREFIX: &str = "gate:";

/// Seed for one sweep cell.
pub fn cell_seed(master_seed: u64, code_id: &str, epsilon_index: usize, p_x_index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update((code_id.len() as u64).to_le_bytes());
    h.update(code_id.as_bytes());
    h.update((epsilon_index as u64).to_le_bytes());
    h.update((p_x_index as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

/// Mismatch fraction against `ideal` and its binomial standard error.
pub fn error_metric(outcomes: &[ShotOutcome], ideal: bool) -> Result<(f64, f64)> {
    if outcomes.is_empty() {
        return Err(Error::invalid("no outcomes to score"));
    }
    let errors = outcomes.iter().filter(|o| o.logical_bit != ideal).count();
    Ok(binomial_estimate(errors as u64, outcomes.len() as u64))
}

pub(crate) fn binomial_estimate(errors: u64, shots: u64) -> (f64, f64) {
    let e = errors as f64 / shots as f64;
    (e, (e * (1.0 - e) / shots as f64).sqrt())
}

enum Target {
    Code {
        id: String,
        variant: String,
        circuit: Circuit,
        coefficient: EnergyCoefficient,
    },
    Gate {
        id: String,
        spec: &'static GateSpec,
    },
}

impl Target {
    fn resolve(id: &str) -> Result<Target> {
        if let Some(name) = id.strip_prefix(GATE_PREFIX) {
            let spec = gate_catalog(name)?;
            return Ok(Target::Gate {
                id: format!("{GATE_PREFIX}{}", spec.name()),
                spec,
            });
        }
        let code = resolve_code(id)?;
        let circuit = code.circuit()?;
        Ok(Target::Code {
            id: code.id.clone(),
            variant: code.encoder_variant().to_string(),
            coefficient: circuit.energy_coefficient(),
            circuit,
        })
    }

    fn id(&self) -> &str {
        match self {
            Target::Code { id, .. } | Target::Gate { id, .. } => id,
        }
    }

    fn coefficient(&self) -> EnergyCoefficient {
        match self {
            Target::Code { coefficient, .. } => *coefficient,
            Target::Gate { spec, .. } => spec.energy_coefficient(),
        }
    }
}

/// Canonical id of a code or `gate:` target.
pub fn canonical_id(id: &str) -> Result<String> {
    Ok(Target::resolve(id)?.id().to_string())
}

/// Exact energy coefficient of a code or `gate:` target.
pub fn target_coefficient(id: &str) -> Result<EnergyCoefficient> {
    Ok(Target::resolve(id)?.coefficient())
}

/// Shots per parallel work unit.
const CHUNK: u64 = 256;

/// Number of logical errors among shots `range` of a cell.
fn count_errors(exec: &Executor<'_>, noise: &NoiseModel, seed: u64, range: std::ops::Range<u64>) -> Result<u64> {
    let mut errors = 0;
    for shot in range {
        let mut src = RngSource::for_shot(seed, shot);
        let outcome = exec.run(noise, &mut src)?;
        errors += outcome.is_error(exec.circuit()) as u64;
    }
    Ok(errors)
}

/// Runs every cell of the sweep. Records come out ordered by code, then ε
/// (or energy), then p_x.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let targets: Vec<Target> = config
        .code_ids
        .iter()
        .map(|id| Target::resolve(id))
        .collect::<Result<_>>()?;
    let axis = config.axis()?;
    let p_grid = &config.p_x_grid;

    struct Cell<'a> {
        target: &'a Target,
        epsilon: f64,
        energy: f64,
        p_x: f64,
        seed: u64,
    }
    let mut cells = Vec::new();
    for t in &targets {
        let coef = t.coefficient();
        for (ei, &x) in axis.values().iter().enumerate() {
            let (epsilon, energy) = match axis {
                SweepAxis::Epsilon(_) => (x, crate::gates::EnergyBudget::from_coefficient(coef, x)?.value()),
                SweepAxis::Energy(_) => (epsilon_for_energy(coef, x)?, x),
            };
            for (pi, &p_x) in p_grid.iter().enumerate() {
                cells.push(Cell {
                    target: t,
                    epsilon,
                    energy,
                    p_x,
                    seed: cell_seed(config.master_seed, t.id(), ei, pi),
                });
            }
        }
    }

    let shots = config.shots;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|cell| -> Result<SweepRecord> {
                let noise = NoiseModel::new(cell.epsilon, cell.p_x)?;
                let (variant, error_rate, std_error) = match cell.target {
                    Target::Code { variant, circuit, .. } => {
                        let exec = Executor::new(circuit)?;
                        let chunks: Vec<u64> = (0..shots.div_ceil(CHUNK)).collect();
                        let errors = chunks
                            .par_iter()
                            .map(|&c| count_errors(&exec, &noise, cell.seed, c * CHUNK..((c + 1) * CHUNK).min(shots)))
                            .try_reduce(|| 0, |a, b| Ok(a + b))?;
                        let (e, s) = binomial_estimate(errors, shots);
                        (variant.clone(), e, s)
                    }
                    Target::Gate { spec, .. } => {
                        let mut rng = RngSource::for_shot(cell.seed, 0).into_inner();
                        let (e, s) = estimate_gate_error(spec, cell.epsilon, shots as usize, &mut rng)?;
                        ("gate".to_string(), e, s)
                    }
                };
                Ok(SweepRecord {
                    code_id: cell.target.id().to_string(),
                    encoder_variant: variant,
                    epsilon: cell.epsilon,
                    energy: cell.energy,
                    p_x: cell.p_x,
                    shots,
                    error_rate,
                    std_error,
                    master_seed: config.master_seed,
                })
            })
            .collect()
    })
}

/// Seeds of every cell, for the manifest.
pub fn cell_seeds(config: &SweepConfig) -> Result<Vec<CellSeed>> {
    let axis = config.axis()?;
    let mut out = Vec::new();
    for id in &config.code_ids {
        let id = canonical_id(id)?;
        for ei in 0..axis.values().len() {
            for pi in 0..config.p_x_grid.len() {
                out.push(CellSeed {
                    code_id: id.clone(),
                    epsilon_index: ei,
                    p_x_index: pi,
                    seed: cell_seed(config.master_seed, &id, ei, pi),
                });
            }
        }
    }
    Ok(out)
}
