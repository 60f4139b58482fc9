use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SHOTS: u64 = 100;

/// Explicit values or a logarithmic range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Log { from: f64, to: f64, points: usize },
}

impl GridSpec {
    pub fn log(from: f64, to: f64, points: usize) -> Self {
        GridSpec::Log { from, to, points }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Log { from, to, points } => {
                if !(*from > 0.0 && *to > 0.0) || *points == 0 {
                    return Err(Error::invalid(format!(
                        "log grid needs positive bounds and points, got from={from} to={to} points={points}"
                    )));
                }
                if *points == 1 {
                    vec![*from]
                } else {
                    let (a, b) = (from.ln(), to.ln());
                    (0..*points)
                        .map(|i| (a + (b - a) * i as f64 / (*points - 1) as f64).exp())
                        .collect()
                }
            }
        };
        if values.is_empty() {
            return Err(Error::invalid("grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::invalid(format!("grid values must be positive, got {v}")));
        }
        Ok(values)
    }
}

/// The swept noise axis.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    Epsilon(Vec<f64>),
    /// Energies in ħω₀; each code converts to its own ε.
    Energy(Vec<f64>),
}

impl SweepAxis {
    pub fn values(&self) -> &[f64] {
        match self {
            SweepAxis::Epsilon(v) | SweepAxis::Energy(v) => v,
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Label used for output file names.
    #[serde(default = "default_name")]
    pub name: String,
    pub code_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_grid: Option<GridSpec>,
    pub p_x_grid: Vec<f64>,
    pub shots: u64,
    pub master_seed: u64,
    /// Worker threads; results do not depend on it.
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
}

fn default_name() -> String {
    "sweep".into()
}

impl SweepConfig {
    pub fn axis(&self) -> Result<SweepAxis> {
        match (&self.epsilon_grid, &self.energy_grid) {
            (Some(e), None) => Ok(SweepAxis::Epsilon(e.values()?)),
            (None, Some(e)) => Ok(SweepAxis::Energy(e.values()?)),
            (Some(_), Some(_)) => Err(Error::invalid("give either epsilon_grid or energy_grid, not both")),
            (None, None) => Err(Error::invalid("one of epsilon_grid or energy_grid is required")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.code_ids.is_empty() {
            return Err(Error::invalid("code_ids is empty"));
        }
        self.axis()?;
        if self.p_x_grid.is_empty() {
            return Err(Error::invalid("p_x_grid is empty"));
        }
        if let Some(p) = self.p_x_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("p_x must lie in [0, 1], got {p}")));
        }
        if self.shots < MIN_SHOTS {
            return Err(Error::invalid(format!(
                "shots must be >= {MIN_SHOTS}, got {}",
                self.shots
            )));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        for id in &self.code_ids {
            super::canonical_id(id)?;
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SweepConfig {
        SweepConfig {
            name: "t".into(),
            code_ids: vec!["rep3".into()],
            epsilon_grid: Some(GridSpec::List(vec![0.1])),
            energy_grid: None,
            p_x_grid: vec![0.1],
            shots: 100,
            master_seed: 1,
            workers: 1,
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let v = GridSpec::log(1.0, 1000.0, 4).values().unwrap();
        let expect = [1.0, 10.0, 100.0, 1000.0];
        assert!(v.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-9 * b));
        assert!(GridSpec::log(0.0, 1.0, 3).values().is_err());
        assert!(GridSpec::List(vec![]).values().is_err());
    }

    #[test]
    fn validation() {
        assert!(base().validate().is_ok());
        let mut c = base();
        c.energy_grid = Some(GridSpec::List(vec![1.0]));
        assert!(c.validate().is_err());
        let mut c = base();
        c.epsilon_grid = None;
        assert!(c.validate().is_err());
        let mut c = base();
        c.shots = 99;
        assert!(c.validate().is_err());
        let mut c = base();
        c.code_ids = vec!["rep4".into()];
        assert!(c.validate().is_err());
        let mut c = base();
        c.p_x_grid = vec![];
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            name = "demo"
            code_ids = ["rep3:direct", "bare"]
            energy_grid = { from = 10.0, to = 1e5, points = 5 }
            p_x_grid = [0.02, 0.1]
            shots = 1000
            master_seed = 7
        "#;
        let cfg = SweepConfig::from_toml(text).unwrap();
        assert_eq!(cfg.axis().unwrap().values().len(), 5);
        assert!(SweepConfig::from_toml("code_ids = []\nbogus = 1").is_err());
    }
}
