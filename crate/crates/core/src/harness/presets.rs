use super::config::{GridSpec, SweepConfig};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 7] = ["fig1", "fig3", "fig4", "fig5", "fig6", "fig7_8", "fig9"];

pub const DEFAULT_SHOTS: u64 = 20_000;
pub const DEFAULT_POINTS: usize = 40;
pub const DEFAULT_SEED: u64 = 20_240_601;

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Channel rates 0, 0.02, …, 0.20.
fn p_x_sweep() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 50.0).collect()
}

/// Scenario behind each figure type. Energy grids are in ħω₀.
pub fn preset(name: &str) -> Result<SweepConfig> {
    let energy = |from: f64, to: f64| Some(GridSpec::log(from, to, DEFAULT_POINTS));
    let base = |codes: &[&str], grid: Option<GridSpec>, p_x: Vec<f64>| SweepConfig {
        name: name.to_string(),
        code_ids: ids(codes),
        epsilon_grid: None,
        energy_grid: grid,
        p_x_grid: p_x,
        shots: DEFAULT_SHOTS,
        master_seed: DEFAULT_SEED,
        workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let cfg = match name {
        "fig1" => {
            let mut c = base(
                &[
                    "gate:X", "gate:Y", "gate:Z", "gate:H", "gate:Q", "gate:S", "gate:CX", "gate:CY", "gate:CZ",
                ],
                None,
                vec![0.0],
            );
            c.epsilon_grid = Some(GridSpec::log(1e-3, 1.0, DEFAULT_POINTS));
            c
        }
        "fig3" => base(
            &["rep7:waterfall", "rep7:direct", "rep7:parallel"],
            energy(1e1, 1e6),
            vec![0.08],
        ),
        "fig4" => base(
            &["rep3:direct", "rep5:direct", "rep7:direct", "rep9:direct"],
            energy(1e1, 1e6),
            p_x_sweep(),
        ),
        "fig5" => base(
            &["bare", "rep3:direct", "rep5:direct", "rep7:direct", "rep9:direct"],
            energy(1e1, 1e6),
            vec![0.10],
        ),
        "fig6" => base(
            &["perfect5:a", "perfect5:b", "perfect5:c"],
            energy(1e2, 1e7),
            vec![0.08],
        ),
        "fig7_8" => base(&["rep3:direct", "perfect5:a", "steane7"], energy(1e1, 1e7), p_x_sweep()),
        "fig9" => base(
            &["bare", "rep3:direct", "rep3:direct:ft(v=1)"],
            energy(1e1, 1e7),
            vec![0.02],
        ),
        other => {
            return Err(Error::invalid(format!(
                "unknown preset '{other}'; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap();
            c.validate().unwrap();
            assert_eq!(c.shots, DEFAULT_SHOTS);
            assert_eq!(c.axis().unwrap().values().len(), DEFAULT_POINTS);
        }
        assert!(preset("fig2").is_err());
    }

    #[test]
    fn preset_contents() {
        let f3 = preset("fig3").unwrap();
        assert_eq!(f3.p_x_grid, [0.08]);
        assert_eq!(f3.code_ids.len(), 3);
        assert_eq!(preset("fig5").unwrap().p_x_grid, [0.10]);
        assert_eq!(preset("fig5").unwrap().code_ids[0], "bare");
        assert_eq!(preset("fig9").unwrap().p_x_grid, [0.02]);
        assert!(preset("fig7_8").unwrap().p_x_grid.contains(&0.02));
    }
}
