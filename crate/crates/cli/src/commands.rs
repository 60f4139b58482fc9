use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qec_energy::analytics::{
    code_energy_total, correction_energy_fraction, expected_corrections, find_crossover, fit_exponential,
    repetition_failure_rate, repetition_failure_rate_leading, CrossoverRule, CurvePoint, ErrorCurve,
};
use qec_energy::codes::{resolve_code, Family};
use qec_energy::ft::{ft_overhead_limit, ft_overhead_ratio, CatExtractor, CatLayout};
use qec_energy::gates::{gate_catalog, gate_energy_bound, ratio_to_f64, GateKind};
use qec_energy::harness::{
    preset, read_csv, read_manifest, run_sweep, target_coefficient, write_csv, write_manifest, GridSpec, SweepConfig,
    SweepRecord,
};
use qec_energy::{Error, Result};

use crate::display::{file_stem, matrix_rows, pauli_expansion, sig4};
use crate::{CrossoverArgs, FtCompareArgs, GatesArgs, OracleArgs, SweepArgs};

const SEED_VAR: &str = "QEC_SEED";

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// `--seed` beats `QEC_SEED`, which beats the configured seed.
fn master_seed(flag: Option<u64>, configured: u64) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{SEED_VAR}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(configured),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// `from:to:points` for a log grid, otherwise a comma-separated list.
fn parse_grid(text: &str) -> Result<GridSpec> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| invalid(format!("bad number '{s}' in grid '{text}'")))
    };
    let grid = if let [from, to, points] = text.split(':').collect::<Vec<_>>()[..] {
        let points = points
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad point count in grid '{text}'")))?;
        GridSpec::log(num(from)?, num(to)?, points)
    } else {
        GridSpec::List(text.split(',').map(num).collect::<Result<_>>()?)
    };
    grid.values()?;
    Ok(grid)
}

pub fn gates(args: &GatesArgs) -> Result<()> {
    let Some(name) = &args.gate else {
        println!("{:<4} {:>12}  multiset", "gate", "coefficient");
        for g in GateKind::ALL {
            let spec = g.spec();
            let multiset: Vec<String> = spec.terms.iter().map(|t| t.coefficient.to_string()).collect();
            println!(
                "{:<4} {:>12}  {{{}}}",
                g.name(),
                spec.energy_coefficient().to_string(),
                multiset.join(", ")
            );
        }
        return Ok(());
    };
    if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
        return Err(invalid(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let spec = gate_catalog(name)?;
    let coef = spec.energy_coefficient();
    let energy = gate_energy_bound(spec, args.epsilon)?;
    println!("gate {}", spec.name());
    println!("terms:");
    for t in &spec.terms {
        println!(
            "  {:>8}  ×  {}",
            t.coefficient.to_string(),
            pauli_expansion(t.generator.matrix())
        );
    }
    println!("energy coefficient: {coef} (units of π²ħω₀/ε²)");
    println!("epsilon: {}", args.epsilon);
    println!("energy bound: {} ħω₀", sig4(energy.value()));
    println!("ideal matrix:");
    for row in matrix_rows(&spec.ideal) {
        println!("  {row}");
    }
    Ok(())
}

pub fn oracle(args: &OracleArgs) -> Result<()> {
    let code = resolve_code(&args.code)?;
    let Family::Repetition(n) = code.family else {
        return Err(invalid(format!(
            "the oracle covers repetition codes only, got '{}'",
            args.code
        )));
    };
    let p = args.px;
    println!("code rep{n}, p_x = {p}");
    println!("failure rate: {}", sig4(repetition_failure_rate(p, n)?));
    println!("leading order: {}", sig4(repetition_failure_rate_leading(p, n)?));
    println!("expected corrections per run: {}", sig4(expected_corrections(p, n)?));
    let frac = correction_energy_fraction(n)?;
    println!(
        "correction energy / pipeline energy (one correction): {frac} = {}",
        sig4(ratio_to_f64(frac))
    );
    Ok(())
}

fn base_config(args: &SweepArgs) -> Result<SweepConfig> {
    if let Some(name) = &args.preset {
        return preset(name);
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        return SweepConfig::from_toml(&text);
    }
    let path = args.manifest.as_ref().expect("clap requires one source");
    Ok(read_manifest(path)?.config)
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = base_config(args)?;
    if let Some(codes) = &args.codes {
        cfg.code_ids = codes.clone();
    }
    if let Some(g) = &args.energy {
        cfg.energy_grid = Some(parse_grid(g)?);
        cfg.epsilon_grid = None;
    }
    if let Some(g) = &args.epsilon {
        cfg.epsilon_grid = Some(parse_grid(g)?);
        cfg.energy_grid = None;
    }
    if let Some(px) = &args.px {
        cfg.p_x_grid = px.clone();
    }
    if let Some(shots) = args.shots {
        cfg.shots = shots;
    }
    cfg.master_seed = master_seed(args.seed, cfg.master_seed)?;
    cfg.workers = args.workers.unwrap_or_else(default_workers);
    cfg.validate()?;
    Ok(cfg)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let cfg = sweep_config(args)?;
    let combined = match &args.out {
        Some(p) => p.clone(),
        None => {
            let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
            args.out_dir.join(format!("{}_{stamp}.csv", cfg.name))
        }
    };
    if let Some(dir) = combined.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    let axis = cfg.axis()?;
    println!(
        "sweep '{}': {} code(s) × {} grid point(s) × {} p_x value(s), {} shots, seed {}, {} worker(s)",
        cfg.name,
        cfg.code_ids.len(),
        axis.values().len(),
        cfg.p_x_grid.len(),
        cfg.shots,
        cfg.master_seed,
        cfg.workers
    );
    let records = run_sweep(&cfg)?;
    write_csv(&records, &combined)?;
    let manifest = with_suffix(&combined, ".manifest.json");
    write_manifest(&cfg, &manifest)?;

    let mut by_code: BTreeMap<&str, Vec<SweepRecord>> = BTreeMap::new();
    let mut order = Vec::new();
    for r in &records {
        if !by_code.contains_key(r.code_id.as_str()) {
            order.push(r.code_id.as_str());
        }
        by_code.entry(&r.code_id).or_default().push(r.clone());
    }
    println!(
        "{:<24} {:>6} {:>10} {:>10}  file",
        "code", "cells", "min error", "max error"
    );
    for id in order {
        let recs = &by_code[id];
        let path = with_suffix(&combined, &format!(".{}.csv", file_stem(id)));
        write_csv(recs, &path)?;
        let min = recs.iter().map(|r| r.error_rate).fold(f64::INFINITY, f64::min);
        let max = recs.iter().map(|r| r.error_rate).fold(0.0, f64::max);
        println!(
            "{id:<24} {:>6} {:>10} {:>10}  {}",
            recs.len(),
            sig4(min),
            sig4(max),
            path.display()
        );
    }
    println!("combined: {}", combined.display());
    println!("manifest: {}", manifest.display());
    Ok(())
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Data qubits behind a code id, for the exponential fit.
fn code_size(id: &str) -> Option<f64> {
    resolve_code(id).ok().map(|c| c.num_data() as f64)
}

pub fn crossover(args: &CrossoverArgs) -> Result<()> {
    let records = read_csv(&args.input)?;
    if records.is_empty() {
        return Err(schema(format!("{}: no rows", args.input.display())));
    }
    let rule = if args.first {
        CrossoverRule::FirstCrossing
    } else {
        CrossoverRule::Persistent
    };
    let mut p_values: Vec<f64> = records.iter().map(|r| r.p_x).collect();
    p_values.sort_by(f64::total_cmp);
    p_values.dedup();
    if let Some(p) = args.px {
        if !p_values.contains(&p) {
            return Err(invalid(format!("no rows with p_x = {p}; present: {p_values:?}")));
        }
        p_values = vec![p];
    }
    for p in p_values {
        let mut curves: BTreeMap<&str, Vec<CurvePoint>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.p_x == p) {
            curves.entry(&r.code_id).or_default().push(CurvePoint {
                energy: r.energy,
                error: r.error_rate,
                std_error: r.std_error,
            });
        }
        // cheapest pipeline first
        let mut codes: Vec<(&str, f64)> = curves
            .keys()
            .map(|id| Ok((*id, ratio_to_f64(target_coefficient(id)?))))
            .collect::<Result<_>>()
            .map_err(|e: Error| schema(format!("{}: {e}", args.input.display())))?;
        codes.sort_by(|a, b| a.1.total_cmp(&b.1));
        println!("p_x = {p}");
        if codes.len() < 2 {
            println!("  only one code, nothing to compare");
            continue;
        }
        let curve = |id: &str| -> Result<ErrorCurve> {
            let mut pts = curves[id].clone();
            pts.sort_by(|a, b| a.energy.total_cmp(&b.energy));
            ErrorCurve::new(pts).map_err(|e| schema(format!("{id}: {e}")))
        };
        println!("  {:<24} {:<24} {:>12}", "code", "overtakes", "energy (ħω₀)");
        let mut fit_points = Vec::new();
        for w in codes.windows(2) {
            let (cheap, dear) = (w[0].0, w[1].0);
            let x = find_crossover(&curve(dear)?, &curve(cheap)?, rule)?;
            match x {
                Some(e) => {
                    println!("  {dear:<24} {cheap:<24} {:>12}", sig4(e));
                    if let Some(n) = code_size(dear) {
                        fit_points.push((n, e));
                    }
                }
                None => println!("  {dear:<24} {cheap:<24} {:>12}", "none"),
            }
        }
        if fit_points.len() >= 2 {
            let fit = fit_exponential(&fit_points)?;
            println!(
                "  fit E* = a·exp(b·N): a = {}, b = {}, rms ln residual = {}",
                sig4(fit.amplitude),
                sig4(fit.rate),
                sig4(fit.residual)
            );
        }
    }
    Ok(())
}

pub fn ft_compare(args: &FtCompareArgs) -> Result<()> {
    let v = args.v;
    println!("cat-state extraction with v = {v} validation round(s), cyclic layout");
    println!(
        "{:>3} {:>10} {:>12} {:>12} {:>8}",
        "N", "E_rep", "E_ft extra", "E_ft circuit", "ratio"
    );
    for &n in &args.sizes {
        if n < 3 || n % 2 == 0 {
            return Err(invalid(format!("repetition sizes must be odd and >= 3, got {n}")));
        }
        let plain = code_energy_total(&format!("rep{n}"))?;
        let extra = CatExtractor::new(n, v, CatLayout::Cyclic).per_cat_coefficient() * n as i64;
        let circuit = code_energy_total(&format!("rep{n}:ft(v={v})"))?;
        let ratio = ft_overhead_ratio(n, v);
        println!(
            "{n:>3} {:>10} {:>12} {:>12} {:>8}",
            plain.to_string(),
            extra.to_string(),
            circuit.to_string(),
            sig4(ratio_to_f64(ratio))
        );
    }
    let limit = ft_overhead_limit(v);
    println!("large-N ratio limit: {limit} = {}", sig4(ratio_to_f64(limit)));
    println!("coefficients in units of π²ħω₀/ε²; ratio = (E_rep + E_ft extra) / E_rep");

    let Some(shots) = args.shots else {
        return Ok(());
    };
    let mut cfg = preset("fig9")?;
    cfg.name = format!("ft_compare_v{v}");
    cfg.code_ids = vec!["rep3:direct".into(), format!("rep3:direct:ft(v={v})")];
    cfg.p_x_grid = vec![args.px];
    cfg.shots = shots;
    cfg.master_seed = master_seed(args.seed, cfg.master_seed)?;
    cfg.workers = args.workers.unwrap_or_else(default_workers);
    let records = run_sweep(&cfg)?;
    let half = records.len() / 2;
    println!("simulated rep3, p_x = {}, {shots} shots per point", args.px);
    println!("{:>12} {:>10} {:>10}", "energy", "plain", "ft");
    for (a, b) in records[..half].iter().zip(&records[half..]) {
        println!(
            "{:>12} {:>10} {:>10}",
            sig4(a.energy),
            sig4(a.error_rate),
            sig4(b.error_rate)
        );
    }
    if let Some(out) = &args.out {
        write_csv(&records, out)?;
        println!("written: {}", out.display());
    }
    Ok(())
}
