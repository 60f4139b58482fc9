use nalgebra::{Matrix2, Matrix4};
use num::complex::Complex64;
use num::{BigInt, BigRational, One, Zero};
use proptest::prelude::*;

use qec_energy::analytics::{
    find_crossover, repetition_failure_rate, repetition_failure_rate_exact, CrossoverRule, ErrorCurve,
};
use qec_energy::circuit::exact_error_rate;
use qec_energy::codes::{build_pipeline, resolve_code, PipelineOptions};
use qec_energy::gates::{sample_noisy_gate, GateKind};
use qec_energy::linalg::{average_gate_fidelity, herm_expm, HermitianGenerator, Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hermitian(entries: &[f64], dim: usize) -> Matrix {
    let z = |i: usize, j: usize| Complex64::new(entries[2 * (i * dim + j)], entries[2 * (i * dim + j) + 1]);
    let h = |i: usize, j: usize| z(i, j) + z(j, i).conj();
    if dim == 2 {
        Matrix::One(Matrix2::from_fn(h))
    } else {
        Matrix::Two(Matrix4::from_fn(h))
    }
}

/// Failure probability by summing over all 2^N flip patterns.
fn brute_force_failure(p: &BigRational, n: usize) -> BigRational {
    let q = BigRational::one() - p;
    let mut total = BigRational::zero();
    for pattern in 0u32..(1 << n) {
        let k = pattern.count_ones() as usize;
        if 2 * k > n {
            total += num::pow(p.clone(), k) * num::pow(q.clone(), n - k);
        }
    }
    total
}

proptest! {
    #[test]
    fn exponential_of_hermitian_is_unitary(entries in prop::collection::vec(-3.0..3.0f64, 32), two in any::<bool>()) {
        let dim = if two { 4 } else { 2 };
        let g = HermitianGenerator::new(hermitian(&entries, dim)).unwrap();
        prop_assert!(herm_expm(&g).unitarity_defect() < 1e-9);
    }

    #[test]
    fn fidelity_is_a_probability(seed in any::<u64>(), eps in 0.0..3.0f64, gate in 0usize..9) {
        let spec = GateKind::ALL[gate].spec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sample_noisy_gate(spec, eps, &mut rng);
        let f = average_gate_fidelity(&spec.ideal, &u).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f), "{}", f);
        let self_f = average_gate_fidelity(&u, &u).unwrap();
        prop_assert!((self_f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_matches_enumeration(num in 0i64..=40, k in 0usize..6) {
        let n = 2 * k + 1;
        let p = BigRational::new(BigInt::from(num), BigInt::from(40));
        prop_assert_eq!(repetition_failure_rate_exact(&p, n).unwrap(), brute_force_failure(&p, n));
    }

    #[test]
    fn failure_rate_is_monotone(p in 0.0..0.5f64, dp in 1e-4..0.05f64, k in 1usize..5) {
        let n = 2 * k + 1;
        let p2 = (p + dp).min(0.5);
        prop_assert!(repetition_failure_rate(p2, n).unwrap() >= repetition_failure_rate(p, n).unwrap());
        // more qubits help below threshold
        prop_assert!(repetition_failure_rate(p, n + 2).unwrap() <= repetition_failure_rate(p, n).unwrap() + 1e-15);
    }

    #[test]
    fn crossover_is_symmetric_under_reflection(
        a in prop::collection::vec(0u32..=64, 6),
        b in prop::collection::vec(0u32..=64, 6),
        rule in prop_oneof![Just(CrossoverRule::Persistent), Just(CrossoverRule::FirstCrossing)],
    ) {
        // dyadic errors keep 1 − x and every difference exact
        let curve = |v: &[u32], flip: bool| {
            let pairs: Vec<(f64, f64)> = v
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let e = x as f64 / 64.0;
                    (10f64.powi(i as i32 + 1), if flip { 1.0 - e } else { e })
                })
                .collect();
            ErrorCurve::from_pairs(&pairs).unwrap()
        };
        let forward = find_crossover(&curve(&a, false), &curve(&b, false), rule).unwrap();
        let reflected = find_crossover(&curve(&b, true), &curve(&a, true), rule).unwrap();
        prop_assert_eq!(forward, reflected);
    }

    #[test]
    fn single_crossing_is_found_by_both_rules(start in 0.3..0.9f64, slope in 0.01..0.025f64, level in 0.05..0.25f64) {
        let energies: Vec<f64> = (0..12).map(|i| 1e2 * (i + 1) as f64).collect();
        let a: Vec<(f64, f64)> = energies.iter().enumerate().map(|(i, &e)| (e, start - slope * i as f64)).collect();
        let b: Vec<(f64, f64)> = energies.iter().map(|&e| (e, level)).collect();
        let (ca, cb) = (ErrorCurve::from_pairs(&a).unwrap(), ErrorCurve::from_pairs(&b).unwrap());
        let p = find_crossover(&ca, &cb, CrossoverRule::Persistent).unwrap();
        let f = find_crossover(&ca, &cb, CrossoverRule::FirstCrossing).unwrap();
        prop_assert_eq!(p, f);
        if a.last().unwrap().1 < level {
            let x = p.unwrap();
            let expect = energies[0] + 1e2 * (start - level) / slope;
            prop_assert!((x - expect).abs() < 1e-6 * expect, "{} vs {}", x, expect);
        }
    }
}

#[test]
fn exact_pipeline_rate_matches_closed_form() {
    for id in ["rep3:direct", "rep5:parallel", "rep7:waterfall"] {
        let code = resolve_code(id).unwrap();
        let n = code.num_data();
        for logical_x in [false, true] {
            let opts = PipelineOptions {
                logical_x,
                ..PipelineOptions::default()
            };
            let c = build_pipeline(&code, &opts).unwrap();
            for p in [0.0, 0.02, 0.1, 0.3, 0.5] {
                let got = exact_error_rate(&c, p).unwrap();
                let want = repetition_failure_rate(p, n).unwrap();
                assert!((got - want).abs() < 1e-12, "{id} p={p}: {got} vs {want}");
            }
        }
    }
}
