//! Fault-tolerant syndrome extraction with verified two-qubit cat states,
//! for repetition codes.
//!
//! Each check `Z_k Z_{k+1}` uses its own cat `(|00⟩ + |11⟩)/√2` on ancillas
//! `(a, b)`. The cat is prepared with H and CX, then checked `v` times by
//! copying the parity `a ⊕ b` onto a fresh flag qubit; a nonzero flag
//! discards the cat and prepares it again. The verified cat then picks up
//! `d_k` on `a` and `d_{k+1}` on `b`, and the check bit is the parity of the
//! two readouts. Per check this costs `(7 + 2v)/16` in units of
//! `π²ħω₀/ε²`.

use std::collections::BTreeMap;

use num::rational::Ratio;

use crate::circuit::{Circuit, Instruction};
use crate::codes::{Family, MeasuredCheck, PauliString, SyndromeExtractor};
use crate::error::{Error, Result};
use crate::gates::{EnergyCoefficient, GateKind};
use crate::linalg::Pauli;

/// Attempts per cat before the shot continues with an unverified cat.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatLayout {
    /// N checks `Z_k Z_{k+1 mod N}`.
    Cyclic,
    /// N − 1 checks `Z_k Z_{k+1}`, the code's own generators.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatExtractor {
    pub num_data: usize,
    pub validations: u32,
    pub layout: CatLayout,
    pub max_attempts: u32,
}

impl CatExtractor {
    pub fn new(num_data: usize, validations: u32, layout: CatLayout) -> Self {
        CatExtractor {
            num_data,
            validations,
            layout,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    /// Parameters `v` (validation rounds, default 1), `cats` (N for the
    /// cyclic layout, N − 1 for the linear one) and `retries`.
    pub fn from_params(params: &BTreeMap<String, String>, family: Family) -> Result<Self> {
        let Family::Repetition(n) = family else {
            return Err(Error::invalid(format!(
                "cat-state extraction is defined for repetition codes, not {}",
                family.key()
            )));
        };
        let num = |key: &str| -> Result<Option<u32>> {
            params
                .get(key)
                .map(|v| {
                    v.parse::<u32>()
                        .map_err(|_| Error::invalid(format!("ft parameter {key}='{v}' is not an integer")))
                })
                .transpose()
        };
        for k in params.keys() {
            if !matches!(k.as_str(), "v" | "cats" | "retries") {
                return Err(Error::invalid(format!("unknown ft parameter '{k}'")));
            }
        }
        let v = num("v")?.unwrap_or(1);
        let layout = match num("cats")? {
            None => CatLayout::Cyclic,
            Some(c) if c as usize == n => CatLayout::Cyclic,
            Some(c) if c as usize + 1 == n => CatLayout::Linear,
            Some(c) => {
                return Err(Error::invalid(format!(
                    "rep{n} takes cats={n} or cats={}, got {c}",
                    n - 1
                )))
            }
        };
        let mut ex = CatExtractor::new(n, v, layout);
        if let Some(r) = num("retries")? {
            if r == 0 {
                return Err(Error::invalid("ft retries must be >= 1"));
            }
            ex.max_attempts = r;
        }
        Ok(ex)
    }

    pub fn num_cats(&self, n: usize) -> usize {
        match self.layout {
            CatLayout::Cyclic => n,
            CatLayout::Linear => n - 1,
        }
    }

    /// Energy coefficient of one cat: preparation, validation and readout.
    pub fn per_cat_coefficient(&self) -> EnergyCoefficient {
        Ratio::new(7 + 2 * self.validations as i64, 16)
    }

    fn checks(&self, n: usize) -> Vec<PauliString> {
        (0..self.num_cats(n))
            .map(|k| PauliString::on(n, &[k, (k + 1) % n], Pauli::Z))
            .collect()
    }
}

impl SyndromeExtractor for CatExtractor {
    fn name(&self) -> String {
        let mut s = format!("ft(v={}", self.validations);
        if self.layout == CatLayout::Linear {
            s = format!("{s},cats={}", self.num_data - 1);
        }
        if self.max_attempts != DEFAULT_MAX_ATTEMPTS {
            s = format!("{s},retries={}", self.max_attempts);
        }
        s + ")"
    }

    fn append(&self, circuit: &mut Circuit, stabilizers: &[PauliString], data: &[usize]) -> Result<Vec<MeasuredCheck>> {
        let n = data.len();
        if n != self.num_data {
            return Err(Error::invalid(format!(
                "extractor built for {} data qubits, got {n}",
                self.num_data
            )));
        }
        if stabilizers.iter().any(|s| s.support().any(|(_, p)| p != Pauli::Z)) {
            return Err(Error::invalid("cat-state extraction needs Z-type checks"));
        }
        let gate = |kind, qubits: &[usize]| Instruction::Gate {
            kind,
            qubits: qubits.to_vec(),
        };
        let mut out = Vec::new();
        for check in self.checks(n) {
            let (a, b) = (circuit.add_qubit(), circuit.add_qubit());
            let mut body = vec![gate(GateKind::H, &[a]), gate(GateKind::CX, &[a, b])];
            let mut flags = Vec::new();
            for _ in 0..self.validations {
                let f = circuit.add_qubit();
                let fc = circuit.add_clbit();
                body.push(gate(GateKind::CX, &[a, f]));
                body.push(gate(GateKind::CX, &[b, f]));
                body.push(Instruction::Measure { qubit: f, clbit: fc });
                flags.push(fc);
            }
            circuit.push(Instruction::RetryBlock {
                body,
                success_clbits: flags,
                max_attempts: self.max_attempts,
            })?;
            let support: Vec<usize> = check.support().map(|(q, _)| q).collect();
            circuit.gate(GateKind::CX, &[data[support[0]], a])?;
            circuit.gate(GateKind::CX, &[data[support[1]], b])?;
            let (ca, cb) = (circuit.add_clbit(), circuit.add_clbit());
            circuit.measure(a, ca)?;
            circuit.measure(b, cb)?;
            circuit.gate(GateKind::H, &[a])?;
            out.push(MeasuredCheck {
                check,
                clbits: vec![ca, cb],
            });
        }
        Ok(out)
    }
}

/// Energy coefficient of a repetition-N pipeline whose bare syndrome
/// extraction is replaced by `cats` verified cats with `v` validations.
pub fn ft_circuit_coefficient(n: usize, v: u32, cats: usize) -> EnergyCoefficient {
    let base = Ratio::new(5 * n as i64 - 3, 16);
    let bare_syndrome = Ratio::new(2 * (n as i64 - 1), 16);
    base - bare_syndrome + Ratio::new(cats as i64 * (7 + 2 * v as i64), 16)
}

/// `(E_rep + E_ft)/E_rep` with the cat overhead `N(7 + 2v)/16` added to the
/// full repetition budget `(5N − 3)/16`.
pub fn ft_overhead_ratio(n: usize, v: u32) -> EnergyCoefficient {
    let base = Ratio::new(5 * n as i64 - 3, 16);
    let overhead = Ratio::new(n as i64 * (7 + 2 * v as i64), 16);
    (base + overhead) / base
}

/// Large-N limit of [`ft_overhead_ratio`]: `(12 + 2v)/5`.
pub fn ft_overhead_limit(v: u32) -> EnergyCoefficient {
    Ratio::new(12 + 2 * v as i64, 5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::resolve_code;

    #[test]
    fn ratios() {
        assert_eq!(ft_overhead_ratio(3, 1), Ratio::new(13, 4));
        assert_eq!(ft_overhead_limit(1), Ratio::new(14, 5));
        assert_eq!(ft_circuit_coefficient(3, 1, 3), Ratio::new(35, 16));
    }

    #[test]
    fn circuit_tally_matches_formula() {
        for (id, n, v, cats) in [
            ("rep3:ft(v=1)", 3, 1, 3),
            ("rep5:ft(v=2)", 5, 2, 5),
            ("rep5:waterfall:ft(v=0,cats=4)", 5, 0, 4),
        ] {
            let code = resolve_code(id).unwrap();
            assert_eq!(
                code.energy_coefficient().unwrap(),
                ft_circuit_coefficient(n, v, cats),
                "{id}"
            );
        }
    }

    #[test]
    fn linear_layout_uses_code_generators() {
        let ex = CatExtractor::new(5, 1, CatLayout::Linear);
        let rep = resolve_code("rep5").unwrap();
        assert_eq!(ex.checks(5), rep.stabilizers);
    }
}
