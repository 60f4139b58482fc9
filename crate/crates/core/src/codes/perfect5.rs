use crate::circuit::Instruction;
use crate::error::{Error, Result};
use crate::gates::GateKind;

use super::Encoder;

pub(super) const STABILIZERS: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];

use GateKind::{CX, CY, CZ, H, Q, Z};

type Step = (GateKind, &'static [usize]);

/// Each pivot qubit is rotated into the X (H) or Y (Q) basis and then
/// imprints its generator on the others with controlled Paulis. The input
/// on qubit 0 picks up the logical operator through the pivots' CX/CY/CZ.
const VARIANT_A: [Step; 19] = [
    (Z, &[0]),
    (CZ, &[0, 1]),
    (CZ, &[0, 4]),
    (H, &[2]),
    (CX, &[2, 0]),
    (CZ, &[2, 3]),
    (CZ, &[2, 4]),
    (H, &[3]),
    (CX, &[3, 0]),
    (CZ, &[3, 1]),
    (CZ, &[3, 2]),
    (H, &[1]),
    (CZ, &[1, 0]),
    (CX, &[1, 3]),
    (CZ, &[1, 4]),
    (H, &[4]),
    (CX, &[4, 1]),
    (CZ, &[4, 2]),
    (CZ, &[4, 3]),
];

/// As A, with the last pivot prepared in the Y basis.
const VARIANT_B: [Step; 19] = [
    (Z, &[0]),
    (CZ, &[0, 1]),
    (CZ, &[0, 4]),
    (H, &[2]),
    (CX, &[2, 0]),
    (CZ, &[2, 3]),
    (CZ, &[2, 4]),
    (H, &[3]),
    (CX, &[3, 0]),
    (CZ, &[3, 1]),
    (CZ, &[3, 2]),
    (H, &[1]),
    (CZ, &[1, 0]),
    (CX, &[1, 3]),
    (CZ, &[1, 4]),
    (Q, &[4]),
    (CY, &[4, 0]),
    (CZ, &[4, 1]),
    (CZ, &[4, 3]),
];

/// Every pivot prepared in the Y basis; no Hadamards.
const VARIANT_C: [Step; 19] = [
    (Z, &[0]),
    (CZ, &[0, 1]),
    (CZ, &[0, 4]),
    (Q, &[1]),
    (CY, &[1, 0]),
    (CZ, &[1, 2]),
    (CZ, &[1, 4]),
    (Q, &[2]),
    (CZ, &[2, 0]),
    (CY, &[2, 1]),
    (CZ, &[2, 3]),
    (Q, &[3]),
    (CZ, &[3, 1]),
    (CY, &[3, 2]),
    (CZ, &[3, 4]),
    (Q, &[4]),
    (CY, &[4, 0]),
    (CZ, &[4, 1]),
    (CZ, &[4, 3]),
];

#[derive(Clone, Copy, Debug)]
pub struct Perfect5Encoder {
    name: &'static str,
    steps: &'static [Step],
}

impl Perfect5Encoder {
    pub fn all() -> [Perfect5Encoder; 3] {
        [
            Perfect5Encoder {
                name: "a",
                steps: &VARIANT_A,
            },
            Perfect5Encoder {
                name: "b",
                steps: &VARIANT_B,
            },
            Perfect5Encoder {
                name: "c",
                steps: &VARIANT_C,
            },
        ]
    }
}

impl Encoder for Perfect5Encoder {
    fn name(&self) -> &str {
        self.name
    }

    fn instructions(&self, n: usize) -> Result<Vec<Instruction>> {
        if n != 5 {
            return Err(Error::invalid(format!("perfect code encoder needs 5 qubits, got {n}")));
        }
        Ok(self
            .steps
            .iter()
            .map(|&(kind, qubits)| Instruction::Gate {
                kind,
                qubits: qubits.to_vec(),
            })
            .collect())
    }
}
