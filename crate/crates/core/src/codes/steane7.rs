use crate::circuit::Instruction;
use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::linalg::Pauli;

use super::{Encoder, PauliString};

/// Supports of the three X-type and three Z-type generators.
const SUPPORTS: [[usize; 4]; 3] = [[3, 4, 5, 6], [0, 2, 5, 6], [0, 1, 4, 6]];

pub(super) fn stabilizers() -> Vec<PauliString> {
    let x = SUPPORTS.iter().map(|s| PauliString::on(7, s, Pauli::X));
    let z = SUPPORTS.iter().map(|s| PauliString::on(7, s, Pauli::Z));
    x.chain(z).collect()
}

/// Copies the input onto a logical-X representative, then each of three
/// Hadamard pivots spreads one X generator.
#[derive(Clone, Copy, Debug)]
pub struct Steane7Encoder;

impl Encoder for Steane7Encoder {
    fn name(&self) -> &str {
        "standard"
    }

    fn instructions(&self, n: usize) -> Result<Vec<Instruction>> {
        if n != 7 {
            return Err(Error::invalid(format!("Steane encoder needs 7 qubits, got {n}")));
        }
        use GateKind::{CX, H};
        let steps: [(GateKind, &[usize]); 14] = [
            (CX, &[0, 4]),
            (CX, &[0, 5]),
            (H, &[1]),
            (H, &[2]),
            (H, &[3]),
            (CX, &[3, 4]),
            (CX, &[3, 5]),
            (CX, &[3, 6]),
            (CX, &[2, 0]),
            (CX, &[2, 5]),
            (CX, &[2, 6]),
            (CX, &[1, 0]),
            (CX, &[1, 4]),
            (CX, &[1, 6]),
        ];
        Ok(steps
            .iter()
            .map(|&(kind, q)| Instruction::Gate {
                kind,
                qubits: q.to_vec(),
            })
            .collect())
    }
}
