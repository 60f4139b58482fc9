use crate::circuit::Instruction;
use crate::error::{Error, Result};
use crate::gates::GateKind;

use super::Encoder;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepetitionLayout {
    /// CX(i → i+1) down the chain.
    Waterfall,
    /// CX(0 → i) for every i.
    Direct,
    /// Doubling tree: each time slice copies every prepared qubit once.
    Parallel,
}

impl RepetitionLayout {
    pub const ALL: [RepetitionLayout; 3] = [
        RepetitionLayout::Waterfall,
        RepetitionLayout::Direct,
        RepetitionLayout::Parallel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RepetitionLayout::Waterfall => "waterfall",
            RepetitionLayout::Direct => "direct",
            RepetitionLayout::Parallel => "parallel",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RepetitionEncoder(pub RepetitionLayout);

impl Encoder for RepetitionEncoder {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn instructions(&self, n: usize) -> Result<Vec<Instruction>> {
        if n < 2 {
            return Err(Error::invalid(format!("repetition encoder needs n >= 2, got {n}")));
        }
        let cx = |a: usize, b: usize| Instruction::Gate {
            kind: GateKind::CX,
            qubits: vec![a, b],
        };
        Ok(match self.0 {
            RepetitionLayout::Waterfall => (0..n - 1).map(|i| cx(i, i + 1)).collect(),
            RepetitionLayout::Direct => (1..n).map(|i| cx(0, i)).collect(),
            RepetitionLayout::Parallel => {
                let mut out = Vec::new();
                let mut width = 1;
                let mut slice = 0;
                while width < n {
                    if slice > 0 {
                        out.push(Instruction::Barrier(format!("slice{slice}")));
                    }
                    for src in 0..width.min(n - width) {
                        out.push(cx(src, src + width));
                    }
                    width *= 2;
                    slice += 1;
                }
                out
            }
        })
    }
}
