//! Circuit IR and the noisy statevector executor.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gates::{EnergyBudget, EnergyCoefficient, GateKind, NoiseModel};
use crate::linalg::{Matrix, Pauli};
use crate::statevector::{StateVector, MAX_QUBITS};

/// XOR of a group of classical bits compared against an expected parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityTerm {
    pub clbits: Vec<usize>,
    pub parity: bool,
}

/// Conjunction of parity terms. An empty condition always holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Condition {
    pub terms: Vec<ParityTerm>,
}

impl Condition {
    pub fn bits(pairs: impl IntoIterator<Item = (usize, bool)>) -> Self {
        Condition {
            terms: pairs
                .into_iter()
                .map(|(c, v)| ParityTerm {
                    clbits: vec![c],
                    parity: v,
                })
                .collect(),
        }
    }

    pub fn holds(&self, bits: &[bool]) -> bool {
        self.terms
            .iter()
            .all(|t| t.clbits.iter().fold(false, |acc, &c| acc ^ bits[c]) == t.parity)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("true");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            let names: Vec<String> = t.clbits.iter().map(|c| format!("c{c}")).collect();
            write!(f, "{}={}", names.join("^"), t.parity as u8)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Gate {
        kind: GateKind,
        qubits: Vec<usize>,
    },
    /// Ideal X with probability `p_x`; free of energy and coefficient noise.
    ChannelX {
        qubit: usize,
    },
    /// Deliberately injected ideal Pauli, for exhaustive correction checks.
    InjectPauli {
        pauli: Pauli,
        qubit: usize,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
    /// Noisy gate run only when `condition` holds. Its energy is not counted.
    ConditionalGate {
        kind: GateKind,
        qubits: Vec<usize>,
        condition: Condition,
    },
    Barrier(String),
    /// Runs `body` until every clbit in `success_clbits` reads 0, at most
    /// `max_attempts` times. The body's energy is counted once. Before a
    /// retry every qubit touched by the body is reset to |0⟩.
    RetryBlock {
        body: Vec<Instruction>,
        success_clbits: Vec<usize>,
        max_attempts: u32,
    },
}

impl Instruction {
    fn for_each_qubit(&self, f: &mut impl FnMut(usize)) {
        match self {
            Instruction::Gate { qubits, .. } | Instruction::ConditionalGate { qubits, .. } => {
                qubits.iter().copied().for_each(f)
            }
            Instruction::ChannelX { qubit }
            | Instruction::InjectPauli { qubit, .. }
            | Instruction::Measure { qubit, .. } => f(*qubit),
            Instruction::Barrier(_) => {}
            Instruction::RetryBlock { body, .. } => body.iter().for_each(|i| i.for_each_qubit(f)),
        }
    }

    fn for_each_clbit(&self, f: &mut impl FnMut(usize)) {
        match self {
            Instruction::Measure { clbit, .. } => f(*clbit),
            Instruction::ConditionalGate { condition, .. } => condition
                .terms
                .iter()
                .flat_map(|t| t.clbits.iter())
                .copied()
                .for_each(f),
            Instruction::RetryBlock {
                body, success_clbits, ..
            } => {
                body.iter().for_each(|i| i.for_each_clbit(f));
                success_clbits.iter().copied().for_each(f);
            }
            _ => {}
        }
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        let qs = |qs: &[usize]| qs.iter().map(|q| format!("q{q}")).collect::<Vec<_>>().join(" ");
        match self {
            Instruction::Gate { kind, qubits } => writeln!(f, "{pad}{kind} {}", qs(qubits)),
            Instruction::ChannelX { qubit } => writeln!(f, "{pad}CHANNEL_X q{qubit}"),
            Instruction::InjectPauli { pauli, qubit } => {
                writeln!(f, "{pad}INJECT {} q{qubit}", pauli.as_char())
            }
            Instruction::Measure { qubit, clbit } => writeln!(f, "{pad}MEASURE q{qubit} -> c{clbit}"),
            Instruction::ConditionalGate {
                kind,
                qubits,
                condition,
            } => writeln!(f, "{pad}IF {condition} THEN {kind} {}", qs(qubits)),
            Instruction::Barrier(label) => writeln!(f, "{pad}BARRIER {label}"),
            Instruction::RetryBlock {
                body,
                success_clbits,
                max_attempts,
            } => {
                let until: Vec<String> = success_clbits.iter().map(|c| format!("c{c}=0")).collect();
                writeln!(f, "{pad}RETRY max={max_attempts} until {} {{", until.join(" & "))?;
                for i in body {
                    i.fmt_indented(f, indent + 1)?;
                }
                writeln!(f, "{pad}}}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Readout {
    /// Logical bit is the majority of these clbits.
    Majority(Vec<usize>),
    Bit(usize),
}

impl Readout {
    fn clbits(&self) -> &[usize] {
        match self {
            Readout::Majority(bits) => bits,
            Readout::Bit(b) => std::slice::from_ref(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction>,
    readout: Option<Readout>,
    expected_logical: bool,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            readout: None,
            expected_logical: false,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn readout(&self) -> Option<&Readout> {
        self.readout.as_ref()
    }

    /// The logical bit an error-free run produces.
    pub fn expected_logical(&self) -> bool {
        self.expected_logical
    }

    pub fn set_expected_logical(&mut self, bit: bool) {
        self.expected_logical = bit;
    }

    pub fn add_qubit(&mut self) -> usize {
        self.num_qubits += 1;
        self.num_qubits - 1
    }

    pub fn add_clbit(&mut self) -> usize {
        self.num_clbits += 1;
        self.num_clbits - 1
    }

    pub fn push(&mut self, instruction: Instruction) -> Result<()> {
        self.validate_instruction(&instruction)?;
        self.instructions.push(instruction);
        Ok(())
    }

    pub fn gate(&mut self, kind: GateKind, qubits: &[usize]) -> Result<()> {
        self.push(Instruction::Gate {
            kind,
            qubits: qubits.to_vec(),
        })
    }

    pub fn channel_x(&mut self, qubit: usize) -> Result<()> {
        self.push(Instruction::ChannelX { qubit })
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<()> {
        self.push(Instruction::Measure { qubit, clbit })
    }

    pub fn conditional(&mut self, kind: GateKind, qubits: &[usize], condition: Condition) -> Result<()> {
        self.push(Instruction::ConditionalGate {
            kind,
            qubits: qubits.to_vec(),
            condition,
        })
    }

    pub fn barrier(&mut self, label: impl Into<String>) -> Result<()> {
        self.push(Instruction::Barrier(label.into()))
    }

    pub fn set_readout(&mut self, readout: Readout) -> Result<()> {
        for &c in readout.clbits() {
            self.check_clbit(c)?;
        }
        if readout.clbits().is_empty() {
            return Err(Error::invalid("readout needs at least one clbit"));
        }
        self.readout = Some(readout);
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::invalid(format!(
                "qubit {q} out of range for a {}-qubit circuit",
                self.num_qubits
            )));
        }
        Ok(())
    }

    fn check_clbit(&self, c: usize) -> Result<()> {
        if c >= self.num_clbits {
            return Err(Error::invalid(format!(
                "clbit {c} out of range for {} clbits",
                self.num_clbits
            )));
        }
        Ok(())
    }

    fn validate_instruction(&self, ins: &Instruction) -> Result<()> {
        if let Instruction::Gate { kind, qubits } | Instruction::ConditionalGate { kind, qubits, .. } = ins {
            if qubits.len() != kind.arity() {
                return Err(Error::invalid(format!(
                    "{kind} acts on {} qubit(s), got {}",
                    kind.arity(),
                    qubits.len()
                )));
            }
            if qubits.len() == 2 && qubits[0] == qubits[1] {
                return Err(Error::invalid(format!("{kind} targets q{} twice", qubits[0])));
            }
        }
        if let Instruction::RetryBlock { body, max_attempts, .. } = ins {
            if *max_attempts == 0 {
                return Err(Error::invalid("retry block needs at least one attempt"));
            }
            for i in body {
                if matches!(i, Instruction::RetryBlock { .. } | Instruction::ChannelX { .. }) {
                    return Err(Error::invalid(
                        "retry blocks hold only gates, measurements and barriers",
                    ));
                }
                self.validate_instruction(i)?;
            }
        }
        let mut err = Ok(());
        ins.for_each_qubit(&mut |q| {
            if err.is_ok() {
                err = self.check_qubit(q);
            }
        });
        ins.for_each_clbit(&mut |c| {
            if err.is_ok() {
                err = self.check_clbit(c);
            }
        });
        err
    }

    /// Exact energy coefficient, in units of `π²ħω₀/ε²`, of every counted
    /// gate: top-level gates plus one pass of each retry body. Conditional
    /// corrections, channel errors and injected Paulis are free.
    pub fn energy_coefficient(&self) -> EnergyCoefficient {
        fn sum(ins: &[Instruction]) -> EnergyCoefficient {
            ins.iter()
                .map(|i| match i {
                    Instruction::Gate { kind, .. } => kind.spec().energy_coefficient(),
                    Instruction::RetryBlock { body, .. } => sum(body),
                    _ => EnergyCoefficient::from_integer(0),
                })
                .fold(EnergyCoefficient::from_integer(0), |a, b| a + b)
        }
        sum(&self.instructions)
    }

    /// Counted gates by kind, in catalog order.
    pub fn gate_counts(&self) -> Vec<(GateKind, usize)> {
        fn walk(ins: &[Instruction], counts: &mut [usize; 9]) {
            for i in ins {
                match i {
                    Instruction::Gate { kind, .. } => counts[*kind as usize] += 1,
                    Instruction::RetryBlock { body, .. } => walk(body, counts),
                    _ => {}
                }
            }
        }
        let mut counts = [0usize; 9];
        walk(&self.instructions, &mut counts);
        GateKind::ALL.into_iter().zip(counts).filter(|(_, n)| *n > 0).collect()
    }

    pub fn energy(&self, epsilon: f64) -> Result<EnergyBudget> {
        EnergyBudget::from_coefficient(self.energy_coefficient(), epsilon)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits={} clbits={}", self.num_qubits, self.num_clbits)?;
        for i in &self.instructions {
            i.fmt_indented(f, 0)?;
        }
        match &self.readout {
            Some(Readout::Majority(bits)) => {
                let names: Vec<String> = bits.iter().map(|c| format!("c{c}")).collect();
                writeln!(f, "READOUT majority({})", names.join(" "))
            }
            Some(Readout::Bit(c)) => writeln!(f, "READOUT c{c}"),
            None => writeln!(f, "READOUT none"),
        }
    }
}

/// Supplies every random decision of a shot.
pub trait ShotSource {
    /// Whether a channel error with probability `p` fires.
    fn channel_flip(&mut self, p: f64) -> bool;
    /// Measurement outcome given the Born probability of reading 1.
    fn measurement(&mut self, p_one: f64) -> bool;
    fn standard_normal(&mut self) -> f64;
}

/// Pseudo-random shots from ChaCha8.
pub struct RngSource<R = ChaCha8Rng> {
    rng: R,
}

impl RngSource<ChaCha8Rng> {
    /// Independent stream `stream` of the generator seeded by `seed`.
    pub fn for_shot(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngSource { rng }
    }
}

impl<R: Rng> RngSource<R> {
    pub fn new(rng: R) -> Self {
        RngSource { rng }
    }

    pub fn into_inner(self) -> R {
        self.rng
    }
}

impl<R: Rng> ShotSource for RngSource<R> {
    fn channel_flip(&mut self, p: f64) -> bool {
        p > 0.0 && self.rng.random::<f64>() < p
    }

    fn measurement(&mut self, p_one: f64) -> bool {
        self.rng.random::<f64>() < p_one
    }

    fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

const DETERMINISTIC_TOL: f64 = 1e-12;

/// Walks every branch of a noiseless shot: each channel error and each
/// non-deterministic measurement is a binary decision. Coefficient noise
/// always reads 0, so this is only meaningful at `ε = 0`.
#[derive(Debug, Default)]
pub struct BranchSource {
    /// (choice, probability of the choice, alternative still open)
    path: Vec<(bool, f64, bool)>,
    cursor: usize,
}

impl BranchSource {
    pub fn new() -> Self {
        Self::default()
    }

    fn decide(&mut self, p_true: f64) -> bool {
        if self.cursor < self.path.len() {
            let (choice, _, _) = self.path[self.cursor];
            self.cursor += 1;
            return choice;
        }
        let entry = if p_true <= DETERMINISTIC_TOL {
            (false, 1.0, false)
        } else if p_true >= 1.0 - DETERMINISTIC_TOL {
            (true, 1.0, false)
        } else {
            (false, 1.0 - p_true, true)
        };
        self.path.push((entry.0, entry.1, entry.2));
        self.cursor += 1;
        entry.0
    }

    fn weight(&self) -> f64 {
        self.path.iter().map(|(_, p, _)| p).product()
    }

    /// Moves to the next unexplored branch; false once all are done.
    fn advance(&mut self, p_of: impl Fn(usize) -> f64) -> bool {
        while let Some((choice, _, open)) = self.path.pop() {
            if open && !choice {
                let idx = self.path.len();
                self.path.push((true, p_of(idx), false));
                self.cursor = 0;
                return true;
            }
        }
        false
    }
}

impl ShotSource for BranchSource {
    fn channel_flip(&mut self, p: f64) -> bool {
        self.decide(p)
    }

    fn measurement(&mut self, p_one: f64) -> bool {
        self.decide(p_one)
    }

    fn standard_normal(&mut self) -> f64 {
        0.0
    }
}

/// Result of one shot.
#[derive(Clone, Debug, PartialEq)]
pub struct ShotOutcome {
    pub classical_bits: Vec<bool>,
    pub logical_bit: bool,
    /// Mean pre-measurement `⟨Z⟩` over the readout qubits.
    pub final_expectation_z: f64,
    /// Retry blocks that ran out of attempts.
    pub retries_exhausted: u32,
}

impl ShotOutcome {
    pub fn is_error(&self, circuit: &Circuit) -> bool {
        self.logical_bit != circuit.expected_logical
    }
}

/// Executes a circuit shot by shot. Qubits are allocated on first use and
/// released after their last use when they hold a product state, so the
/// live register stays close to the number of data qubits.
#[derive(Clone, Debug)]
pub struct Executor<'c> {
    circuit: &'c Circuit,
    /// Index of the last top-level instruction touching each qubit.
    last_use: Vec<Option<usize>>,
}

struct Register {
    state: StateVector,
    /// Position in `state` of each circuit qubit, if live.
    position: Vec<Option<usize>>,
    /// Circuit qubit at each state position.
    owner: Vec<usize>,
    /// Whether a live qubit is known to be unentangled.
    isolated: Vec<bool>,
}

impl Register {
    fn new(num_qubits: usize) -> Self {
        Register {
            state: StateVector::basis(0, 0).expect("empty register"),
            position: vec![None; num_qubits],
            owner: Vec::new(),
            isolated: vec![true; num_qubits],
        }
    }

    fn locate(&mut self, q: usize) -> Result<usize> {
        if let Some(p) = self.position[q] {
            return Ok(p);
        }
        if self.owner.len() >= MAX_QUBITS {
            return Err(Error::invalid(format!(
                "more than {MAX_QUBITS} simultaneously live qubits"
            )));
        }
        let p = self.state.push_qubit()?;
        self.position[q] = Some(p);
        self.owner.push(q);
        self.isolated[q] = true;
        Ok(p)
    }

    fn release(&mut self, q: usize) -> Result<()> {
        let Some(p) = self.position[q] else {
            return Ok(());
        };
        if !self.isolated[q] || self.owner.len() == 1 {
            return Ok(());
        }
        self.state.remove_product_qubit(p)?;
        self.owner.remove(p);
        self.position[q] = None;
        for &o in &self.owner[p..] {
            self.position[o] = self.position[o].map(|x| x - 1);
        }
        Ok(())
    }
}

impl<'c> Executor<'c> {
    pub fn new(circuit: &'c Circuit) -> Result<Self> {
        if circuit.readout.is_none() {
            return Err(Error::invalid("circuit has no readout"));
        }
        let mut last_use = vec![None; circuit.num_qubits];
        for (idx, ins) in circuit.instructions.iter().enumerate() {
            ins.for_each_qubit(&mut |q| last_use[q] = Some(idx));
        }
        Ok(Executor { circuit, last_use })
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    pub fn run<S: ShotSource + ?Sized>(&self, noise: &NoiseModel, source: &mut S) -> Result<ShotOutcome> {
        let mut reg = Register::new(self.circuit.num_qubits);
        let mut bits = vec![false; self.circuit.num_clbits];
        let mut z_before = vec![0.0; self.circuit.num_clbits];
        let mut exhausted = 0;
        let mut touched = Vec::new();
        for (idx, ins) in self.circuit.instructions.iter().enumerate() {
            self.step(ins, noise, source, &mut reg, &mut bits, &mut z_before, &mut exhausted)?;
            touched.clear();
            ins.for_each_qubit(&mut |q| touched.push(q));
            touched.sort_unstable();
            touched.dedup();
            for &q in &touched {
                if self.last_use[q] == Some(idx) {
                    reg.release(q)?;
                }
            }
        }
        let readout = self.circuit.readout.as_ref().expect("checked in new");
        let (logical_bit, z) = match readout {
            Readout::Bit(c) => (bits[*c], z_before[*c]),
            Readout::Majority(cs) => {
                let ones = cs.iter().filter(|&&c| bits[c]).count();
                let z = cs.iter().map(|&c| z_before[c]).sum::<f64>() / cs.len() as f64;
                (2 * ones > cs.len(), z)
            }
        };
        Ok(ShotOutcome {
            classical_bits: bits,
            logical_bit,
            final_expectation_z: z,
            retries_exhausted: exhausted,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn step<S: ShotSource + ?Sized>(
        &self,
        ins: &Instruction,
        noise: &NoiseModel,
        source: &mut S,
        reg: &mut Register,
        bits: &mut [bool],
        z_before: &mut [f64],
        exhausted: &mut u32,
    ) -> Result<()> {
        match ins {
            Instruction::Gate { kind, qubits } => apply_gate(*kind, qubits, noise, source, reg),
            Instruction::ConditionalGate {
                kind,
                qubits,
                condition,
            } => {
                if condition.holds(bits) {
                    apply_gate(*kind, qubits, noise, source, reg)?;
                }
                Ok(())
            }
            Instruction::ChannelX { qubit } => {
                let p = reg.locate(*qubit)?;
                if source.channel_flip(noise.p_x) {
                    reg.state.flip(p);
                }
                Ok(())
            }
            Instruction::InjectPauli { pauli, qubit } => {
                let p = reg.locate(*qubit)?;
                if *pauli != Pauli::I {
                    reg.state.apply_1q(&pauli.matrix(), p);
                }
                Ok(())
            }
            Instruction::Measure { qubit, clbit } => {
                let p = reg.locate(*qubit)?;
                let mut z = 0.0;
                let outcome = reg.state.measure_z_with(p, |p1| {
                    z = 1.0 - 2.0 * p1;
                    source.measurement(p1)
                })?;
                bits[*clbit] = outcome;
                z_before[*clbit] = z;
                reg.isolated[*qubit] = true;
                Ok(())
            }
            Instruction::Barrier(_) => Ok(()),
            Instruction::RetryBlock {
                body,
                success_clbits,
                max_attempts,
            } => {
                let mut body_qubits = Vec::new();
                for i in body {
                    i.for_each_qubit(&mut |q| body_qubits.push(q));
                }
                body_qubits.sort_unstable();
                body_qubits.dedup();
                for attempt in 0..*max_attempts {
                    if attempt > 0 {
                        for &q in &body_qubits {
                            reset(q, source, reg)?;
                        }
                    }
                    for i in body {
                        self.step(i, noise, source, reg, bits, z_before, exhausted)?;
                    }
                    if success_clbits.iter().all(|&c| !bits[c]) {
                        return Ok(());
                    }
                }
                *exhausted += 1;
                Ok(())
            }
        }
    }
}

fn apply_gate<S: ShotSource + ?Sized>(
    kind: GateKind,
    qubits: &[usize],
    noise: &NoiseModel,
    source: &mut S,
    reg: &mut Register,
) -> Result<()> {
    let u = kind.spec().noisy_unitary(noise.epsilon, || source.standard_normal());
    match (u, qubits) {
        (Matrix::One(m), &[q]) => {
            let p = reg.locate(q)?;
            reg.state.apply_1q(&m, p);
        }
        (Matrix::Two(m), &[a, b]) => {
            let pa = reg.locate(a)?;
            let pb = reg.locate(b)?;
            reg.state.apply_2q(&m, pa, pb);
            reg.isolated[a] = false;
            reg.isolated[b] = false;
        }
        _ => return Err(Error::Internal(format!("{kind} applied to {} qubit(s)", qubits.len()))),
    }
    Ok(())
}

/// Measures a qubit and flips it back to |0⟩ if it read 1.
fn reset<S: ShotSource + ?Sized>(q: usize, source: &mut S, reg: &mut Register) -> Result<()> {
    let p = reg.locate(q)?;
    if reg.state.measure_z_with(p, |p1| source.measurement(p1))? {
        reg.state.flip(p);
    }
    reg.isolated[q] = true;
    Ok(())
}

/// Maximum number of branches [`enumerate_branches`] explores.
pub const DEFAULT_BRANCH_CAP: usize = 1 << 16;

/// Runs every branch of the noiseless decision tree and calls `visit` with
/// each outcome and its probability.
pub fn enumerate_branches(
    circuit: &Circuit,
    p_x: f64,
    cap: usize,
    mut visit: impl FnMut(&ShotOutcome, f64),
) -> Result<usize> {
    let exec = Executor::new(circuit)?;
    let noise = NoiseModel::new(0.0, p_x)?;
    let mut src = BranchSource::new();
    let mut count = 0;
    loop {
        if count >= cap {
            return Err(Error::invalid(format!("more than {cap} branches")));
        }
        src.cursor = 0;
        let outcome = exec.run(&noise, &mut src)?;
        if src.cursor != src.path.len() {
            return Err(Error::Internal("branch replay diverged".into()));
        }
        visit(&outcome, src.weight());
        count += 1;
        // the probability of the flipped choice is 1 − p(original choice)
        let snapshot: Vec<f64> = src.path.iter().map(|(_, p, _)| 1.0 - p).collect();
        if !src.advance(|i| snapshot[i]) {
            return Ok(count);
        }
    }
}

/// The logical bit of a noiseless, error-free run. Errors when branches
/// disagree.
pub fn ideal_outcome(circuit: &Circuit) -> Result<bool> {
    let mut seen: Option<bool> = None;
    let mut conflict = false;
    enumerate_branches(circuit, 0.0, DEFAULT_BRANCH_CAP, |o, _| match seen {
        None => seen = Some(o.logical_bit),
        Some(b) if b != o.logical_bit => conflict = true,
        _ => {}
    })?;
    if conflict {
        return Err(Error::ContractViolation(
            "noiseless readout is not deterministic".into(),
        ));
    }
    seen.ok_or_else(|| Error::Internal("no branch executed".into()))
}

/// Exact logical error probability at `ε = 0` with channel rate `p_x`.
pub fn exact_error_rate(circuit: &Circuit, p_x: f64) -> Result<f64> {
    let mut err = 0.0;
    enumerate_branches(circuit, p_x, DEFAULT_BRANCH_CAP, |o, w| {
        if o.logical_bit != circuit.expected_logical {
            err += w;
        }
    })?;
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_pair() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.gate(GateKind::H, &[0]).unwrap();
        c.gate(GateKind::CX, &[0, 1]).unwrap();
        c.measure(0, 0).unwrap();
        c.measure(1, 1).unwrap();
        c.set_readout(Readout::Bit(1)).unwrap();
        c
    }

    #[test]
    fn validation_rejects_bad_instructions() {
        let mut c = Circuit::new(2, 1);
        assert!(c.gate(GateKind::CX, &[0]).is_err());
        assert!(c.gate(GateKind::CX, &[1, 1]).is_err());
        assert!(c.gate(GateKind::X, &[2]).is_err());
        assert!(c.measure(0, 1).is_err());
        assert!(c.set_readout(Readout::Majority(vec![])).is_err());
        assert!(Executor::new(&c).is_err());
    }

    #[test]
    fn bell_branches_agree_pairwise() {
        let c = bell_pair();
        let mut total = 0.0;
        let n = enumerate_branches(&c, 0.0, 16, |o, w| {
            assert_eq!(o.classical_bits[0], o.classical_bits[1]);
            assert_eq!(o.final_expectation_z.abs(), 1.0);
            total += w;
        })
        .unwrap();
        assert_eq!(n, 2);
        assert!((total - 1.0).abs() < 1e-12);
        assert!(ideal_outcome(&c).is_err());
    }

    #[test]
    fn channel_flip_probability_is_exact() {
        let mut c = Circuit::new(1, 1);
        c.channel_x(0).unwrap();
        c.measure(0, 0).unwrap();
        c.set_readout(Readout::Bit(0)).unwrap();
        assert_eq!(exact_error_rate(&c, 0.125).unwrap(), 0.125);
        assert_eq!(ideal_outcome(&c).unwrap(), false);
    }

    #[test]
    fn majority_readout_of_three_flips() {
        let mut c = Circuit::new(3, 3);
        for q in 0..3 {
            c.channel_x(q).unwrap();
            c.measure(q, q).unwrap();
        }
        c.set_readout(Readout::Majority(vec![0, 1, 2])).unwrap();
        let p: f64 = 0.1;
        let expected = 3.0 * p * p * (1.0 - p) + p.powi(3);
        assert!((exact_error_rate(&c, p).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn conditional_gate_fires_on_parity() {
        let mut c = Circuit::new(3, 3);
        c.gate(GateKind::X, &[0]).unwrap();
        c.measure(0, 0).unwrap();
        c.measure(1, 1).unwrap();
        c.conditional(
            GateKind::X,
            &[2],
            Condition {
                terms: vec![ParityTerm {
                    clbits: vec![0, 1],
                    parity: true,
                }],
            },
        )
        .unwrap();
        c.measure(2, 2).unwrap();
        c.set_readout(Readout::Bit(2)).unwrap();
        assert!(ideal_outcome(&c).unwrap());
        assert_eq!(c.energy_coefficient(), EnergyCoefficient::new(1, 8));
    }

    #[test]
    fn retry_block_counts_energy_once_and_resets() {
        let mut c = Circuit::new(2, 2);
        let body = vec![
            Instruction::Gate {
                kind: GateKind::H,
                qubits: vec![0],
            },
            Instruction::Measure { qubit: 0, clbit: 0 },
        ];
        c.push(Instruction::RetryBlock {
            body,
            success_clbits: vec![0],
            max_attempts: 3,
        })
        .unwrap();
        c.measure(0, 1).unwrap();
        c.set_readout(Readout::Bit(1)).unwrap();
        assert_eq!(c.energy_coefficient(), EnergyCoefficient::new(1, 8));
        let exec = Executor::new(&c).unwrap();
        let mut exhausted = 0.0;
        let mut one = 0.0;
        enumerate_branches(&c, 0.0, 64, |o, w| {
            if o.retries_exhausted > 0 {
                exhausted += w;
            }
            if o.logical_bit {
                one += w;
            }
        })
        .unwrap();
        assert!((exhausted - 0.125).abs() < 1e-12);
        assert!((one - 0.125).abs() < 1e-12);
        let mut src = RngSource::for_shot(3, 0);
        exec.run(&NoiseModel::noiseless(), &mut src).unwrap();
    }

    #[test]
    fn released_qubits_do_not_grow_the_register() {
        // 20 ancillas used one at a time would overflow without release
        let mut c = Circuit::new(21, 21);
        c.gate(GateKind::H, &[0]).unwrap();
        for a in 1..21 {
            c.gate(GateKind::CX, &[0, a]).unwrap();
            c.gate(GateKind::CX, &[0, a]).unwrap();
            c.measure(a, a).unwrap();
        }
        c.gate(GateKind::H, &[0]).unwrap();
        c.measure(0, 0).unwrap();
        c.set_readout(Readout::Bit(0)).unwrap();
        assert!(!ideal_outcome(&c).unwrap());
    }

    #[test]
    fn display_lists_one_instruction_per_line() {
        let text = bell_pair().to_string();
        assert_eq!(
            text,
            "# qubits=2 clbits=2\nH q0\nCX q0 q1\nMEASURE q0 -> c0\nMEASURE q1 -> c1\nREADOUT c1\n"
        );
    }

    #[test]
    fn shots_are_reproducible_per_stream() {
        let c = bell_pair();
        let exec = Executor::new(&c).unwrap();
        let noise = NoiseModel::new(0.2, 0.0).unwrap();
        let a = exec.run(&noise, &mut RngSource::for_shot(11, 4)).unwrap();
        let b = exec.run(&noise, &mut RngSource::for_shot(11, 4)).unwrap();
        assert_eq!(a, b);
    }
}
