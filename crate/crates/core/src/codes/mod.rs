//! Code definitions, encoder and syndrome-extraction strategies, and the
//! end-to-end pipeline builder.
//!
//! Codes are addressed by string ids of the form
//! `family[:encoder][:extractor(key=value,...)]`, e.g. `rep7:waterfall`,
//! `perfect5:b`, `steane7`, `rep3:direct:ft(v=1)`.

mod perfect5;
mod repetition;
mod steane7;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::circuit::{Circuit, Condition, Instruction, ParityTerm, Readout};
use crate::error::{Error, Result};
use crate::ft::CatExtractor;
use crate::gates::{EnergyCoefficient, GateKind};
use crate::linalg::Pauli;

pub use perfect5::Perfect5Encoder;
pub use repetition::{RepetitionEncoder, RepetitionLayout};
pub use steane7::Steane7Encoder;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    pub fn from_paulis(paulis: Vec<Pauli>) -> Self {
        PauliString(paulis)
    }

    /// `pauli` on each qubit in `support`, identity elsewhere.
    pub fn on(n: usize, support: &[usize], pauli: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in support {
            s.0[q] = pauli;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.0[q]
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.0.iter().copied().enumerate().filter(|(_, p)| *p != Pauli::I)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.0.iter().zip(&other.0).filter(|(a, b)| a.anticommutes(**b)).count() % 2 == 0
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| Pauli::from_char(ch).ok_or_else(|| Error::invalid(format!("'{ch}' is not a Pauli in '{s}'"))))
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

pub type Syndrome = Vec<bool>;

pub fn syndrome_of(checks: &[PauliString], error: &PauliString) -> Syndrome {
    checks.iter().map(|c| !c.commutes_with(error)).collect()
}

/// Syndrome → correction, filled by enumerating errors in order of
/// increasing weight and keeping the first error seen for each syndrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    entries: BTreeMap<Syndrome, PauliString>,
}

impl CorrectionTable {
    pub fn build(checks: &[PauliString], n: usize, alphabet: &[Pauli], max_weight: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(vec![false; checks.len()], PauliString::identity(n));
        for w in 1..=max_weight.min(n) {
            for_each_subset(n, w, &mut |support| {
                let mut choice = vec![0usize; w];
                loop {
                    let mut e = PauliString::identity(n);
                    for (slot, &q) in support.iter().enumerate() {
                        e.0[q] = alphabet[choice[slot]];
                    }
                    entries.entry(syndrome_of(checks, &e)).or_insert(e);
                    // odometer over alphabet choices
                    let mut k = 0;
                    while k < w {
                        choice[k] += 1;
                        if choice[k] < alphabet.len() {
                            break;
                        }
                        choice[k] = 0;
                        k += 1;
                    }
                    if k == w {
                        break;
                    }
                }
            });
        }
        CorrectionTable { entries }
    }

    /// The correction for a syndrome; `None` for syndromes no enumerated
    /// error produces.
    pub fn lookup(&self, syndrome: &[bool]) -> Option<&PauliString> {
        self.entries.get(syndrome)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Syndrome, &PauliString)> {
        self.entries.iter()
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Prepares a codeword from an input on data qubit 0 and `|0⟩` elsewhere.
pub trait Encoder: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    /// Gates and barriers on local data indices `0..n`.
    fn instructions(&self, n: usize) -> Result<Vec<Instruction>>;
}

/// A measured check: its Pauli string and the clbits whose XOR is the
/// measured eigenvalue bit (1 for −1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasuredCheck {
    pub check: PauliString,
    pub clbits: Vec<usize>,
}

pub trait SyndromeExtractor: Send + Sync + fmt::Debug {
    /// Name including parameters, as it appears in code ids.
    fn name(&self) -> String;
    /// Appends syndrome extraction for `stabilizers` on `data`, allocating
    /// ancillas and clbits in `circuit`.
    fn append(&self, circuit: &mut Circuit, stabilizers: &[PauliString], data: &[usize]) -> Result<Vec<MeasuredCheck>>;
    /// Whether this extractor is the family default and can be left out of
    /// the canonical id.
    fn is_default_for(&self, family: Family) -> bool {
        let _ = family;
        false
    }
}

/// Z-type checks through CX gates from each data qubit onto one ancilla.
#[derive(Debug, Default)]
pub struct ParityExtractor;

impl SyndromeExtractor for ParityExtractor {
    fn name(&self) -> String {
        "parity".into()
    }

    fn append(&self, circuit: &mut Circuit, stabilizers: &[PauliString], data: &[usize]) -> Result<Vec<MeasuredCheck>> {
        let mut out = Vec::with_capacity(stabilizers.len());
        for s in stabilizers {
            if s.support().any(|(_, p)| p != Pauli::Z) {
                return Err(Error::invalid(format!(
                    "parity extraction needs Z-type checks, got {s}"
                )));
            }
            let anc = circuit.add_qubit();
            for (q, _) in s.support() {
                circuit.gate(GateKind::CX, &[data[q], anc])?;
            }
            let c = circuit.add_clbit();
            circuit.measure(anc, c)?;
            out.push(MeasuredCheck {
                check: s.clone(),
                clbits: vec![c],
            });
        }
        Ok(out)
    }

    fn is_default_for(&self, family: Family) -> bool {
        matches!(family, Family::Repetition(_))
    }
}

/// General Pauli checks: H on the ancilla, controlled-P from the ancilla
/// onto each supported data qubit, H, measure.
#[derive(Debug, Default)]
pub struct HadamardExtractor;

impl SyndromeExtractor for HadamardExtractor {
    fn name(&self) -> String {
        "hadamard".into()
    }

    fn append(&self, circuit: &mut Circuit, stabilizers: &[PauliString], data: &[usize]) -> Result<Vec<MeasuredCheck>> {
        let mut out = Vec::with_capacity(stabilizers.len());
        for s in stabilizers {
            let anc = circuit.add_qubit();
            circuit.gate(GateKind::H, &[anc])?;
            for (q, p) in s.support() {
                let kind = GateKind::controlled_pauli(p).expect("support excludes I");
                circuit.gate(kind, &[anc, data[q]])?;
            }
            circuit.gate(GateKind::H, &[anc])?;
            let c = circuit.add_clbit();
            circuit.measure(anc, c)?;
            out.push(MeasuredCheck {
                check: s.clone(),
                clbits: vec![c],
            });
        }
        Ok(out)
    }

    fn is_default_for(&self, family: Family) -> bool {
        matches!(family, Family::Perfect5 | Family::Steane7)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// One unprotected qubit.
    Bare,
    /// Bit-flip repetition code on an odd number of qubits.
    Repetition(usize),
    Perfect5,
    Steane7,
}

impl Family {
    pub fn key(self) -> &'static str {
        match self {
            Family::Bare => "bare",
            Family::Repetition(_) => "repetition",
            Family::Perfect5 => "perfect5",
            Family::Steane7 => "steane7",
        }
    }

    pub fn num_data(self) -> usize {
        match self {
            Family::Bare => 1,
            Family::Repetition(n) => n,
            Family::Perfect5 => 5,
            Family::Steane7 => 7,
        }
    }

    fn token(self) -> String {
        match self {
            Family::Repetition(n) => format!("rep{n}"),
            f => f.key().to_string(),
        }
    }

    fn parse(token: &str) -> Result<Self> {
        match token {
            "bare" => Ok(Family::Bare),
            "perfect5" => Ok(Family::Perfect5),
            "steane7" => Ok(Family::Steane7),
            t => {
                let n: usize = t
                    .strip_prefix("rep")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown code family '{t}'")))?;
                if n < 3 || n % 2 == 0 {
                    return Err(Error::invalid(format!(
                        "repetition code size must be odd and >= 3, got {n}"
                    )));
                }
                Ok(Family::Repetition(n))
            }
        }
    }

    fn default_encoder(self) -> &'static str {
        match self {
            Family::Bare | Family::Steane7 => "standard",
            Family::Repetition(_) => "direct",
            Family::Perfect5 => "a",
        }
    }

    fn default_extractor(self) -> &'static str {
        match self {
            Family::Bare | Family::Repetition(_) => "parity",
            Family::Perfect5 | Family::Steane7 => "hadamard",
        }
    }

    pub fn stabilizers(self) -> Vec<PauliString> {
        match self {
            Family::Bare => vec![],
            Family::Repetition(n) => (0..n - 1).map(|i| PauliString::on(n, &[i, i + 1], Pauli::Z)).collect(),
            Family::Perfect5 => perfect5::STABILIZERS
                .iter()
                .map(|s| s.parse().expect("valid literal"))
                .collect(),
            Family::Steane7 => steane7::stabilizers(),
        }
    }

    pub fn logical_x(self) -> PauliString {
        PauliString::on(self.num_data(), &(0..self.num_data()).collect::<Vec<_>>(), Pauli::X)
    }

    pub fn logical_z(self) -> PauliString {
        match self {
            Family::Bare | Family::Repetition(_) => PauliString::on(self.num_data(), &[0], Pauli::Z),
            f => PauliString::on(f.num_data(), &(0..f.num_data()).collect::<Vec<_>>(), Pauli::Z),
        }
    }

    /// Error alphabet and weight the decoder is built to correct.
    fn correctable(self) -> (&'static [Pauli], usize) {
        match self {
            Family::Bare => (&[Pauli::X], 0),
            Family::Repetition(n) => (&[Pauli::X], (n - 1) / 2),
            Family::Perfect5 | Family::Steane7 => (&[Pauli::X, Pauli::Y, Pauli::Z], 1),
        }
    }

    /// Repetition codes read out by majority vote; the others decode with
    /// the inverse encoder and measure data qubit 0.
    fn majority_readout(self) -> bool {
        matches!(self, Family::Bare | Family::Repetition(_))
    }
}

/// A fully resolved code: family data plus the chosen strategies.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub id: String,
    pub family: Family,
    pub stabilizers: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    pub correction_table: CorrectionTable,
    encoder: Arc<dyn Encoder>,
    extractor: Arc<dyn SyndromeExtractor>,
}

impl CodeSpec {
    pub fn num_data(&self) -> usize {
        self.family.num_data()
    }

    pub fn encoder_variant(&self) -> &str {
        self.encoder.name()
    }

    pub fn encoder(&self) -> &dyn Encoder {
        self.encoder.as_ref()
    }

    pub fn extractor(&self) -> &dyn SyndromeExtractor {
        self.extractor.as_ref()
    }

    pub fn encoder_instructions(&self) -> Result<Vec<Instruction>> {
        self.encoder.instructions(self.num_data())
    }

    /// Pipeline circuit with the default options.
    pub fn circuit(&self) -> Result<Circuit> {
        build_pipeline(self, &PipelineOptions::default())
    }

    pub fn energy_coefficient(&self) -> Result<EnergyCoefficient> {
        Ok(self.circuit()?.energy_coefficient())
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub channel: bool,
    pub logical_x: bool,
    /// Ideal Paulis applied right after the channel, by data index.
    pub injected: Vec<(usize, Pauli)>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            channel: true,
            logical_x: true,
            injected: Vec::new(),
        }
    }
}

fn remap(ins: &Instruction, data: &[usize]) -> Result<Instruction> {
    match ins {
        Instruction::Gate { kind, qubits } => Ok(Instruction::Gate {
            kind: *kind,
            qubits: qubits.iter().map(|&q| data[q]).collect(),
        }),
        Instruction::Barrier(l) => Ok(Instruction::Barrier(l.clone())),
        other => Err(Error::invalid(format!(
            "encoders may hold only gates and barriers, got {other:?}"
        ))),
    }
}

/// Gates undoing `instructions`, in reverse order.
pub fn inverse_instructions(instructions: &[Instruction]) -> Result<Vec<Instruction>> {
    let mut out = Vec::new();
    for ins in instructions.iter().rev() {
        match ins {
            Instruction::Gate { kind, qubits } => out.extend(kind.inverse().into_iter().map(|k| Instruction::Gate {
                kind: k,
                qubits: qubits.clone(),
            })),
            Instruction::Barrier(l) => out.push(Instruction::Barrier(l.clone())),
            other => return Err(Error::invalid(format!("cannot invert {other:?}"))),
        }
    }
    Ok(out)
}

/// Encoder → channel X on every data qubit → injected errors → logical X
/// → syndrome extraction → conditional corrections → readout.
pub fn build_pipeline(code: &CodeSpec, opts: &PipelineOptions) -> Result<Circuit> {
    let n = code.num_data();
    let mut c = Circuit::new(n, 0);
    let data: Vec<usize> = (0..n).collect();
    let encoder = code.encoder_instructions()?;
    for ins in &encoder {
        c.push(remap(ins, &data)?)?;
    }
    if opts.channel {
        for &q in &data {
            c.channel_x(q)?;
        }
    }
    for &(q, pauli) in &opts.injected {
        if q >= n {
            return Err(Error::invalid(format!("injected error on data qubit {q} of {n}")));
        }
        c.push(Instruction::InjectPauli { pauli, qubit: q })?;
    }
    if opts.logical_x {
        for (q, p) in code.logical_x.support() {
            c.gate(GateKind::from_pauli(p).expect("support excludes I"), &[data[q]])?;
        }
    }
    if !code.stabilizers.is_empty() {
        let checks = code.extractor.append(&mut c, &code.stabilizers, &data)?;
        append_corrections(&mut c, code, &checks, &data)?;
    }
    if code.family.majority_readout() {
        let bits: Vec<usize> = data
            .iter()
            .map(|&q| {
                let b = c.add_clbit();
                c.measure(q, b).map(|_| b)
            })
            .collect::<Result<_>>()?;
        c.set_readout(Readout::Majority(bits))?;
    } else {
        for ins in inverse_instructions(&encoder)? {
            c.push(remap(&ins, &data)?)?;
        }
        let b = c.add_clbit();
        c.measure(data[0], b)?;
        c.set_readout(Readout::Bit(b))?;
    }
    c.set_expected_logical(opts.logical_x);
    Ok(c)
}

fn append_corrections(c: &mut Circuit, code: &CodeSpec, checks: &[MeasuredCheck], data: &[usize]) -> Result<()> {
    let check_strings: Vec<PauliString> = checks.iter().map(|m| m.check.clone()).collect();
    let table = if check_strings == code.stabilizers {
        code.correction_table.clone()
    } else {
        let (alphabet, t) = code.family.correctable();
        CorrectionTable::build(&check_strings, code.num_data(), alphabet, t)
    };
    for (syndrome, fix) in table.iter() {
        if fix.weight() == 0 {
            continue;
        }
        let condition = Condition {
            terms: checks
                .iter()
                .zip(syndrome)
                .map(|(m, &bit)| ParityTerm {
                    clbits: m.clbits.clone(),
                    parity: bit,
                })
                .collect(),
        };
        for (q, p) in fix.support() {
            let kind = GateKind::from_pauli(p).expect("support excludes I");
            c.conditional(kind, &[data[q]], condition.clone())?;
        }
    }
    Ok(())
}

type ExtractorFactory =
    Box<dyn Fn(&BTreeMap<String, String>, Family) -> Result<Arc<dyn SyndromeExtractor>> + Send + Sync>;

/// Name-addressed registry of encoders (per family) and syndrome
/// extractors.
pub struct CodeRegistry {
    encoders: BTreeMap<(&'static str, String), Arc<dyn Encoder>>,
    extractors: BTreeMap<String, ExtractorFactory>,
}

impl fmt::Debug for CodeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeRegistry")
            .field("encoders", &self.encoders.keys().collect::<Vec<_>>())
            .field("extractors", &self.extractors.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl CodeRegistry {
    pub fn empty() -> Self {
        CodeRegistry {
            encoders: BTreeMap::new(),
            extractors: BTreeMap::new(),
        }
    }

    /// All built-in codes and strategies.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register_encoder("bare", Arc::new(BareEncoder));
        for layout in RepetitionLayout::ALL {
            r.register_encoder("repetition", Arc::new(RepetitionEncoder(layout)));
        }
        for enc in Perfect5Encoder::all() {
            r.register_encoder("perfect5", Arc::new(enc));
        }
        r.register_encoder("steane7", Arc::new(Steane7Encoder));
        r.register_extractor("parity", |params, _| {
            no_params("parity", params)?;
            Ok(Arc::new(ParityExtractor))
        });
        r.register_extractor("hadamard", |params, _| {
            no_params("hadamard", params)?;
            Ok(Arc::new(HadamardExtractor))
        });
        r.register_extractor("ft", |params, family| {
            Ok(Arc::new(CatExtractor::from_params(params, family)?))
        });
        r
    }

    pub fn global() -> &'static CodeRegistry {
        static REGISTRY: OnceLock<CodeRegistry> = OnceLock::new();
        REGISTRY.get_or_init(CodeRegistry::standard)
    }

    pub fn register_encoder(&mut self, family: &'static str, encoder: Arc<dyn Encoder>) {
        self.encoders.insert((family, encoder.name().to_string()), encoder);
    }

    pub fn register_extractor(
        &mut self,
        name: &str,
        factory: impl Fn(&BTreeMap<String, String>, Family) -> Result<Arc<dyn SyndromeExtractor>> + Send + Sync + 'static,
    ) {
        self.extractors.insert(name.to_string(), Box::new(factory));
    }

    pub fn encoder_names(&self, family: Family) -> Vec<&str> {
        self.encoders
            .keys()
            .filter(|(f, _)| *f == family.key())
            .map(|(_, n)| n.as_str())
            .collect()
    }

    pub fn extractor_names(&self) -> Vec<&str> {
        self.extractors.keys().map(String::as_str).collect()
    }

    pub fn resolve(&self, id: &str) -> Result<CodeSpec> {
        let mut tokens = id.trim().split(':');
        let family = Family::parse(tokens.next().unwrap_or_default())?;
        let mut encoder_name: Option<String> = None;
        let mut extractor: Option<(String, BTreeMap<String, String>)> = None;
        for tok in tokens {
            let (name, params) = parse_token(tok)?;
            if params.is_empty() && self.encoders.contains_key(&(family.key(), name.clone())) {
                if encoder_name.replace(name).is_some() {
                    return Err(Error::invalid(format!("'{id}' names two encoders")));
                }
            } else if self.extractors.contains_key(&name) {
                if extractor.replace((name, params)).is_some() {
                    return Err(Error::invalid(format!("'{id}' names two syndrome extractors")));
                }
            } else {
                return Err(Error::invalid(format!(
                    "'{tok}' in '{id}' is neither a {} encoder ({}) nor an extractor ({})",
                    family.key(),
                    self.encoder_names(family).join(", "),
                    self.extractor_names().join(", ")
                )));
            }
        }
        let encoder_name = encoder_name.unwrap_or_else(|| family.default_encoder().to_string());
        let encoder = self
            .encoders
            .get(&(family.key(), encoder_name.clone()))
            .cloned()
            .ok_or_else(|| Error::invalid(format!("no encoder '{encoder_name}' for {}", family.key())))?;
        let (ex_name, ex_params) =
            extractor.unwrap_or_else(|| (family.default_extractor().to_string(), BTreeMap::new()));
        let extractor = (self.extractors[&ex_name])(&ex_params, family)?;

        let mut canonical = family.token();
        if !matches!(family, Family::Bare | Family::Steane7) {
            canonical.push(':');
            canonical.push_str(&encoder_name);
        }
        if !extractor.is_default_for(family) && !matches!(family, Family::Bare) {
            canonical.push(':');
            canonical.push_str(&extractor.name());
        }

        let stabilizers = family.stabilizers();
        let (alphabet, t) = family.correctable();
        let correction_table = CorrectionTable::build(&stabilizers, family.num_data(), alphabet, t);
        Ok(CodeSpec {
            id: canonical,
            family,
            logical_x: family.logical_x(),
            logical_z: family.logical_z(),
            stabilizers,
            correction_table,
            encoder,
            extractor,
        })
    }
}

fn no_params(name: &str, params: &BTreeMap<String, String>) -> Result<()> {
    if let Some(k) = params.keys().next() {
        return Err(Error::invalid(format!("extractor '{name}' takes no parameter '{k}'")));
    }
    Ok(())
}

/// `name` or `name(k=v,k=v)`.
fn parse_token(tok: &str) -> Result<(String, BTreeMap<String, String>)> {
    let tok = tok.trim();
    let Some(open) = tok.find('(') else {
        return Ok((tok.to_ascii_lowercase(), BTreeMap::new()));
    };
    let inner = tok[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::invalid(format!("unbalanced parentheses in '{tok}'")))?;
    let mut params = BTreeMap::new();
    for kv in inner.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value in '{tok}'")))?;
        params.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    Ok((tok[..open].to_ascii_lowercase(), params))
}

/// Resolves a code id against the built-in registry.
pub fn resolve_code(id: &str) -> Result<CodeSpec> {
    CodeRegistry::global().resolve(id)
}

#[derive(Debug)]
struct BareEncoder;

impl Encoder for BareEncoder {
    fn name(&self) -> &str {
        "standard"
    }

    fn instructions(&self, n: usize) -> Result<Vec<Instruction>> {
        if n != 1 {
            return Err(Error::invalid("the bare code has one qubit"));
        }
        Ok(vec![])
    }
}
