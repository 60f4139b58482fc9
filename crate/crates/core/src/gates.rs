//! Gate catalog: each gate is `exp(−i Σ λ_i G_i)` for fixed Hermitian
//! generators `G_i` and real coefficients `λ_i`. Coefficient noise replaces
//! every `λ_i` by a draw from `N(λ_i, ε²)`; the control-energy lower bound
//! is `(ħω₀/4) Σ λ_i²/ε²`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num::complex::Complex64;
use num::rational::Ratio;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{average_gate_fidelity, c, herm_expm, kron, HermitianGenerator, Mat2, Mat4, Matrix, Pauli};

/// Exact energy coefficient in units of `π²ħω₀/ε²`.
pub type EnergyCoefficient = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    CX,
    CY,
    CZ,
    H,
    Q,
    S,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::CX,
        GateKind::CY,
        GateKind::CZ,
        GateKind::H,
        GateKind::Q,
        GateKind::S,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::CX => "CX",
            GateKind::CY => "CY",
            GateKind::CZ => "CZ",
            GateKind::H => "H",
            GateKind::Q => "Q",
            GateKind::S => "S",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CY | GateKind::CZ => 2,
            _ => 1,
        }
    }

    pub fn spec(self) -> &'static GateSpec {
        &catalog()[self as usize]
    }

    /// Catalog gates whose product is the inverse of this gate. Everything
    /// but S is an involution; S† = Z·S.
    pub fn inverse(self) -> Vec<GateKind> {
        match self {
            GateKind::S => vec![GateKind::Z, GateKind::S],
            g => vec![g],
        }
    }

    pub fn from_pauli(p: Pauli) -> Option<GateKind> {
        match p {
            Pauli::I => None,
            Pauli::X => Some(GateKind::X),
            Pauli::Y => Some(GateKind::Y),
            Pauli::Z => Some(GateKind::Z),
        }
    }

    pub fn controlled_pauli(p: Pauli) -> Option<GateKind> {
        match p {
            Pauli::I => None,
            Pauli::X => Some(GateKind::CX),
            Pauli::Y => Some(GateKind::CY),
            Pauli::Z => Some(GateKind::CZ),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let alias = match upper.as_str() {
            "CNOT" => "CX",
            other => other,
        };
        GateKind::ALL.into_iter().find(|g| g.name() == alias).ok_or_else(|| {
            Error::invalid(format!(
                "unknown gate '{s}'; expected one of X, Y, Z, CX, CY, CZ, H, Q, S"
            ))
        })
    }
}

/// A coefficient `sign · π · √r` with `r` rational, so that `λ²/π² = r`
/// stays exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coefficient {
    pub negative: bool,
    pub pi_sq_fraction: Ratio<i64>,
}

impl Coefficient {
    const fn new(negative: bool, num: i64, den: i64) -> Self {
        Coefficient {
            negative,
            pi_sq_fraction: Ratio::new_raw(num, den),
        }
    }

    pub fn value(&self) -> f64 {
        let r = *self.pi_sq_fraction.numer() as f64 / *self.pi_sq_fraction.denom() as f64;
        let v = PI * r.sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negative { "-" } else { "" };
        let (n, d) = (*self.pi_sq_fraction.numer(), *self.pi_sq_fraction.denom());
        // π·√(n/d); print the perfect-square cases as π/k
        let root = |x: i64| {
            let s = (x as f64).sqrt().round() as i64;
            (s * s == x).then_some(s)
        };
        match (root(n), root(d)) {
            (Some(1), Some(1)) => write!(f, "{sign}π"),
            (Some(1), Some(k)) => write!(f, "{sign}π/{k}"),
            (Some(a), Some(b)) => write!(f, "{sign}{a}π/{b}"),
            (Some(1), None) => write!(f, "{sign}π/√{d}"),
            _ => write!(f, "{sign}π·√({n}/{d})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coefficient: Coefficient,
    pub generator: HermitianGenerator,
}

#[derive(Clone, Debug)]
pub struct GateSpec {
    pub kind: GateKind,
    pub ideal: Matrix,
    pub terms: Vec<Term>,
}

impl GateSpec {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    /// Coefficient values `λ_i` in radians.
    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient.value()).collect()
    }

    /// `¼ Σ λ_i²/π²`, the energy bound in units of `π²ħω₀/ε²`.
    pub fn energy_coefficient(&self) -> EnergyCoefficient {
        self.terms
            .iter()
            .map(|t| t.coefficient.pi_sq_fraction)
            .fold(Ratio::from_integer(0), |acc, r| acc + r)
            / 4
    }

    /// `exp(−i Σ λ'_i G_i)` where `λ'_i = λ_i + ε·n_i` and `n_i` comes from
    /// `standard_normal`. At `ε = 0` the ideal matrix is returned without
    /// consuming any draws.
    pub fn noisy_unitary(&self, epsilon: f64, mut standard_normal: impl FnMut() -> f64) -> Matrix {
        if epsilon == 0.0 {
            return self.ideal.clone();
        }
        let mut sum = match self.arity() {
            1 => Matrix::One(Mat2::zeros()),
            _ => Matrix::Two(Mat4::zeros()),
        };
        for term in &self.terms {
            let lambda = term.coefficient.value() + epsilon * standard_normal();
            let scaled = term.generator.matrix().scale(c(lambda, 0.0));
            sum = sum.add(&scaled).expect("terms share the gate arity");
        }
        herm_expm(&HermitianGenerator::from_hermitian_sum(sum))
    }
}

/// The canonical decomposition of a named gate.
pub fn gate_catalog(name: &str) -> Result<&'static GateSpec> {
    Ok(name.parse::<GateKind>()?.spec())
}

fn catalog() -> &'static [GateSpec] {
    static CATALOG: OnceLock<Vec<GateSpec>> = OnceLock::new();
    CATALOG.get_or_init(|| GateKind::ALL.into_iter().map(build_spec).collect())
}

fn projector_one() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
}

fn build_spec(kind: GateKind) -> GateSpec {
    let (i, x, y, z) = (
        Pauli::I.matrix(),
        Pauli::X.matrix(),
        Pauli::Y.matrix(),
        Pauli::Z.matrix(),
    );
    let half = Coefficient::new(false, 1, 4); // π/2
    let quarter = Coefficient::new(false, 1, 16); // π/4
    let neg_quarter = Coefficient::new(true, 1, 16); // −π/4
    let neg_root8 = Coefficient::new(true, 1, 8); // −π/√8
    let one = |m: Mat2| HermitianGenerator::from_hermitian_sum(Matrix::One(m));
    let two = |m: Mat4| HermitianGenerator::from_hermitian_sum(Matrix::Two(m));
    let term = |coefficient, generator| Term { coefficient, generator };
    let s2 = std::f64::consts::FRAC_1_SQRT_2;

    let pauli_gate = |p: Mat2| GateSpec {
        kind,
        ideal: Matrix::One(p),
        terms: vec![term(half, one(p)), term(half, one(-i))],
    };
    // −(π/4)·I⊗I + (π/4)·Z⊗I + (π/4)·I⊗P − (π/4)·Z⊗P
    let controlled = |p: Mat2| {
        let p1 = projector_one();
        GateSpec {
            kind,
            ideal: Matrix::Two(kron(&(i - p1), &i) + kron(&p1, &p)),
            terms: vec![
                term(neg_quarter, two(kron(&i, &i))),
                term(quarter, two(kron(&z, &i))),
                term(quarter, two(kron(&i, &p))),
                term(neg_quarter, two(kron(&z, &p))),
            ],
        }
    };

    match kind {
        GateKind::X => pauli_gate(x),
        GateKind::Y => pauli_gate(y),
        GateKind::Z => pauli_gate(z),
        GateKind::CX => controlled(x),
        GateKind::CY => controlled(y),
        GateKind::CZ => controlled(z),
        GateKind::H => {
            let h = (x + z) * c(s2, 0.0);
            GateSpec {
                kind,
                ideal: Matrix::One(h),
                terms: vec![term(half, one(h)), term(half, one(-i))],
            }
        }
        GateKind::Q => {
            // −(π/2)·I + (π/√8)·(Z + Y) = −(π/2)·I + (π/2)·Q, written with the
            // multiset {π/2, −π/√8, −π/√8} on generators −I, −Z, −Y.
            let q = (z + y) * c(s2, 0.0);
            GateSpec {
                kind,
                ideal: Matrix::One(q),
                terms: vec![term(half, one(-i)), term(neg_root8, one(-z)), term(neg_root8, one(-y))],
            }
        }
        GateKind::S => {
            let p1 = projector_one();
            let s = i + p1 * c(-1.0, 1.0);
            GateSpec {
                kind,
                ideal: Matrix::One(s),
                // (Z − I)/2 = −|1⟩⟨1|
                terms: vec![term(half, one(-p1))],
            }
        }
    }
}

/// Coefficient noise and channel bit-flip rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub epsilon: f64,
    pub p_x: f64,
}

impl NoiseModel {
    pub fn new(epsilon: f64, p_x: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&p_x) {
            return Err(Error::invalid(format!("p_x must lie in [0, 1], got {p_x}")));
        }
        Ok(NoiseModel { epsilon, p_x })
    }

    pub fn noiseless() -> Self {
        NoiseModel { epsilon: 0.0, p_x: 0.0 }
    }
}

/// Control energy in units of ħω₀.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyBudget(pub f64);

impl EnergyBudget {
    /// `coefficient · π²/ε²`.
    pub fn from_coefficient(coefficient: EnergyCoefficient, epsilon: f64) -> Result<Self> {
        if epsilon == 0.0 {
            return Err(Error::DivergentBound);
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(EnergyBudget(ratio_to_f64(coefficient) * PI * PI / (epsilon * epsilon)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for EnergyBudget {
    type Output = EnergyBudget;
    fn add(self, rhs: Self) -> Self {
        EnergyBudget(self.0 + rhs.0)
    }
}

impl AddAssign for EnergyBudget {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

pub fn ratio_to_f64(r: EnergyCoefficient) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Inverse of [`EnergyBudget::from_coefficient`]: the ε at which a circuit
/// with this coefficient costs `energy` ħω₀.
pub fn epsilon_for_energy(coefficient: EnergyCoefficient, energy: f64) -> Result<f64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::invalid(format!("energy must be > 0, got {energy}")));
    }
    let coef = ratio_to_f64(coefficient);
    if coef <= 0.0 {
        return Err(Error::invalid("circuit has no gates; energy grid is meaningless"));
    }
    Ok(PI * (coef / energy).sqrt())
}

pub fn gate_energy_bound(spec: &GateSpec, epsilon: f64) -> Result<EnergyBudget> {
    EnergyBudget::from_coefficient(spec.energy_coefficient(), epsilon)
}

pub fn sample_noisy_gate<R: Rng + ?Sized>(spec: &GateSpec, epsilon: f64, rng: &mut R) -> Matrix {
    spec.noisy_unitary(epsilon, || rng.sample(StandardNormal))
}

/// Mean gate error `1 − F_ave(ideal, noisy)` and its standard error.
pub fn estimate_gate_error<R: Rng + ?Sized>(
    spec: &GateSpec,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if samples < 100 {
        return Err(Error::invalid(format!("need at least 100 samples, got {samples}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::invalid(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u = sample_noisy_gate(spec, epsilon, rng);
        let err = 1.0 - average_gate_fidelity(&spec.ideal, &u)?;
        sum += err;
        sum_sq += err * err;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Entry `(row, col)` of a gate's ideal matrix, for display.
pub fn matrix_entry(spec: &GateSpec, row: usize, col: usize) -> Complex64 {
    spec.ideal.get(row, col)
}
