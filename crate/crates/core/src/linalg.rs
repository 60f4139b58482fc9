//! Small dense complex matrices (one and two qubits) and the Hermitian
//! exponential used to realise every gate.
//!
//! Two-qubit matrices index the basis as `2 * b_first + b_second`, where
//! `b_first` is the bit of the first target qubit. This matches the global
//! convention that qubit 0 is the most significant bit of a basis index.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;
pub type Mat4 = Matrix4<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A one- or two-qubit operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    One(Mat2),
    Two(Mat4),
}

impl Matrix {
    pub fn identity(arity: usize) -> Self {
        match arity {
            1 => Matrix::One(Mat2::identity()),
            _ => Matrix::Two(Mat4::identity()),
        }
    }

    /// Hilbert-space dimension, 2 or 4.
    pub fn dim(&self) -> usize {
        match self {
            Matrix::One(_) => 2,
            Matrix::Two(_) => 4,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Matrix::One(_) => 1,
            Matrix::Two(_) => 2,
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Matrix::One(m) => Matrix::One(m.adjoint()),
            Matrix::Two(m) => Matrix::Two(m.adjoint()),
        }
    }

    pub fn trace(&self) -> Complex64 {
        match self {
            Matrix::One(m) => m.trace(),
            Matrix::Two(m) => m.trace(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match self {
            Matrix::One(m) => m[(row, col)],
            Matrix::Two(m) => m[(row, col)],
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            Matrix::One(m) => Matrix::One(m * s),
            Matrix::Two(m) => Matrix::Two(m * s),
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        match (self, rhs) {
            (Matrix::One(a), Matrix::One(b)) => Ok(Matrix::One(a * b)),
            (Matrix::Two(a), Matrix::Two(b)) => Ok(Matrix::Two(a * b)),
            _ => Err(Error::invalid("matrix dimension mismatch")),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        match (self, rhs) {
            (Matrix::One(a), Matrix::One(b)) => Ok(Matrix::One(a + b)),
            (Matrix::Two(a), Matrix::Two(b)) => Ok(Matrix::Two(a + b)),
            _ => Err(Error::invalid("matrix dimension mismatch")),
        }
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        let n = self.dim();
        if n != rhs.dim() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..n {
            for col in 0..n {
                worst = worst.max((self.get(r, col) - rhs.get(r, col)).norm());
            }
        }
        worst
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().mul(self).expect("same dimension");
        prod.max_abs_diff(&Matrix::identity(self.arity()))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < UNITARY_TOL
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

/// Pauli operator on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Mat2 {
        let (o, z) = (c(1.0, 0.0), Complex64::zero());
        match self {
            Pauli::I => Mat2::new(o, z, z, o),
            Pauli::X => Mat2::new(z, o, o, z),
            Pauli::Y => Mat2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
            Pauli::Z => Mat2::new(o, z, z, -o),
        }
    }

    /// True when the two single-qubit Paulis anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `a ⊗ b`, with `a` acting on the first (more significant) qubit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// A Hermitian matrix `g` whose exponential `exp(−i g)` realises a gate.
/// Coefficients are in radians with the drive period absorbed.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianGenerator {
    matrix: Matrix,
}

impl HermitianGenerator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "generator is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(HermitianGenerator { matrix })
    }

    /// Skips the Hermiticity check; callers build the matrix as a real
    /// combination of Hermitian terms.
    pub(crate) fn from_hermitian_sum(matrix: Matrix) -> Self {
        HermitianGenerator { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `exp(−i g)` for a Hermitian generator, via diagonalisation.
///
/// 2×2 blocks use the closed form `e^{−i a₀}(cos r·I − i sin r·n̂·σ)`. A 4×4
/// generator that is block diagonal in the first qubit (every controlled
/// gate in the catalog) is split into two such blocks; anything else goes
/// through a full Hermitian eigendecomposition.
pub fn herm_expm(g: &HermitianGenerator) -> Matrix {
    match &g.matrix {
        Matrix::One(m) => Matrix::One(expm_2x2(m)),
        Matrix::Two(m) => Matrix::Two(expm_4x4(m)),
    }
}

fn expm_2x2(m: &Mat2) -> Mat2 {
    let a0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let z = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let x = 0.5 * (m[(0, 1)].re + m[(1, 0)].re);
    let y = 0.5 * (m[(1, 0)].im - m[(0, 1)].im);
    let r = (x * x + y * y + z * z).sqrt();
    let (cos_r, sinc) = if r < 1e-8 {
        (1.0 - r * r / 2.0, 1.0 - r * r / 6.0)
    } else {
        (r.cos(), r.sin() / r)
    };
    let phase = c(a0.cos(), -a0.sin());
    // cos r·I − i·sinc·(xX + yY + zZ)
    let s = c(0.0, -sinc);
    let u = Mat2::new(c(cos_r, 0.0) + s * z, s * c(x, -y), s * c(x, y), c(cos_r, 0.0) - s * z);
    u * phase
}

fn expm_4x4(m: &Mat4) -> Mat4 {
    let off_block_zero = (0..2).all(|r| (2..4).all(|col| m[(r, col)].is_zero() && m[(col, r)].is_zero()));
    if off_block_zero {
        let upper = m.fixed_view::<2, 2>(0, 0).into_owned();
        let lower = m.fixed_view::<2, 2>(2, 2).into_owned();
        let (eu, el) = (expm_2x2(&upper), expm_2x2(&lower));
        let mut out = Mat4::zeros();
        out.fixed_view_mut::<2, 2>(0, 0).copy_from(&eu);
        out.fixed_view_mut::<2, 2>(2, 2).copy_from(&el);
        return out;
    }
    let eig = SymmetricEigen::new(*m);
    let phases = eig.eigenvalues.map(|l| c(l.cos(), -l.sin()));
    let v = &eig.eigenvectors;
    let mut scaled = *v;
    for col in 0..4 {
        for r in 0..4 {
            scaled[(r, col)] *= phases[col];
        }
    }
    scaled * v.adjoint()
}

/// Average gate fidelity `(n + |Tr(U†U′)|²) / (n(n+1))`.
pub fn average_gate_fidelity(u: &Matrix, u_prime: &Matrix) -> Result<f64> {
    if u.dim() != u_prime.dim() {
        return Err(Error::invalid(format!(
            "fidelity between operators of dimension {} and {}",
            u.dim(),
            u_prime.dim()
        )));
    }
    let n = u.dim() as f64;
    let tr = u.adjoint().mul(u_prime)?.trace();
    Ok((n + tr.norm_sqr()) / (n * (n + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cnot() -> Mat4 {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        Mat4::new(o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z)
    }

    /// Truncated Taylor series of exp(−i g); test-only oracle.
    fn expm_series(g: &Mat4, terms: usize) -> Mat4 {
        let mi = c(0.0, -1.0);
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for k in 1..terms {
            term = term * g * (mi / k as f64);
            sum += term;
        }
        sum
    }

    fn expm_series_2(g: &Mat2, terms: usize) -> Mat2 {
        let mi = c(0.0, -1.0);
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..terms {
            term = term * g * (mi / k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn zero_generator_gives_identity() {
        let g = HermitianGenerator::new(Matrix::Two(Mat4::zeros())).unwrap();
        assert!(herm_expm(&g).max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let g = HermitianGenerator::new(Matrix::One(Mat2::zeros())).unwrap();
        assert!(herm_expm(&g).max_abs_diff(&Matrix::identity(1)) < 1e-15);
    }

    #[test]
    fn pauli_x_from_generator_including_phase() {
        let x = Pauli::X.matrix();
        let g = x * c(PI / 2.0, 0.0) - Mat2::identity() * c(PI / 2.0, 0.0);
        let u = herm_expm(&HermitianGenerator::new(Matrix::One(g)).unwrap());
        assert!(u.max_abs_diff(&Matrix::One(x)) < 1e-12);
        let series = expm_series_2(&g, 60);
        assert!(u.max_abs_diff(&Matrix::One(series)) < 1e-12);
    }

    #[test]
    fn cnot_from_generator_including_phase() {
        let (i, x, z) = (Pauli::I.matrix(), Pauli::X.matrix(), Pauli::Z.matrix());
        let sum = kron(&i, &i) - kron(&z, &i) - kron(&i, &x) + kron(&z, &x);
        let g = sum * c(-PI / 4.0, 0.0);
        let u = herm_expm(&HermitianGenerator::new(Matrix::Two(g)).unwrap());
        assert!(u.max_abs_diff(&Matrix::Two(cnot())) < 1e-12);
        assert!(u.max_abs_diff(&Matrix::Two(expm_series(&g, 60))) < 1e-12);
    }

    #[test]
    fn general_4x4_path_matches_series() {
        // X⊗X couples the two control blocks, forcing the eigensolver path.
        let (x, y, z) = (Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix());
        let g = kron(&x, &x) * c(0.7, 0.0) + kron(&z, &y) * c(-0.3, 0.0) + kron(&y, &z) * c(0.2, 0.0);
        let u = herm_expm(&HermitianGenerator::new(Matrix::Two(g)).unwrap());
        assert!(u.max_abs_diff(&Matrix::Two(expm_series(&g, 80))) < 1e-12);
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            HermitianGenerator::new(Matrix::One(m)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn fidelity_examples() {
        let id = Matrix::identity(1);
        let x = Matrix::One(Pauli::X.matrix());
        assert!((average_gate_fidelity(&id, &x).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((average_gate_fidelity(&x, &x).unwrap() - 1.0).abs() < 1e-15);

        let (i, zz) = (Pauli::I.matrix(), Pauli::Z.matrix());
        let p1 = Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let p0 = i - p1;
        let cz = kron(&p0, &i) + kron(&p1, &zz);
        let f = average_gate_fidelity(&Matrix::Two(cnot()), &Matrix::Two(cz)).unwrap();
        assert!((f - 0.4).abs() < 1e-15);

        assert!(average_gate_fidelity(&id, &Matrix::Two(cnot())).is_err());
    }
}
