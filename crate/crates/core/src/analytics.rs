//! Closed-form repetition-code rates, energy totals, crossover detection
//! and exponential fits.

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::codes::resolve_code;
use crate::error::{Error, Result};
use crate::gates::EnergyCoefficient;

fn check_args(p: f64, n: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
    }
    if n % 2 == 0 {
        return Err(Error::invalid(format!("N must be odd, got {n}")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn to_rational(p: f64) -> Result<BigRational> {
    BigRational::from_float(p).ok_or_else(|| Error::invalid(format!("{p} is not finite")))
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `C(N,k) p^k (1−p)^{N−k}` summed over `k ≤ (N−1)/2` with weight `w(k)`.
fn binomial_sum(p: &BigRational, n: usize, w: impl Fn(usize) -> BigInt) -> BigRational {
    let q = BigRational::one() - p;
    (0..=(n - 1) / 2)
        .map(|k| BigRational::from_integer(w(k) * binomial(n, k)) * num::pow(p.clone(), k) * num::pow(q.clone(), n - k))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Exact majority-vote failure probability of an `N`-qubit repetition code
/// under independent flips with rational probability `p`.
pub fn repetition_failure_rate_exact(p: &BigRational, n: usize) -> Result<BigRational> {
    if p < &BigRational::zero() || p > &BigRational::one() || n % 2 == 0 {
        return Err(Error::invalid(format!("need 0 <= p <= 1 and odd N, got p={p}, N={n}")));
    }
    Ok(BigRational::one() - binomial_sum(p, n, |_| BigInt::one()))
}

pub fn repetition_failure_rate(p: f64, n: usize) -> Result<f64> {
    check_args(p, n)?;
    Ok(rational_to_f64(&repetition_failure_rate_exact(&to_rational(p)?, n)?))
}

/// Leading term `C(N, (N+1)/2) p^{(N+1)/2}`.
pub fn repetition_failure_rate_leading(p: f64, n: usize) -> Result<f64> {
    check_args(p, n)?;
    let k = (n + 1) / 2;
    Ok(binomial(n, k).to_f64().unwrap_or(f64::INFINITY) * p.powi(k as i32))
}

pub fn expected_corrections_exact(p: &BigRational, n: usize) -> Result<BigRational> {
    if p < &BigRational::zero() || p > &BigRational::one() || n % 2 == 0 {
        return Err(Error::invalid(format!("need 0 <= p <= 1 and odd N, got p={p}, N={n}")));
    }
    Ok(binomial_sum(p, n, BigInt::from))
}

/// Mean number of correction gates fired per shot.
pub fn expected_corrections(p: f64, n: usize) -> Result<f64> {
    check_args(p, n)?;
    Ok(rational_to_f64(&expected_corrections_exact(&to_rational(p)?, n)?))
}

/// Worst-case correction energy relative to the repetition budget:
/// `((N−1)/2 · 1/8) / ((5N−3)/16) = (N−1)/(5N−3)`.
pub fn correction_energy_fraction(n: usize) -> Result<EnergyCoefficient> {
    if n % 2 == 0 || n == 0 {
        return Err(Error::invalid(format!("N must be odd, got {n}")));
    }
    Ok(Ratio::new(n as i64 - 1, 5 * n as i64 - 3))
}

/// Total energy coefficient of a code's pipeline, in units of `π²ħω₀/ε²`.
pub fn code_energy_total(code_id: &str) -> Result<EnergyCoefficient> {
    resolve_code(code_id)?.energy_coefficient()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub energy: f64,
    pub error: f64,
    pub std_error: f64,
}

/// Error rate against energy, energies strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    points: Vec<CurvePoint>,
}

impl ErrorCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("error curve needs at least one point"));
        }
        for w in points.windows(2) {
            if !(w[1].energy > w[0].energy) {
                return Err(Error::invalid(format!(
                    "energies must increase strictly: {} then {}",
                    w[0].energy, w[1].energy
                )));
            }
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.error)) {
            return Err(Error::invalid(format!("error {} outside [0, 1]", p.error)));
        }
        Ok(ErrorCurve { points })
    }

    /// Points given as `(energy, error)` with zero standard error.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(energy, error)| CurvePoint {
                    energy,
                    error,
                    std_error: 0.0,
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    fn range(&self) -> (f64, f64) {
        (self.points[0].energy, self.points[self.points.len() - 1].energy)
    }

    /// Linear interpolation inside the curve's energy range.
    pub fn interpolate(&self, energy: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if energy < lo || energy > hi {
            return None;
        }
        let i = self.points.partition_point(|p| p.energy < energy);
        if self.points[i].energy == energy {
            return Some(self.points[i].error);
        }
        let (a, b) = (self.points[i - 1], self.points[i]);
        let t = (energy - a.energy) / (b.energy - a.energy);
        Some(a.error + t * (b.error - a.error))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverRule {
    /// `a` must stay strictly better than `b` at every later grid point.
    #[default]
    Persistent,
    /// First sign change from positive to negative.
    FirstCrossing,
}

/// Energy at which `a` overtakes `b`: where the interpolated difference
/// `a − b` goes from positive to negative. Exchanging the curves finds
/// where `b` overtakes `a` instead.
pub fn find_crossover(a: &ErrorCurve, b: &ErrorCurve, rule: CrossoverRule) -> Result<Option<f64>> {
    let (alo, ahi) = a.range();
    let (blo, bhi) = b.range();
    let (lo, hi) = (alo.max(blo), ahi.min(bhi));
    if lo > hi {
        return Err(Error::invalid(format!(
            "curves do not overlap: [{alo}, {ahi}] and [{blo}, {bhi}]"
        )));
    }
    let mut grid: Vec<f64> = a
        .points
        .iter()
        .chain(&b.points)
        .map(|p| p.energy)
        .filter(|&e| e >= lo && e <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let diff: Vec<f64> = grid
        .iter()
        .map(|&e| a.interpolate(e).expect("in range") - b.interpolate(e).expect("in range"))
        .collect();
    let crossing = |i: usize| {
        let (d0, d1) = (diff[i], diff[i + 1]);
        grid[i] + (grid[i + 1] - grid[i]) * d0 / (d0 - d1)
    };
    match rule {
        CrossoverRule::Persistent => {
            let Some(last) = diff.iter().rposition(|&d| d >= 0.0) else {
                return Ok(None);
            };
            if last + 1 == diff.len() || !diff[..=last].iter().any(|&d| d > 0.0) {
                return Ok(None);
            }
            Ok(Some(crossing(last)))
        }
        CrossoverRule::FirstCrossing => {
            let mut seen_positive = false;
            for i in 0..diff.len().saturating_sub(1) {
                seen_positive |= diff[i] > 0.0;
                if seen_positive && diff[i] >= 0.0 && diff[i + 1] < 0.0 {
                    return Ok(Some(crossing(i)));
                }
            }
            Ok(None)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Root-mean-square residual of `ln E`.
    pub residual: f64,
}

/// Least-squares fit of `ln E = ln a + b N`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    if points.len() < 2 {
        return Err(Error::invalid("exponential fit needs at least 2 points"));
    }
    if let Some(&(_, e)) = points.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::invalid(format!("energies must be positive, got {e}")));
    }
    let m = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, e)| (sx + x, sy + e.ln()));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("exponential fit needs at least two distinct N"));
    }
    let sxy: f64 = points.iter().map(|&(x, e)| (x - mx) * (e.ln() - my)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let residual = (points
        .iter()
        .map(|&(x, e)| (e.ln() - intercept - rate * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(ExponentialFit {
        amplitude: intercept.exp(),
        rate,
        residual,
    })
}
