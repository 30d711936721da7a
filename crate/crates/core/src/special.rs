//! Kummer's confluent hypergeometric function and oscillator eigenstates.
//!
//! `M(a, b; z)` is summed from its Taylor series with Neumaier compensation.
//! The argument is always `z = x²` with `|x| <= 10`, so the series is the only
//! evaluation branch; larger arguments are rejected.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::ComplexJet;

/// Largest supported Kummer argument (`x² ≤ 100`).
pub const KUMMER_Z_MAX: f64 = 100.0;
/// Term cap of the Kummer series.
pub const KUMMER_MAX_TERMS: usize = 1000;
/// Highest oscillator level with a stable recurrence.
pub const OSCILLATOR_MAX_LEVEL: usize = 60;

const KUMMER_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerParams {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl KummerParams {
    pub fn new(a: f64, b: f64, z: f64) -> Self {
        Self { a, b, z }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) || (self.b <= 0.0 && self.b.fract() == 0.0)
        {
            return Err(Error::InvalidKummerParameter(self.b));
        }
        if !self.z.is_finite() || self.z < 0.0 || self.z > KUMMER_Z_MAX {
            return Err(Error::KummerOutOfRange(self.z));
        }
        Ok(())
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `M(a, b; z) = Σ (a)_n zⁿ / ((b)_n n!)`.
///
/// Summation stops once three consecutive terms fall below `1e-16` of the
/// running total; a terminating series (non-positive integer `a`) stops on its
/// trailing zeros.
pub fn kummer_m(p: KummerParams) -> Result<f64> {
    p.validate()?;
    let KummerParams { a, b, z } = p;
    let mut sum = CompensatedSum::default();
    let mut term = 1.0_f64;
    sum.add(term);
    let mut small_run = 0;
    for n in 0..KUMMER_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / ((b + nf) * (nf + 1.0)) * z;
        sum.add(term);
        if term.abs() <= KUMMER_TAIL * sum.total().abs() {
            small_run += 1;
            if small_run == 3 {
                return Ok(sum.total());
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::KummerNonConvergence { a, b, z, terms: KUMMER_MAX_TERMS })
}

/// `d/dz M(a, b; z) = (a / b) M(a + 1, b + 1; z)`.
pub fn kummer_m_dz(p: KummerParams) -> Result<f64> {
    if p.a == 0.0 {
        p.validate()?;
        return Ok(0.0);
    }
    Ok(p.a / p.b * kummer_m(KummerParams::new(p.a + 1.0, p.b + 1.0, p.z))?)
}

/// Normalized oscillator eigenstate `ψ_n(x)` and `ψ_n'(x)`, energy `n + 1/2`.
///
/// Uses the normalized three-term recurrence
/// `ψ_{m+1} = √(2/(m+1)) x ψ_m − √(m/(m+1)) ψ_{m−1}`, which keeps the
/// Hermite normalization folded into every step.
pub fn oscillator_state(n: usize, x: f64) -> Result<ComplexJet> {
    if n > OSCILLATOR_MAX_LEVEL {
        return Err(Error::OscillatorIndex(n));
    }
    let (psi, prev) = oscillator_pair(n, x);
    let derivative = (2.0 * n as f64).sqrt() * prev - x * psi;
    Ok(ComplexJet::new(
        x,
        vec![Complex64::new(psi, 0.0), Complex64::new(derivative, 0.0)],
    ))
}

/// `(ψ_n(x), ψ_{n−1}(x))`, with `ψ_{−1} = 0`.
fn oscillator_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for m in 0..n {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * x * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kummer_at_origin_is_one() {
        assert_eq!(kummer_m(KummerParams::new(-2.25, 0.5, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn kummer_exponential_identity() {
        let v = kummer_m(KummerParams::new(1.0, 1.0, 1.0)).unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-15);
        let v = kummer_m(KummerParams::new(0.5, 0.5, 100.0)).unwrap();
        assert!((v / 100f64.exp() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kummer_terminating_series_is_a_polynomial() {
        // M(-2, 1/2; z) = 1 - 4z + 4z²/3
        let z = 7.3;
        let v = kummer_m(KummerParams::new(-2.0, 0.5, z)).unwrap();
        let exact = 1.0 - 4.0 * z + 4.0 * z * z / 3.0;
        assert!((v - exact).abs() < 1e-13 * exact.abs());
    }

    #[test]
    fn kummer_rejects_bad_parameters() {
        assert_eq!(
            kummer_m(KummerParams::new(1.0, -2.0, 1.0)),
            Err(Error::InvalidKummerParameter(-2.0))
        );
        assert!(matches!(
            kummer_m(KummerParams::new(1.0, 0.0, 1.0)),
            Err(Error::InvalidKummerParameter(_))
        ));
        assert_eq!(
            kummer_m(KummerParams::new(1.0, 0.5, 100.5)),
            Err(Error::KummerOutOfRange(100.5))
        );
        assert!(kummer_m(KummerParams::new(1.0, 0.5, -1.0)).is_err());
    }

    #[test]
    fn oscillator_ground_state_and_parity() {
        let g = oscillator_state(0, 0.0).unwrap();
        assert!((g.value().re - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(g.derivative(1).re, 0.0);
        let e = oscillator_state(1, 0.0).unwrap();
        assert_eq!(e.value().re, 0.0);
        for n in 0..8 {
            let p = oscillator_state(n, 1.7).unwrap().value().re;
            let m = oscillator_state(n, -1.7).unwrap().value().re;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((p - sign * m).abs() < 1e-15);
        }
    }

    #[test]
    fn oscillator_level_bound() {
        assert!(oscillator_state(60, 3.0).is_ok());
        assert_eq!(oscillator_state(61, 3.0), Err(Error::OscillatorIndex(61)));
    }

    #[test]
    fn oscillator_matches_closed_form_hermite() {
        // H_3(x) = 8x³ − 12x, norm (2³ 3! √π)^{-1/2}
        let x: f64 = 0.83;
        let norm = (8.0 * 6.0 * std::f64::consts::PI.sqrt()).powf(-0.5);
        let exact = norm * (8.0 * x.powi(3) - 12.0 * x) * (-x * x / 2.0).exp();
        let v = oscillator_state(3, x).unwrap().value().re;
        assert!((v - exact).abs() < 1e-15);
    }
}
