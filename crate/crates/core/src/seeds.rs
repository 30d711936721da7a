//! Complex Schrödinger seeds `u(x; ε)` for `H₀ = −½ d²/dx² + x²/2` and the
//! chain `u_{j+1} = a⁻ u_j` driving the k-th order transformation.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{differentiate_all, Stencil};
use crate::grid::Grid;
use crate::jet::ComplexJet;
use crate::special::{kummer_m, kummer_m_dz, KummerParams};

/// Largest `|x|` at which seeds are evaluated.
pub const X_MAX: f64 = 10.0;
/// Tolerance for recognizing `ε₁ = j + 1/2`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;
/// Relative size below which a chain element counts as identically zero.
pub const CHAIN_ZERO_TOLERANCE: f64 = 1e-12;

/// Factorization energy, seed mixing coefficients and transformation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub eps1: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub k: usize,
}

impl SeedSpec {
    pub fn new(eps1: f64, lambda: f64, kappa: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSeed("order k must be at least 1".into()));
        }
        if !(eps1.is_finite() && lambda.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidSeed("eps1, lambda and kappa must be finite".into()));
        }
        Ok(Self { eps1, lambda, kappa, k })
    }

    /// `ε_j = ε₁ − (j − 1)`, 1-based.
    pub fn eps(&self, j: usize) -> f64 {
        self.eps1 - (j as f64 - 1.0)
    }

    /// `λ + iκ`.
    pub fn mixing(&self) -> Complex64 {
        Complex64::new(self.lambda, self.kappa)
    }

    pub fn is_real(&self) -> bool {
        self.kappa == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedKind {
    /// `κ = 0`, `ε₁ < 1/2`: hermitian, non-singular.
    RealNodeless,
    /// `κ = 0`, `ε₁ ≥ 1/2`: the real seed has nodes in general.
    RealRisky,
    Complex,
    /// `ε₁ = E_j` for some oscillator level `j`.
    EigenvalueDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedClassification {
    pub kind: SeedKind,
    /// The level `j` with `ε₁ = j + 1/2`, for degenerate seeds.
    pub j_index: Option<usize>,
    /// Whether `j > k`, the only degenerate configuration with the one-way
    /// ladder structure.
    pub j_exceeds_order: Option<bool>,
}

impl SeedClassification {
    pub fn is_degenerate_above_order(&self) -> bool {
        self.kind == SeedKind::EigenvalueDegenerate && self.j_exceeds_order == Some(true)
    }
}

/// Oscillator level `j` with `|ε − (j + 1/2)| ≤ 1e-12`, if any.
pub fn oscillator_level(eps: f64) -> Option<usize> {
    let shifted = eps - 0.5;
    let j = shifted.round();
    (j >= 0.0 && (shifted - j).abs() <= DEGENERACY_TOLERANCE).then_some(j as usize)
}

/// Degeneracy with an oscillator level takes precedence over the real/complex
/// split: a real seed at `ε₁ = E_j` is reported as degenerate.
pub fn classify_seed(spec: &SeedSpec) -> SeedClassification {
    if let Some(j) = oscillator_level(spec.eps1) {
        return SeedClassification {
            kind: SeedKind::EigenvalueDegenerate,
            j_index: Some(j),
            j_exceeds_order: Some(j > spec.k),
        };
    }
    let kind = match (spec.is_real(), spec.eps1 < 0.5) {
        (true, true) => SeedKind::RealNodeless,
        (true, false) => SeedKind::RealRisky,
        (false, _) => SeedKind::Complex,
    };
    SeedClassification { kind, j_index: None, j_exceeds_order: None }
}

/// `u(x; ε) = e^{−x²/2}[M((1−2ε)/4, 1/2; x²) + x(λ+iκ) M((3−2ε)/4, 3/2; x²)]`
/// and its first derivative. `u(0) = 1`, `u'(0) = λ + iκ`.
pub fn seed_value(x: f64, eps: f64, lambda: f64, kappa: f64) -> Result<ComplexJet> {
    if !x.is_finite() || x.abs() > X_MAX {
        return Err(Error::OutOfRange(x));
    }
    let z = x * x;
    let even = KummerParams::new((1.0 - 2.0 * eps) / 4.0, 0.5, z);
    let odd = KummerParams::new((3.0 - 2.0 * eps) / 4.0, 1.5, z);
    let m1 = kummer_m(even)?;
    let m2 = kummer_m(odd)?;
    // chain rule: d/dx M(x²) = 2x M'(x²)
    let dm1 = 2.0 * x * kummer_m_dz(even)?;
    let dm2 = 2.0 * x * kummer_m_dz(odd)?;

    let c = Complex64::new(lambda, kappa);
    let gauss = (-0.5 * z).exp();
    let bracket = m1 + c * (x * m2);
    let dbracket = dm1 + c * (m2 + x * dm2);
    let u = gauss * bracket;
    let du = gauss * (dbracket - x * bracket);
    Ok(ComplexJet::new(x, vec![u, du]))
}

/// Applies `a⁻ = (d/dx + x)/√2` to an order-1 jet of an `H₀` solution at
/// energy `eps`, closing the second derivative with `u'' = (x² − 2ε)u`.
pub fn lower(jet: &ComplexJet, eps: f64) -> ComplexJet {
    let x = jet.x;
    let (u, du) = (jet.values[0], jet.values[1]);
    let d2u = (x * x - 2.0 * eps) * u;
    ComplexJet::new(
        x,
        vec![(du + x * u) * FRAC_1_SQRT_2, (d2u + u + x * du) * FRAC_1_SQRT_2],
    )
}

/// Applies `a⁺ = (−d/dx + x)/√2`; the image solves `H₀` at `eps + 1`.
pub fn raise(jet: &ComplexJet, eps: f64) -> ComplexJet {
    let x = jet.x;
    let (u, du) = (jet.values[0], jet.values[1]);
    let d2u = (x * x - 2.0 * eps) * u;
    ComplexJet::new(
        x,
        vec![(x * u - du) * FRAC_1_SQRT_2, (u + x * du - d2u) * FRAC_1_SQRT_2],
    )
}

/// `u_1, …, u_len` at `x` without any degeneracy check.
pub(crate) fn chain_jets(spec: &SeedSpec, x: f64, len: usize) -> Result<Vec<ComplexJet>> {
    let mut chain = Vec::with_capacity(len);
    let mut current = seed_value(x, spec.eps1, spec.lambda, spec.kappa)?;
    for j in 1..=len {
        let next = if j < len { Some(lower(&current, spec.eps(j))) } else { None };
        chain.push(current);
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    Ok(chain)
}

fn jet_size(jet: &ComplexJet) -> f64 {
    jet.values[0].norm() + jet.values[1].norm()
}

/// The seeds `(u_j, u_j')`, `j = 1..=k`, at `x`.
///
/// A chain element that vanishes relative to `u₁` (the seed is proportional
/// to a ladder-annihilated state) is an error: the chain cannot carry a
/// k-th order transformation.
pub fn seed_chain(spec: &SeedSpec, x: f64) -> Result<Vec<ComplexJet>> {
    let chain = chain_jets(spec, x, spec.k)?;
    let reference = jet_size(&chain[0]);
    for (j, jet) in chain.iter().enumerate().skip(1) {
        if jet_size(jet) <= CHAIN_ZERO_TOLERANCE * reference {
            return Err(Error::DegenerateChain { index: j + 1 });
        }
    }
    Ok(chain)
}

/// Sup over `j ≤ k` and the grid of the Schrödinger residual
/// `|u_j'' − (x² − 2ε_j) u_j|`, pointwise relative to `|u_j| (1 + |x² − 2ε_j|)`,
/// with `u_j''` from 7-point differences of the sampled chain.
pub fn seed_residual(spec: &SeedSpec, grid: Grid) -> Result<f64> {
    let mut samples = vec![Vec::with_capacity(grid.n); spec.k];
    for x in grid.points() {
        for (j, jet) in chain_jets(spec, x, spec.k)?.into_iter().enumerate() {
            samples[j].push(jet.values[0]);
        }
    }
    let mut worst: f64 = 0.0;
    for (j0, u) in samples.iter().enumerate() {
        let eps = spec.eps(j0 + 1);
        let d2 = differentiate_all(u, grid.step(), Stencil::Second7);
        for (i, d) in d2.iter().enumerate() {
            let Some(d) = d else { continue };
            let x = grid.x(i);
            let q = x * x - 2.0 * eps;
            let scale = u[i].norm() * (1.0 + q.abs());
            if scale > 0.0 {
                worst = worst.max((d - q * u[i]).norm() / scale);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_seed() {
        for x in [-3.0, -0.4, 0.0, 1.1, 6.0] {
            let u = seed_value(x, 0.5, 0.0, 0.0).unwrap();
            let g = (-x * x / 2.0_f64).exp();
            assert!((u.values[0].re - g).abs() <= 1e-15 * g);
            assert!((u.values[1].re + x * g).abs() <= 1e-15 * g.max(1e-300) * (1.0 + x.abs()));
            assert_eq!(u.values[0].im, 0.0);
        }
    }

    #[test]
    fn growing_seed() {
        for x in [-2.0, 0.3, 4.5] {
            let u = seed_value(x, -0.5, 0.0, 0.0).unwrap();
            let g = (x * x / 2.0_f64).exp();
            assert!((u.values[0].re - g).abs() <= 1e-13 * g);
            assert!((u.values[1].re - x * g).abs() <= 1e-13 * g * (1.0 + x.abs()));
        }
    }

    #[test]
    fn seed_initial_data() {
        let u = seed_value(0.0, 5.0, 1.0, 5.0).unwrap();
        assert_eq!(u.values[0], Complex64::new(1.0, 0.0));
        assert_eq!(u.values[1], Complex64::new(1.0, 5.0));
    }

    #[test]
    fn seed_range_is_enforced() {
        assert_eq!(seed_value(10.5, 1.0, 0.0, 1.0), Err(Error::OutOfRange(10.5)));
        assert!(seed_value(10.0, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn single_element_chain_is_the_seed() {
        let spec = SeedSpec::new(5.0, 1.0, 5.0, 1).unwrap();
        let chain = seed_chain(&spec, 0.7).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0], seed_value(0.7, 5.0, 1.0, 5.0).unwrap());
    }

    #[test]
    fn ground_state_chain_degenerates() {
        let spec = SeedSpec::new(0.5, 0.0, 0.0, 2).unwrap();
        assert_eq!(seed_chain(&spec, 0.3), Err(Error::DegenerateChain { index: 2 }));
    }

    #[test]
    fn classification_examples() {
        let c = classify_seed(&SeedSpec::new(0.25, 0.0, 0.0, 1).unwrap());
        assert_eq!(c.kind, SeedKind::RealNodeless);
        let c = classify_seed(&SeedSpec::new(2.5, 1.0, 1.0, 1).unwrap());
        assert_eq!(c.kind, SeedKind::EigenvalueDegenerate);
        assert_eq!(c.j_index, Some(2));
        assert_eq!(c.j_exceeds_order, Some(true));
        let c = classify_seed(&SeedSpec::new(5.0, 1.0, 5.0, 2).unwrap());
        assert_eq!(c.kind, SeedKind::Complex);
        let c = classify_seed(&SeedSpec::new(3.0, 1.0, 0.0, 1).unwrap());
        assert_eq!(c.kind, SeedKind::RealRisky);
        let c = classify_seed(&SeedSpec::new(1.5, 0.0, 1.0, 3).unwrap());
        assert_eq!(c.j_index, Some(1));
        assert_eq!(c.j_exceeds_order, Some(false));
        assert!(oscillator_level(-0.5).is_none());
        assert_eq!(oscillator_level(2.5 + 5e-13), Some(2));
        assert!(oscillator_level(2.5 + 1e-9).is_none());
    }

    #[test]
    fn spec_validation() {
        assert!(SeedSpec::new(1.0, 0.0, 0.0, 0).is_err());
        assert!(SeedSpec::new(f64::INFINITY, 0.0, 0.0, 1).is_err());
        let s = SeedSpec::new(5.0, 1.0, 5.0, 3).unwrap();
        assert_eq!(s.eps(1), 5.0);
        assert_eq!(s.eps(3), 3.0);
    }

    #[test]
    fn raising_then_lowering_scales_by_energy() {
        // a⁻a⁺ = H₀ + 1/2
        let eps = 1.3;
        let u = seed_value(0.9, eps, 0.4, 1.2).unwrap();
        let back = lower(&raise(&u, eps), eps + 1.0);
        for i in 0..2 {
            assert!((back.values[i] - u.values[i] * (eps + 0.5)).norm() < 1e-13);
        }
    }
}
