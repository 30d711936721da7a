//! Derivative engine for solutions of `u'' = (x² − 2ε) u` and Wronskians
//! `W(f_1, …, f_n)` with their derivatives.
//!
//! Derivatives of a Wronskian are exact: differentiating the determinant row
//! by row only ever shifts one derivative row up by one, so `W^{(m)}` is a sum
//! of determinants over row-index sets. For `m = 1, 2` this is the familiar
//! row-replacement identity.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{differentiate_all, Stencil};
use crate::jet::ComplexJet;

/// Equilibrated determinants below this size count as zero.
pub const SINGULAR_TOLERANCE: f64 = 1e-13;

/// Extends an order-1 jet of a solution of `u'' = (x² − 2ε)u` to
/// `target_order` with `d_{n+2} = (x² − 2ε)d_n + 2nx d_{n−1} + n(n−1) d_{n−2}`.
pub fn extend_jet(jet: &ComplexJet, eps: f64, target_order: usize) -> ComplexJet {
    let x = jet.x;
    let q = x * x - 2.0 * eps;
    let mut d: Vec<Complex64> = jet.values[..2.min(jet.values.len())].to_vec();
    if d.len() < 2 {
        d.push(Complex64::new(0.0, 0.0));
    }
    while d.len() <= target_order {
        let n = d.len() - 2;
        let nf = n as f64;
        let mut next = q * d[n];
        if n >= 1 {
            next += 2.0 * nf * x * d[n - 1];
        }
        if n >= 2 {
            next += nf * (nf - 1.0) * d[n - 2];
        }
        d.push(next);
    }
    d.truncate(target_order + 1);
    ComplexJet::new(x, d)
}

/// Seeds and their derivatives `d_0 … d_{k+1}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTable {
    pub x: f64,
    pub derivatives: Vec<ComplexJet>,
    pub energies: Vec<f64>,
}

impl DerivativeTable {
    pub fn new(x: f64, seeds: &[ComplexJet], energies: &[f64]) -> Self {
        assert_eq!(seeds.len(), energies.len(), "one energy per seed");
        let order = seeds.len() + 1;
        let derivatives = seeds
            .iter()
            .zip(energies)
            .map(|(s, &e)| extend_jet(s, e, order))
            .collect();
        Self { x, derivatives, energies: energies.to_vec() }
    }
}

/// Determinant of a row-major `n × n` matrix by partial-pivot elimination.
///
/// Rows and then columns are equilibrated first, so the second return value
/// (the determinant of the equilibrated matrix) measures singularity
/// independently of how differently rows and columns are scaled.
pub fn determinant(matrix: &[Complex64], n: usize) -> (Complex64, f64) {
    assert_eq!(matrix.len(), n * n);
    if n == 0 {
        return (Complex64::new(1.0, 0.0), 1.0);
    }
    let zero = (Complex64::new(0.0, 0.0), 0.0);
    let mut a = matrix.to_vec();
    let mut scale = 1.0;
    for r in 0..n {
        let row_max = a[r * n..(r + 1) * n].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if row_max == 0.0 || !row_max.is_finite() {
            return zero;
        }
        for v in &mut a[r * n..(r + 1) * n] {
            *v /= row_max;
        }
        scale *= row_max;
    }
    for c in 0..n {
        let col_max = (0..n).map(|r| a[r * n + c].norm()).fold(0.0, f64::max);
        if col_max == 0.0 {
            return zero;
        }
        for r in 0..n {
            a[r * n + c] /= col_max;
        }
        scale *= col_max;
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap_or(col);
        if a[pivot * n + col].norm() == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] -= factor * v;
            }
        }
    }
    (det * scale, det.norm())
}

/// Row-index sets whose determinants sum to the derivatives of an `n × n`
/// Wronskian: `W^{(m)} = Σ c_S det(rows S)`.
#[derive(Debug, Clone)]
pub struct RowSets {
    size: usize,
    by_order: Vec<Vec<(Vec<usize>, f64)>>,
}

impl RowSets {
    pub fn new(size: usize, max_order: usize) -> Self {
        let mut current: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        current.insert((0..size).collect(), 1.0);
        let mut by_order = vec![current.clone().into_iter().collect::<Vec<_>>()];
        for _ in 0..max_order {
            let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (rows, coeff) in &current {
                for p in 0..rows.len() {
                    let bumped = rows[p] + 1;
                    if p + 1 < rows.len() && rows[p + 1] == bumped {
                        continue;
                    }
                    let mut shifted = rows.clone();
                    shifted[p] = bumped;
                    *next.entry(shifted).or_insert(0.0) += coeff;
                }
            }
            by_order.push(next.clone().into_iter().collect());
            current = next;
        }
        Self { size, by_order }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn max_order(&self) -> usize {
        self.by_order.len() - 1
    }

    pub fn terms(&self, order: usize) -> &[(Vec<usize>, f64)] {
        &self.by_order[order]
    }

    /// Highest derivative row needed for `W^{(order)}`.
    pub fn max_row(&self, order: usize) -> usize {
        (self.size + order).saturating_sub(1)
    }
}

/// A Wronskian and its derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WronskianValue {
    pub jet: ComplexJet,
    /// Size of the row- and column-equilibrated determinant.
    pub relative: f64,
}

impl WronskianValue {
    pub fn is_singular(&self) -> bool {
        self.relative < SINGULAR_TOLERANCE
    }
}

/// `W(f_1, …, f_n)` and its derivatives up to the order of `sets`, from
/// derivative data of each column (each jet must reach order `n − 1 + m`).
pub fn wronskian_with(columns: &[ComplexJet], sets: &RowSets, x: f64) -> WronskianValue {
    let n = columns.len();
    assert_eq!(n, sets.size(), "row sets built for a different size");
    let order = sets.max_order();
    if n == 0 {
        return WronskianValue { jet: ComplexJet::constant(x, Complex64::new(1.0, 0.0), order), relative: 1.0 };
    }
    let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
    let mut values = Vec::with_capacity(order + 1);
    let mut relative = 0.0;
    for m in 0..=order {
        let mut total = Complex64::new(0.0, 0.0);
        for (rows, coeff) in sets.terms(m) {
            for (r, &row) in rows.iter().enumerate() {
                for (c, col) in columns.iter().enumerate() {
                    matrix[r * n + c] = col.values[row];
                }
            }
            let (det, rel) = determinant(&matrix, n);
            if m == 0 {
                relative = rel;
            }
            total += det * *coeff;
        }
        values.push(total);
    }
    WronskianValue { jet: ComplexJet::new(x, values), relative }
}

/// Convenience form of [`wronskian_with`] that builds its own row sets.
pub fn wronskian(columns: &[ComplexJet], order: usize, x: f64) -> WronskianValue {
    wronskian_with(columns, &RowSets::new(columns.len(), order), x)
}

/// `W`, `W'`, `W''` and the logarithmic derivatives of a seed Wronskian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianJet {
    pub w: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
    /// `(ln W)' = W'/W`
    pub logd1: Complex64,
    /// `(ln W)'' = W''/W − (W'/W)²`
    pub logd2: Complex64,
}

impl WronskianJet {
    fn from_derivatives(w: Complex64, w1: Complex64, w2: Complex64) -> Self {
        let logd1 = w1 / w;
        Self { w, w1, w2, logd1, logd2: w2 / w - logd1 * logd1 }
    }
}

/// `W(u_1, …, u_k)` with `W'` and `W''` at `x`.
///
/// Seeds of lower order are first extended with their energies. For `k = 0`
/// the Wronskian is identically one.
pub fn wronskian_jet(seeds: &[ComplexJet], energies: &[f64], x: f64) -> Result<WronskianJet> {
    assert_eq!(seeds.len(), energies.len(), "one energy per seed");
    let k = seeds.len();
    if k == 0 {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(WronskianJet::from_derivatives(Complex64::new(1.0, 0.0), zero, zero));
    }
    let columns: Vec<ComplexJet> = seeds
        .iter()
        .zip(energies)
        .map(|(s, &e)| if s.order() > k { s.clone() } else { extend_jet(s, e, k + 1) })
        .collect();
    let value = wronskian(&columns, 2, x);
    if value.is_singular() {
        return Err(Error::SingularWronskian { x });
    }
    let d = &value.jet.values;
    Ok(WronskianJet::from_derivatives(d[0], d[1], d[2]))
}

/// Largest mismatch between analytic first and second derivatives of sampled
/// jets and 7-point differences of their values, pointwise relative to
/// `max(|f|, |f'|, |f''|)`.
pub fn derivative_mismatch(jets: &[ComplexJet], h: f64) -> f64 {
    let values: Vec<Complex64> = jets.iter().map(ComplexJet::value).collect();
    let d1 = differentiate_all(&values, h, Stencil::First7);
    let d2 = differentiate_all(&values, h, Stencil::Second7);
    let mut worst: f64 = 0.0;
    for (i, jet) in jets.iter().enumerate() {
        let (Some(a), Some(b)) = (d1[i], d2[i]) else { continue };
        let scale = jet.values[..3].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            worst = worst.max((a - jet.values[1]).norm() / scale).max((b - jet.values[2]).norm() / scale);
        }
    }
    worst
}
