use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::ComplexJet;

/// Uniform grid `x_i = xmin + i h`, `h = (xmax - xmin) / (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(xmin: f64, xmax: f64, n: usize) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if xmin >= xmax {
            return Err(Error::InvalidGrid(format!("xmin = {xmin} must be below xmax = {xmax}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        Ok(Self { xmin, xmax, n })
    }

    /// The default working grid of the SUSY constructions: [-10, 10], 4001 points.
    pub fn standard() -> Self {
        Self { xmin: -10.0, xmax: 10.0, n: 4001 }
    }

    pub fn step(&self) -> f64 {
        (self.xmax - self.xmin) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.xmax
        } else {
            self.xmin + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Complex samples of a function on a [`Grid`], optionally with derivative
/// data at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub samples: Vec<Complex64>,
    pub label: Option<String>,
    pub jets: Option<Vec<ComplexJet>>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Self {
        assert_eq!(grid.n, samples.len(), "sample count must match the grid");
        Self { grid, samples, label: None, jets: None }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn from_jets(grid: Grid, jets: Vec<ComplexJet>) -> Self {
        assert_eq!(grid.n, jets.len(), "jet count must match the grid");
        let samples = jets.iter().map(ComplexJet::value).collect();
        Self { grid, samples, label: None, jets: Some(jets) }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Order of the attached derivative data (0 when there is none).
    pub fn jet_order(&self) -> usize {
        self.jets
            .as_ref()
            .and_then(|j| j.iter().map(ComplexJet::order).min())
            .unwrap_or(0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.im).collect()
    }
}

/// Outcome of a complex least-squares fit `f ≈ c g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalityFit {
    pub constant: Complex64,
    /// `‖f − c g‖ / ‖f‖` over the common support.
    pub relative_residual: f64,
}

/// Least-squares proportionality of two sampled functions over the points where
/// both are defined (`None` marks trimmed stencil boundaries).
pub fn fit_proportional(f: &[Option<Complex64>], g: &[Option<Complex64>]) -> ProportionalityFit {
    let pairs: Vec<(Complex64, Complex64)> = f
        .iter()
        .zip(g)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .collect();
    let gg: f64 = pairs.iter().map(|(_, b)| b.norm_sqr()).sum();
    let gf: Complex64 = pairs.iter().map(|(a, b)| b.conj() * a).sum();
    let ff: f64 = pairs.iter().map(|(a, _)| a.norm_sqr()).sum();
    if gg == 0.0 || ff == 0.0 {
        return ProportionalityFit {
            constant: Complex64::new(0.0, 0.0),
            relative_residual: if ff == 0.0 { 0.0 } else { 1.0 },
        };
    }
    let constant = gf / gg;
    let rr: f64 = pairs.iter().map(|(a, b)| (a - constant * b).norm_sqr()).sum();
    ProportionalityFit { constant, relative_residual: (rr / ff).sqrt() }
}
