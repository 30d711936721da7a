//! The k-th order supersymmetric partner `H_k = −½ d²/dx² + V_k` of the
//! oscillator, its eigenfunctions through the Crum map, and residual checks.
//!
//! Eigenfunctions of `H_k` are always Wronskian ratios evaluated with exact
//! derivative data, never compositions of first-order operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{differentiate_all, Stencil};
use crate::grid::{Grid, GridFunction};
use crate::jet::ComplexJet;
use crate::seeds::{self, classify_seed, SeedClassification, SeedKind, SeedSpec};
use crate::special::oscillator_state;
use crate::wronskian::{extend_jet, wronskian_jet, wronskian_with, RowSets, WronskianJet, SINGULAR_TOLERANCE};

/// Residual stencils need at least this many grid points.
pub const MIN_RESIDUAL_POINTS: usize = 15;
/// Points dropped at each boundary by residual checks.
pub const RESIDUAL_TRIM: usize = 3;
/// Slope of `ln|ψ|` against `x²` below which a tail counts as decaying.
pub const DECAY_SLOPE: f64 = -0.1;

/// Energies `(𝓔₁, 𝓔₂, 𝓔₃)` of the extremal states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalEnergies {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl ExtremalEnergies {
    pub fn as_array(&self) -> [f64; 3] {
        [self.e1, self.e2, self.e3]
    }

    pub fn get(&self, family: u8) -> Result<f64> {
        match family {
            1 => Ok(self.e1),
            2 => Ok(self.e2),
            3 => Ok(self.e3),
            other => Err(Error::InvalidFamily(other)),
        }
    }
}

/// `(ε₁ − (k − 1), 1/2, ε₁ + 1)`.
pub fn energies(spec: &SeedSpec) -> ExtremalEnergies {
    ExtremalEnergies { e1: spec.eps1 - (spec.k as f64 - 1.0), e2: 0.5, e3: spec.eps1 + 1.0 }
}

/// Solutions of `H₀ f = E f` that the Crum map can carry to `H_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum H0Solution {
    /// Normalized `ψ_n`, `E = n + 1/2`.
    Eigenstate(usize),
    /// `e^{−x²/2}`, `E = 1/2`.
    Gaussian,
    /// `e^{x²/2}`, `E = −1/2`.
    AntiGaussian,
    /// Chain element `u_j`, `1 ≤ j ≤ k + 1`, `E = ε_j`.
    Seed(usize),
    /// `a⁺u₁`, `E = ε₁ + 1`.
    RaisedSeed,
}

impl H0Solution {
    pub fn energy(&self, spec: &SeedSpec) -> f64 {
        match *self {
            H0Solution::Eigenstate(n) => n as f64 + 0.5,
            H0Solution::Gaussian => 0.5,
            H0Solution::AntiGaussian => -0.5,
            H0Solution::Seed(j) => spec.eps(j),
            H0Solution::RaisedSeed => spec.eps1 + 1.0,
        }
    }

    fn jet(&self, spec: &SeedSpec, chain: &[ComplexJet], x: f64) -> Result<ComplexJet> {
        match *self {
            H0Solution::Eigenstate(n) => oscillator_state(n, x),
            H0Solution::Gaussian => {
                let g = (-0.5 * x * x).exp();
                Ok(ComplexJet::real(x, &[g, -x * g]))
            }
            H0Solution::AntiGaussian => {
                let g = (0.5 * x * x).exp();
                Ok(ComplexJet::real(x, &[g, x * g]))
            }
            H0Solution::Seed(j) => chain
                .get(j.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| Error::InvalidSeed(format!("no chain element u_{j}"))),
            H0Solution::RaisedSeed => chain
                .first()
                .map(|u| seeds::raise(u, spec.eps1))
                .ok_or_else(|| Error::InvalidSeed("no seed to raise".into())),
        }
    }
}

/// Where an eigenfunction of `H_k` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateSource {
    /// Crum image `W(u₁,…,u_k,f)/W(u₁,…,u_k)` of an `H₀` solution.
    Mapped(H0Solution),
    /// `W(u₁,…,û_j,…,u_k)/W(u₁,…,u_k)`, energy `ε_j`.
    Missing(usize),
}

/// A k-th order partner Hamiltonian sampled on a grid.
#[derive(Debug, Clone)]
pub struct PartnerModel {
    pub spec: SeedSpec,
    pub classification: SeedClassification,
    pub energies: ExtremalEnergies,
    pub grid: Grid,
    /// `V_k` at every grid point.
    pub potential: GridFunction,
    /// `u_1, …, u_{k+1}` at every grid point, order-1 jets.
    chains: Vec<Vec<ComplexJet>>,
}

impl PartnerModel {
    /// The oscillator itself, `k = 0`.
    pub fn oscillator(grid: Grid) -> Self {
        let spec = SeedSpec { eps1: -0.5, lambda: 0.0, kappa: 0.0, k: 0 };
        let potential = GridFunction::from_fn(grid, |x| Complex64::new(0.5 * x * x, 0.0)).with_label("V_0");
        Self {
            classification: classify_seed(&spec),
            energies: energies(&spec),
            spec,
            grid,
            potential,
            chains: vec![Vec::new(); grid.n],
        }
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    /// Chain `u_1, …, u_{k+1}` at grid point `i`.
    pub fn chain(&self, i: usize) -> &[ComplexJet] {
        &self.chains[i]
    }

    pub fn source_energy(&self, source: StateSource) -> f64 {
        match source {
            StateSource::Mapped(f) => f.energy(&self.spec),
            StateSource::Missing(j) => self.spec.eps(j),
        }
    }

    fn seed_columns(&self, i: usize, order: usize, skip: Option<usize>) -> Vec<ComplexJet> {
        let k = self.k();
        self.chains[i][..k]
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(j + 1) != skip)
            .map(|(j, u)| extend_jet(u, self.spec.eps(j + 1), order))
            .collect()
    }

    /// Jets of `W(u₁,…,u_k)` up to `order` at every grid point.
    pub fn seed_wronskian(&self, order: usize) -> Vec<ComplexJet> {
        let k = self.k();
        let sets = RowSets::new(k, order);
        (0..self.grid.n)
            .map(|i| wronskian_with(&self.seed_columns(i, k + order, None), &sets, self.grid.x(i)).jet)
            .collect()
    }

    /// An eigenfunction of `H_k` with derivative data up to `order`.
    pub fn state(&self, source: StateSource, order: usize) -> Result<GridFunction> {
        let k = self.k();
        let denominators = self.seed_wronskian(order);
        let jets = match source {
            StateSource::Mapped(f) => {
                let energy = f.energy(&self.spec);
                let mut inputs = Vec::with_capacity(self.grid.n);
                for i in 0..self.grid.n {
                    inputs.push(f.jet(&self.spec, &self.chains[i], self.grid.x(i))?);
                }
                self.crum_jets(&inputs, energy, order, &denominators)?
            }
            StateSource::Missing(j) => {
                if j == 0 || j > k {
                    return Err(Error::InvalidSeed(format!("no missing state for j = {j} with k = {k}")));
                }
                let sets = RowSets::new(k - 1, order);
                (0..self.grid.n)
                    .map(|i| {
                        let cols = self.seed_columns(i, k - 1 + order, Some(j));
                        wronskian_with(&cols, &sets, self.grid.x(i)).jet.div(&denominators[i])
                    })
                    .collect()
            }
        };
        let label = match source {
            StateSource::Mapped(f) => format!("B+{f:?}"),
            StateSource::Missing(j) => format!("missing_{j}"),
        };
        Ok(GridFunction::from_jets(self.grid, jets).with_label(label))
    }

    fn crum_jets(
        &self,
        inputs: &[ComplexJet],
        energy: f64,
        order: usize,
        denominators: &[ComplexJet],
    ) -> Result<Vec<ComplexJet>> {
        let k = self.k();
        let sets = RowSets::new(k + 1, order);
        let mut annihilated = true;
        let mut out = Vec::with_capacity(inputs.len());
        for (i, f) in inputs.iter().enumerate() {
            let x = self.grid.x(i);
            let mut cols = self.seed_columns(i, k + order, None);
            cols.push(extend_jet(f, energy, k + order));
            let w = wronskian_with(&cols, &sets, x);
            if w.relative >= SINGULAR_TOLERANCE {
                annihilated = false;
            }
            out.push(w.jet.div(&denominators[i]));
        }
        if annihilated {
            return Err(Error::AnnihilatedState);
        }
        Ok(out)
    }

    /// `α_j` at every grid point, indexed `[j − 1][i]`.
    pub fn alpha_samples(&self) -> Result<Vec<Vec<Complex64>>> {
        let k = self.k();
        let mut alphas = vec![Vec::with_capacity(self.grid.n); k];
        for i in 0..self.grid.n {
            let tower = tower_from_chain(&self.spec, &self.chains[i][..k], self.grid.x(i))?;
            for j in 1..=k {
                alphas[j - 1].push(tower[j].logd1 - tower[j - 1].logd1);
            }
        }
        Ok(alphas)
    }
}

/// Builds `V_k = x²/2 − (ln W_k)''`. Real seeds with `ε₁ ≥ 1/2` are refused.
pub fn partner_potential(spec: SeedSpec, grid: Grid) -> Result<PartnerModel> {
    partner_potential_with(spec, grid, false)
}

/// As [`partner_potential`], optionally accepting risky real seeds.
pub fn partner_potential_with(spec: SeedSpec, grid: Grid, allow_risky: bool) -> Result<PartnerModel> {
    let classification = classify_seed(&spec);
    if classification.kind == SeedKind::RealRisky && !allow_risky {
        return Err(Error::RiskySeed { eps1: spec.eps1 });
    }
    let k = spec.k;
    let seed_energies: Vec<f64> = (1..=k).map(|j| spec.eps(j)).collect();
    let mut chains = Vec::with_capacity(grid.n);
    let mut potential = Vec::with_capacity(grid.n);
    for x in grid.points() {
        let mut chain = seeds::seed_chain(&spec, x)?;
        let w = wronskian_jet(&chain, &seed_energies, x)?;
        potential.push(0.5 * x * x - w.logd2);
        let last = seeds::lower(&chain[k - 1], spec.eps(k));
        chain.push(last);
        chains.push(chain);
    }
    Ok(PartnerModel {
        spec,
        classification,
        energies: energies(&spec),
        grid,
        potential: GridFunction::new(grid, potential).with_label(format!("V_{k}")),
        chains,
    })
}

fn tower_from_chain(spec: &SeedSpec, chain: &[ComplexJet], x: f64) -> Result<Vec<WronskianJet>> {
    let seed_energies: Vec<f64> = (1..=chain.len()).map(|j| spec.eps(j)).collect();
    (0..=chain.len())
        .map(|j| wronskian_jet(&chain[..j], &seed_energies[..j], x))
        .collect()
}

/// `W_0 = 1, W_1, …, W_k` with first and second derivatives at `x`.
pub fn wronskian_tower(spec: &SeedSpec, x: f64) -> Result<Vec<WronskianJet>> {
    tower_from_chain(spec, &seeds::seed_chain(spec, x)?, x)
}

/// `α_j = (ln W_j)' − (ln W_{j−1})'`, `j = 1..=k`.
pub fn alpha_chain(spec: &SeedSpec, x: f64) -> Result<Vec<Complex64>> {
    let tower = wronskian_tower(spec, x)?;
    Ok(tower.windows(2).map(|w| w[1].logd1 - w[0].logd1).collect())
}

/// `W(u₁,…,u_k,f)/W(u₁,…,u_k)` for a solution `f` of `H₀f = Ef` given with
/// first derivatives. Defined up to a constant; output jets have order 2.
pub fn crum_map(model: &PartnerModel, f: &GridFunction, f_energy: f64) -> Result<GridFunction> {
    if f.grid != model.grid {
        return Err(Error::GridMismatch);
    }
    let inputs = match &f.jets {
        Some(jets) if f.jet_order() >= 1 => jets,
        _ => return Err(Error::MissingJets { needed: 1, available: f.jet_order() }),
    };
    let order = 2;
    let jets = model.crum_jets(inputs, f_energy, order, &model.seed_wronskian(order))?;
    Ok(GridFunction::from_jets(model.grid, jets))
}

/// `ψ_𝓔₁`, `ψ_𝓔₂`, `ψ_𝓔₃`.
pub fn extremal_sources(model: &PartnerModel) -> Result<[StateSource; 3]> {
    let k = model.k();
    if k == 0 {
        return Err(Error::InvalidSeed("extremal states need k >= 1".into()));
    }
    Ok([
        StateSource::Missing(k),
        StateSource::Mapped(H0Solution::Gaussian),
        StateSource::Mapped(H0Solution::RaisedSeed),
    ])
}

/// The three extremal states, labelled `psi_E1`, `psi_E2`, `psi_E3`, with
/// derivative data to order 2.
pub fn extremal_states(model: &PartnerModel) -> Result<[GridFunction; 3]> {
    let [s1, s2, s3] = extremal_sources(model)?;
    Ok([
        model.state(s1, 2)?.with_label("psi_E1"),
        model.state(s2, 2)?.with_label("psi_E2"),
        model.state(s3, 2)?.with_label("psi_E3"),
    ])
}

fn h_psi(model: &PartnerModel, psi: &GridFunction) -> Result<Vec<Option<Complex64>>> {
    if psi.grid != model.grid {
        return Err(Error::GridMismatch);
    }
    let n = model.grid.n;
    if n < MIN_RESIDUAL_POINTS {
        return Err(Error::GridTooCoarse { n, min: MIN_RESIDUAL_POINTS });
    }
    let d2 = differentiate_all(&psi.samples, model.grid.step(), Stencil::Second5);
    Ok((0..n)
        .map(|i| {
            if i < RESIDUAL_TRIM || i + RESIDUAL_TRIM >= n {
                return None;
            }
            Some(-0.5 * d2[i]? + model.potential.samples[i] * psi.samples[i])
        })
        .collect())
}

/// `sup |−ψ''/2 + V_kψ − Eψ| / max(1, sup|ψ|)` over the interior grid.
pub fn hamiltonian_residual(model: &PartnerModel, psi: &GridFunction, energy: f64) -> Result<f64> {
    let h = h_psi(model, psi)?;
    let scale = psi.sup_norm().max(1.0);
    Ok(h.iter()
        .zip(&psi.samples)
        .filter_map(|(hp, p)| Some((hp.as_ref()? - energy * p).norm()))
        .fold(0.0, f64::max)
        / scale)
}

/// Least-squares eigenvalue `⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩` over the interior grid.
pub fn fitted_eigenvalue(model: &PartnerModel, psi: &GridFunction) -> Result<Complex64> {
    let h = h_psi(model, psi)?;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (hp, p) in h.iter().zip(&psi.samples) {
        if let Some(hp) = hp {
            num += p.conj() * hp;
            den += p.norm_sqr();
        }
    }
    Ok(num / den)
}

/// Slopes of `ln|ψ|` against `x²` over the outer 30% of each half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDecay {
    pub left_slope: f64,
    pub right_slope: f64,
}

impl TailDecay {
    pub fn is_square_integrable(&self) -> bool {
        self.left_slope < DECAY_SLOPE && self.right_slope < DECAY_SLOPE
    }
}

fn log_slope(points: impl Iterator<Item = (f64, Complex64)>) -> Result<f64> {
    let data: Vec<(f64, f64)> = points
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(x, v)| (x * x, v.norm().ln()))
        .collect();
    if data.len() < 3 {
        return Err(Error::InvalidGrid("tail window holds fewer than 3 points".into()));
    }
    let m = data.len() as f64;
    let (sx, sy) = data.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = data
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Ok(sxy / sxx)
}

/// Classifies the tails of `ψ`; needs a grid straddling the origin.
pub fn tail_decay(psi: &GridFunction) -> Result<TailDecay> {
    let g = psi.grid;
    if !(g.xmin < 0.0 && g.xmax > 0.0) {
        return Err(Error::InvalidGrid("tail fit needs xmin < 0 < xmax".into()));
    }
    let samples = || (0..g.n).map(|i| (g.x(i), psi.samples[i]));
    Ok(TailDecay {
        left_slope: log_slope(samples().filter(|(x, _)| *x <= 0.7 * g.xmin))?,
        right_slope: log_slope(samples().filter(|(x, _)| *x >= 0.7 * g.xmax))?,
    })
}

/// Sup over `j` and the interior grid of the Riccati residual
/// `|α_j' + α_j² − 2(V_{j−1} − ε_j)|`, pointwise relative to the size of its
/// terms. `α_j'` comes from finite differences.
pub fn riccati_residual(model: &PartnerModel) -> Result<f64> {
    let alphas = model.alpha_samples()?;
    let g = model.grid;
    let mut worst: f64 = 0.0;
    for (j0, alpha) in alphas.iter().enumerate() {
        let j = j0 + 1;
        let da = differentiate_all(alpha, g.step(), Stencil::First7);
        for i in RESIDUAL_TRIM..g.n - RESIDUAL_TRIM {
            let x = g.x(i);
            let tower = tower_from_chain(&model.spec, &model.chains[i][..j - 1], x)?;
            let v_prev = 0.5 * x * x - tower[j - 1].logd2;
            let a = alpha[i];
            let rhs = 2.0 * (v_prev - model.spec.eps(j));
            let Some(d) = da[i] else { continue };
            let scale = 1.0f64.max(d.norm()).max(a.norm_sqr()).max(rhs.norm());
            worst = worst.max((d + a * a - rhs).norm() / scale);
        }
    }
    Ok(worst)
}
