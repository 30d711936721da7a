//! Ladder operators of `H_k` and the structure of its spectrum.
//!
//! The third-order operators are realized from their kernels:
//! `L⁻f = −(2√2)⁻¹ W(ψ_𝓔₁, ψ_𝓔₂, ψ_𝓔₃, f)/W(ψ_𝓔₁, ψ_𝓔₂, ψ_𝓔₃)` and
//! `L⁺f = (2√2)⁻¹ W(ψ_ε₁, B⁺e^{x²/2}, B⁺u_{k+1}, f)/W(…)`, so that
//! `L⁺L⁻ = (H − 𝓔₁)(H − 𝓔₂)(H − 𝓔₃)`. For `k = 0` they reduce to `a∓`.
//!
//! The natural `(2k+1)`-order composition `B⁺a±B⁻` is available through
//! [`natural_ladder_apply`] as a finite-difference cross-check. It kills every
//! finite-ladder state, so reports are built from the third-order operators.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{differentiate, Stencil};
use crate::grid::{fit_proportional, GridFunction};
use crate::jet::ComplexJet;
use crate::seeds::SeedKind;
use crate::susy::{H0Solution, PartnerModel, StateSource};
use crate::wronskian::{wronskian_with, RowSets};

/// Equilibrated `|W(K, ψ)|` at or below this everywhere means `Lψ = 0`.
pub const ANNIHILATION_TOLERANCE: f64 = 1e-8;
/// Largest relative least-squares residual accepted as `Lψ ∝ φ`.
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-4;
/// Largest accepted deviation of `L⁺L⁻ψ / ψ` from `Q(E)`.
pub const PHA_TOLERANCE: f64 = 1e-3;
pub const MAX_LADDER_DEPTH: usize = 20;

/// Energies closer than this are treated as equal.
const ENERGY_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    fn shift(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }
}

/// `L⁻` or `L⁺` for one model, with its kernel precomputed.
#[derive(Debug, Clone)]
pub struct LadderOperator {
    pub direction: Direction,
    pub kernel: Vec<StateSource>,
    pub coefficient: f64,
    kernel_jets: Vec<Vec<ComplexJet>>,
    kernel_wronskian: Vec<ComplexJet>,
    order: usize,
}

/// Kernel states and leading coefficient of `L⁻` or `L⁺`.
pub fn ladder_kernel(model: &PartnerModel, direction: Direction) -> (Vec<StateSource>, f64) {
    let k = model.k();
    let c3 = 1.0 / (2.0 * SQRT_2);
    match (k, direction) {
        (0, Direction::Down) => (vec![StateSource::Mapped(H0Solution::Gaussian)], FRAC_1_SQRT_2),
        (0, Direction::Up) => (vec![StateSource::Mapped(H0Solution::AntiGaussian)], -FRAC_1_SQRT_2),
        (_, Direction::Down) => (
            vec![
                StateSource::Missing(k),
                StateSource::Mapped(H0Solution::Gaussian),
                StateSource::Mapped(H0Solution::RaisedSeed),
            ],
            -c3,
        ),
        (_, Direction::Up) => (
            vec![
                StateSource::Missing(1),
                StateSource::Mapped(H0Solution::AntiGaussian),
                StateSource::Mapped(H0Solution::Seed(k + 1)),
            ],
            c3,
        ),
    }
}

/// Image of a ladder operator together with how far it is from zero.
#[derive(Debug, Clone)]
pub struct LadderImage {
    pub function: GridFunction,
    /// Largest equilibrated `|W(K, ψ)|` over the grid.
    pub size: f64,
}

impl LadderImage {
    pub fn is_annihilated(&self) -> bool {
        self.size <= ANNIHILATION_TOLERANCE
    }
}

impl LadderOperator {
    /// Prepares the operator for inputs with derivative data up to `order`
    /// (at least the operator's own order).
    pub fn new(model: &PartnerModel, direction: Direction, order: usize) -> Result<Self> {
        let (kernel, coefficient) = ladder_kernel(model, direction);
        let m = kernel.len();
        if order < m {
            return Err(Error::MissingJets { needed: m, available: order });
        }
        let out = order - m;
        let states = kernel
            .iter()
            .map(|&s| model.state(s, order).map(|f| f.jets.unwrap_or_default()))
            .collect::<Result<Vec<_>>>()?;
        let mut kernel_jets = vec![Vec::with_capacity(m); model.grid.n];
        for state in &states {
            for (i, jet) in state.iter().enumerate() {
                kernel_jets[i].push(jet.clone());
            }
        }
        let sets = RowSets::new(m, out);
        let mut kernel_wronskian = Vec::with_capacity(model.grid.n);
        for (i, cols) in kernel_jets.iter().enumerate() {
            let x = model.grid.x(i);
            let w = wronskian_with(cols, &sets, x);
            if w.is_singular() {
                return Err(Error::SingularWronskian { x });
            }
            kernel_wronskian.push(w.jet);
        }
        Ok(Self { direction, kernel, coefficient, kernel_jets, kernel_wronskian, order })
    }

    pub fn order(&self) -> usize {
        self.kernel.len()
    }

    /// Applies the operator; the image keeps derivative data to
    /// `input order − operator order`.
    pub fn apply(&self, psi: &GridFunction) -> Result<LadderImage> {
        let m = self.order();
        let jets = psi
            .jets
            .as_ref()
            .filter(|_| psi.jet_order() >= self.order)
            .ok_or(Error::MissingJets { needed: self.order, available: psi.jet_order() })?;
        if jets.len() != self.kernel_jets.len() {
            return Err(Error::GridMismatch);
        }
        let out = self.order - m;
        let sets = RowSets::new(m + 1, out);
        let factor = Complex64::new(self.coefficient, 0.0);
        let mut size: f64 = 0.0;
        let mut image = Vec::with_capacity(jets.len());
        for (i, f) in jets.iter().enumerate() {
            let mut cols = self.kernel_jets[i].clone();
            cols.push(f.truncated(self.order));
            let w = wronskian_with(&cols, &sets, f.x);
            size = size.max(w.relative);
            image.push(w.jet.div(&self.kernel_wronskian[i]).scaled(factor));
        }
        Ok(LadderImage { function: GridFunction::from_jets(psi.grid, image), size })
    }
}

/// `L∓ψ` with the third-order (or, for `k = 0`, first-order) operator.
/// `ψ` needs derivative data at least up to the operator's order.
pub fn ladder_apply(model: &PartnerModel, psi: &GridFunction, direction: Direction) -> Result<GridFunction> {
    let order = psi.jet_order();
    Ok(LadderOperator::new(model, direction, order)?.apply(psi)?.function)
}

/// `B⁺a∓B⁻ψ` from sampled data: every first-order factor differentiates with
/// 5-point stencils, using `α_j` from the Wronskian tower.
pub fn natural_ladder_apply(
    model: &PartnerModel,
    psi: &GridFunction,
    direction: Direction,
) -> Result<Vec<Option<Complex64>>> {
    if psi.grid != model.grid {
        return Err(Error::GridMismatch);
    }
    let k = model.k();
    let needed = 4 * (k + 1) + 1;
    if model.grid.n < 2 * needed {
        return Err(Error::GridTooCoarse { n: model.grid.n, min: 2 * needed });
    }
    let h = model.grid.step();
    let alphas = model.alpha_samples()?;
    let xs: Vec<Complex64> = model.grid.points().map(|x| Complex64::new(x, 0.0)).collect();
    // (sign of d/dx, multiplier): (±f' + β f)/√2
    let step = |f: &[Option<Complex64>], sign: f64, beta: &[Complex64]| -> Vec<Option<Complex64>> {
        differentiate(f, h, Stencil::First5)
            .iter()
            .zip(f)
            .zip(beta)
            .map(|((d, v), b)| Some((sign * (*d)? + b * (*v)?) * FRAC_1_SQRT_2))
            .collect()
    };
    let mut f: Vec<Option<Complex64>> = psi.samples.iter().map(|v| Some(*v)).collect();
    for j in (1..=k).rev() {
        f = step(&f, 1.0, &alphas[j - 1]);
    }
    f = match direction {
        Direction::Down => step(&f, 1.0, &xs),
        Direction::Up => step(&f, -1.0, &xs),
    };
    for j in 1..=k {
        f = step(&f, -1.0, &alphas[j - 1]);
    }
    Ok(f)
}

/// Roots of `Q(E)` with `L⁺L⁻ = Q(H)` for the third-order realization.
pub fn q_roots(model: &PartnerModel) -> Vec<f64> {
    if model.k() == 0 {
        vec![0.5]
    } else {
        model.energies.as_array().to_vec()
    }
}

/// Roots of the number operator `B⁺a⁺B⁻B⁺a⁻B⁻` of the natural composition:
/// `1/2` together with `ε_j` and `ε_j + 1` for every seed.
pub fn natural_q_roots(model: &PartnerModel) -> Vec<f64> {
    let mut roots = vec![0.5];
    for j in 1..=model.k() {
        let e = model.spec.eps(j);
        roots.push(e);
        roots.push(e + 1.0);
    }
    roots
}

pub fn q_polynomial(roots: &[f64], energy: f64) -> f64 {
    roots.iter().map(|r| energy - r).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    Annihilated { size: f64 },
    Proportional { target_energy: f64, fit_residual: f64 },
    Unresolved { fit_residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderActionResult {
    pub source_energy: f64,
    pub direction: Direction,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneWayLink {
    pub from: f64,
    pub to: f64,
    pub direction: Direction,
    pub fit_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub finite_ladder: Vec<f64>,
    pub infinite_ladder: Vec<f64>,
    pub annihilated_down: Vec<f64>,
    pub annihilated_up: Vec<f64>,
    pub one_way_links: Vec<OneWayLink>,
    pub verified: bool,
    pub offending_energy: Option<f64>,
    /// Roots of `Q` with `L⁺L⁻ = Q(H)`.
    pub q_roots: Vec<f64>,
    pub actions: Vec<LadderActionResult>,
}

struct LadderState {
    energy: f64,
    function: GridFunction,
}

fn decide(image: &LadderImage, candidates: &[&LadderState]) -> Verdict {
    if image.is_annihilated() {
        return Verdict::Annihilated { size: image.size };
    }
    let out: Vec<Option<Complex64>> = image.function.samples.iter().map(|v| Some(*v)).collect();
    let mut best: Option<(f64, f64)> = None;
    for c in candidates {
        let target: Vec<Option<Complex64>> = c.function.samples.iter().map(|v| Some(*v)).collect();
        let r = fit_proportional(&out, &target).relative_residual;
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, c.energy));
        }
    }
    match best {
        Some((r, e)) if r <= PROPORTIONALITY_TOLERANCE => Verdict::Proportional { target_energy: e, fit_residual: r },
        Some((r, _)) => Verdict::Unresolved { fit_residual: r },
        None => Verdict::Unresolved { fit_residual: 1.0 },
    }
}

/// Applies `L⁻` and `L⁺` to the first `depth` mapped oscillator states and to
/// the missing states, and assembles the verified ladder structure.
///
/// `ε₁ = E_j` with `j ≤ k` is refused.
pub fn spectrum_report(model: &PartnerModel, depth: usize) -> Result<SpectrumReport> {
    if depth > MAX_LADDER_DEPTH {
        return Err(Error::LadderDepth(depth));
    }
    let k = model.k();
    let class = model.classification;
    let degenerate = k > 0 && class.kind == SeedKind::EigenvalueDegenerate;
    if degenerate && !class.is_degenerate_above_order() {
        return Err(Error::UnsupportedDegenerate { j: class.j_index.unwrap_or(0), k });
    }
    let levels = match class.j_index {
        Some(j) if degenerate => depth.max(j + 2),
        _ => depth,
    };

    let (down, up) = (LadderOperator::new(model, Direction::Down, 3)?, LadderOperator::new(model, Direction::Up, 3)?);
    let mut finite = Vec::new();
    if !degenerate {
        for j in (1..=k).rev() {
            let source = StateSource::Missing(j);
            finite.push(LadderState { energy: model.source_energy(source), function: model.state(source, 3)? });
        }
    }
    let mut infinite = Vec::new();
    for l in 0..=levels {
        let source = StateSource::Mapped(H0Solution::Eigenstate(l));
        infinite.push(LadderState { energy: model.source_energy(source), function: model.state(source, 3)? });
    }

    let mut actions = Vec::new();
    let mut verified = true;
    let mut offending = None;
    let all: Vec<&LadderState> = finite.iter().chain(&infinite).collect();
    let sources: Vec<&LadderState> = finite.iter().chain(&infinite[..levels]).collect();
    for state in &sources {
        for op in [&down, &up] {
            let target = state.energy + op.direction.shift();
            let candidates: Vec<&LadderState> =
                all.iter().copied().filter(|c| (c.energy - target).abs() < ENERGY_MATCH).collect();
            let verdict = decide(&op.apply(&state.function)?, &candidates);
            if matches!(verdict, Verdict::Unresolved { .. }) && verified {
                verified = false;
                offending = Some(state.energy);
            }
            actions.push(LadderActionResult { source_energy: state.energy, direction: op.direction, verdict });
        }
    }

    let lookup = |energy: f64, direction: Direction| {
        actions
            .iter()
            .find(|a| a.direction == direction && (a.source_energy - energy).abs() < ENERGY_MATCH)
            .map(|a| a.verdict)
    };
    let annihilated = |direction: Direction| -> Vec<f64> {
        actions
            .iter()
            .filter(|a| a.direction == direction && matches!(a.verdict, Verdict::Annihilated { .. }))
            .map(|a| a.source_energy)
            .collect()
    };
    let mut one_way_links = Vec::new();
    for a in &actions {
        if let Verdict::Proportional { target_energy, fit_residual } = a.verdict {
            let back = lookup(target_energy, a.direction.reversed());
            let returns = matches!(back, Some(Verdict::Proportional { target_energy: t, .. })
                if (t - a.source_energy).abs() < ENERGY_MATCH);
            if back.is_some() && !returns {
                one_way_links.push(OneWayLink { from: a.source_energy, to: target_energy, direction: a.direction, fit_residual });
            }
        }
    }

    let mut finite_ladder: Vec<f64> = finite.iter().map(|s| s.energy).collect();
    finite_ladder.sort_by(f64::total_cmp);
    let mut annihilated_down = annihilated(Direction::Down);
    let mut annihilated_up = annihilated(Direction::Up);
    annihilated_down.sort_by(f64::total_cmp);
    annihilated_up.sort_by(f64::total_cmp);
    Ok(SpectrumReport {
        finite_ladder,
        infinite_ladder: infinite[..levels].iter().map(|s| s.energy).collect(),
        annihilated_down,
        annihilated_up,
        one_way_links,
        verified,
        offending_energy: offending,
        q_roots: q_roots(model),
        actions,
    })
}

/// Outcome of comparing `L⁺L⁻ψ` with `Q(E)ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaCheck {
    pub fitted: Complex64,
    pub expected: f64,
    pub deviation: f64,
    /// `L⁻ψ = 0`: the comparison says nothing.
    pub vacuous: bool,
}

impl PhaCheck {
    pub fn passes(&self) -> bool {
        !self.vacuous && self.deviation <= PHA_TOLERANCE
    }
}

/// Fits `L⁺L⁻ψ ≈ cψ` and compares `c` with `Q(E)`. `ψ` needs derivative
/// data to twice the operator order.
pub fn pha_factorization_check(model: &PartnerModel, psi: &GridFunction, energy: f64) -> Result<PhaCheck> {
    let m = ladder_kernel(model, Direction::Down).0.len();
    let expected = q_polynomial(&q_roots(model), energy);
    let lowered = LadderOperator::new(model, Direction::Down, 2 * m)?.apply(psi)?;
    if lowered.is_annihilated() {
        return Ok(PhaCheck { fitted: Complex64::new(0.0, 0.0), expected, deviation: 0.0, vacuous: true });
    }
    let raised = LadderOperator::new(model, Direction::Up, m)?.apply(&lowered.function)?;
    let out: Vec<Option<Complex64>> = raised.function.samples.iter().map(|v| Some(*v)).collect();
    let base: Vec<Option<Complex64>> = psi.samples.iter().map(|v| Some(*v)).collect();
    let fitted = fit_proportional(&out, &base).constant;
    Ok(PhaCheck { fitted, expected, deviation: (fitted - expected).norm() / expected.abs().max(1.0), vacuous: false })
}
