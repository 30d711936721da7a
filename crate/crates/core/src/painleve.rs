//! Painlevé IV solutions `g = −x − (ln ψ_𝓔)'` built from extremal states, their
//! parameters, and a finite-difference residual of
//! `g'' = g'²/(2g) + (3/2)g³ + 4xg² + 2(x² − a)g + b/g`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{differentiate, Stencil};
use crate::grid::Grid;
use crate::seeds::SeedSpec;
use crate::susy::{extremal_sources, PartnerModel};

/// A solution with more than this fraction of masked points is singular.
pub const MAX_MASKED_FRACTION: f64 = 0.1;
/// The residual needs at least this fraction of admissible points.
pub const MIN_ADMISSIBLE_FRACTION: f64 = 0.5;
/// Points with `|g|` below this fraction of `sup|g|` are skipped (`b/g`).
pub const SMALL_G: f64 = 1e-8;
/// `sup|g| ≤ DEGENERATE_G (1 + max|x|)` means `g ≡ 0`.
pub const DEGENERATE_G: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PivParams {
    pub a: f64,
    pub b: f64,
    pub family: u8,
}

/// Family `f` makes `𝓔_f` distinguished: with `p, q` the other two energies,
/// `a = p + q − 2𝓔_f − 1` and `b = −2(p − q)²`.
pub fn piv_parameters(e1: f64, e2: f64, e3: f64, family: u8) -> Result<PivParams> {
    let (d, p, q) = match family {
        1 => (e1, e2, e3),
        2 => (e2, e1, e3),
        3 => (e3, e1, e2),
        other => return Err(Error::InvalidFamily(other)),
    };
    Ok(PivParams { a: p + q - 2.0 * d - 1.0, b: -2.0 * (p - q) * (p - q), family })
}

/// Sampled `g`; `None` marks a masked pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivSolution {
    pub grid: Grid,
    pub values: Vec<Option<Complex64>>,
    pub params: PivParams,
    pub spec: SeedSpec,
}

impl PivSolution {
    pub fn pole_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn masked_points(&self) -> Vec<f64> {
        (0..self.grid.n).filter(|&i| self.values[i].is_none()).map(|i| self.grid.x(i)).collect()
    }

    pub fn residual(&self) -> Result<PivResidual> {
        piv_residual(&self.values, self.grid, self.params.a, self.params.b)
    }
}

/// `g = −x − (ln ψ_𝓔f)'` with exact log-derivatives of the extremal state.
///
/// Grid points where the log-derivative blows up past both `1/(4h)` and a
/// multiple of the local WKB scale are masked instead of sampled.
pub fn piv_solution(model: &PartnerModel, family: u8) -> Result<PivSolution> {
    let energies = model.energies;
    let energy = energies.get(family)?;
    let params = piv_parameters(energies.e1, energies.e2, energies.e3, family)?;
    let source = extremal_sources(model)?[usize::from(family) - 1];
    let state = model.state(source, 1).map_err(|e| match e {
        Error::AnnihilatedState => Error::ExtremalStateZero { family },
        other => other,
    })?;
    let grid = model.grid;
    let pole_scale = 0.25 / grid.step();
    let mut values = Vec::with_capacity(grid.n);
    for jet in state.jets.as_deref().unwrap_or_default() {
        let x = jet.x;
        let (psi, dpsi) = (jet.values[0], jet.values[1]);
        let logd = dpsi / psi;
        let local = 4.0 * (1.0 + x.abs() + (2.0 * energy.abs()).sqrt());
        let pole = psi.norm() == 0.0 || !logd.is_finite() || (logd.norm() > pole_scale && logd.norm() > local);
        values.push((!pole).then(|| -x - logd));
    }
    let masked = values.iter().filter(|v| v.is_none()).count();
    if masked as f64 > MAX_MASKED_FRACTION * grid.n as f64 {
        return Err(Error::SingularSolution { masked, total: grid.n });
    }
    let sup = values.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if sup <= DEGENERATE_G * (1.0 + grid.xmin.abs().max(grid.xmax.abs())) {
        return Err(Error::DegenerateSolution);
    }
    Ok(PivSolution { grid, values, params, spec: model.spec })
}

/// Pointwise PIV residuals and their supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivResidual {
    pub sup: f64,
    /// `None` where the point was not admissible.
    pub values: Vec<Option<f64>>,
    pub admissible: usize,
    pub total: usize,
    /// Points skipped because `|g|` was too small for `b/g`.
    pub small_g: usize,
}

impl PivResidual {
    /// Fraction of admissible points with residual at most `tol`.
    pub fn fraction_within(&self, tol: f64) -> f64 {
        let ok = self.values.iter().flatten().filter(|&&r| r <= tol).count();
        ok as f64 / self.admissible.max(1) as f64
    }
}

/// `|g'' − [g'²/(2g) + (3/2)g³ + 4xg² + 2(x² − a)g + b/g]| / (1 + |g|³)` with
/// 7-point central differences, over points whose stencil avoids masked
/// samples and where `|g| ≥ 1e−8 sup|g|`.
pub fn piv_residual(g: &[Option<Complex64>], grid: Grid, a: f64, b: f64) -> Result<PivResidual> {
    if g.len() != grid.n {
        return Err(Error::GridMismatch);
    }
    let h = grid.step();
    let d1 = differentiate(g, h, Stencil::First7);
    let d2 = differentiate(g, h, Stencil::Second7);
    let floor = SMALL_G * g.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut small_g = 0;
    let values: Vec<Option<f64>> = (0..grid.n)
        .map(|i| {
            let (gv, dg, ddg) = (g[i]?, d1[i]?, d2[i]?);
            if gv.norm() < floor || gv.norm() == 0.0 {
                small_g += 1;
                return None;
            }
            let x = grid.x(i);
            let rhs = dg * dg / (2.0 * gv) + 1.5 * gv * gv * gv + 4.0 * x * gv * gv + 2.0 * (x * x - a) * gv + b / gv;
            Some((ddg - rhs).norm() / (1.0 + gv.norm().powi(3)))
        })
        .collect();
    let admissible = values.iter().flatten().count();
    if (admissible as f64) < MIN_ADMISSIBLE_FRACTION * grid.n as f64 {
        return Err(Error::TooFewAdmissiblePoints { admissible, total: grid.n });
    }
    let sup = values.iter().flatten().fold(0.0, |m: f64, &r| m.max(r));
    Ok(PivResidual { sup, values, admissible, total: grid.n, small_g })
}

/// Rational solutions used as exact oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fixture {
    /// `g = −2x`, `(a, b) = (0, −2)`.
    Linear,
    /// `g = −2x/3`, `(a, b) = (0, −2/9)`.
    TwoThirds,
}

impl Fixture {
    pub fn slope(self) -> f64 {
        match self {
            Fixture::Linear => -2.0,
            Fixture::TwoThirds => -2.0 / 3.0,
        }
    }

    pub fn parameters(self) -> (f64, f64) {
        match self {
            Fixture::Linear => (0.0, -2.0),
            Fixture::TwoThirds => (0.0, -2.0 / 9.0),
        }
    }

    pub fn samples(self, grid: Grid) -> Vec<Option<Complex64>> {
        grid.points().map(|x| Some(Complex64::new(self.slope() * x, 0.0))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::susy::partner_potential;

    #[test]
    fn family_one_parameters() {
        let p = piv_parameters(4.0, 0.5, 6.0, 1).unwrap();
        assert_eq!((p.a, p.b), (-2.5, -60.5));
        assert_eq!(piv_parameters(1.0, 3.0, 3.0, 1).unwrap().b, 0.0);
        assert_eq!(piv_parameters(1.0, 2.0, 3.0, 0), Err(Error::InvalidFamily(0)));
    }

    #[test]
    fn permuted_families() {
        let p2 = piv_parameters(5.0, 0.5, 6.0, 2).unwrap();
        assert_eq!((p2.a, p2.b), (9.0, -2.0));
        let p3 = piv_parameters(5.0, 0.5, 6.0, 3).unwrap();
        assert_eq!((p3.a, p3.b), (-7.5, -40.5));
    }

    #[test]
    fn rational_fixtures_solve_piv() {
        let grid = Grid::new(-5.0, 5.0, 2001).unwrap();
        for fixture in [Fixture::Linear, Fixture::TwoThirds] {
            let (a, b) = fixture.parameters();
            let r = piv_residual(&fixture.samples(grid), grid, a, b).unwrap();
            assert!(r.sup <= 1e-8, "{fixture:?}: {}", r.sup);
            assert_eq!(r.small_g, 1);
        }
    }

    #[test]
    fn wrong_parameters_are_detected() {
        let grid = Grid::new(-5.0, 5.0, 2001).unwrap();
        let r = piv_residual(&Fixture::Linear.samples(grid), grid, 1.0, -2.0).unwrap();
        assert!(r.sup > 1e-2);
    }

    #[test]
    fn anti_gaussian_seed_gives_zero() {
        let grid = Grid::new(-5.0, 5.0, 501).unwrap();
        let model = partner_potential(SeedSpec::new(-0.5, 0.0, 0.0, 1).unwrap(), grid).unwrap();
        assert_eq!(piv_solution(&model, 1).unwrap_err(), Error::DegenerateSolution);
    }

    #[test]
    fn mostly_masked_data_is_refused() {
        let grid = Grid::new(-1.0, 1.0, 101).unwrap();
        let g: Vec<Option<Complex64>> = (0..101).map(|i| (i % 2 == 0).then_some(Complex64::new(1.0, 0.0))).collect();
        assert!(matches!(piv_residual(&g, grid, 0.0, 0.0), Err(Error::TooFewAdmissiblePoints { .. })));
    }
}
