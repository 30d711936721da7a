use std::path::{Path, PathBuf};

use piv_core::painleve::{piv_residual, piv_solution, Fixture, PivParams};
use piv_core::seeds::{seed_residual, SeedSpec};
use piv_core::spectra::spectrum_report;
use piv_core::susy::{
    extremal_states, hamiltonian_residual, partner_potential_with, riccati_residual, tail_decay, PartnerModel,
};
use piv_core::wronskian::derivative_mismatch;
use piv_core::{Complex64, Grid};
use serde::Serialize;

use crate::output::{write_g, write_json, write_states};
use crate::{CliError, FixtureArg, RunConfig};

type CmdResult = Result<(), CliError>;

const SEED_TOLERANCE: f64 = 1e-7;
const RICCATI_TOLERANCE: f64 = 1e-6;
const WRONSKIAN_TOLERANCE: f64 = 1e-6;
const PIV_TOLERANCE: f64 = 1e-5;
const FIXTURE_TOLERANCE: f64 = 1e-8;
const HAMILTONIAN_TOLERANCE: f64 = 1e-6;
/// Non-normalizable or finite-ladder extremal states: same bound as mapped states.
const EXTREMAL_TOLERANCE: f64 = 1e-5;

impl RunConfig {
    fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.xmin, self.xmax, self.n as usize)?)
    }

    fn spec(&self) -> Result<SeedSpec, CliError> {
        Ok(SeedSpec::new(self.eps1, self.lambda, self.kappa, self.k)?)
    }

    fn model(&self) -> Result<PartnerModel, CliError> {
        Ok(partner_potential_with(self.spec()?, self.grid()?, self.allow_risky)?)
    }

    fn fixture(&self) -> Option<Fixture> {
        self.fixture.map(|f| match f {
            FixtureArg::Linear => Fixture::Linear,
            FixtureArg::TwoThirds => Fixture::TwoThirds,
        })
    }

    fn overridden(&self, params: PivParams) -> PivParams {
        PivParams { a: self.a.unwrap_or(params.a), b: self.b.unwrap_or(params.b), ..params }
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out_path.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

/// `g` and its parameters, either from a fixture or from a SUSY model.
fn solution(config: &RunConfig) -> Result<(Grid, Vec<Option<Complex64>>, PivParams), CliError> {
    let grid = config.grid()?;
    if let Some(fixture) = config.fixture() {
        let (a, b) = fixture.parameters();
        let params = config.overridden(PivParams { a, b, family: 0 });
        return Ok((grid, fixture.samples(grid), params));
    }
    let sol = piv_solution(&config.model()?, config.family)?;
    let params = config.overridden(sol.params);
    Ok((grid, sol.values, params))
}

pub fn generate(config: &RunConfig) -> CmdResult {
    let (grid, values, params) = solution(config)?;
    let path = config.out_or(match config.format {
        crate::Format::Csv => "g.csv",
        crate::Format::Json => "g.json",
    });
    write_g(&path, config.format, grid, &values, &params)?;
    let poles = values.iter().filter(|v| v.is_none()).count();
    println!("a={} b={}", params.a, params.b);
    match config.fixture {
        Some(_) => println!("family=fixture poles={poles}"),
        None => println!("family={} poles={poles}", params.family),
    }
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    value: f64,
    threshold: f64,
    pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    spec: Option<SeedSpec>,
    fixture: Option<String>,
    a: f64,
    b: f64,
    family: u8,
    checks: Vec<Check>,
    all_pass: bool,
}

pub fn verify(config: &RunConfig) -> CmdResult {
    let grid = config.grid()?;
    let mut checks = Vec::new();
    let (spec, params) = if let Some(fixture) = config.fixture() {
        let (a, b) = fixture.parameters();
        let params = config.overridden(PivParams { a, b, family: 0 });
        let r = piv_residual(&fixture.samples(grid), grid, params.a, params.b)?;
        checks.push(Check::new("piv_residual", r.sup, FIXTURE_TOLERANCE));
        (None, params)
    } else {
        let spec = config.spec()?;
        let model = config.model()?;
        checks.push(Check::new("seed_residual", seed_residual(&spec, grid)?, SEED_TOLERANCE));
        checks.push(Check::new("riccati_residual", riccati_residual(&model)?, RICCATI_TOLERANCE));
        let w = derivative_mismatch(&model.seed_wronskian(2), grid.step());
        checks.push(Check::new("wronskian_fd", w, WRONSKIAN_TOLERANCE));
        let sol = piv_solution(&model, config.family)?;
        let params = config.overridden(sol.params);
        let r = piv_residual(&sol.values, grid, params.a, params.b)?;
        checks.push(Check::new("piv_residual", r.sup, PIV_TOLERANCE));
        let energies = model.energies.as_array();
        for (i, psi) in extremal_states(&model)?.iter().enumerate() {
            let h = hamiltonian_residual(&model, psi, energies[i])?;
            let tol = if i == 1 { HAMILTONIAN_TOLERANCE } else { EXTREMAL_TOLERANCE };
            checks.push(Check::new(format!("hamiltonian_residual_E{}", i + 1), h, tol));
        }
        (Some(spec), params)
    };
    let all_pass = checks.iter().all(|c| c.pass);
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    let report = VerifyReport {
        spec,
        fixture: config.fixture.map(|f| format!("{f:?}").to_lowercase()),
        a: params.a,
        b: params.b,
        family: params.family,
        checks,
        all_pass,
    };
    emit_json(config.out_path.as_deref(), &report)?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Unverified(failed.join(", ")))
    }
}

pub fn spectrum(config: &RunConfig) -> CmdResult {
    let report = spectrum_report(&config.model()?, config.depth)?;
    emit_json(config.out_path.as_deref(), &report)?;
    if report.verified {
        Ok(())
    } else {
        Err(CliError::Unverified(format!(
            "ladder action at E = {} is unresolved",
            report.offending_energy.unwrap_or(f64::NAN)
        )))
    }
}

pub fn extremal(config: &RunConfig) -> CmdResult {
    let model = config.model()?;
    let states = extremal_states(&model)?;
    let path = config.out_or(match config.format {
        crate::Format::Csv => "extremal.csv",
        crate::Format::Json => "extremal.json",
    });
    write_states(&path, config.format, model.grid, &states)?;
    for (i, (psi, e)) in states.iter().zip(model.energies.as_array()).enumerate() {
        let h = hamiltonian_residual(&model, psi, e)?;
        let tail = match tail_decay(psi) {
            Ok(t) if t.is_square_integrable() => "decaying",
            Ok(_) => "growing",
            Err(_) => "unknown",
        };
        println!("E{}={e} residual={h:.3e} tails={tail}", i + 1);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> CmdResult {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}
