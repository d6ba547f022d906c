use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::CommandFactory;
use dicke_core::canonical::{critical_beta, laplace_beta_at_energy, laplace_curve, laplace_observables};
use dicke_core::diag::{diagonalize_all, histogram_observables, CacheDir};
use dicke_core::scaling::{scaling_analysis, PrecursorSearch, DEFAULT_LADDER};
use dicke_core::{
    EpsilonMode, FiniteCanonical, FullMicro, ModelParams, Precursor, SectorCurve, SectorId, ThermoCurve,
};

use crate::args::*;
use crate::error::CliError;

const MAX_GRID_POINTS: usize = 10_000_000;
const DEFAULT_N: u64 = 100_000;
const DEFAULT_DIAG_N: u64 = 16;
const DEFAULT_LAMBDA: f64 = 1.5;

type Outcome = Result<(), CliError>;

pub fn run(command: &Command) -> Outcome {
    match command {
        Command::Sector(a) => sector(a),
        Command::Micro(a) => micro(a),
        Command::Canonical(a) => canonical(a),
        Command::Laplace(a) => laplace(a),
        Command::Compare(a) => compare(a),
        Command::Diag(a) => diag(a),
        Command::Scaling(a) => scaling(a),
    }
}

fn params(model: &Model, default_n: u64) -> Result<ModelParams, CliError> {
    let lambda = model.lambda.unwrap_or(DEFAULT_LAMBDA);
    let p = ModelParams::new(
        model.omega,
        model.omega0,
        lambda,
        model.n_atoms.unwrap_or(default_n),
    )?;
    Ok(p.with_epsilon(model.epsilon)?)
}

fn linspace(name: &str, lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && hi >= lo) {
        return Err(CliError::Config(format!(
            "{name} grid needs finite min <= max and step > 0 (got {lo}, {hi}, {step})"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(CliError::Config(format!(
            "{name} grid has {count} points (limit {MAX_GRID_POINTS})"
        )));
    }
    // snapped to 1e-12 so that accumulated rounding does not leak into the CSV
    Ok((0..count)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn energy_grid(grid: &EnergyGrid, default: (f64, f64, f64)) -> Result<Vec<f64>, CliError> {
    linspace(
        "energy",
        grid.e_min.unwrap_or(default.0),
        grid.e_max.unwrap_or(default.1),
        grid.e_step.unwrap_or(default.2),
    )
}

fn beta_grid(b: &BetaGrid) -> Result<Vec<f64>, CliError> {
    if !(b.beta_min > 0.0) {
        return Err(CliError::Config(format!(
            "beta-min must be > 0 (got {})",
            b.beta_min
        )));
    }
    linspace("beta", b.beta_min, b.beta_max, b.beta_step)
}

/// Renders the CSV fully, then writes it to the file or stdout.
fn emit(common: &Common, render: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Outcome {
    let mut buf = Vec::new();
    render(&mut buf)?;
    match &common.output {
        Some(path) => fs::write(path, &buf)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => Ok(io::stdout().lock().write_all(&buf)?),
    }
}

fn opt(v: Option<f64>) -> String {
    v.filter(|x| x.is_finite())
        .map_or_else(|| "nan".to_string(), |x| (x + 0.0).to_string())
}

fn sector(a: &SectorArgs) -> Outcome {
    if a.model.lambda.is_none() {
        let mut cli = Cli::command();
        cli.build();
        cli.find_subcommand_mut("sector")
            .expect("sector subcommand")
            .error(
                ErrorKind::MissingRequiredArgument,
                "--lambda is required for a sector curve",
            )
            .exit();
    }
    let p = params(&a.model, DEFAULT_N)?;
    let id = SectorId::nearest_to_fraction(p.n_atoms, a.j_fraction)?;
    if id.twice_j() == 0 {
        return Err(CliError::Config("j = 0 sector has no semiclassical curve".into()));
    }
    let grid = energy_grid(&a.grid, (-2.0, 1.0, 0.001))?;
    let scale = p.n() / id.j();
    let over_j: Vec<f64> = grid.iter().map(|e| e * scale).collect();
    let curve = SectorCurve::compute(&p, &id, &over_j, a.jx_weight.into())?;
    emit(&a.common, |w| curve.write_csv(w))
}

fn micro(a: &MicroArgs) -> Outcome {
    let p = params(&a.model, DEFAULT_N)?;
    let model = FullMicro::new(&p, a.nodes.micro_config())?;
    let curve = model.curve(&energy_grid(&a.grid, (-2.0, 1.0, 0.01))?)?;
    emit(&a.common, |w| curve.write_csv(w))
}

fn canonical(a: &CanonicalArgs) -> Outcome {
    let p = params(&a.model, DEFAULT_N)?;
    let curve: ThermoCurve = FiniteCanonical::new(&p, a.space.into())?.curve(&beta_grid(&a.betas)?)?;
    emit(&a.common, |w| curve.write_csv(w))
}

fn laplace(a: &LaplaceArgs) -> Outcome {
    let p = params(&a.model, DEFAULT_N)?;
    let curve = laplace_curve(&p, &beta_grid(&a.betas)?)?;
    emit(&a.common, |w| curve.write_csv(w))
}

struct CompareRow {
    e: f64,
    beta_micro: Option<f64>,
    beta_canonical: Option<f64>,
    jz_micro: Option<f64>,
    jz_canonical: Option<f64>,
    jx_micro: Option<f64>,
    jx_laplace: Option<f64>,
}

fn max_deviation(rows: &[CompareRow], pick: impl Fn(&CompareRow) -> Option<f64>) -> Option<f64> {
    rows.iter().filter_map(pick).reduce(f64::max)
}

fn compare(a: &CompareArgs) -> Outcome {
    let p = params(&a.model, DEFAULT_N)?;
    let grid = energy_grid(&a.grid, (-2.0, 0.5, 0.01))?;
    let micro = FullMicro::new(&p, a.nodes.micro_config())?.curve(&grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    for point in &micro.points {
        let e = point.e_per_atom;
        // outside (E_ground/N, 0) the canonical ensemble has no temperature
        let canonical = match laplace_beta_at_energy(e, &p) {
            Ok(beta) => Some((
                beta,
                laplace_observables(beta, &p, EpsilonMode::Zero)?,
                laplace_observables(beta, &p, EpsilonMode::LimitPlus)?,
            )),
            Err(err) if err.is_config_error() => None,
            Err(err) => return Err(err.into()),
        };
        rows.push(CompareRow {
            e,
            beta_micro: point.beta,
            beta_canonical: canonical.map(|c| c.0),
            jz_micro: point.jz_per_atom,
            jz_canonical: canonical.map(|c| c.1.jz_per_atom),
            jx_micro: point.jx_plus_per_atom,
            jx_laplace: canonical.map(|c| c.2.jx_per_atom.abs()),
        });
    }
    emit(&a.common, |w| {
        writeln!(
            w,
            "E_per_N,beta_micro,beta_canonical,jz_micro,jz_canonical,jx_micro_plus,jx_laplace_eps"
        )?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.e,
                opt(r.beta_micro),
                opt(r.beta_canonical),
                opt(r.jz_micro),
                opt(r.jz_canonical),
                opt(r.jx_micro),
                opt(r.jx_laplace)
            )?;
        }
        Ok(())
    })?;

    let beta_dev = max_deviation(&rows, |r| {
        Some(((r.beta_micro? - r.beta_canonical?) / r.beta_canonical?).abs())
    });
    let jz_dev = max_deviation(&rows, |r| Some((r.jz_micro? - r.jz_canonical?).abs()));
    let jx_dev = max_deviation(&rows, |r| Some((r.jx_micro? - r.jx_laplace?).abs()));
    let mut summary = format!(
        "max_rel_beta_deviation={}\nmax_jz_deviation={}\nmax_jx_deviation={}\n",
        opt(beta_dev),
        opt(jz_dev),
        opt(jx_dev)
    );
    match critical_beta(&p) {
        Ok(cp) => summary.push_str(&cp.to_string()),
        Err(e) => summary.push_str(&format!("critical_point={e}\n")),
    }
    eprint!("{summary}");
    Ok(())
}

fn default_cache_dir() -> PathBuf {
    std::env::temp_dir().join("dicke-cache")
}

fn diag(a: &DiagArgs) -> Outcome {
    let p = params(&a.model, DEFAULT_DIAG_N)?;
    if !(a.bins > 0.0 && a.bins.is_finite()) {
        return Err(CliError::Config(format!("bins must be > 0 (got {})", a.bins)));
    }
    let cache = CacheDir::new(a.cache_dir.clone().unwrap_or_else(default_cache_dir))?;
    let start = Instant::now();
    let (spectra, cached) = diagonalize_all(&p, a.n_max, Some(&cache))?;
    let split = p.epsilon != 0.0;
    let histogram = histogram_observables(&spectra, p.n_atoms, a.bins, split)?;
    emit(&a.common, |w| histogram.write_csv(w))?;
    let ground = spectra
        .iter()
        .map(|s| s.eigenvalues[0])
        .fold(f64::INFINITY, f64::min);
    eprintln!("cached: {cached}");
    eprintln!("cache_dir={}", cache.root().display());
    eprintln!("ground_energy_per_atom={}", ground / p.n());
    eprintln!("elapsed_seconds={:.3}", start.elapsed().as_secs_f64());
    Ok(())
}

fn scaling(a: &ScalingArgs) -> Outcome {
    let p = params(&a.model, DEFAULT_N)?;
    let ladder = a.ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
    let defaults = PrecursorSearch::default();
    let search = PrecursorSearch {
        below: a.below.unwrap_or(defaults.below),
        step: a.step.unwrap_or(defaults.step),
        tolerance: defaults.tolerance,
        micro: a.nodes.micro_config(),
    };
    if !(search.below > 0.0 && search.step > 0.0 && search.step < search.below) {
        return Err(CliError::Config("scan needs 0 < step < below".into()));
    }
    let precursor = match a.observable {
        ObservableArg::Jz => Precursor::Jz,
        ObservableArg::Jx => Precursor::Jx {
            threshold: a.threshold,
        },
    };
    let report = scaling_analysis(&p, &ladder, precursor, &search)?;
    emit(&a.common, |w| report.write_csv(w))?;
    eprint!("{}", report.summary());
    if !report.monotone() {
        eprintln!("warning=precursor sequence not monotone in N (grid artifact)");
    }
    Ok(())
}
