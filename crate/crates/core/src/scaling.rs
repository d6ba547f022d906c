//! Finite-size precursors of the thermal critical point and power-law fits.
//!
//! At finite `N` the microcanonical `J_z/N` has a shallow minimum and `J_x/N`
//! drops to zero slightly below the thermodynamic `E_c/N`. Their distances to
//! the canonical critical values shrink like `N^{−α}`.

use rayon::prelude::*;
use std::fmt;
use std::io::Write;

use crate::canonical::critical_beta;
use crate::error::{DickeError, Result};
use crate::micro::{FullMicro, MicroConfig};
use crate::model::ModelParams;
use crate::numerics::{bisect, brent_minimize};
use crate::sector::{fmt_opt, Branch};

/// Scan settings for locating precursors (energies per atom).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecursorSearch {
    /// Scans start this far below `E_c/N`; the `J_z` scan ends at `E/N = 0`.
    pub below: f64,
    pub step: f64,
    /// Refinement tolerance: `E/N` for `J_z`, residual of `J_x/N` for `J_x`.
    pub tolerance: f64,
    pub micro: MicroConfig,
}

impl Default for PrecursorSearch {
    fn default() -> Self {
        PrecursorSearch {
            below: 0.25,
            step: 1e-3,
            tolerance: 1e-8,
            micro: MicroConfig::default(),
        }
    }
}

fn reference_energy(params: &ModelParams) -> Result<f64> {
    Ok(critical_beta(params)?.e_c_per_atom)
}

fn scan_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// `(E/N, J_z/N)` at the minimum of the microcanonical `J_z/N` near `E_c`.
pub fn find_precursor_jz(params: &ModelParams, search: &PrecursorSearch) -> Result<(f64, f64)> {
    let ec = reference_energy(params)?;
    let model = FullMicro::new(params, search.micro)?;
    let grid = scan_grid(ec - search.below, -search.step, search.step);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&e| model.jz(e).unwrap_or(f64::NAN))
        .collect();
    let (k, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| DickeError::Analysis("J_z scan produced no values".into()))?;
    if k == 0 || k + 1 == grid.len() {
        return Err(DickeError::Analysis(format!(
            "dip vanished: J_z/N minimum sits at the scan edge E/N = {}",
            grid[k]
        )));
    }
    let objective = |e: f64| model.jz(e).unwrap_or(f64::INFINITY);
    Ok(brent_minimize(
        objective,
        grid[k - 1],
        grid[k + 1],
        search.tolerance,
    ))
}

/// Lowest `E/N` (scanning upward from below `E_c`) where `J_x/N` falls under `threshold`.
pub fn find_precursor_jx(params: &ModelParams, threshold: f64, search: &PrecursorSearch) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(DickeError::InvalidParameter {
            name: "threshold",
            value: threshold,
            reason: "must be > 0",
        });
    }
    let ec = reference_energy(params)?;
    let model = FullMicro::new(params, search.micro)?;
    let excess = |e: f64| model.jx(e, Branch::Plus).unwrap_or(0.0) - threshold;
    let grid = scan_grid(ec - search.below, ec + search.below.min(-ec), search.step);
    let values: Vec<f64> = grid.par_iter().map(|&e| excess(e)).collect();
    if values[0] < 0.0 {
        return Err(DickeError::Analysis(format!(
            "J_x/N is already below {threshold} at E/N = {}",
            grid[0]
        )));
    }
    let k = values
        .iter()
        .position(|&v| v < 0.0)
        .ok_or_else(|| DickeError::Analysis(format!("J_x/N never drops below {threshold}")))?;
    bisect(excess, grid[k - 1], grid[k], search.tolerance)
}

/// `δ = A N^{−α}` fitted by least squares on `(log N, log δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub amplitude: f64,
    /// Standard error of `α`; 0 for exactly collinear data or two points.
    pub stderr: f64,
    pub n_values: Vec<f64>,
    /// `log δ − fitted log δ`, per point.
    pub residuals: Vec<f64>,
    pub rms: f64,
}

impl fmt::Display for PowerLawFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alpha={}", self.alpha)?;
        writeln!(f, "stderr={}", self.stderr)?;
        writeln!(f, "rms={}", self.rms)
    }
}

pub fn fit_powerlaw(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(DickeError::Analysis(format!(
            "power-law fit needs >= 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, d)) = points.iter().find(|(n, d)| !(*d > 0.0) || !(*n > 0.0)) {
        return Err(DickeError::Analysis(format!(
            "non-positive value at N = {n}: delta = {d} (precursor crossed the asymptote)"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(DickeError::Analysis("all N values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    Ok(PowerLawFit {
        alpha: -slope,
        amplitude: intercept.exp(),
        stderr: (ssr / (m - 2.0) / sxx).sqrt(),
        n_values: points.iter().map(|p| p.0).collect(),
        rms: (ssr / m).sqrt(),
        residuals,
    })
}

/// Which precursor defines `E_c^{(N)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precursor {
    /// Minimum of `J_z/N`; also yields the `J_{z,c}` distance.
    Jz,
    /// `J_x/N` dropping below the threshold.
    Jx { threshold: f64 },
}

/// Distances to the canonical critical point at one `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub n_atoms: u64,
    pub e_precursor: f64,
    /// `E_c/N − E_c^{(N)}/N`.
    pub delta_e: f64,
    pub jz_min: Option<f64>,
    /// `J_{z,c}/N − min J_z/N`.
    pub delta_jz: Option<f64>,
}

/// Precursors over a ladder of `N` and the resulting fits.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub precursor: Precursor,
    pub points: Vec<ScalingPoint>,
    pub energy_fit: PowerLawFit,
    pub jz_fit: Option<PowerLawFit>,
}

impl ScalingReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n_atoms,delta_e,delta_jz")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.n_atoms, p.delta_e, fmt_opt(p.delta_jz))?;
        }
        Ok(())
    }

    /// `key=value` fit summaries; the `J_{z,c}` fit keys carry a `jz_` prefix.
    pub fn summary(&self) -> String {
        let mut s = self.energy_fit.to_string();
        if let Some(fit) = &self.jz_fit {
            for line in fit.to_string().lines() {
                s.push_str("jz_");
                s.push_str(line);
                s.push('\n');
            }
        }
        s
    }

    /// Whether `E_c^{(N)}` approaches `E_c` monotonically along the ladder.
    pub fn monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].delta_e < w[0].delta_e)
    }
}

/// Default ladder `{10³, 3·10³, 10⁴, 3·10⁴, 10⁵}`.
pub const DEFAULT_LADDER: [u64; 5] = [1_000, 3_000, 10_000, 30_000, 100_000];

pub fn scaling_analysis(
    params: &ModelParams,
    ladder: &[u64],
    precursor: Precursor,
    search: &PrecursorSearch,
) -> Result<ScalingReport> {
    let cp = critical_beta(params)?;
    let points: Result<Vec<ScalingPoint>> = ladder
        .par_iter()
        .map(|&n| {
            let p = params.with_n_atoms(n)?;
            match precursor {
                Precursor::Jz => {
                    let (e, jz) = find_precursor_jz(&p, search)?;
                    Ok(ScalingPoint {
                        n_atoms: n,
                        e_precursor: e,
                        delta_e: cp.e_c_per_atom - e,
                        jz_min: Some(jz),
                        delta_jz: Some(cp.jz_c_per_atom - jz),
                    })
                }
                Precursor::Jx { threshold } => {
                    let e = find_precursor_jx(&p, threshold, search)?;
                    Ok(ScalingPoint {
                        n_atoms: n,
                        e_precursor: e,
                        delta_e: cp.e_c_per_atom - e,
                        jz_min: None,
                        delta_jz: None,
                    })
                }
            }
        })
        .collect();
    let points = points?;
    let energy_fit = fit_powerlaw(
        &points
            .iter()
            .map(|p| (p.n_atoms as f64, p.delta_e))
            .collect::<Vec<_>>(),
    )?;
    let jz_fit = match precursor {
        Precursor::Jz => Some(fit_powerlaw(
            &points
                .iter()
                .map(|p| (p.n_atoms as f64, p.delta_jz.unwrap_or(f64::NAN)))
                .collect::<Vec<_>>(),
        )?),
        Precursor::Jx { .. } => None,
    };
    Ok(ScalingReport {
        precursor,
        points,
        energy_fit,
        jz_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [1e3f64, 3e3, 1e4, 3e4, 1e5]
            .iter()
            .map(|&n| (n, 3.0 * n.powf(-0.5)))
            .collect();
        let fit = fit_powerlaw(&pts).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-12);
        assert!((fit.amplitude - 3.0).abs() < 1e-10);
        assert!(fit.rms < 1e-12 && fit.stderr < 1e-12);
        let text = fit.to_string();
        let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
        assert_eq!(keys, ["alpha", "stderr", "rms"]);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_powerlaw(&[(1e3, 0.1), (1e4, 0.05)]).is_err());
        assert!(fit_powerlaw(&[(1e3, 0.1), (1e4, -0.05), (1e5, 0.01)]).is_err());
        assert!(fit_powerlaw(&[(1e3, 0.1), (1e4, 0.0), (1e5, 0.01)]).is_err());
    }

    #[test]
    fn noisy_fit_reports_uncertainty() {
        let pts = [(1e3, 0.1), (1e4, 0.04), (1e5, 0.009)];
        let fit = fit_powerlaw(&pts).unwrap();
        assert!(fit.stderr > 0.0 && fit.rms > 0.0);
        assert!((fit.residuals.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn precursors_at_small_n() {
        let p = ModelParams::resonant(1.5, 1000).unwrap();
        let search = PrecursorSearch::default();
        let ec = -1.0 / 18.0;
        let (e, jz) = find_precursor_jz(&p, &search).unwrap();
        assert!(e < ec && e > ec - 0.1, "{e}");
        assert!(jz < -1.0 / 18.0);
        let ex = find_precursor_jx(&p, 0.01, &search).unwrap();
        assert!(ex < ec && ex > ec - 0.1, "{ex}");
        // larger threshold is reached deeper in the broken phase
        let ex2 = find_precursor_jx(&p, 0.02, &search).unwrap();
        assert!(ex2 < ex);
        // halving the scan step barely moves the minimum
        let fine = PrecursorSearch { step: 5e-4, ..search };
        let (e_fine, _) = find_precursor_jz(&p, &fine).unwrap();
        assert!((e_fine - e).abs() < 1e-4);
    }

    #[test]
    fn precursor_guards() {
        let sub = ModelParams::resonant(0.4, 1000).unwrap();
        assert!(find_precursor_jz(&sub, &PrecursorSearch::default()).is_err());
        let p = ModelParams::resonant(1.5, 1000).unwrap();
        assert!(find_precursor_jx(&p, 10.0, &PrecursorSearch::default()).is_err());
        assert!(find_precursor_jx(&p, 0.0, &PrecursorSearch::default()).is_err());
    }

    proptest! {
        #[test]
        fn recovers_synthetic_exponents(alpha in 0.05f64..2.0, amp in 0.01f64..100.0) {
            let pts: Vec<(f64, f64)> = [1e2f64, 1e3, 1e4, 1e5].iter().map(|&n| (n, amp * n.powf(-alpha))).collect();
            let fit = fit_powerlaw(&pts).unwrap();
            prop_assert!((fit.alpha - alpha).abs() < 1e-12);
        }
    }
}
