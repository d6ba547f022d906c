//! Full-model microcanonical observables.
//!
//! Sectors are aggregated in the continuum `x = j/N`:
//! `ρ(E, N) = ∫ g(N, x) ρ(E, Nx) dx`, and `J_z`, `J_x` are the
//! `g ρ`-weighted means of the sector values. Everything is carried in the
//! log domain since `g ~ 2^N`.

use rayon::prelude::*;

use crate::degeneracy::DegeneracyProfile;
use crate::error::{DickeError, Result};
use crate::model::ModelParams;
use crate::numerics::{bisect, gauss_legendre, log_sum_exp, softmax_mean};
use crate::sector::{log_derivative, Branch, JxWeight, SemiclassicalSector};
use crate::thermo::{Ensemble, ThermoCurve, ThermoPoint};

/// Quadrature layout in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroConfig {
    /// Geometric grading levels toward each end of every interval.
    pub panel_levels: usize,
    /// Gauss–Legendre points per panel (raised if needed to reach `min_nodes`).
    pub gauss_points: usize,
    pub min_nodes: usize,
    /// Support is cut where `log g` falls this far below its maximum.
    pub log_cutoff: f64,
    pub jx_weight: JxWeight,
}

impl Default for MicroConfig {
    fn default() -> Self {
        MicroConfig {
            panel_levels: 14,
            gauss_points: 10,
            min_nodes: 512,
            log_cutoff: 60.0,
            jx_weight: JxWeight::Classical,
        }
    }
}

impl MicroConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_nodes < 512 {
            return Err(DickeError::InvalidParameter {
                name: "min_nodes",
                value: self.min_nodes as f64,
                reason: "must be >= 512",
            });
        }
        if self.gauss_points == 0 {
            return Err(DickeError::InvalidParameter {
                name: "gauss_points",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        if !(self.log_cutoff > 0.0) {
            return Err(DickeError::InvalidParameter {
                name: "log_cutoff",
                value: self.log_cutoff,
                reason: "must be > 0",
            });
        }
        Ok(())
    }
}

/// Full-model observables at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroPoint {
    /// `log ρ(E, N)`; `−∞` when no sector reaches `E`.
    pub log_rho: f64,
    pub jz_per_atom: Option<f64>,
    /// `J_x/N` with every sector in its `Plus` well.
    pub jx_per_atom: Option<f64>,
}

/// The `N`-atom model prepared for microcanonical evaluation.
#[derive(Debug, Clone)]
pub struct FullMicro {
    params: ModelParams,
    profile: DegeneracyProfile,
    config: MicroConfig,
    rule: (Vec<f64>, Vec<f64>),
}

impl FullMicro {
    pub fn new(params: &ModelParams, config: MicroConfig) -> Result<Self> {
        params.require_unit_frequencies()?;
        config.validate()?;
        let profile = DegeneracyProfile::new(params.n())?;
        Ok(FullMicro {
            params: *params,
            profile,
            config,
            rule: gauss_legendre(config.gauss_points),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn profile(&self) -> &DegeneracyProfile {
        &self.profile
    }

    /// Scaled momentum above which sectors are superradiant, `1/(8λ²)`.
    fn x_critical(&self) -> f64 {
        let l = self.params.lambda;
        if l > 0.0 {
            1.0 / (8.0 * l * l)
        } else {
            f64::INFINITY
        }
    }

    /// Smallest `x` whose sector ground energy lies at or below `E/N`.
    pub fn support_lower_bound(&self, e_per_atom: f64) -> f64 {
        lowest_sector(e_per_atom, self.params.lambda)
    }

    /// Quadrature nodes and log-weights in `x`, or `None` for empty support.
    pub fn nodes(&self, e_per_atom: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let lo = self.support_lower_bound(e_per_atom);
        if !(lo < 0.5) {
            return None;
        }
        let p = &self.profile;
        let start = lo.max(p.x_max);
        let top = p.log_g(start);
        let floor = top - self.config.log_cutoff;
        let hi = if p.log_g(0.5) >= floor {
            0.5
        } else {
            bisect(|x| p.log_g(x) - floor, start, 0.5, 1e-9).unwrap_or(0.5)
        };
        let mut breaks = vec![lo, hi];
        for b in [e_per_atom.abs(), self.x_critical(), p.x_max] {
            if b > lo && b < hi {
                breaks.push(b);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let mut panels = Vec::new();
        for w in breaks.windows(2) {
            graded_panels(w[0], w[1], self.config.panel_levels, &mut panels);
        }
        let needed = self.config.min_nodes.div_ceil(panels.len().max(1));
        let owned;
        let (gx, gw) = if needed > self.rule.0.len() {
            owned = gauss_legendre(needed);
            (&owned.0, &owned.1)
        } else {
            (&self.rule.0, &self.rule.1)
        };
        let mut xs = Vec::with_capacity(panels.len() * gx.len());
        let mut lw = Vec::with_capacity(xs.capacity());
        for (a, b) in panels {
            let half = 0.5 * (b - a);
            for (t, w) in gx.iter().zip(gw) {
                xs.push(a + half * (t + 1.0));
                lw.push((half * w).ln());
            }
        }
        Some((xs, lw))
    }

    pub fn evaluate(&self, e_per_atom: f64) -> MicroPoint {
        let empty = MicroPoint {
            log_rho: f64::NEG_INFINITY,
            jz_per_atom: None,
            jx_per_atom: None,
        };
        let Some((xs, log_w)) = self.nodes(e_per_atom) else {
            return empty;
        };
        let n = self.params.n();
        let energy = e_per_atom * n;
        let lambda = self.params.lambda;
        let weight = self.config.jx_weight;
        let terms: Vec<(f64, f64, f64)> = xs
            .par_iter()
            .zip(log_w.par_iter())
            .map(|(&x, &lw)| {
                let sector =
                    SemiclassicalSector::continuous(n * x, lambda * (2.0 * x).sqrt()).with_jx_weight(weight);
                let pt = sector.observables(energy);
                match pt.jz_over_j {
                    Some(jz) if pt.rho > 0.0 => {
                        (lw + self.profile.log_g(x) + pt.rho.ln(), x * jz, x * pt.jx_over_j)
                    }
                    _ => (f64::NEG_INFINITY, 0.0, 0.0),
                }
            })
            .collect();
        let logs: Vec<f64> = terms.iter().map(|t| t.0).collect();
        let jz: Vec<f64> = terms.iter().map(|t| t.1).collect();
        let jx: Vec<f64> = terms.iter().map(|t| t.2).collect();
        let log_rho = log_sum_exp(&logs);
        if log_rho == f64::NEG_INFINITY {
            return empty;
        }
        MicroPoint {
            log_rho,
            jz_per_atom: softmax_mean(&logs, &jz),
            jx_per_atom: softmax_mean(&logs, &jx),
        }
    }

    pub fn log_dos(&self, e_per_atom: f64) -> f64 {
        self.evaluate(e_per_atom).log_rho
    }

    pub fn jz(&self, e_per_atom: f64) -> Result<f64> {
        self.evaluate(e_per_atom)
            .jz_per_atom
            .ok_or_else(|| empty_support(e_per_atom))
    }

    pub fn jx(&self, e_per_atom: f64, branch: Branch) -> Result<f64> {
        self.evaluate(e_per_atom)
            .jx_per_atom
            .map(|v| branch.sign() * v)
            .ok_or_else(|| empty_support(e_per_atom))
    }

    /// `β = ∂ log ρ/∂E` by a central difference of half-width `h` in `E/N`.
    pub fn beta(&self, e_per_atom: f64, h: f64) -> Result<f64> {
        let up = self.log_dos(e_per_atom + h);
        let down = self.log_dos(e_per_atom - h);
        if !(up.is_finite() && down.is_finite()) {
            return Err(empty_support(e_per_atom - h));
        }
        Ok((up - down) / (2.0 * h * self.params.n()))
    }

    /// Evaluates a strictly increasing `E/N` grid. `β` comes from finite
    /// differences on the grid itself.
    pub fn curve(&self, grid: &[f64]) -> Result<ThermoCurve> {
        check_grid(grid)?;
        let pts: Vec<MicroPoint> = grid.par_iter().map(|&e| self.evaluate(e)).collect();
        let logs: Vec<f64> = pts.iter().map(|p| p.log_rho).collect();
        let energies: Vec<f64> = grid.iter().map(|e| e * self.params.n()).collect();
        let betas = log_derivative(&energies, &logs);
        let points = grid
            .iter()
            .zip(&pts)
            .zip(betas)
            .map(|((&e, p), beta)| ThermoPoint {
                e_per_atom: e,
                beta,
                jz_per_atom: p.jz_per_atom,
                jx_plus_per_atom: p.jx_per_atom,
                jx_minus_per_atom: p.jx_per_atom.map(|v| -v),
            })
            .collect();
        Ok(ThermoCurve::new(
            Ensemble::Micro,
            Some(self.params.n_atoms),
            points,
        ))
    }
}

fn empty_support(e_per_atom: f64) -> DickeError {
    DickeError::Domain(format!("no sector reaches E/N = {e_per_atom}"))
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(DickeError::Domain("empty grid".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DickeError::Domain(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Panels on `[a, b]` refined geometrically toward both ends.
fn graded_panels(a: f64, b: f64, levels: usize, out: &mut Vec<(f64, f64)>) {
    if !(b > a) {
        return;
    }
    let half = 0.5 * (b - a);
    let mut pts = vec![a];
    for k in (0..=levels).rev() {
        pts.push(a + half * 0.5f64.powi(k as i32));
    }
    for k in 1..=levels {
        pts.push(b - half * 0.5f64.powi(k as i32));
    }
    pts.push(b);
    for w in pts.windows(2) {
        if w[1] > w[0] {
            out.push((w[0], w[1]));
        }
    }
}

/// `x = j/N` of the lowest sector whose ground energy is `≤ E/N`.
///
/// Sector ground energies per atom are `−x` below `x_c = 1/(8λ²)` and
/// `−(4λ²x² + 1/(16λ²))` above.
pub fn lowest_sector(e_per_atom: f64, lambda: f64) -> f64 {
    if e_per_atom >= 0.0 {
        return 0.0;
    }
    let xc = if lambda > 0.0 {
        1.0 / (8.0 * lambda * lambda)
    } else {
        f64::INFINITY
    };
    if e_per_atom >= -xc {
        -e_per_atom
    } else {
        let l2 = lambda * lambda;
        ((-e_per_atom - 1.0 / (16.0 * l2)) / (4.0 * l2)).sqrt()
    }
}

/// Comparison mode: the ground-state observables of the lowest sector reachable
/// at `E/N`, a first-order description of the thermodynamic limit. Returns
/// `(J_z/N, J_x/N)` with `J_x` in the `Plus` well.
pub fn lowest_sector_observables(e_per_atom: f64, params: &ModelParams) -> Result<(f64, f64)> {
    params.require_unit_frequencies()?;
    let x = lowest_sector(e_per_atom, params.lambda);
    if x > 0.5 {
        return Err(empty_support(e_per_atom));
    }
    let lambda_eff = params.lambda * (2.0 * x).sqrt();
    if lambda_eff > 0.5 {
        let y = -1.0 / (4.0 * lambda_eff * lambda_eff);
        Ok((x * y, x * (1.0 - y * y).sqrt()))
    } else {
        Ok((-x, 0.0))
    }
}

/// `log ρ(E, N)` at energy per atom `E/N`; `−∞` when the support is empty.
pub fn dos_full(e_per_atom: f64, params: &ModelParams) -> Result<f64> {
    Ok(FullMicro::new(params, MicroConfig::default())?.log_dos(e_per_atom))
}

/// `J_z/N` at energy per atom `E/N`.
pub fn jz_full(e_per_atom: f64, params: &ModelParams) -> Result<f64> {
    FullMicro::new(params, MicroConfig::default())?.jz(e_per_atom)
}

/// `J_x/N` at energy per atom `E/N`, all sectors in the `branch` well.
pub fn jx_full(e_per_atom: f64, params: &ModelParams, branch: Branch) -> Result<f64> {
    FullMicro::new(params, MicroConfig::default())?.jx(e_per_atom, branch)
}

/// `β(E)` on a strictly increasing `E/N` grid.
pub fn micro_beta_full(grid: &[f64], params: &ModelParams) -> Result<Vec<Option<f64>>> {
    let curve = FullMicro::new(params, MicroConfig::default())?.curve(grid)?;
    Ok(curve.points.iter().map(|p| p.beta).collect())
}
