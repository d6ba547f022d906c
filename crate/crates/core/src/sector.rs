//! Semiclassical microcanonical observables of a single `j`-sector
//! (`ω = ω₀ = 1`).
//!
//! In scaled variables the sector Hamiltonian is
//! `h = (Q² + P²)/2 + y + 2λ Q √(1−y²) cos φ` with `y = J_z/j` and
//! `λ = λ_eff`. Integrating out the photon pair `(Q, P)` leaves the condition
//! `cos² φ ≥ r(y) = (y − E/j) / (2λ²(1 − y²))`, whose measure in `φ` is
//! `4 acos √r`. Every observable below is a one-dimensional integral of that
//! measure between the classical turning points.

use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{DickeError, Result};
use crate::model::{effective_coupling, sector_ground_energy_over_j, ModelParams, SectorId};
use crate::numerics::{integrate_gk, Tolerance};

/// Which of the two disjoint wells (below `E_c^j`) the state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Integrand used for the one-well `⟨J_x⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JxWeight {
    /// `√(1−y²) · √(1−r)`: the exact `∫ cos φ dφ` over one well.
    #[default]
    Classical,
    /// `(1−y²) · acos √r`, the closed form as it appears in print. Kept for
    /// comparison; it underestimates the order parameter by up to ~0.017/atom.
    AsPublished,
}

/// Classical turning points in `y = J_z/j`, the roots of
/// `2λ²y² + y − E/j − 2λ² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub y_minus: f64,
    pub y_plus: f64,
}

/// Observables of one sector at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPoint {
    /// Density of states, plateau value `2j`.
    pub rho: f64,
    /// `⟨J_z⟩/j`; `None` where the energy is inaccessible.
    pub jz_over_j: Option<f64>,
    /// `⟨J_x⟩/j` in the `Plus` well; zero above `E_c^j`.
    pub jx_over_j: f64,
}

impl SectorPoint {
    const EMPTY: SectorPoint = SectorPoint {
        rho: 0.0,
        jz_over_j: None,
        jx_over_j: 0.0,
    };
}

/// A sector with (possibly non-integer) `j` and its effective coupling.
///
/// Non-integer `j` is what the continuum aggregation over `x = j/N` needs.
#[derive(Debug, Clone, Copy)]
pub struct SemiclassicalSector {
    j: f64,
    lambda: f64,
    weight: JxWeight,
    tol: Tolerance,
}

impl SemiclassicalSector {
    /// Sector `j` of the model `params`. Requires `ω = ω₀ = 1`.
    pub fn new(params: &ModelParams, sector: &SectorId) -> Result<Self> {
        params.require_unit_frequencies()?;
        let lambda = effective_coupling(params, sector)?;
        Ok(Self::continuous(sector.j(), lambda))
    }

    /// Sector with arbitrary `j ≥ 0` and effective coupling `lambda_eff`.
    pub fn continuous(j: f64, lambda_eff: f64) -> Self {
        SemiclassicalSector {
            j,
            lambda: lambda_eff,
            weight: JxWeight::default(),
            tol: Tolerance::default(),
        }
    }

    pub fn with_jx_weight(mut self, weight: JxWeight) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn lambda_eff(&self) -> f64 {
        self.lambda
    }

    /// Lowest classical energy `E_min` (absolute units).
    pub fn ground_energy(&self) -> f64 {
        self.j * sector_ground_energy_over_j(self.lambda)
    }

    pub fn turning_points(&self, energy: f64) -> Result<TurningPoints> {
        if !(self.lambda > 0.0) || !(self.j > 0.0) {
            return Err(DickeError::Domain(
                "turning points need lambda_eff > 0 and j > 0".into(),
            ));
        }
        let eps = energy / self.j;
        let l2 = self.lambda * self.lambda;
        let disc = 1.0 + 8.0 * l2 * eps + 16.0 * l2 * l2;
        if disc < 0.0 {
            return Err(DickeError::BelowGroundState {
                energy_over_j: eps,
                minimum_over_j: -(2.0 * l2 + 1.0 / (8.0 * l2)),
            });
        }
        let y_minus = (-1.0 - disc.sqrt()) / (4.0 * l2);
        // product of roots is −(ε + 2λ²)/(2λ²); avoids cancellation in y₊
        let y_plus = -(eps + 2.0 * l2) / (2.0 * l2 * y_minus);
        Ok(TurningPoints { y_minus, y_plus })
    }

    /// `ρ`, `⟨J_z⟩/j` and the one-well `⟨J_x⟩/j` from a single quadrature pass.
    pub fn observables(&self, energy: f64) -> SectorPoint {
        if !(self.j > 0.0) {
            return SectorPoint::EMPTY;
        }
        let eps = energy / self.j;
        if eps > 1.0 {
            return SectorPoint {
                rho: 2.0 * self.j,
                jz_over_j: Some(0.0),
                jx_over_j: 0.0,
            };
        }
        if self.lambda <= 0.0 {
            // uncoupled spin: every y ≤ ε is allowed for every φ
            if eps < -1.0 {
                return SectorPoint::EMPTY;
            }
            let rho_over_j = eps + 1.0;
            let jz = if rho_over_j > 0.0 {
                Some(0.5 * (eps * eps - 1.0) / rho_over_j)
            } else {
                Some(-1.0)
            };
            return SectorPoint {
                rho: self.j * rho_over_j,
                jz_over_j: jz,
                jx_over_j: 0.0,
            };
        }
        let tp = match self.turning_points(energy) {
            Ok(tp) => tp,
            Err(_) => return SectorPoint::EMPTY,
        };
        let (lower, base, base_jz) = if eps >= -1.0 {
            (eps, eps + 1.0, 0.5 * (eps * eps - 1.0))
        } else {
            if self.lambda <= 0.5 || tp.y_minus < -1.0 {
                return SectorPoint::EMPTY;
            }
            (tp.y_minus, 0.0, 0.0)
        };
        let upper = tp.y_plus.min(1.0);
        let [i_rho, i_jz, i_jx] = self.shell_integrals(eps, lower, upper);
        let rho_over_j = base + 2.0 / PI * i_rho;
        if !(rho_over_j > 0.0) {
            return SectorPoint::EMPTY;
        }
        let jz = ((base_jz + 2.0 / PI * i_jz) / rho_over_j).clamp(-1.0, 1.0);
        let jx = if eps < -1.0 && i_rho > 0.0 {
            (i_jx / i_rho).clamp(0.0, 1.0)
        } else {
            0.0
        };
        SectorPoint {
            rho: self.j * rho_over_j,
            jz_over_j: Some(jz),
            jx_over_j: jx,
        }
    }

    /// `∫ acos√r`, `∫ y acos√r` and the `J_x` weight over `[lower, upper]`.
    fn shell_integrals(&self, eps: f64, lower: f64, upper: f64) -> [f64; 3] {
        if !(upper > lower) {
            return [0.0; 3];
        }
        let two_l2 = 2.0 * self.lambda * self.lambda;
        let weight = self.weight;
        let half = 0.5 * (upper - lower);
        // y = lower + half (1 − cos t) flattens the √ endpoint behaviour
        let integrand = |t: f64| {
            let y = lower + half * (1.0 - t.cos());
            let jac = half * t.sin();
            let one_minus_y2 = (1.0 - y * y).max(0.0);
            let r = if one_minus_y2 > 0.0 {
                ((y - eps) / (two_l2 * one_minus_y2)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let ac = r.sqrt().acos();
            let jx = match weight {
                JxWeight::Classical => one_minus_y2.sqrt() * (1.0 - r).sqrt(),
                JxWeight::AsPublished => one_minus_y2 * ac,
            };
            [ac * jac, y * ac * jac, jx * jac]
        };
        integrate_gk(integrand, 0.0, PI, self.tol, 400).value
    }

    pub fn dos(&self, energy: f64) -> f64 {
        self.observables(energy).rho
    }

    pub fn jz_over_j(&self, energy: f64) -> Result<f64> {
        let p = self.observables(energy);
        p.jz_over_j.ok_or(DickeError::BelowGroundState {
            energy_over_j: energy / self.j,
            minimum_over_j: sector_ground_energy_over_j(self.lambda),
        })
    }

    pub fn jx_over_j(&self, energy: f64, branch: Branch) -> f64 {
        branch.sign() * self.observables(energy).jx_over_j
    }
}

/// Classical turning points of sector `sector` at energy `energy`.
pub fn turning_points(energy: f64, sector: &SectorId, params: &ModelParams) -> Result<TurningPoints> {
    SemiclassicalSector::new(params, sector)?.turning_points(energy)
}

/// Semiclassical density of states; zero below the classical minimum.
pub fn dos_sector(energy: f64, sector: &SectorId, params: &ModelParams) -> Result<f64> {
    Ok(SemiclassicalSector::new(params, sector)?.dos(energy))
}

/// `⟨J_z⟩/j` at energy `energy`.
pub fn jz_sector(energy: f64, sector: &SectorId, params: &ModelParams) -> Result<f64> {
    SemiclassicalSector::new(params, sector)?.jz_over_j(energy)
}

/// `⟨J_x⟩/j` for a state confined to one well.
pub fn jx_sector(energy: f64, sector: &SectorId, params: &ModelParams, branch: Branch) -> Result<f64> {
    Ok(SemiclassicalSector::new(params, sector)?.jx_over_j(energy, branch))
}

/// Tabulated sector observables over a grid of `E/j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorCurve {
    pub sector: SectorId,
    pub lambda_eff: f64,
    pub energies_over_j: Vec<f64>,
    pub rho: Vec<f64>,
    pub jz_over_j: Vec<Option<f64>>,
    pub jx_over_j: Vec<f64>,
    pub beta: Vec<Option<f64>>,
}

impl SectorCurve {
    /// Evaluates the sector on `energies_over_j` (strictly increasing).
    pub fn compute(
        params: &ModelParams,
        sector: &SectorId,
        energies_over_j: &[f64],
        weight: JxWeight,
    ) -> Result<Self> {
        if energies_over_j.is_empty() {
            return Err(DickeError::Domain("empty energy grid".into()));
        }
        if energies_over_j.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DickeError::Domain(
                "energy grid must be strictly increasing".into(),
            ));
        }
        if sector.twice_j() == 0 {
            return Err(DickeError::Domain(
                "sector j = 0 has no semiclassical curve".into(),
            ));
        }
        let model = SemiclassicalSector::new(params, sector)?.with_jx_weight(weight);
        let j = sector.j();
        let points: Vec<SectorPoint> = energies_over_j
            .par_iter()
            .map(|&e| model.observables(e * j))
            .collect();
        let mut curve = SectorCurve {
            sector: *sector,
            lambda_eff: model.lambda_eff(),
            energies_over_j: energies_over_j.to_vec(),
            rho: points.iter().map(|p| p.rho).collect(),
            jz_over_j: points.iter().map(|p| p.jz_over_j).collect(),
            jx_over_j: points.iter().map(|p| p.jx_over_j).collect(),
            beta: Vec::new(),
        };
        curve.beta = micro_beta_sector(&curve);
        Ok(curve)
    }

    /// Absolute energies `E = (E/j)·j`.
    pub fn energies(&self) -> Vec<f64> {
        let j = self.sector.j();
        self.energies_over_j.iter().map(|e| e * j).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "E_over_j,rho,jz_over_j,jx_plus_over_j,beta")?;
        for i in 0..self.energies_over_j.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                self.energies_over_j[i],
                self.rho[i],
                fmt_opt(self.jz_over_j[i]),
                self.jx_over_j[i],
                fmt_opt(self.beta[i]),
            )?;
        }
        Ok(())
    }
}

/// CSV cell: `nan` for missing values, and `-0` printed as `0`.
pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{}", x + 0.0),
        _ => "nan".to_string(),
    }
}

/// Finite-difference `β = ∂ log ρ/∂E` on a possibly non-uniform grid.
///
/// `log_rho` may contain `−∞`; a point whose stencil touches one is `None`.
pub fn log_derivative(energies: &[f64], log_rho: &[f64]) -> Vec<Option<f64>> {
    let n = energies.len();
    let finite = |i: usize| log_rho[i].is_finite();
    (0..n)
        .map(|i| {
            if n < 2 {
                return None;
            }
            let (lo, hi) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            if finite(lo) && finite(hi) && finite(i) {
                Some((log_rho[hi] - log_rho[lo]) / (energies[hi] - energies[lo]))
            } else {
                None
            }
        })
        .collect()
}

/// Microcanonical inverse temperature of a sector curve, per unit of absolute energy.
pub fn micro_beta_sector(curve: &SectorCurve) -> Vec<Option<f64>> {
    let log_rho: Vec<f64> = curve
        .rho
        .iter()
        .map(|&r| if r > 0.0 { r.ln() } else { f64::NEG_INFINITY })
        .collect();
    log_derivative(&curve.energies(), &log_rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LAMBDA: f64 = 1.5;

    fn jmax() -> (ModelParams, SectorId) {
        (
            ModelParams::resonant(LAMBDA, 100).unwrap(),
            SectorId::maximal(100).unwrap(),
        )
    }

    /// Independent oracle: roots of 2λ²y² + y − ε − 2λ² = 0 by the textbook formula.
    fn quadratic_roots(eps: f64, l: f64) -> (f64, f64) {
        let (a, b, c) = (2.0 * l * l, 1.0, -eps - 2.0 * l * l);
        let d = (b * b - 4.0 * a * c).max(0.0).sqrt();
        ((-b - d) / (2.0 * a), (-b + d) / (2.0 * a))
    }

    #[test]
    fn turning_points_at_ground_state() {
        let (p, s) = jmax();
        let e = -s.j() * (2.0 * LAMBDA * LAMBDA + 1.0 / (8.0 * LAMBDA * LAMBDA));
        let tp = turning_points(e, &s, &p).unwrap();
        let (om, op) = quadratic_roots(e / s.j(), LAMBDA);
        assert!((tp.y_minus - om).abs() < 1e-7 && (tp.y_plus - op).abs() < 1e-7);
        assert!((tp.y_minus + 0.111111).abs() < 1e-6);
        assert!((tp.y_plus + 0.111111).abs() < 1e-6);
    }

    #[test]
    fn turning_points_at_critical_and_star_energy() {
        let (p, s) = jmax();
        let tp = turning_points(-s.j(), &s, &p).unwrap();
        let (om, op) = quadratic_roots(-1.0, LAMBDA);
        assert!((tp.y_minus - om).abs() < 1e-14 && (tp.y_plus - op).abs() < 1e-14);
        assert!((tp.y_minus + 1.0).abs() < 1e-14);
        assert!((tp.y_plus - 0.777778).abs() < 1e-6);
        let tp = turning_points(s.j(), &s, &p).unwrap();
        assert!((tp.y_plus - 1.0).abs() < 1e-14);
    }

    #[test]
    fn turning_points_below_ground_is_error() {
        let (p, s) = jmax();
        match turning_points(-5.0 * s.j(), &s, &p) {
            Err(DickeError::BelowGroundState { minimum_over_j, .. }) => {
                assert!((minimum_over_j + 4.555_555_555_555_555).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn endpoint_identity_holds() {
        let (p, s) = jmax();
        for eps in [-4.5, -3.0, -1.0, -0.3, 0.0, 0.9] {
            let tp = turning_points(eps * s.j(), &s, &p).unwrap();
            for y in [tp.y_minus, tp.y_plus] {
                let lhs = y - eps;
                let rhs = 2.0 * LAMBDA * LAMBDA * (1.0 - y * y);
                assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "eps={eps}");
            }
        }
    }

    #[test]
    fn dos_plateau_and_zero_regions() {
        let (p, s) = jmax();
        assert_eq!(dos_sector(1.2 * s.j(), &s, &p).unwrap(), 2.0 * s.j());
        assert_eq!(dos_sector(-5.0 * s.j(), &s, &p).unwrap(), 0.0);
        let emin = -s.j() * (2.0 * LAMBDA * LAMBDA + 1.0 / (8.0 * LAMBDA * LAMBDA));
        assert!(dos_sector(emin, &s, &p).unwrap().abs() < 1e-9);
    }

    #[test]
    fn dos_continuous_at_star_energy() {
        let (p, s) = jmax();
        let j = s.j();
        // oracle: the middle branch just below E = j approaches 2j
        let below = dos_sector(j * (1.0 - 1e-6), &s, &p).unwrap();
        assert!((below - 2.0 * j).abs() < 1e-3 * j, "{below}");
        let at = dos_sector(j, &s, &p).unwrap();
        assert!((at - 2.0 * j).abs() < 1e-9 * j);
    }

    #[test]
    fn dos_continuous_at_regime_boundaries() {
        let (p, s) = jmax();
        let j = s.j();
        for e0 in [-j, j] {
            let mut last = f64::INFINITY;
            for delta in [1e-2, 1e-3, 1e-4, 1e-5] {
                let lo = dos_sector(e0 - delta * j, &s, &p).unwrap();
                let hi = dos_sector(e0 + delta * j, &s, &p).unwrap();
                let gap = (hi - lo).abs();
                assert!(gap < last);
                last = gap;
            }
            assert!(last < 1e-3 * j);
        }
    }

    #[test]
    fn jz_limits() {
        let (p, s) = jmax();
        let j = s.j();
        assert_eq!(jz_sector(1.5 * j, &s, &p).unwrap(), 0.0);
        let emin = -j * (2.0 * LAMBDA * LAMBDA + 1.0 / (8.0 * LAMBDA * LAMBDA));
        let jz = jz_sector(emin * (1.0 - 1e-8), &s, &p).unwrap();
        assert!((jz + 0.111111).abs() < 1e-5, "{jz}");
        assert!(jz_sector(-5.0 * j, &s, &p).is_err());
        // finite at the ESQPT
        let jz_c = jz_sector(-j, &s, &p).unwrap();
        assert!(jz_c.is_finite() && jz_c.abs() <= 1.0);
    }

    #[test]
    fn jx_limits_and_symmetry() {
        let (p, s) = jmax();
        let j = s.j();
        assert_eq!(jx_sector(-0.5 * j, &s, &p, Branch::Plus).unwrap(), 0.0);
        let emin = -j * (2.0 * LAMBDA * LAMBDA + 1.0 / (8.0 * LAMBDA * LAMBDA));
        let e = emin * (1.0 - 1e-8);
        let classical = jx_sector(e, &s, &p, Branch::Plus).unwrap();
        let y0 = 1.0 / (4.0 * LAMBDA * LAMBDA);
        assert!((classical - (1.0 - y0 * y0).sqrt()).abs() < 1e-4, "{classical}");
        let published = SemiclassicalSector::new(&p, &s)
            .unwrap()
            .with_jx_weight(JxWeight::AsPublished)
            .jx_over_j(e, Branch::Plus);
        assert!((published - 0.987654).abs() < 1e-4, "{published}");
        for eps in [-4.0, -2.5, -1.2, -0.5] {
            let plus = jx_sector(eps * j, &s, &p, Branch::Plus).unwrap();
            let minus = jx_sector(eps * j, &s, &p, Branch::Minus).unwrap();
            assert_eq!(plus, -minus);
        }
    }

    #[test]
    fn subcritical_sector_has_no_broken_region() {
        let p = ModelParams::resonant(0.4, 100).unwrap();
        let s = SectorId::maximal(100).unwrap();
        let j = s.j();
        assert_eq!(dos_sector(-1.1 * j, &s, &p).unwrap(), 0.0);
        assert!(dos_sector(-0.9 * j, &s, &p).unwrap() > 0.0);
        assert_eq!(jx_sector(-0.99 * j, &s, &p, Branch::Plus).unwrap(), 0.0);
    }

    #[test]
    fn requires_unit_frequencies() {
        let p = ModelParams::new(2.0, 1.0, 1.5, 100).unwrap();
        let s = SectorId::maximal(100).unwrap();
        assert!(matches!(
            dos_sector(0.0, &s, &p),
            Err(DickeError::NonUnitFrequencies { .. })
        ));
    }

    #[test]
    fn curve_and_beta() {
        let (p, s) = jmax();
        let grid: Vec<f64> = (0..=60).map(|i| -4.4 + i as f64 * 0.11).collect();
        let curve = SectorCurve::compute(&p, &s, &grid, JxWeight::Classical).unwrap();
        for (i, &e) in grid.iter().enumerate() {
            assert!(curve.rho[i] >= 0.0);
            if let Some(jz) = curve.jz_over_j[i] {
                assert!(jz.abs() <= 1.0);
            }
            assert!(curve.jx_over_j[i].abs() <= 1.0);
            if e > 1.0 + 0.11 {
                assert_eq!(curve.beta[i], Some(0.0));
            }
        }
        // β changes sign inside one sector (not monotone)
        let betas: Vec<f64> = curve.beta.iter().flatten().copied().collect();
        let rising = betas.windows(2).any(|w| w[1] > w[0] + 1e-9);
        let falling = betas.windows(2).any(|w| w[1] < w[0] - 1e-9);
        assert!(rising && falling);
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("E_over_j,rho,jz_over_j,jx_plus_over_j,beta\n"));
        assert_eq!(text.lines().count(), grid.len() + 1);
    }

    #[test]
    fn beta_missing_where_rho_vanishes() {
        let beta = log_derivative(&[0.0, 1.0, 2.0], &[f64::NEG_INFINITY, 0.0, 1.0]);
        assert_eq!(beta, vec![None, None, Some(1.0)]);
    }

    #[test]
    fn rejects_bad_grids() {
        let (p, s) = jmax();
        assert!(SectorCurve::compute(&p, &s, &[], JxWeight::Classical).is_err());
        assert!(SectorCurve::compute(&p, &s, &[0.0, 0.0], JxWeight::Classical).is_err());
    }

    proptest! {
        #[test]
        fn endpoint_identity_everywhere(lambda in 0.05f64..4.0, t in 0.0f64..1.0) {
            let l2 = lambda * lambda;
            let ground = sector_ground_energy_over_j(lambda);
            let eps = ground + t * (1.0 - ground);
            let tp = SemiclassicalSector::continuous(10.0, lambda).turning_points(10.0 * eps).unwrap();
            for y in [tp.y_minus, tp.y_plus] {
                if y.abs() < 1.0 - 1e-9 {
                    let r = (y - eps) / (2.0 * l2 * (1.0 - y * y));
                    prop_assert!((r - 1.0).abs() < 1e-9, "y={y} r={r}");
                }
            }
        }

        #[test]
        fn observables_bounded(lambda in 0.05f64..3.0, eps in -20.0f64..2.0) {
            let p = SemiclassicalSector::continuous(50.0, lambda).observables(50.0 * eps);
            prop_assert!(p.rho >= 0.0 && p.rho <= 100.0 * (1.0 + 1e-12));
            if let Some(jz) = p.jz_over_j {
                prop_assert!(jz.abs() <= 1.0);
            }
            prop_assert!((0.0..=1.0).contains(&p.jx_over_j));
            let model = SemiclassicalSector::continuous(50.0, lambda);
            prop_assert_eq!(model.jx_over_j(50.0 * eps, Branch::Plus), -model.jx_over_j(50.0 * eps, Branch::Minus));
        }
    }
}
