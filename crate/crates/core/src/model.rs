//! Model parameters and per-sector derived quantities.
//!
//! The Hamiltonian is
//! `H = ω₀ J_z + ω a†a + (2λ/√N) J_x (a† + a) + ε J_x`,
//! block diagonal in the total angular momentum `j`. Inside a block the
//! coupling acts like `λ_eff = λ √(2j/N)` on a maximal-spin system of size
//! `2j`.

use crate::error::{DickeError, Result};

/// Physical couplings and system size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Photon frequency.
    pub omega: f64,
    /// Atomic splitting.
    pub omega0: f64,
    /// Atom-field coupling.
    pub lambda: f64,
    /// Number of two-level atoms `N`.
    pub n_atoms: u64,
    /// Strength of the `ε J_x` symmetry-breaking field.
    pub epsilon: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64, n_atoms: u64) -> Result<Self> {
        let p = ModelParams {
            omega,
            omega0,
            lambda,
            n_atoms,
            epsilon: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// The running example `ω = ω₀ = 1`, `λ = 1.5 = 3λ_c`.
    pub fn resonant(lambda: f64, n_atoms: u64) -> Result<Self> {
        Self::new(1.0, 1.0, lambda, n_atoms)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_atoms(mut self, n_atoms: u64) -> Result<Self> {
        self.n_atoms = n_atoms;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(DickeError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                })
            }
        };
        let non_negative = |name, value: f64| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(DickeError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and >= 0",
                })
            }
        };
        positive("omega", self.omega)?;
        positive("omega0", self.omega0)?;
        non_negative("lambda", self.lambda)?;
        non_negative("epsilon", self.epsilon)?;
        if self.n_atoms == 0 {
            return Err(DickeError::InvalidParameter {
                name: "n_atoms",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        Ok(())
    }

    /// The semiclassical sector integrals were derived for `ω = ω₀ = 1` only.
    pub fn require_unit_frequencies(&self) -> Result<()> {
        if (self.omega - 1.0).abs() > 1e-12 || (self.omega0 - 1.0).abs() > 1e-12 {
            return Err(DickeError::NonUnitFrequencies {
                omega: self.omega,
                omega0: self.omega0,
            });
        }
        Ok(())
    }

    /// Critical coupling of the maximal sector, `√(ωω₀)/2`.
    pub fn critical_coupling(&self) -> f64 {
        (self.omega * self.omega0).sqrt() / 2.0
    }

    pub fn n(&self) -> f64 {
        self.n_atoms as f64
    }
}

/// A total angular momentum sector `j` of an `N`-atom system.
///
/// Stored as `2j` so that half-integer sectors (odd `N`) are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorId {
    twice_j: u64,
    n_atoms: u64,
}

impl SectorId {
    pub fn new(n_atoms: u64, twice_j: u64) -> Result<Self> {
        if n_atoms == 0 || twice_j > n_atoms || !(n_atoms - twice_j).is_multiple_of(2) {
            return Err(DickeError::InvalidSector { twice_j, n_atoms });
        }
        Ok(SectorId { twice_j, n_atoms })
    }

    /// Sector from a real `j`; fails unless `2j` is an admissible integer.
    pub fn from_j(n_atoms: u64, j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice >= 0.0) || (twice - twice.round()).abs() > 1e-9 {
            return Err(DickeError::Domain(format!("j = {j} is not a multiple of 1/2")));
        }
        Self::new(n_atoms, twice.round() as u64)
    }

    /// The maximal sector `j = N/2`.
    pub fn maximal(n_atoms: u64) -> Result<Self> {
        Self::new(n_atoms, n_atoms)
    }

    /// The admissible sector closest to `j = fraction · N`.
    pub fn nearest_to_fraction(n_atoms: u64, fraction: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&fraction) {
            return Err(DickeError::Domain(format!(
                "j fraction {fraction} outside [0, 1/2]"
            )));
        }
        let target = 2.0 * fraction * n_atoms as f64;
        let parity = n_atoms % 2;
        // nearest integer with the parity of N
        let mut twice = ((target - parity as f64) / 2.0).round() as u64 * 2 + parity;
        if twice > n_atoms {
            twice = n_atoms;
        }
        Self::new(n_atoms, twice)
    }

    /// All sectors of `N` atoms, from the smallest `j` up to `N/2`.
    pub fn all(n_atoms: u64) -> impl Iterator<Item = SectorId> {
        (n_atoms % 2..=n_atoms)
            .step_by(2)
            .map(move |twice_j| SectorId { twice_j, n_atoms })
    }

    pub fn twice_j(&self) -> u64 {
        self.twice_j
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    /// Scaled momentum `x = j/N ∈ [0, 1/2]`.
    pub fn x(&self) -> f64 {
        self.j() / self.n_atoms as f64
    }

    pub fn multiplicity(&self) -> u64 {
        self.twice_j + 1
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        if self.n_atoms != params.n_atoms {
            return Err(DickeError::InvalidSector {
                twice_j: self.twice_j,
                n_atoms: params.n_atoms,
            });
        }
        Ok(())
    }
}

/// `λ_eff = λ √(2j/N)`.
pub fn effective_coupling(params: &ModelParams, sector: &SectorId) -> Result<f64> {
    sector.check(params)?;
    Ok(params.lambda * (2.0 * sector.x()).sqrt())
}

/// Coupling above which sector `j` shows an ESQPT, `√(Nωω₀/(8j))`.
pub fn critical_coupling_sector(params: &ModelParams, sector: &SectorId) -> Result<f64> {
    sector.check(params)?;
    if sector.twice_j == 0 {
        return Err(DickeError::NoEsqpt);
    }
    Ok((params.n() * params.omega * params.omega0 / (8.0 * sector.j())).sqrt())
}

/// `(E_c, E_*) = (−j, +j)` in units where `ω = ω₀ = 1`.
pub fn sector_critical_energies(sector: &SectorId) -> (f64, f64) {
    (-sector.j(), sector.j())
}

/// Ground energy per unit `j` of a sector with effective coupling `λ_eff`
/// (`ω = ω₀ = 1`): `−(2λ² + 1/(8λ²))` in the superradiant regime, `−1` otherwise.
pub fn sector_ground_energy_over_j(lambda_eff: f64) -> f64 {
    if lambda_eff > 0.5 {
        let l2 = lambda_eff * lambda_eff;
        -(2.0 * l2 + 1.0 / (8.0 * l2))
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: u64) -> ModelParams {
        ModelParams::resonant(1.5, n).unwrap()
    }

    #[test]
    fn effective_coupling_examples() {
        let p = params(100);
        let full = SectorId::maximal(100).unwrap();
        assert_eq!(effective_coupling(&p, &full).unwrap(), 1.5);
        let half = SectorId::new(100, 50).unwrap();
        assert!((effective_coupling(&p, &half).unwrap() - 1.060660).abs() < 1e-6);
        let zero = SectorId::new(100, 0).unwrap();
        assert_eq!(effective_coupling(&p, &zero).unwrap(), 0.0);
    }

    #[test]
    fn effective_coupling_rejects_foreign_sector() {
        let p = params(100);
        let s = SectorId::maximal(10).unwrap();
        assert!(effective_coupling(&p, &s).is_err());
    }

    #[test]
    fn critical_coupling_examples() {
        let p = params(100);
        let full = SectorId::maximal(100).unwrap();
        assert!((critical_coupling_sector(&p, &full).unwrap() - 0.5).abs() < 1e-15);
        let half = SectorId::new(100, 50).unwrap();
        assert!(
            (critical_coupling_sector(&p, &half).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
        );
        let zero = SectorId::new(100, 0).unwrap();
        assert_eq!(critical_coupling_sector(&p, &zero), Err(DickeError::NoEsqpt));
    }

    #[test]
    fn critical_energies_linear_in_j() {
        let full = SectorId::maximal(100).unwrap();
        assert_eq!(sector_critical_energies(&full), (-50.0, 50.0));
        let quarter = SectorId::new(100, 50).unwrap();
        assert_eq!(sector_critical_energies(&quarter), (-25.0, 25.0));
        let zero = SectorId::new(100, 0).unwrap();
        assert_eq!(sector_critical_energies(&zero), (0.0, 0.0));
    }

    #[test]
    fn supercritical_iff_above_sector_threshold() {
        let p = params(60);
        for s in SectorId::all(60).filter(|s| s.twice_j() > 0) {
            let eff = effective_coupling(&p, &s).unwrap();
            let crit = critical_coupling_sector(&p, &s).unwrap();
            assert_eq!(eff > p.critical_coupling(), p.lambda > crit, "sector {s:?}");
        }
    }

    #[test]
    fn half_integer_sectors_for_odd_n() {
        let sectors: Vec<_> = SectorId::all(5).map(|s| s.j()).collect();
        assert_eq!(sectors, vec![0.5, 1.5, 2.5]);
        assert!(SectorId::new(5, 2).is_err());
        assert!(SectorId::from_j(5, 1.5).is_ok());
        assert!(SectorId::from_j(5, 1.0).is_err());
    }

    #[test]
    fn nearest_fraction_respects_parity() {
        assert_eq!(SectorId::nearest_to_fraction(100, 0.5).unwrap().j(), 50.0);
        assert_eq!(SectorId::nearest_to_fraction(101, 0.1).unwrap().twice_j() % 2, 1);
        assert!(SectorId::nearest_to_fraction(100, 0.7).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 10).is_err());
        assert!(ModelParams::new(1.0, 1.0, -1.0, 10).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0).is_err());
        assert!(params(10).with_epsilon(-1e-6).is_err());
        assert!(ModelParams::new(2.0, 1.0, 1.0, 10)
            .unwrap()
            .require_unit_frequencies()
            .is_err());
    }

    #[test]
    fn ground_energy_continuous_at_threshold() {
        assert!((sector_ground_energy_over_j(0.5 + 1e-9) + 1.0).abs() < 1e-8);
        assert!((sector_ground_energy_over_j(1.5) + 4.555_555_555_555_555).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn sector_threshold_consistent(n in 2u64..5_000, frac in 0.0f64..=0.5, lambda in 0.01f64..4.0) {
            let p = ModelParams::resonant(lambda, n).unwrap();
            let s = SectorId::nearest_to_fraction(n, frac).unwrap();
            prop_assume!(s.twice_j() > 0);
            let eff = effective_coupling(&p, &s).unwrap();
            let crit = critical_coupling_sector(&p, &s).unwrap();
            // skip coin flips within rounding of the threshold
            prop_assume!((eff / p.critical_coupling() - 1.0).abs() > 1e-12);
            prop_assert_eq!(eff > p.critical_coupling(), lambda > crit);
        }

        #[test]
        fn critical_energies_double_with_j(b in 1u64..1_000, extra in 0u64..1_000) {
            // even N and even 2j so that both j and 2j are admissible
            let twice_j = 2 * b;
            let n = 2 * twice_j + 2 * extra;
            let small = sector_critical_energies(&SectorId::new(n, twice_j).unwrap());
            let large = sector_critical_energies(&SectorId::new(n, 2 * twice_j).unwrap());
            prop_assert!((large.0 - 2.0 * small.0).abs() < 1e-12 * large.0.abs().max(1.0));
            prop_assert!((large.1 - 2.0 * small.1).abs() < 1e-12 * large.1.abs().max(1.0));
        }
    }
}
