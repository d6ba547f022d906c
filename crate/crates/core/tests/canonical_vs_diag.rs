//! The `j = N/2` finite-N canonical energy against a thermal average over the
//! exact sector spectrum.

use dicke_core::diag::{diagonalize_sector, SectorBasis};
use dicke_core::{FiniteCanonical, ModelParams, SectorId, SpinSpace};

fn thermal_energy(levels: &[f64], beta: f64) -> f64 {
    let e0 = levels[0];
    let (z, ez) = levels.iter().fold((0.0, 0.0), |(z, ez), &e| {
        let w = (-beta * (e - e0)).exp();
        (z + w, ez + w * e)
    });
    ez / z
}

#[test]
fn maximal_sector_energy_tracks_exact_spectrum() {
    let n_atoms = 20;
    let n = n_atoms as f64;
    let params = ModelParams::resonant(1.5, n_atoms).unwrap();
    let basis = SectorBasis::new(SectorId::maximal(n_atoms).unwrap(), 120).unwrap();
    let spectrum = diagonalize_sector(&basis, &params).unwrap();
    let canonical = FiniteCanonical::new(&params, SpinSpace::MaximalSector).unwrap();
    // coupling 2λ/√N·(a + a†) enters the spin field as 4λx/√N; the weaker
    // 2λx/√N field is what λ/2 would give
    let weaker = FiniteCanonical::new(&params.with_lambda(0.75).unwrap(), SpinSpace::MaximalSector).unwrap();
    for beta in [0.2, 0.5, 1.0] {
        let exact = thermal_energy(&spectrum.eigenvalues, beta) / n;
        let ours = canonical.energy(beta).unwrap() / n;
        let other = weaker.energy(beta).unwrap() / n;
        assert!(
            ((ours - exact) / exact).abs() < 0.03,
            "beta={beta}: {ours} vs exact {exact}"
        );
        assert!((other - exact).abs() > 10.0 * (ours - exact).abs(), "beta={beta}");
    }
}
