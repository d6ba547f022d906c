//! Multiplicity of the spin-`j` multiplet in `N` spin-1/2 particles, exact
//! and continuum.

use num_bigint::BigUint;
use statrs::function::gamma::ln_gamma;

use crate::error::{DickeError, Result};
use crate::numerics::brent_minimize;

/// `g(N, j) = (1+2j)/(1+j+N/2) · C(N, N/2−j)`, exact.
pub fn degeneracy_exact(n_atoms: u64, twice_j: u64) -> Result<BigUint> {
    if twice_j > n_atoms || !(n_atoms - twice_j).is_multiple_of(2) {
        return Err(DickeError::InvalidSector { twice_j, n_atoms });
    }
    let k = (n_atoms - twice_j) / 2;
    let mut binom = BigUint::from(1u32);
    for i in 0..k {
        binom = binom * (n_atoms - i) / (i + 1);
    }
    let numer = binom * (twice_j + 1);
    let denom = BigUint::from(n_atoms - k + 1);
    let quotient = &numer / &denom;
    // the division is exact by representation theory
    assert!(
        &quotient * &denom == numer,
        "non-integer multiplicity for N={n_atoms}, 2j={twice_j}"
    );
    Ok(quotient)
}

/// Continuum `log g(N, x)` with `x = j/N`:
/// `ln(1+2Nx) + lnΓ(N+1) − lnΓ(1+N/2−Nx) − lnΓ(2+N/2+Nx)`.
pub fn log_degeneracy(n_atoms: f64, x: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&x) {
        return Err(DickeError::Domain(format!("x = {x} outside [0, 1/2]")));
    }
    Ok(log_degeneracy_unchecked(n_atoms, x))
}

pub(crate) fn log_degeneracy_unchecked(n: f64, x: f64) -> f64 {
    let nx = n * x;
    (2.0 * nx).ln_1p() + ln_gamma(n + 1.0) - ln_gamma(1.0 + n / 2.0 - nx) - ln_gamma(2.0 + n / 2.0 + nx)
}

/// Location of the maximum of `g(N, x)` on `[0, 1/2]`, close to
/// `1/(2√N) − 1/(2N)`.
pub fn degeneracy_argmax(n_atoms: f64) -> f64 {
    let guess = 0.5 / n_atoms.sqrt();
    let hi = (4.0 * guess).min(0.5);
    brent_minimize(|x| -log_degeneracy_unchecked(n_atoms, x), 0.0, hi, 1e-13).0
}

/// `log g(N, ·)` for a fixed `N` together with its maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyProfile {
    pub n_atoms: f64,
    pub x_max: f64,
    pub log_g_max: f64,
}

impl DegeneracyProfile {
    pub fn new(n_atoms: f64) -> Result<Self> {
        if !(n_atoms >= 2.0) {
            return Err(DickeError::InvalidParameter {
                name: "n_atoms",
                value: n_atoms,
                reason: "continuum degeneracy needs N >= 2",
            });
        }
        let x_max = degeneracy_argmax(n_atoms);
        Ok(DegeneracyProfile {
            n_atoms,
            x_max,
            log_g_max: log_degeneracy_unchecked(n_atoms, x_max),
        })
    }

    /// `log g(N, x)`; callers guarantee `x ∈ [0, 1/2]`.
    pub fn log_g(&self, x: f64) -> f64 {
        log_degeneracy_unchecked(self.n_atoms, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn to_f64(b: &BigUint) -> f64 {
        b.to_string().parse().unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(degeneracy_exact(2, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(degeneracy_exact(4, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(degeneracy_exact(4, 0).unwrap(), BigUint::from(2u32));
        for n in 1..40 {
            assert_eq!(degeneracy_exact(n, n).unwrap(), BigUint::from(1u32));
        }
        assert!(degeneracy_exact(4, 1).is_err());
    }

    #[test]
    fn sum_rule_even_n_to_30() {
        for n in (2..=30u64).step_by(2) {
            let total: BigUint = (0..=n)
                .step_by(2)
                .map(|tj| degeneracy_exact(n, tj).unwrap() * (tj + 1))
                .sum();
            assert_eq!(total, BigUint::from(1u32) << n as usize, "N={n}");
        }
    }

    #[test]
    fn continuum_matches_exact_log() {
        assert!((log_degeneracy(4.0, 0.25).unwrap() - 3f64.ln()).abs() < 1e-12);
        for n in 2..=60u64 {
            for tj in (n % 2..=n).step_by(2) {
                let exact = to_f64(&degeneracy_exact(n, tj).unwrap()).ln();
                let cont = log_degeneracy(n as f64, tj as f64 / 2.0 / n as f64).unwrap();
                assert!(
                    (exact - cont).abs() <= 1e-10 * exact.abs().max(1.0),
                    "N={n} 2j={tj}: {exact} vs {cont}"
                );
            }
        }
    }

    #[test]
    fn rejects_out_of_range_x() {
        assert!(log_degeneracy(10.0, -0.1).is_err());
        assert!(log_degeneracy(10.0, 0.51).is_err());
    }

    #[test]
    fn zero_x_asymptotics() {
        let mut last = f64::INFINITY;
        for n in [1e2, 1e3, 1e4, 1e5] {
            let approx = n * 2f64.ln() - 1.5 * n.ln() + (2f64.powf(1.5) / std::f64::consts::PI.sqrt()).ln();
            let gap = (log_degeneracy(n, 0.0).unwrap() - approx).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn argmax_asymptotics() {
        let n = 1e4;
        let x = degeneracy_argmax(n);
        assert!((x - 0.004950).abs() < 1e-4);
        assert!((n * x - (n.sqrt() / 2.0 - 0.5)).abs() < 0.1);
        let xs: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&n| degeneracy_argmax(n)).collect();
        assert!(xs[0] > xs[1] && xs[1] > xs[2]);
        let p = DegeneracyProfile::new(n).unwrap();
        let ratio = (p.log_g(0.0) - p.log_g_max).exp() * n.sqrt() / 0.5f64.exp();
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    proptest! {
        #[test]
        fn log_g_finite_on_domain(n in 2u64..200_000, x in 0.0f64..=0.5) {
            prop_assert!(log_degeneracy(n as f64, x).unwrap().is_finite());
        }

        #[test]
        fn argmax_is_a_maximum(n in 4u64..100_000, dx in 1e-4f64..0.1) {
            let n = n as f64;
            let p = DegeneracyProfile::new(n).unwrap();
            prop_assert!(p.log_g((p.x_max + dx).min(0.5)) <= p.log_g_max + 1e-9);
            prop_assert!(p.log_g((p.x_max - dx).max(0.0)) <= p.log_g_max + 1e-9);
        }
    }
}
