//! Canonical ensemble: finite-`N` partition functions, the thermodynamic-limit
//! saddle point, the gap equation and spontaneous parity breaking.
//!
//! With the field quadrature `x` treated classically, each spin sees the
//! effective field `(ω₀, 0, ε + 4λx/√N)` of magnitude `θ(x)`, so
//! `Z = (πβω)^{-1/2} ∫ e^{−βωx²} Z_spin(θ(x)) dx`. In the thermodynamic
//! limit `x = √N y` and `log Z / N → max_y Ψ(y)`.

use rayon::prelude::*;
use std::fmt;

use crate::error::{DickeError, Result};
use crate::micro::check_grid;
use crate::model::ModelParams;
use crate::numerics::{
    bisect, brent_minimize, central_derivative, gauss_legendre, ln_cosh, ln_sinh, log_sum_exp,
};
use crate::thermo::{Ensemble, ThermoCurve, ThermoPoint};

/// `log Z` is truncated where the integrand falls this far below its peak.
const LOG_CUTOFF: f64 = 60.0 * std::f64::consts::LN_10;
/// Step for derivatives of `log Z` in `ω₀`, and in `β` for `β ≥ 1` (relative below).
pub const DERIVATIVE_STEP: f64 = 1e-4;
const DERIVATIVE_TOL: f64 = 1e-4;

/// Which spins the finite-`N` partition function traces over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSpace {
    /// The single sector `j = N/2`.
    MaximalSector,
    /// All `2^N` states.
    Full,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(DickeError::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be finite and > 0",
        })
    }
}

/// Finite-`N` canonical partition function and its observables.
#[derive(Debug, Clone, Copy)]
pub struct FiniteCanonical {
    params: ModelParams,
    space: SpinSpace,
}

struct Integrand {
    beta: f64,
    n: f64,
    omega: f64,
    omega0: f64,
    field: f64,
    epsilon: f64,
    space: SpinSpace,
}

impl Integrand {
    fn new(p: &ModelParams, beta: f64, space: SpinSpace) -> Self {
        Integrand {
            beta,
            n: p.n(),
            omega: p.omega,
            omega0: p.omega0,
            field: 4.0 * p.lambda / p.n().sqrt(),
            epsilon: p.epsilon,
            space,
        }
    }

    fn theta(&self, x: f64) -> (f64, f64) {
        let u = self.epsilon + self.field * x;
        (self.omega0.hypot(u), u)
    }

    /// Log integrand (without constant prefactors).
    fn log_value(&self, x: f64) -> f64 {
        let (theta, _) = self.theta(x);
        let b = self.beta * theta;
        let spin = match self.space {
            SpinSpace::Full => self.n * ln_cosh(0.5 * b),
            SpinSpace::MaximalSector => ln_sinh(0.5 * (self.n + 1.0) * b) - ln_sinh(0.5 * b),
        };
        -self.beta * self.omega * x * x + spin
    }

    /// `⟨J_x⟩` of the spins at fixed `x`.
    fn jx(&self, x: f64) -> f64 {
        let (theta, u) = self.theta(x);
        let b = self.beta * theta;
        let polarization = match self.space {
            SpinSpace::Full => 0.5 * self.n * (0.5 * b).tanh(),
            SpinSpace::MaximalSector => {
                0.5 * (self.n + 1.0) / (0.5 * (self.n + 1.0) * b).tanh() - 0.5 / (0.5 * b).tanh()
            }
        };
        -polarization * u / theta
    }

    /// Half-width of the symmetric window holding all non-negligible weight.
    fn window(&self) -> f64 {
        let peak_bound =
            2.0 * self.field * self.n / (4.0 * self.omega) + self.epsilon.abs() / self.field.max(1e-300);
        let tail = ((LOG_CUTOFF + self.beta * self.n * self.epsilon) / (self.beta * self.omega)).sqrt();
        let range = (2.0 * peak_bound.min(1e12) + tail + 10.0).min(1e12);
        let samples = 4001;
        let xs: Vec<f64> = (0..samples)
            .map(|i| -range + 2.0 * range * i as f64 / (samples - 1) as f64)
            .collect();
        let f: Vec<f64> = xs.iter().map(|&x| self.log_value(x)).collect();
        let top = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let step = 2.0 * range / (samples - 1) as f64;
        let reach = xs
            .iter()
            .zip(&f)
            .filter(|(_, &v)| v > top - LOG_CUTOFF)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max);
        (reach + 2.0 * step).min(range)
    }
}

/// Mirrored Gauss–Legendre nodes on `[0, half_width]`.
fn half_line_nodes(half_width: f64, beta: f64, omega: f64) -> (Vec<f64>, Vec<f64>) {
    let width = (0.5 / (beta * omega).sqrt()).clamp(1e-3, 0.25);
    let panels = ((half_width / width).ceil() as usize).max(100);
    let (gx, gw) = gauss_legendre(10);
    let h = half_width / panels as f64;
    let mut xs = Vec::with_capacity(panels * 10);
    let mut ws = Vec::with_capacity(panels * 10);
    for p in 0..panels {
        let a = p as f64 * h;
        for (t, w) in gx.iter().zip(&gw) {
            xs.push(a + 0.5 * h * (t + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

struct Evaluation {
    log_z: f64,
    jx: f64,
}

impl FiniteCanonical {
    pub fn new(params: &ModelParams, space: SpinSpace) -> Result<Self> {
        params.validate()?;
        Ok(FiniteCanonical {
            params: *params,
            space,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn evaluate(&self, params: &ModelParams, beta: f64, with_jx: bool) -> Evaluation {
        let f = Integrand::new(params, beta, self.space);
        let (xs, ws) = half_line_nodes(f.window(), beta, params.omega);
        let mut logs = Vec::with_capacity(2 * xs.len());
        for (x, w) in xs.iter().zip(&ws) {
            let lw = w.ln();
            logs.push(lw + f.log_value(*x));
            logs.push(lw + f.log_value(-*x));
        }
        let log_integral = log_sum_exp(&logs);
        let mut prefactor = -0.5 * (std::f64::consts::PI * beta * params.omega).ln();
        if self.space == SpinSpace::Full {
            prefactor += params.n() * std::f64::consts::LN_2;
        }
        let jx = if with_jx {
            // mirrored pairs cancel exactly when ε = 0
            xs.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let pp = (logs[2 * i] - log_integral).exp();
                    let pm = (logs[2 * i + 1] - log_integral).exp();
                    pp * f.jx(x) + pm * f.jx(-x)
                })
                .sum()
        } else {
            0.0
        };
        Evaluation {
            log_z: prefactor + log_integral,
            jx,
        }
    }

    pub fn log_z(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self.evaluate(&self.params, beta, false).log_z)
    }

    fn log_z_at_omega0(&self, beta: f64, omega0: f64) -> Result<f64> {
        let mut p = self.params;
        p.omega0 = omega0;
        p.validate()?;
        Ok(self.evaluate(&p, beta, false).log_z)
    }

    /// `⟨E⟩ = −∂ log Z/∂β`.
    pub fn energy(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        let h = DERIVATIVE_STEP * beta.min(1.0);
        Ok(-central_derivative(|b| self.log_z(b), beta, h, DERIVATIVE_TOL)?)
    }

    /// `⟨J_z⟩ = −(1/β) ∂ log Z/∂ω₀`.
    pub fn jz(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        let w0 = self.params.omega0;
        let h = DERIVATIVE_STEP.min(0.5 * w0);
        let d = central_derivative(|w| self.log_z_at_omega0(beta, w), w0, h, DERIVATIVE_TOL)?;
        Ok(-d / beta)
    }

    /// `⟨J_x⟩` from the direct trace; exactly zero at `ε = 0`.
    pub fn jx(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self.evaluate(&self.params, beta, true).jx)
    }

    /// Per-atom observables on a grid of `β` values.
    pub fn curve(&self, betas: &[f64]) -> Result<ThermoCurve> {
        let n = self.params.n();
        let points: Result<Vec<ThermoPoint>> = betas
            .par_iter()
            .map(|&b| {
                let jx = self.jx(b)? / n;
                Ok(ThermoPoint {
                    e_per_atom: self.energy(b)? / n,
                    beta: Some(b),
                    jz_per_atom: Some(self.jz(b)? / n),
                    jx_plus_per_atom: Some(jx.abs()),
                    jx_minus_per_atom: Some(-jx.abs()),
                })
            })
            .collect();
        Ok(ThermoCurve::new(
            Ensemble::Canonical,
            Some(self.params.n_atoms),
            points?,
        ))
    }
}

/// `log Z` of the `j = N/2` sector.
pub fn partition_jmax(params: &ModelParams, beta: f64) -> Result<f64> {
    FiniteCanonical::new(params, SpinSpace::MaximalSector)?.log_z(beta)
}

/// `log Z` of the full `2^N`-dimensional atomic space.
pub fn partition_full(params: &ModelParams, beta: f64) -> Result<f64> {
    FiniteCanonical::new(params, SpinSpace::Full)?.log_z(beta)
}

/// `⟨E⟩(β)` for each `β` of the grid.
pub fn energy_canonical(params: &ModelParams, space: SpinSpace, betas: &[f64]) -> Result<Vec<f64>> {
    let c = FiniteCanonical::new(params, space)?;
    betas.par_iter().map(|&b| c.energy(b)).collect()
}

/// `⟨J_z⟩(β)` for each `β` of the grid.
pub fn jz_canonical(params: &ModelParams, space: SpinSpace, betas: &[f64]) -> Result<Vec<f64>> {
    let c = FiniteCanonical::new(params, space)?;
    betas.par_iter().map(|&b| c.jz(b)).collect()
}

/// `Ψ_ε(y) = −βωy² + log 2cosh[(β/2)√(ω₀² + (ε + 4λy)²)]`.
pub fn psi(y: f64, beta: f64, params: &ModelParams, epsilon: f64) -> f64 {
    let theta = params.omega0.hypot(epsilon + 4.0 * params.lambda * y);
    -beta * params.omega * y * y + std::f64::consts::LN_2 + ln_cosh(0.5 * beta * theta)
}

/// `(Ψ′, Ψ″)` at `y`.
pub fn psi_derivatives(y: f64, beta: f64, params: &ModelParams, epsilon: f64) -> (f64, f64) {
    let l4 = 4.0 * params.lambda;
    let u = epsilon + l4 * y;
    let theta = params.omega0.hypot(u);
    let t = (0.5 * beta * theta).tanh();
    let dtheta = l4 * u / theta;
    let d1 = -2.0 * beta * params.omega * y + 0.5 * beta * t * dtheta;
    let d2 = -2.0 * beta * params.omega
        + 0.25 * beta * beta * (1.0 - t * t) * dtheta * dtheta
        + 0.5 * beta * t * l4 * l4 * params.omega0 * params.omega0 / theta.powi(3);
    (d1, d2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleBranch {
    /// `y₀ = 0`.
    Trivial,
    /// `y₀ ≠ 0`; at `ε = 0` the mirror `−y₀` is an equal maximum.
    Broken,
}

/// Maximum of `Ψ_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceState {
    pub beta: f64,
    pub epsilon: f64,
    pub y0: f64,
    pub psi_value: f64,
    pub psi_second_derivative: f64,
    pub branch: SaddleBranch,
    /// `|Ψ″(y₀)| < 1e-10`: the saddle is flat and Gaussian corrections break down.
    pub critical: bool,
}

impl LaplaceState {
    /// Both maximizers; they coincide on the trivial branch.
    pub fn branches(&self) -> (f64, f64) {
        (self.y0, -self.y0)
    }
}

/// Global maximizer of `Ψ_ε` by a bracketing scan, Brent refinement and a
/// Newton polish on `Ψ′`. At `ε = 0` the non-negative representative is returned.
pub fn laplace_maximize(beta: f64, params: &ModelParams, epsilon: f64) -> Result<LaplaceState> {
    check_beta(beta)?;
    params.validate()?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(DickeError::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "must be finite and >= 0",
        });
    }
    let f = |y: f64| psi(y, beta, params, epsilon);
    // beyond |y| ~ λ/ω the quadratic term dominates
    let reach = 2.0 * params.lambda / params.omega + epsilon / (4.0 * params.lambda).max(1e-300) + 1.0;
    let lo = if epsilon == 0.0 { 0.0 } else { -reach.min(1e6) };
    let hi = reach.min(1e6);
    let samples = 4001;
    let step = (hi - lo) / (samples - 1) as f64;
    let mut best = (lo, f(lo));
    for i in 1..samples {
        let y = lo + i as f64 * step;
        let v = f(y);
        if v > best.1 {
            best = (y, v);
        }
    }
    let mut y = best.0;
    if !(epsilon == 0.0 && y == 0.0) {
        let a = (y - step).max(lo);
        let b = (y + step).min(hi);
        y = brent_minimize(|t| -f(t), a, b, 1e-14).0;
        for _ in 0..50 {
            let (d1, d2) = psi_derivatives(y, beta, params, epsilon);
            if d1.abs() < 1e-13 || d2 >= 0.0 {
                break;
            }
            let next = y - d1 / d2;
            if !next.is_finite() || (next - y).abs() > step {
                break;
            }
            y = next;
        }
    }
    if epsilon == 0.0 {
        // the maximum at y > 0 must beat the symmetric point
        let (_, d2_zero) = psi_derivatives(0.0, beta, params, 0.0);
        if d2_zero < 0.0 && f(y) <= f(0.0) {
            y = 0.0;
        }
    }
    let (_, d2) = psi_derivatives(y, beta, params, epsilon);
    Ok(LaplaceState {
        beta,
        epsilon,
        y0: y,
        psi_value: f(y),
        psi_second_derivative: d2,
        branch: if y == 0.0 {
            SaddleBranch::Trivial
        } else {
            SaddleBranch::Broken
        },
        critical: d2.abs() < 1e-10,
    })
}

/// Root `z > 1` of `tanh(βω₀z/2) = (ωω₀/4λ²) z`.
pub fn solve_gap_equation(beta: f64, params: &ModelParams) -> Result<f64> {
    check_beta(beta)?;
    params.validate()?;
    let lambda_c = params.critical_coupling();
    if params.lambda <= lambda_c {
        return Err(DickeError::NormalPhaseOnly {
            lambda: params.lambda,
            lambda_c,
        });
    }
    let kappa = params.omega * params.omega0 / (4.0 * params.lambda * params.lambda);
    let beta_c = 2.0 / params.omega0 * kappa.atanh();
    if beta <= beta_c {
        return Err(DickeError::NoNontrivialSolution { beta, beta_c });
    }
    let g = |z: f64| (0.5 * beta * params.omega0 * z).tanh() - kappa * z;
    bisect(g, 1.0, 1.0 / kappa, 1e-15)
}

/// `|y₀| = (ω₀/4λ) √(z² − 1)` from the gap equation; 0 in the normal phase.
pub fn gap_saddle(beta: f64, params: &ModelParams) -> Result<f64> {
    match solve_gap_equation(beta, params) {
        Ok(z) => Ok(params.omega0 / (4.0 * params.lambda) * (z * z - 1.0).max(0.0).sqrt()),
        Err(DickeError::NoNontrivialSolution { .. }) | Err(DickeError::NormalPhaseOnly { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// The thermal superradiant transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub beta_c: f64,
    pub e_c_per_atom: f64,
    pub jz_c_per_atom: f64,
}

impl fmt::Display for CriticalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "beta_c={}", self.beta_c)?;
        writeln!(f, "e_c_per_atom={}", self.e_c_per_atom)?;
        writeln!(f, "jz_c_per_atom={}", self.jz_c_per_atom)
    }
}

/// `β_c = (2/ω₀) atanh(ωω₀/4λ²)` with the energy and `J_z` at that point.
pub fn critical_beta(params: &ModelParams) -> Result<CriticalPoint> {
    params.validate()?;
    let lambda_c = params.critical_coupling();
    let lambda = params.lambda;
    if (lambda - lambda_c).abs() <= 1e-12 * lambda_c {
        return Err(DickeError::QptAtZeroTemperature { lambda_c });
    }
    if lambda < lambda_c {
        return Err(DickeError::NoThermalTransition { lambda, lambda_c });
    }
    let (w, w0) = (params.omega, params.omega0);
    let kappa = w * w0 / (4.0 * lambda * lambda);
    Ok(CriticalPoint {
        beta_c: 2.0 / w0 * kappa.atanh(),
        e_c_per_atom: -w * w0 * w0 / (8.0 * lambda * lambda),
        jz_c_per_atom: -w * w0 / (8.0 * lambda * lambda),
    })
}

/// How the symmetry-breaking field is handled by [`laplace_observables`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonMode {
    /// `ε = 0`: both saddles contribute equally and `J_x` averages to 0.
    Zero,
    /// `ε → 0⁺` after `N → ∞`: Richardson extrapolation from `ε = 1e-6, 1e-7, 1e-8`.
    LimitPlus,
}

/// Per-atom `(E, J_z, J_x)` in the thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceObservables {
    pub e_per_atom: f64,
    pub jz_per_atom: f64,
    pub jx_per_atom: f64,
}

fn envelope(state: &LaplaceState, params: &ModelParams) -> LaplaceObservables {
    let u = state.epsilon + 4.0 * params.lambda * state.y0;
    let theta = params.omega0.hypot(u);
    let t = (0.5 * state.beta * theta).tanh();
    LaplaceObservables {
        e_per_atom: params.omega * state.y0 * state.y0 - 0.5 * theta * t,
        jz_per_atom: -0.5 * t * params.omega0 / theta,
        jx_per_atom: -0.5 * t * u / theta,
    }
}

pub fn laplace_observables(beta: f64, params: &ModelParams, mode: EpsilonMode) -> Result<LaplaceObservables> {
    match mode {
        EpsilonMode::Zero => {
            let state = laplace_maximize(beta, params, 0.0)?;
            let mut obs = envelope(&state, params);
            obs.jx_per_atom = 0.0;
            Ok(obs)
        }
        EpsilonMode::LimitPlus => {
            let at = |eps: f64| -> Result<LaplaceObservables> {
                Ok(envelope(&laplace_maximize(beta, params, eps)?, params))
            };
            let (a, b, c) = (at(1e-6)?, at(1e-7)?, at(1e-8)?);
            let extrapolate = |fa: f64, fb: f64, fc: f64| {
                let r1 = (10.0 * fb - fa) / 9.0;
                let r2 = (10.0 * fc - fb) / 9.0;
                (100.0 * r2 - r1) / 99.0
            };
            Ok(LaplaceObservables {
                e_per_atom: extrapolate(a.e_per_atom, b.e_per_atom, c.e_per_atom),
                jz_per_atom: extrapolate(a.jz_per_atom, b.jz_per_atom, c.jz_per_atom),
                jx_per_atom: extrapolate(a.jx_per_atom, b.jx_per_atom, c.jx_per_atom),
            })
        }
    }
}

/// Lowest reachable `E/N`: the `β → ∞` limit of the Laplace energy.
pub fn laplace_ground_energy(params: &ModelParams) -> f64 {
    let (w, w0, l) = (params.omega, params.omega0, params.lambda);
    if l > params.critical_coupling() {
        -(l * l / w + w * w0 * w0 / (16.0 * l * l))
    } else {
        -0.5 * w0
    }
}

/// Inverse temperature whose Laplace energy is `E/N`; `E/N` must lie in
/// `(E_ground/N, 0)`.
pub fn laplace_beta_at_energy(e_per_atom: f64, params: &ModelParams) -> Result<f64> {
    let ground = laplace_ground_energy(params);
    if !(e_per_atom > ground && e_per_atom < 0.0) {
        return Err(DickeError::Domain(format!(
            "E/N = {e_per_atom} outside the canonical range ({ground}, 0)"
        )));
    }
    let energy = |b: f64| {
        laplace_observables(b, params, EpsilonMode::Zero)
            .map(|o| o.e_per_atom - e_per_atom)
            .unwrap_or(f64::NAN)
    };
    let mut hi = 1.0;
    while energy(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(DickeError::Analysis(format!("no β reaches E/N = {e_per_atom}")));
        }
    }
    let mut lo = hi;
    while energy(lo) < 0.0 {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(DickeError::Analysis(format!("no β reaches E/N = {e_per_atom}")));
        }
    }
    bisect(energy, lo, hi, 1e-15)
}

/// Thermodynamic-limit curve on a `β` grid, `J_x` from the `ε → 0⁺` limit.
pub fn laplace_curve(params: &ModelParams, betas: &[f64]) -> Result<ThermoCurve> {
    let mut sorted = betas.to_vec();
    sorted.sort_by(f64::total_cmp);
    check_grid(&sorted)?;
    let points: Result<Vec<ThermoPoint>> = sorted
        .par_iter()
        .map(|&b| {
            let zero = laplace_observables(b, params, EpsilonMode::Zero)?;
            let broken = laplace_observables(b, params, EpsilonMode::LimitPlus)?;
            Ok(ThermoPoint {
                e_per_atom: zero.e_per_atom,
                beta: Some(b),
                jz_per_atom: Some(zero.jz_per_atom),
                jx_plus_per_atom: Some(broken.jx_per_atom.abs()),
                jx_minus_per_atom: Some(-broken.jx_per_atom.abs()),
            })
        })
        .collect();
    Ok(ThermoCurve::new(Ensemble::Laplace, None, points?))
}
