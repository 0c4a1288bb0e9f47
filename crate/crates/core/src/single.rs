//! Closed-form scattering of one resonator in each geometry.
//!
//! With `D = iΔ + (external damping) + γ_a/2`:
//! hanger `S11 = S22 = -γ/D`, `S21 = S12 = 1 + S11`;
//! necklace `S11 = 1 - γ1/D`, `S22 = 1 - γ2/D`, `S21 = S12 = +√(γ1γ2)/D`;
//! bridge as necklace with `S21 = S12 = -√(γ1γ2)/D`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{check_rate, Coupling, FrequencyGrid, Method, SMatrix, SingleResonator, Spectrum};
use crate::C64;

/// Relative size below which a resonant denominator counts as zero.
pub const SINGULARITY_GUARD: f64 = 1e-30;

pub(crate) fn guarded(den: C64, scale: f64, what: &str) -> Result<C64> {
    if den.norm() <= SINGULARITY_GUARD * scale || !den.norm().is_finite() {
        Err(Error::Singular { omega_d: f64::NAN, detail: format!("{what} denominator vanishes") })
    } else {
        Ok(den)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("detuning must be finite, got {delta}")))
    }
}

pub fn s_hanger(delta: f64, gamma: f64, gamma_a: f64) -> Result<SMatrix> {
    check_delta(delta)?;
    check_rate("gamma", gamma)?;
    check_rate("gamma_a", gamma_a)?;
    let scale = delta.abs().max(gamma).max(gamma_a);
    let d = guarded(C64::new(gamma + gamma_a / 2.0, delta), scale, "hanger")?;
    let s11 = -gamma / d;
    let s21 = 1.0 + s11;
    Ok(SMatrix::new(s11, s21, s21, s11))
}

fn two_port(delta: f64, gamma1: f64, gamma2: f64, gamma_a: f64, sign: f64, what: &str) -> Result<SMatrix> {
    check_delta(delta)?;
    check_rate("gamma1", gamma1)?;
    check_rate("gamma2", gamma2)?;
    check_rate("gamma_a", gamma_a)?;
    let scale = delta.abs().max(gamma1).max(gamma2).max(gamma_a);
    let d = guarded(C64::new((gamma1 + gamma2 + gamma_a) / 2.0, delta), scale, what)?;
    let s21 = sign * (gamma1 * gamma2).sqrt() / d;
    Ok(SMatrix::new(1.0 - gamma1 / d, s21, s21, 1.0 - gamma2 / d))
}

pub fn s_necklace(delta: f64, gamma1: f64, gamma2: f64, gamma_a: f64) -> Result<SMatrix> {
    two_port(delta, gamma1, gamma2, gamma_a, 1.0, "necklace")
}

pub fn s_bridge(delta: f64, gamma1: f64, gamma2: f64, gamma_a: f64) -> Result<SMatrix> {
    two_port(delta, gamma1, gamma2, gamma_a, -1.0, "bridge")
}

/// Closed form for `res` driven at `omega_d`.
pub fn s_single(res: &SingleResonator, omega_d: f64) -> Result<SMatrix> {
    let delta = res.omega0 - omega_d;
    match res.coupling {
        Coupling::Hanger { gamma } => s_hanger(delta, gamma, res.gamma_a),
        Coupling::Necklace { gamma1, gamma2 } => s_necklace(delta, gamma1, gamma2, res.gamma_a),
        Coupling::Bridge { gamma1, gamma2 } => s_bridge(delta, gamma1, gamma2, res.gamma_a),
    }
    .map_err(|e| e.at(omega_d))
}

pub fn spectrum_single(res: &SingleResonator, grid: &FrequencyGrid) -> Result<Spectrum> {
    let matrices = sweep(grid, |w| s_single(res, w))?;
    Spectrum::new(grid.clone(), matrices, Method::ClosedForm)
}

/// Evaluates `f` at every grid point in parallel, keeping grid order and
/// reporting the first failure in grid order.
pub(crate) fn sweep<T: Send>(grid: &FrequencyGrid, f: impl Fn(f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    grid.points().par_iter().map(|&w| f(w)).collect()
}
