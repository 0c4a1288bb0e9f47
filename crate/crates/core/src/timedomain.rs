//! Time-domain oracle: integrates the coupled-mode equations under a constant
//! coherent drive until the amplitudes stop changing, then reads off the
//! S-matrix from the output maps.
//!
//! The drift, drive and output maps are copied out of the same equation table
//! the frequency-domain solvers use. Integration happens in the frame rotating
//! at the drive frequency, where the steady state is a fixed point.

use nalgebra::{DMatrix, DVector, Schur};
use rayon::prelude::*;

use crate::equations::{CoupledModeEquations, HangerChainEquations, NecklaceChainEquations, Port, SingleEquations};
use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::model::{FrequencyGrid, HangerChain, Method, NecklaceChain, SMatrix, SingleResonator, Spectrum};
use crate::C64;

/// Any system with site-basis equations.
#[derive(Debug, Clone, Copy)]
pub enum System<'a> {
    Single(&'a SingleResonator),
    HangerChain(&'a HangerChain),
    NecklaceChain(&'a NecklaceChain),
}

impl<'a> From<&'a SingleResonator> for System<'a> {
    fn from(r: &'a SingleResonator) -> Self {
        System::Single(r)
    }
}

impl<'a> From<&'a HangerChain> for System<'a> {
    fn from(c: &'a HangerChain) -> Self {
        System::HangerChain(c)
    }
}

impl<'a> From<&'a NecklaceChain> for System<'a> {
    fn from(c: &'a NecklaceChain) -> Self {
        System::NecklaceChain(c)
    }
}

/// `da/dt = drift a + drive[p]` for unit input at port `p`;
/// `out[q] = passthrough[q][p] + output[q] . a`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSystem {
    pub dim: usize,
    pub drift: DMatrix<C64>,
    pub drive: [DVector<C64>; 2],
    pub output: [DVector<C64>; 2],
    pub passthrough: [[C64; 2]; 2],
    /// Drift eigenvalues; empty if the Schur iteration did not converge.
    pub eigenvalues: Vec<C64>,
    pub warnings: Vec<String>,
}

impl MeanFieldSystem {
    pub fn from_equations(eq: &impl CoupledModeEquations) -> Self {
        let dim = eq.dim();
        let drift = DMatrix::from_fn(dim, dim, |r, c| eq.drift(r, c));
        let pass = |o: Port| Port::BOTH.map(|i| eq.passthrough(o, i));
        let mut sys = Self {
            dim,
            drive: Port::BOTH.map(|p| DVector::from_vec(eq.input_vector(p))),
            output: Port::BOTH.map(|p| DVector::from_vec(eq.output_vector(p))),
            passthrough: [pass(Port::One), pass(Port::Two)],
            eigenvalues: Vec::new(),
            warnings: Vec::new(),
            drift,
        };
        match Schur::try_new(sys.drift.clone(), f64::EPSILON, 1000 * dim.max(1)) {
            Some(schur) => sys.eigenvalues = schur.unpack().1.diagonal().iter().copied().collect(),
            None => sys.warnings.push("drift eigenvalues did not converge; stability unknown".into()),
        }
        if let Some(l) = sys.eigenvalues.iter().find(|l| l.re >= 0.0) {
            sys.warnings.push(format!(
                "drift has an undamped mode (eigenvalue {:e}{:+e}i); a steady state may not exist",
                l.re, l.im
            ));
        }
        sys
    }

    /// Slowest decay rate `min_k -Re λ_k`; `None` unless every mode decays.
    pub fn slowest_decay(&self) -> Option<f64> {
        if self.eigenvalues.is_empty() {
            return None;
        }
        let k = self.eigenvalues.iter().map(|l| -l.re).fold(f64::INFINITY, f64::min);
        (k > 0.0).then_some(k)
    }

    pub fn is_stable(&self) -> bool {
        self.slowest_decay().is_some()
    }

    /// Largest eigenvalue modulus, or the largest drift entry if eigenvalues are unknown.
    fn fastest_rate(&self) -> f64 {
        let from_eig = self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
        if from_eig > 0.0 {
            from_eig
        } else {
            self.drift.iter().map(|z| z.norm()).fold(0.0, f64::max)
        }
    }

    fn derivative(&self, a: &DVector<C64>, port: Port) -> DVector<C64> {
        &self.drift * a + &self.drive[port.index()]
    }

    /// Assembles the S-matrix from steady amplitudes for each driven port.
    pub fn scattering(&self, steady: [&DVector<C64>; 2]) -> SMatrix {
        let s =
            |o: Port, i: Port| self.passthrough[o.index()][i.index()] + self.output[o.index()].dot(steady[i.index()]);
        SMatrix::new(s(Port::One, Port::One), s(Port::Two, Port::One), s(Port::One, Port::Two), s(Port::Two, Port::Two))
    }
}

pub fn build_mean_field(system: System<'_>, omega_d: f64) -> Result<MeanFieldSystem> {
    Ok(match system {
        System::Single(r) => MeanFieldSystem::from_equations(&SingleEquations::new(r, omega_d)),
        System::HangerChain(c) => MeanFieldSystem::from_equations(&HangerChainEquations::new(c, omega_d)),
        System::NecklaceChain(c) => {
            let eq = NecklaceChainEquations::new(c, omega_d)
                .ok_or_else(|| Error::Usage("a ring has no site-basis equations to integrate".into()))?;
            MeanFieldSystem::from_equations(&eq)
        }
    })
}

/// `tol` bounds `|da/dt| / (|a| κ_min)` with `κ_min` the slowest decay rate,
/// i.e. the relative change per slowest decay time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub dt: f64,
    pub t_end: f64,
    pub tol: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

impl IntegrationSettings {
    pub fn new(dt: f64, t_end: f64, tol: f64) -> Result<Self> {
        if !(dt > 0.0 && t_end > dt && tol > 0.0 && t_end.is_finite()) {
            return Err(Error::Domain(format!(
                "integration settings need dt > 0, t_end > dt, tol > 0 (got dt={dt}, t_end={t_end}, tol={tol})"
            )));
        }
        Ok(Self { dt, t_end, tol })
    }

    /// `dt = 0.01/(fastest rate)`, `t_end = 50/(slowest nonzero damping)`.
    pub fn for_system(sys: &MeanFieldSystem) -> Self {
        let fast = sys.fastest_rate();
        let fast = if fast > 0.0 { fast } else { 1.0 };
        let slow = sys.eigenvalues.iter().map(|l| -l.re).filter(|&k| k > 0.0).fold(f64::INFINITY, f64::min);
        let slow = if slow.is_finite() { slow } else { fast };
        Self { dt: 0.01 / fast, t_end: (50.0 / slow).max(2.0 * 0.01 / fast), tol: DEFAULT_TOLERANCE }
    }
}

/// Settled amplitudes and how they were reached.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub amplitudes: DVector<C64>,
    pub time: f64,
    pub residual: f64,
    pub steps: usize,
}

const MAX_STEPS: usize = 20_000_000;
const RTOL: f64 = 1e-7;
const MAX_STEP_RATE: f64 = 0.5;

// Dormand-Prince 5(4) tableau.
const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn residual(rate: &DVector<C64>, a: &DVector<C64>, kappa: f64) -> f64 {
    let (num, den) = (rate.norm(), a.norm() * kappa);
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Integrates from `a = 0` with unit drive at `port` until the residual drops below `tol`.
pub fn integrate_to_steady(sys: &MeanFieldSystem, port: Port, settings: &IntegrationSettings) -> Result<SteadyState> {
    let drive = &sys.drive[port.index()];
    let mut a = DVector::zeros(sys.dim);
    if drive.norm() == 0.0 && sys.is_stable() {
        return Ok(SteadyState { amplitudes: a, time: 0.0, residual: 0.0, steps: 0 });
    }
    let kappa = sys.slowest_decay();
    let kappa_ref = kappa.unwrap_or_else(|| sys.fastest_rate().max(f64::MIN_POSITIVE));
    let a_scale = drive.norm() / sys.fastest_rate().max(f64::MIN_POSITIVE);
    let atol = RTOL * a_scale.max(f64::MIN_POSITIVE);

    // Steps longer than this sit near the edge of the stability region, where
    // the discrete map barely contracts and the residual stalls.
    let h_max = MAX_STEP_RATE / sys.fastest_rate().max(f64::MIN_POSITIVE);
    let mut t = 0.0;
    let mut h = settings.dt.min(h_max);
    let mut k1 = sys.derivative(&a, port);
    let mut last = residual(&k1, &a, kappa_ref);
    let mut steps = 0;
    let mut attempts = 0;
    while t < settings.t_end && attempts < MAX_STEPS {
        attempts += 1;
        h = h.min(settings.t_end - t);
        let mut k = vec![k1.clone()];
        for row in A {
            let mut y = a.clone();
            for (c, kj) in row.iter().zip(&k) {
                if *c != 0.0 {
                    y.axpy(C64::from(h * c), kj, C64::from(1.0));
                }
            }
            k.push(sys.derivative(&y, port));
        }
        // Stage 7 is evaluated at the fifth-order solution.
        let mut y5 = a.clone();
        for (c, kj) in A[5].iter().zip(&k) {
            y5.axpy(C64::from(h * c), kj, C64::from(1.0));
        }
        let mut err = DVector::<C64>::zeros(sys.dim);
        for (j, kj) in k.iter().enumerate() {
            let b5 = if j < 6 { A[5][j] } else { 0.0 };
            err.axpy(C64::from(h * (b5 - B4[j])), kj, C64::from(1.0));
        }
        let scale = atol + RTOL * a.norm().max(y5.norm());
        let e = err.norm() / scale;
        if e <= 1.0 {
            t += h;
            steps += 1;
            a = y5;
            k1 = k.pop().expect("seven stages");
            last = residual(&k1, &a, kappa_ref);
            if kappa.is_some() && last < settings.tol {
                return Ok(SteadyState { amplitudes: a, time: t, residual: last, steps });
            }
        }
        let factor = if e == 0.0 {
            5.0
        } else if e.is_finite() {
            (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        h = (h * factor).min(h_max);
    }
    Err(Error::Timeout { t, residual: last })
}

/// Exact fixed point `a = -drift⁻¹ drive`.
pub fn steady_state_direct(sys: &MeanFieldSystem, port: Port) -> Result<DVector<C64>> {
    let m = -sys.drift.clone();
    lu_solve(m, std::slice::from_ref(&sys.drive[port.index()]))
        .map(|mut x| x.remove(0))
        .ok_or_else(|| Error::Solver { omega_d: f64::NAN, detail: "drift matrix is singular".into() })
}

/// Integrates to steady state for each port in turn. `settings` defaults to
/// [`IntegrationSettings::for_system`].
pub fn s_from_timedomain(system: System<'_>, omega_d: f64, settings: Option<&IntegrationSettings>) -> Result<SMatrix> {
    let sys = build_mean_field(system, omega_d)?;
    let settings = settings.copied().unwrap_or_else(|| IntegrationSettings::for_system(&sys));
    let a1 = integrate_to_steady(&sys, Port::One, &settings)?;
    let a2 = integrate_to_steady(&sys, Port::Two, &settings)?;
    Ok(sys.scattering([&a1.amplitudes, &a2.amplitudes]))
}

pub fn spectrum_timedomain(system: System<'_>, grid: &FrequencyGrid) -> Result<Spectrum> {
    let matrices = grid
        .points()
        .par_iter()
        .map(|&w| s_from_timedomain(system, w, None).map_err(|e| e.at(w)))
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(grid.clone(), matrices, Method::TimeDomain)
}
