//! Complex least-squares fit of a single-resonator closed form.
//!
//! The model is `e^{iφ} S(ω0 - ω)` for all four S-entries, fitted with a
//! bound-constrained Levenberg-Marquardt iteration on the stacked real and
//! imaginary residuals. Parameters are scaled by the initial half-width so
//! they are all of order one.
//!
//! `extra_linewidth` is a phenomenological broadening held fixed during the
//! fit. It is reported on its own and never folded into `q_i`: a measured
//! width alone cannot separate dissipation from other broadening.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::features::{find_features, FeatureKind, ResonanceFeature};
use super::AMBIGUITY_RATIO;
use crate::error::{Error, Result};
use crate::model::{q_from_rates, Channel, Coupling, Geometry, SMatrix, SingleResonator, Spectrum};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub geometry: Geometry,
    pub omega0: f64,
    pub q_i: f64,
    /// Coupling Q of a hanger, or of port 1 for two-port geometries.
    pub q_c: f64,
    pub q_c2: Option<f64>,
    /// Fitted rates: `[γ]` for a hanger, `[γ1, γ2]` otherwise (rad/s).
    pub gamma_ext: Vec<f64>,
    pub gamma_a: f64,
    /// Global phase of the S-data (rad).
    pub phase: f64,
    /// Fixed extra broadening (rad/s), not part of `q_i`.
    pub extra_linewidth: f64,
    pub residual_rms: f64,
    /// Variances of the fitted parameters in `parameter_names` order.
    pub covariance_diag: Vec<f64>,
    pub parameter_names: Vec<String>,
    pub iterations: usize,
}

impl FitResult {
    pub fn resonator(&self) -> Result<SingleResonator> {
        let coupling = match (self.geometry, self.gamma_ext.as_slice()) {
            (Geometry::Hanger, &[gamma]) => Coupling::Hanger { gamma },
            (Geometry::Necklace, &[gamma1, gamma2]) => Coupling::Necklace { gamma1, gamma2 },
            (Geometry::Bridge, &[gamma1, gamma2]) => Coupling::Bridge { gamma1, gamma2 },
            _ => return Err(Error::Domain("fit result rates do not match its geometry".into())),
        };
        SingleResonator::new(self.omega0, coupling, self.gamma_a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub extra_linewidth: f64,
    pub max_iterations: usize,
    /// Prominence in `|S|` below which features are ignored during auto-initialization.
    pub min_prominence: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { extra_linewidth: 0.0, max_iterations: 200, min_prominence: 1e-2 }
    }
}

pub fn fit_single_resonator(spec: &Spectrum, geometry: Geometry, initial: Option<&FitResult>) -> Result<FitResult> {
    fit_single_resonator_with(spec, geometry, initial, &FitOptions::default())
}

/// Parameters in fit units: `[(ω0 - ref)/scale, rates/scale..., φ]` with rates
/// `[γ, γ_a]` (hanger) or `[γ1, γ2, γ_a]`.
struct Problem<'a> {
    geometry: Geometry,
    omega: &'a [f64],
    data: Vec<SMatrix>,
    reference: f64,
    scale: f64,
    extra: f64,
}

impl Problem<'_> {
    fn n_params(&self) -> usize {
        match self.geometry {
            Geometry::Hanger => 4,
            _ => 5,
        }
    }

    fn model(&self, p: &[f64], omega: f64) -> SMatrix {
        let delta = C64::new(0.0, self.reference + p[0] * self.scale - omega);
        let rot = C64::from_polar(1.0, p[self.n_params() - 1]);
        let s = match self.geometry {
            Geometry::Hanger => {
                let (g, ga) = (p[1] * self.scale, p[2] * self.scale + self.extra);
                let s11 = -g / (delta + g + ga / 2.0);
                SMatrix::new(s11, 1.0 + s11, 1.0 + s11, s11)
            }
            Geometry::Necklace | Geometry::Bridge => {
                let (g1, g2, ga) = (p[1] * self.scale, p[2] * self.scale, p[3] * self.scale + self.extra);
                let d = delta + (g1 + g2 + ga) / 2.0;
                let sign = if self.geometry == Geometry::Necklace { 1.0 } else { -1.0 };
                let s21 = sign * (g1 * g2).sqrt() / d;
                SMatrix::new(1.0 - g1 / d, s21, s21, 1.0 - g2 / d)
            }
        };
        s.map(|z| rot * z)
    }

    fn residuals(&self, p: &[f64]) -> DVector<f64> {
        let mut r = Vec::with_capacity(self.omega.len() * 8);
        for (&w, d) in self.omega.iter().zip(&self.data) {
            let m = self.model(p, w);
            for (a, b) in m.entries().iter().zip(d.entries()) {
                let e = a - b;
                r.push(e.re);
                r.push(e.im);
            }
        }
        DVector::from_vec(r)
    }

    fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let k = self.n_params();
        let m = self.omega.len() * 8;
        let mut jac = DMatrix::zeros(m, k);
        for j in 0..k {
            let h = 1e-6 * p[j].abs().max(1e-2);
            let (mut up, mut down) = (p.to_vec(), p.to_vec());
            up[j] += h;
            down[j] -= h;
            let col = (self.residuals(&up) - self.residuals(&down)) / (2.0 * h);
            jac.set_column(j, &col);
        }
        jac
    }

    /// Rates stay non-negative; the phase is free.
    fn project(&self, p: &mut [f64]) {
        let k = self.n_params();
        for v in &mut p[1..k - 1] {
            *v = v.max(0.0);
        }
    }
}

fn dominant_feature(spec: &Spectrum, geometry: Geometry, min_prominence: f64) -> Result<ResonanceFeature> {
    let kind = match geometry {
        Geometry::Hanger => FeatureKind::Dip,
        _ => FeatureKind::Peak,
    };
    let mut features = find_features(spec, Channel::S21, kind, min_prominence);
    features.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
    match features.as_slice() {
        [] => Err(Error::Fit { detail: "no resonance feature in |S21|".into(), residual: f64::NAN }),
        [first, second, ..] if second.prominence > AMBIGUITY_RATIO * first.prominence => {
            Err(Error::Ambiguous(format!(
                "features at {:e} and {:e} rad/s have comparable prominence ({:.3} and {:.3})",
                first.center, second.center, first.prominence, second.prominence
            )))
        }
        [first, ..] => Ok(first.clone()),
    }
}

/// Starting point from the dominant feature: its position, its width as the
/// total damping, and the on-resonance depths for the split between rates.
fn auto_initial(spec: &Spectrum, geometry: Geometry, options: &FitOptions) -> Result<(f64, f64, Vec<f64>)> {
    let feature = dominant_feature(spec, geometry, options.min_prominence)?;
    let x = spec.grid().points();
    let span = x[x.len() - 1] - x[0];
    let half_width = feature.fwhm.map_or(span / 20.0, |f| f / 2.0);
    let edge = |c: Channel| {
        let v = spec.channel(c);
        (v[0] + v[v.len() - 1]) / 2.0
    };
    let m = &spec.matrices()[feature.index];
    let (phase, params) = match geometry {
        Geometry::Hanger => {
            let phase = edge(Channel::S21).arg();
            let depth = (C64::from_polar(1.0, -phase) * m.s21).re.clamp(0.0, 1.0);
            let gamma_a = 2.0 * half_width * depth;
            let gamma = (half_width - gamma_a / 2.0).max(0.05 * half_width);
            (phase, vec![gamma, gamma_a])
        }
        Geometry::Necklace | Geometry::Bridge => {
            let phase = edge(Channel::S11).arg();
            let rot = C64::from_polar(1.0, -phase);
            let rate = |s: C64| (half_width * (1.0 - (rot * s).re)).clamp(0.05 * half_width, 2.0 * half_width);
            let (g1, g2) = (rate(m.s11), rate(m.s22));
            let gamma_a = (2.0 * half_width - g1 - g2).max(0.01 * half_width);
            (phase, vec![g1, g2, gamma_a])
        }
    };
    Ok((feature.center, phase, params))
}

pub fn fit_single_resonator_with(
    spec: &Spectrum,
    geometry: Geometry,
    initial: Option<&FitResult>,
    options: &FitOptions,
) -> Result<FitResult> {
    let (omega0, phase, rates) = match initial {
        Some(init) if init.geometry == geometry => {
            let mut rates = init.gamma_ext.clone();
            rates.push(init.gamma_a);
            (init.omega0, init.phase, rates)
        }
        Some(init) => {
            return Err(Error::Usage(format!("initial guess is for a {} resonator, not {geometry}", init.geometry)))
        }
        None => auto_initial(spec, geometry, options)?,
    };
    let scale = rates.iter().copied().fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Fit { detail: "initial rates are all zero".into(), residual: f64::NAN });
    }
    let problem = Problem {
        geometry,
        omega: spec.grid().points(),
        data: spec.matrices().to_vec(),
        reference: omega0,
        scale,
        extra: options.extra_linewidth,
    };
    let mut p: Vec<f64> = std::iter::once(0.0).chain(rates.iter().map(|r| r / scale)).chain([phase]).collect();
    let (p, iterations, cost) = levenberg_marquardt(&problem, &mut p, options.max_iterations)?;

    let m = problem.omega.len() * 8;
    let k = problem.n_params();
    let jac = problem.jacobian(&p);
    let normal = jac.transpose() * &jac;
    let sigma2 = if m > k { cost / (m - k) as f64 } else { f64::NAN };
    let inv = normal.try_inverse();
    let unit = |j: usize| if j == k - 1 { 1.0 } else { scale * scale };
    let covariance_diag = (0..k).map(|j| inv.as_ref().map_or(f64::NAN, |inv| sigma2 * inv[(j, j)] * unit(j))).collect();

    let omega0 = problem.reference + p[0] * scale;
    let fitted: Vec<f64> = p[1..k - 1].iter().map(|v| v * scale).collect();
    let (gamma_ext, gamma_a) = (fitted[..fitted.len() - 1].to_vec(), fitted[fitted.len() - 1]);
    let names: &[&str] = match geometry {
        Geometry::Hanger => &["omega0", "gamma", "gamma_a", "phase"],
        _ => &["omega0", "gamma1", "gamma2", "gamma_a", "phase"],
    };
    let mut result = FitResult {
        geometry,
        omega0,
        q_i: f64::INFINITY,
        q_c: f64::INFINITY,
        q_c2: None,
        gamma_ext,
        gamma_a,
        phase: p[k - 1],
        extra_linewidth: options.extra_linewidth,
        residual_rms: (cost / m as f64).sqrt(),
        covariance_diag,
        parameter_names: names.iter().map(|s| s.to_string()).collect(),
        iterations,
    };
    let res = result.resonator()?;
    match q_from_rates(&res) {
        Ok(q) => {
            result.q_i = q.q_i;
            result.q_c = q.q_c1;
            result.q_c2 = q.q_c2;
        }
        // A rate pinned at its zero bound gives a divergent Q; report it as such.
        Err(_) => {
            let q = |r: f64| res.omega0 / r;
            result.q_i = q(res.gamma_a);
            match res.coupling {
                Coupling::Hanger { gamma } => result.q_c = q(2.0 * gamma),
                Coupling::Necklace { gamma1, gamma2 } | Coupling::Bridge { gamma1, gamma2 } => {
                    result.q_c = q(gamma1);
                    result.q_c2 = Some(q(gamma2));
                }
            }
        }
    }
    Ok(result)
}

/// Returns the converged parameters, the iteration count and the final `|r|²`.
fn levenberg_marquardt(problem: &Problem<'_>, p: &mut [f64], max_iterations: usize) -> Result<(Vec<f64>, usize, f64)> {
    let mut r = problem.residuals(p);
    let mut cost = r.norm_squared();
    if !cost.is_finite() {
        return Err(Error::Fit { detail: "model is not finite at the starting point".into(), residual: f64::NAN });
    }
    let n = (r.len() as f64).max(1.0);
    let mut lambda = 1e-3;
    for it in 1..=max_iterations {
        let jac = problem.jacobian(p);
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * &r;
        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for j in 0..damped.nrows() {
                damped[(j, j)] += lambda * a[(j, j)].max(1e-12);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            problem.project(&mut trial);
            let r_trial = problem.residuals(&trial);
            let c_trial = r_trial.norm_squared();
            if c_trial.is_finite() && c_trial <= cost {
                let moved: f64 = trial.iter().zip(p.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let size: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                let gain = cost - c_trial;
                p.copy_from_slice(&trial);
                r = r_trial;
                cost = c_trial;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if gain <= 1e-12 * cost || moved <= 1e-12 * (size + 1e-12) || cost / n < 1e-30 {
                    return Ok((p.to_vec(), it, cost));
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            // No downhill step exists at any damping: a local minimum.
            return Ok((p.to_vec(), it, cost));
        }
    }
    Err(Error::Fit { detail: format!("no convergence after {max_iterations} iterations"), residual: (cost / n).sqrt() })
}
