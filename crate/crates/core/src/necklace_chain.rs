//! Chains of necklace resonators coupled end to end by direct hopping.
//!
//! The tridiagonal site-basis solve is the reference. Homogeneous chains also
//! have closed forms in terms of collective tight-binding modes, for an open
//! (hard-wall) chain and for a ring.

use std::f64::consts::PI;

use crate::equations::{CoupledModeEquations, NecklaceChainEquations, Port};
use crate::error::{Error, Result};
use crate::hanger_chain::inapplicable;
use crate::linalg::steady_bands;
use crate::model::{check_rate, Boundary, FrequencyGrid, Method, NecklaceChain, SMatrix, Spectrum};
use crate::single::{guarded, sweep, SINGULARITY_GUARD};
use crate::C64;

/// Site-basis solution with an optional note when the tridiagonal sweep fell back to LU.
fn site_solve(chain: &NecklaceChain, omega_d: f64) -> Result<(SMatrix, Option<String>)> {
    let eq = NecklaceChainEquations::new(chain, omega_d).ok_or_else(|| {
        Error::Usage("the site-basis equations describe an open chain; use the collective method for a ring".into())
    })?;
    let rhs = Port::BOTH.map(|p| eq.input_vector(p));
    let sol = steady_bands(&eq).solve(&rhs).ok_or_else(|| Error::Solver {
        omega_d,
        detail: format!("necklace chain matrix of size {} is singular", eq.dim()),
    })?;
    Ok((eq.scattering([&sol.x[0], &sol.x[1]]), sol.fallback))
}

pub fn s_necklace_chain_site(chain: &NecklaceChain, omega_d: f64) -> Result<SMatrix> {
    site_solve(chain, omega_d).map(|(s, _)| s)
}

/// Two-site closed form with `A_j = iΔ_j + (γ_j + γ_aj)/2`:
/// `S11 = 1 - γ1 A2/den`, `S22 = 1 - γ2 A1/den`, `S21 = S12 = i g √(γ1γ2)/den`,
/// `den = A1 A2 + g²`.
pub fn s_necklace_chain_n2(
    delta1: f64,
    delta2: f64,
    g: f64,
    gamma1: f64,
    gamma2: f64,
    gamma_a1: f64,
    gamma_a2: f64,
) -> Result<SMatrix> {
    [gamma1, gamma2, gamma_a1, gamma_a2].iter().try_for_each(|&r| check_rate("rate", r))?;
    let a1 = C64::new((gamma1 + gamma_a1) / 2.0, delta1);
    let a2 = C64::new((gamma2 + gamma_a2) / 2.0, delta2);
    let scale =
        [delta1.abs(), delta2.abs(), g.abs(), gamma1, gamma2, gamma_a1, gamma_a2].into_iter().fold(0.0, f64::max);
    let den = guarded(a1 * a2 + g * g, scale * scale, "two-site necklace chain")?;
    let s21 = C64::new(0.0, g) * (gamma1 * gamma2).sqrt() / den;
    Ok(SMatrix::new(1.0 - gamma1 * a2 / den, s21, s21, 1.0 - gamma2 * a1 / den))
}

/// Normal modes of a homogeneous chain and their couplings to the two ports.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveModeSet {
    pub boundary: Boundary,
    /// Mode detunings `Δ_k`, k = 1..N.
    pub delta_k: Vec<f64>,
    pub root_gamma1_k: Vec<C64>,
    pub root_gamma2_k: Vec<C64>,
    /// `(-1)^k` for the open chain; absent for a ring.
    pub parity: Option<Vec<f64>>,
}

/// Open chain: `Δ_k = Δ - 2g cos(kπ/(N+1))`, `√γ_mk = √(2γ_m/(N+1)) sin(kπ/(N+1))`.
/// Ring: `Δ_k = Δ - 2g cos(2πk/N)`, `√γ_1k = √(γ_1/N) e^{-2πik/N}`, `√γ_2k = √(γ_2/N)`.
pub fn collective_modes(
    n: usize,
    delta: f64,
    g: f64,
    gamma1: f64,
    gamma2: f64,
    boundary: Boundary,
) -> CollectiveModeSet {
    let nf = n as f64;
    let ks = 1..=n;
    match boundary {
        Boundary::HardWall => {
            let q = |k: usize| k as f64 * PI / (nf + 1.0);
            let weight = |gm: f64, k: usize| C64::from((2.0 * gm / (nf + 1.0)).sqrt() * q(k).sin());
            CollectiveModeSet {
                boundary,
                delta_k: ks.clone().map(|k| delta - 2.0 * g * q(k).cos()).collect(),
                root_gamma1_k: ks.clone().map(|k| weight(gamma1, k)).collect(),
                root_gamma2_k: ks.clone().map(|k| weight(gamma2, k)).collect(),
                parity: Some(ks.map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect()),
            }
        }
        Boundary::Periodic => {
            let q = |k: usize| 2.0 * PI * k as f64 / nf;
            CollectiveModeSet {
                boundary,
                delta_k: ks.clone().map(|k| delta - 2.0 * g * q(k).cos()).collect(),
                root_gamma1_k: ks.clone().map(|k| C64::from_polar((gamma1 / nf).sqrt(), -q(k))).collect(),
                root_gamma2_k: ks.map(|_| C64::from((gamma2 / nf).sqrt())).collect(),
                parity: None,
            }
        }
    }
}

impl CollectiveModeSet {
    /// Largest minus smallest mode detuning.
    pub fn spread(&self) -> f64 {
        let max = self.delta_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.delta_k.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// S-matrix with every mode detuning offset by `shift`.
    ///
    /// With `D_k = iΔ_k + γ_a/2`, `Σ_m = Σ_k γ_mk/D_k` and the mixed sum
    /// `M = Σ_k p_k √γ_1k √γ_2k / D_k`, where `γ_mk = |√γ_mk|²`:
    /// `den = (1 + Σ_1/2)(1 + Σ_2/2) - (M/2)²`,
    /// `S11 = 1 - ((1 + Σ_2/2)Σ_1 - M²/2)/den`, `S21 = S12 = ∓M/den`
    /// (minus for the open chain).
    pub fn scattering(&self, shift: f64, gamma_a: f64) -> Result<SMatrix> {
        check_rate("gamma_a", gamma_a)?;
        let scale = self.delta_k.iter().map(|d| (d + shift).abs()).fold(gamma_a, f64::max);
        let (mut s1, mut s2, mut m) = (C64::from(0.0), C64::from(0.0), C64::from(0.0));
        for (k, &dk) in self.delta_k.iter().enumerate() {
            let d = guarded(C64::new(gamma_a / 2.0, dk + shift), scale, "collective mode")?;
            let (r1, r2) = (self.root_gamma1_k[k], self.root_gamma2_k[k]);
            let p = self.parity.as_ref().map_or(1.0, |p| p[k]);
            s1 += r1.norm_sqr() / d;
            s2 += r2.norm_sqr() / d;
            m += p * r1 * r2 / d;
        }
        let (h1, h2) = (1.0 + s1 / 2.0, 1.0 + s2 / 2.0);
        let den = h1 * h2 - (m / 2.0) * (m / 2.0);
        let size = h1.norm() * h2.norm() + (m / 2.0).norm_sqr();
        if den.norm() <= SINGULARITY_GUARD * size || !den.norm().is_finite() {
            return Err(Error::Singular { omega_d: f64::NAN, detail: "collective-mode denominator vanishes".into() });
        }
        let sign = match self.boundary {
            Boundary::HardWall => -1.0,
            Boundary::Periodic => 1.0,
        };
        let s21 = sign * m / den;
        Ok(SMatrix::new(1.0 - (h2 * s1 - m * m / 2.0) / den, s21, s21, 1.0 - (h1 * s2 - m * m / 2.0) / den))
    }
}

pub fn s_necklace_chain_collective(
    n: usize,
    delta: f64,
    g: f64,
    gamma1: f64,
    gamma2: f64,
    gamma_a: f64,
    boundary: Boundary,
) -> Result<SMatrix> {
    if n == 0 {
        return Err(Error::Domain("a chain needs at least one site".into()));
    }
    check_rate("gamma1", gamma1)?;
    check_rate("gamma2", gamma2)?;
    collective_modes(n, delta, g, gamma1, gamma2, boundary).scattering(0.0, gamma_a)
}

pub fn applicable_methods(chain: &NecklaceChain) -> Vec<Method> {
    let mut m = Vec::new();
    if chain.boundary() == Boundary::HardWall {
        m.push(Method::Site);
        if chain.n() == 2 {
            m.push(Method::ClosedFormN2);
        }
    }
    if chain.is_homogeneous() {
        m.push(Method::Collective);
    }
    m
}

pub fn spectrum_necklace_chain(chain: &NecklaceChain, grid: &FrequencyGrid, method: Method) -> Result<Spectrum> {
    let applicable = applicable_methods(chain);
    if !applicable.contains(&method) {
        let why = match method {
            Method::Collective => "collective modes need a homogeneous chain",
            Method::ClosedFormN2 => "the closed form needs an open chain of exactly two sites",
            Method::Site => "site-basis equations need an open (hard-wall) chain",
            _ => "not a necklace-chain evaluator",
        };
        return Err(inapplicable(method, why, &applicable));
    }
    let mut diagnostics = Vec::new();
    let matrices = match method {
        Method::Site => {
            let solved = sweep(grid, |w| site_solve(chain, w))?;
            solved
                .into_iter()
                .zip(grid.points())
                .map(|((s, note), w)| {
                    if let Some(note) = note {
                        diagnostics.push(format!("omega_d = {w:e}: {note}"));
                    }
                    s
                })
                .collect()
        }
        Method::ClosedFormN2 => {
            let ga = chain.gamma_a();
            sweep(grid, |w| {
                let d = chain.detunings(w);
                s_necklace_chain_n2(d[0], d[1], chain.g()[0], chain.gamma1(), chain.gamma2(), ga[0], ga[1])
                    .map_err(|e| e.at(w))
            })?
        }
        Method::Collective => {
            let modes =
                collective_modes(chain.n(), 0.0, chain.uniform_g(), chain.gamma1(), chain.gamma2(), chain.boundary());
            let (w0, ga) = (chain.omega0()[0], chain.gamma_a()[0]);
            sweep(grid, |w| modes.scattering(w0 - w, ga).map_err(|e| e.at(w)))?
        }
        _ => unreachable!("filtered by applicable_methods"),
    };
    let mut spectrum = Spectrum::new(grid.clone(), matrices, method)?;
    spectrum.diagnostics = diagnostics;
    Ok(spectrum)
}
