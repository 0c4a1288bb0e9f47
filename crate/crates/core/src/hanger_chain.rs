//! Chains of hanger resonators side-coupled to one waveguide, with the
//! propagation delay between neighbours folded into a phase `θ`.
//!
//! Three evaluators check one another: a dense site-basis LU solve (the
//! reference), the two-site closed form, and O(N) recurrences for
//! homogeneous chains.

use nalgebra::{DMatrix, DVector};

use crate::equations::{CoupledModeEquations, HangerChainEquations, Port};
use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::model::{check_rate, FrequencyGrid, HangerChain, Method, SMatrix, Spectrum};
use crate::single::{guarded, sweep};
use crate::C64;

/// Steady-state system `M a = B` of a hanger chain at one drive frequency.
///
/// `M` has `iΔ_j + γ_j + γ_aj/2` on the diagonal and `√γ_j √γ_j' e^{i|j-j'|θ}`
/// off it. `rhs_right` is the drive from `r_in` (port 1), `rhs_left` from `l_in`
/// (port 2); both already carry the minus sign of the equation of motion.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLinearSystem {
    pub matrix: DMatrix<C64>,
    pub rhs_right: DVector<C64>,
    pub rhs_left: DVector<C64>,
    pub output_row_left: DVector<C64>,
    pub output_row_right: DVector<C64>,
    pub passthrough_phase: C64,
}

pub fn build_chain_system(chain: &HangerChain, omega_d: f64) -> ChainLinearSystem {
    system_from_equations(&HangerChainEquations::new(chain, omega_d))
}

fn system_from_equations(eq: &HangerChainEquations) -> ChainLinearSystem {
    let n = eq.dim();
    ChainLinearSystem {
        matrix: DMatrix::from_fn(n, n, |r, c| -eq.drift(r, c)),
        rhs_right: DVector::from_vec(eq.input_vector(Port::One)),
        rhs_left: DVector::from_vec(eq.input_vector(Port::Two)),
        output_row_left: DVector::from_vec(eq.output_vector(Port::One)),
        output_row_right: DVector::from_vec(eq.output_vector(Port::Two)),
        passthrough_phase: eq.passthrough(Port::Two, Port::One),
    }
}

impl ChainLinearSystem {
    /// `S11 = l_out/r_in`, `S21 = r_out/r_in`, `S12 = l_out/l_in`, `S22 = r_out/l_in`.
    pub fn solve(&self) -> Option<SMatrix> {
        let x = lu_solve(self.matrix.clone(), &[self.rhs_right.clone(), self.rhs_left.clone()])?;
        let (a_r, a_l) = (&x[0], &x[1]);
        let p = self.passthrough_phase;
        Some(SMatrix::new(
            self.output_row_left.dot(a_r),
            p + self.output_row_right.dot(a_r),
            p + self.output_row_left.dot(a_l),
            self.output_row_right.dot(a_l),
        ))
    }
}

fn dense_from_equations(eq: &HangerChainEquations) -> Result<SMatrix> {
    system_from_equations(eq).solve().ok_or_else(|| Error::Solver {
        omega_d: f64::NAN,
        detail: format!("hanger chain matrix of size {} is singular", eq.dim()),
    })
}

pub fn s_hanger_chain_dense(chain: &HangerChain, omega_d: f64) -> Result<SMatrix> {
    dense_from_equations(&HangerChainEquations::new(chain, omega_d)).map_err(|e| e.at(omega_d))
}

/// How the intrinsic loss enters the two-site closed form's site factors
/// `iΔ_j + Γ_j`. Only [`N2Damping::Half`] agrees with the site equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum N2Damping {
    /// `Γ_j = γ_aj / 2`, the amplitude damping of an isolated site.
    Half,
    /// `Γ_j = γ_aj`.
    Full,
}

/// Two-site closed form with `Γ_j = γ_aj/2`.
pub fn s_hanger_chain_n2(
    delta1: f64,
    delta2: f64,
    gamma1: f64,
    gamma2: f64,
    gamma_a1: f64,
    gamma_a2: f64,
    theta: f64,
) -> Result<SMatrix> {
    s_hanger_chain_n2_with(N2Damping::Half, [delta1, delta2], [gamma1, gamma2], [gamma_a1, gamma_a2], theta)
}

pub fn s_hanger_chain_n2_with(
    damping: N2Damping,
    delta: [f64; 2],
    gamma: [f64; 2],
    gamma_a: [f64; 2],
    theta: f64,
) -> Result<SMatrix> {
    gamma.iter().chain(&gamma_a).try_for_each(|&r| check_rate("rate", r))?;
    let factor = match damping {
        N2Damping::Half => 0.5,
        N2Damping::Full => 1.0,
    };
    let a1 = C64::new(factor * gamma_a[0], delta[0]);
    let a2 = C64::new(factor * gamma_a[1], delta[1]);
    let [g1, g2] = gamma;
    let e1 = C64::from_polar(1.0, theta);
    let e2 = e1 * e1;
    let cross = g1 * g2 * (1.0 - e2);
    let den = a1 * a2 + g1 * a2 + g2 * a1 + cross;
    let scale = delta.iter().map(|d| d.abs()).chain(gamma).chain(gamma_a).fold(0.0, f64::max);
    let den = guarded(den, scale * scale, "two-site hanger chain")?;
    let s21 = e1 * a1 * a2 / den;
    Ok(SMatrix::new(-(g1 * a2 + e2 * g2 * a1 + cross) / den, s21, s21, -(e2 * g1 * a2 + g2 * a1 + cross) / den))
}

/// Result of the recurrence solver; `fallback` is set when it handed over to the dense solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ThomasOutcome {
    pub s: SMatrix,
    pub fallback: Option<String>,
}

/// O(N) solution for a homogeneous chain of `n` sites.
///
/// The symmetric and antisymmetric parts of the exchange decouple into two
/// tridiagonal systems for auxiliary fields `c_j` and `d_j`, solved by forward
/// elimination with `x = γ/(iΔ - γ + γ_a/2)`. The sweep runs through `j = N`,
/// and `r_out` picks up `d_N` with phase `e^{iNθ}`.
pub fn s_hanger_chain_thomas(n: usize, delta: f64, gamma: f64, gamma_a: f64, theta: f64) -> Result<ThomasOutcome> {
    if n == 0 {
        return Err(Error::Domain("a chain needs at least one site".into()));
    }
    check_rate("gamma", gamma)?;
    check_rate("gamma_a", gamma_a)?;
    if !(delta.is_finite() && theta.is_finite()) {
        return Err(Error::Domain("detuning and theta must be finite".into()));
    }
    match thomas_recurrences(n, delta, gamma, gamma_a, theta) {
        Ok(s) => Ok(ThomasOutcome { s, fallback: None }),
        Err(why) => {
            let eq = HangerChainEquations::from_parts(vec![delta; n], &vec![gamma; n], vec![gamma_a; n], theta);
            let s = dense_from_equations(&eq)?;
            Ok(ThomasOutcome { s, fallback: Some(format!("{why}; solved by dense LU")) })
        }
    }
}

const BREAKDOWN: f64 = 1e-12;

fn checked(num: C64, den: C64, scale: f64, what: &str) -> std::result::Result<C64, String> {
    let q = num / den;
    if den.norm() < BREAKDOWN * scale || !(q.re.is_finite() && q.im.is_finite()) {
        Err(format!("recurrence breakdown in {what}"))
    } else {
        Ok(q)
    }
}

/// Forward coefficients `a'_j`, shared by both sweeps.
fn forward_a(n: usize, x: C64, e2: C64) -> std::result::Result<Vec<C64>, String> {
    let one_x = 1.0 + x;
    let mut a = Vec::with_capacity(n);
    let first = 1.0 + 2.0 * x;
    a.push(checked(-one_x, first, 1.0 + 2.0 * x.norm(), "first pivot")?);
    for j in 1..n {
        let base = first + e2;
        let carry = a[j - 1] * one_x * e2;
        a.push(checked(-one_x, base + carry, base.norm() + carry.norm(), "pivot")?);
    }
    Ok(a)
}

/// `b'_j` for a sweep with first value `b1` and constant source `src`.
fn forward_b(a: &[C64], x: C64, e2: C64, b1: C64, src: C64) -> Vec<C64> {
    let one_x = 1.0 + x;
    let mut b = Vec::with_capacity(a.len());
    b.push(b1);
    for j in 1..a.len() {
        // a'_j = -(1+x)/den, so -1/den = a'_j/(1+x).
        let inv = a[j] / one_x;
        b.push(inv * (src - b[j - 1] * one_x * e2));
    }
    b
}

fn thomas_recurrences(
    n: usize,
    delta: f64,
    gamma: f64,
    gamma_a: f64,
    theta: f64,
) -> std::result::Result<SMatrix, String> {
    let scale = delta.abs().max(gamma).max(gamma_a);
    let xd = C64::new(gamma_a / 2.0 - gamma, delta);
    if xd.norm() <= BREAKDOWN * scale {
        return Err("x is singular".into());
    }
    let x = gamma / xd;
    let nf = n as f64;
    let ph = |k: f64| C64::from_polar(1.0, k * theta);
    let e2 = ph(2.0);
    if (1.0 + x).norm() < BREAKDOWN * (1.0 + x.norm()) {
        return Err("recurrence breakdown: 1 + x vanishes".into());
    }
    let a = forward_a(n, x, e2)?;
    let one_2x = 1.0 + 2.0 * x;

    // Unit drive at r_in (port 1) and at l_in (port 2).
    let drives = [(C64::from(0.0), C64::from(1.0)), (C64::from(1.0), C64::from(0.0))];
    let mut out = [[C64::from(0.0); 2]; 2];
    for (k, &(l, r)) in drives.iter().enumerate() {
        let bc = forward_b(&a, x, e2, -x * (ph(nf) * l + ph(1.0) * r) / one_2x, x * ph(nf) * (1.0 - e2) * l);
        let mut c = vec![C64::from(0.0); n];
        c[n - 1] = bc[n - 1];
        for j in (0..n - 1).rev() {
            c[j] = bc[j] - a[j] * c[j + 1];
        }

        let bd = forward_b(&a, x, e2, -x * (ph(-nf) * l + ph(-1.0) * r) / one_2x, x * (ph(-1.0) - ph(1.0)) * r);
        // d is filled from the far end: d_1 = b'_N, d_{N-j+1} = b'_j - a'_j d_{N-j}.
        let mut d_last = bd[n - 1];
        for j in (0..n - 1).rev() {
            d_last = bd[j] - a[j] * d_last;
        }

        let pass = ph(nf - 1.0);
        let l_out = pass * l + ph(-1.0) * c[0];
        let r_out = pass * r + ph(nf) * d_last;
        out[k] = [l_out, r_out];
    }
    let s = SMatrix::new(out[0][0], out[0][1], out[1][0], out[1][1]);
    if s.is_finite() {
        Ok(s)
    } else {
        Err("non-finite recurrence output".into())
    }
}

/// Methods that can evaluate `chain`.
pub fn applicable_methods(chain: &HangerChain) -> Vec<Method> {
    let mut m = vec![Method::Dense];
    if chain.is_homogeneous() {
        m.push(Method::Thomas);
    }
    if chain.n() == 2 {
        m.push(Method::ClosedFormN2);
    }
    m
}

pub(crate) fn inapplicable(method: Method, why: &str, applicable: &[Method]) -> Error {
    Error::Usage(format!(
        "method {method} is not applicable: {why}; applicable methods: {}",
        applicable.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    ))
}

pub fn spectrum_hanger_chain(chain: &HangerChain, grid: &FrequencyGrid, method: Method) -> Result<Spectrum> {
    let applicable = applicable_methods(chain);
    if !applicable.contains(&method) {
        let why = match method {
            Method::Thomas => "the recurrences need a homogeneous chain",
            Method::ClosedFormN2 => "the closed form needs exactly two sites",
            _ => "not a hanger-chain evaluator",
        };
        return Err(inapplicable(method, why, &applicable));
    }
    let mut diagnostics = Vec::new();
    let matrices = match method {
        Method::Dense => sweep(grid, |w| s_hanger_chain_dense(chain, w))?,
        Method::ClosedFormN2 => {
            let (g, ga) = (chain.gamma(), chain.gamma_a());
            sweep(grid, |w| {
                let d = chain.detunings(w);
                s_hanger_chain_n2(d[0], d[1], g[0], g[1], ga[0], ga[1], chain.theta()).map_err(|e| e.at(w))
            })?
        }
        Method::Thomas => {
            let (w0, g, ga) = (chain.omega0()[0], chain.gamma()[0], chain.gamma_a()[0]);
            let outcomes =
                sweep(grid, |w| s_hanger_chain_thomas(chain.n(), w0 - w, g, ga, chain.theta()).map_err(|e| e.at(w)))?;
            outcomes
                .into_iter()
                .zip(grid.points())
                .map(|(o, w)| {
                    if let Some(f) = o.fallback {
                        diagnostics.push(format!("omega_d = {w:e}: {f}"));
                    }
                    o.s
                })
                .collect()
        }
        _ => unreachable!("filtered by applicable_methods"),
    };
    let mut spectrum = Spectrum::new(grid.clone(), matrices, method)?;
    spectrum.diagnostics = diagnostics;
    Ok(spectrum)
}
