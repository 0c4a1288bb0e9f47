//! Value types shared by every solver and the rate/quality-factor conversions.
//!
//! Frequencies and rates are angular (rad/s). Detunings are formed as
//! `omega0 - omega_d` at evaluation time, so one system value serves a sweep.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Hanger,
    Necklace,
    Bridge,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Hanger => "hanger",
            Geometry::Necklace => "necklace",
            Geometry::Bridge => "bridge",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hanger" => Ok(Geometry::Hanger),
            "necklace" => Ok(Geometry::Necklace),
            "bridge" => Ok(Geometry::Bridge),
            other => Err(Error::Usage(format!("unknown geometry '{other}' (expected hanger, necklace or bridge)"))),
        }
    }
}

/// External coupling of a single resonator. The variant fixes how many ports
/// the resonator leaks into, so rates foreign to the geometry cannot exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coupling {
    Hanger { gamma: f64 },
    Necklace { gamma1: f64, gamma2: f64 },
    Bridge { gamma1: f64, gamma2: f64 },
}

impl Coupling {
    pub fn geometry(&self) -> Geometry {
        match self {
            Coupling::Hanger { .. } => Geometry::Hanger,
            Coupling::Necklace { .. } => Geometry::Necklace,
            Coupling::Bridge { .. } => Geometry::Bridge,
        }
    }

    fn rates(&self) -> Vec<f64> {
        match *self {
            Coupling::Hanger { gamma } => vec![gamma],
            Coupling::Necklace { gamma1, gamma2 } | Coupling::Bridge { gamma1, gamma2 } => {
                vec![gamma1, gamma2]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleResonator {
    pub omega0: f64,
    pub gamma_a: f64,
    pub coupling: Coupling,
}

impl SingleResonator {
    pub fn new(omega0: f64, coupling: Coupling, gamma_a: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::Domain(format!("omega0 must be positive and finite, got {omega0}")));
        }
        check_rate("gamma_a", gamma_a)?;
        for r in coupling.rates() {
            check_rate("external rate", r)?;
        }
        Ok(Self { omega0, gamma_a, coupling })
    }

    pub fn hanger(omega0: f64, gamma: f64, gamma_a: f64) -> Result<Self> {
        Self::new(omega0, Coupling::Hanger { gamma }, gamma_a)
    }

    pub fn necklace(omega0: f64, gamma1: f64, gamma2: f64, gamma_a: f64) -> Result<Self> {
        Self::new(omega0, Coupling::Necklace { gamma1, gamma2 }, gamma_a)
    }

    pub fn bridge(omega0: f64, gamma1: f64, gamma2: f64, gamma_a: f64) -> Result<Self> {
        Self::new(omega0, Coupling::Bridge { gamma1, gamma2 }, gamma_a)
    }

    pub fn geometry(&self) -> Geometry {
        self.coupling.geometry()
    }

    /// Total amplitude damping of the mode: the Lorentzian half width.
    pub fn total_damping(&self) -> f64 {
        match self.coupling {
            Coupling::Hanger { gamma } => gamma + self.gamma_a / 2.0,
            Coupling::Necklace { gamma1, gamma2 } | Coupling::Bridge { gamma1, gamma2 } => {
                (gamma1 + gamma2 + self.gamma_a) / 2.0
            }
        }
    }
}

pub(crate) fn check_rate(name: &str, r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and non-negative, got {r}")))
    }
}

fn check_rates(name: &str, rs: &[f64]) -> Result<()> {
    rs.iter().try_for_each(|&r| check_rate(name, r))
}

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    match xs.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(Error::Domain(format!("{name} must be finite, got {x}"))),
        None => Ok(()),
    }
}

/// Quality factors of one resonator. `q_c2` is `None` for hangers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityFactorSet {
    pub omega_a: f64,
    pub q_i: f64,
    pub q_c1: f64,
    pub q_c2: Option<f64>,
}

/// Hanger: `gamma_a = omega_a/q_i`, `gamma = omega_a/(2 q_c1)`.
/// Necklace and bridge: `gamma_a = omega_a/q_i`, `gamma_m = omega_a/q_cm`.
pub fn rates_from_q(q: &QualityFactorSet, geometry: Geometry) -> Result<SingleResonator> {
    let positive = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
        }
    };
    let omega = positive("omega_a", q.omega_a)?;
    let gamma_a = omega / positive("q_i", q.q_i)?;
    let q_c1 = positive("q_c1", q.q_c1)?;
    let coupling = match geometry {
        Geometry::Hanger => {
            if q.q_c2.is_some() {
                return Err(Error::Domain("a hanger has a single coupling Q; q_c2 must be absent".into()));
            }
            Coupling::Hanger { gamma: omega / (2.0 * q_c1) }
        }
        Geometry::Necklace | Geometry::Bridge => {
            let q_c2 = q.q_c2.ok_or_else(|| Error::Domain(format!("a {geometry} resonator needs q_c2")))?;
            let (gamma1, gamma2) = (omega / q_c1, omega / positive("q_c2", q_c2)?);
            if geometry == Geometry::Necklace {
                Coupling::Necklace { gamma1, gamma2 }
            } else {
                Coupling::Bridge { gamma1, gamma2 }
            }
        }
    };
    SingleResonator::new(omega, coupling, gamma_a)
}

/// Inverse of [`rates_from_q`]. Any zero rate would make its Q diverge and is rejected.
pub fn q_from_rates(r: &SingleResonator) -> Result<QualityFactorSet> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Domain(format!("{name} = {v} gives a divergent quality factor")))
        }
    };
    let q_i = r.omega0 / positive("gamma_a", r.gamma_a)?;
    let (q_c1, q_c2) = match r.coupling {
        Coupling::Hanger { gamma } => (r.omega0 / (2.0 * positive("gamma", gamma)?), None),
        Coupling::Necklace { gamma1, gamma2 } | Coupling::Bridge { gamma1, gamma2 } => {
            (r.omega0 / positive("gamma1", gamma1)?, Some(r.omega0 / positive("gamma2", gamma2)?))
        }
    };
    Ok(QualityFactorSet { omega_a: r.omega0, q_i, q_c1, q_c2 })
}

/// N hanger resonators side-coupled to one waveguide, adjacent sites separated
/// by the propagation phase `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HangerChain {
    omega0: Vec<f64>,
    gamma: Vec<f64>,
    gamma_a: Vec<f64>,
    theta: f64,
}

impl HangerChain {
    pub fn new(omega0: Vec<f64>, gamma: Vec<f64>, gamma_a: Vec<f64>, theta: f64) -> Result<Self> {
        let n = omega0.len();
        if n == 0 {
            return Err(Error::Domain("a chain needs at least one site".into()));
        }
        if gamma.len() != n || gamma_a.len() != n {
            return Err(Error::Domain(format!(
                "per-site lists must all have length {n} (gamma: {}, gamma_a: {})",
                gamma.len(),
                gamma_a.len()
            )));
        }
        check_finite("omega0", &omega0)?;
        check_finite("theta", &[theta])?;
        check_rates("gamma", &gamma)?;
        check_rates("gamma_a", &gamma_a)?;
        Ok(Self { omega0, gamma, gamma_a, theta })
    }

    pub fn homogeneous(n: usize, omega0: f64, gamma: f64, gamma_a: f64, theta: f64) -> Result<Self> {
        Self::new(vec![omega0; n], vec![gamma; n], vec![gamma_a; n], theta)
    }

    pub fn n(&self) -> usize {
        self.omega0.len()
    }
    pub fn omega0(&self) -> &[f64] {
        &self.omega0
    }
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
    pub fn gamma_a(&self) -> &[f64] {
        &self.gamma_a
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.omega0.clone(), self.gamma.clone(), self.gamma_a.clone(), theta)
    }

    /// Per-site detunings `omega0_j - omega_d`.
    pub fn detunings(&self, omega_d: f64) -> Vec<f64> {
        self.omega0.iter().map(|w| w - omega_d).collect()
    }

    /// Exact floating-point equality of every per-site parameter.
    pub fn is_homogeneous(&self) -> bool {
        all_equal(&self.omega0) && all_equal(&self.gamma) && all_equal(&self.gamma_a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    HardWall,
    Periodic,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "hard-wall" | "hardwall" | "open" => Ok(Boundary::HardWall),
            "periodic" | "ring" => Ok(Boundary::Periodic),
            other => Err(Error::Usage(format!("unknown boundary '{other}' (expected hard-wall or periodic)"))),
        }
    }
}

/// N necklace resonators coupled end to end by hopping `g_j`, with the first
/// site leaking into port 1 and the last into port 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecklaceChain {
    omega0: Vec<f64>,
    g: Vec<f64>,
    gamma1: f64,
    gamma2: f64,
    gamma_a: Vec<f64>,
    boundary: Boundary,
}

impl NecklaceChain {
    pub fn new(
        omega0: Vec<f64>,
        g: Vec<f64>,
        gamma1: f64,
        gamma2: f64,
        gamma_a: Vec<f64>,
        boundary: Boundary,
    ) -> Result<Self> {
        let n = omega0.len();
        if n == 0 {
            return Err(Error::Domain("a chain needs at least one site".into()));
        }
        if g.len() != n - 1 {
            return Err(Error::Domain(format!("g must have length {} for {n} sites, got {}", n - 1, g.len())));
        }
        if gamma_a.len() != n {
            return Err(Error::Domain(format!("gamma_a must have length {n}, got {}", gamma_a.len())));
        }
        check_finite("omega0", &omega0)?;
        check_finite("g", &g)?;
        check_rate("gamma1", gamma1)?;
        check_rate("gamma2", gamma2)?;
        check_rates("gamma_a", &gamma_a)?;
        Ok(Self { omega0, g, gamma1, gamma2, gamma_a, boundary })
    }

    pub fn homogeneous(
        n: usize,
        omega0: f64,
        g: f64,
        gamma1: f64,
        gamma2: f64,
        gamma_a: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        Self::new(vec![omega0; n], vec![g; n.saturating_sub(1)], gamma1, gamma2, vec![gamma_a; n], boundary)
    }

    pub fn n(&self) -> usize {
        self.omega0.len()
    }
    pub fn omega0(&self) -> &[f64] {
        &self.omega0
    }
    pub fn g(&self) -> &[f64] {
        &self.g
    }
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }
    pub fn gamma_a(&self) -> &[f64] {
        &self.gamma_a
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn detunings(&self, omega_d: f64) -> Vec<f64> {
        self.omega0.iter().map(|w| w - omega_d).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        all_equal(&self.omega0) && all_equal(&self.g) && all_equal(&self.gamma_a)
    }

    /// Common hopping of a homogeneous chain; zero for a single site.
    pub fn uniform_g(&self) -> f64 {
        self.g.first().copied().unwrap_or(0.0)
    }
}

fn all_equal(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// 2x2 scattering matrix at one drive frequency; `sij` maps port j to port i.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SMatrix {
    pub s11: C64,
    pub s21: C64,
    pub s12: C64,
    pub s22: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    S11,
    S21,
    S12,
    S22,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::S11, Channel::S21, Channel::S12, Channel::S22];

    pub fn name(self) -> &'static str {
        match self {
            Channel::S11 => "s11",
            Channel::S21 => "s21",
            Channel::S12 => "s12",
            Channel::S22 => "s22",
        }
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s11" => Ok(Channel::S11),
            "s21" => Ok(Channel::S21),
            "s12" => Ok(Channel::S12),
            "s22" => Ok(Channel::S22),
            other => Err(Error::Usage(format!("unknown channel '{other}'"))),
        }
    }
}

impl SMatrix {
    pub fn new(s11: C64, s21: C64, s12: C64, s22: C64) -> Self {
        Self { s11, s21, s12, s22 }
    }

    pub fn get(&self, c: Channel) -> C64 {
        match c {
            Channel::S11 => self.s11,
            Channel::S21 => self.s21,
            Channel::S12 => self.s12,
            Channel::S22 => self.s22,
        }
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.s11, self.s21, self.s12, self.s22]
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(f(self.s11), f(self.s21), f(self.s12), f(self.s22))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SMatrix) -> f64 {
        self.entries().iter().zip(other.entries()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Power leaving through both ports for unit drive at port 1.
    pub fn power_from_port1(&self) -> f64 {
        self.s11.norm_sqr() + self.s21.norm_sqr()
    }

    /// Power leaving through both ports for unit drive at port 2.
    pub fn power_from_port2(&self) -> f64 {
        self.s12.norm_sqr() + self.s22.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Strictly increasing, finite drive frequencies (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("a frequency grid needs at least one point".into()));
        }
        check_finite("grid point", &points)?;
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Domain(format!("grid is not strictly increasing at {} -> {}", w[0], w[1])));
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::Domain("a frequency grid needs at least one point".into())),
            1 => Self::new(vec![start]),
            _ => {
                let step = (stop - start) / (n - 1) as f64;
                Self::new((0..n).map(|k| if k == n - 1 { stop } else { start + step * k as f64 }).collect())
            }
        }
    }

    /// `n` points spanning `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::linspace(center - half_width, center + half_width, n)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Which evaluator produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Single-resonator closed forms.
    ClosedForm,
    /// Two-site chain closed forms.
    ClosedFormN2,
    /// Partial-pivoted LU on the full site-basis system.
    Dense,
    /// O(N) recurrences for homogeneous hanger chains.
    Thomas,
    /// Tridiagonal site-basis solve of a hard-wall necklace chain.
    Site,
    /// Collective-mode sums for homogeneous necklace chains.
    Collective,
    /// Integration of the coupled-mode equations to steady state.
    TimeDomain,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::ClosedForm,
        Method::ClosedFormN2,
        Method::Dense,
        Method::Thomas,
        Method::Site,
        Method::Collective,
        Method::TimeDomain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::ClosedFormN2 => "closed-form-n2",
            Method::Dense => "dense",
            Method::Thomas => "thomas",
            Method::Site => "site",
            Method::Collective => "collective",
            Method::TimeDomain => "time-domain",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.as_str() {
            "closedform" => Ok(Method::ClosedForm),
            "closedformn2" | "n2" => Ok(Method::ClosedFormN2),
            "dense" => Ok(Method::Dense),
            "thomas" | "tdma" => Ok(Method::Thomas),
            "site" => Ok(Method::Site),
            "collective" => Ok(Method::Collective),
            "timedomain" | "td" => Ok(Method::TimeDomain),
            _ => Err(Error::Usage(format!(
                "unknown method '{s}' (expected one of: {})",
                Method::ALL.map(Method::name).join(", ")
            ))),
        }
    }
}

/// One S-matrix per grid point, tagged with the evaluator that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    grid: FrequencyGrid,
    matrices: Vec<SMatrix>,
    method: Method,
    /// Non-fatal notes from the evaluator, e.g. solver fallbacks.
    pub diagnostics: Vec<String>,
}

impl Spectrum {
    pub fn new(grid: FrequencyGrid, matrices: Vec<SMatrix>, method: Method) -> Result<Self> {
        if grid.len() != matrices.len() {
            return Err(Error::Domain(format!(
                "spectrum has {} grid points but {} matrices",
                grid.len(),
                matrices.len()
            )));
        }
        Ok(Self { grid, matrices, method, diagnostics: Vec::new() })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }
    pub fn matrices(&self) -> &[SMatrix] {
        &self.matrices
    }
    pub fn method(&self) -> Method {
        self.method
    }
    pub fn len(&self) -> usize {
        self.matrices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn channel(&self, c: Channel) -> Vec<C64> {
        self.matrices.iter().map(|m| m.get(c)).collect()
    }

    /// Same spectrum with every entry transformed by `f`.
    pub fn map_entries(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            grid: self.grid.clone(),
            matrices: self.matrices.iter().map(|m| m.map(&f)).collect(),
            method: self.method,
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// Largest entrywise deviation between two spectra on the same grid.
    pub fn max_abs_diff(&self, other: &Spectrum) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Usage("spectra are sampled on different grids".into()));
        }
        Ok(self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hanger_rates_from_lab_q() {
        let q = QualityFactorSet { omega_a: 2.0 * PI * 6.659e9, q_i: 3.1410e4, q_c1: 3.5878e3, q_c2: None };
        let r = rates_from_q(&q, Geometry::Hanger).unwrap();
        let Coupling::Hanger { gamma } = r.coupling else { panic!() };
        assert!((r.gamma_a / (2.0 * PI) - 212e3).abs() < 0.5e3);
        assert!((gamma / (2.0 * PI) - 928e3).abs() < 0.5e3);
    }

    #[test]
    fn necklace_rates_by_substitution() {
        let q = QualityFactorSet { omega_a: 1.0, q_i: 4.0, q_c1: 2.0, q_c2: Some(2.0) };
        let r = rates_from_q(&q, Geometry::Necklace).unwrap();
        assert_eq!(r.coupling, Coupling::Necklace { gamma1: 0.5, gamma2: 0.5 });
        assert_eq!(r.gamma_a, 0.25);
    }

    #[test]
    fn huge_internal_q_means_negligible_loss() {
        let q = QualityFactorSet { omega_a: 2.0 * PI * 6.659e9, q_i: 1e300, q_c1: 3.5878e3, q_c2: None };
        assert!(rates_from_q(&q, Geometry::Hanger).unwrap().gamma_a < 1e-280);
    }

    #[test]
    fn q_from_lab_rates() {
        let r = SingleResonator::hanger(2.0 * PI * 6.659e9, 2.0 * PI * 928e3, 2.0 * PI * 212e3).unwrap();
        let q = q_from_rates(&r).unwrap();
        assert!((q.q_c1 - 3587.8).abs() < 0.05);
        assert!((q.q_i - 31410.4).abs() < 0.05);
        assert_eq!(q.q_c2, None);
    }

    #[test]
    fn lossless_resonator_has_no_internal_q() {
        let r = SingleResonator::hanger(1.0, 0.1, 0.0).unwrap();
        assert!(matches!(q_from_rates(&r), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_nonpositive_q() {
        let q = QualityFactorSet { omega_a: 1.0, q_i: 0.0, q_c1: 1.0, q_c2: None };
        assert!(rates_from_q(&q, Geometry::Hanger).is_err());
        let q = QualityFactorSet { omega_a: 1.0, q_i: 1.0, q_c1: 1.0, q_c2: None };
        assert!(rates_from_q(&q, Geometry::Bridge).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, f64::NAN]).is_err());
        let g = FrequencyGrid::linspace(1.0, 2.0, 5).unwrap();
        assert_eq!(g.points(), &[1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn chain_validation() {
        assert!(HangerChain::new(vec![], vec![], vec![], 0.0).is_err());
        assert!(HangerChain::new(vec![1.0], vec![0.1, 0.1], vec![0.0], 0.0).is_err());
        assert!(HangerChain::homogeneous(2, 1.0, 0.1, 0.01, f64::INFINITY).is_err());
        assert!(NecklaceChain::new(vec![1.0, 1.0], vec![], 0.1, 0.1, vec![0.0; 2], Boundary::HardWall).is_err());
        let c = NecklaceChain::homogeneous(1, 1.0, 0.3, 0.1, 0.1, 0.0, Boundary::HardWall).unwrap();
        assert!(c.g().is_empty());
        assert_eq!(c.uniform_g(), 0.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("ClosedFormN2".parse::<Method>().unwrap(), Method::ClosedFormN2);
        assert!("bogus".parse::<Method>().is_err());
    }
}
