//! TOML run configuration. Frequencies and rates are ordinary frequencies in
//! Hz and become angular frequencies here, once; `theta` is in radians.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rescat::{
    rates_from_q, Boundary, Channel, FrequencyGrid, Geometry, HangerChain, Method, NecklaceChain, QualityFactorSet,
    SingleResonator,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub theta_sweep: Option<ThetaSweepConfig>,
    #[serde(default)]
    pub compare: Option<CompareConfig>,
    /// Circuit-level parameters kept for reference; never read.
    #[serde(default)]
    pub circuit: Option<toml::Table>,
}

/// A scalar shared by every site or one value per site.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerSite {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerSite {
    fn len(&self) -> Option<usize> {
        match self {
            PerSite::Scalar(_) => None,
            PerSite::List(v) => Some(v.len()),
        }
    }

    fn expand(&self, name: &str, n: usize) -> Result<Vec<f64>> {
        match self {
            PerSite::Scalar(x) => Ok(vec![*x; n]),
            PerSite::List(v) if v.len() == n => Ok(v.clone()),
            PerSite::List(v) => Err(CliError::Config(format!("{name} has {} entries, expected {n}", v.len()))),
        }
    }
}

fn zero() -> PerSite {
    PerSite::Scalar(0.0)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemConfig {
    Single(SingleConfig),
    HangerChain(HangerChainConfig),
    NecklaceChain(NecklaceChainConfig),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleConfig {
    pub geometry: String,
    pub f0_hz: f64,
    pub gamma_hz: Option<f64>,
    pub gamma1_hz: Option<f64>,
    pub gamma2_hz: Option<f64>,
    pub gamma_a_hz: Option<f64>,
    /// Quality factors in place of rates.
    pub q: Option<QConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QConfig {
    pub q_i: f64,
    #[serde(alias = "q_c1")]
    pub q_c: f64,
    pub q_c2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HangerChainConfig {
    pub n: Option<usize>,
    pub f0_hz: PerSite,
    pub gamma_hz: PerSite,
    #[serde(default = "zero")]
    pub gamma_a_hz: PerSite,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NecklaceChainConfig {
    pub n: Option<usize>,
    pub f0_hz: PerSite,
    /// Hopping per bond (`n - 1` entries when given as a list).
    pub g_hz: PerSite,
    pub gamma1_hz: f64,
    pub gamma2_hz: f64,
    #[serde(default = "zero")]
    pub gamma_a_hz: PerSite,
    #[serde(default)]
    pub boundary: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_hz: Option<f64>,
    pub stop_hz: Option<f64>,
    pub points: Option<usize>,
    pub values_hz: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// `json` for a `.json` path, `csv` otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
    /// Also write `|S21|` in dB and `arg S21` as two-column files.
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub fwhm: bool,
    #[serde(default)]
    pub classify: bool,
    #[serde(default)]
    pub fit: bool,
    #[serde(default = "default_channel")]
    pub channel: String,
    #[serde(default = "default_prominence")]
    pub min_prominence: f64,
    /// Fit model; defaults to the geometry of a single-resonator system.
    pub geometry: Option<String>,
    #[serde(default)]
    pub extra_linewidth_hz: f64,
}

fn default_channel() -> String {
    "s21".into()
}

fn default_prominence() -> f64 {
    1e-2
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            fwhm: false,
            classify: false,
            fit: false,
            channel: default_channel(),
            min_prominence: default_prominence(),
            geometry: None,
            extra_linewidth_hz: 0.0,
        }
    }
}

impl AnalysisConfig {
    pub fn any(&self) -> bool {
        self.fwhm || self.classify || self.fit
    }

    pub fn channel(&self) -> Result<Channel> {
        Ok(self.channel.parse()?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSweepConfig {
    #[serde(default)]
    pub start: f64,
    #[serde(default = "full_turn")]
    pub stop: f64,
    pub steps: usize,
}

fn full_turn() -> f64 {
    TAU
}

impl ThetaSweepConfig {
    /// `steps` evenly spaced values including both ends.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config("theta_sweep needs steps >= 1 and finite start/stop".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps).map(|k| self.start + (self.stop - self.start) * k as f64 / last).collect())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub methods: Vec<String>,
    pub tol: Option<f64>,
}

/// A validated system in angular units.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemModel {
    Single(SingleResonator),
    HangerChain(HangerChain),
    NecklaceChain(NecklaceChain),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Single,
    HangerChain,
    NecklaceChain,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Single => "single",
            SystemKind::HangerChain => "hanger-chain",
            SystemKind::NecklaceChain => "necklace-chain",
        }
    }
}

/// Drive frequencies in Hz together with the angular grid built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub hz: Vec<f64>,
    pub grid: FrequencyGrid,
}

impl SweepGrid {
    pub fn from_hz(hz: Vec<f64>) -> Result<Self> {
        let grid = FrequencyGrid::new(hz.iter().map(|f| TAU * f).collect())?;
        Ok(Self { hz, grid })
    }
}

fn rad(hz: f64) -> f64 {
    TAU * hz
}

fn rads(hz: Vec<f64>) -> Vec<f64> {
    hz.into_iter().map(rad).collect()
}

fn site_count(name: &str, n: Option<usize>, lists: &[Option<usize>]) -> Result<usize> {
    match (n, lists.iter().flatten().max()) {
        (Some(n), _) => Ok(n),
        (None, Some(&n)) => Ok(n),
        (None, None) => Err(CliError::Config(format!("{name}: give `n` or at least one per-site list"))),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1));
            let message = e.message().replace('\n', " ");
            CliError::Config(match line {
                Some(l) => format!("line {l}: {message}"),
                None => message,
            })
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn system_kind(&self) -> SystemKind {
        match self.system {
            SystemConfig::Single(_) => SystemKind::Single,
            SystemConfig::HangerChain(_) => SystemKind::HangerChain,
            SystemConfig::NecklaceChain(_) => SystemKind::NecklaceChain,
        }
    }

    pub fn model(&self) -> Result<SystemModel> {
        match &self.system {
            SystemConfig::Single(c) => single(c).map(SystemModel::Single),
            SystemConfig::HangerChain(c) => {
                let n = site_count("hanger-chain", c.n, &[c.f0_hz.len(), c.gamma_hz.len(), c.gamma_a_hz.len()])?;
                let chain = HangerChain::new(
                    rads(c.f0_hz.expand("f0_hz", n)?),
                    rads(c.gamma_hz.expand("gamma_hz", n)?),
                    rads(c.gamma_a_hz.expand("gamma_a_hz", n)?),
                    c.theta,
                )?;
                Ok(SystemModel::HangerChain(chain))
            }
            SystemConfig::NecklaceChain(c) => {
                let bonds = c.g_hz.len().map(|b| b + 1);
                let n = site_count("necklace-chain", c.n, &[c.f0_hz.len(), bonds, c.gamma_a_hz.len()])?;
                let boundary = match &c.boundary {
                    Some(b) => b.parse::<Boundary>()?,
                    None => Boundary::HardWall,
                };
                let chain = NecklaceChain::new(
                    rads(c.f0_hz.expand("f0_hz", n)?),
                    rads(c.g_hz.expand("g_hz", n.saturating_sub(1))?),
                    rad(c.gamma1_hz),
                    rad(c.gamma2_hz),
                    rads(c.gamma_a_hz.expand("gamma_a_hz", n)?),
                    boundary,
                )?;
                Ok(SystemModel::NecklaceChain(chain))
            }
        }
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid> {
        let g = &self.grid;
        let hz = match (&g.values_hz, g.start_hz, g.stop_hz, g.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(start), Some(stop), Some(points)) => linspace(start, stop, points)?,
            _ => {
                return Err(CliError::Config(
                    "grid needs either values_hz or all of start_hz, stop_hz and points".into(),
                ))
            }
        };
        SweepGrid::from_hz(hz)
    }

    pub fn method(&self, flag: Option<&str>) -> Result<Option<Method>> {
        flag.or(self.method.as_deref()).map(|m| m.parse().map_err(CliError::from)).transpose()
    }
}

fn linspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(CliError::Config("grid needs at least one point".into())),
        1 if start == stop => Ok(vec![start]),
        1 => Err(CliError::Config("a one-point grid needs start_hz = stop_hz".into())),
        _ => {
            let last = (points - 1) as f64;
            Ok((0..points).map(|k| start + (stop - start) * k as f64 / last).collect())
        }
    }
}

fn single(c: &SingleConfig) -> Result<SingleResonator> {
    let geometry: Geometry = c.geometry.parse()?;
    if let Some(q) = &c.q {
        if c.gamma_hz.is_some() || c.gamma1_hz.is_some() || c.gamma2_hz.is_some() || c.gamma_a_hz.is_some() {
            return Err(CliError::Config("give either rates or [system.q], not both".into()));
        }
        let set = QualityFactorSet { omega_a: rad(c.f0_hz), q_i: q.q_i, q_c1: q.q_c, q_c2: q.q_c2 };
        return Ok(rates_from_q(&set, geometry)?);
    }
    let gamma_a = rad(c.gamma_a_hz.unwrap_or(0.0));
    let need = |name: &str, v: Option<f64>| {
        v.map(rad).ok_or_else(|| CliError::Config(format!("a {geometry} resonator needs {name}")))
    };
    let forbid = |name: &str, v: Option<f64>| match v {
        Some(_) => Err(CliError::Config(format!("{name} does not apply to a {geometry} resonator"))),
        None => Ok(()),
    };
    let omega0 = rad(c.f0_hz);
    match geometry {
        Geometry::Hanger => {
            forbid("gamma1_hz", c.gamma1_hz)?;
            forbid("gamma2_hz", c.gamma2_hz)?;
            Ok(SingleResonator::hanger(omega0, need("gamma_hz", c.gamma_hz)?, gamma_a)?)
        }
        Geometry::Necklace | Geometry::Bridge => {
            forbid("gamma_hz", c.gamma_hz)?;
            let (g1, g2) = (need("gamma1_hz", c.gamma1_hz)?, need("gamma2_hz", c.gamma2_hz)?);
            Ok(if geometry == Geometry::Necklace {
                SingleResonator::necklace(omega0, g1, g2, gamma_a)?
            } else {
                SingleResonator::bridge(omega0, g1, g2, gamma_a)?
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HANGER: &str = r#"
        [system]
        kind = "single"
        geometry = "hanger"
        f0_hz = 6.659e9
        gamma_hz = 928e3
        gamma_a_hz = 212e3

        [grid]
        start_hz = 6.65e9
        stop_hz = 6.67e9
        points = 5
    "#;

    #[test]
    fn rates_convert_to_angular_units() {
        let cfg = RunConfig::from_toml(HANGER).unwrap();
        let SystemModel::Single(r) = cfg.model().unwrap() else { panic!() };
        assert_eq!(r.omega0, TAU * 6.659e9);
        assert_eq!(r.gamma_a, TAU * 212e3);
        let g = cfg.sweep_grid().unwrap();
        assert_eq!(g.hz, vec![6.65e9, 6.655e9, 6.66e9, 6.665e9, 6.67e9]);
        assert_eq!(g.grid.points()[2], TAU * 6.66e9);
    }

    #[test]
    fn quality_factors_replace_rates() {
        let text = r#"
            [system]
            kind = "single"
            geometry = "necklace"
            f0_hz = 1.0
            [system.q]
            q_i = 4.0
            q_c = 2.0
            q_c2 = 2.0
            [grid]
            values_hz = [0.9, 1.0, 1.1]
        "#;
        let SystemModel::Single(r) = RunConfig::from_toml(text).unwrap().model().unwrap() else { panic!() };
        assert!((r.gamma_a - TAU / 4.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_and_kinds_are_rejected() {
        assert!(RunConfig::from_toml(&HANGER.replace("gamma_hz", "gamma_hzz")).is_err());
        assert!(RunConfig::from_toml(&HANGER.replace("\"single\"", "\"triple\"")).is_err());
        assert!(RunConfig::from_toml(&format!("{HANGER}\n[extra]\nx = 1")).is_err());
    }

    #[test]
    fn chain_site_count_follows_lists() {
        let text = r#"
            [system]
            kind = "necklace-chain"
            f0_hz = 1.0
            g_hz = [0.1, 0.2, 0.1]
            gamma1_hz = 0.01
            gamma2_hz = 0.01
            [grid]
            values_hz = [1.0]
        "#;
        let SystemModel::NecklaceChain(c) = RunConfig::from_toml(text).unwrap().model().unwrap() else { panic!() };
        assert_eq!(c.n(), 4);
        let bad = text.replace("f0_hz = 1.0", "f0_hz = [1.0, 1.0]");
        assert!(RunConfig::from_toml(&bad).unwrap().model().is_err());
    }

    #[test]
    fn mismatched_rates_are_rejected() {
        let text = HANGER.replace("gamma_hz = 928e3", "gamma1_hz = 928e3");
        assert!(matches!(RunConfig::from_toml(&text).unwrap().model(), Err(CliError::Config(_))));
    }

    #[test]
    fn theta_sweep_includes_both_ends() {
        let s = ThetaSweepConfig { start: 0.0, stop: TAU, steps: 81 };
        let v = s.values().unwrap();
        assert_eq!(v.len(), 81);
        assert_eq!(v[80], TAU);
    }
}
