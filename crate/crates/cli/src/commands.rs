use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rescat::analysis::{
    classify_lineshape, find_resonances, fit_single_resonator_with, fwhm, FeatureKind, FitOptions, FitResult, LineShape,
};
use rescat::hanger_chain::{self, spectrum_hanger_chain};
use rescat::necklace_chain::{self, spectrum_necklace_chain};
use rescat::single::spectrum_single;
use rescat::timedomain::spectrum_timedomain;
use rescat::{Boundary, FrequencyGrid, Geometry, Method, Spectrum};
use serde::Serialize;

use crate::config::{AnalysisConfig, Format, RunConfig, SystemKind, SystemModel};
use crate::error::{CliError, ErrorRecord, Result};
use crate::io::{companion, write_all, SpectrumFile};

pub const DEFAULT_COMPARE_TOL: f64 = 1e-8;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub method: Option<String>,
    pub tol: Option<f64>,
}

impl SystemModel {
    pub fn kind(&self) -> SystemKind {
        match self {
            SystemModel::Single(_) => SystemKind::Single,
            SystemModel::HangerChain(_) => SystemKind::HangerChain,
            SystemModel::NecklaceChain(_) => SystemKind::NecklaceChain,
        }
    }

    pub fn default_method(&self) -> Method {
        match self {
            SystemModel::Single(_) => Method::ClosedForm,
            SystemModel::HangerChain(_) => Method::Dense,
            SystemModel::NecklaceChain(c) if c.boundary() == Boundary::HardWall => Method::Site,
            SystemModel::NecklaceChain(_) => Method::Collective,
        }
    }

    /// Frequency-domain evaluators first; time domain only where site equations exist.
    pub fn applicable_methods(&self) -> Vec<Method> {
        let (mut m, site_equations) = match self {
            SystemModel::Single(_) => (vec![Method::ClosedForm], true),
            SystemModel::HangerChain(c) => (hanger_chain::applicable_methods(c), true),
            SystemModel::NecklaceChain(c) => {
                (necklace_chain::applicable_methods(c), c.boundary() == Boundary::HardWall)
            }
        };
        if site_equations {
            m.push(Method::TimeDomain);
        }
        m
    }

    pub fn spectrum(&self, grid: &FrequencyGrid, method: Method) -> rescat::Result<Spectrum> {
        let applicable = self.applicable_methods();
        if !applicable.contains(&method) {
            return Err(rescat::Error::Usage(format!(
                "method {method} does not apply to this {} system (applicable: {})",
                self.kind().name(),
                applicable.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
            )));
        }
        match (self, method) {
            (SystemModel::Single(r), Method::TimeDomain) => spectrum_timedomain(r.into(), grid),
            (SystemModel::HangerChain(c), Method::TimeDomain) => spectrum_timedomain(c.into(), grid),
            (SystemModel::NecklaceChain(c), Method::TimeDomain) => spectrum_timedomain(c.into(), grid),
            (SystemModel::Single(r), _) => spectrum_single(r, grid),
            (SystemModel::HangerChain(c), m) => spectrum_hanger_chain(c, grid, m),
            (SystemModel::NecklaceChain(c), m) => spectrum_necklace_chain(c, grid, m),
        }
    }

    fn geometry(&self) -> Option<Geometry> {
        match self {
            SystemModel::Single(r) => Some(r.geometry()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureReport {
    pub kind: FeatureKind,
    pub center_hz: f64,
    pub index: usize,
    pub magnitude_extremum: f64,
    pub prominence: f64,
    pub fwhm_hz: Option<f64>,
    pub line_shape: Option<LineShape>,
}

/// Fit outcome in Hz. `covariance_diag` stays in the fitter's angular units
/// (rad²/s² for frequencies and rates, rad² for the phase).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub geometry: Geometry,
    pub f0_hz: f64,
    pub q_i: f64,
    pub q_c: f64,
    pub q_c2: Option<f64>,
    pub gamma_ext_hz: Vec<f64>,
    pub gamma_a_hz: f64,
    pub extra_linewidth_hz: f64,
    pub phase_rad: f64,
    pub residual_rms: f64,
    pub parameter_names: Vec<String>,
    pub covariance_diag: Vec<f64>,
    pub iterations: usize,
}

impl From<&FitResult> for FitReport {
    fn from(f: &FitResult) -> Self {
        Self {
            geometry: f.geometry,
            f0_hz: f.omega0 / TAU,
            q_i: f.q_i,
            q_c: f.q_c,
            q_c2: f.q_c2,
            gamma_ext_hz: f.gamma_ext.iter().map(|g| g / TAU).collect(),
            gamma_a_hz: f.gamma_a / TAU,
            extra_linewidth_hz: f.extra_linewidth / TAU,
            phase_rad: f.phase,
            residual_rms: f.residual_rms,
            parameter_names: f.parameter_names.clone(),
            covariance_diag: f.covariance_diag.clone(),
            iterations: f.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub channel: String,
    pub features: Vec<FeatureReport>,
    pub fit: Option<FitReport>,
    pub error: Option<ErrorRecord>,
}

fn fit_options(cfg: &AnalysisConfig) -> FitOptions {
    FitOptions {
        extra_linewidth: TAU * cfg.extra_linewidth_hz,
        min_prominence: cfg.min_prominence,
        ..Default::default()
    }
}

/// Runs the requested analysis steps. The first failing step stops the
/// analysis; its error is recorded in the report and also returned.
pub fn analyze(
    spec: &Spectrum,
    cfg: &AnalysisConfig,
    fit_geometry: Option<Geometry>,
) -> Result<(AnalysisReport, Option<rescat::Error>)> {
    let channel = cfg.channel()?;
    let mut report = AnalysisReport { channel: channel.name().into(), features: Vec::new(), fit: None, error: None };
    let outcome = (|| {
        if cfg.fwhm || cfg.classify {
            for f in find_resonances(spec, channel, cfg.min_prominence) {
                let fwhm_hz = if cfg.fwhm { Some(fwhm(spec, &f)? / TAU) } else { None };
                let line_shape = if cfg.classify { Some(classify_lineshape(spec, &f)?) } else { None };
                report.features.push(FeatureReport {
                    kind: f.kind,
                    center_hz: f.center / TAU,
                    index: f.index,
                    magnitude_extremum: f.magnitude_extremum,
                    prominence: f.prominence,
                    fwhm_hz,
                    line_shape,
                });
            }
        }
        if cfg.fit {
            let geometry = fit_geometry.expect("resolved before analysis");
            let fit = fit_single_resonator_with(spec, geometry, None, &fit_options(cfg))?;
            report.fit = Some(FitReport::from(&fit));
        }
        Ok::<(), rescat::Error>(())
    })();
    let err = outcome.err();
    report.error = err.clone().map(|e| CliError::Analysis(e).record());
    Ok((report, err))
}

fn resolve_geometry(flag: Option<&str>, cfg: Option<&RunConfig>, model: Option<&SystemModel>) -> Result<Geometry> {
    if let Some(g) = flag.or_else(|| cfg.and_then(|c| c.analysis.geometry.as_deref())) {
        return Ok(g.parse()?);
    }
    model
        .and_then(SystemModel::geometry)
        .ok_or_else(|| CliError::Config("fitting needs a geometry: pass --geometry or set [analysis].geometry".into()))
}

fn check_kind(cfg: &RunConfig, expected: SystemKind) -> Result<()> {
    let found = cfg.system_kind();
    if found != expected {
        return Err(CliError::Config(format!(
            "the config describes a {} system; run `rescat {}` for it",
            found.name(),
            found.name()
        )));
    }
    Ok(())
}

fn require_out(ov: &Overrides, cfg: &RunConfig) -> Result<PathBuf> {
    ov.out
        .clone()
        .or_else(|| cfg.output.path.clone())
        .ok_or_else(|| CliError::Config("no output path: pass --out or set [output].path".into()))
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Run metadata kept apart from the data so the data files stay byte-stable.
#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    system: &'static str,
    method: Method,
    points: usize,
    format: &'static str,
    sign_convention: &'static str,
    diagnostics: &'a [String],
    created_unix_s: u64,
}

const SIGN_CONVENTION: &str =
    "fields evolve as exp(-i omega t); conjugate S for data in the engineering j = -i convention";

fn meta(command: &str, kind: SystemKind, spectrum: &Spectrum, format: Format) -> String {
    let created = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    json_line(&Meta {
        tool: "rescat",
        version: env!("CARGO_PKG_VERSION"),
        command,
        system: kind.name(),
        method: spectrum.method(),
        points: spectrum.len(),
        format: format.extension(),
        sign_convention: SIGN_CONVENTION,
        diagnostics: &spectrum.diagnostics,
        created_unix_s: created,
    })
}

/// Paths written by a spectrum run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub data: PathBuf,
    pub written: Vec<PathBuf>,
    pub method: Method,
}

/// `single`, `hanger-chain` and `necklace-chain`. Everything is computed
/// before the first file is written; an analysis failure still leaves the
/// spectrum and a report carrying the error, then surfaces as exit code 4.
pub fn run_spectrum(cfg: &RunConfig, expected: SystemKind, ov: &Overrides) -> Result<RunSummary> {
    check_kind(cfg, expected)?;
    let model = cfg.model()?;
    let grid = cfg.sweep_grid()?;
    let method = cfg.method(ov.method.as_deref())?.unwrap_or_else(|| model.default_method());
    let out = require_out(ov, cfg)?;
    let format = ov.format.or(cfg.output.format).unwrap_or_else(|| Format::from_path(&out));
    cfg.analysis.channel()?;
    let geometry = if cfg.analysis.fit { Some(resolve_geometry(None, Some(cfg), Some(&model))?) } else { None };

    let spectrum = model.spectrum(&grid.grid, method)?;
    let file = SpectrumFile::new(&grid, &spectrum);
    let mut files = vec![
        (out.clone(), file.render(format)),
        (companion(&out, "meta.json"), meta(expected.name(), expected, &spectrum, format)),
    ];
    if cfg.output.plot {
        files.push((companion(&out, "s21_db.csv"), file.s21_db_csv()));
        files.push((companion(&out, "s21_arg.csv"), file.s21_arg_csv()));
    }
    let mut failure = None;
    if cfg.analysis.any() {
        let (report, err) = analyze(&spectrum, &cfg.analysis, geometry)?;
        files.push((companion(&out, "analysis.json"), json_line(&report)));
        failure = err;
    }
    write_all(&files)?;
    if let Some(e) = failure {
        return Err(CliError::Analysis(e));
    }
    Ok(RunSummary { data: out, written: files.into_iter().map(|(p, _)| p).collect(), method })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryDeviation {
    pub method: Method,
    pub s11: f64,
    pub s21: f64,
    pub s12: f64,
    pub s22: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub reference: Method,
    pub methods: Vec<Method>,
    pub tol: f64,
    /// Largest pointwise `|S_ij - S_ij(reference)|` per entry, one row per other method.
    pub deviations: Vec<EntryDeviation>,
    pub max_deviation: f64,
    pub pass: bool,
}

fn deviation(method: Method, a: &Spectrum, reference: &Spectrum) -> EntryDeviation {
    let mut d = [0.0f64; 4];
    for (x, y) in a.matrices().iter().zip(reference.matrices()) {
        for (k, (p, q)) in x.entries().iter().zip(y.entries()).enumerate() {
            d[k] = d[k].max((p - q).norm());
        }
    }
    let max = d.iter().copied().fold(0.0, f64::max);
    EntryDeviation { method, s11: d[0], s21: d[1], s12: d[2], s22: d[3], max }
}

/// Evaluates the spectrum with every listed method (default: all applicable
/// frequency-domain methods) and measures each against the first.
pub fn compare(cfg: &RunConfig, methods: &[String], ov: &Overrides) -> Result<CompareReport> {
    let model = cfg.model()?;
    let grid = cfg.sweep_grid()?;
    let section = cfg.compare.clone().unwrap_or_default();
    let names = if methods.is_empty() { section.methods } else { methods.to_vec() };
    let methods: Vec<Method> = if names.is_empty() {
        model.applicable_methods().into_iter().filter(|m| *m != Method::TimeDomain).collect()
    } else {
        names.iter().map(|m| m.parse()).collect::<rescat::Result<_>>()?
    };
    if methods.len() < 2 {
        return Err(CliError::Config(format!(
            "compare needs at least two methods, got {}",
            methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
        )));
    }
    let tol = ov.tol.or(section.tol).unwrap_or(DEFAULT_COMPARE_TOL);
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let spectra = methods.iter().map(|&m| model.spectrum(&grid.grid, m)).collect::<rescat::Result<Vec<_>>>()?;
    let deviations: Vec<_> = methods.iter().zip(&spectra).skip(1).map(|(&m, s)| deviation(m, s, &spectra[0])).collect();
    let max_deviation = deviations.iter().map(|d| d.max).fold(0.0, f64::max);
    Ok(CompareReport { reference: methods[0], methods, tol, deviations, max_deviation, pass: max_deviation <= tol })
}

/// Fits a spectrum read from `input`, or computed from the config when no input is given.
pub fn fit(cfg: Option<&RunConfig>, input: Option<&Path>, geometry: Option<&str>, ov: &Overrides) -> Result<FitReport> {
    let (spectrum, model) = match (input, cfg) {
        (Some(path), _) => {
            let format = ov.format.unwrap_or_else(|| Format::from_path(path));
            (SpectrumFile::read(path, format)?.to_spectrum()?.1, None)
        }
        (None, Some(cfg)) => {
            let model = cfg.model()?;
            let grid = cfg.sweep_grid()?;
            let method = cfg.method(ov.method.as_deref())?.unwrap_or_else(|| model.default_method());
            (model.spectrum(&grid.grid, method)?, Some(model))
        }
        (None, None) => return Err(CliError::Config("fit needs --input or --config".into())),
    };
    let geometry = resolve_geometry(geometry, cfg, model.as_ref())?;
    let options = cfg.map(|c| fit_options(&c.analysis)).unwrap_or_default();
    let result = fit_single_resonator_with(&spectrum, geometry, None, &options).map_err(CliError::Analysis)?;
    Ok(FitReport::from(&result))
}

/// One spectrum file per `theta` plus `index.csv` (`index,theta_rad,file`) in the output directory.
pub fn sweep_theta(cfg: &RunConfig, ov: &Overrides) -> Result<Vec<PathBuf>> {
    check_kind(cfg, SystemKind::HangerChain)?;
    let SystemModel::HangerChain(chain) = cfg.model()? else { unreachable!("kind checked") };
    let sweep =
        cfg.theta_sweep.as_ref().ok_or_else(|| CliError::Config("sweep-theta needs a [theta_sweep] section".into()))?;
    let thetas = sweep.values()?;
    let grid = cfg.sweep_grid()?;
    let dir = require_out(ov, cfg)?;
    let format = ov.format.or(cfg.output.format).unwrap_or(Format::Csv);
    let method = cfg.method(ov.method.as_deref())?.unwrap_or(Method::Dense);

    let width = (thetas.len().saturating_sub(1)).to_string().len().max(3);
    let mut index = String::from("index,theta_rad,file\n");
    let mut files = Vec::with_capacity(thetas.len() + 1);
    for (k, &theta) in thetas.iter().enumerate() {
        let model = SystemModel::HangerChain(chain.with_theta(theta)?);
        let spectrum = model.spectrum(&grid.grid, method)?;
        let name = format!("theta_{k:0width$}.{}", format.extension());
        index.push_str(&format!("{k},{theta:.16e},{name}\n"));
        files.push((dir.join(&name), SpectrumFile::new(&grid, &spectrum).render(format)));
    }
    files.push((dir.join("index.csv"), index));
    write_all(&files)?;
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

/// Writes `text` to `out` atomically, or returns it for stdout.
pub fn emit(text: String, out: Option<&Path>) -> Result<Option<String>> {
    match out {
        Some(p) => write_all(&[(p.to_path_buf(), text)]).map(|_| None),
        None => Ok(Some(text)),
    }
}

pub fn report_text<T: Serialize>(v: &T) -> String {
    json_line(v)
}
