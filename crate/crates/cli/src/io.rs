//! Spectrum files and atomic writes.
//!
//! CSV rows print every float as `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly; JSON uses the shortest round-tripping form.
//! Either way, reading a file back reproduces the written values bit for bit.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rescat::{Method, SMatrix, Spectrum, C64};
use serde::{Deserialize, Serialize};

use crate::config::{Format, SweepGrid};
use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "freq_hz,s11_re,s11_im,s21_re,s21_im,s12_re,s12_im,s22_re,s22_im";

/// A spectrum as stored on disk: drive frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFile {
    pub freq_hz: Vec<f64>,
    pub matrices: Vec<SMatrix>,
    /// Known for JSON files only.
    pub method: Option<Method>,
}

#[derive(Serialize, Deserialize)]
struct JsonSpectrum {
    method: Option<Method>,
    freq_hz: Vec<f64>,
    s11: Vec<[f64; 2]>,
    s21: Vec<[f64; 2]>,
    s12: Vec<[f64; 2]>,
    s22: Vec<[f64; 2]>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl SpectrumFile {
    pub fn new(grid: &SweepGrid, spectrum: &Spectrum) -> Self {
        Self { freq_hz: grid.hz.clone(), matrices: spectrum.matrices().to_vec(), method: Some(spectrum.method()) }
    }

    /// Rebuilds the angular-frequency spectrum; files without a method tag become `closed-form`.
    pub fn to_spectrum(&self) -> Result<(SweepGrid, Spectrum)> {
        let grid = SweepGrid::from_hz(self.freq_hz.clone())?;
        let spectrum =
            Spectrum::new(grid.grid.clone(), self.matrices.clone(), self.method.unwrap_or(Method::ClosedForm))?;
        Ok((grid, spectrum))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 + self.freq_hz.len() * 220);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (f, s) in self.freq_hz.iter().zip(&self.matrices) {
            let _ = write!(out, "{f:.16e}");
            for z in s.entries() {
                let _ = write!(out, ",{:.16e},{:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(CliError::Config(format!(
                    "spectrum CSV must start with '{CSV_HEADER}', found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut freq_hz = Vec::new();
        let mut matrices = Vec::new();
        for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let v = line
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(format!("spectrum CSV row {}: {e}", k + 1)))?;
            if v.len() != 9 {
                return Err(CliError::Config(format!("spectrum CSV row {} has {} fields, expected 9", k + 1, v.len())));
            }
            freq_hz.push(v[0]);
            let z = |i: usize| C64::new(v[i], v[i + 1]);
            matrices.push(SMatrix::new(z(1), z(3), z(5), z(7)));
        }
        Ok(Self { freq_hz, matrices, method: None })
    }

    pub fn to_json(&self) -> String {
        let column = |f: fn(&SMatrix) -> C64| self.matrices.iter().map(|s| pair(f(s))).collect();
        let j = JsonSpectrum {
            method: self.method,
            freq_hz: self.freq_hz.clone(),
            s11: column(|s| s.s11),
            s21: column(|s| s.s21),
            s12: column(|s| s.s12),
            s22: column(|s| s.s22),
        };
        let mut text = serde_json::to_string(&j).expect("spectrum serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: JsonSpectrum =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("spectrum JSON: {e}")))?;
        let n = j.freq_hz.len();
        if [j.s11.len(), j.s21.len(), j.s12.len(), j.s22.len()].iter().any(|&l| l != n) {
            return Err(CliError::Config("spectrum JSON columns differ in length".into()));
        }
        let z = |p: [f64; 2]| C64::new(p[0], p[1]);
        let matrices = (0..n).map(|k| SMatrix::new(z(j.s11[k]), z(j.s21[k]), z(j.s12[k]), z(j.s22[k]))).collect();
        Ok(Self { freq_hz: j.freq_hz, matrices, method: j.method })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn read(path: &Path, format: Format) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        match format {
            Format::Csv => Self::from_csv(&text),
            Format::Json => Self::from_json(&text),
        }
    }

    /// `freq_hz,s21_db` with `20 log10 |S21|`.
    pub fn s21_db_csv(&self) -> String {
        self.two_column("s21_db", |z| 20.0 * z.norm().log10())
    }

    /// `freq_hz,s21_arg_rad`, principal value.
    pub fn s21_arg_csv(&self) -> String {
        self.two_column("s21_arg_rad", |z| z.arg())
    }

    fn two_column(&self, name: &str, f: impl Fn(C64) -> f64) -> String {
        let mut out = format!("freq_hz,{name}\n");
        for (hz, s) in self.freq_hz.iter().zip(&self.matrices) {
            let _ = writeln!(out, "{hz:.16e},{:.16e}", f(s.s21));
        }
        out
    }
}

/// `out.csv` with `suffix = "meta.json"` gives `out.meta.json`.
pub fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes every file or, on the first failure, none of the remaining ones.
pub fn write_all(files: &[(PathBuf, String)]) -> Result<()> {
    files.iter().try_for_each(|(p, text)| write_atomic(p, text.as_bytes()))
}
