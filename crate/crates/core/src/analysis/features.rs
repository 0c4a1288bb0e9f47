use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::model::{Channel, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Dip,
    Peak,
}

/// A local extremum of `|S|` on one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFeature {
    pub channel: Channel,
    pub kind: FeatureKind,
    /// Parabola-refined position (rad/s); lies within one grid step of `index`.
    pub center: f64,
    /// Grid index of the sampled extremum.
    pub index: usize,
    /// `|S|` at the refined extremum.
    pub magnitude_extremum: f64,
    /// Topographic prominence of the extremum in `|S|`.
    pub prominence: f64,
    /// Full width at half depth of `|S|²`, when both flanks lie on the grid.
    pub fwhm: Option<f64>,
}

/// Features of `|channel|`. Dips are sought when the spectrum ends sit above
/// `|S| = 0.5` (a transmitted background), peaks otherwise. Grids with fewer
/// than five points yield no features.
pub fn find_resonances(spec: &Spectrum, channel: Channel, min_prominence: f64) -> Vec<ResonanceFeature> {
    let mag: Vec<f64> = spec.channel(channel).iter().map(|z| z.norm()).collect();
    let Some((first, last)) = mag.first().zip(mag.last()) else { return Vec::new() };
    let kind = if (first + last) / 2.0 > 0.5 { FeatureKind::Dip } else { FeatureKind::Peak };
    find_features(spec, channel, kind, min_prominence)
}

/// Features of a given kind, ordered by frequency.
pub fn find_features(
    spec: &Spectrum,
    channel: Channel,
    kind: FeatureKind,
    min_prominence: f64,
) -> Vec<ResonanceFeature> {
    if spec.len() < 5 {
        return Vec::new();
    }
    let x = spec.grid().points();
    let mag: Vec<f64> = spec.channel(channel).iter().map(|z| z.norm()).collect();
    let y = oriented(&mag, kind);
    let power: Vec<f64> = oriented(&mag.iter().map(|m| m * m).collect::<Vec<_>>(), kind);
    local_maxima(&y)
        .into_iter()
        .filter_map(|i| {
            let prominence = prominence(&y, i).0;
            (prominence >= min_prominence && prominence > 0.0).then(|| {
                let (center, top) = refine(x, &power, i);
                ResonanceFeature {
                    channel,
                    kind,
                    center,
                    index: i,
                    magnitude_extremum: top.abs().sqrt(),
                    prominence,
                    fwhm: width(x, &power, i).ok(),
                }
            })
        })
        .collect()
}

/// Width of `feature` at half its depth (or height) in `|S|²`. The reference
/// level is the lower of the two bases that bound the feature, so a flank cut
/// off by the grid edge before reaching the far side's level is an error.
pub fn fwhm(spec: &Spectrum, feature: &ResonanceFeature) -> Result<f64> {
    if feature.index >= spec.len() {
        return Err(Error::Usage("feature does not belong to this spectrum".into()));
    }
    let power: Vec<f64> = spec.channel(feature.channel).iter().map(|z| z.norm_sqr()).collect();
    width(spec.grid().points(), &oriented(&power, feature.kind), feature.index)
        .map_err(|side| Error::Range { side, center: feature.center })
}

/// Flips dips into peaks so every search looks for maxima.
fn oriented(v: &[f64], kind: FeatureKind) -> Vec<f64> {
    match kind {
        FeatureKind::Peak => v.to_vec(),
        FeatureKind::Dip => v.iter().map(|x| -x).collect(),
    }
}

/// Interior strict local maxima; a flat top reports its middle sample.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Prominence of the maximum at `p` and the levels of its (left, right) bases.
/// Each base is the lowest sample before the signal rises above the peak.
fn prominence(y: &[f64], p: usize) -> (f64, (f64, f64)) {
    let top = y[p];
    let left = y[..p].iter().rev().take_while(|&&v| v <= top).copied().fold(top, f64::min);
    let right = y[p + 1..].iter().take_while(|&&v| v <= top).copied().fold(top, f64::min);
    (top - left.max(right), (left, right))
}

fn width(x: &[f64], y: &[f64], p: usize) -> std::result::Result<f64, Side> {
    let (_, (left, right)) = prominence(y, p);
    let half = (y[p] + left.min(right)) / 2.0;
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = (0..p).rev().find(|&i| y[i] < half).map(|i| cross(i, i + 1)).ok_or(Side::Left)?;
    let right = (p + 1..y.len()).find(|&i| y[i] < half).map(|i| cross(i - 1, i)).ok_or(Side::Right)?;
    Ok(right - left)
}

/// Vertex of the parabola through the samples around `p`.
fn refine(x: &[f64], y: &[f64], p: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[p - 1], x[p], x[p + 1]);
    let (y0, y1, y2) = (y[p - 1], y[p], y[p + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if curv.is_nan() || curv >= 0.0 {
        return (x1, y1);
    }
    let slope_at_x1 = d01 + curv * (x1 - x0);
    let dx = (-slope_at_x1 / (2.0 * curv)).clamp(x0 - x1, x2 - x1);
    (x1 + dx, y1 + slope_at_x1 * dx + curv * dx * dx)
}
