use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::features::{fwhm, ResonanceFeature};
use super::{ASYMMETRY_THRESHOLD, PHASE_JUMP_TOLERANCE};
use crate::error::{Error, Result, Side};
use crate::model::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineShape {
    LorentzianSymmetric,
    FanoSymmetric,
    FanoAsymmetric,
}

const QUADRATURE_POINTS: usize = 2001;

/// Window `center ± 2 FWHM`, which must lie on the grid.
fn window(spec: &Spectrum, feature: &ResonanceFeature) -> Result<(f64, f64)> {
    let half = 2.0 * fwhm(spec, feature)?;
    let x = spec.grid().points();
    let (lo, hi) = (feature.center - half, feature.center + half);
    if lo < x[0] {
        return Err(Error::Range { side: Side::Left, center: feature.center });
    }
    if hi > x[x.len() - 1] {
        return Err(Error::Range { side: Side::Right, center: feature.center });
    }
    Ok((lo, hi))
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let k = x.partition_point(|&v| v <= at).clamp(1, x.len() - 1);
    let t = (at - x[k - 1]) / (x[k] - x[k - 1]);
    y[k - 1] + t * (y[k] - y[k - 1])
}

/// `A = ∫(|S(c+δ)| - |S(c-δ)|)dδ / ∫(|S(c+δ)| + |S(c-δ)|)dδ` over `0 ≤ δ ≤ 2 FWHM`,
/// with `|S|` linearly interpolated between grid points.
pub fn asymmetry_score(spec: &Spectrum, feature: &ResonanceFeature) -> Result<f64> {
    let (lo, hi) = window(spec, feature)?;
    let reach = (hi - lo) / 2.0;
    let x = spec.grid().points();
    let mag: Vec<f64> = spec.channel(feature.channel).iter().map(|z| z.norm()).collect();
    let (mut diff, mut sum) = (0.0, 0.0);
    for k in 0..QUADRATURE_POINTS {
        let w = if k == 0 || k == QUADRATURE_POINTS - 1 { 0.5 } else { 1.0 };
        let d = reach * k as f64 / (QUADRATURE_POINTS - 1) as f64;
        let (up, down) = (interpolate(x, &mag, feature.center + d), interpolate(x, &mag, feature.center - d));
        diff += w * (up - down);
        sum += w * (up + down);
    }
    Ok(if sum == 0.0 { 0.0 } else { diff / sum })
}

/// Spread of the unwrapped phase of the feature's channel over `center ± 2 FWHM`.
///
/// A Lorentzian rolls its phase by at most π across resonance. The grid must
/// resolve the phase: successive samples may not differ by more than π.
pub fn phase_excursion(spec: &Spectrum, feature: &ResonanceFeature) -> Result<f64> {
    let (lo, hi) = window(spec, feature)?;
    let x = spec.grid().points();
    let values = spec.channel(feature.channel);
    let mut phases = x.iter().zip(&values).filter(|(&w, _)| w >= lo && w <= hi).map(|(_, z)| z.arg());
    let Some(first) = phases.next() else { return Ok(0.0) };
    let (mut prev, mut offset) = (first, 0.0);
    let (mut min, mut max) = (first, first);
    for p in phases {
        let step = p - prev;
        if step > PI {
            offset -= 2.0 * PI;
        } else if step < -PI {
            offset += 2.0 * PI;
        }
        prev = p;
        let unwrapped = p + offset;
        min = min.min(unwrapped);
        max = max.max(unwrapped);
    }
    Ok(max - min)
}

/// Asymmetric when `|A|` exceeds [`ASYMMETRY_THRESHOLD`]. A symmetric feature
/// whose phase swings further than the Lorentzian's π (by more than
/// [`PHASE_JUMP_TOLERANCE`]) carries an extra π jump and is a symmetric Fano.
pub fn classify_lineshape(spec: &Spectrum, feature: &ResonanceFeature) -> Result<LineShape> {
    if asymmetry_score(spec, feature)?.abs() > ASYMMETRY_THRESHOLD {
        return Ok(LineShape::FanoAsymmetric);
    }
    Ok(if phase_excursion(spec, feature)? > PI + PHASE_JUMP_TOLERANCE {
        LineShape::FanoSymmetric
    } else {
        LineShape::LorentzianSymmetric
    })
}
