//! Post-processing of spectra: resonance features, widths, line-shape class
//! and quality-factor fits.

mod features;
mod fit;
mod lineshape;

pub use features::{find_features, find_resonances, fwhm, FeatureKind, ResonanceFeature};
pub use fit::{fit_single_resonator, fit_single_resonator_with, FitOptions, FitResult};
pub use lineshape::{asymmetry_score, classify_lineshape, phase_excursion, LineShape};

/// `|A|` above this marks a line shape as asymmetric.
pub const ASYMMETRY_THRESHOLD: f64 = 0.05;

/// Unwrapped phase excursion allowed beyond the π roll of a Lorentzian before
/// a feature counts as carrying an extra phase jump (rad).
pub const PHASE_JUMP_TOLERANCE: f64 = 0.3;

/// Second-strongest feature prominence, relative to the strongest, above
/// which a single-resonator fit refuses to pick one.
pub const AMBIGUITY_RATIO: f64 = 0.25;
