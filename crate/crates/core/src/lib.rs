//! Scattering matrices of microwave resonators coupled to transmission-line
//! waveguides, from input-output theory.
//!
//! Sign convention: fields evolve as `e^{-iωt}` and the imaginary unit is the
//! physicist's `i` (classical-engineering data uses `j = -i`; conjugate to
//! convert). All frequencies and rates are angular (rad/s).

pub mod analysis;
pub mod equations;
pub mod error;
pub mod hanger_chain;
pub mod linalg;
pub mod model;
pub mod necklace_chain;
pub mod single;
pub mod timedomain;

pub use error::{Error, Result, Side};
pub use model::{
    q_from_rates, rates_from_q, Boundary, Channel, Coupling, FrequencyGrid, Geometry, HangerChain, Method,
    NecklaceChain, QualityFactorSet, SMatrix, SingleResonator, Spectrum,
};

pub type C64 = num_complex::Complex64;
