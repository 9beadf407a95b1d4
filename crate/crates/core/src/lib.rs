//! Transmission spectra of a standing-wave optical cavity filled with
//! Doppler-broadened two-level atoms.
//!
//! When the collective coupling `g√N` approaches the free spectral range,
//! normal-mode splitting appears in many longitudinal modes at once. This
//! crate evaluates the linear-dispersion forward model ([`medium`],
//! [`cavity`]), analyses swept spectra ([`spectrum`]), recovers parameters
//! from measured scans ([`fit`]) and reads/writes the file formats used by
//! the `nmsplit` command-line tool ([`io`]).
//!
//! Frequencies are angular (rad/s) inside [`medium`] and [`cavity`]; spectra,
//! peaks and every file format use ordinary frequency (Hz).

pub mod cavity;
pub mod constants;
pub mod error;
pub mod exec;
pub mod faddeeva;
pub mod fit;
pub mod io;
pub mod medium;
pub mod spectrum;

pub use cavity::{CavityParams, Model, RoundTrip};
pub use error::{Error, Result};
pub use exec::Execution;
pub use medium::{ComplexResponse, DopplerSpec, MediumParams, ResponseMode};
pub use spectrum::{Peak, Spectrum};
