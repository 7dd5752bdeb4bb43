//! Composite-boson analysis of harmonically confined Wigner molecules.
//!
//! A Wigner molecule of `2N` fermions (`N` pairs of two distinguishable
//! species) is treated as `N` composite bosons built from one two-particle
//! ground state. Within the harmonic approximation that ground state is a
//! product of Gaussians, its Schmidt spectrum is geometric, and every
//! many-pair quantity reduces to symmetric-polynomial algebra over the
//! Schmidt occupations.
//!
//! * [`spectrum`] — trap/interaction parameters to the geometric Schmidt
//!   spectrum, with closed-form entropies and power sums.
//! * [`symfun`] — fermionic/bosonic normalization factors `χ_N`, their
//!   ratios and bounds, via a log-domain dynamic program plus exact
//!   rational verification paths.
//! * [`observables`] — mode populations, density of states, Fermi-Dirac /
//!   Bose-Einstein fits, and pair-counting statistics.
//! * [`density`] — real-space density profiles and Friedel/Wigner regime
//!   classification by peak counting.
//! * [`oracle`] — slow brute-force references (grid SVD, Fock-space
//!   enumeration) exercised by the test suite and arbitration reports.
//!
//! All computation is in oscillator units (`ħ = m = ω = 1`). The numeric
//! modules are generic over the scalar type through [`Real`]; the aliases
//! below fix `f64`, which is what the command-line tool and the test suite
//! use.

pub mod density;
pub mod error;
pub mod logspace;
pub mod observables;
pub mod oracle;
pub mod scalar;
pub mod spectrum;
pub mod symfun;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` Schmidt spectrum.
pub type Spectrum = spectrum::OccupationSpectrum<f64>;
/// `f64` harmonic-approximation summary.
pub type Approx = spectrum::HarmonicApprox<f64>;
/// `f64` entropy report.
pub type Entropies = spectrum::EntropyReport<f64>;
/// `f64` normalization-factor table.
pub type Chi = symfun::ChiTable<f64>;
/// `f64` population profile.
pub type Populations = observables::PopulationProfile<f64>;
/// `f64` counting distribution.
pub type Counting = observables::CountingDistribution<f64>;
/// `f64` density grid.
pub type Density = density::DensityGrid<f64>;
