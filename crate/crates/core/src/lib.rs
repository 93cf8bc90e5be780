//! Linear stability and Hopf bifurcation toolkit for viscous shear flows in
//! the strip `R x (0, 1)`.
//!
//! The pipeline runs from a base profile `U_s(y)` to Orr-Sommerfeld spectra
//! ([`orrsomm`]), the upper neutral curve and an audit of the spectral
//! hypotheses ([`neutral`]), the Stuart-Landau coefficients `c1`, `c3`
//! ([`hopf`]) and finally the bifurcated travelling rolls ([`amplitude`]).
//! [`greenfn`] holds the explicit Green-function construction of the
//! resolvent used to check the large-`|lambda|` resolvent decay.

pub mod amplitude;
pub mod config;
pub mod error;
pub mod fit;
pub mod greenfn;
pub mod hopf;
pub mod linalg;
pub mod neutral;
pub mod orrsomm;
pub mod output;
pub mod pipeline;
pub mod profiles;
pub mod specgrid;

pub use amplitude::{AmplitudeState, LimitCycle, NormalForm, RollField};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use greenfn::{BoundReport, GreenApprox, Parity};
pub use hopf::{Classification, HopfCoefficients, MeanFlowGauge};
pub use neutral::{Branch, CriticalPoint, HAuditReport, NeutralPoint, ScalingFit};
pub use orrsomm::{EigenPair, OrrSommerfeldPencil};
pub use pipeline::PipelineReport;
pub use profiles::{AdmissibilityReport, Concavity, ProfileKind, ShearProfile};
pub use specgrid::SpectralDiscretization;

pub use num_complex::Complex64;
