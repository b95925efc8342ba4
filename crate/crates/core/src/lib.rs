//! Transmit power minimization for IRS-aided bistatic and monostatic
//! backscatter links.
//!
//! The pipeline: [`geometry`] and [`channel`] produce a [`ChannelSet`];
//! [`signal`] turns phases into composite links and quadratic forms; [`mm`]
//! maximizes the quartic cascade gain with minorization-maximization over
//! the [`sdp`] relaxation; [`power`] wraps the result with MRT beamforming,
//! the optimal power split and the minimum transmit power.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mm;
pub mod power;
pub mod sdp;
pub mod seeds;
pub mod signal;

pub use benchmarks::{AlignTarget, SchemeId};
pub use channel::{gaussian_channels, synthesize_channels, ChannelSet};
pub use error::{Error, Result};
pub use geometry::{Architecture, IrsGeometry, PathLoss, Position2D, StandInPathLoss, SystemLayout};
pub use mm::{CurvatureMode, DinkelbachConfig, MmConfig, MmTrace};
pub use power::{PowerConfig, Regime, RegimeChoice, RegimeThresholds, SolverSolution};
pub use sdp::{SdpMethod, SolverConfig};
pub use signal::{LinkTarget, PhaseVector, QuadraticForms, TagParams};

pub use num_complex::Complex64;
