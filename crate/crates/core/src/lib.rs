//! Quantitative analysis of the unambiguous-state-discrimination (USD) attack
//! on BB84 quantum key distribution with weak coherent pulses.
//!
//! The crate is organised bottom-up:
//!
//! - [`usd`]: discrimination coefficients and success probabilities for the
//!   four BB84 signals, for pure coherent states and for phase-averaged
//!   (Poisson mixture of Fock) states.
//! - [`click`]: Bob's single-click and double-click probabilities, without an
//!   eavesdropper and when Eve resends number states or mixtures of them.
//! - [`region`]: the convex insecurity polygon, the linearised criteria
//!   (`mu2`, `F`), and verdicts over parameter space.
//! - [`attacks`]: beamsplitting figures of merit and the comparison with USD.
//! - [`sim`]: a deterministic, parallel Monte Carlo simulator that checks the
//!   analytic click probabilities.
//! - [`cli`]: the `usd-attack` command-line front end (CSV/JSON output).
//!
//! ```
//! use usd_attack::usd::{usd_probability, MeanPhotonNumber, SourceModel};
//!
//! let mu = MeanPhotonNumber::new(1.0).unwrap();
//! let p_d = usd_probability(mu, SourceModel::PhaseAveragedFock);
//! assert!((p_d.get() - 0.041076).abs() < 1e-5);
//! ```

#![forbid(unsafe_code)]

pub mod attacks;
pub mod cli;
pub mod click;
mod error;
pub mod region;
pub mod sim;
pub mod usd;

pub use error::{Error, Result};
