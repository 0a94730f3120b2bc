//! Core numerics for entanglement-assisted optical pattern readout.
//!
//! A barcode (or any black/white image) is interrogated pixel by pixel with
//! light; each pixel acts as a bosonic pure-loss channel whose transmissivity
//! encodes its colour.  Discriminating images then reduces to multi-channel
//! discrimination, and every error estimate in this crate flows from a single
//! scalar per pixel pair: the output-state fidelity between the "black" and
//! "white" channel outputs.
//!
//! The crate is organised around that pipeline:
//!
//! * [`gaussian`] — transmissivity pairs, two-mode covariance matrices, and
//!   output fidelities for two-mode squeezed-vacuum (entangled) and coherent
//!   (classical) probes, plus photon-counting receiver error rates and a
//!   Fock-basis fidelity oracle used for cross-validation.
//! * [`bounds`] — upper/lower bounds on the error probability of
//!   discriminating `n`-pixel barcodes from the pairwise fidelity, including
//!   the restricted ensemble with exactly `k` white pixels, local-measurement
//!   variants, and Chernoff-style rate sandwiches.
//! * [`pattern`] — the same machinery generalised to arbitrary pattern
//!   ensembles via per-class-pair Hamming-distance histograms (e.g. handwritten
//!   digits), with a Gaussian closed-form approximation for large histograms.
//! * [`advantage`] — threshold photon numbers and win/lose predicates for
//!   entangled versus classical probes at equal total energy.
//! * [`image`] — bit-packed binary images, Hamming distance, binarization and
//!   pixel-flip noise.
//! * [`classify`] — nearest-neighbour classification, empirical error curves,
//!   and composition of physical pixel-error rates with measured classifier
//!   robustness curves.
//!
//! Everything is `no_std` + `alloc`; transcendental functions come from
//! [`libm`].  Randomness enters only through caller-supplied
//! [`rand_core::RngCore`] implementations so that consumers control seeding
//! and reproducibility end to end.

#![no_std]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod advantage;
pub mod bounds;
pub mod classify;
pub mod error;
pub mod gaussian;
pub mod image;
pub mod math;
pub mod pattern;

pub use error::{Error, Result};
