//! Computational toolkit for generalized Minkowski spaces: real vector spaces
//! measured by a possibly asymmetric gauge.
//!
//! The crate evaluates gauges given by convex unit balls, works with affine
//! flats, certifies best coapproximations by cutting planes, builds the chord
//! and separation witnesses of non-coproximinal lines and planes, samples
//! bisectors, and runs randomized verification suites.

pub mod analysis;
pub mod bisector;
pub mod coapprox;
pub mod error;
pub mod flats;
pub mod gauge;
pub mod generate;
pub mod numeric;
pub mod sampling;
pub mod spec;
pub mod witness;

mod hull;
mod lp;
mod serde_vec;

pub use coapprox::{
    best_approx, coapprox_solve, functional_coapprox_2d, violation, CoapproxResult,
    CoapproxStatus, SearchBudget, ViolationProbe,
};
pub use error::{Error, Result};
pub use flats::{Flat, LinearFunctional};
pub use gauge::{equivalence_constants, BallKind, EquivalenceConstants, Gauge, Vector};
pub use spec::GaugeSpec;

pub use witness::{ChordWitness, SeparationWitness};
