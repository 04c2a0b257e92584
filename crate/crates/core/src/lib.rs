//! Musielak–Orlicz spaces on discretized measure spaces.
//!
//! The crate evaluates generators `Φ(t, u)` and their conjugates, the modular
//! `I_Φ`, the Luxemburg and Orlicz/Amemiya norms together with the minimizer
//! interval `K(u)`, and classifies support functionals, smooth points and
//! smoothness of the whole space.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod conjugate;
pub mod duality;
pub mod error;
pub mod ext;
pub mod gallery;
pub mod generator;
pub mod geometry;
pub mod instance;
pub mod norms;
pub mod search;
pub mod space;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use generator::{
    eval_phi, generator_bounds, modular, subdiff, validate_generator, Capabilities, Family, NumericFn, OrliczGenerator,
    Section, SubdiffGraph, Tail, Violation, ViolationKind,
};
pub use space::{sgn, Atom, GridMeasureSpace, Site, SimpleFunction};
pub use geometry::{
    check_space_smoothness, classify_smooth_point, construct_support_functional, smoothness_gap_function,
    verify_support_functional, SmoothnessReport, SpaceSmoothnessReport, SupportFunctional,
};
pub use instance::{parse_instance, Instance};
pub use norms::{k_interval, luxemburg_norm, orlicz_amemiya_norm, theta, KSet};
