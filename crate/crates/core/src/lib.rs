//! Numerical verification of Alexandrov lower curvature bounds on finite and
//! sampled metric spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`model_plane`]: trigonometry of the model planes `M^κ`.
//! * [`space`]: samples of geodesic spaces, distance matrices, geodesics and
//!   completions.
//! * [`comparison`]: the (1+3)-point comparison, hinge angles and
//!   curvature-domain certificates.
//! * [`constructions`]: radial curves, the cat's cradle and the Key Lemma
//!   check.
//! * [`globalization`]: segment chains, domain merging and the end-to-end
//!   local-to-global experiment.
//!
//! The guide in `book/` walks through the same material with runnable
//! examples; every snippet there is compiled and run as a doctest.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod bisect;
pub mod comparison;
pub mod constructions;
pub mod error;
pub mod globalization;
pub mod model_plane;
pub mod space;

pub use error::{Error, Result};
pub use model_plane::{model_angle, model_diameter, model_side, Curvature, ModelTriangle};
pub use space::{generate_space, Location, MetricSpaceSample, SpaceKind, SpaceSpec, Variant};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model-planes.md")]
    mod model_planes {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/comparison.md")]
    mod comparison {}
    #[doc = include_str!("../../../book/src/hinges-and-domains.md")]
    mod hinges_and_domains {}
    #[doc = include_str!("../../../book/src/key-lemma.md")]
    mod key_lemma {}
    #[doc = include_str!("../../../book/src/cats-cradle.md")]
    mod cats_cradle {}
    #[doc = include_str!("../../../book/src/globalization.md")]
    mod globalization {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
