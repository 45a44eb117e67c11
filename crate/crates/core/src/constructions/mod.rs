//! Radial curves, the cat's cradle iteration and the Key Lemma check.

mod cradle;
mod key_lemma;
mod radial;

pub use cradle::{
    cats_cradle, cats_cradle_with_schedule, cradle_domain_containment, ContainmentReport,
    CradleOptions, CradleTrace, HaltReason,
};
pub use key_lemma::{key_lemma_check, KeyLemmaOptions, KeyLemmaReport, KeyLemmaVerdict, Threshold};
pub use radial::{
    radial_curve, radial_monotonicity_check, MonotonicityReport, RadialCurve, RadialOptions,
};
