//! Characterisation tests and constructions: implementability of a plan,
//! the cheap-talk hull, improvability and the improving mediation plan,
//! the three-way value comparison, and binary crossing conditions.

mod classify;
mod hull;
mod implement;
mod improve;

pub use classify::{
    classify_trichotomy, full_disclosure_optimal, mediation_vs_cheap_talk, mono_crossing, single_crossing_at,
    FullDisclosureReport, MediationReport, MediationVerdict, MonoCrossing, Trichotomy, TrichotomyReport, VALUE_TOL,
};
pub use hull::{cheap_talk_hull, is_full_dimensional, FullDimensionReport, HullReport};
pub use implement::{
    check_honesty_state_dependent, check_implementable, receiver_value, ImplementabilityReport, ObedienceIssue,
    StateHonesty, Verdicts, CT_VARIANCE_TOL, HONESTY_TOL, OBEDIENCE_SLACK, RESIDUAL_TOL,
};
pub use improve::{construct_improving_plan, is_improvable, ImprovementCertificate, Improvability, Witness, STRICT_EPS};
