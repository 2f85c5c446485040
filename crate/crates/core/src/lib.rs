//! Exact torus GIT and numerical hyperkähler reduction for linear torus
//! actions on `C^n` and its cotangent bundle.
//!
//! Combinatorial questions (stability, unstable loci, stabilizers, strata,
//! compactness) are answered in exact rational arithmetic; moment-map zeros,
//! reduced metrics and Kähler forms are computed in floating point.

pub mod error;
pub mod git;
pub mod json;
pub mod kn;
pub mod lp;
pub mod moment;
pub mod rational;
pub mod reduction;
pub mod rep;
pub mod snf;
pub mod strata;

pub use error::{Error, Result};
pub use git::{
    classify_point, classify_support, kahler_strata, mu_weight, quotient_compact, quotient_smooth, semistable_support,
    stabilizer, unstable_maximal_supports, MuWeight, StabilityVerdict, StabilizerInfo, Status, StratumRecord,
};
pub use kn::{instability_certificate, kn_value, solve_hyperkahler, solve_kahler, KnConfig, KnOutcome, KnStatus};
pub use moment::{flow_trace, hol_moment, j_mu_weight, mu, mu_hyperkahler, psi, JWeight, MomentValue};
pub use rational::{format_rational, parse_rational, Q};
pub use reduction::{
    ambient_potential_check, circle_action_check, horizontal_frame, quaternion_check, zero_section_check, ReducedFrame,
};
pub use rep::{
    act_imaginary, apply_quaternion, doubled_weights, AmbientPoint, Cocharacter, CotangentPoint, IndexSet, Quaternion,
    QuaternionFrame, WeightSystem,
};
pub use strata::{certify_stratum, hirzebruch_suite, hk_candidate_strata, CandidateStatus, HkStratumCandidate};
