//! Inner approximations of the region of attraction of a stable equilibrium,
//! learned from finite sampled trajectories.
//!
//! A candidate set (a ball, a polytope, or a union of either around several
//! centers) is shrunk every time a uniformly drawn point inside it fails to
//! return to the set within `k` sampling steps. Once no such point turns up
//! for long enough, the surviving set is a statistically certified
//! `k`-recurrent set, which lies inside the basin of attraction.
//!
//! ```
//! use roa_core::{learn, LearnerConfig, VectorField, Family};
//!
//! let field = VectorField::Linear { rate: 1.0, dim: 2 };
//! let mut cfg = LearnerConfig::new(Family::Sphere);
//! cfg.c = 2.0;
//! cfg.k = 10;
//! cfg.stop_after = 200;
//! let run = learn(&cfg, &field).unwrap();
//! assert_eq!(run.stats.counter_examples, 0);
//! ```

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod groundtruth;
pub mod integrate;
pub mod learner;
pub mod rng;
pub mod sets;

pub use dynamics::VectorField;
pub use error::{Error, ParseError, Result};
pub use groundtruth::{
    compare, grid_classify, verify_recurrence, CompareMetrics, GridClassification, GridSpec,
    GroundTruthStop, Label, RecurrenceReport,
};
pub use integrate::{rk4_step, sample_trajectory, IntegratorConfig, TrajectoryOutcome, Verdict};
pub use learner::{
    classify_sample, learn, learn_with, CenterSpec, Control, Family, LearnEvent, LearnerConfig,
    Outcome, RunResult, RunStats,
};
pub use sets::{
    check_epsilon_bound, estimate_volume, generate_directions, verify_net, ApproxSet,
    DirectionNet, EpsilonPolicy, FamilyKind, MultiApprox, NetCheck, PolytopeSet, Region,
    SetDocument, SphereSet,
};
