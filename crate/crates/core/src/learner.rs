//! The sequential sample / classify / shrink loop with failure detection and
//! `k`-doubling restarts.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::VectorField;
use crate::error::{Error, Result};
use crate::integrate::{sample_trajectory, IntegratorConfig, TrajectoryOutcome, Verdict};
use crate::rng::{stream, Stream};
use crate::sets::{generate_directions, verify_net, MemberChange, MultiApprox, NetCheck, Region};

/// Probe directions used when checking a net in dimension > 2.
const NET_PROBES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Sphere,
    /// Polytope with this many random exploration directions.
    Polytope { directions: usize },
}

/// Where the members of the approximation are centered. The first member is
/// always the equilibrium at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CenterSpec {
    Equilibrium,
    /// `count` members in total; all but the first drawn uniformly in
    /// `[lo, hi]^d`.
    Random { count: usize, lo: f64, hi: f64 },
    /// The equilibrium followed by these extra centers.
    Explicit { extra: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    /// Shrink margin applied past every counter-example.
    pub epsilon: f64,
    /// Initial trajectory length in sampling steps.
    pub k: usize,
    /// Initial radius / offset of every member.
    pub c: f64,
    pub family: Family,
    pub centers: CenterSpec,
    pub seed: u64,
    /// Consecutive recurrent samples that end the run.
    pub stop_after: usize,
    /// Failures tolerated (each one doubles `k`) before giving up.
    pub k_doublings_max: usize,
    pub integrator: IntegratorConfig,
}

impl LearnerConfig {
    /// Defaults: `epsilon = 0.1`, `k = 50`, `c = 3`, `tau_s = 0.5`,
    /// 2000 consecutive recurrent samples, up to 10 doublings.
    pub fn new(family: Family) -> Self {
        Self {
            epsilon: 0.1,
            k: 50,
            c: 3.0,
            family,
            centers: CenterSpec::Equilibrium,
            seed: 0,
            stop_after: 2000,
            k_doublings_max: 10,
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c must be positive");
        }
        if self.stop_after == 0 {
            return bad("stop_after must be at least 1");
        }
        if let Family::Polytope { directions: 0 } = self.family {
            return bad("polytope needs at least one direction");
        }
        match &self.centers {
            CenterSpec::Random { count, lo, hi } => {
                if *count == 0 {
                    return bad("center count must be at least 1");
                }
                if !(lo < hi) {
                    return bad("center region needs lo < hi");
                }
            }
            CenterSpec::Equilibrium | CenterSpec::Explicit { .. } => {}
        }
        self.integrator.validate()
    }

    pub fn member_count(&self) -> usize {
        match &self.centers {
            CenterSpec::Equilibrium => 1,
            CenterSpec::Random { count, .. } => *count,
            CenterSpec::Explicit { extra } => 1 + extra.len(),
        }
    }

    /// Upper bound on counter-examples within one `k`-phase: each update
    /// lowers one offset of one member by at least `epsilon`, starting from
    /// `c`.
    pub fn phase_budget(&self) -> usize {
        let per_offset = (self.c / self.epsilon).ceil() as usize;
        let faces = match self.family {
            Family::Sphere => 1,
            Family::Polytope { directions } => directions,
        };
        per_offset * faces * self.member_count()
    }

    fn resolve_centers(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        let mut centers = vec![vec![0.0; dim]];
        match &self.centers {
            CenterSpec::Equilibrium => {}
            CenterSpec::Random { count, lo, hi } => {
                let mut rng = stream(self.seed, Stream::Centers);
                for _ in 1..*count {
                    centers.push((0..dim).map(|_| rng.random_range(*lo..*hi)).collect());
                }
            }
            CenterSpec::Explicit { extra } => {
                for x in extra {
                    if x.len() != dim {
                        return Err(Error::Dimension {
                            expected: dim,
                            got: x.len(),
                        });
                    }
                    centers.push(x.clone());
                }
            }
        }
        Ok(centers)
    }

    /// The starting set of every phase.
    pub fn initial_set(&self, dim: usize) -> Result<MultiApprox> {
        self.validate()?;
        let centers = self.resolve_centers(dim)?;
        match self.family {
            Family::Sphere => MultiApprox::spheres(&centers, self.c),
            Family::Polytope { directions } => {
                let net = generate_directions(directions, dim, &mut stream(self.seed, Stream::Directions));
                if let NetCheck::Fail(witness) =
                    verify_net(&net, NET_PROBES, &mut stream(self.seed, Stream::NetCheck))
                {
                    return Err(Error::NetNotCovering { witness });
                }
                MultiApprox::polytopes(&centers, Arc::new(net), self.c)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Converged,
    FailedAllDoublings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub counter_examples: usize,
    pub samples: usize,
    /// Sampling steps simulated across all trajectories (not RK4 substeps).
    pub steps_simulated: usize,
    pub avg_steps_per_sample: f64,
    pub k_doublings: usize,
    pub final_k: usize,
    /// Counter-examples found in each `k`-phase, in order.
    pub phase_counter_examples: Vec<usize>,
    /// Whether an observer (rather than the consecutive-sample rule) ended
    /// the run.
    pub stopped_by_observer: bool,
    /// Times an observer rejected a quiescent set and sampling went on.
    pub extensions: usize,
    /// Kept out of serialized output so result documents are reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

/// One counter-example and the update it caused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// 1-based index of the sample across the whole run.
    pub sample: usize,
    pub phase: usize,
    pub k: usize,
    pub point: Vec<f64>,
    pub verdict: Verdict,
    /// Identifier of the set version produced by this update.
    pub snapshot: usize,
    pub changes: Vec<MemberChange>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub initial_set: MultiApprox,
    pub final_set: MultiApprox,
    pub stats: RunStats,
    pub outcome: Outcome,
    pub event_log: Vec<LogEntry>,
}

#[derive(Debug)]
pub enum LearnEvent<'a> {
    PhaseStart {
        phase: usize,
        k: usize,
        set: &'a MultiApprox,
    },
    /// Emitted after the update; `set` is the shrunken set.
    CounterExample {
        entry: &'a LogEntry,
        set: &'a MultiApprox,
    },
    /// The anchor member failed; `next_k` is the length used by the next
    /// phase, or `None` when the doubling budget is exhausted.
    Failure {
        phase: usize,
        next_k: Option<usize>,
    },
    /// `stop_after` consecutive samples were recurrent. The run converges
    /// unless the observer answers [`Control::Extend`].
    Quiescent { samples: usize, set: &'a MultiApprox },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    /// End the run now and report it as converged.
    Stop,
    /// Only meaningful for [`LearnEvent::Quiescent`]: reject convergence and
    /// start counting consecutive recurrent samples afresh.
    Extend,
}

/// Classifies `p` against `set`: recurrent if some `x_n`, `1 <= n <= k`, is
/// back in the set. Divergence counts as a counter-example.
pub fn classify_sample<S: Region + ?Sized>(
    set: &S,
    field: &VectorField,
    p: &[f64],
    k: usize,
    integrator: &IntegratorConfig,
) -> TrajectoryOutcome {
    let mut out = sample_trajectory(field, p, k, integrator, |x| set.contains(x));
    if let Verdict::Diverged(_) = out.verdict {
        out.verdict = Verdict::CounterExample;
    }
    out
}

pub fn learn(cfg: &LearnerConfig, field: &VectorField) -> Result<RunResult> {
    learn_with(cfg, field, |_| Control::Continue)
}

/// Runs the learner, reporting progress to `observer`, which may end the run
/// early (for instance once a ground-truth criterion is met).
pub fn learn_with<F>(cfg: &LearnerConfig, field: &VectorField, mut observer: F) -> Result<RunResult>
where
    F: FnMut(&LearnEvent<'_>) -> Control,
{
    let started = Instant::now();
    let initial = cfg.initial_set(field.dim())?;
    let mut rng = stream(cfg.seed, Stream::Sampling);

    let mut stats = RunStats {
        counter_examples: 0,
        samples: 0,
        steps_simulated: 0,
        avg_steps_per_sample: 0.0,
        k_doublings: 0,
        final_k: cfg.k,
        phase_counter_examples: Vec::new(),
        stopped_by_observer: false,
        extensions: 0,
        wall_time: 0.0,
    };
    let mut log = Vec::new();
    let mut k = cfg.k;
    let mut phase = 0;
    let mut snapshot = 0;

    let (set, outcome) = 'phases: loop {
        let mut set = initial.clone();
        let mut phase_ce = 0;
        let mut consecutive = 0;
        if observer(&LearnEvent::PhaseStart { phase, k, set: &set }) == Control::Stop {
            stats.stopped_by_observer = true;
            stats.phase_counter_examples.push(0);
            break (set, Outcome::Converged);
        }
        loop {
            let p = set.sample_uniform(&mut rng)?;
            stats.samples += 1;
            let traj = sample_trajectory(field, &p, k, &cfg.integrator, |x| set.contains(x));
            stats.steps_simulated += traj.states_visited;
            if traj.verdict.is_recurrent() {
                consecutive += 1;
                if consecutive >= cfg.stop_after {
                    let ev = LearnEvent::Quiescent {
                        samples: stats.samples,
                        set: &set,
                    };
                    if observer(&ev) == Control::Extend {
                        stats.extensions += 1;
                        consecutive = 0;
                        continue;
                    }
                    stats.phase_counter_examples.push(phase_ce);
                    break 'phases (set, Outcome::Converged);
                }
                continue;
            }

            consecutive = 0;
            phase_ce += 1;
            stats.counter_examples += 1;
            snapshot += 1;
            let (next, changes) = set.update(&p, cfg.epsilon, &mut rng)?;
            set = next;
            log.push(LogEntry {
                sample: stats.samples,
                phase,
                k,
                point: p,
                verdict: traj.verdict,
                snapshot,
                changes,
            });

            if set.is_failed() {
                stats.phase_counter_examples.push(phase_ce);
                let exhausted = stats.k_doublings >= cfg.k_doublings_max;
                let next_k = (!exhausted).then(|| k.saturating_mul(2));
                observer(&LearnEvent::Failure { phase, next_k });
                match next_k {
                    None => break 'phases (set, Outcome::FailedAllDoublings),
                    Some(nk) => {
                        k = nk;
                        stats.k_doublings += 1;
                        phase += 1;
                        continue 'phases;
                    }
                }
            }

            let entry = log.last().expect("just pushed");
            if observer(&LearnEvent::CounterExample { entry, set: &set }) == Control::Stop {
                stats.phase_counter_examples.push(phase_ce);
                stats.stopped_by_observer = true;
                break 'phases (set, Outcome::Converged);
            }
        }
    };

    stats.final_k = k;
    stats.avg_steps_per_sample = if stats.samples == 0 {
        0.0
    } else {
        stats.steps_simulated as f64 / stats.samples as f64
    };
    stats.wall_time = started.elapsed().as_secs_f64();
    Ok(RunResult {
        initial_set: initial,
        final_set: set,
        stats,
        outcome,
        event_log: log,
    })
}
