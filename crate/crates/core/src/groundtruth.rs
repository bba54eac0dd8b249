//! Reference basin computed by brute-force grid simulation, plus empirical
//! checks of learned sets against it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::VectorField;
use crate::error::{Error, Result};
use crate::integrate::{IntegratorConfig, Stepper};
use crate::learner::{classify_sample, Control, LearnEvent};
use crate::sets::{MultiApprox, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    InRoa,
    NotInRoa,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::InRoa => "in_roa",
            Label::NotInRoa => "not_in_roa",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "in_roa" => Some(Label::InRoa),
            "not_in_roa" => Some(Label::NotInRoa),
            _ => None,
        }
    }
}

/// Tensor grid plus the convergence test applied at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `[lo, hi]` per axis.
    pub bounds: Vec<[f64; 2]>,
    /// Nodes per axis, endpoints included.
    pub resolution: usize,
    /// Simulated time per node.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Distance to the equilibrium that counts as converged.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_horizon() -> f64 {
    30.0
}

fn default_tol() -> f64 {
    0.05
}

impl GridSpec {
    /// 100 x 100 nodes on `[-4, 4]^2`, `T = 30`, `tol = 0.05`.
    pub fn planar_default() -> Self {
        Self {
            bounds: vec![[-4.0, 4.0]; 2],
            resolution: 100,
            horizon: default_horizon(),
            tol: default_tol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() {
            return Err(Error::InvalidConfig("grid needs at least one axis".into()));
        }
        if self.bounds.iter().any(|[lo, hi]| !(lo < hi)) {
            return Err(Error::InvalidConfig("grid bounds need lo < hi".into()));
        }
        if self.resolution < 2 {
            return Err(Error::InvalidConfig("grid resolution must be at least 2".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidConfig("grid horizon must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("grid tol must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `index`, with the last axis varying fastest.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        let step = (self.resolution - 1) as f64;
        for (axis, [lo, hi]) in self.bounds.iter().enumerate().rev() {
            let j = index % self.resolution;
            index /= self.resolution;
            x[axis] = lo + (hi - lo) * j as f64 / step;
        }
        x
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridClassification {
    pub spec: GridSpec,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl GridClassification {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }

    /// Grid nodes with the given label.
    pub fn points_labeled(&self, label: Label) -> impl Iterator<Item = &[f64]> {
        self.points
            .iter()
            .zip(&self.labels)
            .filter(move |(_, l)| **l == label)
            .map(|(p, _)| p.as_slice())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Integrates from `x0` for `horizon`, sampling once per `tau_s`. Converged
/// once two consecutive samples lie within `tol` of the origin, or if the
/// final sample does.
pub fn classify_point(
    field: &VectorField,
    x0: &[f64],
    horizon: f64,
    tol: f64,
    integrator: &IntegratorConfig,
) -> Label {
    let periods = (horizon / integrator.tau_s).ceil() as usize;
    let mut stepper = Stepper::new(field);
    let mut x = x0.to_vec();
    let mut was_close = norm(&x) <= tol;
    for _ in 0..periods {
        if !stepper.advance_period(&mut x, integrator) {
            return Label::NotInRoa;
        }
        let close = norm(&x) <= tol;
        if close && was_close {
            return Label::InRoa;
        }
        was_close = close;
    }
    if was_close {
        Label::InRoa
    } else {
        Label::NotInRoa
    }
}

/// Labels every grid node by simulation. Nodes are independent and run in
/// parallel; the result does not depend on scheduling.
pub fn grid_classify(
    field: &VectorField,
    spec: &GridSpec,
    integrator: &IntegratorConfig,
) -> Result<GridClassification> {
    spec.validate()?;
    integrator.validate()?;
    if spec.dim() != field.dim() {
        return Err(Error::Dimension {
            expected: field.dim(),
            got: spec.dim(),
        });
    }
    let points = spec.points();
    let labels = points
        .par_iter()
        .map(|x| classify_point(field, x, spec.horizon, spec.tol, integrator))
        .collect();
    Ok(GridClassification {
        spec: spec.clone(),
        points,
        labels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub probes: usize,
    pub violations: usize,
    /// The violating probe closest to the equilibrium.
    pub worst_point: Option<Vec<f64>>,
}

/// Draws `n_probe` uniform points from `set` and counts those whose sampled
/// trajectory does not return within `k` steps.
pub fn verify_recurrence<R: Rng + ?Sized>(
    set: &MultiApprox,
    field: &VectorField,
    k: usize,
    integrator: &IntegratorConfig,
    n_probe: usize,
    rng: &mut R,
) -> Result<RecurrenceReport> {
    if set.is_failed() {
        return Err(Error::EmptySet);
    }
    let probes = (0..n_probe)
        .map(|_| set.sample_uniform(rng))
        .collect::<Result<Vec<_>>>()?;
    let violating: Vec<&Vec<f64>> = probes
        .par_iter()
        .filter(|p| !classify_sample(set, field, p, k, integrator).verdict.is_recurrent())
        .collect();
    let worst_point = violating
        .iter()
        .min_by(|a, b| norm(a).total_cmp(&norm(b)))
        .map(|p| p.to_vec());
    Ok(RecurrenceReport {
        probes: n_probe,
        violations: violating.len(),
        worst_point,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareMetrics {
    /// Non-basin grid nodes inside the set.
    pub false_inclusions: usize,
    /// Fraction of basin grid nodes inside the set.
    pub coverage: f64,
    pub in_roa: usize,
    pub contained: usize,
}

pub fn compare<S: Region + ?Sized>(set: &S, grid: &GridClassification) -> Result<CompareMetrics> {
    if set.dim() != grid.spec.dim() {
        return Err(Error::Dimension {
            expected: grid.spec.dim(),
            got: set.dim(),
        });
    }
    let in_roa = grid.count(Label::InRoa);
    if set.is_failed() {
        return Ok(CompareMetrics {
            false_inclusions: 0,
            coverage: 0.0,
            in_roa,
            contained: 0,
        });
    }
    let mut false_inclusions = 0;
    let mut covered = 0;
    for (p, l) in grid.points.iter().zip(&grid.labels) {
        if set.contains(p) {
            match l {
                Label::InRoa => covered += 1,
                Label::NotInRoa => false_inclusions += 1,
            }
        }
    }
    Ok(CompareMetrics {
        false_inclusions,
        coverage: if in_roa == 0 {
            0.0
        } else {
            covered as f64 / in_roa as f64
        },
        in_roa,
        contained: covered + false_inclusions,
    })
}

/// Membership of every grid node in `set`, in grid order.
pub fn region_membership<S: Region + ?Sized>(set: &S, grid: &GridClassification) -> Vec<bool> {
    grid.points.iter().map(|p| set.contains(p)).collect()
}

/// True when no non-basin grid node lies in `set`. Usable as an
/// experiment-style stopping rule for the learner.
pub fn excludes_non_basin<S: Region + ?Sized>(set: &S, grid: &GridClassification) -> bool {
    grid.points_labeled(Label::NotInRoa).all(|p| !set.contains(p))
}

/// Learner observer implementing the experiment-style stop: a quiescent set
/// is only accepted once it excludes every non-basin grid node. After
/// `max_extensions` refusals the set is accepted as is.
pub struct GroundTruthStop {
    non_basin: Vec<Vec<f64>>,
    max_extensions: usize,
    extensions: usize,
}

impl GroundTruthStop {
    pub fn new(grid: &GridClassification, max_extensions: usize) -> Self {
        Self {
            non_basin: grid.points_labeled(Label::NotInRoa).map(<[f64]>::to_vec).collect(),
            max_extensions,
            extensions: 0,
        }
    }

    /// Whether the extension budget ran out before the set was clean.
    pub fn exhausted(&self) -> bool {
        self.extensions >= self.max_extensions
    }

    pub fn observe(&mut self, event: &LearnEvent<'_>) -> Control {
        match event {
            LearnEvent::Quiescent { set, .. } if self.extensions < self.max_extensions => {
                if self.non_basin.iter().any(|p| set.contains(p)) {
                    self.extensions += 1;
                    Control::Extend
                } else {
                    Control::Continue
                }
            }
            _ => Control::Continue,
        }
    }
}
