//! Parametric inner-approximation families: balls and polytopes around a
//! center, their shrink-on-counter-example updates, uniform sampling, and the
//! multi-center union.

mod directions;
mod multi;
mod polytope;
mod sphere;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use directions::{generate_directions, verify_net, DirectionNet, NetCheck, NET_MIN_PROJECTION};
pub use multi::{MemberChange, MultiApprox, SetDocument};
pub use polytope::{PolytopeSet, PolytopeUpdate};
pub use sphere::SphereSet;

use crate::error::{Error, Result};

/// Attempts allowed before rejection sampling gives up.
pub const REJECTION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Sphere,
    Polytope,
}

/// Geometric queries shared by single sets and unions.
pub trait Region {
    fn dim(&self) -> usize;
    fn contains(&self, p: &[f64]) -> bool;
    /// True when the set is empty because of a failed update.
    fn is_failed(&self) -> bool;
    /// Axis-aligned box `(lo, hi)` enclosing the set; `None` when empty.
    fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)>;
}

/// One member of an approximation family.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproxSet {
    Sphere(SphereSet),
    Polytope(PolytopeSet),
}

/// Outcome of shrinking one set past a counter-example.
#[derive(Debug, Clone, PartialEq)]
pub struct SetUpdate {
    pub set: ApproxSet,
    /// Decrease of the moved offset; at least `eps` when the point was inside.
    pub shrink: f64,
    /// Face index for polytopes.
    pub face: Option<usize>,
}

impl ApproxSet {
    pub fn kind(&self) -> FamilyKind {
        match self {
            ApproxSet::Sphere(_) => FamilyKind::Sphere,
            ApproxSet::Polytope(_) => FamilyKind::Polytope,
        }
    }

    pub fn center(&self) -> &[f64] {
        match self {
            ApproxSet::Sphere(s) => &s.center,
            ApproxSet::Polytope(s) => &s.center,
        }
    }

    /// Sum of all offsets (the radius for a ball).
    pub fn offset_mass(&self) -> f64 {
        match self {
            ApproxSet::Sphere(s) => s.radius,
            ApproxSet::Polytope(s) => s.offset_mass(),
        }
    }

    /// Applies the family update for counter-example `p`.
    pub fn update<R: Rng + ?Sized>(&self, p: &[f64], eps: f64, rng: &mut R) -> Result<SetUpdate> {
        match self {
            ApproxSet::Sphere(s) => {
                let (set, shrink) = s.shrink_past(p, eps);
                Ok(SetUpdate {
                    set: ApproxSet::Sphere(set),
                    shrink,
                    face: None,
                })
            }
            ApproxSet::Polytope(s) => {
                let up = s.shrink_past(p, eps, rng)?;
                Ok(SetUpdate {
                    set: ApproxSet::Polytope(up.set),
                    shrink: up.shrink,
                    face: Some(up.face),
                })
            }
        }
    }

    /// A region that contains the set, has a closed-form volume, and can be
    /// sampled directly: the ball itself, or the polytope's bounding box.
    fn proposal_volume(&self) -> f64 {
        match self {
            ApproxSet::Sphere(s) => s.volume(),
            ApproxSet::Polytope(s) => {
                if s.is_failed() {
                    0.0
                } else {
                    (2.0 * s.bounding_radius()).powi(s.dim() as i32)
                }
            }
        }
    }

    /// Draws from the proposal region; `None` if the draw missed the set.
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        match self {
            ApproxSet::Sphere(s) => Some(s.sample(rng)),
            ApproxSet::Polytope(s) => {
                let r = s.bounding_radius();
                let x: Vec<f64> = s
                    .center
                    .iter()
                    .map(|c| c + r * (2.0 * rng.random::<f64>() - 1.0))
                    .collect();
                s.contains(&x).then_some(x)
            }
        }
    }

    /// Exactly uniform draw from the set.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        if self.is_failed() {
            return Err(Error::EmptySet);
        }
        for _ in 0..REJECTION_BUDGET {
            if let Some(x) = self.propose(rng) {
                return Ok(x);
            }
        }
        Err(Error::SamplingBudget(REJECTION_BUDGET))
    }
}

impl Region for ApproxSet {
    fn dim(&self) -> usize {
        self.center().len()
    }

    fn contains(&self, p: &[f64]) -> bool {
        match self {
            ApproxSet::Sphere(s) => s.contains(p),
            ApproxSet::Polytope(s) => s.contains(p),
        }
    }

    fn is_failed(&self) -> bool {
        match self {
            ApproxSet::Sphere(s) => s.is_failed(),
            ApproxSet::Polytope(s) => s.is_failed(),
        }
    }

    fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.is_failed() {
            return None;
        }
        let r = match self {
            ApproxSet::Sphere(s) => s.radius,
            ApproxSet::Polytope(s) => s.bounding_radius(),
        };
        let c = self.center();
        Some((
            c.iter().map(|v| v - r).collect(),
            c.iter().map(|v| v + r).collect(),
        ))
    }
}

/// Monte Carlo volume: hit ratio over the bounding box times the box volume.
pub fn estimate_volume<S: Region + ?Sized, R: Rng + ?Sized>(
    set: &S,
    rng: &mut R,
    n_samples: usize,
) -> f64 {
    let Some((lo, hi)) = set.bounding_box() else {
        return 0.0;
    };
    let n_samples = n_samples.max(1);
    let mut x = vec![0.0; lo.len()];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        for ((xi, l), h) in x.iter_mut().zip(&lo).zip(&hi) {
            *xi = l + (h - l) * rng.random::<f64>();
        }
        if set.contains(&x) {
            hits += 1;
        }
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    box_volume * hits as f64 / n_samples as f64
}

/// Shrink margin plus the optional theory constants it is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPolicy {
    epsilon: f64,
    /// Distance from the equilibrium to the boundary of the shrunken basin.
    pub r: Option<f64>,
    /// Radius of the ball around the equilibrium that must stay inside.
    pub delta: Option<f64>,
}

impl EpsilonPolicy {
    pub fn new(epsilon: f64, r: Option<f64>, delta: Option<f64>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(Self { epsilon, r, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Whether `epsilon` is small enough that an update can never cut into the
/// `delta`-ball: `eps <= r - delta` for balls, `eps <= r/2 - delta` for
/// polytopes.
pub fn check_epsilon_bound(policy: &EpsilonPolicy, family: FamilyKind) -> Result<bool> {
    let (Some(r), Some(delta)) = (policy.r, policy.delta) else {
        return Err(Error::NotCheckable);
    };
    let limit = match family {
        FamilyKind::Sphere => r - delta,
        FamilyKind::Polytope => r / 2.0 - delta,
    };
    Ok(policy.epsilon <= limit)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Volume of the unit ball in `R^d`.
pub(crate) fn unit_ball_volume(d: usize) -> f64 {
    let (mut v, start) = if d.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

#[cfg(test)]
mod tests;
