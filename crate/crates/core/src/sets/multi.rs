use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    ApproxSet, DirectionNet, FamilyKind, PolytopeSet, Region, SphereSet, REJECTION_BUDGET,
};
use crate::error::{Error, Result};

/// Union of same-family sets at several centers. Member 0 is anchored at the
/// equilibrium; only its failure fails the union. Failed members stay in
/// place (empty) so member indices are stable.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiApprox {
    members: Vec<ApproxSet>,
}

/// What happened to one member during a union update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberChange {
    pub member: usize,
    pub shrink: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face: Option<usize>,
    pub failed: bool,
}

impl MultiApprox {
    pub fn from_members(members: Vec<ApproxSet>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidConfig("at least one member is required".into()))?;
        let (kind, dim) = (first.kind(), first.dim());
        for m in &members {
            if m.kind() != kind {
                return Err(Error::InvalidConfig("members must share one family".into()));
            }
            if m.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        Ok(Self { members })
    }

    pub fn single(set: ApproxSet) -> Self {
        Self { members: vec![set] }
    }

    pub fn spheres(centers: &[Vec<f64>], c: f64) -> Result<Self> {
        Self::from_members(
            centers
                .iter()
                .map(|x| ApproxSet::Sphere(SphereSet::new(x.clone(), c)))
                .collect(),
        )
    }

    pub fn polytopes(centers: &[Vec<f64>], directions: Arc<DirectionNet>, c: f64) -> Result<Self> {
        if centers.iter().any(|x| x.len() != directions.dim()) {
            return Err(Error::Dimension {
                expected: directions.dim(),
                got: centers.iter().map(Vec::len).find(|&l| l != directions.dim()).unwrap_or(0),
            });
        }
        Self::from_members(
            centers
                .iter()
                .map(|x| ApproxSet::Polytope(PolytopeSet::new(x.clone(), Arc::clone(&directions), c)))
                .collect(),
        )
    }

    pub fn members(&self) -> &[ApproxSet] {
        &self.members
    }

    pub fn kind(&self) -> FamilyKind {
        self.members[0].kind()
    }

    pub fn anchor(&self) -> &ApproxSet {
        &self.members[0]
    }

    /// Updates every member containing `p`; members that do not contain it
    /// are left unchanged.
    pub fn update<R: Rng + ?Sized>(
        &self,
        p: &[f64],
        eps: f64,
        rng: &mut R,
    ) -> Result<(MultiApprox, Vec<MemberChange>)> {
        let mut members = self.members.clone();
        let mut changes = Vec::new();
        for (q, m) in self.members.iter().enumerate() {
            if !m.contains(p) {
                continue;
            }
            let up = m.update(p, eps, rng)?;
            changes.push(MemberChange {
                member: q,
                shrink: up.shrink,
                face: up.face,
                failed: up.set.is_failed(),
            });
            members[q] = up.set;
        }
        Ok((MultiApprox { members }, changes))
    }

    /// Exactly uniform draw from the union.
    ///
    /// A member is chosen with probability proportional to the volume of its
    /// proposal region (the ball itself or the polytope's bounding box), a
    /// point is drawn there and kept if it lies in the member, then accepted
    /// with probability `1 / (#members containing it)`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        if self.members.len() == 1 {
            return self.members[0].sample_uniform(rng);
        }
        let mut cumulative = Vec::with_capacity(self.members.len());
        let mut total = 0.0;
        for m in &self.members {
            total += m.proposal_volume();
            cumulative.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::EmptySet);
        }
        for _ in 0..REJECTION_BUDGET {
            let u = rng.random::<f64>() * total;
            let q = cumulative.partition_point(|c| *c <= u).min(self.members.len() - 1);
            let Some(x) = self.members[q].propose(rng) else {
                continue;
            };
            let covering = self.members.iter().filter(|m| m.contains(&x)).count();
            if covering <= 1 || rng.random::<f64>() * (covering as f64) < 1.0 {
                return Ok(x);
            }
        }
        Err(Error::SamplingBudget(REJECTION_BUDGET))
    }

    /// Non-failed members whose sets contain `p`.
    pub fn covering(&self, p: &[f64]) -> usize {
        self.members.iter().filter(|m| m.contains(p)).count()
    }
}

impl Region for MultiApprox {
    fn dim(&self) -> usize {
        self.members[0].dim()
    }

    fn contains(&self, p: &[f64]) -> bool {
        self.members.iter().any(|m| m.contains(p))
    }

    fn is_failed(&self) -> bool {
        self.members[0].is_failed()
    }

    fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut boxes = self.members.iter().filter_map(Region::bounding_box);
        let (mut lo, mut hi) = boxes.next()?;
        for (l, h) in boxes {
            for i in 0..lo.len() {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(h[i]);
            }
        }
        Some((lo, hi))
    }
}

/// Text-serializable form of an approximation: family, centers, the shared
/// direction matrix (polytopes), per-member offsets, and the run parameters
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDocument {
    pub family: FamilyKind,
    pub epsilon: f64,
    pub seed: u64,
    pub centers: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<DirectionNet>,
    /// One entry per member: `[radius]` for balls, the offset vector for
    /// polytopes.
    pub offsets: Vec<Vec<f64>>,
}

impl SetDocument {
    pub fn new(set: &MultiApprox, epsilon: f64, seed: u64) -> Self {
        let centers = set.members.iter().map(|m| m.center().to_vec()).collect();
        let offsets = set
            .members
            .iter()
            .map(|m| match m {
                ApproxSet::Sphere(s) => vec![s.radius],
                ApproxSet::Polytope(p) => p.offsets.clone(),
            })
            .collect();
        let directions = match &set.members[0] {
            ApproxSet::Polytope(p) => Some((*p.directions).clone()),
            ApproxSet::Sphere(_) => None,
        };
        Self {
            family: set.kind(),
            epsilon,
            seed,
            centers,
            directions,
            offsets,
        }
    }

    pub fn to_approx(&self) -> Result<MultiApprox> {
        if self.centers.len() != self.offsets.len() {
            return Err(Error::InvalidConfig(
                "centers and offsets must have the same number of members".into(),
            ));
        }
        match self.family {
            FamilyKind::Sphere => {
                let members = self
                    .centers
                    .iter()
                    .zip(&self.offsets)
                    .map(|(c, b)| match b.as_slice() {
                        [r] => Ok(ApproxSet::Sphere(SphereSet::new(c.clone(), *r))),
                        _ => Err(Error::InvalidConfig("sphere offsets must hold one radius".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                MultiApprox::from_members(members)
            }
            FamilyKind::Polytope => {
                let net = Arc::new(self.directions.clone().ok_or_else(|| {
                    Error::InvalidConfig("polytope document lacks directions".into())
                })?);
                let members = self
                    .centers
                    .iter()
                    .zip(&self.offsets)
                    .map(|(c, b)| {
                        if b.len() != net.len() || c.len() != net.dim() {
                            return Err(Error::InvalidConfig(
                                "polytope offsets or center do not match the directions".into(),
                            ));
                        }
                        Ok(ApproxSet::Polytope(PolytopeSet {
                            center: c.clone(),
                            directions: Arc::clone(&net),
                            offsets: b.clone(),
                        }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MultiApprox::from_members(members)
            }
        }
    }
}
