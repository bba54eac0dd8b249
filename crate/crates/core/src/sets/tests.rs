use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn axis_net() -> Arc<DirectionNet> {
    Arc::new(
        DirectionNet::from_rows(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap(),
    )
}

fn unit_box() -> ApproxSet {
    ApproxSet::Polytope(PolytopeSet::new(vec![0.0, 0.0], axis_net(), 1.0))
}

fn ball(center: Vec<f64>, r: f64) -> ApproxSet {
    ApproxSet::Sphere(SphereSet::new(center, r))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn membership() {
    assert!(ball(vec![0.0, 0.0], 1.0).contains(&[0.5, 0.0]));
    let failed = ball(vec![0.0, 0.0], -0.1);
    assert!(!failed.contains(&[0.0, 0.0]));
    let b = unit_box();
    assert!(b.contains(&[0.9, -0.9]));
    assert!(!b.contains(&[1.1, 0.0]));
}

#[test]
fn sphere_update_arithmetic() {
    let s = ball(vec![0.0, 0.0], 1.5);
    let p = [1.2, 0.0];
    let up = s.update(&p, 0.1, &mut rng(0)).unwrap();
    match &up.set {
        ApproxSet::Sphere(b) => assert!((b.radius - 1.1).abs() < 1e-12),
        _ => unreachable!(),
    }
    assert!(!up.set.contains(&p));
    assert!((up.shrink - 0.4).abs() < 1e-12);
}

#[test]
fn sphere_update_can_fail() {
    let s = ball(vec![0.0, 0.0], 0.05);
    let up = s.update(&[0.03, 0.04], 0.1, &mut rng(0)).unwrap();
    assert!(up.set.is_failed());
    assert!((up.set.offset_mass() + 0.05).abs() < 1e-12);
}

#[test]
fn polytope_update_moves_aligned_face() {
    let p = PolytopeSet::new(vec![1.0, 1.0], axis_net(), 3.0);
    let up = p.shrink_past(&[3.0, 1.0], 0.1, &mut rng(0)).unwrap();
    assert_eq!(up.face, 0);
    assert!((up.set.offsets[0] - 1.9).abs() < 1e-12);
    assert_eq!(&up.set.offsets[1..], &[3.0, 3.0, 3.0]);
    assert!(!up.set.contains(&[3.0, 1.0]));
}

#[test]
fn polytope_update_rejects_center() {
    let p = PolytopeSet::new(vec![0.0, 0.0], axis_net(), 1.0);
    assert!(matches!(
        p.shrink_past(&[0.0, 0.0], 0.1, &mut rng(0)),
        Err(crate::Error::DegenerateCounterExample)
    ));
}

#[test]
fn polytope_ties_split_evenly() {
    let net = Arc::new(DirectionNet::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
    let p = PolytopeSet::new(vec![0.0, 0.0], net, 2.0);
    let x = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
    let mut r = rng(42);
    let trials = 10_000;
    let first = (0..trials)
        .filter(|_| p.shrink_past(&x, 0.1, &mut r).unwrap().face == 0)
        .count();
    let freq = first as f64 / trials as f64;
    assert!((freq - 0.5).abs() <= 0.05, "face 0 frequency {freq}");
}

#[test]
fn multi_update_is_local() {
    let m = MultiApprox::spheres(&[vec![0.0, 0.0], vec![5.0, 0.0]], 1.0).unwrap();
    let (next, changes) = m.update(&[5.5, 0.0], 0.1, &mut rng(0)).unwrap();
    assert_eq!(changes.len(), 1);
    assert_eq!(changes[0].member, 1);
    assert_eq!(next.members()[0], m.members()[0]);
    assert!((next.members()[1].offset_mass() - 0.4).abs() < 1e-12);
}

#[test]
fn multi_update_hits_all_covering_members() {
    let m = MultiApprox::spheres(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap();
    let p = [0.5, 0.1];
    let (next, changes) = m.update(&p, 0.1, &mut rng(0)).unwrap();
    assert_eq!(changes.len(), 2);
    assert!(next.members().iter().all(|s| !s.contains(&p)));
    assert!(!next.contains(&p));
}

#[test]
fn multi_member_failure_is_not_global() {
    let mut members = vec![ball(vec![0.0, 0.0], 1.0), ball(vec![3.0, 0.0], 1.0)];
    members.push(ball(vec![-3.0, 0.0], 0.05));
    let m = MultiApprox::from_members(members).unwrap();
    let (next, changes) = m.update(&[-3.05, 0.0], 0.1, &mut rng(0)).unwrap();
    assert_eq!(changes.len(), 1);
    assert!(changes[0].failed);
    assert!(next.members()[2].is_failed());
    assert!(!next.is_failed());
    // failed members keep their slot
    assert_eq!(next.members().len(), 3);
}

#[test]
fn multi_rejects_mixed_families() {
    let r = MultiApprox::from_members(vec![ball(vec![0.0, 0.0], 1.0), unit_box()]);
    assert!(r.is_err());
}

#[test]
fn ball_sampling_is_uniform() {
    let s = ball(vec![0.0, 0.0], 1.0);
    let mut r = rng(1);
    let n = 100_000;
    let (mut sx, mut sy, mut inner) = (0.0, 0.0, 0usize);
    for _ in 0..n {
        let x = s.sample_uniform(&mut r).unwrap();
        assert!(norm(&x) <= 1.0);
        sx += x[0];
        sy += x[1];
        if norm(&x) <= 0.5 {
            inner += 1;
        }
    }
    assert!((sx / n as f64).abs() < 0.01);
    assert!((sy / n as f64).abs() < 0.01);
    // concentric disks: (0.5 / 1)^2
    let frac = inner as f64 / n as f64;
    assert!((frac - 0.25).abs() <= 0.01, "{frac}");
}

/// Kolmogorov-Smirnov distance of `xs` from the uniform law on [-1, 1].
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = (x + 1.0) / 2.0;
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn box_sampling_is_uniform_per_axis() {
    let b = unit_box();
    let mut r = rng(2);
    let n = 100_000;
    let draws: Vec<Vec<f64>> = (0..n).map(|_| b.sample_uniform(&mut r).unwrap()).collect();
    // 1% critical value of the one-sample KS statistic
    let critical = 1.628 / (n as f64).sqrt();
    for axis in 0..2 {
        let d = ks_uniform(draws.iter().map(|x| x[axis]).collect());
        assert!(d < critical, "axis {axis}: D = {d}, critical {critical}");
    }
}

#[test]
fn union_sampling_has_flat_density() {
    let m = MultiApprox::spheres(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap();
    // lens of two unit disks at distance 1
    let lens = 2.0 * (0.5f64).acos() - 0.5 * 3f64.sqrt();
    let union = 2.0 * PI - lens;
    let mut r = rng(3);
    let n = 100_000;
    let overlap = (0..n)
        .filter(|_| m.covering(&m.sample_uniform(&mut r).unwrap()) == 2)
        .count();
    let inside = overlap as f64 / lens;
    let outside = (n - overlap) as f64 / (union - lens);
    let ratio = inside / outside;
    assert!((ratio - 1.0).abs() <= 0.05, "density ratio {ratio}");
}

#[test]
fn union_sampling_skips_failed_members() {
    let m = MultiApprox::from_members(vec![ball(vec![0.0, 0.0], 1.0), ball(vec![5.0, 5.0], -1.0)])
        .unwrap();
    let mut r = rng(4);
    for _ in 0..1000 {
        let x = m.sample_uniform(&mut r).unwrap();
        assert!(norm(&x) <= 1.0);
    }
}

#[test]
fn sampling_failed_set_errors() {
    assert!(matches!(
        ball(vec![0.0], -1.0).sample_uniform(&mut rng(0)),
        Err(crate::Error::EmptySet)
    ));
}

#[test]
fn volumes() {
    let mut r = rng(5);
    let v = estimate_volume(&ball(vec![0.0, 0.0], 1.0), &mut r, 100_000);
    assert!((v - PI).abs() <= 0.05, "{v}");
    assert_eq!(estimate_volume(&ball(vec![0.0, 0.0], -1.0), &mut r, 1000), 0.0);
    let v = estimate_volume(&unit_box(), &mut r, 100_000);
    assert!((v - 4.0).abs() <= 0.05, "{v}");
    let a = estimate_volume(&unit_box(), &mut rng(9), 1000);
    let b = estimate_volume(&unit_box(), &mut rng(9), 1000);
    assert_eq!(a, b);
}

#[test]
fn unit_ball_volumes() {
    assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
    assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
    assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
}

#[test]
fn epsilon_bound() {
    let p = EpsilonPolicy::new(0.1, Some(0.5), Some(0.1)).unwrap();
    assert!(check_epsilon_bound(&p, FamilyKind::Sphere).unwrap());
    let p = EpsilonPolicy::new(0.1, Some(0.3), Some(0.1)).unwrap();
    assert!(!check_epsilon_bound(&p, FamilyKind::Polytope).unwrap());
    assert!(EpsilonPolicy::new(0.0, Some(1.0), Some(0.1)).is_err());
    let p = EpsilonPolicy::new(0.1, None, Some(0.1)).unwrap();
    assert!(matches!(
        check_epsilon_bound(&p, FamilyKind::Sphere),
        Err(crate::Error::NotCheckable)
    ));
}

fn random_net(seed: u64) -> Arc<DirectionNet> {
    let mut r = rng(seed);
    loop {
        let net = generate_directions(r.random_range(6..40), 2, &mut r);
        if verify_net(&net, 0, &mut r).passed() {
            return Arc::new(net);
        }
    }
}

fn point(r: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| r.random_range(-scale..scale)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn updates_exclude_and_shrink(seed in any::<u64>(), eps in 0.01f64..0.5, polytope in any::<bool>()) {
        let mut r = rng(seed);
        let center = point(&mut r, 2, 1.0);
        let set = if polytope {
            ApproxSet::Polytope(PolytopeSet::new(center, random_net(seed), r.random_range(0.5..3.0)))
        } else {
            ApproxSet::Sphere(SphereSet::new(center, r.random_range(0.5..3.0)))
        };
        let p = set.sample_uniform(&mut r).unwrap();
        let up = set.update(&p, eps, &mut r).unwrap();
        prop_assert!(!up.set.contains(&p));
        prop_assert!(set.offset_mass() - up.set.offset_mass() >= eps - 1e-12);
        for _ in 0..1000 {
            let x = point(&mut r, 2, 6.0);
            prop_assert!(!up.set.contains(&x) || set.contains(&x));
        }
        if let (ApproxSet::Polytope(a), ApproxSet::Polytope(b)) = (&set, &up.set) {
            let moved = a.offsets.iter().zip(&b.offsets).filter(|(u, v)| u != v).count();
            prop_assert!(moved <= 1);
        }
    }

    #[test]
    fn net_projection_bound(seed in any::<u64>()) {
        let net = random_net(seed);
        let mut r = rng(seed ^ 0xabc);
        for _ in 0..200 {
            let p = point(&mut r, 2, 10.0);
            prop_assert!(net.max_projection(&p).1 >= norm(&p) / 2.0 - 1e-12);
        }
    }

    #[test]
    fn document_round_trip_is_bit_exact(seed in any::<u64>(), polytope in any::<bool>(), h in 1usize..4) {
        let mut r = rng(seed);
        let centers: Vec<Vec<f64>> = (0..h).map(|_| point(&mut r, 2, 3.0)).collect();
        let mut m = if polytope {
            MultiApprox::polytopes(&centers, random_net(seed), 2.7).unwrap()
        } else {
            MultiApprox::spheres(&centers, 2.7).unwrap()
        };
        for _ in 0..3 {
            let Ok(p) = m.sample_uniform(&mut r) else {
                break;
            };
            if m.anchor().center() != p.as_slice() {
                m = m.update(&p, 0.1, &mut r).unwrap().0;
            }
        }
        let doc = SetDocument::new(&m, 0.1, seed);
        let text = serde_json::to_string(&doc).unwrap();
        let back: SetDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_approx().unwrap(), m);
    }
}
