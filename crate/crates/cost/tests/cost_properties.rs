use std::collections::BTreeMap;
use std::sync::Arc;

use nacy_cost::{
    abelian_cost, abelian_theta_cost, abelian_theta_cost_with_radius, fekete_cost_estimate, mumford_theta_family,
    pairing_cost, theta_labels, verify_cost_bounds, BoundKind, CostError, CostFunction, CostKernel, CostSample,
    MumfordData, PeriodicPl, Provenance, ThetaFamily, ThetaFamilySpec,
};
use nacy_polyhedral::{q_to_f64, qi, segment_complex, Face, IntegralPolyhedralComplex, Q};
use nacy_tropical::{check_valuative_independence, Label, MonomialTerm, TropicalSection};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn polygon_boundary(vs: &[[i64; 2]]) -> IntegralPolyhedralComplex {
    let n = vs.len();
    let cells = (0..n)
        .map(|i| {
            let a = vs[i].iter().map(|&x| qi(x)).collect();
            let b = vs[(i + 1) % n].iter().map(|&x| qi(x)).collect();
            Face::new(vec![a, b], None, 1.0).unwrap()
        })
        .collect();
    IntegralPolyhedralComplex::new(cells, Vec::new()).unwrap()
}

fn p2_pairing() -> CostFunction {
    let source = polygon_boundary(&[[1, 0], [0, 1], [-1, -1]]);
    let target = polygon_boundary(&[[2, -1], [-1, 2], [-1, -1]]);
    pairing_cost(Arc::new(source), Arc::new(target)).unwrap()
}

#[test]
fn pairing_examples() {
    let c = p2_pairing();
    assert_eq!(c.eval(&[1.0, 0.0], &[2.0, -1.0]), 2.0);
    assert_eq!(c.eval(&[1.0, 0.0], &[-1.0, -1.0]), -1.0);
    assert_eq!(c.provenance, Provenance::Pairing);
    let segment = segment_complex(qi(0), qi(1), false).unwrap();
    assert!(matches!(
        pairing_cost(c.source.clone(), Arc::new(segment)),
        Err(CostError::DimensionMismatch { source_dim: 2, target_dim: 1 })
    ));
}

#[test]
fn pairing_role_swap_is_exact() {
    let c = p2_pairing();
    let s = c.swapped();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let p = [rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0)];
        assert_eq!(s.eval(&p, &x).to_bits(), c.eval(&x, &p).to_bits());
    }
    // Source vertices have norm at most sqrt(2).
    assert!((s.lipschitz_x - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn pairing_lipschitz_sampled() {
    let c = p2_pairing();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        // Two points on the edge from (1, 0) to (0, 1).
        let (s, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let x: [f64; 2] = [1.0 - s, s];
        let y: [f64; 2] = [1.0 - t, t];
        let p = [rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0)];
        let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        assert!((c.eval(&x, &p) - c.eval(&y, &p)).abs() <= c.lipschitz_x * d + 1e-12);
    }
}

/// `−min_γ (x(p+γ) + Φ(p+γ)) + min_γ (xγ + Φ(γ))` over `γ ∈ g·[−50, 50]`, exactly.
fn brute_force_cost(f: &PeriodicPl, x: Q, p: Q) -> Q {
    let min_over = |p: Q| {
        (-50..=50)
            .map(|j| {
                let m = p + qi(j * f.period);
                x * m + f.value_q(m)
            })
            .min()
            .unwrap()
    };
    min_over(Q::from_integer(0)) - min_over(p)
}

fn mixed_data() -> MumfordData {
    MumfordData::new(vec![PeriodicPl::triangular(), PeriodicPl::new(2, vec![0, 1], vec![0, 1], 2, 0).unwrap()]).unwrap()
}

#[test]
fn triangular_origin_matches_brute_force() {
    let d = MumfordData::triangular(1);
    let brute = brute_force_cost(&d.factors[0], qi(0), qi(0));
    assert_eq!(brute, qi(0));
    assert_eq!(abelian_theta_cost(&d, &[0.0], &[0.0]).unwrap(), 0.0);
}

#[test]
fn abelian_cost_is_symmetric_for_triangular_data() {
    let d = MumfordData::triangular(1);
    for i in 0..=16 {
        for j in 0..=16 {
            let (x, p) = (i as f64 / 16.0, j as f64 / 16.0);
            let a = abelian_theta_cost(&d, &[x], &[p]).unwrap();
            let b = abelian_theta_cost(&d, &[p], &[x]).unwrap();
            assert!((a - b).abs() < 1e-14, "{x} {p}: {a} vs {b}");
        }
    }
}

#[test]
fn window_doubling_is_bit_exact() {
    let d = mixed_data();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0)];
        let p = [rng.gen_range(-3.0..3.0), rng.gen_range(-5.0..5.0)];
        let base = abelian_theta_cost_with_radius(&d, &x, &p, 4).unwrap();
        for r in [1, 2, 8, 64, 1024] {
            assert_eq!(abelian_theta_cost_with_radius(&d, &x, &p, r).unwrap().to_bits(), base.to_bits());
        }
    }
}

#[test]
fn theta_family_matches_closed_form() {
    let d = mixed_data();
    let fam = mumford_theta_family(&d, &[1, 2, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for l in [1u32, 2, 3] {
        for p in theta_labels(&d, l) {
            let pf: Vec<f64> = p.iter().map(q_to_f64).collect();
            for _ in 0..5 {
                let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0)];
                let e = fekete_cost_estimate(&fam, &x, &pf, &[l]).unwrap();
                let c = abelian_theta_cost(&d, &x, &pf).unwrap();
                assert!((e.estimate - c).abs() < 1e-9, "l={l} p={pf:?} x={x:?}: {} vs {c}", e.estimate);
            }
        }
    }
}

#[test]
fn theta_family_is_level_homogeneous_on_integral_labels() {
    let d = MumfordData::triangular(1);
    let fam = mumford_theta_family(&d, &[1, 2, 4, 8]).unwrap();
    let e = fekete_cost_estimate(&fam, &[0.3], &[0.0], &[1, 2, 4, 8]).unwrap();
    for v in &e.per_level {
        assert!((v - e.per_level[0]).abs() < 1e-12);
    }
    // p = 1/2 is a label at every even level.
    let e = fekete_cost_estimate(&fam, &[0.3], &[0.5], &[2, 4, 8]).unwrap();
    assert!(e.per_level.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
    assert_eq!(e.labels[0], vec!["1/2".to_string()]);
}

#[test]
fn theta_counts_and_independence() {
    let d = MumfordData::triangular(1);
    let fam = mumford_theta_family(&d, &[1, 2, 3]).unwrap();
    let source = d.source_complex().unwrap();
    for l in 1..=3 {
        let secs = fam.sections(l).unwrap();
        assert_eq!(secs.len(), l as usize);
        for cell in source.cells() {
            assert!(check_valuative_independence(secs, cell, fam.coeffs()).unwrap().is_independent());
        }
    }
    let d2 = mixed_data();
    let fam2 = mumford_theta_family(&d2, &[1, 2]).unwrap();
    let source2 = d2.source_complex().unwrap();
    for l in 1..=2 {
        for &c in &source2.top_cells() {
            let secs = fam2.sections(l).unwrap();
            assert!(check_valuative_independence(secs, &source2.cells()[c], fam2.coeffs()).unwrap().is_independent());
        }
    }
}

fn random_samples(d: &MumfordData, fam: &ThetaFamily, n: usize, seed: u64) -> Vec<CostSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = d.source_periods();
    (0..n)
        .map(|_| {
            let l = rng.gen_range(1..=3u32);
            let l2 = rng.gen_range(1..=3u32);
            let pick = |rng: &mut ChaCha8Rng, l: u32| {
                let labels = fam.sections(l).unwrap();
                let i = rng.gen_range(0..labels.len());
                fam.label(l, i).unwrap().to_vec()
            };
            let p = pick(&mut rng, l);
            let p2 = pick(&mut rng, l2);
            let x = a.iter().map(|&ai| rng.gen_range(0.0..ai as f64)).collect();
            CostSample { x, p, level: l, partner: Some((p2, l2)) }
        })
        .collect()
}

#[test]
fn abelian_bounds_hold() {
    for d in [MumfordData::triangular(1), mixed_data()] {
        let fam = mumford_theta_family(&d, &[1, 2, 3, 4, 5, 6]).unwrap();
        let cost = abelian_cost(&d).unwrap();
        let report = verify_cost_bounds(&fam, &cost, &random_samples(&d, &fam, 400, 1), 1e-9).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());
        assert_eq!(report.lower_bound_checks, 400);
        assert!(report.subadditivity_checks > 50);
    }
}

#[test]
fn corrupted_level_is_reported() {
    let d = MumfordData::triangular(1);
    let fam = mumford_theta_family(&d, &[1, 2]).unwrap();
    let mut levels = fam.levels_map().clone();
    for s in levels.get_mut(&2).unwrap() {
        for t in &mut s.terms {
            t.t_order -= 5;
        }
    }
    let bad = ThetaFamily::new(1, levels, fam.coeffs().clone())
        .unwrap()
        .with_periods(vec![qi(1)])
        .unwrap()
        .with_reference(vec![qi(0)])
        .unwrap();
    let cost = abelian_cost(&d).unwrap();
    let samples: Vec<CostSample> = (0..8)
        .map(|k| CostSample { x: vec![k as f64 / 8.0], p: vec![qi(0)], level: 1, partner: Some((vec![qi(0)], 1)) })
        .collect();
    let report = verify_cost_bounds(&bad, &cost, &samples, 1e-9).unwrap();
    assert_eq!(report.violations.len(), 8);
    assert!(report.violations.iter().all(|v| v.kind == BoundKind::Subadditivity));
    assert!(verify_cost_bounds(&fam, &cost, &samples, 1e-9).unwrap().passed());
    let missing = [CostSample { x: vec![0.0], p: vec![Q::new(1, 3)], level: 2, partner: None }];
    assert!(matches!(verify_cost_bounds(&fam, &cost, &missing, 1e-9), Err(CostError::InvalidLabel(..))));
}

/// `−val = x·p` scaled by the level, so `−l⁻¹ val` equals the kernel below exactly.
#[derive(Debug)]
struct NegPairing;

impl CostKernel for NegPairing {
    fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        -x[0] * p[0]
    }

    fn name(&self) -> &'static str {
        "neg_pairing"
    }
}

#[test]
fn level_homogeneous_family_is_additive() {
    let mut levels = BTreeMap::new();
    for l in 1..=4u32 {
        let secs = (0..=l as i64)
            .map(|k| {
                let p = Q::new(k, i64::from(l));
                TropicalSection::new(vec![MonomialTerm::new(vec![k], 0, 0)], l, Label::Point(vec![p])).unwrap()
            })
            .collect();
        levels.insert(l, secs);
    }
    let fam = ThetaFamily::new(1, levels, BTreeMap::from([(0, vec![qi(1)])])).unwrap();
    let seg = Arc::new(segment_complex(qi(0), qi(1), false).unwrap());
    let cost = CostFunction {
        source: seg.clone(),
        target: seg,
        kernel: Arc::new(NegPairing),
        lipschitz_x: 1.0,
        provenance: Provenance::Tabulated,
    };
    let mut samples = Vec::new();
    for (l, k, l2, k2) in [(1, 0, 1, 1), (2, 1, 2, 2), (1, 1, 3, 2), (2, 0, 2, 1)] {
        for x in [0.0, 0.25, 0.5, 1.0] {
            samples.push(CostSample {
                x: vec![x],
                p: vec![Q::new(k, l)],
                level: l as u32,
                partner: Some((vec![Q::new(k2, l2)], l2 as u32)),
            });
        }
    }
    let report = verify_cost_bounds(&fam, &cost, &samples, 0.0).unwrap();
    assert!(report.passed(), "{:?}", report.violations);
    assert_eq!(report.subadditivity_checks, samples.len());
    for s in &samples {
        let (p2, l2) = s.partner.clone().unwrap();
        let i = fam.label_index(s.level, &s.p).unwrap();
        let j = fam.label_index(l2, &p2).unwrap();
        let r: Vec<Q> = vec![(qi(i64::from(s.level)) * s.p[0] + qi(i64::from(l2)) * p2[0]) / qi(i64::from(s.level + l2))];
        let m = fam.label_index(s.level + l2, &r).unwrap();
        let lhs = fam.val_q(s.level, i, &[Q::new(1, 3)]).unwrap() + fam.val_q(l2, j, &[Q::new(1, 3)]).unwrap();
        assert_eq!(lhs, fam.val_q(s.level + l2, m, &[Q::new(1, 3)]).unwrap());
    }
}

#[test]
fn theta_family_json_round_trip() {
    let fam = mumford_theta_family(&mixed_data(), &[1, 2]).unwrap();
    let text = serde_json::to_string(&fam.to_spec()).unwrap();
    let back: ThetaFamilySpec = serde_json::from_str(&text).unwrap();
    let fam2 = back.build().unwrap();
    assert_eq!(fam2.levels_map(), fam.levels_map());
    assert_eq!(fam2.periods(), fam.periods());
    assert_eq!(fam2.reference(), fam.reference());
}

fn factor() -> impl Strategy<Value = PeriodicPl> {
    (1i64..=3, 1i64..=3, -2i64..=2, 0i64..=2, -3i64..=3).prop_filter_map("valid", |(g, a, s0, extra, base)| {
        if g >= 2 && extra > 0 {
            let s1 = s0 + extra;
            PeriodicPl::new(g, vec![0, 1], vec![s0, s1], a + extra, base).ok()
        } else {
            PeriodicPl::new(g, vec![0], vec![s0], a, base).ok()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_brute_force(f in factor(), xn in 0i64..=16, pn in -32i64..=32) {
        let d = MumfordData::new(vec![f.clone()]).unwrap();
        let x = Q::new(xn * f.shift, 16);
        let p = Q::new(pn, 8);
        let brute = q_to_f64(&brute_force_cost(&f, x, p));
        let got = abelian_theta_cost(&d, &[q_to_f64(&x)], &[q_to_f64(&p)]).unwrap();
        prop_assert!((got - brute).abs() < 1e-9, "{got} vs {brute}");
    }

    #[test]
    fn periodic_in_p_and_x(f in factor(), x in 0.0f64..1.0, p in -2.0f64..2.0, k in -3i64..=3) {
        let d = MumfordData::new(vec![f.clone()]).unwrap();
        let a = f.shift as f64;
        let base = abelian_theta_cost(&d, &[x * a], &[p]).unwrap();
        let shifted_p = abelian_theta_cost(&d, &[x * a], &[p + (k * f.period) as f64]).unwrap();
        let shifted_x = abelian_theta_cost(&d, &[x * a + (k * f.shift) as f64], &[p]).unwrap();
        prop_assert!((base - shifted_p).abs() < 1e-9);
        prop_assert!((base - shifted_x).abs() < 1e-9);
    }

    #[test]
    fn convex_in_p_on_target_cells(f in factor(), x in 0.0f64..1.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let d = MumfordData::new(vec![f.clone()]).unwrap();
        let x = x * f.shift as f64;
        for (b, e) in f.domains() {
            let (b, e) = (b as f64, e as f64);
            let (p, q) = (b + u * (e - b), b + v * (e - b));
            let c = |p: f64| abelian_theta_cost(&d, &[x], &[p]).unwrap();
            prop_assert!(c(0.5 * (p + q)) <= 0.5 * (c(p) + c(q)) + 1e-12);
        }
    }

    #[test]
    fn lipschitz_in_x(x in 0.0f64..1.0, y in 0.0f64..2.0, x2 in 0.0f64..1.0, y2 in 0.0f64..2.0, p in -1.0f64..1.0, q in 0.0f64..2.0) {
        let d = mixed_data();
        let cost = abelian_cost(&d).unwrap();
        let dist = ((x - x2).powi(2) + (y - y2).powi(2)).sqrt();
        let delta = (cost.eval(&[x, y], &[p, q]) - cost.eval(&[x2, y2], &[p, q])).abs();
        prop_assert!(delta <= cost.lipschitz_x * dist + 1e-12);
    }

    #[test]
    fn subadditivity_along_divisibility(x in 0.0f64..1.0, k in 0i64..2) {
        // −l⁻¹ val is non-increasing along l | 2l for a fixed label.
        let d = MumfordData::triangular(1);
        let fam = mumford_theta_family(&d, &[2, 4, 8]).unwrap();
        let p = k as f64 / 2.0;
        let e = fekete_cost_estimate(&fam, &[x], &[p], &[2, 4, 8]).unwrap();
        prop_assert!(e.per_level.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
