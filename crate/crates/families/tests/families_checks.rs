use nacy_families::*;
use nacy_polyhedral::{qi, Q};
use nacy_transport::{lp_oracle, minimize_kontorovich, LpConfig, SolverConfig};
use nacy_tropical::check_valuative_independence;
use proptest::prelude::*;

const P2: [[i64; 2]; 3] = [[-1, -1], [2, -1], [-1, 2]];

fn verts<const N: usize>(v: [[i64; 2]; N]) -> Vec<Vec<i64>> {
    v.iter().map(|p| p.to_vec()).collect()
}

#[test]
fn projective_plane_dual() {
    let pair = toric_pair(&verts(P2)).unwrap();
    assert_eq!(pair.delta_dual, vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
    assert_eq!(polar_dual(&pair.delta_dual).unwrap(), pair.delta);
    assert_eq!(pair.boundary_volume(), 9.0);
    assert_eq!(pair.boundary.cells().len(), 3);
}

#[test]
fn product_of_lines_dual() {
    let pair = toric_pair(&verts([[-1, -1], [1, -1], [1, 1], [-1, 1]])).unwrap();
    assert_eq!(pair.delta_dual, vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
    assert_eq!(pair.boundary_volume(), 8.0);
}

#[test]
fn non_reflexive_inputs() {
    for bad in [verts([[-2, -1], [2, -1], [2, 1], [-2, 1]]), verts([[0, 0], [1, 0], [0, 1]])] {
        assert!(matches!(toric_pair(&bad), Err(FamilyError::NotReflexive(_))));
    }
    assert!(toric_pair(&[vec![-1, 0], vec![1, 0]]).is_err());
}

#[test]
fn cube_and_octahedron() {
    let mut cube = Vec::new();
    for a in [-1, 1] {
        for b in [-1, 1] {
            for c in [-1, 1] {
                cube.push(vec![a, b, c]);
            }
        }
    }
    let pair = toric_pair(&cube).unwrap();
    assert_eq!(pair.delta_dual.len(), 6);
    assert_eq!(pair.boundary.cells().len(), 12);
    assert_eq!(pair.dual_boundary.cells().len(), 8);
    // 3! vol([−1, 1]³) = 48 and 3! vol(octahedron) = 8.
    assert_eq!(pair.boundary_volume(), 48.0);
    assert_eq!(toric_pair(&pair.delta_dual).unwrap().boundary_volume(), 8.0);
}

proptest! {
    #[test]
    fn unimodular_images_stay_reflexive(a in -3i64..=3, b in -3i64..=3) {
        // [[1, a], [b, 1 + ab]] has determinant one.
        let m = [[1, a], [b, 1 + a * b]];
        let image: Vec<Vec<i64>> = P2.iter().map(|v| vec![m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]).collect();
        let pair = toric_pair(&image).unwrap();
        prop_assert_eq!(pair.delta_dual.len(), 3);
        prop_assert_eq!(polar_dual(&pair.delta_dual).unwrap(), pair.delta.clone());
        prop_assert_eq!(pair.boundary_volume(), 9.0);
    }
}

#[test]
fn toric_problem_matches_the_oracle() {
    let pair = toric_pair(&verts(P2)).unwrap();
    let problem = toric_problem(&pair, &Discretization::new(20, 20).unwrap(), None).unwrap();
    assert_eq!(problem.n_source(), 60);
    assert_eq!(problem.n_target(), 180);
    assert_eq!(problem.ln_norm, 9.0);
    let res = minimize_kontorovich(&problem, &SolverConfig::default()).unwrap();
    let lp = lp_oracle(&problem, LpConfig::default()).unwrap();
    assert!((res.value - lp.primal_value).abs() <= 1e-6 * (1.0 + lp.primal_value.abs()));
}

#[test]
fn toric_boundary_counts_are_exact() {
    let pair = toric_pair(&verts(P2)).unwrap();
    for row in lattice_count_asymptote(&pair.boundary, 9.0, &[8, 16, 32, 64]) {
        assert_eq!(row.count, 9 * row.level as usize);
        assert_eq!(row.rel_error, 0.0);
    }
}

#[test]
fn intermediate_base_and_weight() {
    let data = p3_two_quadrics(12);
    let b = base_complex(&data).unwrap();
    let mut cells: Vec<Vec<Vec<Q>>> = b.cells().iter().map(|c| c.vertices().to_vec()).collect();
    cells.sort();
    let half = Q::new(-1, 2);
    assert_eq!(cells, vec![vec![vec![qi(0), qi(0)], vec![half, qi(0)]], vec![vec![qi(0), qi(0)], vec![qi(0), half]]]);

    let problem = intermediate_family(&data, &Discretization::new(16, 16).unwrap()).unwrap();
    let weighted: f64 = problem.weight.iter().zip(&problem.nu0.weights).map(|(w, n)| w * n).sum();
    assert!((weighted - 1.0).abs() < 1e-12);
    let origin = problem.nu0.index_of(&[qi(0), qi(0)]).unwrap();
    assert_eq!(problem.weight[origin], 1.0);
    let end = problem.nu0.index_of(&[half, qi(0)]).unwrap();
    assert_eq!(problem.weight[end], 0.0);

    let odd = intermediate_family(&data, &Discretization::new(16, 15).unwrap());
    assert!(odd.is_err());
    let bad = IntermediateData { m: 2, d: vec![1, 1, 2], ..p3_two_quadrics(4) };
    assert!(matches!(intermediate_family(&bad, &Discretization::new(4, 4).unwrap()), Err(FamilyError::InvariantViolation(_))));
}

#[test]
fn section_counts_agree() {
    let data = p3_two_quadrics(9);
    let expected = [1, 4, 10, 20, 34, 52, 74, 100, 130];
    for l in 0..=8 {
        let c = section_count(&data, l).unwrap();
        assert_eq!(c.enumerated, c.series, "l = {l}");
        assert_eq!(c.series, expected[l as usize]);
    }
    assert_eq!(section_count(&data, 9), Err(FamilyError::SeriesDepthExceeded { level: 9, depth: 9 }));
}

#[test]
fn intermediate_multiplicities_count_sections() {
    let data = p3_two_quadrics(40);
    let levels = [4, 8, 16, 32];
    let fam = intermediate_theta_family(&data, &levels).unwrap();
    let mut last = f64::INFINITY;
    for l in levels {
        let m = fam.multiplicities(l).unwrap();
        let row = weighted_count(&m, l, data.n, data.ln_norm);
        assert_eq!(row.count as u64, section_count(&data, l).unwrap().series);
        assert!(row.rel_error < last);
        last = row.rel_error;
    }
    // −l⁻¹ val_x = ⟨x, p⟩.
    let i = fam.label_index(4, &[Q::new(-1, 4), qi(0)]).unwrap();
    let v = fam.val(4, i, &[0.25, 0.75]).unwrap();
    assert!((-v / 4.0 + 0.0625).abs() < 1e-15);
}

#[test]
fn mumford_counts_and_independence() {
    let data = nacy_cost::MumfordData::triangular(1);
    let (fam, problem) = mumford_family(&data, &[1, 2, 3], &Discretization::new(8, 12).unwrap()).unwrap();
    for l in 1..=3 {
        assert_eq!(fam.sections(l).unwrap().len(), l as usize);
        for cell in problem.cost.source.cells() {
            let verdict = check_valuative_independence(fam.sections(l).unwrap(), cell, fam.coeffs()).unwrap();
            assert!(verdict.is_independent());
        }
    }
    assert_eq!((problem.n_source(), problem.n_target()), (8, 12));
    assert!(mumford_family(&data, &[], &Discretization::new(8, 8).unwrap()).is_err());
}

#[test]
fn problem_files_round_trip() {
    let specs = [
        r#"{"family":"toric","vertices":[[-1,-1],[2,-1],[-1,2]]}"#,
        r#"{"family":"intermediate","n":2,"m":1,"d":[2,2],"hilbert_m":{"projective":3,"depth":6},"ln_norm":4}"#,
        r#"{"family":"abelian"}"#,
        r#"{"family":"zero"}"#,
    ];
    for s in specs {
        let spec: FamilySpec = serde_json::from_str(s).unwrap();
        let inst = spec.build(&Discretization::new(4, 6).unwrap()).unwrap();
        let file = ProblemFile::from_instance(&inst);
        let text = serde_json::to_string(&file).unwrap();
        let back: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        back.rebuild().unwrap();
        let mut tampered = back.clone();
        tampered.ln_norm += 1.0;
        assert!(tampered.rebuild().is_err());
    }
    assert!(serde_json::from_str::<FamilySpec>(r#"{"family":"zero","extra":1}"#).is_err());
    assert!(serde_json::from_str::<FamilySpec>(r#"{"family":"toric","vertices":[[0,1]],"lnnorm":2}"#).is_err());
}
