use nacy_polyhedral::{
    build_complex, face_measure, quadrature, rational_points, ComplexSpec, Face, FaceSpec, IntegralPolyhedralComplex,
    MeasureWeights, Q,
};
use proptest::prelude::*;

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn triangle_boundary(v: [[&str; 2]; 3]) -> IntegralPolyhedralComplex {
    let faces = (0..3)
        .map(|i| FaceSpec { vertices: vec![strs(&v[i]), strs(&v[(i + 1) % 3])], multiplicities: None, weight: None })
        .collect();
    build_complex(&ComplexSpec { faces, gluings: vec![] }).unwrap()
}

fn lattice_triangle() -> IntegralPolyhedralComplex {
    let spec = ComplexSpec {
        faces: vec![FaceSpec {
            vertices: vec![strs(&["0", "0"]), strs(&["1", "0"]), strs(&["0", "1"])],
            multiplicities: None,
            weight: None,
        }],
        gluings: vec![],
    };
    build_complex(&spec).unwrap()
}

#[test]
fn boundary_of_reflexive_triangle_has_nine_lattice_points() {
    let c = triangle_boundary([["-1", "-1"], ["2", "-1"], ["-1", "2"]]);
    let pts = rational_points(&c, 1);
    // Oracle: each edge has lattice length 3, so 4 points per edge, and the 3 vertices are shared.
    assert_eq!(pts.len(), 3 * 4 - 3);
    for p in &pts {
        assert!(p.coords.iter().all(|x| x.is_integer()));
    }
}

#[test]
fn face_weights_normalize_proportionally() {
    let spec = ComplexSpec {
        faces: vec![
            FaceSpec { vertices: vec![strs(&["0"]), strs(&["1"])], multiplicities: None, weight: Some(2.0) },
            FaceSpec { vertices: vec![strs(&["1"]), strs(&["2"])], multiplicities: None, weight: Some(1.0) },
        ],
        gluings: vec![],
    };
    let c = build_complex(&spec).unwrap();
    let masses: Vec<f64> = c.cells().iter().map(|f| face_measure(f, f.weight()).unwrap().total_mass).collect();
    let total: f64 = masses.iter().sum();
    assert!((masses[0] / total - 2.0 / 3.0).abs() < 1e-15);
    assert!((masses[1] / total - 1.0 / 3.0).abs() < 1e-15);
    let m = quadrature(&c, Q::new(1, 4), &MeasureWeights::default()).unwrap().normalized().unwrap();
    let left: f64 = m.points.iter().zip(&m.weights).filter(|(p, _)| p[0] < Q::new(1, 1)).map(|(_, w)| w).sum();
    // Half of the shared node belongs to each side.
    let shared = m.point_mass(&[Q::new(1, 1)]);
    assert!((left + shared * 2.0 / 3.0 - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn point_counts_approach_lattice_volume() {
    // Oracle: lattice points of l·conv{0, e1, e2} are (l+1)(l+2)/2; n!·count/l^n → n!·(1/2) = 1.
    let c = lattice_triangle();
    let mut last = f64::INFINITY;
    for l in [4u32, 8, 16, 32] {
        let n = rational_points(&c, l).len();
        let lf = f64::from(l);
        assert_eq!(n as f64, (lf + 1.0) * (lf + 2.0) / 2.0);
        let err = (2.0 * n as f64 / (lf * lf) - 1.0).abs();
        assert!(err < last);
        last = err;
    }
}

#[test]
fn boundary_counts_are_linear_in_level() {
    let c = triangle_boundary([["-1", "-1"], ["2", "-1"], ["-1", "2"]]);
    for l in [1u32, 2, 5, 7] {
        assert_eq!(rational_points(&c, l).len(), 9 * l as usize);
    }
}

#[test]
fn non_integral_gluing_rejected() {
    let spec: ComplexSpec = serde_json::from_str(
        r#"{"faces":[{"vertices":[["0"],["1"]]}],"gluings":[{"from":[["1"]],"matrix":[[2]],"translation":["-1"]}]}"#,
    )
    .unwrap();
    assert!(build_complex(&spec).is_err());
}

#[test]
fn presented_face_rejects_off_simplex_vertices() {
    let v = vec![vec![Q::new(1, 1), Q::new(0, 1)], vec![Q::new(0, 1), Q::new(1, 2)]];
    assert!(Face::new(v, Some(vec![1, 1]), 1.0).is_err());
}

proptest! {
    #[test]
    fn points_at_level_l_persist_at_level_kl(l in 1u32..6, k in 1u32..4) {
        let c = triangle_boundary([["-1", "-1"], ["2", "-1"], ["-1", "2"]]);
        let coarse = rational_points(&c, l);
        let fine = rational_points(&c, k * l);
        for p in coarse {
            prop_assert!(fine.iter().any(|f| f.coords == p.coords));
        }
    }

    #[test]
    fn quadrature_mass_independent_of_resolution(a in 1u32..9, b in 1u32..9) {
        let c = lattice_triangle();
        let ma = quadrature(&c, Q::new(1, i64::from(a)), &MeasureWeights::default()).unwrap().total_mass();
        let mb = quadrature(&c, Q::new(1, i64::from(b)), &MeasureWeights::default()).unwrap().total_mass();
        prop_assert!((ma - 0.5).abs() < 1e-12);
        prop_assert!((ma - mb).abs() < 1e-12);
    }

    #[test]
    fn circle_points_are_canonical(l in 1u32..40) {
        let spec: ComplexSpec = serde_json::from_str(
            r#"{"faces":[{"vertices":[["0"],["1"]]}],"gluings":[{"from":[["1"]],"translation":["-1"]}]}"#,
        ).unwrap();
        let c = build_complex(&spec).unwrap();
        prop_assert_eq!(rational_points(&c, l).len(), l as usize);
    }
}
