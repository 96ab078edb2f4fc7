mod support;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sweeptopo::laplace::{
    check_max_principle, compute_weights, residual_check, solve_sweep, solve_sweep_with_info, EdgeWeights,
    LaplaceError, SweepBoundary, ViolationKind, WeightScheme,
};
use sweeptopo::sweepgen::{generate_box, generate_counterexample, SweepParams};
use sweeptopo::{Point, ScalarField, TetMesh};

fn random_tet(rng: &mut impl Rng) -> TetMesh {
    loop {
        let p: Vec<Point> = (0..4)
            .map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let v = (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0]));
        if v.abs() > 0.05 {
            return TetMesh::new(p, vec![[0, 1, 2, 3]]).unwrap();
        }
    }
}

/// Off-diagonal entries of the P1 stiffness matrix, `-V grad(phi_i) . grad(phi_j)`.
fn stiffness_weight(mesh: &TetMesh, i: usize, j: usize) -> f64 {
    let p = mesh.tet(0).map(|v| mesh.position(v));
    let e = Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
    let inv_t = e.try_inverse().unwrap().transpose();
    let grad = |k: usize| -> Vector3<f64> {
        if k == 0 {
            -(inv_t.column(0) + inv_t.column(1) + inv_t.column(2))
        } else {
            inv_t.column(k - 1).into()
        }
    };
    let vol = e.determinant().abs() / 6.0;
    -vol * grad(i).dot(&grad(j))
}

#[test]
fn cotangent_weights_equal_the_stiffness_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mesh = random_tet(&mut rng);
        let w = compute_weights(&mesh, WeightScheme::Cotangent).unwrap();
        for (e, &[a, b]) in mesh.edges().iter().enumerate() {
            let want = stiffness_weight(&mesh, a, b);
            assert!((w.weight(e) - want).abs() <= 1e-10 * (1.0 + want.abs()), "edge {e}: {} vs {want}", w.weight(e));
        }
    }
}

#[test]
fn uniform_weights_are_all_one() {
    let (mesh, _) = generate_box(2, 3, 2).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Uniform).unwrap();
    assert_eq!(w.len(), mesh.num_edges());
    assert!(w.values().iter().all(|&x| x == 1.0));
    assert!(w.is_non_negative());
}

#[test]
fn positive_dual_weights_are_positive_on_slivers() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let mesh = random_tet(&mut rng);
        let w = compute_weights(&mesh, WeightScheme::PositiveDual).unwrap();
        assert!(w.values().iter().all(|&x| x > 0.0));
    }
}

#[test]
fn cotangent_box_reproduces_the_linear_sweep() {
    let (mesh, bc) = generate_box(4, 4, 4).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Cotangent).unwrap();
    assert!(w.is_non_negative());
    let f = solve_sweep(&mesh, &w, &bc, 1e-12).unwrap();
    for (v, p) in mesh.positions().iter().enumerate() {
        assert!((f.value(v) - p.z).abs() < 1e-8, "vertex {v}: {} vs {}", f.value(v), p.z);
    }
}

#[test]
fn solve_meets_its_residual_contract() {
    let (mesh, bc) = generate_counterexample(&SweepParams::default()).unwrap();
    for scheme in [WeightScheme::Uniform, WeightScheme::Cotangent, WeightScheme::PositiveDual] {
        let w = compute_weights(&mesh, scheme).unwrap();
        let (f, info) = solve_sweep_with_info(&mesh, &w, &bc, 1e-10).unwrap();
        assert!(info.relative_residual <= 1e-10, "{scheme}: {info:?}");
        let check = residual_check(&mesh, &w, &bc, &f);
        assert!(check.passes(1e-10), "{scheme}: {check:?}");
        assert_eq!(check.free_vertices, info.free_vertices);
        for &v in bc.gamma0() {
            assert_eq!(f.value(v), 0.0);
        }
        for &v in bc.gamma1() {
            assert_eq!(f.value(v), 1.0);
        }
    }
}

#[test]
fn max_principle_holds_for_uniform_weights_and_flags_a_spike() {
    let (mesh, bc) = generate_counterexample(&SweepParams::default()).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Uniform).unwrap();
    let f = solve_sweep(&mesh, &w, &bc, 1e-10).unwrap();
    let report = check_max_principle(&mesh, &f, &bc);
    assert!(report.holds(), "{:?}", report.violations);
    assert!(f.values().iter().all(|&x| (0.0..=1.0).contains(&x)));

    let v = (0..mesh.num_vertices()).find(|&v| !mesh.is_boundary_vertex(v)).unwrap();
    let mut spiked = f.clone().into_values();
    spiked[v] += 0.5;
    let report = check_max_principle(&mesh, &ScalarField::new(spiked.clone()), &bc);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].vertex, v);
    assert!(matches!(
        report.violations[0].kind,
        ViolationKind::LocalMaximum | ViolationKind::GlobalMaximum
    ));
    spiked[v] -= 1.0;
    let report = check_max_principle(&mesh, &ScalarField::new(spiked), &bc);
    assert_eq!(report.violations[0].kind, ViolationKind::LocalMinimum);
}

#[test]
fn boundary_sets_are_validated() {
    let (mesh, bc) = generate_box(2, 2, 2).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Uniform).unwrap();
    let solve = |g0: Vec<usize>, g1: Vec<usize>| solve_sweep(&mesh, &w, &SweepBoundary::new(g0, g1), 1e-10);

    assert_eq!(
        solve(vec![], bc.gamma1().to_vec()).unwrap_err(),
        LaplaceError::EmptyBoundarySet { which: "gamma0" }
    );
    let shared = bc.gamma0()[0];
    let mut g1 = bc.gamma1().to_vec();
    g1.push(shared);
    assert_eq!(
        solve(bc.gamma0().to_vec(), g1).unwrap_err(),
        LaplaceError::OverlappingBoundary { vertex: shared }
    );
    let centre = sweeptopo::sweepgen::lattice_index(2, 2, 1, 1, 1);
    assert!(matches!(
        solve(bc.gamma0().to_vec(), vec![centre]).unwrap_err(),
        LaplaceError::NotOnBoundary { vertex, .. } if vertex == centre
    ));
    assert!(matches!(
        solve(bc.gamma0().to_vec(), vec![999]).unwrap_err(),
        LaplaceError::VertexOutOfRange { vertex: 999, .. }
    ));
    // Two opposite top corners do not touch along the boundary.
    let corners = vec![
        sweeptopo::sweepgen::lattice_index(2, 2, 0, 0, 2),
        sweeptopo::sweepgen::lattice_index(2, 2, 2, 2, 2),
    ];
    assert!(matches!(
        solve(bc.gamma0().to_vec(), corners).unwrap_err(),
        LaplaceError::DisconnectedBoundarySet { which: "gamma1", components: 2 }
    ));
    assert_eq!(
        solve_sweep(&mesh, &w, &bc, 0.0).unwrap_err(),
        LaplaceError::BadTolerance(0.0)
    );
    let short = EdgeWeights::from_values(WeightScheme::Uniform, vec![1.0; 3]);
    assert!(matches!(
        solve_sweep(&mesh, &short, &bc, 1e-10).unwrap_err(),
        LaplaceError::WeightCount { found: 3, .. }
    ));
}

#[test]
fn zero_weights_that_cut_off_a_vertex_are_singular() {
    let (mesh, bc) = generate_box(2, 2, 2).unwrap();
    let centre = sweeptopo::sweepgen::lattice_index(2, 2, 1, 1, 1);
    let values = (0..mesh.num_edges())
        .map(|e| if mesh.edges()[e].contains(&centre) { 0.0 } else { 1.0 })
        .collect();
    let w = EdgeWeights::from_values(WeightScheme::Uniform, values);
    assert_eq!(
        solve_sweep(&mesh, &w, &bc, 1e-10).unwrap_err(),
        LaplaceError::SingularSystem { vertex: centre }
    );
}

#[test]
fn flat_tetrahedron_is_degenerate_geometry() {
    let p = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
    ];
    let mesh = TetMesh::new(p, vec![[0, 1, 2, 3]]).unwrap();
    assert_eq!(
        compute_weights(&mesh, WeightScheme::Cotangent).unwrap_err(),
        LaplaceError::DegenerateGeometry { tet: 0 }
    );
}
