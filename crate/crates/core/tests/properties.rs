mod support;

use std::io::Cursor;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sweeptopo::homology::Complex;
use sweeptopo::io::native;
use sweeptopo::laplace::{check_max_principle, compute_weights, solve_sweep, WeightScheme};
use sweeptopo::levelset::extract_level_set;
use sweeptopo::morse::{classify_all, Location};
use sweeptopo::sweepgen::{generate_box, generate_counterexample, SweepParams, Warp};
use sweeptopo::tracer::{compute_gradients, trace_to_base, Start};
use sweeptopo::{betti, Point, ScalarField, TetMesh, TieBreakField};

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn costly() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

fn warp() -> impl Strategy<Value = Warp> {
    (0.0..0.3f64, 0.0..0.1f64, -1.0..1.0f64).prop_map(|(bulge, bend, twist)| Warp { bulge, bend, twist })
}

fn painted() -> impl Strategy<Value = SweepParams> {
    (0.0..0.3f64, 0.05..0.3f64, 0.3..1.0f64, 0.3..0.6f64, 0.3..1.0f64, warp()).prop_map(
        |(bar_half_width, arm_half_width, arm_reach, tip_gap, plate_half_width, warp)| SweepParams {
            bar_half_width,
            arm_half_width,
            arm_reach,
            tip_gap,
            plate_half_width,
            warp,
            ..SweepParams::default()
        },
    )
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn sparse_homology_matches_the_dense_oracle(seed in any::<u64>(), p in 0.05..0.6f64) {
        let (mesh, _) = generate_box(2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub = support::random_subcomplex(&mesh, &mut rng, p);
        let b = betti(&sub);
        prop_assert_eq!([b.b0, b.b1, b.b2, b.b3], support::dense_betti(&support::simplices_of(&sub)));
    }

    #[test]
    fn homology_ignores_labels_and_order(seed in any::<u64>(), p in 0.05..0.6f64) {
        let (mesh, _) = generate_box(2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let simplices = support::simplices_of(&support::random_subcomplex(&mesh, &mut rng, p));
        let mut relabel: Vec<usize> = (0..mesh.num_vertices()).collect();
        relabel.shuffle(&mut rng);
        let mut shuffled: Vec<Vec<usize>> = simplices
            .iter()
            .map(|s| {
                let mut s: Vec<usize> = s.iter().map(|&v| relabel[v] + 100).collect();
                s.shuffle(&mut rng);
                s
            })
            .collect();
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(betti(&Complex::from_simplices(&simplices)), betti(&Complex::from_simplices(&shuffled)));
    }

    #[test]
    fn negation_swaps_interior_kinds(seed in any::<u64>()) {
        let (mesh, _) = generate_box(4, 4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: TieBreakField = support::random_field(mesh.num_vertices(), &mut rng).into();
        let up = classify_all(&mesh, &f);
        let down = classify_all(&mesh, &f.negated());
        for (a, b) in up.entries.iter().zip(&down.entries) {
            if a.location == Location::Interior {
                prop_assert_eq!(b.kind, a.kind.dual(), "vertex {}", a.vertex);
            }
        }
    }

    #[test]
    fn level_sets_are_surfaces_on_their_level(seed in any::<u64>(), a in 0.02..0.98f64) {
        let (mesh, _) = generate_box(4, 4, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = support::random_field(mesh.num_vertices(), &mut rng);
        let s = extract_level_set(&mesh, &f, a).unwrap();
        prop_assert!(s.max_edge_degree() <= 2);
        for (p, &e) in s.points.iter().zip(&s.source_edges) {
            let [u, v] = mesh.edges()[e];
            let (pu, pv) = (mesh.position(u), mesh.position(v));
            let t = (p - pu).norm() / (pv - pu).norm();
            prop_assert!(((pu + (pv - pu) * t) - p).norm() < 1e-12);
            let value = f.value(u) + t * (f.value(v) - f.value(u));
            prop_assert!((value - s.level).abs() < 1e-9, "{} vs {}", value, s.level);
        }
    }

    #[test]
    fn gradients_reconstruct_random_fields(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mesh, _) = generate_counterexample(&SweepParams {
            n: 4,
            nz: 3,
            warp: Warp { bulge: 0.2, bend: 0.05, twist: 0.7 },
            ..SweepParams::identity(4, 3)
        })
        .unwrap();
        let f = support::random_field(mesh.num_vertices(), &mut rng);
        let g = compute_gradients(&mesh, &f).unwrap();
        prop_assert!(g.reconstruction_error(&mesh, &f) <= 1e-12);
    }

    #[test]
    fn native_round_trip_is_bit_exact(coords in prop::collection::vec(-1e6..1e6f64, 12)) {
        let mut p: Vec<Point> = coords.chunks(3).map(|c| Point::new(c[0], c[1], c[2])).collect();
        p.push(Point::new(coords[0] + 0.1, coords[1], coords[2]));
        let mesh = TetMesh::new(p, vec![[0, 1, 2, 3]]);
        prop_assume!(mesh.is_ok());
        let mesh = mesh.unwrap();
        let mut buf = Vec::new();
        native::write_mesh(&mut buf, &mesh).unwrap();
        let back = native::read_mesh(Cursor::new(buf)).unwrap();
        for (a, b) in back.positions().iter().zip(mesh.positions()) {
            prop_assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        let f = ScalarField::new(coords.clone());
        let mut buf = Vec::new();
        native::write_field(&mut buf, &f).unwrap();
        let g = native::read_field(Cursor::new(buf)).unwrap();
        prop_assert!(g.values().iter().zip(f.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn nonnegative_weights_obey_the_max_principle(params in painted(), dual in any::<bool>()) {
        let built = generate_counterexample(&params);
        prop_assume!(built.is_ok());
        let (mesh, bc) = built.unwrap();
        let scheme = if dual { WeightScheme::PositiveDual } else { WeightScheme::Uniform };
        let w = compute_weights(&mesh, scheme).unwrap();
        let solved = solve_sweep(&mesh, &w, &bc, 1e-10);
        prop_assume!(solved.is_ok());
        let f = solved.unwrap();
        let report = check_max_principle(&mesh, &f, &bc);
        prop_assert!(report.holds(), "{:?}", &report.violations[..report.violations.len().min(3)]);
    }

    #[test]
    fn descent_paths_never_climb(params in painted(), starts in prop::collection::vec((0.05..0.95f64, 0.05..0.95f64, 0.05..0.95f64), 8)) {
        let built = generate_counterexample(&SweepParams { warp: Warp::default(), ..params });
        prop_assume!(built.is_ok());
        let (mesh, bc) = built.unwrap();
        let w = compute_weights(&mesh, WeightScheme::Uniform).unwrap();
        let solved = solve_sweep(&mesh, &w, &bc, 1e-10);
        prop_assume!(solved.is_ok());
        let f = solved.unwrap();
        let g = compute_gradients(&mesh, &f).unwrap();
        for (x, y, z) in starts {
            let path = trace_to_base(&mesh, &f, &g, Start::Point([x, y, z]));
            prop_assert!(path.values.windows(2).all(|w| w[1] < w[0]));
            prop_assert!(path.values.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        }
    }
}
