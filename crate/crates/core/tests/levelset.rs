mod support;

use std::collections::HashSet;

use sweeptopo::laplace::{compute_weights, solve_sweep, WeightScheme};
use sweeptopo::levelset::{
    analyze_transitions, extract_level_set, extract_sublevel_complex, verify_transitions, EpsilonPolicy,
    LevelSetError, TransitionPattern,
};
use sweeptopo::morse::{classify_all, critical_values, CriticalKind};
use sweeptopo::sweepgen::{generate_box, generate_counterexample, lattice_index, SweepParams};
use sweeptopo::{betti, BettiNumbers, ScalarField, TieBreakField};

fn triangle_area_sum(s: &sweeptopo::levelset::LevelSetSurface) -> f64 {
    s.triangles
        .iter()
        .map(|&[a, b, c]| 0.5 * (s.points[b] - s.points[a]).cross(&(s.points[c] - s.points[a])).norm())
        .sum()
}

#[test]
fn horizontal_slice_of_a_box_is_a_unit_square() {
    let (mesh, _) = generate_box(4, 4, 5).unwrap();
    let f = support::linear_field(&mesh, [0.0, 0.0, 1.0], 0.0);
    let s = extract_level_set(&mesh, &f, 0.5).unwrap();
    assert!(!s.nudged);
    assert_eq!(s.betti(), BettiNumbers::new(1, 0, 0, 0));
    assert_eq!(betti(&s), s.betti());
    assert!(s.points.iter().all(|p| (p.z - 0.5).abs() < 1e-12));
    assert!((triangle_area_sum(&s) - 1.0).abs() < 1e-12);
    assert_eq!(s.max_edge_degree(), 2);
    // The rim is the square's perimeter: 4 sides of 4 cells.
    let rim = s.boundary_edges();
    assert!(!rim.is_empty());
    let rim_len: f64 = rim.iter().map(|&[a, b]| (s.points[a] - s.points[b]).norm()).sum();
    assert!((rim_len - 4.0).abs() < 1e-12, "{rim_len}");
    let unique: HashSet<usize> = s.source_edges.iter().copied().collect();
    assert_eq!(unique.len(), s.points.len());
}

#[test]
fn level_at_a_vertex_value_is_nudged_up() {
    let (mesh, _) = generate_box(4, 4, 4).unwrap();
    let f = support::linear_field(&mesh, [0.0, 0.0, 1.0], 0.0);
    let s = extract_level_set(&mesh, &f, 0.5).unwrap();
    assert!(s.nudged);
    assert!(s.level > 0.5 && s.level < 0.5 + 1e-15);
    assert!(f.values().iter().all(|&x| x != s.level));
    assert_eq!(s.betti(), BettiNumbers::new(1, 0, 0, 0));
}

#[test]
fn sphere_around_the_centre() {
    let (mesh, _) = generate_box(6, 6, 6).unwrap();
    let f = ScalarField::new(
        mesh.positions()
            .iter()
            .map(|p| ((p.x - 0.5).powi(2) + (p.y - 0.5).powi(2) + (p.z - 0.5).powi(2)).sqrt())
            .collect(),
    );
    let s = extract_level_set(&mesh, &f, 0.3).unwrap();
    assert_eq!(s.betti(), BettiNumbers::new(1, 0, 1, 0));
    assert!(s.boundary_edges().is_empty());
    assert_eq!(s.max_edge_degree(), 2);
    let chi = s.points.len() as i64 - s.edge_degrees().len() as i64 + s.triangles.len() as i64;
    assert_eq!(chi, 2);
}

#[test]
fn levels_outside_the_open_range_are_rejected() {
    let (mesh, _) = generate_box(2, 2, 2).unwrap();
    let f = support::linear_field(&mesh, [0.0, 0.0, 1.0], 0.0);
    for a in [0.0, 1.0, -0.1, 2.0, f64::NAN] {
        assert!(matches!(
            extract_level_set(&mesh, &f, a),
            Err(LevelSetError::ValueOutOfRange { .. })
        ));
    }
}

#[test]
fn counterexample_sublevel_complexes() {
    let (mesh, bc) = generate_counterexample(&SweepParams::default()).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Uniform).unwrap();
    let f = solve_sweep(&mesh, &w, &bc, 1e-10).unwrap();
    let report = classify_all(&mesh, &f.clone().into());
    let cv = critical_values(&report);
    assert_eq!(cv.len(), 2);
    let (lo, hi) = (cv[0].value, cv[1].value);
    let at = |a: f64| betti(&extract_sublevel_complex(&mesh, &f, a));
    assert_eq!(at(lo / 2.0), BettiNumbers::new(1, 0, 0, 0));
    assert_eq!(at((lo + hi) / 2.0), BettiNumbers::new(1, 1, 0, 0));
    assert_eq!(at((hi + 1.0) / 2.0), BettiNumbers::new(1, 0, 0, 0));
    assert_eq!(at(1.0), BettiNumbers::new(1, 0, 0, 0));
}

#[test]
fn box_has_no_transitions_and_one_constant_interval() {
    let (mesh, bc) = generate_box(4, 4, 4).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Cotangent).unwrap();
    let f: TieBreakField = solve_sweep(&mesh, &w, &bc, 1e-10).unwrap().into();
    let report = classify_all(&mesh, &f);
    let analysis = verify_transitions(&mesh, &f, &report, EpsilonPolicy::MidGap).unwrap();
    assert!(analysis.transitions.is_empty());
    assert_eq!(analysis.intervals.len(), 1);
    assert!(analysis.all_constant());
    assert_eq!(analysis.intervals[0].betti[0], [1, 0, 0]);
    assert_eq!(analysis.net_delta, [0, 0, 0]);
}

#[test]
fn degenerate_three_way_saddle_is_a_pattern_mismatch() {
    let (mesh, _) = generate_box(4, 4, 4).unwrap();
    let v = lattice_index(4, 4, 2, 2, 2);
    let mut values = vec![1.0; mesh.num_vertices()];
    values[v] = 0.0;
    for (i, j, k) in [(3, 2, 2), (2, 3, 2), (2, 2, 3)] {
        values[lattice_index(4, 4, i, j, k)] = -1.0;
    }
    let f: TieBreakField = ScalarField::new(values).into();
    let report = classify_all(&mesh, &f);
    let analysis = analyze_transitions(&mesh, &f, &report, EpsilonPolicy::MidGap, 3).unwrap();
    assert_eq!(analysis.transitions.len(), 1);
    let t = &analysis.transitions[0];
    assert_eq!((t.vertex, t.kind), (v, CriticalKind::Degenerate));
    // Three small spheres around the minima join into one.
    assert_eq!(t.betti_below, [3, 0, 3]);
    assert_eq!(t.betti_above, [1, 0, 1]);
    assert_eq!(t.pattern, None);
    let err = verify_transitions(&mesh, &f, &report, EpsilonPolicy::MidGap).unwrap_err();
    assert_eq!(
        err,
        LevelSetError::PatternMismatch {
            vertex: v,
            kind: CriticalKind::Degenerate,
            delta: [-2, 0, -2]
        }
    );
}

#[test]
fn fixed_epsilon_matches_mid_gap_on_the_counterexample() {
    let (mesh, bc) = generate_counterexample(&SweepParams::default()).unwrap();
    let w = compute_weights(&mesh, WeightScheme::Uniform).unwrap();
    let f: TieBreakField = solve_sweep(&mesh, &w, &bc, 1e-10).unwrap().into();
    let report = classify_all(&mesh, &f);
    let mid = verify_transitions(&mesh, &f, &report, EpsilonPolicy::MidGap).unwrap();
    let fixed = verify_transitions(&mesh, &f, &report, EpsilonPolicy::Fixed(1e-3)).unwrap();
    let patterns = |a: &sweeptopo::levelset::TransitionAnalysis| a.transitions.iter().map(|t| t.pattern).collect::<Vec<_>>();
    assert_eq!(patterns(&mid), vec![Some(TransitionPattern::GenusUp), Some(TransitionPattern::GenusDown)]);
    assert_eq!(patterns(&mid), patterns(&fixed));
    assert!(fixed.transitions.iter().all(|t| t.level_above - t.level_below <= 2e-3 + 1e-15));
}
