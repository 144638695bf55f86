use super::*;
use crate::covers::{adversarial_two_cover, kronecker_double_cover, random_two_cover};
use crate::engine::{beliefs, sync_step, Curvature, MessageState};
use crate::experiments::{
    four_chord, pd_triangle, pd_triangle_bad_cover_matrix, random_four, two_node, uniform_triangle,
};
use crate::matrix::Matrix;
use crate::model::EdgeParameters;
use crate::QuadraticModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(rows: &[&[f64]]) -> QuadraticModel<f64> {
    QuadraticModel::with_unit_h(Matrix::from_f64_rows(rows).unwrap()).unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> QuadraticModel<f64> {
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = rng.gen_range(0.5..2.0);
        for j in i + 1..n {
            let v = rng.gen_range(-scale..scale);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let h = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    QuadraticModel::new(g, h).unwrap()
}

#[test]
fn spectral_radius_examples() {
    let z = Matrix::<f64>::zeros(3, 3);
    assert_eq!(spectral_radius_nonneg(&z, 1e-12, 100).unwrap(), 0.0);
    let a = Matrix::<f64>::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 0.6 });
    assert!((spectral_radius_nonneg(&a, 1e-12, 1000).unwrap() - 1.2).abs() < 1e-10);
    let w = walk_matrix(&two_node::<f64>(0.5)).unwrap();
    assert!((spectral_radius_nonneg(&w, 1e-12, 1000).unwrap() - 0.5).abs() < 1e-10);
    let neg = Matrix::from_f64_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]).unwrap();
    assert!(spectral_radius_nonneg(&neg, 1e-12, 100).is_err());
}

#[test]
fn spectral_radius_takes_max_over_components() {
    let a = Matrix::<f64>::from_f64_rows(&[
        &[0.0, 0.3, 0.0, 0.0],
        &[0.3, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.9],
        &[0.0, 0.0, 0.9, 0.0],
    ])
    .unwrap();
    let p = perron(&a, 1e-13, 1000).unwrap();
    assert!((p.rho - 0.9).abs() < 1e-12);
    assert!(p.vector.iter().all(|&v| v > 0.0));
}

#[test]
fn spectral_radius_matches_dense_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let m = random_model(&mut rng, 6, 1.0);
        let w = walk_matrix(&m).unwrap();
        let rho = spectral_radius_nonneg(&w, 1e-13, 100_000).unwrap();
        let eig = crate::dense::symmetric_eigenvalues(&w);
        let dense = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!((rho - dense).abs() < 1e-9, "{rho} vs {dense}");
    }
}

#[test]
fn spectral_radius_reports_non_convergence() {
    let a = Matrix::from_f64_rows(&[&[0.0, 1.0, 0.2], &[1.0, 0.0, 0.7], &[0.2, 0.7, 0.0]]).unwrap();
    match spectral_radius_nonneg(&a, 1e-15, 2) {
        Err(crate::Error::NoConvergence {
            iterations,
            estimate,
        }) => {
            assert_eq!(iterations, 2);
            assert!(estimate > 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn walk_summability_examples() {
    let t = walk_summability(&pd_triangle::<f64>(), 1e-9).unwrap();
    assert_eq!(t.verdict, Verdict::No);
    assert!((t.rho - 1.2).abs() < 1e-10);
    let t = walk_summability(&two_node::<f64>(0.5), 1e-9).unwrap();
    assert!(t.is_walk_summable());
    assert!((t.rho - 0.5).abs() < 1e-10);
    assert!(walk_summability(&four_chord::<f64>(0.2), 1e-9)
        .unwrap()
        .is_walk_summable());
    let bad = model(&[&[0.0, 0.5], &[0.5, 1.0]]);
    assert!(matches!(
        walk_summability(&bad, 1e-9),
        Err(crate::Error::NonPositiveDiagonal(0))
    ));
}

#[test]
fn walk_summability_boundary_is_indeterminate() {
    // ρ(|I − Γ|) = 2·0.5 = 1 exactly
    let t = walk_summability(&uniform_triangle::<f64>(0.5), 1e-9).unwrap();
    assert_eq!(t.verdict, Verdict::Indeterminate);
}

#[test]
fn sdd_witness_examples() {
    let w = sdd_witness(&model(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
    assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    assert!(sdd_witness(&pd_triangle::<f64>()).is_none());
    let m = four_chord::<f64>(0.3);
    let w = sdd_witness(&m).unwrap();
    assert!(is_sdd_witness(&m, &w));
}

#[test]
fn positive_definite_examples() {
    let (pd, l) = positive_definite_check(&pd_triangle::<f64>());
    assert!(pd);
    assert!((l - 0.4).abs() < 1e-12);
    let cover = QuadraticModel::with_unit_h(pd_triangle_bad_cover_matrix::<f64>()).unwrap();
    let (pd, l) = positive_definite_check(&cover);
    assert!(!pd);
    assert!(l <= -0.2 + 1e-12);
    let (pd, l) =
        positive_definite_check(&QuadraticModel::with_unit_h(Matrix::<f64>::identity(4)).unwrap());
    assert!(pd);
    assert!((l - 1.0).abs() < 1e-15);
}

#[test]
fn adversarial_witness_identity() {
    let m = pd_triangle::<f64>();
    let rho = walk_summability(&m, 1e-9).unwrap().rho;
    let z = adversarial_witness(&m).unwrap();
    let cover = adversarial_two_cover(&m);
    let q = cover.model().gamma().quadratic_form(&z);
    assert!((q - (1.0 - rho)).abs() < 1e-8);
    assert!(adversarial_two_cover_lambda_min(&m) <= -0.2 + 1e-6);
}

#[test]
fn adversarial_cover_of_sdd_model_stays_positive_definite() {
    let m = four_chord::<f64>(0.3);
    assert!(sdd_witness(&m).is_some());
    assert!(adversarial_two_cover_lambda_min(&m) > 0.0);
}

#[test]
fn random_covers_of_pd_triangle_include_a_bad_one() {
    let m = pd_triangle::<f64>();
    let bad = (0..100u64)
        .any(|seed| crate::dense::min_eigenvalue(random_two_cover(&m, seed).model().gamma()) < 0.0);
    assert!(bad);
    // the all-swap cover is the Kronecker cover, which is the bad one here
    assert!(crate::dense::min_eigenvalue(kronecker_double_cover(&m).model().gamma()) < 0.0);
}

#[test]
fn equivalence_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..30 {
        let m = random_model(&mut rng, 5, 0.6);
        let walk = walk_summability(&m, 1e-9).unwrap();
        let witness = sdd_witness(&m);
        match walk.verdict {
            Verdict::Yes => {
                yes += 1;
                assert!(witness.is_some());
                assert!(adversarial_two_cover_lambda_min(&m) > 0.0);
                for seed in 0..50 {
                    let c = random_two_cover(&m, seed);
                    assert!(crate::dense::min_eigenvalue(c.model().gamma()) > 0.0);
                }
            }
            Verdict::No => {
                no += 1;
                assert!(witness.is_none());
                let unit = normalized(&m).unwrap();
                let l = adversarial_two_cover_lambda_min(&unit);
                assert!(l <= 1.0 - walk.rho + 1e-9);
                assert!(l < 0.0);
            }
            Verdict::Indeterminate => {}
        }
    }
    assert!(
        yes > 0 && no > 0,
        "corpus should exercise both sides: {yes} {no}"
    );
}

#[test]
fn depth_zero_tree_is_the_root() {
    let m = random_four::<f64>();
    let c = EdgeParameters::uniform(&m, 2.0).unwrap();
    let t = build_computation_tree(&m, &c, 2, 0);
    assert_eq!(t.len(), 1);
    let s = exact_tree_elimination(&t);
    assert_eq!(s.curvature, Curvature::Finite(14.0));
    assert_eq!(s.linear, 1.0);
    assert_eq!(s.lambda_min, 14.0);
}

#[test]
fn min_sum_tree_of_triangle_is_non_backtracking() {
    let m = uniform_triangle::<f64>(0.3);
    let t = build_computation_tree(&m, &EdgeParameters::min_sum(&m), 0, 2);
    let origins: Vec<usize> = t.nodes().iter().map(|n| n.origin).collect();
    assert_eq!(origins, vec![0, 1, 2, 2, 1]);
    let parents: Vec<Option<usize>> = t.nodes().iter().map(|n| n.parent).collect();
    assert_eq!(parents, vec![None, Some(0), Some(0), Some(1), Some(2)]);
    assert!(t.nodes().iter().all(|n| n.weight == 1.0));
}

#[test]
fn reweighted_tree_has_backtracking_copies() {
    let g = Matrix::from_f64_rows(&[&[1.0, 0.2, 0.3], &[0.2, 1.0, 0.1], &[0.3, 0.1, 1.0]]).unwrap();
    let m = QuadraticModel::with_unit_h(g).unwrap();
    let mut by_edge = std::collections::HashMap::new();
    for (i, j, c) in [(0, 1, 2.0), (0, 2, 3.0), (1, 2, 5.0)] {
        by_edge.insert((i, j), c);
    }
    let c = EdgeParameters::new(&m, &crate::ParameterSpec::PerEdge(by_edge)).unwrap();
    let t = build_computation_tree(&m, &c, 0, 2);
    // root, two children, then under each child: one forward and one backtracking copy
    assert_eq!(t.len(), 7);
    let back: Vec<f64> = t
        .nodes()
        .iter()
        .filter(|n| n.level == 2 && n.origin == 0)
        .map(|n| n.weight)
        .collect();
    assert_eq!(back, vec![2.0 * 2.0 - 2.0, 3.0 * 3.0 - 3.0]);
    for n in t.nodes().iter().filter(|n| n.level == 2 && n.origin == 0) {
        assert_eq!(n.diag, n.weight);
    }
}

#[test]
fn two_node_tree_elimination() {
    let m = two_node::<f64>(0.5);
    let t = build_computation_tree(&m, &EdgeParameters::min_sum(&m), 0, 1);
    let s = exact_tree_elimination(&t);
    assert_eq!(s.curvature, Curvature::Finite(0.75));
    assert_eq!(s.linear, 0.5);
}

#[test]
fn tree_matches_engine_beliefs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in [3, 4, 5] {
        let m = random_model(&mut rng, n, 0.5);
        for cval in [1.0, 2.0, -1.0] {
            let c = EdgeParameters::uniform(&m, cval).unwrap();
            let mut s = MessageState::zeros(&m);
            for t in 0..=6 {
                let b = beliefs(&s, &m, &c);
                for root in 0..n {
                    let sol = exact_tree_elimination(&build_computation_tree(&m, &c, root, t));
                    match (b.curvature[root], sol.curvature) {
                        (Curvature::Finite(x), Curvature::Finite(y)) => {
                            assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "A {x} {y}");
                            let (bx, by) = (b.linear[root], sol.linear);
                            assert!((bx - by).abs() <= 1e-10 * bx.abs().max(1.0), "B {bx} {by}");
                        }
                        (Curvature::Unbounded, Curvature::Unbounded) => {}
                        other => panic!("mismatch {other:?}"),
                    }
                }
                s = sync_step(&s, &m, &c);
            }
        }
    }
}

#[test]
fn inertia_lambda_min_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for cval in [1.0, 2.0, 0.5] {
        let m = random_model(&mut rng, 4, 0.8);
        let c = EdgeParameters::uniform(&m, cval).unwrap();
        for depth in 0..4 {
            let t = build_computation_tree(&m, &c, 0, depth);
            let dense = crate::dense::min_eigenvalue(t.to_model().gamma());
            let l = t.lambda_min();
            assert!(
                (l - dense).abs() <= 1e-9 * dense.abs().max(1.0),
                "{l} vs {dense}"
            );
        }
    }
}

#[test]
fn certificate_examples() {
    let dd = model(&[&[2.0, 1.0], &[1.0, 2.0]]);
    assert!(gershgorin_certificate(&dd, 1.0, 1.0).is_some());
    let tri = pd_triangle::<f64>();
    assert!(gershgorin_certificate(&tri, 1.0, 1.0).is_none());
    let cert = gershgorin_certificate(&tri, 5.0, 0.8).unwrap();
    let (leaf, internal, root) = gershgorin_margins(&tri, 5.0, 0.8);
    assert!((internal - (1.0 - 0.75 - 0.1728)).abs() < 1e-12);
    assert!((leaf - 0.25).abs() < 1e-12);
    assert!((root - (1.0 - 0.16 * 1.2)).abs() < 1e-12);
    assert_eq!(cert.slack, internal);
    assert!(gershgorin_certificate(&tri, 0.5, 0.8).is_none());
}

#[test]
fn uniform_r_search() {
    let dd = model(&[&[2.0, 1.0], &[1.0, 2.0]]);
    assert_eq!(find_uniform_r(&dd, 64.0).unwrap().r, 1.0);
    let cert = find_uniform_r(&pd_triangle::<f64>(), 64.0).unwrap();
    assert!(cert.r <= 8.0);
    assert!((cert.s - 1.1).abs() < 1e-12);
    assert!(find_uniform_r(&random_four::<f64>(), 1024.0).is_some());
    assert!(find_uniform_r(&pd_triangle::<f64>(), 2.0).is_none());
}

#[test]
fn certificate_implies_positive_trees() {
    for m in [pd_triangle::<f64>(), four_chord(0.45)] {
        let cert = find_uniform_r(&m, 1024.0).unwrap();
        let c = EdgeParameters::uniform(&m, cert.r).unwrap();
        for root in 0..m.n() {
            for depth in 0..=6 {
                let t = build_computation_tree(&m, &c, root, depth);
                assert!(t.lambda_min() > 0.0);
            }
        }
    }
}

#[test]
fn report_lines() {
    let r = diagnose(&pd_triangle::<f64>(), DEFAULT_R_MAX).unwrap();
    let text = r.to_string();
    assert!(text.contains("PD: yes (lambda_min=0.4)"), "{text}");
    assert!(text.contains("walk-summable: no (rho=1.2)"), "{text}");
    assert!(text.contains("SDD witness: none"));
    assert!(r.adversarial_lambda_min <= -0.2 + 1e-9);
    let r = diagnose(&model(&[&[2.0, 1.0], &[1.0, 2.0]]), DEFAULT_R_MAX).unwrap();
    let text = r.to_string();
    assert!(text.contains("walk-summable: yes"));
    assert!(text.contains("SDD witness: (1, 1)"), "{text}");
}

#[test]
fn fmt_num_trims() {
    assert_eq!(fmt_num(0.39999999999999997), "0.4");
    assert_eq!(fmt_num(1.2000000000000002), "1.2");
    assert_eq!(fmt_num(0.0), "0");
    assert_eq!(fmt_num(-3.5), "-3.5");
}
