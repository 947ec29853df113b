mod common;

use common::*;
use laplacian_simplex::linalg::{self, ones};
use laplacian_simplex::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graphs(max_n: usize) -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2..=max_n)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn random_symmetric(seed: u64, n: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-5.0..5.0));
    (&a + a.transpose()) / 2.0
}

/// Random orthogonal matrix from the QR factorization of a random one.
fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn graph_laplacian_graph_round_trip((seed, n) in graphs(30)) {
        let (g, q) = random_laplacian(seed, n);
        let back = graph_from_laplacian(q.matrix(), &Tolerances::default()).unwrap();
        prop_assert_eq!(back.link_count(), g.link_count());
        for ((i, j), w) in g.links() {
            prop_assert!((back.weight(i, j).unwrap() - w).abs() <= 1e-12);
        }
    }

    #[test]
    fn built_laplacians_validate((seed, n) in graphs(30)) {
        let (_, q) = random_laplacian(seed, n);
        let rep = validate_laplacian(q.matrix(), &Tolerances::default()).unwrap();
        prop_assert!(rep.passed(), "{}", rep.failure_summary());
        prop_assert!(rep.consistent());
    }

    #[test]
    fn parsed_text_validates((seed, n) in graphs(15)) {
        let (g, _) = random_laplacian(seed, n);
        let text: String = g
            .links()
            .map(|((i, j), w)| format!("{} {} {w:e}\n", g.labels()[i], g.labels()[j]))
            .collect();
        let parsed = parse_graph(&text).unwrap();
        let q = build_laplacian(&parsed);
        prop_assert!(validate_laplacian(q.matrix(), &Tolerances::default()).unwrap().passed());
    }

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), n in 1usize..=30) {
        let a = random_symmetric(seed, n);
        let eig = eigh(&SymmetricMatrix::new(a.clone()).unwrap()).unwrap();
        let scale = max_abs(&a);
        prop_assert!(max_abs_diff(&eig.reconstruct(), &a) <= 1e-8 * scale);
        let z = eig.vectors();
        prop_assert!(max_abs_diff(&(z.transpose() * z), &DMatrix::identity(n, n)) <= 1e-10);
        for k in 0..n {
            let residual = &a * z.column(k) - z.column(k) * eig.values()[k];
            prop_assert!(residual.amax() <= 1e-9 * scale);
        }
        prop_assert!(eig.values().as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn shifted_pseudoinverse_matches_spectral((seed, n) in graphs(30)) {
        let (_, q) = random_laplacian(seed, n);
        let eig = eigh(&q.as_symmetric()).unwrap();
        let z = eig.vectors();
        let mut spectral = DMatrix::zeros(n, n);
        for k in 0..n - 1 {
            spectral += z.column(k) * z.column(k).transpose() / eig.values()[k];
        }
        let fast = laplacian_pseudoinverse(&q).unwrap().into_inner();
        prop_assert!(max_abs_diff(&fast, &spectral) <= 1e-8 * max_abs(&spectral));
    }

    #[test]
    fn determinant_matches_cofactors(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-3.0..3.0));
        let expected = cofactor_determinant(&a);
        let got = determinant(&a).unwrap();
        let scale = a.iter().map(|x| x.abs()).fold(1.0, f64::max).powi(n as i32);
        prop_assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1e-3 * scale));
        if n >= 2 {
            let mut swapped = a.clone();
            swapped.swap_rows(0, 1);
            prop_assert!((determinant(&swapped).unwrap() + got).abs() <= 1e-10 * got.abs().max(1e-3 * scale));
        }
    }

    #[test]
    fn resistance_matrix_matches_pairwise((seed, n) in graphs(25)) {
        let (_, q) = random_laplacian(seed, n);
        let omega = resistance_matrix(&q).unwrap();
        for i in 0..n {
            prop_assert_eq!(omega.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(omega.get(i, j), omega.get(j, i));
                if i != j {
                    let pair = effective_resistance(&q, i, j).unwrap();
                    prop_assert!(omega.get(i, j) > 0.0);
                    prop_assert!((omega.get(i, j) - pair).abs() <= 1e-10 * pair);
                }
            }
        }
    }

    #[test]
    fn identity_and_circumcenter_relations((seed, n) in graphs(40)) {
        let (_, q) = random_laplacian(seed, n);
        prop_assert!(verify_fiedler_identity(&q).unwrap().max() <= 1e-8);
        let omega = resistance_matrix(&q).unwrap();
        let b = fiedler_blocks(&q).unwrap();
        prop_assert!((ones(n).dot(&b.r) - 1.0).abs() <= 1e-10);
        prop_assert!(b.radius > 0.0);
        let rom = b.r.dot(&(omega.matrix() * &b.r));
        let lhs = omega.matrix() * &b.r;
        prop_assert!((lhs - ones(n) * rom).amax() <= 1e-8 * rom);
        prop_assert!((b.radius * b.radius - rom / 2.0).abs() <= 1e-8 * rom);
        let bordered = bordered_distance_matrix(omega.matrix());
        prop_assert_eq!(bordered[(0, 0)], 0.0);
        prop_assert!(bordered.row(0).iter().skip(1).all(|&x| x == 1.0));
    }

    #[test]
    fn general_identity_on_laplacians((seed, n) in graphs(20)) {
        let (_, q) = random_laplacian(seed, n);
        let d = resistance_matrix(&q).unwrap().to_distances();
        prop_assert!(verify_identity_general(&q.as_symmetric(), &d).unwrap().max() <= 1e-8);
    }

    #[test]
    fn inverse_resistance_inverts((seed, n) in graphs(20)) {
        let (_, q) = random_laplacian(seed, n);
        let omega = resistance_matrix(&q).unwrap();
        let inv = inverse_resistance_matrix(&q).unwrap();
        let prod = omega.matrix() * inv.as_matrix();
        prop_assert!(max_abs_diff(&prod, &DMatrix::identity(n, n)) <= 1e-8);
    }

    #[test]
    fn resistances_are_metrics((seed, n) in graphs(30)) {
        let (_, q) = random_laplacian(seed, n);
        let omega = resistance_matrix(&q).unwrap();
        for mode in [MetricMode::Plain, MetricMode::Sqrt] {
            let rep = check_metric(omega.matrix(), mode, &Tolerances::default()).unwrap();
            prop_assert!(rep.passed());
            prop_assert_eq!(rep.triples_checked, n * n.saturating_sub(1) * n.saturating_sub(2));
        }
    }

    #[test]
    fn series_parallel_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Circuit::random(&mut rng, 4);
        let q = build_laplacian(&c.to_graph());
        let expected = c.resistance();
        prop_assert!((effective_resistance(&q, 0, 1).unwrap() - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn embedding_is_centered_and_full_rank((seed, n) in graphs(25)) {
        let (_, q) = random_laplacian(seed, n);
        let s = embed_from_laplacian(&q).unwrap();
        prop_assert_eq!(s.vertices().shape(), (n - 1, n));
        prop_assert!(s.centroid().amax() <= 1e-9 * max_abs(s.vertices()));
        let d = s.squared_distances();
        let omega = resistance_matrix(&q).unwrap();
        prop_assert!(relative_diff(d.matrix(), omega.matrix()) <= 1e-9);
    }

    #[test]
    fn bijection_round_trip((seed, n) in graphs(30)) {
        let (_, q) = random_laplacian(seed, n);
        let s = embed_from_laplacian(&q).unwrap();
        let gp = canonical_gram(s.vertices()).unwrap();
        prop_assert!(relative_diff(gp.pinv_gram(), q.matrix()) <= 1e-7);
    }

    #[test]
    fn gram_pair_invariants((seed, n) in graphs(20)) {
        let (_, q) = random_laplacian(seed, n);
        let gp = GramPair::from_laplacian(&q).unwrap();
        let (m, mp) = (gp.gram(), gp.pinv_gram());
        prop_assert!((m * ones(n)).amax() <= 1e-9 * max_abs(m));
        prop_assert!((mp * ones(n)).amax() <= 1e-9 * max_abs(mp));
        let projector = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
        prop_assert!(max_abs_diff(&(m * mp), &projector) <= 1e-9);
    }

    #[test]
    fn canonical_gram_ignores_rigid_motions((seed, n) in graphs(12)) {
        let (_, q) = random_laplacian(seed, n);
        let s = embed_from_laplacian(&q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let dim = n + 2;
        let mut lifted = DMatrix::zeros(dim, n);
        lifted.view_mut((0, 0), (n - 1, n)).copy_from(s.vertices());
        let shift = DVector::from_fn(dim, |_, _| rng.random_range(-10.0..10.0));
        let moved = random_orthogonal(&mut rng, dim) * lifted + shift * ones(n).transpose();
        let a = canonical_gram(s.vertices()).unwrap();
        let b = canonical_gram(&moved).unwrap();
        prop_assert!(max_abs_diff(a.gram(), b.gram()) <= 1e-8 * max_abs(a.gram()).max(1.0));
    }

    #[test]
    fn hyperacute_iff_laplacian(seed in any::<u64>(), n in 3usize..=15, bump in 0.0f64..3.0) {
        let (_, q) = random_laplacian(seed, n);
        let tol = Tolerances::default();
        let gp = GramPair::from_laplacian(&q).unwrap();
        prop_assert!(is_hyperacute(&gp, &tol));
        prop_assert!(validate_laplacian(gp.pinv_gram(), &tol).unwrap().passed());

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let idx = random_subset(&mut rng, n, 3);
        let mut v = DVector::zeros(n);
        v[idx[0]] = 1.0;
        v[idx[1]] = 1.0;
        v[idx[2]] = -2.0;
        let scale = max_abs(q.matrix());
        let perturbed = q.matrix() + &v * v.transpose() * (bump * scale);
        let gp = GramPair::from_pinv_gram(&SymmetricMatrix::new(perturbed.clone()).unwrap()).unwrap();
        let hyper = is_hyperacute(&gp, &tol);
        prop_assert_eq!(hyper, validate_laplacian(&perturbed, &tol).unwrap().passed());
        if bump * scale > -q.matrix()[(idx[0], idx[1])] * (1.0 + 1e-6) {
            prop_assert!(!hyper);
        }
    }

    #[test]
    fn angle_labels_follow_pinv_gram_signs((seed, n) in graphs(15)) {
        let (_, q) = random_laplacian(seed, n);
        let gp = GramPair::from_laplacian(&q).unwrap();
        let angles = dihedral_angles(&gp, &Tolerances::default());
        prop_assert_eq!(angles.angles.len(), n * (n - 1) / 2);
        for a in &angles.angles {
            let x = gp.pinv_gram()[(a.i, a.j)];
            let expected = if x > angles.tolerance {
                AngleKind::Obtuse
            } else if x < -angles.tolerance {
                AngleKind::Acute
            } else {
                AngleKind::Right
            };
            prop_assert_eq!(a.kind, expected);
        }
    }

    #[test]
    fn faces_compose((seed, n) in graphs(15)) {
        let (_, q) = random_laplacian(seed, n);
        let gp = GramPair::from_laplacian(&q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let outer = random_subset(&mut rng, n, 2);
        let pick = random_subset(&mut rng, outer.len(), 2);
        let inner: Vec<usize> = pick.iter().map(|&p| outer[p]).collect();
        let staged = face_gram(&face_gram(&gp, &outer).unwrap(), &pick).unwrap();
        let direct = face_gram(&gp, &inner).unwrap();
        prop_assert!(max_abs_diff(staged.gram(), direct.gram()) <= 1e-10 * max_abs(direct.gram()).max(1.0));

        let d = gp.squared_distances();
        let fd = face_distance(&d, &inner).unwrap();
        prop_assert!(max_abs_diff(direct.squared_distances().matrix(), fd.matrix()) <= 1e-9 * max_abs(fd.matrix()));
    }

    #[test]
    fn faces_of_hyperacute_simplices_are_hyperacute((seed, n) in graphs(15)) {
        let (_, q) = random_laplacian(seed, n);
        let gp = GramPair::from_laplacian(&q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let subset = random_subset(&mut rng, n, 2);
        prop_assert!(is_hyperacute(&face_gram(&gp, &subset).unwrap(), &Tolerances::default()));
    }

    #[test]
    fn volume_ignores_relabeling((seed, n) in graphs(10)) {
        use rand::seq::SliceRandom;
        let (_, q) = random_laplacian(seed, n);
        let d = resistance_matrix(&q).unwrap().to_distances();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 4));
        let permuted = SquaredDistanceMatrix::new(DMatrix::from_fn(n, n, |i, j| d.matrix()[(perm[i], perm[j])])).unwrap();
        let (a, b) = (cayley_menger_volume(&d).unwrap(), cayley_menger_volume(&permuted).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn schur_closure_and_equivalence((seed, n) in graphs(25)) {
        let (_, q) = random_laplacian(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let kept = random_subset(&mut rng, n, 2);
        let r = schur_complement(&q, &kept).unwrap();
        prop_assert!(validate_laplacian(r.laplacian.matrix(), &Tolerances::default()).unwrap().passed());
        let via = schur_via_pinv(&q, &kept).unwrap();
        prop_assert!(relative_diff(via.matrix(), r.laplacian.matrix()) <= 1e-8);
        prop_assert!(check_resistance_preservation(&q, &kept).unwrap() <= 1e-9);
    }

    #[test]
    fn quotient_property((seed, n) in graphs(20)) {
        let (_, q) = random_laplacian(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
        let outer = random_subset(&mut rng, n, 2);
        let pick = random_subset(&mut rng, outer.len(), 2);
        let inner: Vec<usize> = pick.iter().map(|&p| outer[p]).collect();
        let rep = check_quotient(&q, &outer, &inner, seed).unwrap();
        prop_assert!(rep.max_difference() <= 1e-9);
        let again = check_quotient(&q, &outer, &inner, seed).unwrap();
        prop_assert_eq!(rep.elimination_order, again.elimination_order);
    }

    #[test]
    fn reduced_faces_are_hyperacute((seed, n) in graphs(20)) {
        let (_, q) = random_laplacian(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let kept = random_subset(&mut rng, n, 2);
        let reduced = schur_complement(&q, &kept).unwrap().laplacian;
        let face = face_gram(&GramPair::from_laplacian(&q).unwrap(), &kept).unwrap();
        prop_assert!(relative_diff(face.pinv_gram(), reduced.matrix()) <= 1e-8);
        let gp = GramPair::from_laplacian(&reduced).unwrap();
        prop_assert_eq!(dihedral_angles(&gp, &Tolerances::default()).obtuse().count(), 0);
    }

    #[test]
    fn single_node_elimination_matches_schur((seed, n) in (any::<u64>(), 3usize..=20)) {
        let (_, q) = random_laplacian(seed, n);
        let v = (seed % n as u64) as usize;
        let kept: Vec<usize> = (0..n).filter(|&i| i != v).collect();
        let single = kron_reduce_single(&q, v).unwrap();
        let full = schur_complement(&q, &kept).unwrap();
        prop_assert!(relative_diff(single.laplacian.matrix(), full.laplacian.matrix()) <= 1e-12);
    }
}

#[test]
fn pseudoinverse_is_cached_and_consistent() {
    let (_, q) = random_laplacian(11, 12);
    let a = q.pseudoinverse().unwrap() as *const _;
    let b = q.pseudoinverse().unwrap() as *const _;
    assert_eq!(a, b);
    let p = linalg::spectral_pseudoinverse(&q.as_symmetric()).unwrap();
    assert!(relative_diff(q.pseudoinverse().unwrap(), p.as_matrix()) <= 1e-8);
}
