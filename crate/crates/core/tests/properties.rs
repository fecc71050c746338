use cesw::families::{
    antisymmetric_direction, counterexample_family, extend_ces, general_family, symmetric_family,
    FamilySpec, DEFAULT_EXTEND_TRIES,
};
use cesw::linalg::{
    conj, det, gram_residual, hermiticity_residual, kron, local_projection, matrix_to_vec,
    min_eigenvalue, null_space, numerical_rank, op_norm, outer, partial_transpose, vec_to_matrix,
};
use cesw::products::{
    build_bx, det_condition, enumerate_class, generic_solutions, sample_orthogonal_products,
    ClassTag, SolutionClassSpec,
};
use cesw::rng::{complex_gaussian_matrix, complex_gaussian_vec, random_unit, stream_rng};
use cesw::search::product_value;
use cesw::spanning::{has_spanning_property, partial_conjugate, span_of_pv};
use cesw::subspace::{is_ces, is_supported, make_subspace, SearchBudget, Subspace};
use cesw::witness::{build_witness, verify_optimal};
use cesw::{CMat, CVec, ToleranceConfig, C64};
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn random_unitary(seed: u64, d: usize) -> CMat {
    let g = complex_gaussian_matrix(&mut stream_rng(seed, 0), d, d);
    g.qr().q()
}

/// `(A ⊗ B) V`, re-orthonormalized.
fn local_transform(v: &Subspace, seed: u64) -> Subspace {
    let mut rng = stream_rng(seed, 0);
    let a = complex_gaussian_matrix(&mut rng, v.m, v.m);
    let b = complex_gaussian_matrix(&mut rng, v.n, v.n);
    let ab = a.kronecker(&b);
    let moved: Vec<CVec> = v.basis.iter().map(|x| &ab * x).collect();
    make_subspace(v.m, v.n, &moved, &tol()).unwrap()
}

fn family_cases() -> Vec<Subspace> {
    let t = tol();
    vec![
        symmetric_family(3, None, &t).unwrap(),
        symmetric_family(4, None, &t).unwrap(),
        general_family(3, 4, &t).unwrap(),
        general_family(3, 5, &t).unwrap(),
        counterexample_family(3, 4, &t).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reshape_round_trip(m in 1usize..6, n in 1usize..6, seed in any::<u64>()) {
        let a = complex_gaussian_matrix(&mut stream_rng(seed, 0), m, n);
        prop_assert_eq!(vec_to_matrix(&matrix_to_vec(&a), m, n).unwrap(), a);
    }

    #[test]
    fn partial_transpose_involution(m in 2usize..5, n in 2usize..5, seed in any::<u64>()) {
        let g = complex_gaussian_matrix(&mut stream_rng(seed, 0), m * n, m * n);
        let h = &g + g.adjoint();
        let pt = partial_transpose(&h, m, n).unwrap();
        prop_assert!(hermiticity_residual(&pt) <= 1e-10);
        prop_assert!((partial_transpose(&pt, m, n).unwrap() - &h).norm() == 0.0);
    }

    #[test]
    fn rank_invariant_under_unitaries(rank in 0usize..6, seed in any::<u64>()) {
        let d = 6;
        let mut rng = stream_rng(seed, 1);
        let low = complex_gaussian_matrix(&mut rng, d, rank) * complex_gaussian_matrix(&mut rng, rank, d);
        let u = random_unitary(seed ^ 1, d);
        let w = random_unitary(seed ^ 2, d);
        prop_assert_eq!(numerical_rank(&low, &tol()), rank);
        prop_assert_eq!(numerical_rank(&(&u * &low * &w), &tol()), rank);
    }

    #[test]
    fn null_space_vectors_annihilated(rows in 1usize..6, cols in 2usize..7, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let r = rows.min(cols - 1);
        let m = complex_gaussian_matrix(&mut rng, rows, r) * complex_gaussian_matrix(&mut rng, r, cols);
        let ns = null_space(&m, &tol());
        prop_assert_eq!(ns.len(), cols - r);
        prop_assert!(gram_residual(&ns) <= 1e-10);
        for v in &ns {
            prop_assert!((&m * v).norm() <= 1e-10 * op_norm(&m));
        }
    }

    #[test]
    fn local_projection_is_psd(m in 2usize..5, n in 2usize..5, dim in 1usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let vs: Vec<CVec> = (0..dim.min(m * n)).map(|_| complex_gaussian_vec(&mut rng, m * n)).collect();
        let v = make_subspace(m, n, &vs, &tol()).unwrap();
        prop_assert!(gram_residual(&v.basis) <= 1e-10);
        let x = complex_gaussian_vec(&mut rng, m);
        let p = local_projection(&v.basis, &x, m, n).unwrap();
        prop_assert!(min_eigenvalue(&p) >= -1e-10);
    }

    #[test]
    fn bx_rows_are_overlaps(seed in any::<u64>()) {
        let v = general_family(3, 5, &tol()).unwrap();
        let mut rng = stream_rng(seed, 0);
        let x = complex_gaussian_vec(&mut rng, 3);
        let f = complex_gaussian_vec(&mut rng, 5);
        let by = build_bx(&v, &x).unwrap() * &f;
        let t = kron(&x, &f);
        for (i, psi) in v.basis.iter().enumerate() {
            prop_assert!((by[i] - psi.dotc(&t)).norm() <= 1e-12);
        }
    }

    #[test]
    fn decomposability_identity(m in 2usize..4, n in 2usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let g = complex_gaussian_matrix(&mut rng, m * n, m * n);
        let q = &g * g.adjoint();
        let w = partial_transpose(&q, m, n).unwrap();
        let e = random_unit(&mut rng, m);
        let f = random_unit(&mut rng, n);
        let lhs = product_value(&w, &e, &f);
        let rhs = product_value(&q, &e, &conj(&f));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
    }

    #[test]
    fn witness_nonnegative_on_separable_states(idx in 0usize..5, seed in any::<u64>()) {
        let v = &family_cases()[idx];
        let wp = build_witness(v, &vec![1.0; v.dim()]).unwrap();
        let mut rng = stream_rng(seed, 0);
        let terms = 1 + (seed as usize % (2 * v.ambient_dim()));
        let mut rho = CMat::zeros(v.ambient_dim(), v.ambient_dim());
        for _ in 0..terms {
            let p = kron(&random_unit(&mut rng, v.m), &random_unit(&mut rng, v.n));
            rho += outer(&p) * C64::new(rand::Rng::random::<f64>(&mut rng), 0.0);
        }
        let tr = rho.trace().re;
        let value = (&wp.w * rho).trace().re / tr;
        prop_assert!(value >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planted_product_breaks_ces(m in 2usize..5, n in 2usize..5, extra in 0usize..3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let mut vs = vec![kron(&complex_gaussian_vec(&mut rng, m), &complex_gaussian_vec(&mut rng, n))];
        for _ in 0..extra {
            vs.push(complex_gaussian_vec(&mut rng, m * n));
        }
        let v = make_subspace(m, n, &vs, &tol()).unwrap();
        let cert = is_ces(&v, &tol(), &SearchBudget::with_seed(seed));
        prop_assert!(!cert.is_ces);
        prop_assert!(cert.best_product_overlap >= 1.0 - 1e-6);
    }

    #[test]
    fn ces_invariant_under_local_maps(idx in 0usize..5, seed in any::<u64>()) {
        let v = &family_cases()[idx];
        let moved = local_transform(v, seed);
        let budget = SearchBudget::with_seed(seed);
        prop_assert_eq!(is_ces(v, &tol(), &budget).is_ces, is_ces(&moved, &tol(), &budget).is_ces);
    }

    #[test]
    fn spanning_invariant_under_local_maps(idx in 0usize..5, seed in any::<u64>()) {
        let v = &family_cases()[idx];
        let moved = local_transform(v, seed);
        let samples = 4 * v.ambient_dim();
        prop_assert_eq!(
            has_spanning_property(v, samples, seed, &tol()).unwrap(),
            has_spanning_property(&moved, samples, seed, &tol()).unwrap()
        );
    }

    #[test]
    fn extension_contains_input(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let v = make_subspace(3, 3, &[random_unit(&mut rng, 9)], &tol()).unwrap();
        let ext = extend_ces(&v, &mut rng, &tol(), &SearchBudget::with_seed(seed), DEFAULT_EXTEND_TRIES).unwrap();
        let p = ext.subspace.projector();
        for b in &v.basis {
            prop_assert!((&p * b - b).norm() <= 1e-10);
        }
        prop_assert!(ext.certificate.is_ces);
    }

    #[test]
    fn sampled_products_are_orthogonal(idx in 0usize..5, seed in any::<u64>()) {
        let v = &family_cases()[idx];
        for p in sample_orthogonal_products(v, 16, seed, &tol()) {
            prop_assert!(p.residual <= 1e-9);
            prop_assert!(v.max_overlap(&p.unit_tensor()) <= 1e-9);
        }
    }

    #[test]
    fn kernel_orthogonal_to_fresh_solutions(idx in 0usize..5, seed in any::<u64>()) {
        let v = &family_cases()[idx];
        let samples = 4 * v.ambient_dim();
        let rep = span_of_pv(v, samples, seed, &tol()).unwrap();
        let fresh = sample_orthogonal_products(v, samples, seed.wrapping_add(1), &tol());
        for p in fresh {
            let row = partial_conjugate(&p).unit_tensor();
            for k in &rep.kernel_basis {
                prop_assert!(k.dotc(&row).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn family_witness_vanishes_on_conjugated_products(idx in 0usize..5, seed in any::<u64>()) {
        let v = &family_cases()[idx];
        let wp = build_witness(v, &vec![1.0; v.dim()]).unwrap();
        for p in sample_orthogonal_products(v, 8, seed, &tol()) {
            let e = p.e.normalize();
            let f = conj(&p.f).normalize();
            prop_assert!(product_value(&wp.w, &e, &f) <= 1e-9);
        }
    }

    #[test]
    fn optimality_invariant_under_weight_scaling(scale in 0.01f64..100.0, seed in 0u64..1000) {
        let v = symmetric_family(3, None, &tol()).unwrap();
        let base = verify_optimal(&build_witness(&v, &[1.0; 3]).unwrap(), &[0.01], 2, seed, &tol()).unwrap();
        let scaled = verify_optimal(&build_witness(&v, &[scale; 3]).unwrap(), &[0.01], 2, seed, &tol()).unwrap();
        prop_assert_eq!(base.all_negative, scaled.all_negative);
    }
}

#[test]
fn family_outputs_are_supported_ces() {
    let t = tol();
    let mut cases: Vec<Subspace> = (3..=6)
        .map(|m| symmetric_family(m, None, &t).unwrap())
        .collect();
    for m in 3..=5 {
        for n in m + 1..=6 {
            cases.push(general_family(m, n, &t).unwrap());
            cases.push(counterexample_family(m, n, &t).unwrap());
        }
    }
    for v in &cases {
        let spec = v.origin.as_ref().unwrap();
        assert!(is_ces(v, &t, &SearchBudget::default()).is_ces, "{spec:?}");
        assert!(is_supported(v, &t), "{spec:?}");
    }
}

#[test]
fn symmetric_generators_orthogonality() {
    for m in 3..=6 {
        let g = FamilySpec::symmetric(m).generators().unwrap();
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    assert!(g[i].dotc(&g[j]).norm() <= 1e-10, "m={m} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn antisymmetric_direction_properties() {
    for (m, n) in [(3, 4), (3, 5), (4, 5), (4, 6)] {
        let psi = antisymmetric_direction(m, n);
        let swap = |v: &CVec| {
            CVec::from_fn(m * n, |k, _| {
                let (i, j) = (k / n, k % n);
                if j < m && i < n {
                    v[j * n + i]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        assert!((swap(&psi) + &psi).norm() <= 1e-10);
        let g = FamilySpec::counterexample(m, n).generators().unwrap();
        for b in &g[..m - 1] {
            assert!(b.dotc(&psi).norm() <= 1e-10);
        }
    }
}

#[test]
fn det_condition_tracks_bx_determinant() {
    let v = symmetric_family(4, None, &tol()).unwrap();
    let mut rng = stream_rng(3, 0);
    let mut ratio: Option<C64> = None;
    for _ in 0..100 {
        let x = complex_gaussian_vec(&mut rng, 4);
        let r = det(&build_bx(&v, &x).unwrap()) / det_condition(&v, &x).unwrap();
        match ratio {
            None => ratio = Some(r),
            Some(r0) => assert!((r - r0).norm() <= 1e-9 * r0.norm()),
        }
    }
}

#[test]
fn span_stabilizes_when_doubling_samples() {
    for v in family_cases() {
        let d = 4 * v.ambient_dim();
        let a = span_of_pv(&v, d, 1, &tol()).unwrap().span_dim;
        let b = span_of_pv(&v, 2 * d, 1, &tol()).unwrap().span_dim;
        assert_eq!(a, b, "{:?}", v.origin);
    }
}

fn class_span(v: &Subspace, seed: u64) -> usize {
    let spec = v.origin.clone().unwrap();
    let tags: &[ClassTag] = match spec.kind {
        cesw::families::FamilyKind::Symmetric => &[ClassTag::S1, ClassTag::S2],
        _ => &[ClassTag::S1, ClassTag::S2, ClassTag::S3],
    };
    let mut rows = Vec::new();
    for (k, tag) in tags.iter().enumerate() {
        let class = SolutionClassSpec::new(spec.clone(), *tag);
        if let Ok(found) = enumerate_class(
            &class,
            4 * v.ambient_dim(),
            &mut stream_rng(seed, k as u64),
            &tol(),
        ) {
            rows.extend(found.iter().map(|p| partial_conjugate(p).unit_tensor()));
        }
    }
    numerical_rank(&cesw::linalg::columns(&rows, v.ambient_dim()), &tol())
}

fn generic_span(v: &Subspace, seed: u64) -> usize {
    let mut rng = stream_rng(seed, 0);
    let mut rows = Vec::new();
    while rows.len() < 4 * v.ambient_dim() {
        let x = complex_gaussian_vec(&mut rng, v.m);
        for p in generic_solutions(v, &x, &tol()).unwrap() {
            rows.push(partial_conjugate(&p).unit_tensor());
        }
    }
    numerical_rank(&cesw::linalg::columns(&rows, v.ambient_dim()), &tol())
}

#[test]
fn class_samples_match_generic_span_for_symmetric_family() {
    for m in 3..=5 {
        let v = symmetric_family(m, None, &tol()).unwrap();
        let classes = class_span(&v, 5);
        assert_eq!(classes, m * m - 2);
        let sampled = span_of_pv(&v, 4 * m * m, 5, &tol()).unwrap().span_dim;
        assert_eq!(classes, sampled);
    }
}

#[test]
fn general_family_classes_miss_solutions() {
    // The x₁ = 0 branch of the general family has solutions outside the
    // closed-form classes, so the classes alone span strictly less.
    for (m, n) in [(3, 4), (3, 5), (4, 5)] {
        let v = general_family(m, n, &tol()).unwrap();
        let classes = class_span(&v, 5);
        let sampled = span_of_pv(&v, 4 * m * n, 5, &tol()).unwrap().span_dim;
        assert!(classes < sampled, "({m},{n}): {classes} vs {sampled}");
    }
}

#[test]
fn generic_solutions_cover_a_generic_subspace() {
    let mut rng = stream_rng(8, 0);
    let vs: Vec<CVec> = (0..2).map(|_| complex_gaussian_vec(&mut rng, 9)).collect();
    let v = make_subspace(3, 3, &vs, &tol()).unwrap();
    assert_eq!(generic_span(&v, 2), 9);
}
