//! Examples whose expected values are computed here by hand, independently
//! of the library routines under test.

use cesw::families::{default_a_tilde, extend_ces, general_family, symmetric_family, FamilySpec};
use cesw::linalg::{
    c, det, hermitian_eigh, ket, ket2, kron, local_projection, null_space, numerical_rank, outer,
    partial_transpose, ray_overlap, re,
};
use cesw::products::{
    build_bx, cofactor_solution, det_condition, generic_solutions, theorem1_assumption,
};
use cesw::rng::{complex_gaussian_vec, stream_rng};
use cesw::subspace::{is_ces, is_supported, make_subspace, SearchBudget};
use cesw::{CMat, CVec, ToleranceConfig};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn mat(rows: &[&[f64]]) -> CMat {
    CMat::from_fn(rows.len(), rows[0].len(), |i, j| re(rows[i][j]))
}

#[test]
fn antisymmetric_unit_has_rank_two() {
    let a1 = mat(&[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    // A₁†A₁ = diag(1, 1, 0) by direct multiplication.
    assert_eq!(
        a1.adjoint() * &a1,
        mat(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]])
    );
    assert_eq!(numerical_rank(&a1, &tol()), 2);
}

#[test]
fn unitriangular_a_tilde_is_invertible() {
    let a = default_a_tilde(4);
    for i in 0..3 {
        assert_eq!(a[(i, i)], re(1.0));
        for j in 0..i {
            assert_eq!(a[(i, j)], re(0.0));
        }
    }
    assert!((det(&a) - re(1.0)).norm() < 1e-14);
    assert_eq!(numerical_rank(&a, &tol()), 3);
}

#[test]
fn symmetric_matrix_at_first_basis_vector() {
    let gens = FamilySpec::symmetric(3).generators().unwrap();
    let x = ket(3, 0);
    let b = cesw::products::bx_from_vectors(&gens, 3, 3, &x);
    // Rows x₀y_i − x_i y₀ give y₁ = y₂ = 0; the last row vanishes at x = |0⟩.
    let expected = mat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
    assert!((&b - expected).norm() < 1e-15);
    let ns = null_space(&b, &tol());
    assert_eq!(ns.len(), 1);
    assert!((ray_overlap(&ns[0], &ket(3, 0)) - 1.0).abs() < 1e-14);
}

#[test]
fn bell_partial_transpose_is_swap() {
    let phi = ket2(2, 2, 0, 0) + ket2(2, 2, 1, 1);
    let pt = partial_transpose(&outer(&phi), 2, 2).unwrap();
    let swap = mat(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ]);
    assert!((&pt - swap).norm() < 1e-15);
    let (vals, _) = hermitian_eigh(&pt);
    let expected = [-1.0, 1.0, 1.0, 1.0];
    for (v, e) in vals.iter().zip(expected) {
        assert!((v - e).abs() < 1e-12);
    }
}

#[test]
fn local_projection_at_zero_drops_last_vector() {
    let v = symmetric_family(3, None, &tol()).unwrap();
    let p = local_projection(&v.basis, &ket(3, 0), 3, 3).unwrap();
    assert_eq!(numerical_rank(&p, &tol()), 2);
}

#[test]
fn general_family_reduced_ranks_by_hand() {
    let v = general_family(3, 4, &tol()).unwrap();
    let (m, n) = (3, 4);
    let mut ra = CMat::zeros(m, m);
    let mut rb = CMat::zeros(n, n);
    for psi in &v.basis {
        for i in 0..m {
            for k in 0..m {
                for j in 0..n {
                    ra[(i, k)] += psi[i * n + j] * psi[k * n + j].conj();
                }
            }
        }
        for j in 0..n {
            for l in 0..n {
                for i in 0..m {
                    rb[(j, l)] += psi[i * n + j] * psi[i * n + l].conj();
                }
            }
        }
    }
    assert_eq!(numerical_rank(&ra, &tol()), m);
    assert_eq!(numerical_rank(&rb, &tol()), n);
    assert!(is_supported(&v, &tol()));
}

#[test]
fn singlet_in_three_by_three_extends_once() {
    let singlet = ket2(3, 3, 0, 1) - ket2(3, 3, 1, 0);
    let v = make_subspace(3, 3, &[singlet], &tol()).unwrap();
    let mut rng = stream_rng(4, 0);
    let ext = extend_ces(&v, &mut rng, &tol(), &SearchBudget::default(), 16).unwrap();
    assert_eq!(ext.subspace.dim(), 2);
    assert!(is_ces(&ext.subspace, &tol(), &SearchBudget::with_seed(9)).is_ces);
}

#[test]
fn chain_from_dimension_one_reaches_four() {
    let mut rng = stream_rng(12, 0);
    let mut v = make_subspace(3, 3, &[complex_gaussian_vec(&mut rng, 9)], &tol()).unwrap();
    let mut steps = 0;
    while v.dim() < 4 {
        v = extend_ces(&v, &mut rng, &tol(), &SearchBudget::default(), 16)
            .unwrap()
            .subspace;
        steps += 1;
    }
    assert_eq!(steps, 3);
}

#[test]
fn symmetric_determinant_at_all_ones() {
    let v = symmetric_family(3, None, &tol()).unwrap();
    let x = CVec::from_vec(vec![re(1.0); 3]);
    // Row convention x_i y₀ − x₀ y_i and last row (x₁, 2x₁ + x₂):
    // det [[1,-1,0],[1,0,-1],[0,1,3]] = 1·1 + 1·3 = 4.
    let m = mat(&[&[1.0, -1.0, 0.0], &[1.0, 0.0, -1.0], &[0.0, 1.0, 3.0]]);
    assert!((det(&m) - re(4.0)).norm() < 1e-14);
    assert!((det_condition(&v, &x).unwrap() - re(4.0)).norm() < 1e-14);
    assert!(generic_solutions(&v, &x, &tol()).unwrap().is_empty());
}

#[test]
fn cofactor_matches_null_space_for_random_ces() {
    let mut rng = stream_rng(21, 0);
    let vs: Vec<CVec> = (0..2).map(|_| complex_gaussian_vec(&mut rng, 9)).collect();
    let v = make_subspace(3, 3, &vs, &tol()).unwrap();
    assert!(is_ces(&v, &tol(), &SearchBudget::default()).is_ces);
    for _ in 0..20 {
        let x = complex_gaussian_vec(&mut rng, 3);
        let b = build_bx(&v, &x).unwrap();
        let sols = generic_solutions(&v, &x, &tol()).unwrap();
        assert_eq!(sols.len(), 1);
        // Hand cofactors of a 2×3 matrix: the cross product of its rows.
        let (r0, r1) = (b.row(0), b.row(1));
        let cross = CVec::from_vec(vec![
            r0[1] * r1[2] - r0[2] * r1[1],
            r0[2] * r1[0] - r0[0] * r1[2],
            r0[0] * r1[1] - r0[1] * r1[0],
        ]);
        assert!((cofactor_solution(&b) - &cross).norm() < 1e-12 * cross.norm());
        assert!((ray_overlap(&sols[0].f, &cross) - 1.0).abs() < 1e-9);
        let ns = null_space(&b, &tol());
        assert!((ray_overlap(&ns[0], &cross) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn rank_deficient_bx_returns_several_solutions() {
    // V = span{|00⟩}: the single row of B(x) is (x₀, 0, 0), zero at x = |1⟩.
    let v = make_subspace(3, 3, &[ket2(3, 3, 0, 0)], &tol()).unwrap();
    let sols = generic_solutions(&v, &ket(3, 1), &tol()).unwrap();
    assert_eq!(sols.len(), 3);
}

#[test]
fn theorem1_assumption_examples() {
    let mut rng = stream_rng(30, 0);
    // Any CES of C² ⊗ C³.
    let v = make_subspace(
        2,
        3,
        &[
            ket2(2, 3, 0, 1) - ket2(2, 3, 1, 0),
            ket2(2, 3, 0, 2) - ket2(2, 3, 1, 1),
        ],
        &tol(),
    )
    .unwrap();
    assert!(is_ces(&v, &tol(), &SearchBudget::default()).is_ces);
    assert!(theorem1_assumption(&v, 10, &mut rng, &tol()).holds);
    // A random 3-dimensional supported CES of C⁴ ⊗ C⁴.
    let vs: Vec<CVec> = (0..3).map(|_| complex_gaussian_vec(&mut rng, 16)).collect();
    let v = make_subspace(4, 4, &vs, &tol()).unwrap();
    assert!(is_supported(&v, &tol()));
    let check = theorem1_assumption(&v, 10, &mut rng, &tol());
    assert!(check.holds && check.witness_x.is_some());
    // The antisymmetric subspace of C³ ⊗ C³: B(x)y = x ∧ y has rank 2 < 3.
    let anti: Vec<CVec> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| ket2(3, 3, i, j) - ket2(3, 3, j, i))
        .collect();
    let v = make_subspace(3, 3, &anti, &tol()).unwrap();
    let check = theorem1_assumption(&v, 20, &mut rng, &tol());
    assert!(!check.holds);
    assert_eq!(check.best_rank, 2);
}

#[test]
fn class_examples_by_hand() {
    use cesw::products::{class_member, ClassTag, SolutionClassSpec};
    let sym = SolutionClassSpec::new(FamilySpec::symmetric(3), ClassTag::S1);
    let (e, f) = class_member(&sym, &[re(1.0), re(0.0), c(0.3, 0.1), re(2.0)]).unwrap();
    assert_eq!(e, ket(3, 1));
    // f ⊥ Ãᵀ(1,0)* = (1, 2) on coordinates 1, 2.
    assert!((f[1] + f[2] * re(2.0)).norm() < 1e-14 && f[0] == re(0.0));
    let gen = SolutionClassSpec::new(FamilySpec::general(3, 5), ClassTag::S2);
    let (e, f) = class_member(&gen, &[re(1.0), re(1.0)]).unwrap();
    let x = CVec::from_vec(vec![re(1.0), re(1.0), re(-1.0)]);
    assert!((&e - &x).norm() < 1e-14);
    let tail = CVec::from_vec(vec![re(1.0), re(1.0), re(-1.0), re(-1.0), re(-1.0)]);
    assert!((&f - &tail).norm() < 1e-14);
    let v = general_family(3, 5, &tol()).unwrap();
    assert!(v.max_overlap(&kron(&e, &f)) < 1e-12);
}
