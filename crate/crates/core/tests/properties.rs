use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer as _;
use num_rational::BigRational;

use proptest::prelude::*;
use rug::Integer;

use sic_core::clifford::{clifford_unitary, covariance_error};
use sic_core::fiducial::sic_residual;
use sic_core::linalg::phase_aligned_distance;
use sic_core::lll::{is_lll_reduced, lll_reduce, LOVASZ_DELTA};
use sic_core::number_theory::{chebyshev_t, dimension_sequence, is_squarefree, squarefree_part, squarefree_part_u64};
use sic_core::recognition::{certify_unit, recognize_algebraic, RecognitionConfig};
use sic_core::wh_group::{apply_displacement, esl_elements, SymplecticMatrix};
use sic_core::{make_context, search, Fiducial, Mp256, Mp512, Real, SearchConfig};

fn fiducials() -> &'static [Fiducial<f64>] {
    static CELL: OnceLock<Vec<Fiducial<f64>>> = OnceLock::new();
    CELL.get_or_init(|| {
        (2..=5).map(|d| search(&make_context::<f64>(d).unwrap(), &SearchConfig::default()).unwrap()).collect()
    })
}

fn esl(d: usize) -> Vec<SymplecticMatrix> {
    esl_elements(if d % 2 == 0 { 2 * d } else { d } as i64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squarefree_part_times_square(n in 1u64..10_000_000) {
        let s = squarefree_part_u64(n).unwrap();
        prop_assert!(is_squarefree(s));
        prop_assert_eq!(n % s, 0);
        let k2 = n / s;
        let k = (k2 as f64).sqrt().round() as u64;
        prop_assert_eq!(k * k, k2);
    }

    #[test]
    fn squarefree_part_is_multiplicative(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        prop_assume!(a.gcd(&b) == 1);
        let ab = squarefree_part(&(BigUint::from(a) * BigUint::from(b))).unwrap();
        let sa = squarefree_part_u64(a).unwrap();
        let sb = squarefree_part_u64(b).unwrap();
        prop_assert_eq!(ab, BigUint::from(sa) * BigUint::from(sb));
    }

    #[test]
    fn esl_is_closed_and_det_multiplicative(d in 2usize..=8, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let g = esl(d);
        let (a, b) = (g[i.index(g.len())], g[j.index(g.len())]);
        let m = a.modulus();
        let ab = a.mul(&b);
        let det = ab.det().rem_euclid(m);
        prop_assert!(det == 1 || det == m - 1);
        prop_assert_eq!((a.det() * b.det()).rem_euclid(m), ab.det().rem_euclid(m));
        prop_assert!(a.mul(&a.inverse()).is_identity());
    }

    #[test]
    fn clifford_projectivity(d in 2usize..=8, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let ctx = make_context::<f64>(d).unwrap();
        let g: Vec<_> = esl(d).into_iter().filter(|f| f.det() == 1).collect();
        let (a, b) = (g[i.index(g.len())], g[j.index(g.len())]);
        let ua = clifford_unitary(&ctx, &a).unwrap();
        let ub = clifford_unitary(&ctx, &b).unwrap();
        let uab = clifford_unitary(&ctx, &a.mul(&b)).unwrap();
        let tol = 2f64.powf(-53.0 / 4.0);
        prop_assert!(phase_aligned_distance(&ua.compose(&ub).matrix, &uab.matrix) < tol);
        prop_assert!(covariance_error(&ctx, &ua, &a).unwrap() < tol);
    }

    #[test]
    fn clifford_images_of_a_fiducial_are_fiducials(d in 2usize..=5, i in any::<prop::sample::Index>(), p1 in 0i64..16, p2 in 0i64..16) {
        let ctx = make_context::<f64>(d).unwrap();
        let f = &fiducials()[d - 2];
        let g = esl(d);
        let u = clifford_unitary(&ctx, &g[i.index(g.len())]).unwrap();
        let w = apply_displacement(&ctx, ctx.index(p1, p2), &u.apply(&f.vector));
        let r = sic_residual(&ctx, &w).unwrap();
        prop_assert!((r - f.residual).abs() < 1e-11, "{} vs {}", r, f.residual);
    }

    #[test]
    fn lll_output_is_reduced(rows in prop::collection::vec(prop::collection::vec(-1_000_000i64..1_000_000, 5), 4)) {
        let mut basis: Vec<Vec<Integer>> = rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect();
        let gram = |b: &[Vec<Integer>]| -> Integer {
            // determinant of the Gram matrix via fraction-free elimination
            let n = b.len();
            let mut g: Vec<Vec<Integer>> = (0..n)
                .map(|i| (0..n).map(|j| b[i].iter().zip(&b[j]).map(|(x, y)| Integer::from(x * y)).sum()).collect())
                .collect();
            let mut prev = Integer::from(1);
            for k in 0..n {
                if g[k][k] == 0 {
                    match (k + 1..n).find(|&r| g[r][k] != 0) {
                        Some(r) => g.swap(k, r),
                        None => return Integer::new(),
                    }
                }
                for i in k + 1..n {
                    for j in k + 1..n {
                        let v = Integer::from(&g[i][j] * &g[k][k]) - Integer::from(&g[i][k] * &g[k][j]);
                        g[i][j] = v / &prev;
                    }
                }
                prev = g[k][k].clone();
            }
            prev.abs()
        };
        let before = gram(&basis);
        prop_assume!(before != 0);
        lll_reduce(&mut basis);
        prop_assert!(is_lll_reduced(&basis, LOVASZ_DELTA));
        prop_assert_eq!(gram(&basis), before);
    }

    #[test]
    fn recognition_is_conjugation_symmetric(a in -9i64..=9, b in 1i64..=9, c in 2i64..=30) {
        prop_assume!(is_squarefree(c as u64));
        // a + b i sqrt(c), a root of x^2 - 2 a x + a^2 + b^2 c
        let s = Mp512::from_i64(c).sqrt();
        let x = Complex::new(Mp512::from_i64(a), Mp512::from_i64(b) * s);
        let cfg = RecognitionConfig::new(4, 256);
        let p = recognize_algebraic(&x, &cfg).unwrap();
        let q = recognize_algebraic(&x.conj(), &cfg).unwrap();
        prop_assert_eq!(&p.coefficients, &q.coefficients);
        prop_assert_eq!(p.coefficients, vec![a * a + b * b * c, -2 * a, 1]);
    }

    #[test]
    fn doubling_the_lattice_scale_keeps_the_polynomial(k in prop::sample::select(vec![3i64, 4, 5, 6, 7, 8, 9, 10, 12]), j in 1i64..12) {
        prop_assume!(j < k && j.gcd(&k) == 1);
        // a primitive k-th root of unity
        let t = Mp512::pi() * Mp512::from_i64(2 * j) / Mp512::from_i64(k);
        let (s, c) = t.sin_cos();
        let x = Complex::new(c, s);
        let cfg = RecognitionConfig::new(8, 128);
        let p = recognize_algebraic(&x, &cfg).unwrap();
        prop_assert!(certify_unit(&p));
        prop_assert!(p.is_palindromic_up_to_sign());
        let wide = RecognitionConfig { lattice_scale_exponent: 2 * cfg.lattice_scale_exponent, ..RecognitionConfig::new(8, 256) };
        prop_assert!(wide.validate().is_ok());
        prop_assert_eq!(&recognize_algebraic(&x, &wide).unwrap().coefficients, &p.coefficients);
    }
}

/// `d_j = 1 + 2 T_j((d1 - 1)/2)` evaluated over the rationals.
#[test]
fn recurrence_matches_rational_chebyshev() {
    for disc in 2u64..=50 {
        if !is_squarefree(disc) {
            continue;
        }
        let seq = dimension_sequence(disc, 20).unwrap();
        let x = BigRational::new(&seq.d1 - BigInt::from(1), BigInt::from(2));
        for (j, d) in seq.terms.iter().enumerate() {
            let t = chebyshev_t(j + 1, &x);
            let expect = BigRational::from_integer(BigInt::from(1)) + BigRational::from_integer(BigInt::from(2)) * t;
            assert_eq!(expect, BigRational::from_integer(d.clone()), "D={disc} j={}", j + 1);
            let m = &seq.m_values[j];
            let lhs: BigInt = (d - 1) * (d - 1) - m * m * BigInt::from(disc);
            assert_eq!(lhs, BigInt::from(4));
        }
    }
}

#[test]
fn unit_phases_at_256_bits() {
    let ctx = make_context::<Mp256>(3).unwrap();
    let half = Mp256::from_i64(1) / Mp256::from_i64(2).sqrt();
    let v = vec![Complex::new(Mp256::from_i64(0), Mp256::from_i64(0)), Complex::new(half.clone(), Mp256::from_i64(0)), Complex::new(-half, Mp256::from_i64(0))];
    let mut f = Fiducial::from_vector(&ctx, v, 0, sic_core::SymmetryType::TypeZ).unwrap();
    f.converged = true;
    let t = sic_core::compute_overlaps(&ctx, &f).unwrap();
    for z in t.phases.values() {
        assert!((z.norm_sqr() - Mp256::from_i64(1)).abs().to_f64() < 1e-70);
    }
}
