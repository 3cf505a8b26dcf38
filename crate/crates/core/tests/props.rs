//! Property tests for the algebraic invariants: Penrose equations,
//! structured-pseudoinverse agreement, projection linearity, centered
//! symmetry, and plan determinism.

mod common;

use common::{gauss_jordan_inverse, penrose_residuals, spectral_norm_power_iteration, SplitMix64};
use proptest::prelude::*;
use simderiv_core::directions::{
    build_full_gcsh_minimal, build_full_gsh_minimal, build_hvp, DirectionFamily,
    DirectionMatrix,
};
use simderiv_core::estimators::{gcsh, gsg, gsh};
use simderiv_core::linalg::{pinv, pinv_partial_diagonal, rank, spectral_norm};
use simderiv_core::projections::proj_st;
use simderiv_core::sampling::{enumerate, EvalCache};
use simderiv_core::Matrix;

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(|(r, c)| {
            proptest::collection::vec(-1.0f64..1.0, r * c).prop_map(move |data| {
                Matrix::from_vec(r, c, data)
            })
        })
}

proptest! {
    #[test]
    fn penrose_equations_hold(a in arb_matrix(6)) {
        let p = pinv(&a).unwrap();
        let scale = spectral_norm(&a).max(1.0);
        for r in penrose_residuals(&a, &p) {
            prop_assert!(r <= 1e-10 * scale, "residual {r} at scale {scale}");
        }
    }

    #[test]
    fn full_column_rank_pinv_is_normal_equation_inverse(a in arb_matrix(5)) {
        prop_assume!(a.nrows() >= a.ncols());
        let gram = a.transpose().matmul(&a);
        // Reject near-singular Gram matrices; the identity needs full rank.
        let inv = gauss_jordan_inverse(&gram, 1e-4);
        prop_assume!(inv.is_some());
        prop_assume!(rank(&a) == a.ncols());
        let left = inv.unwrap().matmul(&a.transpose());
        let p = pinv(&a).unwrap();
        let scale = left.max_abs().max(1.0);
        prop_assert!(p.sub(&left).max_abs() <= 1e-9 * scale);
    }

    #[test]
    fn spectral_norm_matches_power_iteration(a in arb_matrix(5)) {
        let s = spectral_norm(&a);
        let oracle = spectral_norm_power_iteration(&a);
        prop_assert!((s - oracle).abs() <= 1e-8 * oracle.max(1.0), "{s} vs {oracle}");
    }

    #[test]
    fn structured_pinv_agrees_with_general(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.int(1, 6);
        let m = rng.int(1, n);
        // Distinct nonzero rows with random nonzero scales.
        let mut rows: Vec<usize> = (0..n).collect();
        for i in (1..rows.len()).rev() {
            let j = rng.int(0, i);
            rows.swap(i, j);
        }
        let mut s = Matrix::zeros(n, m);
        for (j, &u) in rows.iter().take(m).enumerate() {
            let sign = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            s[(u, j)] = sign * rng.range(0.05, 0.6);
        }
        let fast = pinv_partial_diagonal(&s).unwrap();
        let general = pinv(&s).unwrap();
        let scale = general.max_abs().max(1.0);
        prop_assert!(fast.sub(&general).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn plan_enumeration_is_deterministic(
        n in 1usize..6,
        hbits in 1u8..200,
        centered in any::<bool>(),
    ) {
        let h = hbits as f64 / 128.0;
        let x0: Vec<f64> = (0..n).map(|i| i as f64 * 0.37 - 0.5).collect();
        let (s, fam) = build_full_gsh_minimal(n, h).unwrap();
        let a = enumerate(&x0, &s, &fam, centered);
        let b = enumerate(&x0, &s, &fam, centered);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hvp_plan_counts_hold_for_random_v(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.int(1, 8);
        let v: Vec<f64> = (0..n).map(|_| rng.range(-2.0, 2.0)).collect();
        prop_assume!(v.iter().any(|x| x.abs() > 1e-3));
        let (s, fam) = build_hvp(n, &v, 0.05).unwrap();
        let x0 = vec![0.25; n];
        let forward = enumerate(&x0, &s, &fam, false);
        prop_assert_eq!(forward.count(), 2 * n + 1);
        let centered = enumerate(&x0, &s, &fam, true);
        prop_assert_eq!(centered.count(), 4 * n - 1);
    }

    #[test]
    fn gcsh_is_symmetric_under_joint_sign_flip(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.int(1, 4);
        let p = rng.polynomial(n, 3, 6);
        let x0: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let (s, fam) = build_full_gcsh_minimal(n, 0.1).unwrap();
        let plan = enumerate(&x0, &s, &fam, true);
        let mut cache = EvalCache::new();
        cache.evaluate(|x: &[f64]| p.eval(x), &plan).unwrap();
        let a = gcsh(&cache, &x0, &s, &fam).unwrap();
        let b = gcsh(&cache, &x0, &s.negated(), &fam.negated()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn projection_is_linear(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.int(2, 5);
        let m_cols = rng.int(1, n);
        let s = DirectionMatrix::new(rng.matrix(n, m_cols, -1.0, 1.0)).unwrap();
        let fam = DirectionFamily::uniform(
            {
                let k = rng.int(1, n);
                DirectionMatrix::new(rng.matrix(n, k, -1.0, 1.0)).unwrap()
            },
            m_cols,
        )
        .unwrap();
        let a = rng.matrix(n, n, -1.0, 1.0);
        let b = rng.matrix(n, n, -1.0, 1.0);
        let (alpha, beta) = (rng.range(-2.0, 2.0), rng.range(-2.0, 2.0));
        let lhs = proj_st(&a.scale(alpha).add(&b.scale(beta)), &s, &fam).unwrap();
        let rhs = proj_st(&a, &s, &fam)
            .unwrap()
            .scale(alpha)
            .add(&proj_st(&b, &s, &fam).unwrap().scale(beta));
        let scale = lhs.max_abs().max(1.0);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn gsg_is_exact_on_affine_even_when_rank_deficient(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.int(1, 5);
        let m = rng.int(1, n);
        let a_vec: Vec<f64> = (0..n).map(|_| rng.range(-2.0, 2.0)).collect();
        let b = rng.range(-1.0, 1.0);
        let s = loop {
            let cand = rng.matrix(n, m, -0.5, 0.5);
            if cand.max_col_norm() > 1e-3 {
                break DirectionMatrix::new(cand).unwrap();
            }
        };
        let fam = DirectionFamily::uniform(s.clone(), m).unwrap();
        let x0: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let plan = enumerate(&x0, &s, &fam, false);
        let mut cache = EvalCache::new();
        let a_closure = a_vec.clone();
        cache
            .evaluate(
                move |x: &[f64]| x.iter().zip(&a_closure).map(|(xi, ai)| xi * ai).sum::<f64>() + b,
                &plan,
            )
            .unwrap();
        let g = gsg(&cache, &x0, &s).unwrap();
        // The estimate is the projection of the true gradient onto span S.
        let st = s.matrix().transpose();
        let projected = pinv(&st).unwrap().mul_vec(&st.mul_vec(&a_vec));
        for (gi, pi) in g.iter().zip(&projected) {
            prop_assert!((gi - pi).abs() <= 1e-10);
        }
    }

    #[test]
    fn gsh_estimate_is_invariant_under_projection(seed in any::<u64>()) {
        // Condition (iii): all inner matrices equal.
        let mut rng = SplitMix64::new(seed);
        let n = rng.int(2, 4);
        let p = rng.polynomial(n, 3, 6);
        let x0: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let s = loop {
            let k = rng.int(1, n);
            let cand = rng.matrix(n, k, -0.2, 0.2);
            if let Ok(d) = DirectionMatrix::new(cand) {
                if spectral_norm(&pinv(&d.normalized()).unwrap()) < 50.0 {
                    break d;
                }
            }
        };
        let tbar = loop {
            let k = rng.int(1, n);
            let cand = rng.matrix(n, k, -0.2, 0.2);
            if let Ok(d) = DirectionMatrix::new(cand) {
                if spectral_norm(&pinv(&d.normalized()).unwrap()) < 50.0 {
                    break d;
                }
            }
        };
        let fam = DirectionFamily::uniform(tbar, s.cols()).unwrap();
        let plan = enumerate(&x0, &s, &fam, false);
        let mut cache = EvalCache::new();
        cache.evaluate(|x: &[f64]| p.eval(x), &plan).unwrap();
        let est = gsh(&cache, &x0, &s, &fam).unwrap();
        let projected = proj_st(&est, &s, &fam).unwrap();
        let scale = est.max_abs().max(1.0);
        prop_assert!(projected.sub(&est).max_abs() <= 1e-10 * scale);
    }
}
