use proptest::prelude::*;
use stochord::majorization::{
    apply_t_transform, chain_majorize_solve_2x2, doubly_stochastic_check, generate_hypothesis_pair,
    implication_suite, majorize_check, mat_mul, pn_membership, GeneratorConfig, HypothesisKind,
    HypothesisPair, MajorizationKind, ParamMatrix, TTransform,
};

/// Descending partial sums on integers, exact.
fn oracle(a: &[i64], b: &[i64], kind: MajorizationKind) -> bool {
    let desc = |v: &[i64]| {
        let mut s = v.to_vec();
        s.sort_unstable_by(|x, y| y.cmp(x));
        s
    };
    let asc = |v: &[i64]| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s
    };
    let dominated = |x: Vec<i64>, y: Vec<i64>| {
        let (mut sx, mut sy) = (0, 0);
        x.iter().zip(&y).all(|(p, q)| {
            sx += p;
            sy += q;
            sx <= sy
        })
    };
    let total = a.iter().sum::<i64>() == b.iter().sum::<i64>();
    match kind {
        MajorizationKind::Plain => total && dominated(desc(a), desc(b)),
        MajorizationKind::WeakSub => dominated(desc(a), desc(b)),
        MajorizationKind::WeakSuper => dominated(asc(b), asc(a)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_integer_oracle(a in prop::collection::vec(0i64..20, 4), b in prop::collection::vec(0i64..20, 4)) {
        let af: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let bf: Vec<f64> = b.iter().map(|&v| v as f64).collect();
        for kind in [MajorizationKind::Plain, MajorizationKind::WeakSub, MajorizationKind::WeakSuper] {
            prop_assert_eq!(majorize_check(&af, &bf, kind).unwrap(), oracle(&a, &b, kind), "{:?}", kind);
        }
    }

    #[test]
    fn t_transform_preserves_row_sums(top in prop::collection::vec(0.5..5.0f64, 4), bottom in prop::collection::vec(0.5..5.0f64, 4),
                                      lambda in 0.0..=1.0f64, i in 0usize..4, d in 1usize..4) {
        let j = (i + d) % 4;
        let m = ParamMatrix::new(top, bottom).unwrap();
        let t = TTransform::new(lambda, i, j).unwrap();
        let out = apply_t_transform(&m, &t).unwrap();
        for r in 0..2 {
            let before: f64 = m.row(r).iter().sum();
            let after: f64 = out.row(r).iter().sum();
            prop_assert!((before - after).abs() <= 1e-12 * before);
            // each averaged row is majorized by the original
            prop_assert!(majorize_check(out.row(r), m.row(r), MajorizationKind::Plain).unwrap());
        }
        prop_assert!(doubly_stochastic_check(&t.to_matrix(4)));
    }

    #[test]
    fn products_stay_doubly_stochastic(l1 in 0.0..=1.0f64, l2 in 0.0..=1.0f64, l3 in 0.0..=1.0f64) {
        let a = TTransform::new(l1, 0, 1).unwrap().to_matrix(3);
        let b = TTransform::new(l2, 1, 2).unwrap().to_matrix(3);
        let c = TTransform::new(l3, 0, 2).unwrap().to_matrix(3);
        prop_assert!(doubly_stochastic_check(&mat_mul(&mat_mul(&a, &b), &c)));
    }

    #[test]
    fn chain_solve_round_trips(a in 0.5..5.0f64, b in 0.5..5.0f64, c in 0.5..5.0f64, d in 0.5..5.0f64, lambda in 0.0..=1.0f64) {
        prop_assume!((a - b).abs() > 0.1 || (c - d).abs() > 0.1);
        let m = ParamMatrix::from_rows([[a, b], [c, d]]).unwrap();
        let image = apply_t_transform(&m, &TTransform::new(lambda, 0, 1).unwrap()).unwrap();
        let solved = chain_majorize_solve_2x2(&m, &image).unwrap();
        let check = apply_t_transform(&m, &TTransform::new(solved, 0, 1).unwrap()).unwrap();
        prop_assert!(check.approx_eq(&image, 1e-12));
        if (a - b).abs() > 0.1 && (c - d).abs() > 0.1 {
            prop_assert!((solved - lambda).abs() < 1e-9 || (solved - (1.0 - lambda)).abs() < 1e-9);
        }
    }

    #[test]
    fn generated_pairs_satisfy_their_hypotheses(seed in any::<u64>()) {
        let sub = generate_hypothesis_pair(&GeneratorConfig::new(4, HypothesisKind::WeakSub), seed).unwrap();
        let HypothesisPair::Vectors { a, b, pivot } = sub else { panic!("vectors expected") };
        prop_assert!(majorize_check(&a, &b, MajorizationKind::WeakSub).unwrap());
        prop_assert!(majorize_check(&pivot, &b, MajorizationKind::Plain).unwrap());

        let chain = generate_hypothesis_pair(&GeneratorConfig::new(4, HypothesisKind::ChainViaTransforms).with_transforms(2, 4), seed).unwrap();
        let HypothesisPair::Chain { a, b, transforms } = chain else { panic!("chain expected") };
        prop_assert!(pn_membership(&b));
        let mut cur = b.clone();
        for t in &transforms[..transforms.len() - 1] {
            cur = apply_t_transform(&cur, t).unwrap();
            prop_assert!(pn_membership(&cur));
        }
        let last = apply_t_transform(&cur, transforms.last().unwrap()).unwrap();
        prop_assert!(last.approx_eq(&a, 0.0));
    }
}

#[test]
fn plain_implies_weak_forms() {
    let s = implication_suite(&[1.0, 2.0, 3.0], &[0.0, 2.0, 4.0]).unwrap();
    assert!(s.plain && s.weak_sub && s.weak_super && s.consistent());
    let s = implication_suite(&[0.0, 2.0, 4.0], &[1.0, 2.0, 3.0]).unwrap();
    assert!(!s.plain && s.consistent());
}

#[test]
fn input_errors() {
    assert!(majorize_check(&[1.0], &[1.0, 2.0], MajorizationKind::Plain).is_err());
    assert!(majorize_check(&[], &[], MajorizationKind::Plain).is_err());
    assert!(ParamMatrix::new(vec![1.0], vec![1.0]).is_err());
    assert!(ParamMatrix::new(vec![1.0, -1.0], vec![1.0, 1.0]).is_err());
    assert!(TTransform::new(1.5, 0, 1).is_err());
    assert!(TTransform::new(0.5, 1, 1).is_err());
}

#[test]
fn pn_detects_opposite_ordering() {
    let m = ParamMatrix::from_rows([[4.8, 3.4], [2.5, 1.6]]).unwrap();
    assert!(pn_membership(&m));
    assert!(!pn_membership(
        &ParamMatrix::from_rows([[3.4, 4.8], [2.5, 1.6]]).unwrap()
    ));
    assert!(pn_membership(&m.permute_columns(&[1, 0])));
}
