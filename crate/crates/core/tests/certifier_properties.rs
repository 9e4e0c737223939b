use proptest::prelude::*;
use stochord::certify::{
    certify, certify_hr, certify_lr, certify_st, schur_condition_check, Grid, GridPolicy, Order,
    SchurClass, Tolerance, DEFAULT_GRID_COUNT,
};
use stochord::numeric::tail_point;
use stochord::{GompertzMakeham, Lifetime, LifetimeModel, SystemSpec, WeibullG};

fn grid(f: &dyn Lifetime, g: &dyn Lifetime) -> Grid {
    Grid::for_pair(f, g, 512, GridPolicy::LogSpaced, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// lr ⇒ hr ⇒ st. The hazard at `x` depends on the whole tail beyond `x`,
    /// so lr is certified on a grid reaching `sf < 1e-300`; lr ⇒ rh only
    /// needs `[0, x]` and is checked on the common grid.
    #[test]
    fn implication_chain(a1 in 0.5..5.0f64, a2 in 0.5..5.0f64, b in 1.0..4.0f64, g1 in 0.5..5.0f64, g2 in 0.5..5.0f64) {
        let f = WeibullG::exponential(a1, b, g1).unwrap();
        let g = WeibullG::exponential(a2, b, g2).unwrap();
        let grid = grid(&f, &g);
        let deep_x = tail_point(|x| f.log_sf(x), 1e-300).max(tail_point(|x| g.log_sf(x), 1e-300));
        let deep = Grid::new(deep_x, 4096, GridPolicy::LogSpaced).unwrap();
        let tol = Tolerance::default();
        if certify_lr(&f, &g, &grid, tol).holds {
            prop_assert!(certify(Order::Rh, &f, &g, &grid, tol).holds);
        }
        if certify_lr(&f, &g, &deep, tol).holds {
            prop_assert!(certify_hr(&f, &g, &grid, tol).holds);
        }
        let hr = certify_hr(&f, &g, &grid, tol);
        if hr.holds {
            prop_assert!(certify_st(&f, &g, &grid, tol).holds);
        }
        if hr.holds && hr.margin > hr.tolerance {
            prop_assert!(!certify_hr(&g, &f, &grid, tol).holds);
        }
    }

    /// GM with larger Makeham term is smaller in every order.
    #[test]
    fn gm_lambda_shift(a in 0.5..5.0f64, b in 0.5..5.0f64, l in 0.1..5.0f64, dl in 0.1..5.0f64) {
        let hi = GompertzMakeham::new(a, b, l + dl).unwrap();
        let lo = GompertzMakeham::new(a, b, l).unwrap();
        let grid = grid(&hi, &lo);
        for order in Order::ALL {
            prop_assert!(certify(order, &hi, &lo, &grid, Tolerance::default()).holds, "{}", order);
        }
        prop_assert!(!certify_st(&lo, &hi, &grid, Tolerance::default()).holds);
    }

    #[test]
    fn reflexive_with_zero_margin(a in 0.5..5.0f64, b in 0.5..4.0f64, g in 0.5..5.0f64) {
        let f = WeibullG::exponential(a, b, g).unwrap();
        let grid = grid(&f, &f);
        for order in Order::ALL {
            let v = certify(order, &f, &f, &grid, Tolerance::absolute(0.0));
            prop_assert!(v.holds);
            prop_assert_eq!(v.margin, 0.0);
        }
    }
}

#[test]
fn verdict_records_witness_on_failure() {
    let f = GompertzMakeham::new(1.0, 1.0, 1.0).unwrap();
    let g = GompertzMakeham::new(1.0, 1.0, 2.0).unwrap();
    let grid = grid(&f, &g);
    let v = certify_st(&f, &g, &grid, Tolerance::default());
    assert!(!v.holds);
    let x = v.witness_x.unwrap();
    assert!(x > 0.0 && x <= grid.x_max());
    assert!(v.margin < -v.tolerance);
    assert_eq!(v.points_checked, grid.len());
}

#[test]
fn crossing_survivals_fail_both_ways() {
    // equal means-ish but different shapes cross
    let f = WeibullG::exponential(1.0, 0.5, 1.0).unwrap();
    let g = WeibullG::exponential(1.0, 3.0, 1.0).unwrap();
    let grid = grid(&f, &g);
    assert!(!certify_st(&f, &g, &grid, Tolerance::default()).holds);
    assert!(!certify_st(&g, &f, &grid, Tolerance::default()).holds);
}

#[test]
fn grid_covers_the_tail() {
    let f: LifetimeModel = WeibullG::exponential(4.8, 3.0, 2.5).unwrap().into();
    let g: LifetimeModel = GompertzMakeham::new(0.5, 0.5, 0.1).unwrap().into();
    let grid = Grid::for_pair(&f, &g, DEFAULT_GRID_COUNT, GridPolicy::LogSpaced, None).unwrap();
    assert_eq!(grid.len(), DEFAULT_GRID_COUNT);
    assert!(grid.points().windows(2).all(|w| w[0] < w[1]));
    assert!(f.sf(grid.x_max()) < 1e-6 && g.sf(grid.x_max()) < 1e-6);
    assert!(g.sf(grid.x_max() * 0.99) >= 1e-6);
    let lin = Grid::new(2.0, 16, GridPolicy::Linear).unwrap();
    assert_eq!(lin.points()[15], 2.0);
    assert!(Grid::new(2.0, 15, GridPolicy::Linear).is_err());
}

#[test]
fn system_hazard_path_and_ratio_path_agree() {
    let x = SystemSpec::series(vec![
        WeibullG::exponential(4.03, 3.0, 2.005).unwrap().into(),
        WeibullG::exponential(4.17, 3.0, 2.095).unwrap().into(),
    ])
    .unwrap();
    let y = SystemSpec::series(vec![
        WeibullG::exponential(4.8, 3.0, 2.5).unwrap().into(),
        WeibullG::exponential(3.4, 3.0, 1.6).unwrap().into(),
    ])
    .unwrap();
    let grid = grid(&x, &y);
    assert!(certify_hr(&y, &x, &grid, Tolerance::default()).holds);
    assert!(!certify_hr(&x, &y, &grid, Tolerance::default()).holds);
}

#[test]
fn schur_classifier() {
    let sq = |a: &[f64]| a.iter().map(|v| v * v).sum::<f64>();
    assert_eq!(
        schur_condition_check(&sq, &[0.3, 1.7, 2.2, 4.0])
            .unwrap()
            .class(),
        SchurClass::Convex
    );
    let lin = |a: &[f64]| a.iter().sum::<f64>();
    assert_eq!(
        schur_condition_check(&lin, &[0.3, 1.7, 2.2])
            .unwrap()
            .class(),
        SchurClass::Zero
    );
    let neg = |a: &[f64]| -a.iter().map(|v| v * v).sum::<f64>();
    assert_eq!(
        schur_condition_check(&neg, &[0.3, 1.7]).unwrap().class(),
        SchurClass::Concave
    );
}
