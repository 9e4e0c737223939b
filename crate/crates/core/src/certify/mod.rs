//! Grid certification of the usual stochastic, hazard rate, reversed hazard
//! rate and likelihood ratio orders.
//!
//! Every `certify_*` call checks the claim `f ≤ g` in the named order. A
//! verdict is a certificate at grid resolution: it records the grid it was
//! computed on, the worst slack found, and where.

mod grid;
mod schur;

use std::fmt;
use std::str::FromStr;

pub use grid::{
    Grid, GridPolicy, GridSummary, DEFAULT_GRID_COUNT, LOG_GRID_DECADES, MIN_GRID_COUNT,
};
pub use schur::{
    g_alpha, h1, h2, schur_condition_check, schur_condition_check_matrix, PairDiagnostic,
    SchurClass, SchurDiagnostics,
};

use crate::error::{Error, Result};
use crate::lifetime::Lifetime;

/// Reversed-hazard comparisons skip abscissae where either cdf is below this.
pub const RH_CDF_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Usual stochastic order: `sf_f <= sf_g`.
    St,
    /// Hazard rate order: `sf_g / sf_f` non-decreasing.
    Hr,
    /// Reversed hazard rate order: `cdf_g / cdf_f` non-decreasing.
    Rh,
    /// Likelihood ratio order: `pdf_g / pdf_f` non-decreasing.
    Lr,
}

impl Order {
    pub const ALL: [Order; 4] = [Order::St, Order::Hr, Order::Rh, Order::Lr];

    pub fn as_str(&self) -> &'static str {
        match self {
            Order::St => "st",
            Order::Hr => "hr",
            Order::Rh => "rh",
            Order::Lr => "lr",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "st" => Ok(Order::St),
            "hr" => Ok(Order::Hr),
            "rh" => Ok(Order::Rh),
            "lr" => Ok(Order::Lr),
            other => Err(Error::Usage(format!(
                "unknown order '{other}' (expected st, hr, rh or lr)"
            ))),
        }
    }
}

/// Allowed violation at a point with magnitude `scale`:
/// `max(abs, rel * scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn allowed(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale.abs())
    }
}

/// What was compared at each abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Survival,
    Hazard,
    /// Increments of `ln(sf_g / sf_f)`.
    SurvivalRatio,
    ReversedHazard,
    /// Increments of `ln(pdf_g / pdf_f)`.
    DensityRatio,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Survival => "survival",
            Method::Hazard => "hazard",
            Method::SurvivalRatio => "survival-ratio",
            Method::ReversedHazard => "reversed-hazard",
            Method::DensityRatio => "density-ratio",
        })
    }
}

/// One abscissa of a comparison curve. `diff` is the slack: non-negative
/// wherever the claimed order is locally satisfied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
    scale: f64,
}

impl CurveRow {
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub order: Order,
    pub method: Method,
    pub rows: Vec<CurveRow>,
    /// Evaluation stopped early because a value stopped being representable.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderVerdict {
    pub order: Order,
    pub method: Method,
    pub holds: bool,
    /// Abscissa of the worst violation; absent when the order holds.
    pub witness_x: Option<f64>,
    /// Slack at the worst point (the point closest to violating its allowance).
    pub margin: f64,
    /// Allowance at that point; `holds == (margin >= -tolerance)`.
    pub tolerance: f64,
    pub grid: GridSummary,
    pub points_checked: usize,
    pub truncated: bool,
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order: {}", self.order)?;
        writeln!(f, "method: {}", self.method)?;
        writeln!(f, "holds: {}", self.holds)?;
        writeln!(f, "margin: {:e}", self.margin)?;
        writeln!(f, "tolerance: {:e}", self.tolerance)?;
        match self.witness_x {
            Some(x) => writeln!(f, "witness_x: {x}")?,
            None => writeln!(f, "witness_x: none")?,
        }
        writeln!(f, "grid_policy: {}", self.grid.policy)?;
        writeln!(f, "grid_count: {}", self.grid.count)?;
        writeln!(f, "grid_x_min: {}", self.grid.x_min)?;
        writeln!(f, "grid_x_max: {}", self.grid.x_max)?;
        writeln!(f, "points_checked: {}", self.points_checked)?;
        write!(f, "truncated: {}", self.truncated)
    }
}

fn pointwise<F>(grid: &Grid, mut eval: F) -> (Vec<CurveRow>, bool)
where
    F: FnMut(f64) -> Option<(f64, f64)>,
{
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        match eval(x) {
            Some((lhs, rhs)) if lhs.is_finite() && rhs.is_finite() => rows.push(CurveRow {
                x,
                lhs,
                rhs,
                diff: 0.0,
                scale: lhs.abs().max(rhs.abs()),
            }),
            Some(_) => return (rows, true),
            None => continue,
        }
    }
    (rows, false)
}

/// Turn `(lhs, rhs)` log-values into increments of `rhs - lhs`.
fn increments(rows: &mut [CurveRow]) {
    let mut prev: Option<f64> = None;
    for row in rows.iter_mut() {
        let d = row.rhs - row.lhs;
        match prev {
            None => {
                row.diff = 0.0;
                row.scale = d.abs();
            }
            Some(p) => {
                row.diff = d - p;
                row.scale = d.abs().max(p.abs());
            }
        }
        prev = Some(d);
    }
}

/// Evaluate the comparison curve behind a verdict.
pub fn order_curve(order: Order, f: &dyn Lifetime, g: &dyn Lifetime, grid: &Grid) -> Curve {
    let (method, rows, truncated) = match order {
        Order::St => {
            let (mut rows, t) = pointwise(grid, |x| Some((f.sf(x), g.sf(x))));
            rows.iter_mut().for_each(|r| r.diff = r.rhs - r.lhs);
            (Method::Survival, rows, t)
        }
        Order::Hr if f.has_closed_form_hazard() && g.has_closed_form_hazard() => {
            let (mut rows, t) = pointwise(grid, |x| Some((f.hazard(x), g.hazard(x))));
            rows.iter_mut().for_each(|r| r.diff = r.lhs - r.rhs);
            (Method::Hazard, rows, t)
        }
        Order::Hr => {
            let (mut rows, t) = pointwise(grid, |x| Some((f.log_sf(x), g.log_sf(x))));
            increments(&mut rows);
            (Method::SurvivalRatio, rows, t)
        }
        Order::Rh => {
            let floor = RH_CDF_FLOOR.ln();
            let (mut rows, t) = pointwise(grid, |x| {
                if f.log_cdf(x) <= floor || g.log_cdf(x) <= floor {
                    return None;
                }
                Some((f.reversed_hazard(x).ok()?, g.reversed_hazard(x).ok()?))
            });
            rows.iter_mut().for_each(|r| r.diff = r.rhs - r.lhs);
            (Method::ReversedHazard, rows, t)
        }
        Order::Lr => {
            let (mut rows, t) = pointwise(grid, |x| Some((f.log_pdf(x), g.log_pdf(x))));
            increments(&mut rows);
            (Method::DensityRatio, rows, t)
        }
    };
    Curve {
        order,
        method,
        rows,
        truncated,
    }
}

/// Reduce a curve to a verdict.
pub fn verdict_from_curve(curve: &Curve, grid: &Grid, tol: Tolerance) -> OrderVerdict {
    let mut worst: Option<(f64, &CurveRow)> = None;
    for row in &curve.rows {
        let score = row.diff / tol.allowed(row.scale);
        if worst.is_none_or(|(s, _)| score < s) {
            worst = Some((score, row));
        }
    }
    let (margin, tolerance, x) = match worst {
        Some((_, row)) => (row.diff, tol.allowed(row.scale), row.x),
        None => (0.0, tol.abs, f64::NAN),
    };
    let holds = margin >= -tolerance;
    OrderVerdict {
        order: curve.order,
        method: curve.method,
        holds,
        witness_x: (!holds).then_some(x),
        margin,
        tolerance,
        grid: grid.summary(),
        points_checked: curve.rows.len(),
        truncated: curve.truncated || curve.rows.is_empty(),
    }
}

pub fn certify(
    order: Order,
    f: &dyn Lifetime,
    g: &dyn Lifetime,
    grid: &Grid,
    tol: Tolerance,
) -> OrderVerdict {
    verdict_from_curve(&order_curve(order, f, g, grid), grid, tol)
}

/// `f ≤st g`: `sf_f(x) <= sf_g(x)` on the grid.
pub fn certify_st(f: &dyn Lifetime, g: &dyn Lifetime, grid: &Grid, tol: Tolerance) -> OrderVerdict {
    certify(Order::St, f, g, grid, tol)
}

/// `f ≤hr g`: pointwise `r_f >= r_g` when both hazards are exact, otherwise
/// monotonicity of `sf_g / sf_f`.
pub fn certify_hr(f: &dyn Lifetime, g: &dyn Lifetime, grid: &Grid, tol: Tolerance) -> OrderVerdict {
    certify(Order::Hr, f, g, grid, tol)
}

/// `f ≤rh g`: pointwise `r̃_f <= r̃_g` where both cdfs exceed `1e-12`.
pub fn certify_rh(f: &dyn Lifetime, g: &dyn Lifetime, grid: &Grid, tol: Tolerance) -> OrderVerdict {
    certify(Order::Rh, f, g, grid, tol)
}

/// `f ≤lr g`: `pdf_g / pdf_f` non-decreasing, compared in log space.
pub fn certify_lr(f: &dyn Lifetime, g: &dyn Lifetime, grid: &Grid, tol: Tolerance) -> OrderVerdict {
    certify(Order::Lr, f, g, grid, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::{GompertzMakeham, WeibullG};
    use crate::system::SystemSpec;

    fn gm(a: f64, b: f64, l: f64) -> GompertzMakeham {
        GompertzMakeham::new(a, b, l).unwrap()
    }

    fn grid_for(f: &dyn Lifetime, g: &dyn Lifetime) -> Grid {
        Grid::for_pair(f, g, DEFAULT_GRID_COUNT, GridPolicy::LogSpaced, None).unwrap()
    }

    #[test]
    fn reflexive_with_zero_margin() {
        let m = gm(1e-8, 0.01, 1.0);
        let grid = grid_for(&m, &m);
        for order in Order::ALL {
            let v = certify(order, &m, &m, &grid, Tolerance::default());
            assert!(v.holds, "{order}");
            assert_eq!(v.margin, 0.0, "{order}");
            assert!(v.witness_x.is_none());
        }
    }

    #[test]
    fn larger_makeham_term_is_stochastically_smaller() {
        let x = gm(0.3, 0.5, 2.0);
        let y = gm(0.3, 0.5, 1.0);
        let grid = grid_for(&x, &y);
        assert!(certify_st(&x, &y, &grid, Tolerance::default()).holds);
        let back = certify_st(&y, &x, &grid, Tolerance::default());
        assert!(!back.holds);
        assert!(back.witness_x.is_some());
        assert!(back.margin < -back.tolerance);
    }

    #[test]
    fn exponential_like_rates_are_lr_ordered() {
        let fast = gm(1e-8, 0.01, 2.0);
        let slow = gm(1e-8, 0.01, 1.0);
        let grid = grid_for(&fast, &slow);
        assert!(certify_lr(&fast, &slow, &grid, Tolerance::default()).holds);
        assert!(!certify_lr(&slow, &fast, &grid, Tolerance::default()).holds);
    }

    #[test]
    fn single_component_rh_follows_alpha() {
        // alpha / (e^{alpha z} - 1) decreases in alpha, so the larger alpha is rh-smaller
        let x = WeibullG::exponential(1.0, 2.0, 1.0).unwrap();
        let y = WeibullG::exponential(2.0, 2.0, 1.0).unwrap();
        let grid = grid_for(&x, &y);
        assert!(certify_rh(&y, &x, &grid, Tolerance::default()).holds);
        assert!(!certify_rh(&x, &y, &grid, Tolerance::default()).holds);
    }

    #[test]
    fn gm_parallel_alpha_supermajorized_is_st() {
        let x =
            SystemSpec::parallel(vec![gm(1.0, 1.0, 0.5).into(), gm(3.0, 1.0, 0.5).into()]).unwrap();
        let y =
            SystemSpec::parallel(vec![gm(0.5, 1.0, 0.5).into(), gm(3.0, 1.0, 0.5).into()]).unwrap();
        let grid = grid_for(&x, &y);
        let v = certify_st(&x, &y, &grid, Tolerance::default());
        assert!(v.holds, "{v}");
    }

    #[test]
    fn ratio_path_matches_hazard_path() {
        #[derive(Debug)]
        struct Opaque(GompertzMakeham);
        impl Lifetime for Opaque {
            fn log_sf(&self, x: f64) -> f64 {
                self.0.log_sf(x)
            }
            fn log_cdf(&self, x: f64) -> f64 {
                self.0.log_cdf(x)
            }
            fn hazard(&self, x: f64) -> f64 {
                self.0.hazard(x)
            }
            fn log_pdf(&self, x: f64) -> f64 {
                self.0.log_pdf(x)
            }
            fn reversed_hazard(&self, x: f64) -> Result<f64> {
                self.0.reversed_hazard(x)
            }
            fn has_closed_form_hazard(&self) -> bool {
                false
            }
        }
        let x = Opaque(gm(2.0, 1.0, 1.0));
        let y = Opaque(gm(1.0, 1.0, 1.0));
        let grid = grid_for(&x, &y);
        let v = certify_hr(&x, &y, &grid, Tolerance::default());
        assert_eq!(v.method, Method::SurvivalRatio);
        assert!(v.holds);
        assert!(!certify_hr(&y, &x, &grid, Tolerance::default()).holds);
    }

    #[test]
    fn order_names_round_trip() {
        for o in Order::ALL {
            assert_eq!(o.as_str().parse::<Order>().unwrap(), o);
        }
        assert!("xx".parse::<Order>().is_err());
    }
}
