//! Certification of stochastic orders between the smallest and largest
//! order statistics of heterogeneous Weibull-G and Gompertz-Makeham
//! component systems.
//!
//! * [`lifetime`]: component laws with closed-form cdf, sf, pdf, hazard and
//!   reversed hazard.
//! * [`system`]: series (`X_{1:n}`) and parallel (`X_{n:n}`) systems.
//! * [`majorization`]: vector majorization, T-transforms, chain majorization
//!   and the similarly-ordered set `P_n`.
//! * [`certify`]: grid verdicts for the st, hr, rh and lr orders plus
//!   Schur-condition checks.
//! * [`bench`]: one randomized scenario per ordering theorem.
//! * [`montecarlo`]: inverse-transform sampling and KS cross-validation.

pub mod bench;
pub mod certify;
pub mod cli;
pub mod error;
pub mod lifetime;
pub mod majorization;
pub mod montecarlo;
pub mod numeric;
pub mod system;

pub use error::{Error, Result};
pub use lifetime::{
    Baseline, BaselineDistribution, GompertzMakeham, Lifetime, LifetimeModel, OddsFn, WeibullG,
};
pub use system::{Structure, SystemSpec};
