//! Continuous versus zero-order-hold stopping control, checked end to end.
//!
//! A point mass must brake from cruise velocity `V` to rest within a fixed
//! horizon. An idealized controller applies a continuously growing
//! deceleration; a sampled implementation holds piecewise-constant values
//! over `N` equal periods. This crate provides
//!
//! * closed-form solutions of both systems and the exact stopping-distance
//!   gap between them ([`analytic`]),
//! * a switch-aligned Runge-Kutta integrator that reproduces those solutions
//!   to rounding ([`simulate`]),
//! * Grönwall-type deviation bounds together with measured norms, so the
//!   slack of the bounds stays visible ([`bounds`]), and
//! * a retrenchment/refinement proof-obligation checker instantiated for
//!   the above pair of systems ([`po`]).
//!
//! The headline facts, all surfaced as checkable values: the hold-controlled
//! system stops short of the continuous one by exactly `V * stop_time / (6 N)`,
//! the gap shrinks without limit as the sampling grows finer, and while no
//! exact state correspondence between the two systems exists (a refinement
//! attempt fails), the deviation-budgeted retrenchment obligation passes.
//!
//! ```
//! use stopgap::{analytic, bounds, po, ControlSignal, GridSpec, SystemParams};
//! use stopgap::simulate::integrate;
//!
//! let params = SystemParams::new(20.0, 10.0, 10)?;
//! assert!((analytic::exact_final_gap(&params) - 10.0 / 3.0).abs() < 1e-12);
//!
//! let grid = GridSpec::new(100)?;
//! let cont = integrate(&params, &ControlSignal::LinearRamp, grid)?;
//! let zoh = integrate(&params, &ControlSignal::StaircaseZoh, grid)?;
//! let report = bounds::bound_report(&params, &cont, &zoh, GridSpec::new(1000)?)?;
//! assert!(report.sound);
//!
//! let abstract_frag = po::Fragment::new(cont, ControlSignal::LinearRamp);
//! let concrete_frag = po::Fragment::new(zoh, ControlSignal::StaircaseZoh);
//! let data = po::train_retrenchment_data(&params);
//! let result = po::check_retrenchment_po(&abstract_frag, &concrete_frag, &data)?;
//! assert_eq!(result.verdict, po::Verdict::Pass);
//! # Ok::<(), stopgap::Error>(())
//! ```

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod model;
pub mod po;
pub mod report;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{ControlSignal, State, SystemParams};
pub use simulate::{GridSpec, Trajectory};
