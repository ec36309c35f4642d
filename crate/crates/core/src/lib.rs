//! # wprox-core
//!
//! Wasserstein-2 proximal operators and fixed-point iteration on finitely
//! supported probability measures over R^d.
//!
//! Everything is exactly computable: measures are weighted point clouds,
//! the Wasserstein-2 distance is solved as an exact transportation LP with
//! a duality certificate, and the proximal mapping transports atoms. On top
//! of that sit the operator calculus (quasi-firmly nonexpansive maps,
//! push-forwards, compositions), the proximal point algorithm and its
//! cyclic variants, and monitors that re-verify the inequalities every
//! piece is supposed to satisfy.
//!
//! Modules:
//!
//! * [`measures`] — discrete measures, point maps, fixed-set witnesses;
//! * [`transport`] — exact W2 plans, geodesics, generalized geodesics,
//!   disintegration;
//! * [`functionals`] — potential/interaction/sum energies, convexity
//!   checker, Lipschitz probe;
//! * [`prox`] — the proximal mapping and its two defining inequalities;
//! * [`operators`] — quasi alpha-firm calculus and the push-forward
//!   transfer inequality;
//! * [`iterate`] — PPA, cyclic PPA (fixed and diminishing steps), Fejer
//!   and regularity monitors, convergence reports;
//! * [`suites`] — seeded property suites behind the `check` command;
//! * [`instances`] — the pinned instance generator the suites draw from.
//!
//! ```
//! use wprox_core::measures::DiscreteMeasure;
//! use wprox_core::transport::w2_squared;
//!
//! let mu = DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![0.25, 0.75])?;
//! let nu = DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![0.75, 0.25])?;
//! assert!((w2_squared(&mu, &nu)? - 0.5).abs() < 1e-9);
//! # Ok::<(), wprox_core::Error>(())
//! ```

pub mod error;
pub mod functionals;
pub mod instances;
pub mod iterate;
pub mod measures;
pub mod operators;
pub mod prox;
pub mod suites;
pub mod tolerances;
pub mod transport;

pub use error::{Error, Result};
pub use measures::{DiscreteMeasure, FixedSetWitness, PointMap};
pub use transport::{solve_w2, TransportPlan};
