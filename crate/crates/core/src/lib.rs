//! Influence estimation and maximization on stochastic diffusion models from
//! i.i.d. simulations.
//!
//! The crate covers live-edge models (independent cascade, linear threshold,
//! b-dependence and finite mixtures), averaging and median-of-averages
//! influence oracles with closed-form sample sizing, combined bottom-k
//! reachability sketches, greedy and exhaustive seed selection with an
//! adaptive sample-size wrapper, and an exact enumeration engine used to audit
//! all of the above on small instances.
//!
//! ```
//! use im_oracle::estimators::{build_oracle, size_for_guarantee, OracleMode};
//! use im_oracle::exact::{c_value, exact_influence};
//! use im_oracle::families::gen_star;
//! use im_oracle::SeedSet;
//!
//! # fn main() -> im_oracle::Result<()> {
//! let model = gen_star(200, false)?;
//! let cfg = size_for_guarantee(0.1, 0.05, c_value(&model, 1)?, OracleMode::MedianOfAverages)?
//!     .with_tau(1)
//!     .with_seed(7);
//! let estimate = build_oracle(&model, cfg)?.query(&SeedSet::single(0))?;
//! let truth = exact_influence(&model, &SeedSet::single(0), 1)?;
//! assert!((estimate - truth).abs() <= 0.1 * truth);
//! # Ok(())
//! # }
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod families;
pub mod graph;
pub mod io;
pub mod maximize;
pub mod model;
pub mod reach;
pub mod rng;
pub mod sketches;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, SeedSet};
pub use model::{DiffusionModel, ModelKind, Simulation};
