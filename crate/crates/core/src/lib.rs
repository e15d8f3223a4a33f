//! Boundedness and instability analysis for `ẍ + α(t)ẋ − k(t)x = 0` with
//! positive `k` (negative stiffness).
//!
//! - [`coefficients`]: closed-form time-varying coefficients with exact derivatives
//! - [`criteria`]: sufficient/necessary condition sets and the Chetaev test
//! - [`certificates`]: Lyapunov and Chetaev functions along trajectories
//! - [`integrator`]: adaptive Dormand–Prince integration with escape detection
//! - [`oracles`]: Γ, `I_ν`, `K_ν` and closed-form solutions of solvable cases
//! - [`transform`]: time reparametrizations producing fully time-varying pairs
//! - [`families`], [`sweep`], [`parallel`], [`io`]: worked examples, parameter
//!   scans, batch execution and output formats

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod certificates;
pub mod coefficients;
pub mod criteria;
pub mod error;
pub mod families;
pub mod integrator;
pub mod io;
pub mod oracles;
pub mod parallel;
pub mod sweep;
pub mod transform;

pub use certificates::{Certificate, CertificateKind, CertificateTrace};
pub use coefficients::{CoefficientProfile, SignVerdict, Window};
pub use criteria::{ConditionStatus, CriterionReport, Overall, SymmetricMatrix2};
pub use error::{Error, Result};
pub use families::ExampleFamily;
pub use integrator::{integrate, Classification, IntegrationConfig, PlanarState, Trajectory};
pub use transform::{Gauge, GaugeDirection};
