//! Lyapunov constants and nonresonance certificates for the Neumann problem
//!
//! ```text
//! u''(x) + a(x) u(x) = 0,   x in (0, L),   u'(0) = u'(L) = 0.
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`potential`]: piecewise-constant and sampled-linear coefficients with
//!   exact norms and the `≺` order relation.
//! * [`ode`]: adaptive shooting with a Prüfer angle, resonance residuals and
//!   zero-profile extraction.
//! * [`constants`]: eigenvalues, the L¹ and L∞ Lyapunov constants and the
//!   closed-form variational minima.
//! * [`certifier`]: sufficient conditions for uniqueness of the trivial
//!   solution, emitted as auditable [`certifier::Certificate`]s.
//! * [`constructions`]: extremal, resonant and counterexample potentials.
//! * [`oracle`]: brute-force verifiers independent of the shooting path.
//! * [`suites`]: seeded randomized verification suites behind `verify`.
//! * [`cli`]: the JSON command-line front door.

pub mod certifier;
pub mod cli;
pub mod constants;
pub mod constructions;
mod error;
pub mod json;
pub mod ode;
pub mod oracle;
pub mod potential;
pub mod roots;
pub mod suites;

pub use error::{Error, Result};
pub use potential::{DominanceReport, Interval, Potential, Tolerances};
