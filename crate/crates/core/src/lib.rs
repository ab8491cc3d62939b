//! Numerics for subordination by orthogonal martingales.
//!
//! The crate covers four layers that feed each other:
//!
//! * [`constants`]: bounded Laguerre functions `L_p`, their least positive
//!   roots and the sharp constants derived from them.
//! * [`bellman`]: the implicit two-variable Bellman function `B_q(u, v)`, the
//!   closed forms at `p = 3`, and both solutions of the Pogorelov boundary
//!   system.
//! * [`lift`]: the four-variable lift through pair norms, its Hessian form,
//!   the sum-of-squares certificate and the improved lower bound under
//!   orthonormal direction pairs.
//! * [`martingale`]: a discrete-time simulator for `R^2`-valued martingales
//!   driven by planar Gaussian increments, used to check the inequalities by
//!   Monte Carlo.
//!
//! The [`cli`] module holds the command-line verbs; the `bellmart` binary is
//! a thin wrapper around it.

pub mod bellman;
pub mod cli;
pub mod constants;
pub mod error;
pub mod format;
pub mod grid;
pub mod lift;
pub mod martingale;
pub mod pair;
pub mod roots;

pub use error::{Error, Result};
pub use pair::ConjugatePair;
