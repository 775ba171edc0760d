//! Optimal probabilistic operations on a pair of non-orthogonal pure states.
//!
//! The crate covers three closely related tasks for two equiprobable states:
//!
//! - **separation**: map the pair onto a pair with smaller overlap, with the
//!   largest possible success probability ([`separation`]);
//! - **discrimination**: unambiguous (zero-error) identification, minimum-error
//!   identification, and the family interpolating between them
//!   ([`discrimination`]);
//! - **exact cloning**: produce `N` perfect copies from `M` ([`cloning`]).
//!
//! Closed-form bounds are certified by a brute-force maximizer over the
//! feasibility region ([`oracle`]) and by seeded Monte Carlo runs ([`sim`]).
//! Both heavy loops run on rayon when the `parallel` feature is enabled
//! (default) and sequentially otherwise; see [`Execution`].

pub mod cloning;
pub mod discrimination;
pub mod error;
mod exec;
pub mod numerics;
pub mod oracle;
pub mod separation;
pub mod sim;
pub mod states;

pub use error::{Error, Result};
pub use exec::Execution;
