//! Downlink NOMA in large Poisson networks.
//!
//! The crate simulates two-user (and larger) NOMA clusters in the typical cell
//! of a Poisson deployment, with Rayleigh fading and full-load intercell
//! interference, and measures how the channel disparity between clustered
//! users shapes power allocation, rates and transmission success.
//!
//! - [`geometry`]: deployments, cell membership and user placement
//! - [`channel`]: path loss, fading and interference
//! - [`sic`]: successive interference cancellation and coverage
//! - [`allocation`]: closed-form power allocation
//! - [`clustering`]: user ordering and cluster selection
//! - [`experiment`]: Monte Carlo sweeps and strategy comparisons
//! - [`cli`]: configuration files, CSV output and plots

pub mod allocation;
pub mod channel;
pub mod cli;
pub mod clustering;
pub mod experiment;
pub mod geometry;
pub mod sic;
