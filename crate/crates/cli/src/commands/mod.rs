pub mod polar;
pub mod solve;
pub mod sweep;
pub mod verify;

pub use polar::{cmd_polar, PolarSummaryFile};
pub use solve::cmd_solve;
pub use sweep::{cmd_sweep, SweepSummary};
pub use verify::{cmd_verify, verify_config, verify_dump, Status, VerifyReport};
