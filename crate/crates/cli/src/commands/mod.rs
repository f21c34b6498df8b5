pub mod fit;
pub mod resiliency;
pub mod risk;
pub mod simulate;
pub mod trajectory;

use crate::config::Config;
use crate::io::Outputs;

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: Config,
    /// `--seed`, overriding `sim.seed`.
    pub seed: Option<i64>,
}

/// Files to write plus a one-line summary per notable result.
#[derive(Debug, Default)]
pub struct Report {
    pub outputs: Outputs,
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
}
