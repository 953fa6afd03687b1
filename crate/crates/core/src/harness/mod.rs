//! Experiment configuration, drivers and reports.

mod config;
mod experiments;
mod report;

pub use config::{
    load_config, DataFamily, ExperimentConfig, FlowConfig, GridConfig, Length, Tolerances, CONFIG_VERSION,
};
pub use experiments::{
    run_apriori, run_conservation, run_galilei_consistency, run_norm_equivalence, run_scaling, run_tail_inequalities,
    run_weights, ConservationReport, ConservationRow, DRIFT_FLOOR, SUITE_BANDS, TAIL_CONSTANT_BOUND,
};
pub use report::{write_report, Check, Report, Value};

use crate::error::Result;

/// The experiments reachable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Conserve,
    NormEquiv,
    Apriori,
    Galilei,
    Scaling,
    Tails,
    Weights,
}

impl Experiment {
    pub fn run(self, cfg: &ExperimentConfig) -> Result<Report> {
        match self {
            Experiment::Conserve => Ok(run_conservation(cfg)?.report(cfg)),
            Experiment::NormEquiv => run_norm_equivalence(cfg),
            Experiment::Apriori => run_apriori(cfg),
            Experiment::Galilei => run_galilei_consistency(cfg),
            Experiment::Scaling => run_scaling(cfg),
            Experiment::Tails => run_tail_inequalities(cfg),
            Experiment::Weights => run_weights(cfg),
        }
    }
}
