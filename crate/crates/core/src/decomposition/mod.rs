//! Constant ledger, iterative decomposition of Hölder cutoffs into kernel
//! superpositions, and the majorization check.

mod ledger;
mod majorize;
mod uchiyama;

pub use ledger::{
    calibrate_sum_constant, choose_constants, kappa_of, rho_of, sigma_of, Calibration, ConditionCheck, ConstantLedger,
    LedgerOptions,
};
pub use majorize::{majorization_check, MajorizationReport, MajorizationSample};
pub use uchiyama::{
    net_weight, reconstruct, uchiyama_decompose, uchiyama_decompose_weighted, write_residuals_csv, Decomposition, Level, LevelAudit, ReconstructionReport,
    ResolutionPolicy,
};
