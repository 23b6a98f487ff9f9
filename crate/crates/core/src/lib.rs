//! Numerical laboratory for the Sherrington-Kirkpatrick spin glass.

pub mod error;
pub mod analytics;
pub mod ensemble;
pub mod exact;
pub mod mc;
pub mod model;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod validate;

pub use error::{Result, SkError};
pub use exact::{
    enumerate_observables, EnergyTable, GibbsDistribution, GroundStateResult, ThermoPoint,
};
pub use model::{
    delta_energy, energy, sample_couplings, CouplingMatrix, InverseTemperature, SpinConfiguration,
};
pub use analytics::{predictions, PredictionSet, BETA_ONE, BETA_STAR};
pub use ensemble::{run_ensemble, EnsembleConfig, EnsembleRun, EnsembleStats};
pub use mc::{ChainConfig, Estimate, MCEstimate};
pub use report::{Extrapolation, SweepReport};
