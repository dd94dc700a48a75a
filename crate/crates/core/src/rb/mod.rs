//! Leakage-aware randomized benchmarking: sequences, simulation, fits,
//! bootstrap and experiment orchestration.

pub mod analysis;
pub mod bootstrap;
pub mod dataset;
pub mod experiment;
pub mod sequence;
pub mod simulate;
pub mod spam;
pub mod survival;
pub mod sweep;

pub use analysis::{
    analyze, average_error, fit_all, fit_leakage, fit_standard, leakage_flatness, scattering_estimates, AnalysisResult,
    FitQuantities, FlatnessTest, LeakageFit, ScatteringEstimates, StandardFit,
};
pub use bootstrap::{bootstrap, BootstrapResult, MIN_RESAMPLES};
pub use dataset::{read_focus_csv, write_focus_csv, FocusRecord, RBDataset, RBRecord};
pub use experiment::{
    campaign_presets, decay_curve_table, run_experiment, spam_reports, Campaign, DecayCurveRow, ExperimentConfig,
    ExperimentData, ExperimentReport, InjectedErrors, ProbeReport, Sampling, SpamReport, MEASUREMENT_TIME_S,
};
pub use sequence::{generate_sequences, generate_sequences_with, PauliSelection, RBSequence};
pub use simulate::{simulate_focus, simulate_probe, FocusModel, InterleavedOp};
pub use spam::SpamParams;
pub use survival::{exact_sequence_average, survival_analytic, DecayPrediction, GroupAverage, SurvivalEngine};
pub use sweep::{run_sweep, SweepConfig, SweepRow};
