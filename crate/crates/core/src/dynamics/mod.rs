//! Metropolis trajectories, exact hitting-time moments, spectral gap and
//! mixing time.

mod hitting;
mod mixing;
mod sampling;
mod simulate;
mod spectrum;

pub use hitting::{exact_hitting_moments, hitting_moments, mean_hitting_times, HittingMoments};
pub use mixing::{mixing_time, MixingResult, DEFAULT_MIXING_BUDGET};
pub use sampling::{sample_hitting_times, HittingStats, SampleConfig, SimMode, WindowStats};
pub use simulate::{simulate, simulate_lumped, trial_rng, SimOptions, Trajectory, TrajectoryStep};
pub use spectrum::{
    dense_eigenvalues, fit_constants, spectral_gap, FittedConstants, GapMethod, SpectrumResult, DENSE_GAP_FLOOR, DENSE_MAX,
};
