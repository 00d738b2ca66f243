//! Nielsen complexity of a periodic harmonic chain under sudden quenches.
//!
//! The chain of `N` oscillators with frequency `omega` and nearest-neighbour
//! coupling `k` decouples into normal modes with eigenvalues
//! `lambda_j = omega^2 + 2k (1 - cos(2 pi j / N))`. After a sequence of
//! sudden parameter changes each mode stays Gaussian with a width governed by
//! an Ermakov-Milne-Pinney auxiliary function, solved here in closed form per
//! segment and cross-checked with an RK4 integrator.
//!
//! Everything is generic over [`scalar::Real`] (`f32`, `f64`); the aliases
//! below fix the scalar to `f64`, with `*F32` variants for single precision.

pub mod complexity;
pub mod emp;
pub mod error;
pub mod experiments;
pub mod io;
pub mod scalar;
pub mod spectrum;

pub use complexity::{
    complexity_bounds, critical_zero_mode_closed_form, early_time_coefficients, mode_phase_functions,
    multi_quench_offset, perturbative_delta_response, successive_complexity, total_complexity, LambdaPolicy,
};
pub use emp::{
    build_mode_solution, evaluate_auxiliary, initial_segment_constants, integrate_emp_oracle,
    propagate_constants, wronskian_invariant_residual,
};
pub use error::{Error, Result};
pub use scalar::Real;
pub use spectrum::mode_eigenvalues;

pub type Chain = spectrum::ChainSpec<f64>;
pub type Segment = spectrum::QuenchSegment<f64>;
pub type Schedule = spectrum::QuenchSchedule<f64>;
pub type Spectrum = spectrum::ModeSpectrum<f64>;
pub type Constants = emp::SegmentConstants<f64>;
pub type State = emp::AuxiliaryState<f64>;
pub type Breakdown = complexity::ComplexityBreakdown<f64>;
pub type Solution = complexity::ChainSolution<f64>;

pub type ChainF32 = spectrum::ChainSpec<f32>;
pub type SegmentF32 = spectrum::QuenchSegment<f32>;
pub type ScheduleF32 = spectrum::QuenchSchedule<f32>;
pub type SpectrumF32 = spectrum::ModeSpectrum<f32>;
pub type ConstantsF32 = emp::SegmentConstants<f32>;
pub type StateF32 = emp::AuxiliaryState<f32>;
pub type BreakdownF32 = complexity::ComplexityBreakdown<f32>;
pub type SolutionF32 = complexity::ChainSolution<f32>;
