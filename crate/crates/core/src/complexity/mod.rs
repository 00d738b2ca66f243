//! Nielsen complexity of the time-evolved Gaussian state.
//!
//! For a product of Gaussians `exp(-Omega_j y_j^2 / 2)` measured against the
//! `t = 0` ground state, the complexity is
//!
//! ```text
//! C = 1/2 sqrt( sum_j A_j^2 + B_j^2 ),
//! A_j = ln( sqrt((b b')^2 + lambda_slot) / (sqrt(lambda_j(0)) b^2) ),
//! B_j = arctan( b b' / sqrt(lambda_j(0)) ),
//! ```
//!
//! where `lambda_slot` is chosen by [`LambdaPolicy`].

mod bounds;
mod series;
mod successive;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::emp::{build_mode_solution, AuxiliaryState, ModeSolution};
use crate::error::{Error, Result};
use crate::scalar::{lit, pairwise_sum, Real};
use crate::spectrum::QuenchSchedule;

pub use bounds::{complexity_bounds, upper_bound_terms, Bounds};
pub use series::{
    critical_zero_mode_closed_form, early_time_coefficients, multi_quench_offset,
    perturbative_delta_response, EarlyTimeSeries,
};
pub use successive::{successive_complexity, successive_terms, SuccessiveComplexity};

/// Which eigenvalue enters the additive slot of `A_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaPolicy {
    /// Always `lambda_j(0)`; the slot implied by the ground-state frequency
    /// `Omega_j`. Continuous across every boundary and zero at `t = 0`.
    #[default]
    FixedInitial,
    /// The eigenvalue of the segment the target time lies in. Jumps at
    /// boundaries where that eigenvalue changes, including the first segment.
    LiteralSegment,
}

impl LambdaPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            LambdaPolicy::FixedInitial => "fixed-initial",
            LambdaPolicy::LiteralSegment => "literal-segment",
        }
    }
}

impl fmt::Display for LambdaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LambdaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-initial" => Ok(LambdaPolicy::FixedInitial),
            "literal-segment" => Ok(LambdaPolicy::LiteralSegment),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy `{other}` (expected fixed-initial or literal-segment)"
            ))),
        }
    }
}

/// Complex Gaussian frequency `Omega = sqrt(lambda_ref) / b^2 - i b'/b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaValue<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> OmegaValue<T> {
    /// `lambda_ref` is `lambda_j(0)` for the physical frequency; other
    /// values implement the literal slot convention.
    pub fn from_state(state: &AuxiliaryState<T>, lambda_ref: T) -> Self {
        Self {
            re: lambda_ref.sqrt() / state.b_squared(),
            im: -state.b_dot / state.b,
        }
    }

    pub fn modulus(&self) -> T {
        self.re.hypot(self.im)
    }
}

/// The pair `(A_j, B_j)` of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePair<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> PhasePair<T> {
    pub fn norm_squared(&self) -> T {
        self.a * self.a + self.b * self.b
    }
}

/// `(A_j, B_j)` from a mode state.
pub fn mode_phase_functions<T: Real>(state: &AuxiliaryState<T>, lambda0: T, lambda_slot: T) -> PhasePair<T> {
    let d = state.b_bdot();
    let b2 = state.b_squared();
    // ln(sqrt(d^2 + slot) / sqrt(lambda0)) written around 1 for accuracy near revivals.
    let a = lit::<T>(0.5) * ((d * d + (lambda_slot - lambda0)) / lambda0).ln_1p() - b2.ln();
    let b = (d / lambda0.sqrt()).atan();
    PhasePair { a, b }
}

/// Total complexity with the zero-mode split and the per-mode terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityBreakdown<T> {
    pub total: T,
    /// Contribution of mode `N`.
    pub zero_mode: T,
    /// Contribution of modes `1..N-1`.
    pub rest: T,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Real> ComplexityBreakdown<T> {
    /// Assembles the breakdown from per-mode pairs, summing in mode order.
    pub fn from_pairs(pairs: &[PhasePair<T>]) -> Self {
        let half = lit::<T>(0.5);
        let terms: Vec<T> = pairs.iter().map(PhasePair::norm_squared).collect();
        let n = terms.len();
        let rest_sq = pairwise_sum(&terms[..n - 1]);
        let zero_sq = terms[n - 1];
        Self {
            total: half * pairwise_sum(&terms).sqrt(),
            zero_mode: half * zero_sq.sqrt(),
            rest: half * rest_sq.sqrt(),
            a: pairs.iter().map(|p| p.a).collect(),
            b: pairs.iter().map(|p| p.b).collect(),
        }
    }
}

/// Per-mode analytic solutions for a whole schedule, built once and
/// evaluated at many times.
#[derive(Debug, Clone)]
pub struct ChainSolution<T> {
    schedule: QuenchSchedule<T>,
    modes: Vec<ModeSolution<T>>,
}

impl<T: Real> ChainSolution<T> {
    pub fn new(schedule: &QuenchSchedule<T>) -> Result<Self> {
        let modes = (1..=schedule.n_modes())
            .map(|j| build_mode_solution(schedule, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schedule: schedule.clone(),
            modes,
        })
    }

    pub fn schedule(&self) -> &QuenchSchedule<T> {
        &self.schedule
    }

    pub fn modes(&self) -> &[ModeSolution<T>] {
        &self.modes
    }

    /// Solution of mode `j` (1-based).
    pub fn mode(&self, j: usize) -> &ModeSolution<T> {
        &self.modes[j - 1]
    }

    pub fn lambda0(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.lambda0).collect()
    }

    /// Eigenvalues filling the `A_j` slot in segment `index`.
    pub fn slots(&self, index: usize, policy: LambdaPolicy) -> Vec<T> {
        self.modes
            .iter()
            .map(|m| match policy {
                LambdaPolicy::FixedInitial => m.lambda0,
                LambdaPolicy::LiteralSegment => m.segments[index].lambda,
            })
            .collect()
    }

    /// All mode states at local time `tau` of segment `index`.
    pub fn states_in(&self, index: usize, tau: T) -> Result<Vec<AuxiliaryState<T>>> {
        self.modes.iter().map(|m| m.state_in(index, tau)).collect()
    }

    /// Segment index and all mode states at global time `t`.
    pub fn states_at(&self, t: T) -> Result<(usize, Vec<AuxiliaryState<T>>)> {
        let loc = self.schedule.segment_at(t)?;
        Ok((loc.index, self.states_in(loc.index, loc.tau)?))
    }

    pub fn complexity_at(&self, t: T, policy: LambdaPolicy) -> Result<ComplexityBreakdown<T>> {
        let loc = self.schedule.segment_at(t)?;
        self.complexity_in(loc.index, loc.tau, policy)
    }

    /// Complexity at local time `tau` of segment `index`. With `tau` equal to
    /// the segment's duration this is the left limit at its end boundary.
    pub fn complexity_in(&self, index: usize, tau: T, policy: LambdaPolicy) -> Result<ComplexityBreakdown<T>> {
        let states = self.states_in(index, tau)?;
        Ok(self.breakdown(index, &states, policy))
    }

    /// Complexity from externally supplied states (e.g. the RK4 oracle).
    pub fn breakdown(&self, index: usize, states: &[AuxiliaryState<T>], policy: LambdaPolicy) -> ComplexityBreakdown<T> {
        let slots = self.slots(index, policy);
        let pairs: Vec<PhasePair<T>> = states
            .iter()
            .zip(&self.modes)
            .zip(&slots)
            .map(|((s, m), &slot)| mode_phase_functions(s, m.lambda0, slot))
            .collect();
        ComplexityBreakdown::from_pairs(&pairs)
    }
}

/// Complexity at `t` relative to the `t = 0` state.
pub fn total_complexity<T: Real>(
    schedule: &QuenchSchedule<T>,
    t: T,
    policy: LambdaPolicy,
) -> Result<ComplexityBreakdown<T>> {
    ChainSolution::new(schedule)?.complexity_at(t, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{ChainSpec, QuenchSegment};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn state(b2: f64, d: f64) -> AuxiliaryState<f64> {
        let b = b2.sqrt();
        AuxiliaryState { b, b_dot: d / b }
    }

    #[test]
    fn phase_functions_at_reference_state() {
        let p = mode_phase_functions(&AuxiliaryState::initial(), 4.2, 4.2);
        assert_eq!((p.a, p.b), (0.0, 0.0));
    }

    #[test]
    fn phase_functions_quarter_period() {
        let p = mode_phase_functions(&state(0.68, -1.6), 9.0, 9.0);
        assert_relative_eq!(p.a, (3.4f64 / 2.04).ln(), epsilon = 1e-14);
        assert_relative_eq!(p.a, 0.51083, epsilon = 1e-5);
        assert_relative_eq!(p.b, (-1.6f64 / 3.0).atan(), epsilon = 1e-14);
        assert_relative_eq!(p.b, -0.48996, epsilon = 1e-5);
        // |Omega| = 5 against sqrt(lambda0) = 3
        let om = OmegaValue::from_state(&state(0.68, -1.6), 9.0);
        assert_relative_eq!(om.modulus(), 5.0, epsilon = 1e-14);
        assert_relative_eq!((om.modulus() / 3.0).ln(), p.a, epsilon = 1e-14);
        assert_relative_eq!((om.im / om.re).atan(), -p.b, epsilon = 1e-14);
    }

    #[test]
    fn phase_functions_free_zero_mode() {
        let w = 0.7;
        for &t in &[0.1, 1.0, 10.0, 300.0] {
            let p = mode_phase_functions(&state(1.0 + w * w * t * t, w * w * t), w * w, w * w);
            assert_relative_eq!(p.a, -0.5 * (1.0 + w * w * t * t).ln(), epsilon = 1e-13, max_relative = 1e-13);
            assert_relative_eq!(p.b, (w * t).atan(), epsilon = 1e-14);
        }
    }

    fn n1(omega_f: f64) -> QuenchSchedule<f64> {
        QuenchSchedule::single_quench(ChainSpec::<f64>::new(1, 3.0, 0.0).unwrap(), omega_f, 0.0).unwrap()
    }

    #[test]
    fn single_mode_half_period() {
        let c = total_complexity(&n1(5.0), PI / 10.0, LambdaPolicy::FixedInitial).unwrap();
        assert_relative_eq!(c.a[0], (25.0f64 / 9.0).ln(), epsilon = 1e-12);
        assert!(c.b[0].abs() < 1e-12);
        assert_relative_eq!(c.total, 0.51083, epsilon = 1e-5);
        assert_eq!(c.rest, 0.0);
    }

    #[test]
    fn complexity_vanishes_at_start_and_for_identity() {
        let spec = ChainSpec::<f64>::new(30, 0.4, 2.0).unwrap();
        let q = QuenchSchedule::single_quench(spec, 1.3, 0.5).unwrap();
        assert_eq!(total_complexity(&q, 0.0, LambdaPolicy::FixedInitial).unwrap().total, 0.0);
        let id = QuenchSchedule::single_quench(spec, 0.4, 2.0).unwrap();
        let sol = ChainSolution::new(&id).unwrap();
        for k in 0..50 {
            let c = sol.complexity_at(k as f64 * 1.7, LambdaPolicy::FixedInitial).unwrap();
            assert!(c.total <= 1e-12);
        }
    }

    #[test]
    fn literal_policy_offsets_first_segment() {
        let c = total_complexity(&n1(5.0), 0.0, LambdaPolicy::LiteralSegment).unwrap();
        assert_relative_eq!(c.a[0], 0.5 * (25.0f64 / 9.0).ln(), epsilon = 1e-14);
        assert_eq!(c.b[0], 0.0);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("fixed-initial".parse::<LambdaPolicy>().unwrap(), LambdaPolicy::FixedInitial);
        assert_eq!("literal-segment".parse::<LambdaPolicy>().unwrap(), LambdaPolicy::LiteralSegment);
        assert!("nope".parse::<LambdaPolicy>().is_err());
        assert_eq!(LambdaPolicy::default(), LambdaPolicy::FixedInitial);
    }

    fn n4_quench(omega_f: f64) -> QuenchSchedule<f64> {
        QuenchSchedule::single_quench(ChainSpec::<f64>::new(4, 3.0, 2.0).unwrap(), omega_f, 2.5).unwrap()
    }

    #[test]
    fn per_mode_revivals() {
        let s = n4_quench(0.1);
        let sol = ChainSolution::new(&s).unwrap();
        for j in 1..=4 {
            let lambda = sol.mode(j).segments[0].lambda;
            for n in 1..=10 {
                let t = n as f64 * PI / lambda.sqrt();
                let c = sol.complexity_at(t, LambdaPolicy::FixedInitial).unwrap();
                assert!(c.a[j - 1].abs() < 1e-10 && c.b[j - 1].abs() < 1e-10, "j={j} n={n}");
            }
        }
    }

    #[test]
    fn continuity_across_boundaries() {
        let spec = ChainSpec::<f64>::new(20, 0.3, 4.0).unwrap();
        let s = QuenchSchedule::new(
            spec,
            vec![
                QuenchSegment::new(0.085, 4.0, 5.5),
                QuenchSegment::new(0.3, 4.0, 5.5),
                QuenchSegment::open(0.0, 4.0),
            ],
        )
        .unwrap();
        let sol = ChainSolution::new(&s).unwrap();
        for i in 1..3 {
            let left = sol.complexity_in(i - 1, 5.5, LambdaPolicy::FixedInitial).unwrap();
            let right = sol.complexity_in(i, 0.0, LambdaPolicy::FixedInitial).unwrap();
            assert!((left.total - right.total).abs() < 1e-9);
            assert!((left.zero_mode - right.zero_mode).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn breakdown_invariants(
            n in 1usize..40, w0 in 0.05f64..4.0, k0 in 0.0f64..5.0,
            w1 in 0.0f64..4.0, k1 in 0.0f64..5.0, t in 0.0f64..100.0,
            literal in any::<bool>(),
        ) {
            let spec = ChainSpec::<f64>::new(n, w0, k0).unwrap();
            let s = QuenchSchedule::single_quench(spec, w1, k1).unwrap();
            let policy = if literal { LambdaPolicy::LiteralSegment } else { LambdaPolicy::FixedInitial };
            let c = total_complexity(&s, t, policy).unwrap();
            prop_assume!(c.total.is_finite());
            prop_assert!(c.total >= 0.0);
            let rel = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1e-300 + x.abs().max(y.abs()));
            prop_assert!(rel(c.total * c.total, c.zero_mode * c.zero_mode + c.rest * c.rest));
            let direct: f64 = c.a.iter().zip(&c.b).map(|(a, b)| a * a + b * b).sum();
            prop_assert!(rel(c.total, 0.5 * direct.sqrt()));
            prop_assert!(c.b.iter().all(|b| b.abs() < PI / 2.0));
        }
    }
}
