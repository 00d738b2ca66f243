//! Closed forms and small-parameter expansions.

use serde::{Deserialize, Serialize};

use super::{ChainSolution, LambdaPolicy, PhasePair};
use crate::error::{Error, Result};
use crate::scalar::{lit, pairwise_sum, Real};
use crate::spectrum::{mode_eigenvalues, ChainSpec, QuenchSchedule, QuenchSegment};

/// Zero-mode complexity after a quench to `omega = 0, k = 0` from frequency
/// `omega_i`: `sqrt( ln^2(1 + w^2 t^2) / 16 + arctan^2(w t) / 4 )`.
pub fn critical_zero_mode_closed_form<T: Real>(omega_i: T, t: T) -> T {
    let x = omega_i * t;
    let l = (x * x).ln_1p();
    let a = x.atan();
    (l * l / lit::<T>(16.0) + a * a / lit::<T>(4.0)).sqrt()
}

/// `C^2(t) = a2 t^2 + a4 t^4 + O(t^6)` on the first segment, with
///
/// ```text
/// a2 =  1/4  sum_j (l_j - l_j0)^2 / l_j0
/// a4 = -1/48 sum_j (l_j - l_j0)^2 (5 l_j^2 - 6 l_j l_j0 + 5 l_j0^2) / l_j0^2
/// ```
///
/// The quartic term is negative: the `t^4` parts of `A_j^2` and `B_j^2`
/// combine to `-(5 l^2 - 6 l l0 + 5 l0^2) / 12` times `(l - l0)^2 / l0^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyTimeSeries<T> {
    pub a2: T,
    pub a4: T,
}

impl<T: Real> EarlyTimeSeries<T> {
    pub fn eval(&self, t: T) -> T {
        let t2 = t * t;
        (self.a2 + self.a4 * t2) * t2
    }
}

pub fn early_time_coefficients<T: Real>(spec: &ChainSpec<T>, first_segment: &QuenchSegment<T>) -> Result<EarlyTimeSeries<T>> {
    let n = spec.n_oscillators();
    let l0 = spec.initial_spectrum();
    let l1 = mode_eigenvalues(first_segment.omega, first_segment.coupling, n)?;
    if let Some(bad) = l0.as_slice().iter().find(|&&x| !(x > T::zero())) {
        return Err(Error::InvalidArgument(format!("lambda_j(0) = {bad} is not positive")));
    }
    let mut t2 = Vec::with_capacity(n);
    let mut t4 = Vec::with_capacity(n);
    for (&lam0, &lam) in l0.as_slice().iter().zip(l1.as_slice()) {
        let d2 = (lam - lam0) * (lam - lam0);
        t2.push(d2 / lam0);
        let poly = lit::<T>(5.0) * lam * lam - lit::<T>(6.0) * lam * lam0 + lit::<T>(5.0) * lam0 * lam0;
        t4.push(d2 * poly / (lam0 * lam0));
    }
    Ok(EarlyTimeSeries {
        a2: pairwise_sum(&t2) / lit::<T>(4.0),
        a4: -pairwise_sum(&t4) / lit::<T>(48.0),
    })
}

/// First-order `(A_j, B_j)` for `omega_f = omega_i + delta` at fixed
/// coupling:
///
/// ```text
/// A_j = 2 omega_i delta sin^2(sqrt(lambda0) t) / lambda0
/// B_j = -omega_i delta sin(2 sqrt(lambda0) t) / lambda0
/// ```
pub fn perturbative_delta_response<T: Real>(lambda0: T, omega_i: T, delta: T, t: T) -> PhasePair<T> {
    let w = lambda0.sqrt();
    let s = (w * t).sin();
    let scale = omega_i * delta / lambda0;
    PhasePair {
        a: lit::<T>(2.0) * scale * s * s,
        b: -scale * (lit::<T>(2.0) * w * t).sin(),
    }
}

/// `C^2` at the start of segment `quench` (1-based), evaluated from the
/// propagated state rather than a series.
pub fn multi_quench_offset<T: Real>(schedule: &QuenchSchedule<T>, quench: usize, policy: LambdaPolicy) -> Result<T> {
    if quench == 0 || quench > schedule.n_segments() {
        return Err(Error::InvalidArgument(format!(
            "quench index {quench} outside 1..={}",
            schedule.n_segments()
        )));
    }
    let c = ChainSolution::new(schedule)?.complexity_in(quench - 1, T::zero(), policy)?;
    Ok(c.total * c.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::total_complexity;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        assert_eq!(critical_zero_mode_closed_form(0.3, 0.0), 0.0);
        let expect = ((2f64.ln()).powi(2) / 16.0 + (PI / 4.0).powi(2) / 4.0).sqrt();
        assert_relative_eq!(critical_zero_mode_closed_form(0.5, 2.0), expect, epsilon = 1e-15);
        assert_relative_eq!(expect, 0.42923, epsilon = 1e-5);
        assert_relative_eq!(critical_zero_mode_closed_form(1.0, 100.0), 2.4313, epsilon = 1e-4);
        assert_relative_eq!(critical_zero_mode_closed_form(1.0f32, 1.0f32), 0.42923f32, epsilon = 1e-5);
    }

    fn n1() -> (ChainSpec<f64>, QuenchSegment<f64>) {
        (ChainSpec::<f64>::new(1, 3.0, 0.0).unwrap(), QuenchSegment::open(5.0, 0.0))
    }

    #[test]
    fn early_time_hand_values() {
        let (spec, seg) = n1();
        let s = early_time_coefficients(&spec, &seg).unwrap();
        assert_relative_eq!(s.a2, 256.0 / 36.0, max_relative = 1e-14);
        assert_relative_eq!(s.a4, -256.0 * 2180.0 / (48.0 * 81.0), max_relative = 1e-14);
        let id = early_time_coefficients(&spec, &QuenchSegment::open(3.0, 0.0)).unwrap();
        assert_eq!((id.a2, id.a4), (0.0, 0.0));
    }

    #[test]
    fn early_time_matches_series() {
        let (spec, seg) = n1();
        let s = early_time_coefficients(&spec, &seg).unwrap();
        let q = QuenchSchedule::new(spec, vec![seg]).unwrap();
        let t = 1e-3 / 5.0;
        let c = total_complexity(&q, t, LambdaPolicy::FixedInitial).unwrap().total;
        let rel = (c * c / s.eval(t) - 1.0).abs();
        assert!(rel < 1e-10, "{rel}");
        // the quartic coefficient itself
        let t = 1e-3;
        let c = total_complexity(&q, t, LambdaPolicy::FixedInitial).unwrap().total;
        let a4 = (c * c - s.a2 * t * t) / t.powi(4);
        assert!((a4 / s.a4 - 1.0).abs() < 1e-3, "{a4} vs {}", s.a4);
    }

    #[test]
    fn perturbative_hand_values() {
        let p = perturbative_delta_response(9.0, 3.0, 0.01, 0.0);
        assert_eq!((p.a, p.b), (0.0, 0.0));
        let p = perturbative_delta_response(9.0, 3.0, 0.01, PI / 6.0);
        assert_relative_eq!(p.a, 0.02 / 3.0, epsilon = 1e-15);
        assert!(p.b.abs() < 1e-15);
        let z = perturbative_delta_response(9.0, 0.0, 0.01, 0.7);
        assert_eq!((z.a, z.b), (0.0, -0.0));
    }

    #[test]
    fn perturbative_matches_finite_difference() {
        let spec = ChainSpec::<f64>::new(1, 3.0, 0.0).unwrap();
        let delta = 0.01;
        let q = QuenchSchedule::single_quench(spec, 3.0 + delta, 0.0).unwrap();
        for &t in &[0.2, 0.5, 1.3] {
            let c = total_complexity(&q, t, LambdaPolicy::FixedInitial).unwrap();
            let p = perturbative_delta_response(9.0, 3.0, delta, t);
            assert!((c.a[0] - p.a).abs() < 1e-4, "t={t}: {} vs {}", c.a[0], p.a);
            assert!((c.b[0] - p.b).abs() < 1e-4, "t={t}: {} vs {}", c.b[0], p.b);
        }
    }

    #[test]
    fn offsets() {
        let spec = ChainSpec::<f64>::new(1, 3.0, 0.0).unwrap();
        let q = QuenchSchedule::periodic(spec, &[(5.0, 0.0), (3.0, 0.0)], PI / 20.0, true).unwrap();
        assert_eq!(multi_quench_offset(&q, 1, LambdaPolicy::FixedInitial).unwrap(), 0.0);
        let a = (3.4f64 / 2.04).ln();
        let b = (-1.6f64 / 3.0).atan();
        let a20 = multi_quench_offset(&q, 2, LambdaPolicy::FixedInitial).unwrap();
        assert_relative_eq!(a20, 0.25 * (a * a + b * b), epsilon = 1e-12);
        assert_relative_eq!(a20, 0.12525, epsilon = 1e-5);
        assert!(multi_quench_offset(&q, 3, LambdaPolicy::FixedInitial).is_err());

        let full = QuenchSchedule::periodic(spec, &[(5.0, 0.0), (3.0, 0.0)], PI / 5.0, true).unwrap();
        assert!(multi_quench_offset(&full, 2, LambdaPolicy::FixedInitial).unwrap() < 1e-24);
    }
}
