//! Complexity of the state at `t` measured against the state at `t0 > 0`.

use serde::{Deserialize, Serialize};

use super::{ChainSolution, ComplexityBreakdown, LambdaPolicy, OmegaValue, PhasePair};
use crate::emp::AuxiliaryState;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::spectrum::QuenchSchedule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessiveComplexity<T> {
    pub breakdown: ComplexityBreakdown<T>,
    /// Modes whose arctan denominator `Re R Re T + Im R Im T` is not positive,
    /// i.e. where the principal branch differs from the relative phase.
    pub branch_flagged: Vec<usize>,
}

/// `(A_s, B_s)` from reference and target frequencies, plus whether the
/// arctan denominator is non-positive.
pub fn successive_terms<T: Real>(reference: &OmegaValue<T>, target: &OmegaValue<T>) -> (PhasePair<T>, bool) {
    let a = (target.modulus() / reference.modulus()).ln();
    let num = target.im * reference.re - reference.im * target.re;
    let den = reference.re * target.re + reference.im * target.im;
    let b = if num == T::zero() { T::zero() } else { (num / den).atan() };
    (PhasePair { a, b }, !(den > T::zero()))
}

impl<T: Real> ChainSolution<T> {
    pub fn successive(&self, t0: T, t: T, policy: LambdaPolicy) -> Result<SuccessiveComplexity<T>> {
        if t < t0 {
            return Err(Error::Window(format!("target time {t} precedes reference time {t0}")));
        }
        let s = self.schedule();
        let r = s.segment_at(t0)?;
        let g = s.segment_at(t)?;
        if g.index > r.index + 1 {
            return Err(Error::Window(format!(
                "target time {} lies beyond the segment after the reference segment (ends at {})",
                to_f64(t),
                to_f64(s.segment_start(r.index + 2)),
            )));
        }
        let rs = self.states_in(r.index, r.tau)?;
        let ts = self.states_in(g.index, g.tau)?;
        Ok(self.successive_from_states(r.index, &rs, g.index, &ts, policy))
    }

    /// Successive complexity from externally supplied reference and target
    /// states, given the segments they lie in.
    pub fn successive_from_states(
        &self,
        reference_index: usize,
        reference: &[AuxiliaryState<T>],
        target_index: usize,
        target: &[AuxiliaryState<T>],
        policy: LambdaPolicy,
    ) -> SuccessiveComplexity<T> {
        let r_slot = self.slots(reference_index, policy);
        let t_slot = self.slots(target_index, policy);
        let mut pairs = Vec::with_capacity(reference.len());
        let mut flagged = Vec::new();
        for j in 0..reference.len() {
            let om_r = OmegaValue::from_state(&reference[j], r_slot[j]);
            let om_t = OmegaValue::from_state(&target[j], t_slot[j]);
            let (p, flag) = successive_terms(&om_r, &om_t);
            if flag {
                flagged.push(j + 1);
            }
            pairs.push(p);
        }
        SuccessiveComplexity {
            breakdown: ComplexityBreakdown::from_pairs(&pairs),
            branch_flagged: flagged,
        }
    }
}

/// `C_s(t0, t)` with `t` in the segment of `t0` or the next one.
pub fn successive_complexity<T: Real>(
    schedule: &QuenchSchedule<T>,
    t0: T,
    t: T,
    policy: LambdaPolicy,
) -> Result<SuccessiveComplexity<T>> {
    ChainSolution::new(schedule)?.successive(t0, t, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::ChainSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn n1() -> QuenchSchedule<f64> {
        QuenchSchedule::single_quench(ChainSpec::<f64>::new(1, 3.0, 0.0).unwrap(), 5.0, 0.0).unwrap()
    }

    #[test]
    fn hand_case() {
        let c = successive_complexity(&n1(), PI / 20.0, PI / 10.0, LambdaPolicy::FixedInitial).unwrap();
        let bd = &c.breakdown;
        assert_relative_eq!(bd.a[0], 0.51083, epsilon = 1e-5);
        assert_relative_eq!(bd.b[0], -0.48996, epsilon = 1e-5);
        assert_relative_eq!(bd.total, 0.35391, epsilon = 1e-5);
        assert!(c.branch_flagged.is_empty());
    }

    #[test]
    fn zero_at_reference() {
        let spec = ChainSpec::<f64>::new(12, 3.0, 4.0).unwrap();
        let s = QuenchSchedule::periodic(spec, &[(5.0, 4.0), (3.0, 4.0)], 4.0, true).unwrap();
        for &t0 in &[0.0, 1.0, 3.3, 4.0, 6.2] {
            let c = successive_complexity(&s, t0, t0, LambdaPolicy::FixedInitial).unwrap();
            assert_eq!(c.breakdown.total, 0.0);
        }
    }

    #[test]
    fn reduces_to_ordinary_complexity_from_zero() {
        let spec = ChainSpec::<f64>::new(12, 3.0, 4.0).unwrap();
        let s = QuenchSchedule::periodic(spec, &[(5.0, 4.0), (3.0, 4.0)], 4.0, true).unwrap();
        let sol = ChainSolution::new(&s).unwrap();
        for &t in &[0.3, 2.0, 3.9] {
            let cs = sol.successive(0.0, t, LambdaPolicy::FixedInitial).unwrap();
            let c = sol.complexity_at(t, LambdaPolicy::FixedInitial).unwrap();
            assert_relative_eq!(cs.breakdown.total, c.total, max_relative = 1e-12);
        }
    }

    #[test]
    fn window_checks() {
        let spec = ChainSpec::<f64>::new(3, 3.0, 4.0).unwrap();
        let s = QuenchSchedule::periodic(spec, &[(5.0, 4.0), (3.0, 4.0), (5.0, 4.0)], 4.0, true).unwrap();
        let sol = ChainSolution::new(&s).unwrap();
        assert!(matches!(sol.successive(2.0, 1.0, LambdaPolicy::FixedInitial), Err(Error::Window(_))));
        assert!(sol.successive(1.0, 7.9, LambdaPolicy::FixedInitial).is_ok());
        assert!(matches!(sol.successive(1.0, 8.0, LambdaPolicy::FixedInitial), Err(Error::Window(_))));
        assert!(sol.successive(4.0, 11.0, LambdaPolicy::FixedInitial).is_ok());
    }

    #[test]
    fn principal_branch() {
        let r = OmegaValue { re: 1.0f64, im: 0.0 };
        let t = OmegaValue { re: -1.0, im: 0.5 };
        let (p, flag) = successive_terms(&r, &t);
        assert!(flag);
        assert!(p.b.abs() < PI / 2.0);
    }
}
