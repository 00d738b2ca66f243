//! Zero-mode lower bound and the single-quench upper estimate `C_u`.

use serde::{Deserialize, Serialize};

use super::{ChainSolution, LambdaPolicy, PhasePair};
use crate::emp::SegmentConstants;
use crate::error::{Error, Result};
use crate::scalar::{lit, pairwise_sum, Real};
use crate::spectrum::QuenchSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds<T> {
    pub lower: T,
    pub upper: T,
}

/// `(A_u, B_u)` of one non-zero mode from its single-quench constants.
pub fn upper_bound_terms<T: Real>(alpha: T, gamma: T, lambda: T, lambda0: T) -> PhasePair<T> {
    let s0 = lambda0.sqrt();
    PhasePair {
        a: ((alpha * alpha * lambda + lambda0).sqrt() / (gamma * s0)).ln(),
        b: (alpha * lambda.sqrt() / s0).atan(),
    }
}

impl<T: Real> ChainSolution<T> {
    /// The time-independent part `1/4 sum_{j<N} (A_u^2 + B_u^2)` of `C_u^2`.
    /// Infinite when a non-zero mode is massless after the quench.
    pub fn upper_bound_offset(&self) -> Result<T> {
        if !self.schedule().is_single_quench() {
            return Err(Error::Unsupported(
                "complexity bounds are only defined for a single quench".into(),
            ));
        }
        let modes = self.modes();
        let n = modes.len();
        let mut terms = Vec::with_capacity(n.saturating_sub(1));
        for m in &modes[..n - 1] {
            let seg = &m.segments[0];
            match seg.constants {
                SegmentConstants::NonDegenerate { alpha, gamma, .. } => {
                    terms.push(upper_bound_terms(alpha, gamma, seg.lambda, m.lambda0).norm_squared())
                }
                SegmentConstants::Degenerate { .. } => return Ok(T::infinity()),
            }
        }
        Ok(lit::<T>(0.25) * pairwise_sum(&terms))
    }

    pub fn bounds_at(&self, t: T, policy: LambdaPolicy) -> Result<Bounds<T>> {
        let offset = self.upper_bound_offset()?;
        let c = self.complexity_at(t, policy)?;
        Ok(Bounds {
            lower: c.zero_mode,
            upper: (c.zero_mode * c.zero_mode + offset).sqrt(),
        })
    }
}

/// `(C_0(t), C_u(t))` for a single quench.
pub fn complexity_bounds<T: Real>(schedule: &QuenchSchedule<T>, t: T, policy: LambdaPolicy) -> Result<Bounds<T>> {
    ChainSolution::new(schedule)?.bounds_at(t, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{ChainSpec, QuenchSegment};
    use approx::assert_relative_eq;

    #[test]
    fn mode_level_terms() {
        let p = upper_bound_terms(0.32, 0.68, 25.0, 9.0);
        assert_relative_eq!(p.a, (3.4f64 / 2.04).ln(), epsilon = 1e-14);
        assert_relative_eq!(p.b, (1.6f64 / 3.0).atan(), epsilon = 1e-14);
    }

    #[test]
    fn bounds_at_start() {
        let spec = ChainSpec::<f64>::new(4, 3.0, 2.0).unwrap();
        let s = QuenchSchedule::single_quench(spec, 0.3, 2.5).unwrap();
        let b = complexity_bounds(&s, 0.0, LambdaPolicy::FixedInitial).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(b.upper >= 0.0);
    }

    #[test]
    fn lower_bound_is_zero_mode() {
        let spec = ChainSpec::<f64>::new(10, 0.3, 10.0).unwrap();
        let s = QuenchSchedule::single_quench(spec, 0.004, 10.0).unwrap();
        let sol = ChainSolution::new(&s).unwrap();
        for k in 0..40 {
            let t = k as f64 * 13.7;
            let c = sol.complexity_at(t, LambdaPolicy::FixedInitial).unwrap();
            let b = sol.bounds_at(t, LambdaPolicy::FixedInitial).unwrap();
            assert_eq!(b.lower, c.zero_mode);
            assert!(b.lower <= c.total);
        }
    }

    #[test]
    fn multi_quench_unsupported() {
        let spec = ChainSpec::<f64>::new(3, 1.0, 1.0).unwrap();
        let s = QuenchSchedule::new(spec, vec![QuenchSegment::new(2.0, 1.0, 1.0), QuenchSegment::open(1.0, 1.0)])
            .unwrap();
        assert!(matches!(
            complexity_bounds(&s, 0.5, LambdaPolicy::FixedInitial),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn massless_non_zero_mode_gives_infinite_upper() {
        let spec = ChainSpec::<f64>::new(1, 1.0, 0.0).unwrap();
        // N = 1 has no non-zero modes, so the offset is an empty sum.
        let s = QuenchSchedule::single_quench(spec, 0.0, 0.0).unwrap();
        assert_eq!(ChainSolution::new(&s).unwrap().upper_bound_offset().unwrap(), 0.0);
        let spec = ChainSpec::<f64>::new(4, 1.0, 1.0).unwrap();
        let s = QuenchSchedule::single_quench(spec, 0.0, 0.0).unwrap();
        assert!(ChainSolution::new(&s).unwrap().upper_bound_offset().unwrap().is_infinite());
    }
}
