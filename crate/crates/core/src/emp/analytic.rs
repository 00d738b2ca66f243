//! Piecewise-analytic auxiliary functions with continuity matching.

use serde::{Deserialize, Serialize};

use super::{AuxiliaryState, SegmentConstants};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{is_degenerate, mode_lambda, QuenchSchedule};

/// Constants of the first segment, fixed by `b(0) = 1`, `b'(0) = 0`.
pub fn initial_segment_constants<T: Real>(lambda0: T, lambda_seg: T) -> Result<SegmentConstants<T>> {
    if !(lambda0 > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "lambda_j(0) = {lambda0} admits no pre-quench ground state"
        )));
    }
    if lambda_seg < T::zero() {
        return Err(Error::InvalidArgument(format!("negative eigenvalue {lambda_seg}")));
    }
    if is_degenerate(lambda_seg) {
        return Ok(SegmentConstants::Degenerate {
            a0: T::one(),
            a1: T::zero(),
            a2: lambda0,
        });
    }
    let two = lit::<T>(2.0);
    Ok(SegmentConstants::NonDegenerate {
        alpha: (lambda_seg - lambda0) / (two * lambda_seg),
        beta: T::zero(),
        gamma: (lambda_seg + lambda0) / (two * lambda_seg),
    })
}

/// `(b, b')` at local time `tau` of a segment with eigenvalue `lambda_seg`.
pub fn evaluate_auxiliary<T: Real>(
    constants: &SegmentConstants<T>,
    lambda_seg: T,
    tau: T,
) -> Result<AuxiliaryState<T>> {
    let (b2, d) = constants.quadratic_form(lambda_seg, tau);
    if !(b2 > T::zero()) || !d.is_finite() {
        return Err(Error::Inconsistent(format!(
            "b^2 = {b2} at tau = {tau} (lambda = {lambda_seg}, constants {constants:?})"
        )));
    }
    let b = b2.sqrt();
    Ok(AuxiliaryState { b, b_dot: d / b })
}

/// Re-anchors the solution at a boundary: the next segment's constants (local
/// time restarting at zero) reproduce `b` and `b'` at the end of the previous
/// segment and satisfy the next segment's invariant.
pub fn propagate_constants<T: Real>(
    prev: &SegmentConstants<T>,
    lambda_prev: T,
    lambda_next: T,
    lambda0: T,
    boundary_tau: T,
) -> Result<SegmentConstants<T>> {
    let (b2, d) = prev.quadratic_form(lambda_prev, boundary_tau);
    constants_from_boundary(b2, d, lambda_next, lambda0)
}

pub(crate) fn constants_from_boundary<T: Real>(
    b2: T,
    d: T,
    lambda_next: T,
    lambda0: T,
) -> Result<SegmentConstants<T>> {
    if !(b2 > T::zero()) || !d.is_finite() {
        return Err(Error::Inconsistent(format!("b^2 = {b2} at a segment boundary")));
    }
    if lambda_next < T::zero() {
        return Err(Error::InvalidArgument(format!("negative eigenvalue {lambda_next}")));
    }
    if is_degenerate(lambda_next) {
        return Ok(SegmentConstants::Degenerate {
            a0: b2,
            a1: d,
            a2: (lambda0 + d * d) / b2,
        });
    }
    let beta = d / lambda_next.sqrt();
    let gamma = (lambda0 / lambda_next + beta * beta + b2 * b2) / (lit::<T>(2.0) * b2);
    Ok(SegmentConstants::NonDegenerate {
        alpha: b2 - gamma,
        beta,
        gamma,
    })
}

/// Deviation of the constants from their Wronskian constraint,
/// `gamma^2 - beta^2 - alpha^2 = lambda0 / lambda` or `a0 a2 - a1^2 = lambda0`.
///
/// The deviation is divided by `max(1, S)`, `S` being the sum of the squared
/// terms entering the constraint, so it is the absolute deviation for
/// order-one constants and the rounding-limited relative deviation for the
/// large constants of deep quenches.
pub fn wronskian_invariant_residual<T: Real>(
    constants: &SegmentConstants<T>,
    lambda_seg: T,
    lambda0: T,
) -> T {
    let (deviation, scale) = match *constants {
        SegmentConstants::NonDegenerate { alpha, beta, gamma } => {
            let (g2, b2, a2) = (gamma * gamma, beta * beta, alpha * alpha);
            ((g2 - b2 - a2 - lambda0 / lambda_seg).abs(), g2 + b2 + a2)
        }
        SegmentConstants::Degenerate { a0, a1, a2 } => {
            let (p, q) = (a0 * a2, a1 * a1);
            ((p - q - lambda0).abs(), p.abs() + q)
        }
    };
    deviation / scale.max(T::one())
}

/// Constants of one segment paired with that segment's eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSolution<T> {
    pub constants: SegmentConstants<T>,
    pub lambda: T,
}

/// Complete piecewise solution of one mode across a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution<T> {
    /// 1-based mode index.
    pub j: usize,
    pub lambda0: T,
    pub segments: Vec<SegmentSolution<T>>,
}

impl<T: Real> ModeSolution<T> {
    /// State at local time `tau` of segment `index`.
    pub fn state_in(&self, index: usize, tau: T) -> Result<AuxiliaryState<T>> {
        if index == 0 && tau == T::zero() {
            return Ok(AuxiliaryState::initial());
        }
        let seg = &self.segments[index];
        evaluate_auxiliary(&seg.constants, seg.lambda, tau)
    }

    /// State at global time `t`.
    pub fn state_at(&self, schedule: &QuenchSchedule<T>, t: T) -> Result<AuxiliaryState<T>> {
        let loc = schedule.segment_at(t)?;
        self.state_in(loc.index, loc.tau)
    }

    /// Largest relative mismatch of `(b, b')` across any internal boundary.
    pub fn max_boundary_mismatch(&self, schedule: &QuenchSchedule<T>) -> Result<T> {
        let mut worst = T::zero();
        for i in 1..self.segments.len() {
            let dur = schedule.segments()[i - 1].duration.expect("internal segment is finite");
            let left = self.state_in(i - 1, dur)?;
            let right = self.state_in(i, T::zero())?;
            let rel = |a: T, b: T| (a - b).abs() / (T::one() + a.abs());
            worst = worst.max(rel(left.b, right.b)).max(rel(left.b_dot, right.b_dot));
        }
        Ok(worst)
    }

    /// Largest constraint residual over the segments.
    pub fn max_constraint_residual(&self) -> T {
        self.segments
            .iter()
            .map(|s| wronskian_invariant_residual(&s.constants, s.lambda, self.lambda0))
            .fold(T::zero(), T::max)
    }
}

/// Solves mode `j` (1-based) across the whole schedule.
pub fn build_mode_solution<T: Real>(schedule: &QuenchSchedule<T>, j: usize) -> Result<ModeSolution<T>> {
    let n = schedule.n_modes();
    if j == 0 || j > n {
        return Err(Error::InvalidArgument(format!("mode index {j} outside 1..={n}")));
    }
    let spec = schedule.spec();
    let lambda0 = mode_lambda(spec.omega0(), spec.coupling0(), j, n);
    let lambdas = schedule
        .segments()
        .iter()
        .map(|s| mode_lambda(s.omega, s.coupling, j, n));
    solve_mode(schedule, j, lambda0, lambdas)
}

pub(crate) fn solve_mode<T: Real>(
    schedule: &QuenchSchedule<T>,
    j: usize,
    lambda0: T,
    lambdas: impl IntoIterator<Item = T>,
) -> Result<ModeSolution<T>> {
    let mut segments: Vec<SegmentSolution<T>> = Vec::with_capacity(schedule.n_segments());
    for (i, lambda) in lambdas.into_iter().enumerate() {
        let constants = match segments.last() {
            None => initial_segment_constants(lambda0, lambda)?,
            Some(prev) => {
                let dur = schedule.segments()[i - 1].duration.expect("internal segment is finite");
                propagate_constants(&prev.constants, prev.lambda, lambda, lambda0, dur).map_err(
                    |e| match e {
                        Error::Inconsistent(m) => Error::Inconsistent(format!(
                            "mode {j}, boundary {i} (t = {}): {m}",
                            to_f64(schedule.segment_start(i))
                        )),
                        other => other,
                    },
                )?
            }
        };
        segments.push(SegmentSolution { constants, lambda });
    }
    Ok(ModeSolution { j, lambda0, segments })
}
