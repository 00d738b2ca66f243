//! Fixed-step RK4 integration of the auxiliary equation.
//!
//! Used only as an independent check on the analytic solutions: it knows
//! nothing about segment constants, just the piecewise-constant eigenvalues.
//! Substeps are aligned so that every segment boundary and every requested
//! output time is hit exactly.
//!
//! Near a deep turning point the repulsive term `lambda0 / b^3` makes the
//! equation locally stiff, with linearised frequency
//! `sqrt(lambda + 3 lambda0 / b^4)`. A step whose product with that
//! frequency exceeds [`MAX_PHASE_PER_STEP`] is split into equal sub-steps
//! for that mode only; elsewhere the nominal step is used unchanged.

use super::AuxiliaryState;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{mode_lambda, symmetric_index, QuenchSchedule};

/// Steps between positivity checks.
const CHECK_EVERY: usize = 4096;

/// Largest `h * omega_eff` taken in a single RK4 step.
pub const MAX_PHASE_PER_STEP: f64 = 0.01;

/// Upper limit on the sub-steps a single step may be split into.
const MAX_SPLIT: usize = 1 << 16;

#[inline(always)]
fn accel<T: Real>(b: T, lambda: T, lambda0: T) -> T {
    lambda0 / (b * b * b) - lambda * b
}

/// One classical RK4 step of `b' = v, v' = lambda0 / b^3 - lambda b`.
#[inline(always)]
pub fn rk4_step<T: Real>(b: T, v: T, lambda: T, lambda0: T, h: T) -> (T, T) {
    let half = lit::<T>(0.5) * h;
    let sixth = h / lit::<T>(6.0);
    let two = lit::<T>(2.0);

    let k1b = v;
    let k1v = accel(b, lambda, lambda0);
    let k2b = v + half * k1v;
    let k2v = accel(b + half * k1b, lambda, lambda0);
    let k3b = v + half * k2v;
    let k3v = accel(b + half * k2b, lambda, lambda0);
    let k4b = v + h * k3v;
    let k4v = accel(b + h * k3b, lambda, lambda0);

    (
        b + sixth * (k1b + two * (k2b + k3b) + k4b),
        v + sixth * (k1v + two * (k2v + k3v) + k4v),
    )
}

/// Integrates mode `j` from `(1, 0)` at `t = 0` up to `t_end`.
pub fn integrate_emp_oracle<T: Real>(
    schedule: &QuenchSchedule<T>,
    j: usize,
    t_end: T,
    step: T,
) -> Result<AuxiliaryState<T>> {
    let mut out = integrate_emp_oracle_modes(schedule, &[j], &[t_end], step)?;
    Ok(out.remove(0).remove(0))
}

/// Integrates several modes in lockstep and records their states at each of
/// the non-decreasing `times`. Returns `states[time][mode]`.
///
/// Modes `j` and `N - j` share their eigenvalues exactly, so only one of each
/// pair is integrated.
pub fn integrate_emp_oracle_modes<T: Real>(
    schedule: &QuenchSchedule<T>,
    modes: &[usize],
    times: &[T],
    step: T,
) -> Result<Vec<Vec<AuxiliaryState<T>>>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("oracle step must be positive, got {step}")));
    }
    let n = schedule.n_modes();
    if let Some(&bad) = modes.iter().find(|&&j| j == 0 || j > n) {
        return Err(Error::InvalidArgument(format!("mode index {bad} outside 1..={n}")));
    }
    for w in times.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidArgument("oracle output times must be non-decreasing".into()));
        }
    }
    if let Some(&last) = times.last() {
        schedule.segment_at(last)?;
    }
    if let Some(&first) = times.first() {
        if first < T::zero() {
            return Err(Error::InvalidArgument("oracle output times must be non-negative".into()));
        }
    }

    // Distinct representatives of the requested modes.
    let mut reps: Vec<usize> = modes.iter().map(|&j| symmetric_index(j, n)).collect();
    reps.sort_unstable();
    reps.dedup();
    let slot_of = |j: usize| reps.binary_search(&symmetric_index(j, n)).unwrap();
    let as_mode = |r: usize| if r == 0 { n } else { r };

    let spec = schedule.spec();
    let lambda0: Vec<T> = reps
        .iter()
        .map(|&r| mode_lambda(spec.omega0(), spec.coupling0(), as_mode(r), n))
        .collect();
    let seg_lambdas: Vec<Vec<T>> = schedule
        .segments()
        .iter()
        .map(|s| reps.iter().map(|&r| mode_lambda(s.omega, s.coupling, as_mode(r), n)).collect())
        .collect();

    let mut b = vec![T::one(); reps.len()];
    let mut v = vec![T::zero(); reps.len()];
    let mut t = T::zero();
    let mut seg = 0usize;
    let mut out = Vec::with_capacity(times.len());

    for &target in times {
        while t < target {
            let seg_end = schedule.segment_end(seg);
            let piece_end = match seg_end {
                Some(e) if e < target => e,
                _ => target,
            };
            advance(&mut b, &mut v, &seg_lambdas[seg], &lambda0, piece_end - t, step, t, &reps, n)?;
            t = piece_end;
            if Some(t) == seg_end {
                seg += 1;
            }
        }
        // A requested time sitting exactly on a boundary belongs to the later segment.
        while schedule.segment_end(seg) == Some(t) && seg + 1 < schedule.n_segments() {
            seg += 1;
        }
        out.push(
            modes
                .iter()
                .map(|&j| {
                    let s = slot_of(j);
                    AuxiliaryState { b: b[s], b_dot: v[s] }
                })
                .collect(),
        );
    }
    Ok(out)
}

/// `h^2 omega_eff^2 > phase2`, written without a division.
#[inline(always)]
fn is_stiff<T: Real>(b: T, lambda: T, lambda0: T, h2: T, phase2: T) -> bool {
    let b2 = b * b;
    let b4 = b2 * b2;
    h2 * (lambda * b4 + lit::<T>(3.0) * lambda0) > phase2 * b4
}

/// One step of length `h`, split when `h^2 omega_eff^2 > phase2`.
#[inline(always)]
fn guarded_step<T: Real>(b: T, v: T, lambda: T, lambda0: T, h: T, phase2: T) -> (T, T) {
    let b2 = b * b;
    let w2 = lambda + lit::<T>(3.0) * lambda0 / (b2 * b2);
    let stiff = h * h * w2;
    if !(stiff > phase2) {
        return rk4_step(b, v, lambda, lambda0, h);
    }
    let split = ((stiff / phase2).sqrt().to_f64().unwrap_or(f64::INFINITY).ceil() as usize).clamp(2, MAX_SPLIT);
    let hs = h / T::from_usize(split).unwrap();
    let (mut b, mut v) = (b, v);
    for _ in 0..split {
        (b, v) = rk4_step(b, v, lambda, lambda0, hs);
        if !(b > T::zero()) {
            break;
        }
    }
    (b, v)
}

#[allow(clippy::too_many_arguments)]
fn advance<T: Real>(
    b: &mut [T],
    v: &mut [T],
    lambda: &[T],
    lambda0: &[T],
    length: T,
    step: T,
    t_start: T,
    reps: &[usize],
    n: usize,
) -> Result<()> {
    // Equal substeps no longer than `step` (up to rounding of the ratio).
    let ratio = (length / step).to_f64().unwrap_or(f64::INFINITY);
    let count = ((ratio * (1.0 - 1e-12)).ceil() as usize).max(1);
    let h = length / T::from_usize(count).unwrap();
    let phase2 = lit::<T>(MAX_PHASE_PER_STEP * MAX_PHASE_PER_STEP);
    let h2 = h * h;

    let mut done = 0usize;
    while done < count {
        let chunk = CHECK_EVERY.min(count - done);
        for _ in 0..chunk {
            let any_stiff = b
                .iter()
                .zip(lambda.iter().zip(lambda0))
                .fold(false, |acc, (&bm, (&l, &l0))| acc | is_stiff(bm, l, l0, h2, phase2));
            if any_stiff {
                for m in 0..b.len() {
                    (b[m], v[m]) = guarded_step(b[m], v[m], lambda[m], lambda0[m], h, phase2);
                }
            } else {
                for m in 0..b.len() {
                    (b[m], v[m]) = rk4_step(b[m], v[m], lambda[m], lambda0[m], h);
                }
            }
        }
        done += chunk;
        if let Some(m) = b.iter().position(|&x| !(x > T::zero() && x.is_finite())) {
            let t = t_start + h * T::from_usize(done).unwrap();
            let r = reps[m];
            return Err(Error::Instability {
                t: to_f64(t),
                mode: if r == 0 { n } else { r },
                b: to_f64(b[m]),
            });
        }
    }
    Ok(())
}
