//! Derivatives, revival periods, crossings and bound sweeps of sampled curves.

use serde::{Deserialize, Serialize};

use super::{sample_curve, CurveSample, Scenario};
use crate::complexity::{ChainSolution, ComplexityBreakdown, LambdaPolicy};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

fn check_uniform<T: Real>(t: &[T]) -> Result<T> {
    let h = t[1] - t[0];
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    let tol = lit::<T>(1e-9) * (t[t.len() - 1] - t[0]);
    for w in t.windows(2) {
        if ((w[1] - w[0]) - h).abs() > tol {
            return Err(Error::InvalidArgument("grid is not uniform".into()));
        }
    }
    Ok(h)
}

/// `dy/dt` by central differences, one-sided at the two ends.
pub fn numeric_derivative<T: Real>(t: &[T], y: &[T]) -> Result<Vec<T>> {
    if t.len() != y.len() {
        return Err(Error::InvalidArgument(format!("{} times but {} values", t.len(), y.len())));
    }
    if t.len() < 3 {
        return Err(Error::InvalidArgument(format!("derivative needs at least 3 samples, got {}", t.len())));
    }
    let h = check_uniform(t)?;
    let n = t.len();
    let two_h = h + h;
    let mut d = Vec::with_capacity(n);
    d.push((y[1] - y[0]) / h);
    for i in 1..n - 1 {
        d.push((y[i + 1] - y[i - 1]) / two_h);
    }
    d.push((y[n - 1] - y[n - 2]) / h);
    Ok(d)
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument("slope needs two equally long series of length >= 2".into()));
    }
    let n = T::from_usize(x.len()).unwrap();
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if !(sxx > T::zero()) {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    Ok(sxy / sxx)
}

/// Dominant revival period from the spacing of deep local minima.
///
/// Uses the zero-mode column when `zero_mode` is set, the total otherwise.
/// Minima in the lowest fifth of the curve's range count as deep; nearby
/// ones (within five grid steps) are merged and the median spacing is
/// returned, so an occasional missed revival does not bias the estimate.
pub fn extract_revival_period<T: Real>(curve: &[CurveSample<T>], zero_mode: bool) -> Result<T> {
    if curve.len() < 3 {
        return Err(Error::InvalidArgument("revival extraction needs at least 3 samples".into()));
    }
    let t: Vec<T> = curve.iter().map(|c| c.t).collect();
    let y: Vec<T> = curve.iter().map(|c| if zero_mode { c.c_zero } else { c.c_total }).collect();
    let h = check_uniform(&t)?;
    let lo = y.iter().copied().fold(T::infinity(), T::min);
    let hi = y.iter().copied().fold(T::neg_infinity(), T::max);
    let threshold = lo + lit::<T>(0.2) * (hi - lo);

    let mut clusters: Vec<(usize, usize)> = Vec::new(); // (last index, lowest index)
    for i in 1..y.len() - 1 {
        if !(y[i] <= y[i - 1] && y[i] < y[i + 1] && y[i] <= threshold) {
            continue;
        }
        match clusters.last_mut() {
            Some((last, best)) if i - *last <= 5 => {
                *last = i;
                if y[i] < y[*best] {
                    *best = i;
                }
            }
            _ => clusters.push((i, i)),
        }
    }
    if clusters.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "found {} revival minima, need at least 2",
            clusters.len()
        )));
    }
    let mut gaps: Vec<T> = clusters.windows(2).map(|w| t[w[1].1] - t[w[0].1]).collect();
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = gaps.len();
    let median = if m % 2 == 1 {
        gaps[m / 2]
    } else {
        (gaps[m / 2 - 1] + gaps[m / 2]) * lit::<T>(0.5)
    };
    debug_assert!(median > h);
    Ok(median)
}

/// Copy of `curve` with every time shifted by `-dt`.
pub fn shift_time<T: Real>(curve: &[CurveSample<T>], dt: T) -> Vec<CurveSample<T>> {
    curve
        .iter()
        .map(|c| CurveSample { t: c.t - dt, ..c.clone() })
        .collect()
}

/// Times inside `window` where `a.c_total - b.c_total` changes sign,
/// located by linear interpolation.
pub fn detect_crossover<T: Real>(a: &[CurveSample<T>], b: &[CurveSample<T>], window: (T, T)) -> Result<Vec<T>> {
    // shifted grids land on the window ends only up to rounding
    let slack = |x: T| lit::<T>(1e-9) * (T::one() + x.abs());
    let inside = |c: &&CurveSample<T>| c.t >= window.0 - slack(window.0) && c.t <= window.1 + slack(window.1);
    let ia: Vec<&CurveSample<T>> = a.iter().filter(inside).collect();
    let ib: Vec<&CurveSample<T>> = b.iter().filter(inside).collect();
    if ia.len() != ib.len() {
        return Err(Error::InvalidArgument(format!(
            "curves have {} and {} samples in the window",
            ia.len(),
            ib.len()
        )));
    }
    for (x, y) in ia.iter().zip(&ib) {
        if (x.t - y.t).abs() > lit::<T>(1e-9) * (T::one() + x.t.abs()) {
            return Err(Error::InvalidArgument(format!("grids differ: {} vs {}", x.t, y.t)));
        }
    }
    let d: Vec<T> = ia.iter().zip(&ib).map(|(x, y)| x.c_total - y.c_total).collect();
    let mut out = Vec::new();
    let mut last_sign: Option<bool> = None;
    for i in 0..d.len() {
        if d[i] == T::zero() {
            continue;
        }
        let pos = d[i] > T::zero();
        if let Some(prev) = last_sign {
            if prev != pos {
                if d[i - 1] == T::zero() {
                    // touched zero exactly at a sample; report the last zero sample
                    out.push(ia[i - 1].t);
                } else {
                    let (t0, t1) = (ia[i - 1].t, ia[i].t);
                    let frac = d[i - 1] / (d[i - 1] - d[i]);
                    out.push(t0 + frac * (t1 - t0));
                }
            }
        }
        last_sign = Some(pos);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport<T> {
    pub samples: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// `min_t (C - C_0)`; negative when the lower bound is violated.
    pub min_lower_margin: T,
    /// `min_t (C_u - C)`; negative when the upper bound is violated.
    pub min_upper_margin: T,
}

impl<T> BoundsReport<T> {
    pub fn violations(&self) -> usize {
        self.lower_violations + self.upper_violations
    }
}

/// Checks `C_0 <= C <= C_u` at every grid point of a single-quench scenario.
/// Differences within `1e-12 (1 + C)` count as equality.
pub fn verify_bounds_sweep<T: Real>(scenario: &Scenario<T>) -> Result<BoundsReport<T>> {
    if !scenario.schedule.is_single_quench() {
        return Err(Error::Unsupported("bounds sweep needs a single quench".into()));
    }
    let mut sc = scenario.clone();
    sc.options.bounds = true;
    sc.options.successive_t0 = None;
    let curve = sample_curve(&sc)?;
    let mut r = BoundsReport {
        samples: curve.len(),
        lower_violations: 0,
        upper_violations: 0,
        min_lower_margin: T::infinity(),
        min_upper_margin: T::infinity(),
    };
    for c in &curve {
        let tol = lit::<T>(1e-12) * (T::one() + c.c_total);
        let lm = c.c_total - c.c_lower.unwrap();
        let um = c.c_upper.unwrap() - c.c_total;
        r.min_lower_margin = r.min_lower_margin.min(lm);
        r.min_upper_margin = r.min_upper_margin.min(um);
        if lm < -tol {
            r.lower_violations += 1;
        }
        if um < -tol {
            r.upper_violations += 1;
        }
    }
    Ok(r)
}

/// Which part of the breakdown a derivative is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveComponent {
    Total,
    ZeroMode,
}

impl CurveComponent {
    fn of<T: Copy>(&self, c: &ComplexityBreakdown<T>) -> T {
        match self {
            CurveComponent::Total => c.total,
            CurveComponent::ZeroMode => c.zero_mode,
        }
    }
}

/// One-sided values and derivatives of a complexity component around `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeJump<T> {
    pub t: T,
    pub value_left: T,
    pub value_right: T,
    pub slope_left: T,
    pub slope_right: T,
}

impl<T: Real> DerivativeJump<T> {
    pub fn value_jump(&self) -> T {
        (self.value_right - self.value_left).abs()
    }

    pub fn slope_jump(&self) -> T {
        (self.slope_right - self.slope_left).abs()
    }
}

/// Left and right limits at `t` using second-order one-sided stencils of
/// width `h`. At a segment boundary the left side is evaluated on the
/// earlier segment, so jumps caused by the quench are resolved exactly.
pub fn boundary_derivative_jump<T: Real>(
    solution: &ChainSolution<T>,
    t: T,
    policy: LambdaPolicy,
    component: CurveComponent,
    h: T,
) -> Result<DerivativeJump<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("stencil width must be positive".into()));
    }
    let schedule = solution.schedule();
    let loc = schedule.segment_at(t)?;
    let (left_index, left_tau) = if loc.tau == T::zero() && loc.index > 0 {
        let i = loc.index - 1;
        (i, schedule.segments()[i].duration.expect("internal segment is finite"))
    } else {
        (loc.index, loc.tau)
    };
    let two = lit::<T>(2.0);
    if left_tau < two * h {
        return Err(Error::InvalidArgument(format!("left stencil at {t} leaves the segment")));
    }
    let f = |idx: usize, tau: T| -> Result<T> { Ok(component.of(&solution.complexity_in(idx, tau, policy)?)) };
    let l0 = f(left_index, left_tau)?;
    let l1 = f(left_index, left_tau - h)?;
    let l2 = f(left_index, left_tau - two * h)?;
    let r0 = f(loc.index, loc.tau)?;
    let r1 = f(loc.index, loc.tau + h)?;
    let r2 = f(loc.index, loc.tau + two * h)?;
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    Ok(DerivativeJump {
        t,
        value_left: l0,
        value_right: r0,
        slope_left: (three * l0 - four * l1 + l2) / (two * h),
        slope_right: (-three * r0 + four * r1 - r2) / (two * h),
    })
}
