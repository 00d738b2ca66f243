//! Scenarios, curve sampling and curve analysis.

mod analysis;
mod presets;

use serde::{Deserialize, Serialize};

use crate::complexity::{ChainSolution, ComplexityBreakdown, LambdaPolicy};
use crate::emp::integrate_emp_oracle_modes;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::spectrum::QuenchSchedule;

pub use analysis::{
    boundary_derivative_jump, detect_crossover, extract_revival_period, least_squares_slope, numeric_derivative,
    shift_time, verify_bounds_sweep, BoundsReport, CurveComponent, DerivativeJump,
};
pub use presets::{figure_preset, figure_variants, FigureId};

/// Uniform sampling grid, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid<T> {
    pub start: T,
    pub end: T,
    pub samples: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(start: T, end: T, samples: usize) -> Result<Self> {
        let g = Self { start, end, samples };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 samples, got {}", self.samples)));
        }
        if !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid start {} must be below end {}",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> T {
        (self.end - self.start) / T::from_usize(self.samples - 1).unwrap()
    }

    /// `k`-th grid point, computed as a weighted mean of the end points so
    /// that points which should coincide with round boundaries do.
    pub fn point(&self, k: usize) -> T {
        let m = self.samples - 1;
        let n = T::from_usize(m).unwrap();
        let kk = T::from_usize(k).unwrap();
        let rest = T::from_usize(m - k).unwrap();
        (self.start * rest + self.end * kk) / n
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.samples).map(|k| self.point(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioOptions<T> {
    /// Emit `A_j`, `B_j` for every mode.
    pub per_mode: bool,
    /// Emit `C_0` and `C_u`; only honoured for a single quench.
    pub bounds: bool,
    /// Measure against the state at this time instead of `t = 0`.
    pub successive_t0: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub schedule: QuenchSchedule<T>,
    pub grid: TimeGrid<T>,
    pub policy: LambdaPolicy,
    pub options: ScenarioOptions<T>,
}

impl<T: Real> Scenario<T> {
    pub fn new(name: impl Into<String>, schedule: QuenchSchedule<T>, grid: TimeGrid<T>) -> Result<Self> {
        grid.validate()?;
        Ok(Self {
            name: name.into(),
            schedule,
            grid,
            policy: LambdaPolicy::default(),
            options: ScenarioOptions::default(),
        })
    }

    pub fn with_policy(mut self, policy: LambdaPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_options(mut self, options: ScenarioOptions<T>) -> Self {
        self.options = options;
        self
    }

    pub fn emits_bounds(&self) -> bool {
        self.options.bounds && self.schedule.is_single_quench() && self.options.successive_t0.is_none()
    }

    fn check(&self) -> Result<()> {
        self.grid.validate()?;
        if let Some(t0) = self.options.successive_t0 {
            if self.grid.start < t0 {
                return Err(Error::Window(format!(
                    "grid starts at {} before the reference time {t0}",
                    self.grid.start
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample<T> {
    pub t: T,
    pub c_total: T,
    pub c_zero: T,
    pub c_rest: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_lower: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_upper: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<T>>,
    /// Modes whose successive-complexity arctan denominator is not positive.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub branch_flagged: Vec<usize>,
}

impl<T: Real> CurveSample<T> {
    fn from_breakdown(t: T, c: ComplexityBreakdown<T>, per_mode: bool) -> Self {
        let (a, b) = if per_mode { (Some(c.a), Some(c.b)) } else { (None, None) };
        Self {
            t,
            c_total: c.total,
            c_zero: c.zero_mode,
            c_rest: c.rest,
            c_lower: None,
            c_upper: None,
            a,
            b,
            branch_flagged: Vec::new(),
        }
    }
}

/// Evaluates the scenario on its grid with the analytic solutions.
pub fn sample_curve<T: Real>(scenario: &Scenario<T>) -> Result<Vec<CurveSample<T>>> {
    scenario.check()?;
    let sol = ChainSolution::new(&scenario.schedule)?;
    let per_mode = scenario.options.per_mode;
    let offset = if scenario.emits_bounds() {
        Some(sol.upper_bound_offset()?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(scenario.grid.samples);
    for t in scenario.grid.points() {
        let sample = match scenario.options.successive_t0 {
            Some(t0) => {
                let s = sol.successive(t0, t, scenario.policy)?;
                let mut c = CurveSample::from_breakdown(t, s.breakdown, per_mode);
                c.branch_flagged = s.branch_flagged;
                c
            }
            None => {
                let mut c = CurveSample::from_breakdown(t, sol.complexity_at(t, scenario.policy)?, per_mode);
                if let Some(off) = offset {
                    c.c_lower = Some(c.c_zero);
                    c.c_upper = Some((c.c_zero * c.c_zero + off).sqrt());
                }
                c
            }
        };
        out.push(sample);
    }
    Ok(out)
}

/// Same curve with mode states from fixed-step RK4 instead of the analytic
/// solutions. Bounds are never emitted.
pub fn sample_curve_oracle<T: Real>(scenario: &Scenario<T>, step: T) -> Result<Vec<CurveSample<T>>> {
    scenario.check()?;
    let sol = ChainSolution::new(&scenario.schedule)?;
    let n = scenario.schedule.n_modes();
    let modes: Vec<usize> = (1..=n).collect();
    let grid = scenario.grid.points();
    let per_mode = scenario.options.per_mode;
    let mut times = Vec::with_capacity(grid.len() + 1);
    if let Some(t0) = scenario.options.successive_t0 {
        times.push(t0);
    }
    times.extend_from_slice(&grid);
    let states = integrate_emp_oracle_modes(&scenario.schedule, &modes, &times, step)?;

    let mut out = Vec::with_capacity(grid.len());
    match scenario.options.successive_t0 {
        Some(t0) => {
            let r_index = scenario.schedule.segment_at(t0)?.index;
            for (k, &t) in grid.iter().enumerate() {
                let loc = scenario.schedule.segment_at(t)?;
                if loc.index > r_index + 1 {
                    return Err(Error::Window(format!(
                        "time {} lies beyond the segment after the reference segment",
                        to_f64(t)
                    )));
                }
                let s = sol.successive_from_states(r_index, &states[0], loc.index, &states[k + 1], scenario.policy);
                let mut c = CurveSample::from_breakdown(t, s.breakdown, per_mode);
                c.branch_flagged = s.branch_flagged;
                out.push(c);
            }
        }
        None => {
            for (k, &t) in grid.iter().enumerate() {
                let loc = scenario.schedule.segment_at(t)?;
                let c = sol.breakdown(loc.index, &states[k], scenario.policy);
                out.push(CurveSample::from_breakdown(t, c, per_mode));
            }
        }
    }
    Ok(out)
}

/// Largest absolute difference of `c_total` between two curves on the same grid.
pub fn max_abs_difference<T: Real>(a: &[CurveSample<T>], b: &[CurveSample<T>]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!("curves have {} and {} samples", a.len(), b.len())));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x.c_total - y.c_total).abs())
        .fold(T::zero(), T::max))
}
