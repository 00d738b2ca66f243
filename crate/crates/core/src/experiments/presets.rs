//! Parameter sets of the eleven figure scenarios.
//!
//! Time ranges are not part of the published parameter sets; each preset
//! covers the visible extent of its figure with 2001 uniform samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Scenario, ScenarioOptions, TimeGrid};
use crate::error::{Error, Result};
use crate::spectrum::{ChainSpec, QuenchSchedule};

const SAMPLES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

impl FigureId {
    pub const ALL: [FigureId; 11] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
        FigureId::Fig10,
        FigureId::Fig11,
    ];

    pub fn number(&self) -> usize {
        *self as usize + 1
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fig{}", self.number())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix("fig")
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| FigureId::ALL.get(i).copied())
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Number of curves (variants) drawn in a figure.
pub fn figure_variants(id: FigureId) -> usize {
    match id {
        FigureId::Fig1 => 3,
        FigureId::Fig2 | FigureId::Fig3 | FigureId::Fig4 => 4,
        FigureId::Fig5 | FigureId::Fig6 => 1,
        FigureId::Fig7 | FigureId::Fig8 | FigureId::Fig9 | FigureId::Fig10 | FigureId::Fig11 => 2,
    }
}

fn pick<const K: usize>(id: FigureId, variant: usize, values: [f64; K]) -> Result<f64> {
    if variant == 0 || variant > K {
        return Err(Error::InvalidArgument(format!("{id} has variants 1..={K}, got {variant}")));
    }
    Ok(values[variant - 1])
}

/// Scenario for curve `variant` (1-based) of figure `id`.
pub fn figure_preset(id: FigureId, variant: usize) -> Result<Scenario<f64>> {
    let name = format!("{id}-v{variant}");
    let bounds = ScenarioOptions {
        bounds: true,
        ..Default::default()
    };
    let grid = |start: f64, end: f64| TimeGrid::new(start, end, SAMPLES);

    let scenario = match id {
        FigureId::Fig1 => {
            let wf = pick(id, variant, [0.3, 0.1, 0.01])?;
            let spec = ChainSpec::new(4, 3.0, 2.0)?;
            Scenario::new(name, QuenchSchedule::single_quench(spec, wf, 2.5)?, grid(0.0, 1000.0)?)?
        }
        FigureId::Fig2 => {
            let wf = pick(id, variant, [0.009, 0.004, 0.002, 0.001])?;
            let spec = ChainSpec::new(100, 0.3, 10.0)?;
            Scenario::new(name, QuenchSchedule::single_quench(spec, wf, 10.0)?, grid(0.0, 2000.0)?)?.with_options(bounds)
        }
        FigureId::Fig3 | FigureId::Fig4 => {
            let wi = pick(id, variant, [0.05, 0.07, 0.1, 0.2])?;
            let spec = ChainSpec::new(100, wi, 1.0)?;
            let sc = Scenario::new(name, QuenchSchedule::single_quench(spec, 0.0, 1.0)?, grid(0.0, 500.0)?)?;
            if id == FigureId::Fig3 {
                sc.with_options(bounds)
            } else {
                sc
            }
        }
        FigureId::Fig5 | FigureId::Fig6 => {
            pick(id, variant, [0.0])?;
            let last = if id == FigureId::Fig5 { 5.0 } else { 15.0 };
            let spec = ChainSpec::new(100, 3.0, 4.0)?;
            let params = [(5.0, 4.0), (3.0, 4.0), (5.0, 4.0), (3.0, 4.0), (last, 4.0)];
            Scenario::new(name, QuenchSchedule::periodic(spec, &params, 4.0, true)?, grid(0.0, 20.0)?)?
        }
        FigureId::Fig7 | FigureId::Fig8 => {
            let quenches = pick(id, variant, [3.0, 5.0])? as usize;
            let spec = ChainSpec::new(100, 0.3, 4.0)?;
            let mut params: Vec<(f64, f64)> = [(0.085, 4.0), (0.3, 4.0)].repeat((quenches - 1) / 2);
            params.push((0.0, 4.0));
            // twice the critical boundary, which then sits on a grid point
            let end = 110.0 * (quenches as f64 - 1.0);
            Scenario::new(name, QuenchSchedule::periodic(spec, &params, 55.0, true)?, grid(0.0, end)?)?
        }
        FigureId::Fig9 | FigureId::Fig10 => {
            let wi = pick(id, variant, [0.3, 3.0])?;
            let t0 = if id == FigureId::Fig9 { 1.0 } else { 5.0 };
            successive(name, wi, t0, grid(t0, t0 + 6.999)?)?
        }
        FigureId::Fig11 => {
            let t0 = pick(id, variant, [1.0, 9.0])?;
            successive(name, 0.3, t0, grid(t0, t0 + 6.999)?)?
        }
    };
    Ok(scenario)
}

/// Five alternating quenches `5, wi, 5, wi, 5` with `T = 4`, measured from `t0`.
fn successive(name: String, wi: f64, t0: f64, grid: TimeGrid<f64>) -> Result<Scenario<f64>> {
    let spec = ChainSpec::new(100, wi, 4.0)?;
    let params = [(5.0, 4.0), (wi, 4.0), (5.0, 4.0), (wi, 4.0), (5.0, 4.0)];
    let schedule = QuenchSchedule::periodic(spec, &params, 4.0, true)?;
    Ok(Scenario::new(name, schedule, grid)?.with_options(ScenarioOptions {
        successive_t0: Some(t0),
        ..Default::default()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ids() {
        for id in FigureId::ALL {
            assert_eq!(id.to_string().parse::<FigureId>().unwrap(), id);
        }
        assert!(matches!("fig12".parse::<FigureId>(), Err(Error::UnknownPreset(_))));
        assert!("fig0".parse::<FigureId>().is_err());
        assert!("5".parse::<FigureId>().is_err());
    }

    #[test]
    fn caption_parameters() {
        let f5 = figure_preset(FigureId::Fig5, 1).unwrap();
        let s = &f5.schedule;
        assert_eq!((s.n_modes(), s.spec().omega0(), s.spec().coupling0()), (100, 3.0, 4.0));
        assert_eq!(s.n_segments(), 5);
        assert_eq!((s.segments()[0].omega, s.segments()[0].coupling), (5.0, 4.0));
        assert_eq!(s.segments()[1].omega, 3.0);
        assert_eq!(s.boundary_times(), &[0.0, 4.0, 8.0, 12.0, 16.0][..s.boundary_times().len()]);

        let f1 = figure_preset(FigureId::Fig1, 3).unwrap();
        let s = &f1.schedule;
        assert_eq!((s.n_modes(), s.spec().omega0(), s.spec().coupling0()), (4, 3.0, 2.0));
        assert_eq!((s.segments()[0].omega, s.segments()[0].coupling), (0.01, 2.5));

        let f3 = figure_preset(FigureId::Fig3, 1).unwrap();
        let s = &f3.schedule;
        assert_eq!((s.n_modes(), s.spec().omega0(), s.spec().coupling0()), (100, 0.05, 1.0));
        assert_eq!((s.segments()[0].omega, s.segments()[0].coupling), (0.0, 1.0));

        let f6 = figure_preset(FigureId::Fig6, 1).unwrap();
        assert_eq!(f6.schedule.segments()[4].omega, 15.0);
    }

    #[test]
    fn critical_protocols() {
        for (v, n) in [(1, 3), (2, 5)] {
            let sc = figure_preset(FigureId::Fig7, v).unwrap();
            let segs = sc.schedule.segments();
            assert_eq!(segs.len(), n);
            assert_eq!(segs[n - 1].omega, 0.0);
            assert!(segs[n - 1].is_open());
            assert_eq!(segs[0].omega, 0.085);
            let critical = sc.schedule.segment_start(n - 1);
            assert_eq!(critical, 55.0 * (n as f64 - 1.0));
            assert_eq!(sc.grid.point(1000), critical);
        }
    }

    #[test]
    fn every_variant_builds() {
        for id in FigureId::ALL {
            for v in 1..=figure_variants(id) {
                let sc = figure_preset(id, v).unwrap();
                assert_eq!(sc.grid.samples, 2001);
                assert_eq!(sc.name, format!("{id}-v{v}"));
            }
            assert!(figure_preset(id, 0).is_err());
            assert!(figure_preset(id, figure_variants(id) + 1).is_err());
        }
    }

    #[test]
    fn successive_windows_stay_within_two_segments() {
        for (id, v) in [(FigureId::Fig9, 1), (FigureId::Fig10, 2), (FigureId::Fig11, 2)] {
            let sc = figure_preset(id, v).unwrap();
            let t0 = sc.options.successive_t0.unwrap();
            let r = sc.schedule.segment_at(t0).unwrap().index;
            let e = sc.schedule.segment_at(sc.grid.end).unwrap().index;
            assert_eq!(e, r + 1);
        }
    }
}
