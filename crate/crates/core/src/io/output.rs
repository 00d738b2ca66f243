//! CSV and JSON emission of sampled curves.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complexity::LambdaPolicy;
use crate::error::{Error, Result};
use crate::experiments::{CurveSample, Scenario, ScenarioOptions, TimeGrid};
use crate::spectrum::QuenchSegment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Header row for a curve: `t, c_total, c_zero, c_rest[, c_lower, c_upper][, a_1..a_N, b_1..b_N]`.
pub fn csv_header(first: &CurveSample<f64>) -> Vec<String> {
    let mut h: Vec<String> = ["t", "c_total", "c_zero", "c_rest"].iter().map(|s| s.to_string()).collect();
    if first.c_lower.is_some() {
        h.push("c_lower".into());
        h.push("c_upper".into());
    }
    if let Some(a) = &first.a {
        h.extend((1..=a.len()).map(|j| format!("a_{j}")));
        h.extend((1..=a.len()).map(|j| format!("b_{j}")));
    }
    h
}

pub fn write_csv<W: Write>(out: W, curve: &[CurveSample<f64>]) -> Result<()> {
    let first = curve
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot emit an empty curve".into()))?;
    let header = csv_header(first);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&header).map_err(csv_error)?;
    let mut row = Vec::with_capacity(header.len());
    for c in curve {
        row.clear();
        row.extend([c.t, c.c_total, c.c_zero, c.c_rest].map(format_value));
        if let (Some(lo), Some(up)) = (c.c_lower, c.c_upper) {
            row.push(format_value(lo));
            row.push(format_value(up));
        }
        if let (Some(a), Some(b)) = (&c.a, &c.b) {
            row.extend(a.iter().chain(b).map(|&x| format_value(x)));
        }
        if row.len() != header.len() {
            return Err(Error::InvalidArgument(format!("sample at t = {} has inconsistent columns", c.t)));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMetadata {
    pub n: usize,
    pub omega0: f64,
    pub k0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub name: String,
    pub software: String,
    pub version: String,
    pub policy: LambdaPolicy,
    pub chain: ChainMetadata,
    pub segments: Vec<QuenchSegment<f64>>,
    pub grid: TimeGrid<f64>,
    pub options: ScenarioOptions<f64>,
    /// Number of samples where some mode's successive arctan denominator
    /// was not positive.
    pub branch_flagged_samples: usize,
}

impl CurveMetadata {
    pub fn new(scenario: &Scenario<f64>, curve: &[CurveSample<f64>]) -> Self {
        let spec = scenario.schedule.spec();
        Self {
            name: scenario.name.clone(),
            software: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            policy: scenario.policy,
            chain: ChainMetadata {
                n: spec.n_oscillators(),
                omega0: spec.omega0(),
                k0: spec.coupling0(),
            },
            segments: scenario.schedule.segments().to_vec(),
            grid: scenario.grid,
            options: scenario.options,
            branch_flagged_samples: curve.iter().filter(|c| !c.branch_flagged.is_empty()).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub metadata: CurveMetadata,
    pub samples: Vec<CurveSample<f64>>,
}

pub fn write_json<W: Write>(mut out: W, scenario: &Scenario<f64>, curve: &[CurveSample<f64>]) -> Result<()> {
    if curve.is_empty() {
        return Err(Error::InvalidArgument("cannot emit an empty curve".into()));
    }
    let doc = CurveDocument {
        metadata: CurveMetadata::new(scenario, curve),
        samples: curve.to_vec(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn write_curve<W: Write>(out: W, scenario: &Scenario<f64>, curve: &[CurveSample<f64>], format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, curve),
        OutputFormat::Json => write_json(out, scenario, curve),
    }
}

/// Writes `curve` to `path`.
pub fn emit_curve(scenario: &Scenario<f64>, curve: &[CurveSample<f64>], format: OutputFormat, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_curve(BufWriter::new(file), scenario, curve, format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{figure_preset, sample_curve, FigureId};

    fn zero(t: f64) -> CurveSample<f64> {
        CurveSample {
            t,
            c_total: 0.0,
            c_zero: 0.0,
            c_rest: 0.0,
            c_lower: None,
            c_upper: None,
            a: None,
            b: None,
            branch_flagged: vec![],
        }
    }

    #[test]
    fn two_sample_zero_curve() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[zero(0.0), zero(1.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let z = "0.0000000000000000e0";
        let expect = format!("t,c_total,c_zero,c_rest\n{z},{z},{z},{z}\n1.0000000000000000e0,{z},{z},{z}\n");
        assert_eq!(text, expect);
        assert!(write_csv(Vec::new(), &[]).is_err());
    }

    #[test]
    fn values_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 123456.789e20, -0.0] {
            assert_eq!(format_value(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn bounds_and_per_mode_columns() {
        let mut sc = figure_preset(FigureId::Fig2, 1).unwrap();
        sc.grid = TimeGrid::new(0.0, 10.0, 3).unwrap();
        sc.options.per_mode = true;
        let curve = sample_curve(&sc).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        assert_eq!(header.len(), 6 + 200);
        assert_eq!(&header[..6], &["t", "c_total", "c_zero", "c_rest", "c_lower", "c_upper"]);
        assert_eq!(header[6], "a_1");
        assert_eq!(header[105], "a_100");
        assert_eq!(header[106], "b_1");
        assert_eq!(text.lines().count(), 4);
        for line in text.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert!(v[4] <= v[1]);
        }
    }

    #[test]
    fn json_document() {
        let mut sc = figure_preset(FigureId::Fig9, 1).unwrap();
        sc.grid = TimeGrid::new(1.0, 5.0, 5).unwrap();
        let curve = sample_curve(&sc).unwrap();
        let mut buf = Vec::new();
        write_json(&mut buf, &sc, &curve).unwrap();
        let doc: CurveDocument = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc.samples, curve);
        assert_eq!(doc.metadata.grid, sc.grid);
        assert_eq!(doc.metadata.options.successive_t0, Some(1.0));
        assert_eq!(doc.metadata.chain.n, 100);
        assert_eq!(doc.metadata.version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn files_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let sc = figure_preset(FigureId::Fig5, 1).unwrap();
        let mut bytes = Vec::new();
        for (k, fmt) in [OutputFormat::Csv, OutputFormat::Csv, OutputFormat::Json, OutputFormat::Json].iter().enumerate() {
            let p = dir.path().join(format!("{k}.{fmt}"));
            emit_curve(&sc, &sample_curve(&sc).unwrap(), *fmt, &p).unwrap();
            bytes.push(std::fs::read(&p).unwrap());
        }
        assert_eq!(bytes[0], bytes[1]);
        assert_eq!(bytes[2], bytes[3]);
        let bad = dir.path().join("missing").join("x.csv");
        assert!(matches!(emit_curve(&sc, &sample_curve(&sc).unwrap(), OutputFormat::Csv, &bad), Err(Error::Io(_))));
    }
}
