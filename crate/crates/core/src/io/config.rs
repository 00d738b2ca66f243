//! TOML run configuration.
//!
//! ```toml
//! name = "fig1-v1"          # optional
//! policy = "fixed-initial"  # optional
//!
//! [chain]
//! n = 4
//! omega0 = 3.0
//! k0 = 2.0
//!
//! [[segments]]              # in order; only the last may omit duration
//! omega = 0.3
//! k = 2.5
//!
//! [grid]
//! start = 0.0
//! end = 1000.0
//! samples = 2001
//!
//! [outputs]                 # optional
//! bounds = false
//! per_mode = false
//! successive_t0 = 1.0
//!
//! [output]                  # optional
//! path = "curve.csv"
//! format = "csv"
//! ```

use std::path::PathBuf;

use toml::{Table, Value};

use crate::complexity::LambdaPolicy;
use crate::error::{Error, Result};
use crate::experiments::{Scenario, ScenarioOptions, TimeGrid};
use crate::spectrum::{ChainSpec, QuenchSchedule, QuenchSegment};

use super::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n: usize,
    pub omega0: f64,
    pub k0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentConfig {
    pub omega: f64,
    pub k: f64,
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputsConfig {
    pub bounds: bool,
    pub per_mode: bool,
    pub successive_t0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputTarget {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: Option<String>,
    pub chain: ChainConfig,
    pub segments: Vec<SegmentConfig>,
    pub grid: GridConfig,
    pub policy: LambdaPolicy,
    pub outputs: OutputsConfig,
    pub output: OutputTarget,
}

const DEFAULT_NAME: &str = "run";

// Typed accessors that report the full key path on failure.

struct Fields<'a> {
    path: String,
    table: &'a Table,
}

impl<'a> Fields<'a> {
    fn new(path: impl Into<String>, table: &'a Table, known: &[&str]) -> Result<Self> {
        let path = path.into();
        let f = Self { path, table };
        for key in table.keys() {
            if !known.contains(&key.as_str()) {
                return Err(Error::config(f.key(key), "unknown key"));
            }
        }
        Ok(f)
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn get(&self, k: &str) -> Option<&'a Value> {
        self.table.get(k)
    }

    fn require(&self, k: &str) -> Result<&'a Value> {
        self.get(k).ok_or_else(|| Error::config(self.key(k), "missing"))
    }

    fn float(&self, k: &str) -> Result<Option<f64>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Error::config(self.key(k), format!("expected a number, found {}", v.type_str()))),
        }
    }

    fn req_float(&self, k: &str) -> Result<f64> {
        self.require(k)?;
        Ok(self.float(k)?.unwrap())
    }

    fn count(&self, k: &str) -> Result<usize> {
        match self.require(k)? {
            Value::Integer(i) if *i > 0 => Ok(*i as usize),
            Value::Integer(i) => Err(Error::config(self.key(k), format!("must be a positive integer, got {i}"))),
            v => Err(Error::config(self.key(k), format!("expected an integer, found {}", v.type_str()))),
        }
    }

    fn boolean(&self, k: &str) -> Result<bool> {
        match self.get(k) {
            None => Ok(false),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(v) => Err(Error::config(self.key(k), format!("expected a boolean, found {}", v.type_str()))),
        }
    }

    fn string(&self, k: &str) -> Result<Option<&'a str>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(Error::config(self.key(k), format!("expected a string, found {}", v.type_str()))),
        }
    }

    fn table(&self, k: &str, known: &[&str]) -> Result<Option<Fields<'a>>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(Fields::new(self.key(k), t, known)?)),
            Some(v) => Err(Error::config(self.key(k), format!("expected a table, found {}", v.type_str()))),
        }
    }
}

fn non_negative(key: String, x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(Error::config(key, format!("must be finite and non-negative, got {x}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| Error::ConfigSyntax(e.to_string()))?;
        let top = Fields::new("", &root, &["name", "policy", "chain", "segments", "grid", "outputs", "output"])?;

        let name = top.string("name")?.map(str::to_string);
        let policy = match top.string("policy")? {
            None => LambdaPolicy::default(),
            Some(s) => s.parse().map_err(|_| {
                Error::config("policy", format!("unknown policy `{s}` (fixed-initial or literal-segment)"))
            })?,
        };

        let chain = top
            .table("chain", &["n", "omega0", "k0"])?
            .ok_or_else(|| Error::config("chain", "missing"))?;
        let chain = ChainConfig {
            n: chain.count("n")?,
            omega0: non_negative(chain.key("omega0"), chain.req_float("omega0")?)?,
            k0: non_negative(chain.key("k0"), chain.req_float("k0")?)?,
        };

        let segments = match top.require("segments")? {
            Value::Array(items) if !items.is_empty() => items,
            Value::Array(_) => return Err(Error::config("segments", "at least one segment is required")),
            v => return Err(Error::config("segments", format!("expected an array of tables, found {}", v.type_str()))),
        };
        let mut segs = Vec::with_capacity(segments.len());
        for (i, item) in segments.iter().enumerate() {
            let path = format!("segments[{i}]");
            let t = match item {
                Value::Table(t) => Fields::new(path, t, &["omega", "k", "duration"])?,
                v => return Err(Error::config(path, format!("expected a table, found {}", v.type_str()))),
            };
            let duration = match t.float("duration")? {
                Some(d) if !(d.is_finite() && d > 0.0) => {
                    return Err(Error::config(t.key("duration"), format!("must be positive, got {d}")))
                }
                d => d,
            };
            if duration.is_none() && i + 1 != segments.len() {
                return Err(Error::config(t.key("duration"), "missing (only the last segment may be open-ended)"));
            }
            segs.push(SegmentConfig {
                omega: non_negative(t.key("omega"), t.req_float("omega")?)?,
                k: non_negative(t.key("k"), t.req_float("k")?)?,
                duration,
            });
        }

        let grid = top
            .table("grid", &["start", "end", "samples"])?
            .ok_or_else(|| Error::config("grid", "missing"))?;
        let grid = GridConfig {
            start: non_negative(grid.key("start"), grid.req_float("start")?)?,
            end: grid.req_float("end")?,
            samples: grid.count("samples")?,
        };

        let outputs = match top.table("outputs", &["bounds", "per_mode", "successive_t0"])? {
            None => OutputsConfig::default(),
            Some(o) => OutputsConfig {
                bounds: o.boolean("bounds")?,
                per_mode: o.boolean("per_mode")?,
                successive_t0: match o.float("successive_t0")? {
                    Some(t0) => Some(non_negative(o.key("successive_t0"), t0)?),
                    None => None,
                },
            },
        };

        let output = match top.table("output", &["path", "format"])? {
            None => OutputTarget::default(),
            Some(o) => OutputTarget {
                path: o.string("path")?.map(PathBuf::from),
                format: match o.string("format")? {
                    None => None,
                    Some(s) => Some(s.parse().map_err(|_| Error::config(o.key("format"), format!("unknown format `{s}`")))?),
                },
            },
        };

        let cfg = RunConfig {
            name,
            chain,
            segments: segs,
            grid,
            policy,
            outputs,
            output,
        };
        // Surface physical inconsistencies (e.g. omega0 = 0) at parse time.
        cfg.to_scenario()?;
        Ok(cfg)
    }

    /// Validated scenario described by this config.
    pub fn to_scenario(&self) -> Result<Scenario<f64>> {
        let spec = ChainSpec::new(self.chain.n, self.chain.omega0, self.chain.k0)?;
        let segments = self
            .segments
            .iter()
            .map(|s| QuenchSegment {
                omega: s.omega,
                coupling: s.k,
                duration: s.duration,
            })
            .collect();
        let schedule = QuenchSchedule::new(spec, segments)?;
        let grid = TimeGrid::new(self.grid.start, self.grid.end, self.grid.samples)
            .map_err(|e| Error::config("grid", e.to_string()))?;
        Ok(Scenario::new(self.name.clone().unwrap_or_else(|| DEFAULT_NAME.to_string()), schedule, grid)?
            .with_policy(self.policy)
            .with_options(ScenarioOptions {
                per_mode: self.outputs.per_mode,
                bounds: self.outputs.bounds,
                successive_t0: self.outputs.successive_t0,
            }))
    }

    pub fn from_scenario(sc: &Scenario<f64>) -> Self {
        let spec = sc.schedule.spec();
        RunConfig {
            name: Some(sc.name.clone()),
            chain: ChainConfig {
                n: spec.n_oscillators(),
                omega0: spec.omega0(),
                k0: spec.coupling0(),
            },
            segments: sc
                .schedule
                .segments()
                .iter()
                .map(|s| SegmentConfig {
                    omega: s.omega,
                    k: s.coupling,
                    duration: s.duration,
                })
                .collect(),
            grid: GridConfig {
                start: sc.grid.start,
                end: sc.grid.end,
                samples: sc.grid.samples,
            },
            policy: sc.policy,
            outputs: OutputsConfig {
                bounds: sc.options.bounds,
                per_mode: sc.options.per_mode,
                successive_t0: sc.options.successive_t0,
            },
            output: OutputTarget::default(),
        }
    }

    /// TOML text that parses back to `self`.
    pub fn emit(&self) -> String {
        let mut root = Table::new();
        if let Some(n) = &self.name {
            root.insert("name".into(), Value::String(n.clone()));
        }
        root.insert("policy".into(), Value::String(self.policy.as_str().into()));

        let mut chain = Table::new();
        chain.insert("n".into(), Value::Integer(self.chain.n as i64));
        chain.insert("omega0".into(), Value::Float(self.chain.omega0));
        chain.insert("k0".into(), Value::Float(self.chain.k0));
        root.insert("chain".into(), Value::Table(chain));

        let segs = self
            .segments
            .iter()
            .map(|s| {
                let mut t = Table::new();
                t.insert("omega".into(), Value::Float(s.omega));
                t.insert("k".into(), Value::Float(s.k));
                if let Some(d) = s.duration {
                    t.insert("duration".into(), Value::Float(d));
                }
                Value::Table(t)
            })
            .collect();
        root.insert("segments".into(), Value::Array(segs));

        let mut grid = Table::new();
        grid.insert("start".into(), Value::Float(self.grid.start));
        grid.insert("end".into(), Value::Float(self.grid.end));
        grid.insert("samples".into(), Value::Integer(self.grid.samples as i64));
        root.insert("grid".into(), Value::Table(grid));

        let mut outputs = Table::new();
        outputs.insert("bounds".into(), Value::Boolean(self.outputs.bounds));
        outputs.insert("per_mode".into(), Value::Boolean(self.outputs.per_mode));
        if let Some(t0) = self.outputs.successive_t0 {
            outputs.insert("successive_t0".into(), Value::Float(t0));
        }
        root.insert("outputs".into(), Value::Table(outputs));

        let mut output = Table::new();
        if let Some(p) = &self.output.path {
            output.insert("path".into(), Value::String(p.to_string_lossy().into_owned()));
        }
        if let Some(f) = self.output.format {
            output.insert("format".into(), Value::String(f.as_str().into()));
        }
        if !output.is_empty() {
            root.insert("output".into(), Value::Table(output));
        }
        toml::to_string(&root).expect("config tables always serialize")
    }
}

/// Parses a config document into its scenario.
pub fn parse_config(text: &str) -> Result<Scenario<f64>> {
    RunConfig::parse(text)?.to_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{figure_preset, FigureId};
    use proptest::prelude::*;

    const MINIMAL: &str = r#"
[chain]
n = 4
omega0 = 3
k0 = 2

[[segments]]
omega = 0.3
k = 2.5

[grid]
start = 0
end = 1000
samples = 2001
"#;

    #[test]
    fn minimal_document_is_fig1() {
        let sc = parse_config(MINIMAL).unwrap();
        let fig = figure_preset(FigureId::Fig1, 1).unwrap();
        assert_eq!(sc.policy, LambdaPolicy::FixedInitial);
        assert_eq!(Scenario { name: fig.name.clone(), ..sc }, fig);
    }

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_the_key() {
        let neg = MINIMAL.replace("k = 2.5", "k = 2.5\nduration = -1");
        assert_eq!(key_of(RunConfig::parse(&neg).unwrap_err()), "segments[0].duration");
        let missing = MINIMAL.replace("omega0 = 3\n", "");
        assert_eq!(key_of(RunConfig::parse(&missing).unwrap_err()), "chain.omega0");
        let typed = MINIMAL.replace("samples = 2001", "samples = \"many\"");
        assert_eq!(key_of(RunConfig::parse(&typed).unwrap_err()), "grid.samples");
        let neg_n = MINIMAL.replace("n = 4", "n = -4");
        assert_eq!(key_of(RunConfig::parse(&neg_n).unwrap_err()), "chain.n");
        let unknown = MINIMAL.replace("k0 = 2", "k0 = 2\nkk = 1");
        assert_eq!(key_of(RunConfig::parse(&unknown).unwrap_err()), "chain.kk");
        let policy = format!("policy = \"sometimes\"\n{MINIMAL}");
        assert_eq!(key_of(RunConfig::parse(&policy).unwrap_err()), "policy");
        let open_mid = MINIMAL.replace("[grid]", "[[segments]]\nomega = 1\nk = 1\n\n[grid]");
        assert_eq!(key_of(RunConfig::parse(&open_mid).unwrap_err()), "segments[0].duration");
        assert!(matches!(RunConfig::parse("chain = ["), Err(Error::ConfigSyntax(_))));
    }

    #[test]
    fn literal_policy_and_outputs() {
        let doc = format!(
            "policy = \"literal-segment\"\n{MINIMAL}\n[outputs]\nbounds = true\n\n[output]\npath = \"x.json\"\nformat = \"json\"\n"
        );
        let cfg = RunConfig::parse(&doc).unwrap();
        assert_eq!(cfg.policy, LambdaPolicy::LiteralSegment);
        assert!(cfg.outputs.bounds && !cfg.outputs.per_mode);
        assert_eq!(cfg.output.format, Some(OutputFormat::Json));
        assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
    }

    #[test]
    fn presets_round_trip() {
        for id in FigureId::ALL {
            let sc = figure_preset(id, 1).unwrap();
            let cfg = RunConfig::from_scenario(&sc);
            let back = RunConfig::parse(&cfg.emit()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_scenario().unwrap(), sc);
        }
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(
            n in 1usize..500, w0 in 0.01f64..10.0, k0 in 0.0f64..10.0,
            segs in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0.001f64..100.0), 1..6),
            open in any::<bool>(), start in 0.0f64..10.0, len in 0.1f64..100.0, samples in 2usize..5000,
            t0 in proptest::option::of(0.0f64..10.0), bounds in any::<bool>(), per_mode in any::<bool>(),
            literal in any::<bool>(),
        ) {
            let last = segs.len() - 1;
            let cfg = RunConfig {
                name: Some("p".into()),
                chain: ChainConfig { n, omega0: w0, k0 },
                segments: segs.iter().enumerate().map(|(i, &(omega, k, d))| SegmentConfig {
                    omega, k, duration: if open && i == last { None } else { Some(d) },
                }).collect(),
                grid: GridConfig { start, end: start + len, samples },
                policy: if literal { LambdaPolicy::LiteralSegment } else { LambdaPolicy::FixedInitial },
                outputs: OutputsConfig { bounds, per_mode, successive_t0: t0 },
                output: OutputTarget::default(),
            };
            prop_assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
        }
    }
}
