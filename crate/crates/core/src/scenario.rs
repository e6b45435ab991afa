//! JSON scenarios in, deterministic JSON reports out.
//!
//! A scenario names one command and carries whatever inputs that command
//! needs. Reports embed the scenario verbatim, so a report can be fed back
//! in to reproduce itself. Complex numbers in results are written as
//! `[re, im]` rounded to 15 significant digits relative to their modulus.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{TorusParams, WeightVector};
use crate::connections::{complex_rows, Connection, ConnectionRecord, TransportOperator};
use crate::coverings::CoveringSpec;
use crate::error::{Error, Result};
use crate::infinitecover::{wilson_relation, GaugeField};
use crate::linalg::CMatrix;

pub const SCHEMA_VERSION: u32 = 1;
const SIGNIFICANT_DIGITS: i32 = 15;

pub const BUILTIN_NAMES: [&str; 4] = ["paper-scalar", "paper-4x4", "paper-cover", "paper-infinite"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Curvature,
    Flat,
    Transport,
    Classify,
    Wilson,
    Independence,
    InfiniteWilson,
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_owned()))
            .map_err(|_| Error::Schema(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    Scalar,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringSection {
    pub degrees: [u32; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deck: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeKind>,
}

impl Params {
    fn is_empty(&self) -> bool {
        *self == Params::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub v: u32,
    pub command: Command,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<WeightVector>,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn builtin(name: &str) -> Option<Scenario> {
    const THETA: f64 = 0.3819660113;
    let params = TorusParams::new(THETA).expect("valid theta");
    let record = |conn: Connection| Some(ConnectionRecord::from(&conn));
    let covering = Some(CoveringSection { degrees: [2, 2] });
    let scenario = match name {
        "paper-scalar" => Scenario {
            v: SCHEMA_VERSION,
            command: Command::Wilson,
            theta: THETA,
            covering,
            connection: record(Connection::scalar(params, 0.25, 0.1).ok()?),
            paths: vec![WeightVector::U, WeightVector::V],
            params: Params {
                c_u: Some(0.25),
                c_v: Some(0.1),
                tau: Some(1.0),
                deck: Some([1, 0]),
                gauge: None,
            },
        },
        "paper-4x4" => Scenario {
            v: SCHEMA_VERSION,
            command: Command::Wilson,
            theta: THETA,
            covering,
            connection: record(Connection::rotation_pair(params, 0.125, 1.0 / 6.0).ok()?),
            paths: vec![WeightVector::U, WeightVector::V],
            params: Params {
                c_u: Some(0.125),
                c_v: Some(1.0 / 6.0),
                tau: Some(1.0),
                deck: Some([1, 0]),
                gauge: Some(GaugeKind::Rotation),
            },
        },
        "paper-cover" => Scenario {
            v: SCHEMA_VERSION,
            command: Command::Classify,
            theta: THETA,
            covering,
            connection: None,
            paths: vec![
                WeightVector::U,
                WeightVector::V,
                WeightVector::new(2, 0),
                WeightVector::new(1, 2),
            ],
            params: Params::default(),
        },
        "paper-infinite" => Scenario {
            v: SCHEMA_VERSION,
            command: Command::InfiniteWilson,
            theta: THETA,
            covering: None,
            connection: None,
            paths: Vec::new(),
            params: Params {
                c_u: Some(0.25),
                c_v: Some(0.1),
                tau: None,
                deck: Some([1, 0]),
                gauge: Some(GaugeKind::Scalar),
            },
        },
        _ => return None,
    };
    Some(scenario)
}

impl Scenario {
    /// Checks that every input the command needs is present and well formed.
    pub fn validate(&self) -> Result<()> {
        if self.v != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.v
            )));
        }
        let params = self.torus_params()?;
        let missing = |what: &str| {
            Error::Schema(format!("command `{}` requires {what}", self.command_name()))
        };
        let need_connection = || -> Result<Connection> {
            let rec = self
                .connection
                .clone()
                .ok_or_else(|| missing("`connection`"))?;
            rec.into_connection(params)
        };
        match self.command {
            Command::Curvature | Command::Flat => {
                need_connection()?;
            }
            Command::Transport => {
                need_connection()?;
                if self.paths.is_empty() {
                    return Err(missing("a non-empty `paths` list"));
                }
                self.params.tau.ok_or_else(|| missing("`params.tau`"))?;
            }
            Command::Classify => {
                self.covering_spec()?;
                if self.paths.is_empty() {
                    return Err(missing("a non-empty `paths` list"));
                }
            }
            Command::Wilson => {
                self.covering_spec()?;
                need_connection()?;
                self.params.deck.ok_or_else(|| missing("`params.deck`"))?;
            }
            Command::Independence => {
                self.covering_spec()?;
                need_connection()?;
                self.params.deck.ok_or_else(|| missing("`params.deck`"))?;
                if self.paths.is_empty() {
                    return Err(missing("a non-empty `paths` list"));
                }
            }
            Command::InfiniteWilson => {
                self.params.c_u.ok_or_else(|| missing("`params.c_u`"))?;
                self.params.c_v.ok_or_else(|| missing("`params.c_v`"))?;
                self.params.deck.ok_or_else(|| missing("`params.deck`"))?;
            }
        }
        for (name, value) in [
            ("c_u", self.params.c_u),
            ("c_v", self.params.c_v),
            ("tau", self.params.tau),
        ] {
            if value.is_some_and(|x| !x.is_finite()) {
                return Err(Error::Schema(format!("`params.{name}` must be finite")));
            }
        }
        Ok(())
    }

    fn command_name(&self) -> String {
        serde_json::to_value(self.command)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }

    fn torus_params(&self) -> Result<TorusParams> {
        TorusParams::new(self.theta).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Covering of the scenario; degrees `(2, 2)` when none is given.
    fn covering_spec(&self) -> Result<CoveringSpec> {
        let [k1, k2] = self.covering.map(|c| c.degrees).unwrap_or([2, 2]);
        CoveringSpec::new(self.torus_params()?, k1, k2).map_err(|e| Error::Schema(e.to_string()))
    }

    fn connection(&self) -> Result<Connection> {
        self.connection
            .clone()
            .ok_or_else(|| Error::Schema("missing `connection`".into()))?
            .into_connection(self.torus_params()?)
    }
}

/// Runs a validated scenario and returns the full report document.
pub fn run(scenario: &Scenario) -> Result<Value> {
    scenario.validate()?;
    let result = dispatch(scenario)?;
    Ok(json!({
        "v": SCHEMA_VERSION,
        "command": scenario.command,
        "scenario": scenario,
        "result": result,
        "meta": {
            "tool": "nctorus",
            "version": env!("CARGO_PKG_VERSION"),
        },
    }))
}

/// Machine-readable error body.
pub fn error_report(err: &Error) -> Value {
    json!({ "error": err.code(), "message": err.to_string() })
}

pub fn render(report: &Value, pretty: bool) -> String {
    let mut out = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    }
    .expect("JSON values always serialize");
    out.push('\n');
    out
}

fn dispatch(s: &Scenario) -> Result<Value> {
    match s.command {
        Command::Curvature => {
            let conn = s.connection()?;
            let form = conn.curvature_form();
            let commutator = conn.curvature_commutator(WeightVector::U, WeightVector::V);
            Ok(json!({
                "curvature": form,
                "symbolically_zero": form.is_symbolically_zero(),
                "max_abs": form.max_abs(),
                "commutator_uv": commutator,
            }))
        }
        Command::Flat => Ok(json!({ "flat": s.connection()?.is_flat() })),
        Command::Transport => {
            let conn = s.connection()?;
            let tau = s.params.tau.expect("validated");
            let transports = s
                .paths
                .iter()
                .map(|&w| conn.transport(w, tau).map(|t| transport_json(&t)))
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({ "transports": transports }))
        }
        Command::Classify => {
            let spec = s.covering_spec()?;
            let reports = s
                .paths
                .iter()
                .map(|&w| spec.classify_path(w))
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({ "paths": reports }))
        }
        Command::Wilson => {
            let spec = s.covering_spec()?;
            let [a, b] = s.params.deck.expect("validated");
            let g = spec.deck(a, b);
            let t = spec.wilson(g, &s.connection()?)?;
            let mut out = json!({
                "deck": g,
                "weight": t.weight,
                "matrix": rounded_rows(&t.matrix),
            });
            if t.rank() == 1 {
                out["value"] = json!(round_complex(t.matrix[(0, 0)].re, t.matrix[(0, 0)].im));
            }
            Ok(out)
        }
        Command::Independence => {
            let spec = s.covering_spec()?;
            let [a, b] = s.params.deck.expect("validated");
            let report =
                spec.check_path_independence(spec.deck(a, b), &s.connection()?, &s.paths)?;
            Ok(json!({
                "deck": report.deck,
                "max_distance": report.max_distance,
                "certified": report.certified,
                "transports": report.transports.iter().map(transport_json).collect::<Vec<_>>(),
            }))
        }
        Command::InfiniteWilson => {
            let (c_u, c_v) = (
                s.params.c_u.expect("validated"),
                s.params.c_v.expect("validated"),
            );
            let [p, q] = s.params.deck.expect("validated");
            match s.params.gauge.unwrap_or(GaugeKind::Scalar) {
                GaugeKind::Scalar => {
                    let z = wilson_relation(p, q, c_u, c_v);
                    Ok(json!({ "deck": [p, q], "value": round_complex(z.re, z.im) }))
                }
                GaugeKind::Rotation => {
                    let m = GaugeField::rotation_pair(c_u, c_v).wilson_relation(p, q)?;
                    Ok(json!({ "deck": [p, q], "matrix": rounded_rows(&m) }))
                }
            }
        }
    }
}

fn transport_json(t: &TransportOperator) -> Value {
    json!({
        "matrix": rounded_rows(&t.matrix),
        "weight": t.weight,
        "tau": t.tau,
    })
}

fn rounded_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    complex_rows(m)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|[re, im]| round_complex(re, im))
                .collect()
        })
        .collect()
}

/// Rounds both parts of `re + i·im` to 15 significant digits of the larger
/// part; components below that resolution become exactly `0`.
pub fn round_complex(re: f64, im: f64) -> [f64; 2] {
    let scale = re.abs().max(im.abs());
    if scale == 0.0 || !scale.is_finite() {
        return [re + 0.0, im + 0.0];
    }
    let exponent = scale.log10().floor() as i32;
    let places = SIGNIFICANT_DIGITS - 1 - exponent;
    let round = |x: f64| -> f64 {
        if places < 0 {
            return x;
        }
        let text = format!("{:.*}", places as usize, x);
        let y: f64 = text.parse().expect("formatted float parses");
        y + 0.0
    };
    [round(re), round(im)]
}
