//! File formats: JSON state and tau files, CSV tables, and the float
//! convention shared by both (17 significant digits).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rskp_core::tau::TauData;
use rskp_core::{PhasePoint, TimeVector};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CliError, Result};

pub const STATE_SCHEMA: &str = "rskp.state/1";
pub const TAU_SCHEMA: &str = "rskp.tau/1";

/// Scientific notation with 17 significant digits; reparses to the same `f64`.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats are written with [`f17`]. Non-finite values
/// become `null`.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(f17(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// A file, or stdout when no path is given.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(CliError::io(format!("cannot create {}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(CliError::io("write failed"))
}

fn time_map(t: &TimeVector) -> BTreeMap<u32, f64> {
    t.iter().collect()
}

fn time_vector(map: &BTreeMap<u32, f64>) -> Result<TimeVector> {
    TimeVector::from_pairs(map.iter().map(|(&k, &v)| (k, v)))
        .map_err(|e| CliError::input(format!("invalid time map: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: String,
    pub n_particles: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Flow index to time.
    pub t: BTreeMap<u32, f64>,
    #[serde(default)]
    pub provenance: serde_json::Value,
}

impl StateFile {
    pub fn from_phase(p: &PhasePoint, provenance: serde_json::Value) -> Self {
        Self {
            schema_version: STATE_SCHEMA.into(),
            n_particles: p.n_particles(),
            x: p.x().to_vec(),
            y: p.y().to_vec(),
            t: time_map(p.t()),
            provenance,
        }
    }

    /// Validates against every `PhasePoint` invariant.
    pub fn to_phase(&self, epsilon: f64) -> Result<PhasePoint> {
        if self.schema_version != STATE_SCHEMA {
            return Err(CliError::input(format!(
                "unsupported state schema {:?}, expected {STATE_SCHEMA:?}",
                self.schema_version
            )));
        }
        for (name, len) in [("x", self.x.len()), ("y", self.y.len())] {
            if len != self.n_particles {
                return Err(CliError::input(format!(
                    "invalid state: {name} has {len} entries but n_particles is {}",
                    self.n_particles
                )));
            }
        }
        let t = time_vector(&self.t)?;
        PhasePoint::with_time(self.x.clone(), self.y.clone(), t, epsilon)
            .map_err(|e| CliError::input(format!("invalid state: {e}")))
    }
}

/// The frozen matrices of the determinant formula, without positions and
/// rapidities. `t` is the multi-time at which `x0` and `y0` were taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauFile {
    pub schema_version: String,
    pub n_particles: usize,
    pub x0: Vec<f64>,
    pub y0: Vec<Vec<f64>>,
    pub t: BTreeMap<u32, f64>,
    #[serde(default)]
    pub provenance: serde_json::Value,
}

impl TauFile {
    pub fn from_phase(p: &PhasePoint, provenance: serde_json::Value) -> Result<Self> {
        let td = TauData::from_phase(p).map_err(|e| CliError::input(e.to_string()))?;
        Ok(Self {
            schema_version: TAU_SCHEMA.into(),
            n_particles: p.n_particles(),
            x0: td.initial_positions(),
            y0: td.y0_rows(),
            t: time_map(p.t()),
            provenance,
        })
    }

    pub fn to_tau(&self, epsilon: f64) -> Result<(TauData, TimeVector)> {
        if self.schema_version != TAU_SCHEMA {
            return Err(CliError::input(format!(
                "unsupported tau schema {:?}, expected {TAU_SCHEMA:?}",
                self.schema_version
            )));
        }
        if self.x0.len() != self.n_particles {
            return Err(CliError::input(format!(
                "invalid tau file: x0 has {} entries but n_particles is {}",
                self.x0.len(),
                self.n_particles
            )));
        }
        rskp_core::phase::check_gaps(&self.x0, epsilon)
            .map_err(|e| CliError::input(format!("invalid tau file: {e}")))?;
        let td = TauData::from_rows(&self.x0, &self.y0, epsilon)
            .map_err(|e| CliError::input(format!("invalid tau file: {e}")))?;
        Ok((td, time_vector(&self.t)?))
    }
}

/// Contents of an input file, dispatched on `schema_version`.
pub enum Input {
    State(PhasePoint),
    /// Tau data and the multi-time it refers to.
    Tau(TauData, TimeVector),
}

impl Input {
    /// The particle system, reconstructed from the roots of tau for tau files.
    pub fn phase(&self) -> Result<PhasePoint> {
        match self {
            Input::State(p) => Ok(p.clone()),
            Input::Tau(td, t) => {
                let p = td
                    .phase_from_tau(&TimeVector::zero())
                    .map_err(|e| CliError::input(format!("cannot recover a particle system from the tau data: {e}")))?;
                Ok(p.at_time(t.clone()))
            }
        }
    }

    pub fn tau_data(&self) -> Result<TauData> {
        match self {
            Input::State(p) => TauData::from_phase(p).map_err(|e| CliError::input(e.to_string())),
            Input::Tau(td, _) => Ok(td.clone()),
        }
    }

    /// Multi-time of the frozen data.
    pub fn time(&self) -> TimeVector {
        match self {
            Input::State(p) => p.t().clone(),
            Input::Tau(_, t) => t.clone(),
        }
    }
}

pub fn load(path: &Path, epsilon: f64) -> Result<Input> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(format!("cannot read {}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: malformed JSON: {e}", path.display())))?;
    let schema = value
        .get("schema_version")
        .and_then(|s| s.as_str())
        .unwrap_or_default()
        .to_owned();
    let parse_err = |e: serde_json::Error| CliError::input(format!("{}: {e}", path.display()));
    match schema.as_str() {
        STATE_SCHEMA => {
            let file: StateFile = serde_json::from_value(value).map_err(parse_err)?;
            Ok(Input::State(file.to_phase(epsilon)?))
        }
        TAU_SCHEMA => {
            let file: TauFile = serde_json::from_value(value).map_err(parse_err)?;
            let (td, t) = file.to_tau(epsilon)?;
            Ok(Input::Tau(td, t))
        }
        other => Err(CliError::input(format!(
            "{}: unknown schema_version {other:?} (expected {STATE_SCHEMA:?} or {TAU_SCHEMA:?})",
            path.display()
        ))),
    }
}

/// CSV writer with `#` comment lines for schema headers and trailers.
pub struct Table {
    out: Box<dyn Write>,
    csv: Option<csv::Writer<Vec<u8>>>,
}

impl Table {
    pub fn new(path: Option<&Path>, schema: &str, header: &[String]) -> Result<Self> {
        let mut t = Self {
            out: open_output(path)?,
            csv: None,
        };
        t.comment(&format!("schema {schema}"))?;
        t.row(header.iter().map(String::as_str))?;
        Ok(t)
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        self.drain()?;
        writeln!(self.out, "# {text}").map_err(CliError::io("write failed"))
    }

    pub fn row<'a>(&mut self, fields: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let w = self.csv.get_or_insert_with(|| csv::Writer::from_writer(Vec::new()));
        w.write_record(fields)
            .map_err(|e| CliError::input(format!("csv: {e}")))?;
        Ok(())
    }

    fn drain(&mut self) -> Result<()> {
        if let Some(w) = self.csv.take() {
            let bytes = w.into_inner().map_err(|e| CliError::input(format!("csv: {e}")))?;
            self.out.write_all(&bytes).map_err(CliError::io("write failed"))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.drain()?;
        self.out.flush().map_err(CliError::io("write failed"))
    }
}
