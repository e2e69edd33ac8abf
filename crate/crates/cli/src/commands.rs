use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rskp_core::dynamics::hamiltonians;
use rskp_core::integrator::integrate_flow;
use rskp_core::sample::random_phase;
use rskp_core::wave::{wave_series_coeffs, wave_value, WaveKind};
use rskp_core::{PhasePoint, TimeVector};
use serde::Serialize;
use serde_json::json;

use crate::checks::{self, Context, Record};
use crate::cli::{EvolveArgs, Format, Global, InitArgs, Kind, Suite, TauArgs, VerifyArgs, WaveArgs};
use crate::error::{from_dynamics, CliError, Result};
use crate::io::{self, f17, Input, StateFile, Table, TauFile};
use crate::parse;

pub const TRAJECTORY_SCHEMA: &str = "rskp.trajectory/1";
pub const TAU_TABLE_SCHEMA: &str = "rskp.tau-table/1";
pub const WAVE_TABLE_SCHEMA: &str = "rskp.wave-table/1";
pub const REPORT_SCHEMA: &str = "rskp.verify/1";

fn input(g: &Global) -> Result<Input> {
    let path = g
        .state
        .as_deref()
        .ok_or_else(|| CliError::input("--state is required"))?;
    io::load(path, g.epsilon_collision)
}

pub fn init(g: &Global, a: &InitArgs) -> Result<()> {
    let (p, provenance) = if a.random {
        let n = a.n_particles.unwrap_or(0);
        if n == 0 {
            return Err(CliError::input("--n-particles must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        let p = random_phase(&mut rng, n)
            .and_then(|p| p.with_epsilon(g.epsilon_collision))
            .map_err(|e| CliError::input(format!("invalid state: {e}")))?;
        (p, json!({ "generator": "random", "rng": "ChaCha8", "seed": g.seed }))
    } else {
        let (x, y) = match (&a.x, &a.y) {
            (Some(x), Some(y)) => (x.clone(), y.clone()),
            _ => return Err(CliError::input("give --x and --y, or --random with --n-particles")),
        };
        if x.len() != y.len() {
            return Err(CliError::input(format!(
                "invalid state: --x has {} entries but --y has {}",
                x.len(),
                y.len()
            )));
        }
        let p = PhasePoint::with_time(x, y, TimeVector::zero(), g.epsilon_collision)
            .map_err(|e| CliError::input(format!("invalid state: {e}")))?;
        (p, json!({ "generator": "explicit" }))
    };
    let text = if a.tau {
        io::to_json(&TauFile::from_phase(&p, provenance)?)
    } else {
        io::to_json(&StateFile::from_phase(&p, provenance))
    };
    io::write_text(g.out.as_deref(), &text)
}

fn trajectory_row(index: usize, k: u32, p: &PhasePoint) -> Result<Vec<String>> {
    let mut row = vec![index.to_string(), k.to_string(), f17(p.t().get(k))];
    row.extend(p.x().iter().chain(p.y()).map(|v| f17(*v)));
    row.extend(hamiltonians(p, 4).map_err(from_dynamics)?.into_iter().map(f17));
    Ok(row)
}

fn push(table: &mut Table, row: &[String]) -> Result<()> {
    table.row(row.iter().map(String::as_str))
}

pub fn evolve(g: &Global, a: &EvolveArgs) -> Result<()> {
    if g.format == Some(Format::Json) {
        return Err(CliError::input("trajectories are written as CSV"));
    }
    let out = g
        .out
        .as_deref()
        .ok_or_else(|| CliError::input("evolve needs --out for the final state"))?;
    let mut p = match input(g)? {
        Input::State(p) => p,
        Input::Tau(..) => return Err(CliError::input("evolve needs a state file, not tau data")),
    };
    let flows = parse::flows(&a.flows)?;
    if a.samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    if !(g.tol > 0.0) {
        return Err(CliError::input("--tol must be positive"));
    }
    let n = p.n_particles();
    let mut header: Vec<String> = ["sample_index", "flow_index", "flow_time"].map(String::from).to_vec();
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=n).map(|i| format!("y_{i}")));
    header.extend((1..=4).map(|i| format!("H_{i}")));
    let mut table = Table::new(a.trajectory.as_deref(), TRAJECTORY_SCHEMA, &header)?;
    let mut index = 0;
    let first = flows.first().map_or(1, |f| f.0);
    push(&mut table, &trajectory_row(index, first, &p)?)?;
    for &(k, duration) in &flows {
        let target = p.t().advanced(k, duration).map_err(from_dynamics)?;
        if duration == 0.0 {
            continue;
        }
        let dt = duration / a.samples as f64;
        for s in 1..=a.samples {
            match integrate_flow(&p, k, dt, g.tol) {
                Ok(tr) => {
                    p = tr.last().clone();
                    if s == a.samples {
                        p = p.at_time(target.clone());
                    }
                    index += 1;
                    push(&mut table, &trajectory_row(index, k, &p)?)?;
                }
                Err(e) => {
                    let last = e.partial.last();
                    if last.t() != p.t() {
                        index += 1;
                        push(&mut table, &trajectory_row(index, k, last)?)?;
                    }
                    table.comment(&format!("truncated: {e}"))?;
                    table.finish()?;
                    return Err(e.into());
                }
            }
        }
    }
    table.finish()?;
    let provenance = json!({ "generator": "evolve", "flows": a.flows, "tol": g.tol });
    io::write_text(Some(out), &io::to_json(&StateFile::from_phase(&p, provenance)))
}

#[derive(Serialize)]
struct TauValue {
    n: i64,
    value: f64,
}

#[derive(Serialize)]
struct TauAtTime {
    time: std::collections::BTreeMap<u32, f64>,
    tau: Vec<TauValue>,
    roots_re: Vec<f64>,
    roots_im: Vec<f64>,
    complex: bool,
    /// `|tau(Re r)|` for each root.
    residual: Vec<f64>,
}

#[derive(Serialize)]
struct TauReport {
    schema_version: &'static str,
    times: Vec<TauAtTime>,
}

pub fn tau(g: &Global, a: &TauArgs) -> Result<()> {
    let inp = input(g)?;
    let td = inp.tau_data()?;
    let reference = inp.time();
    let (lo, hi) = parse::range(&a.n_range)?;
    let times = parse::times(&a.times)?;
    let mut blocks = Vec::new();
    for t in &times {
        let offset = t.difference(&reference);
        let tau = (lo..=hi)
            .map(|n| TauValue {
                n,
                value: td.tau_det(n as f64, &offset),
            })
            .collect();
        let roots = td.tau_roots(&offset);
        let residual = roots.re.iter().map(|&r| td.tau_det(r, &offset).abs()).collect();
        blocks.push(TauAtTime {
            time: t.iter().collect(),
            tau,
            complex: !roots.is_real(),
            roots_re: roots.re,
            roots_im: roots.im,
            residual,
        });
    }
    for (t, b) in times.iter().zip(&blocks) {
        if b.complex {
            eprintln!("warning: tau has complex roots at t = ({t})");
        }
    }
    if g.format == Some(Format::Json) {
        let report = TauReport {
            schema_version: TAU_TABLE_SCHEMA,
            times: blocks,
        };
        return io::write_text(g.out.as_deref(), &io::to_json(&report));
    }
    let header = ["time_index", "time", "kind", "index", "re", "im", "complex", "residual"].map(String::from);
    let mut table = Table::new(g.out.as_deref(), TAU_TABLE_SCHEMA, &header)?;
    for (i, (t, b)) in times.iter().zip(&blocks).enumerate() {
        let label = t.to_string();
        for v in &b.tau {
            let row = [
                i.to_string(),
                label.clone(),
                "tau".into(),
                v.n.to_string(),
                f17(v.value),
                f17(0.0),
            ];
            push(&mut table, &[&row[..], &[String::new(), String::new()]].concat())?;
        }
        for (r, ((re, im), res)) in b.roots_re.iter().zip(&b.roots_im).zip(&b.residual).enumerate() {
            let row = [
                i.to_string(),
                label.clone(),
                "root".into(),
                r.to_string(),
                f17(*re),
                f17(*im),
                b.complex.to_string(),
                f17(*res),
            ];
            push(&mut table, &row)?;
        }
    }
    table.finish()
}

#[derive(Serialize)]
struct WaveRow {
    n: i64,
    z: f64,
    value: Option<f64>,
    coefficients: Vec<f64>,
    note: String,
}

#[derive(Serialize)]
struct WaveReport {
    schema_version: &'static str,
    kind: &'static str,
    time: std::collections::BTreeMap<u32, f64>,
    rows: Vec<WaveRow>,
}

pub fn wave(g: &Global, a: &WaveArgs) -> Result<()> {
    let inp = input(g)?;
    let td = inp.tau_data()?;
    let reference = inp.time();
    let t = match &a.time {
        Some(s) => parse::time(s)?,
        None => reference.clone(),
    };
    let offset = t.difference(&reference);
    let (lo, hi) = parse::range(&a.n_range)?;
    let (kind, label) = match a.kind {
        Kind::Wave => (WaveKind::Wave, "wave"),
        Kind::Adjoint => (WaveKind::Adjoint, "adjoint"),
    };
    let mut rows = Vec::new();
    for n in lo..=hi {
        for &z in &a.z {
            let value = wave_value(&td, n, &offset, z, kind).map(|s| s.value);
            let coeffs = wave_series_coeffs(&td, n as f64, &offset, a.depth, kind);
            let note = [value.as_ref().err(), coeffs.as_ref().err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            rows.push(WaveRow {
                n,
                z,
                value: value.ok(),
                coefficients: coeffs.unwrap_or_default(),
                note,
            });
        }
    }
    if g.format == Some(Format::Json) {
        let report = WaveReport {
            schema_version: WAVE_TABLE_SCHEMA,
            kind: label,
            time: t.iter().collect(),
            rows,
        };
        return io::write_text(g.out.as_deref(), &io::to_json(&report));
    }
    let mut header: Vec<String> = ["n", "z", "kind", "value"].map(String::from).to_vec();
    header.extend((0..=a.depth).map(|k| format!("c_{k}")));
    header.push("note".into());
    let mut table = Table::new(g.out.as_deref(), WAVE_TABLE_SCHEMA, &header)?;
    table.comment(&format!("time {t}"))?;
    for r in &rows {
        let mut row = vec![
            r.n.to_string(),
            f17(r.z),
            label.to_string(),
            r.value.map(f17).unwrap_or_default(),
        ];
        let mut cs: Vec<String> = r.coefficients.iter().map(|c| f17(*c)).collect();
        cs.resize(a.depth + 1, String::new());
        row.extend(cs);
        row.push(r.note.clone());
        push(&mut table, &row)?;
    }
    table.finish()
}

#[derive(Serialize)]
pub struct Config {
    #[serde(rename = "K")]
    pub k: usize,
    pub h: f64,
    pub tol: f64,
    pub epsilon_collision: f64,
    pub seed: u64,
    pub tolerances: std::collections::BTreeMap<&'static str, f64>,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub suite: String,
    pub pass: bool,
    pub records: Vec<Record>,
    pub config: Config,
}

fn suite_name(s: Suite) -> String {
    format!("{s:?}").to_lowercase()
}

pub fn verify_report(g: &Global, inp: &Input, suite: Suite) -> Result<VerifyReport> {
    let phase = inp.phase()?;
    let ctx = Context::new(&phase, inp.tau_data()?, g.k, g.h, g.tol, g.seed)?;
    let records = checks::run(suite, &ctx)?;
    Ok(VerifyReport {
        schema_version: REPORT_SCHEMA,
        suite: suite_name(suite),
        pass: records.iter().all(|r| r.pass),
        records,
        config: Config {
            k: g.k,
            h: g.h,
            tol: g.tol,
            epsilon_collision: g.epsilon_collision,
            seed: g.seed,
            tolerances: checks::tolerances(),
        },
    })
}

fn write_report(path: Option<&Path>, format: Option<Format>, report: &VerifyReport) -> Result<()> {
    if format == Some(Format::Csv) {
        let header = ["name", "residual", "tolerance", "pass", "identity"].map(String::from);
        let mut table = Table::new(path, REPORT_SCHEMA, &header)?;
        for r in &report.records {
            let row = [
                r.name.clone(),
                f17(r.residual),
                f17(r.tolerance),
                r.pass.to_string(),
                r.identity.clone(),
            ];
            push(&mut table, &row)?;
        }
        table.comment(&format!("pass {}", report.pass))?;
        return table.finish();
    }
    io::write_text(path, &io::to_json(report))
}

pub fn verify(g: &Global, a: &VerifyArgs) -> Result<()> {
    let inp = input(g)?;
    let report = verify_report(g, &inp, a.suite)?;
    write_report(g.out.as_deref(), g.format, &report)?;
    if report.pass {
        Ok(())
    } else {
        let failed = report.records.iter().filter(|r| !r.pass).count();
        Err(CliError::Verification {
            failed,
            total: report.records.len(),
        })
    }
}
