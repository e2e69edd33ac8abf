//! Small textual formats used on the command line.

use rskp_core::TimeVector;

use crate::error::{CliError, Result};

/// `"t1=0.3,t2=-0.1"` into `[(1, 0.3), (2, -0.1)]`, order preserved.
/// `"0"` and the empty string mean no flows.
pub fn flows(spec: &str) -> Result<Vec<(u32, f64)>> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "0" {
        return Ok(Vec::new());
    }
    spec.split(',').map(flow_term).collect()
}

fn flow_term(term: &str) -> Result<(u32, f64)> {
    let bad = || CliError::input(format!("bad flow term {term:?}: expected tK=VALUE with K >= 1"));
    let (lhs, rhs) = term.trim().split_once('=').ok_or_else(bad)?;
    let k: u32 = lhs
        .trim()
        .strip_prefix('t')
        .ok_or_else(bad)?
        .parse()
        .map_err(|_| bad())?;
    let v: f64 = rhs.trim().parse().map_err(|_| bad())?;
    if k == 0 || !v.is_finite() {
        return Err(bad());
    }
    Ok((k, v))
}

/// A single absolute multi-time, same syntax as [`flows`].
pub fn time(spec: &str) -> Result<TimeVector> {
    TimeVector::from_pairs(flows(spec)?).map_err(|e| CliError::input(e.to_string()))
}

/// Several multi-times separated by `;`.
pub fn times(spec: &str) -> Result<Vec<TimeVector>> {
    spec.split(';').map(time).collect()
}

/// Inclusive integer range `"a..b"`.
pub fn range(spec: &str) -> Result<(i64, i64)> {
    let bad = || CliError::input(format!("bad range {spec:?}: expected a..b with a <= b"));
    let (a, b) = spec.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}
