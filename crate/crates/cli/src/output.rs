//! CSV tables. Column names and order are part of the interface; floats are
//! written with 17 significant digits.

use std::io::Write;

use risplace::optimizer::Convergence;
use risplace::sweep::{BaselineRecord, PositionOutcome, SpacingResult};

/// `1.2345678901234567e-3` style, enough digits to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn numbered(prefix: &str, k: usize) -> impl Iterator<Item = String> + '_ {
    (1..=k).map(move |i| format!("{prefix}_{i}"))
}

/// Padded to `k` columns; missing trailing entries stay empty.
fn padded(values: &[f64], k: usize) -> impl Iterator<Item = String> + '_ {
    (0..k).map(move |i| values.get(i).map_or_else(String::new, |&v| num(v)))
}

pub fn sweep_header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = ["index", "z_m", "capacity_bps_hz"].map(String::from).to_vec();
    h.extend(numbered("sv", k));
    h.extend(["variance", "dof"].map(String::from));
    h.extend(numbered("p", k));
    h.extend(
        ["iterations", "converged", "tx_in_fresnel", "rx_in_fresnel", "status", "error"]
            .map(String::from),
    );
    h
}

pub fn baseline_header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = ["spacing_tx_lambda", "spacing_rx_lambda", "capacity_bps_hz"]
        .map(String::from)
        .to_vec();
    h.extend(numbered("sv", k));
    h.extend(numbered("p", k));
    h.push("dof".into());
    h
}

pub fn summary_header() -> Vec<String> {
    [
        "spacing_tx_lambda",
        "spacing_rx_lambda",
        "argmax_z_m",
        "max_capacity_bps_hz",
        "argmax_dof",
        "baseline_capacity_bps_hz",
        "baseline_dof",
        "failed_positions",
    ]
    .map(String::from)
    .to_vec()
}

pub fn sweep_row(outcome: &PositionOutcome, k: usize) -> Vec<String> {
    match outcome {
        Ok(r) => {
            let mut row = vec![r.index.to_string(), num(r.z), num(r.capacity)];
            row.extend(padded(&r.singular_values, k));
            row.extend([num(r.variance), r.dof.to_string()]);
            row.extend(padded(&r.powers, k));
            row.extend([
                r.iterations.to_string(),
                (r.convergence == Convergence::Converged).to_string(),
                r.fresnel.tx_inside.to_string(),
                r.fresnel.rx_inside.to_string(),
                "ok".into(),
                String::new(),
            ]);
            row
        }
        Err(f) => {
            let mut row = vec![f.index.to_string(), num(f.z)];
            row.extend(std::iter::repeat_n(String::new(), 2 * k + 7));
            row.extend(["failed".into(), f.reason.clone()]);
            row
        }
    }
}

pub fn baseline_row(b: &BaselineRecord, k: usize) -> Vec<String> {
    let mut row = vec![num(b.spacing.tx), num(b.spacing.rx), num(b.capacity)];
    row.extend(padded(&b.singular_values, k));
    row.extend(padded(&b.powers, k));
    row.push(b.dof.to_string());
    row
}

pub fn summary_row(s: &SpacingResult) -> Vec<String> {
    let best = s.argmax();
    let base = s.baseline.as_ref().and_then(|b| b.as_ref().ok());
    vec![
        num(s.spacing.tx),
        num(s.spacing.rx),
        best.map_or_else(String::new, |r| num(r.z)),
        best.map_or_else(String::new, |r| num(r.capacity)),
        best.map_or_else(String::new, |r| r.dof.to_string()),
        base.map_or_else(String::new, |b| num(b.capacity)),
        base.map_or_else(String::new, |b| b.dof.to_string()),
        s.failures().to_string(),
    ]
}

pub fn write_table<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
