//! CSV and JSON writers.
//!
//! Numbers are written with Rust's shortest round-trip formatting, which is
//! locale-independent. Every CSV starts with a header row and every row ends
//! with `\n`.

use std::io::{self, Write};

use serde::Serialize;

use crate::config::RunConfig;
use crate::experiments::SweepResult;
use crate::sim::PulseRecord;

pub const PULSE_LOG_HEADER: &str = "trial,hypothesis,apd_counts,quadrature,decision_apd,decision_homodyne";

/// Parameters and versions needed to regenerate an output.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub rng: &'static str,
    pub config: &'a RunConfig,
}

impl<'a> Provenance<'a> {
    pub fn new(command: &'a str, config: &'a RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            rng: "ChaCha8 (rand_chacha 0.9), one stream per (seed, chunk, quantity); Poisson and Normal from rand_distr 0.5",
            config,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub provenance: Provenance<'a>,
    pub result: &'a T,
}

pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_json<T: Serialize>(value: &T, mut w: impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::other)?;
    w.write_all(b"\n")
}

/// One row per grid point; each series contributes a value column and, for
/// Monte Carlo series, a `<name>_std_err` column.
pub fn write_sweep_csv(result: &SweepResult, mut w: impl Write) -> io::Result<()> {
    let mut header = vec![result.axis_name.clone()];
    for s in &result.series {
        header.push(s.name.clone());
        if s.std_err.is_some() {
            header.push(format!("{}_std_err", s.name));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for (i, x) in result.axis_values.iter().enumerate() {
        let mut row = vec![fmt_real(*x)];
        for s in &result.series {
            row.push(fmt_real(s.values[i]));
            if let Some(se) = &s.std_err {
                row.push(fmt_real(se[i]));
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_pulse_log_csv(log: &[PulseRecord], w: impl Write) -> io::Result<()> {
    let mut w = io::BufWriter::new(w);
    writeln!(w, "{PULSE_LOG_HEADER}")?;
    for r in log {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.trial,
            r.hypothesis.sign(),
            r.apd_counts,
            fmt_real(r.quadrature),
            r.decision_apd.sign(),
            r.decision_homodyne.sign()
        )?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Series;
    use crate::sim::Hypothesis;
    use std::collections::BTreeMap;

    #[test]
    fn sweep_csv_layout() {
        let r = SweepResult {
            axis_name: "alpha2".into(),
            axis_values: vec![0.0, 0.5],
            series: vec![
                Series { name: "kennedy".into(), values: vec![0.5, 0.1], std_err: None },
                Series {
                    name: "kennedy_mc".into(),
                    values: vec![0.49, 0.11],
                    std_err: Some(vec![0.01, 0.002]),
                },
            ],
            annotations: BTreeMap::new(),
            warnings: vec![],
        };
        let mut buf = Vec::new();
        write_sweep_csv(&r, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "alpha2,kennedy,kennedy_mc,kennedy_mc_std_err\n0.0,0.5,0.49,0.01\n0.5,0.1,0.11,0.002\n"
        );
    }

    #[test]
    fn pulse_log_layout() {
        let log = [PulseRecord {
            trial: 0,
            hypothesis: Hypothesis::Minus,
            apd_counts: 2,
            quadrature: -0.25,
            decision_apd: Hypothesis::Plus,
            decision_homodyne: Hypothesis::Minus,
        }];
        let mut buf = Vec::new();
        write_pulse_log_csv(&log, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{PULSE_LOG_HEADER}\n0,-1,2,-0.25,1,-1\n")
        );
    }
}
