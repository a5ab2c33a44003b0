//! CSV and JSON artifacts.
//!
//! Floats are written with `{:.16e}` (17 significant digits), which parses
//! back to the identical `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use byzagg::agreement::AgreementRun;
use byzagg::geometry::ApproxRatio;
use byzagg::learning::IterationRecord;
use byzagg::{Hyperbox, Vector};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_ratio(r: ApproxRatio) -> String {
    match r {
        ApproxRatio::Finite(x) => fmt_f64(x),
        ApproxRatio::Unbounded => "unbounded".into(),
    }
}

/// A CSV that failed to re-parse.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn rows<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>, ParseError> {
    let mut lines = text.lines();
    let got = lines.next().unwrap_or_default();
    if got != header {
        return Err(ParseError {
            line: 1,
            msg: format!("expected header {header:?}, got {got:?}"),
        });
    }
    Ok(lines.enumerate().map(|(i, l)| (i + 2, l.split(',').collect())))
}

fn field<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| ParseError {
        line,
        msg: format!("cannot parse {s:?}"),
    })
}

/// One node's vector at the end of a round (round 0: the inputs).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRow {
    pub round: usize,
    pub node: usize,
    pub coords: Vec<f64>,
    /// Diameter of all honest vectors of this round.
    pub honest_diameter: f64,
    /// Longest edge of their bounding box.
    pub e_max: f64,
}

/// Rows for the initial honest inputs and every round's honest outputs.
pub fn round_rows(inputs: &[Vector], run: &AgreementRun) -> Vec<RoundRow> {
    let mut out = Vec::new();
    let mut push = |round: usize, vs: &[Vector], dia: f64, e_max: f64| {
        for (node, v) in vs.iter().enumerate() {
            out.push(RoundRow {
                round,
                node,
                coords: v.coords().to_vec(),
                honest_diameter: dia,
                e_max,
            });
        }
    };
    let e0 = Hyperbox::bounding(inputs).map(|b| b.e_max()).unwrap_or(0.0);
    push(0, inputs, run.initial_diameter, e0);
    for r in &run.rounds {
        let outs: Vec<Vector> = r.nodes.iter().map(|n| n.chosen.clone()).collect();
        push(r.round, &outs, r.output_diameter, r.output_box.e_max());
    }
    out
}

fn round_header(d: usize) -> String {
    let mut h = String::from("round,node");
    for i in 0..d {
        write!(h, ",x{i}").unwrap();
    }
    h.push_str(",honest_diameter,e_max");
    h
}

pub fn rounds_csv(rows: &[RoundRow], d: usize) -> String {
    let mut s = round_header(d);
    s.push('\n');
    for r in rows {
        write!(s, "{},{}", r.round, r.node).unwrap();
        for x in &r.coords {
            write!(s, ",{}", fmt_f64(*x)).unwrap();
        }
        writeln!(s, ",{},{}", fmt_f64(r.honest_diameter), fmt_f64(r.e_max)).unwrap();
    }
    s
}

pub fn parse_rounds_csv(text: &str, d: usize) -> Result<Vec<RoundRow>, ParseError> {
    rows(text, &round_header(d))?
        .map(|(line, f)| {
            if f.len() != d + 4 {
                return Err(ParseError {
                    line,
                    msg: format!("expected {} fields, got {}", d + 4, f.len()),
                });
            }
            Ok(RoundRow {
                round: field(line, f[0])?,
                node: field(line, f[1])?,
                coords: f[2..2 + d].iter().map(|x| field(line, x)).collect::<Result<_, _>>()?,
                honest_diameter: field(line, f[d + 2])?,
                e_max: field(line, f[d + 3])?,
            })
        })
        .collect()
}

/// Maximum over honest nodes of one rule on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub instance: usize,
    pub seed: u64,
    pub rule: String,
    pub ratio: ApproxRatio,
    /// Distance from the worst node's output to the honest geometric median.
    pub distance: f64,
    pub r_cov: f64,
}

const RATIO_HEADER: &str = "instance,seed,rule,ratio,distance,r_cov";

pub fn ratios_csv(rows: &[RatioRow]) -> String {
    let mut s = format!("{RATIO_HEADER}\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.instance,
            r.seed,
            r.rule,
            fmt_ratio(r.ratio),
            fmt_f64(r.distance),
            fmt_f64(r.r_cov)
        )
        .unwrap();
    }
    s
}

pub fn parse_ratios_csv(text: &str) -> Result<Vec<RatioRow>, ParseError> {
    rows(text, RATIO_HEADER)?
        .map(|(line, f)| {
            if f.len() != 6 {
                return Err(ParseError {
                    line,
                    msg: format!("expected 6 fields, got {}", f.len()),
                });
            }
            Ok(RatioRow {
                instance: field(line, f[0])?,
                seed: field(line, f[1])?,
                rule: f[2].to_string(),
                ratio: if f[3] == "unbounded" {
                    ApproxRatio::Unbounded
                } else {
                    ApproxRatio::Finite(field(line, f[3])?)
                },
                distance: field(line, f[4])?,
                r_cov: field(line, f[5])?,
            })
        })
        .collect()
}

const LEARNING_HEADER: &str = "iteration,accuracy_mean,accuracy_min,loss,gradient_diameter";

pub fn learning_csv(records: &[IterationRecord]) -> String {
    let mut s = format!("{LEARNING_HEADER}\n");
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{}",
            r.iteration,
            fmt_f64(r.accuracy_mean),
            fmt_f64(r.accuracy_min),
            fmt_f64(r.loss),
            fmt_f64(r.gradient_diameter)
        )
        .unwrap();
    }
    s
}

pub fn parse_learning_csv(text: &str) -> Result<Vec<IterationRecord>, ParseError> {
    rows(text, LEARNING_HEADER)?
        .map(|(line, f)| {
            if f.len() != 5 {
                return Err(ParseError {
                    line,
                    msg: format!("expected 5 fields, got {}", f.len()),
                });
            }
            Ok(IterationRecord {
                iteration: field(line, f[0])?,
                accuracy_mean: field(line, f[1])?,
                accuracy_min: field(line, f[2])?,
                loss: field(line, f[3])?,
                gradient_diameter: field(line, f[4])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub version: &'static str,
}

impl Metadata {
    pub fn now() -> Self {
        Metadata {
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summaries serialize");
    s.push('\n');
    s
}

/// Files produced by a command, written together once it has finished.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn write_all(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let p = dir.join(name);
                fs::write(&p, contents)?;
                Ok(p)
            })
            .collect()
    }
}
