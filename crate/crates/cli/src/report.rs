//! Report envelope and CSV layouts.
//!
//! JSON field order is the struct declaration order below and never changes
//! within a schema version. Every rational is written as `p/q` (or `p`).
//! CSV files carry the exact value and a decimal rendering whose column name
//! ends in `_approx`.

use cantorvis_core::{
    Certificate, Gap, GapRecord, IntervalSet, LevelSet, QuotientCover, Scalar, SquaredCover,
    VerificationReport, Witness,
};
use serde::Serialize;

use crate::CliError;

pub const SCHEMA: &str = "cantorvis-report/1";
pub const EXACTNESS: &str = "exact-rational";

#[derive(Debug, Clone, Serialize)]
pub struct RequestEcho {
    pub subcommand: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rank: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[Scalar; 2]>,
    pub output: &'static str,
}

impl RequestEcho {
    pub fn new(subcommand: &'static str, output: &'static str) -> Self {
        RequestEcho {
            subcommand,
            check: None,
            lambda: None,
            variant: None,
            rank: None,
            j_max: None,
            n_max: None,
            grid: None,
            k: None,
            max_rank: None,
            window: None,
            output,
        }
    }
}

/// Quotient cover plus whether it spans its window.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientResult {
    pub cover: QuotientCover,
    /// `Some(true)` when the window lies inside one part of the cover.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_covered: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Level(LevelSet),
    Gaps(Vec<GapRecord>),
    Square(SquaredCover),
    Quotient(QuotientResult),
    Certificate(Certificate),
    Verification(VerificationReport),
}

impl Payload {
    /// False when the result is a failed check.
    pub fn passed(&self) -> bool {
        match self {
            Payload::Verification(r) => r.pass,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub request: RequestEcho,
    pub exactness: &'static str,
    pub result: Payload,
}

impl ReportEnvelope {
    pub fn new(request: RequestEcho, result: Payload) -> Self {
        ReportEnvelope {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            request,
            exactness: EXACTNESS,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        match &self.result {
            Payload::Level(l) => intervals_csv(&mut w, &l.set)?,
            Payload::Square(s) => intervals_csv(&mut w, &s.set)?,
            Payload::Quotient(q) => intervals_csv(&mut w, &q.cover.set)?,
            Payload::Gaps(gaps) => {
                w.write_record(["step", "index", "a", "b", "a_approx", "b_approx"])?;
                for g in gaps {
                    w.write_record([
                        g.step.to_string(),
                        g.index.to_string(),
                        g.a.to_string(),
                        g.b.to_string(),
                        approx(&g.a),
                        approx(&g.b),
                    ])?;
                }
            }
            Payload::Certificate(c) => certificate_csv(&mut w, c)?,
            Payload::Verification(r) => {
                w.write_record([
                    "check",
                    "label",
                    "relation",
                    "left",
                    "right",
                    "holds",
                    "left_approx",
                    "right_approx",
                    "at",
                ])?;
                for c in &r.details {
                    w.write_record([
                        r.check_name.clone(),
                        c.label.clone(),
                        c.relation.to_string(),
                        c.left.to_string(),
                        c.right.to_string(),
                        c.holds.to_string(),
                        approx(&c.left),
                        approx(&c.right),
                        c.at.clone().unwrap_or_default(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Decimal rendering for CSV, display only.
pub fn approx(x: &Scalar) -> String {
    format!("{:.12}", x.to_f64())
}

type CsvWriter = csv::Writer<Vec<u8>>;

fn intervals_csv(w: &mut CsvWriter, set: &IntervalSet) -> Result<(), CliError> {
    w.write_record(["lo", "hi", "lo_approx", "hi_approx"])?;
    for p in set.parts() {
        w.write_record([
            p.lo().to_string(),
            p.hi().to_string(),
            approx(p.lo()),
            approx(p.hi()),
        ])?;
    }
    Ok(())
}

fn certificate_csv(w: &mut CsvWriter, c: &Certificate) -> Result<(), CliError> {
    w.write_record(["field", "value", "value_approx"])?;
    let mut row = |field: &str, v: &Scalar| w.write_record([field, &v.to_string(), &approx(v)]);
    row("lambda", &c.lambda)?;
    row("k", &c.k)?;
    let gap_rows = |w: &mut CsvWriter, g: &Gap| -> Result<(), csv::Error> {
        w.write_record(["gap_lo", &g.lo.to_string(), &approx(&g.lo)])?;
        w.write_record(["gap_hi", &g.hi.to_string(), &approx(&g.hi)])
    };
    let kind = match c.kind {
        cantorvis_core::CertificateKind::InD => "in_d",
        cantorvis_core::CertificateKind::Visible => "visible",
        cantorvis_core::CertificateKind::Unknown => "unknown",
    };
    w.write_record(["kind", kind, ""])?;
    match &c.witness {
        Witness::Zero { x2 } => {
            w.write_record(["witness", "zero", ""])?;
            w.write_record(["x2", &x2.to_string(), &approx(x2)])?;
        }
        Witness::Scale { index, interval } => {
            w.write_record(["witness", "scale", ""])?;
            w.write_record(["index", &index.to_string(), ""])?;
            w.write_record([
                "interval_lo",
                &interval.lo().to_string(),
                &approx(interval.lo()),
            ])?;
            w.write_record([
                "interval_hi",
                &interval.hi().to_string(),
                &approx(interval.hi()),
            ])?;
        }
        Witness::Pair { x1, x2, rank } => {
            w.write_record(["witness", "pair", ""])?;
            w.write_record(["x1", &x1.to_string(), &approx(x1)])?;
            w.write_record(["x2", &x2.to_string(), &approx(x2)])?;
            w.write_record(["rank", &rank.to_string(), ""])?;
        }
        Witness::Excluded {
            rank,
            gap,
            index_lo,
            index_hi,
        } => {
            w.write_record(["witness", "excluded", ""])?;
            w.write_record(["rank", &rank.to_string(), ""])?;
            gap_rows(w, gap)?;
            w.write_record(["index_lo", &index_lo.to_string(), ""])?;
            w.write_record(["index_hi", &index_hi.to_string(), ""])?;
        }
        Witness::Undecided { max_rank } => {
            w.write_record(["witness", "undecided", ""])?;
            w.write_record(["max_rank", &max_rank.to_string(), ""])?;
        }
    }
    Ok(())
}
