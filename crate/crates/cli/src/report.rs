//! Run reports and their canonical JSON form.

use std::io;

use critlimit::limitlab::{point_pairs, EdDegree, GenericCount, LimitConfig, LimitReport};
use critlimit::pointset::PointSet;
use critlimit::tracker::{FailureReason, PathOutcome, PathStatus, RejectReason};
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub problem: String,
    pub description: String,
    pub config: LimitConfig,
    pub result: Outcome,
    pub paths: Vec<PathRecord>,
    /// Only with `--timing`, which gives up byte-identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Solve(SolveResult),
    Limit(LimitResult),
    Verify(VerifyResult),
    EdDegree(EdDegree),
}

#[derive(Debug, Serialize)]
pub struct SolutionRecord {
    pub ambient: Vec<[f64; 2]>,
    pub coordinates: Vec<[f64; 2]>,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Debug, Serialize)]
pub struct RejectionRecord {
    pub path: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Serialize)]
pub struct SolveResult {
    pub t: [f64; 2],
    pub path_count: usize,
    pub finite: usize,
    pub at_infinity: usize,
    pub failed: usize,
    pub inconsistent: bool,
    pub solution_count: usize,
    pub solutions: Vec<SolutionRecord>,
    pub rejected: Vec<RejectionRecord>,
}

#[derive(Debug, Serialize)]
pub struct LimitResult {
    pub t0: [f64; 2],
    pub lhs_limit: PointSet,
    pub generic_count: usize,
    pub infinity_count: usize,
    pub failure_count: usize,
    /// `generic_count == |limit| + infinity_count + failure_count`.
    pub conserved: bool,
    pub ambiguous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_check: Option<GenericCount>,
}

#[derive(Debug, Serialize)]
pub struct VerifyResult {
    #[serde(flatten)]
    pub report: LimitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_check: Option<GenericCount>,
}

#[derive(Debug, Serialize)]
pub struct PathRecord {
    pub path: usize,
    pub status: PathStatus,
    pub winding: Option<u32>,
    pub endpoint: Option<Vec<[f64; 2]>>,
    pub failure: Option<FailureReason>,
}

impl PathRecord {
    pub fn new(o: &PathOutcome, ambient: impl Fn(&[critlimit::Complex64]) -> Vec<critlimit::Complex64>) -> Self {
        Self {
            path: o.path_id,
            status: o.status,
            winding: o.winding_number,
            endpoint: o.endpoint.as_ref().map(|e| point_pairs(&ambient(e))),
            failure: o.failure,
        }
    }
}

pub fn to_json(report: &RunReport) -> serde_json::Result<String> {
    let mut out = Vec::new();
    report.serialize(&mut Serializer::with_formatter(&mut out, Pretty::default()))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("JSON is UTF-8"))
}

/// `PrettyFormatter` printing floats at 17 significant digits, so they
/// round-trip and look the same on every run.
#[derive(Default)]
struct Pretty {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Pretty {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}
