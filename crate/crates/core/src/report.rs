//! Run reports with a JSON rendering and a text rendering of the same data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certify::{denominator_primes, check_certificate, Certificate};
use crate::cover::{fmt_point, CoverCertification, FiberStatus, FixedPointStatus, Verdict};
use crate::fermat::{FermatSignature, Geometry, Solution};
use crate::primes::PrimeSet;
use crate::verify::VerifyReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    IsCover,
    Pass,
    Done,
    NotACover,
    Violation,
    ParseError,
    InvalidInput,
    Inconclusive,
    Unsupported,
    Uncertified,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::IsCover | Status::Pass | Status::Done => 0,
            Status::NotACover | Status::Violation => 1,
            Status::ParseError | Status::InvalidInput => 2,
            Status::Inconclusive | Status::Unsupported | Status::Uncertified => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPrimes {
    pub primes: String,
    /// Set when `S` came from the command line instead of the certificates.
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub purpose: String,
    pub ring: Vec<String>,
    pub exponent: u32,
    pub targets: Vec<String>,
    pub generators: Vec<String>,
    /// `coefficients[k][i]` multiplies generator `i` for target `k`.
    pub coefficients: Vec<Vec<String>>,
    pub denominator_primes: String,
    pub checked: bool,
}

impl CertificateRecord {
    pub fn new(purpose: &str, c: &Certificate) -> Self {
        CertificateRecord {
            purpose: purpose.to_string(),
            ring: c.ring.vars().to_vec(),
            exponent: c.exponent,
            targets: c.targets.iter().map(|p| p.to_string()).collect(),
            generators: c.generators.iter().map(|p| p.to_string()).collect(),
            coefficients: c
                .coefficients
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
            denominator_primes: denominator_primes(c)
                .map(|s| s.to_string())
                .unwrap_or_else(|e| format!("error: {e}")),
            checked: check_certificate(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub element: String,
    pub status: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifySection {
    pub verdict: String,
    pub detail: String,
    pub closure_ring: Vec<String>,
    pub closure_degree: u32,
    pub group: Vec<String>,
    pub fixed_point_free: Vec<ElementRecord>,
    pub constant_fibers: ElementRecord,
    pub certificates: Vec<CertificateRecord>,
}

impl CertifySection {
    pub fn new(cert: &CoverCertification) -> Self {
        let (verdict, verdict_detail) = match &cert.verdict {
            Verdict::IsCover => ("is_cover", String::new()),
            Verdict::NotACover(w) => ("not_a_cover", w.clone()),
            Verdict::Inconclusive(w) => ("inconclusive", w.clone()),
        };
        let mut certificates = Vec::new();
        let fixed_point_free = cert
            .fixed_point_free
            .iter()
            .map(|e| {
                let (status, detail) = match &e.status {
                    FixedPointStatus::Certified(c) => {
                        certificates.push(CertificateRecord::new(&format!("fixed-point-free {}", e.element), c));
                        ("certified", String::new())
                    }
                    FixedPointStatus::Fixed(pt) => ("fixed", format!("fixed point {}", fmt_point(pt))),
                    FixedPointStatus::Inconclusive { max_n, max_aux_degree } => (
                        "inconclusive",
                        format!("no certificate with N <= {max_n}, degree <= {max_aux_degree}"),
                    ),
                };
                ElementRecord {
                    element: e.element.clone(),
                    status: status.to_string(),
                    detail,
                }
            })
            .collect();
        let (status, detail) = match &cert.constant_fibers {
            FiberStatus::Certified(c) => {
                certificates.push(CertificateRecord::new("constant fibers", c));
                ("certified", String::new())
            }
            FiberStatus::Sampled { points, size } => {
                ("sampled", format!("{points} target points, each with {size} preimages"))
            }
            FiberStatus::Failure { first, second } => (
                "failure",
                format!(
                    "{} has {} preimages, {} has {}",
                    fmt_point(&first.point),
                    first.size,
                    fmt_point(&second.point),
                    second.size
                ),
            ),
            FiberStatus::DegreeMismatch { witness, degree } => (
                "degree_mismatch",
                format!(
                    "{} has {} preimages, declared degree {degree}",
                    fmt_point(&witness.point),
                    witness.size
                ),
            ),
            FiberStatus::Inconclusive { max_n, max_aux_degree } => (
                "inconclusive",
                format!("no certificate with N <= {max_n}, degree <= {max_aux_degree}"),
            ),
        };
        CertifySection {
            verdict: verdict.to_string(),
            detail: verdict_detail,
            closure_ring: cert.closure.source.ring().vars().to_vec(),
            closure_degree: cert.closure.degree,
            group: cert
                .closure
                .action
                .iter()
                .flat_map(|a| a.elements())
                .map(|g| {
                    let imgs: Vec<String> = g.images.iter().map(|p| p.to_string()).collect();
                    format!("{}: ({})", g.name, imgs.join(", "))
                })
                .collect(),
            fixed_point_free,
            constant_fibers: ElementRecord {
                element: "fibers".to_string(),
                status: status.to_string(),
                detail,
            },
            certificates,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub x: String,
    pub y: String,
    pub z: String,
    pub beta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermatSection {
    pub signature: String,
    pub geometry: String,
    pub exponent_sum: String,
    pub bound: u64,
    pub solutions: Vec<SolutionRecord>,
    pub flagged: usize,
}

impl FermatSection {
    pub fn new(sig: &FermatSignature, geometry: Geometry, bound: u64, sols: &[Solution]) -> Self {
        FermatSection {
            signature: sig.to_string(),
            geometry: format!("{geometry:?}").to_lowercase(),
            exponent_sum: sig.exponent_sum().to_string(),
            bound,
            solutions: sols
                .iter()
                .map(|s| SolutionRecord {
                    x: s.x.to_string(),
                    y: s.y.to_string(),
                    z: s.z.to_string(),
                    beta: s.beta.to_string(),
                })
                .collect(),
            flagged: sols.iter().filter(|s| s.beta.is_flagged()).count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub command: String,
    pub input: String,
    pub options: BTreeMap<String, String>,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<BadPrimes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fermat: Option<FermatSection>,
    pub messages: Vec<String>,
}

impl Report {
    pub fn new(command: &str, input: &str) -> Self {
        Report {
            tool: format!("chevweil {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            input: input.to_string(),
            options: BTreeMap::new(),
            status: Status::Done,
            exit_code: 0,
            s: None,
            certify: None,
            verify: None,
            fermat: None,
            messages: Vec::new(),
        }
    }

    pub fn option(mut self, key: &str, value: impl ToString) -> Self {
        self.options.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    pub fn set_s(&mut self, s: &PrimeSet, forced: bool) {
        self.s = Some(BadPrimes {
            primes: s.to_string(),
            forced,
        });
    }

    pub fn is_forced(&self) -> bool {
        self.s.as_ref().is_some_and(|s| s.forced)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.is_forced() {
            out.push_str("!!! FORCED S: bad primes were overridden on the command line !!!\n");
        }
        let value = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &value {
            for (k, v) in map {
                render(&mut out, k, v, 0);
            }
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if s.is_empty() => Some("\"\"".into()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            let items: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("[{}]", items.join(", ")))
        }
        _ => None,
    }
}

/// Rows of flat objects sharing one key list.
fn table(a: &[Value]) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let first = a.first()?.as_object()?;
    let keys: Vec<String> = first.keys().cloned().collect();
    let mut rows = Vec::new();
    for v in a {
        let o = v.as_object()?;
        if o.keys().ne(keys.iter()) {
            return None;
        }
        rows.push(o.values().map(scalar).collect::<Option<Vec<_>>>()?);
    }
    Some((keys, rows))
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    match v {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, x) in map {
                render(out, k, x, depth + 1);
            }
        }
        Value::Array(a) => {
            let _ = writeln!(out, "{pad}{key}: ({} entries)", a.len());
            if let Some((keys, rows)) = table(a) {
                let mut widths: Vec<usize> = keys.iter().map(|k| k.len()).collect();
                for r in &rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |cells: &[String]| {
                    let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    format!("{pad}  {}", parts.join("  ").trim_end())
                };
                let _ = writeln!(out, "{}", line(&keys));
                for r in &rows {
                    let _ = writeln!(out, "{}", line(r));
                }
            } else {
                for (i, x) in a.iter().enumerate() {
                    render(out, &format!("[{i}]"), x, depth + 1);
                }
            }
        }
        _ => unreachable!(),
    }
}
