//! Subcommand implementations for the `chevweil` binary. Each command
//! returns a [`Report`]; the process exit code is `report.exit_code`.

use std::fs;
use std::path::Path;

use chevweil::cover::{bad_primes, certify_cover, CoverCertification, CoverError, Verdict};
use chevweil::fermat::{classify, search, FermatSignature};
use chevweil::lift::PointQ;
use chevweil::report::{CertifySection, FermatSection};
use chevweil::verify::{sample_s_integral_points, verify_cw};
use chevweil::{CoverFile, CoverSpec, PrimeSet, Rat, Report, Status};

pub const DEFAULT_PRIME_BUDGET: u64 = 100;
pub const DEFAULT_SAMPLE: usize = 100;
pub const DEFAULT_FERMAT_BOUND: u64 = 10;

/// Command-line overrides; unset fields fall back to the cover file's
/// `[options]` and then to the defaults.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub max_n: Option<u32>,
    pub max_degree: Option<u32>,
    pub prime_budget: Option<u64>,
    pub sample: Option<usize>,
    pub force_s: Option<PrimeSet>,
}

fn fail(mut r: Report, status: Status, msg: String) -> Report {
    r.messages.push(msg);
    r.set_status(status);
    r
}

struct Certified {
    file: CoverFile,
    spec: CoverSpec,
    cert: CoverCertification,
}

fn run_certify(path: &Path, opts: &RunOptions, mut r: Report) -> Result<(Certified, Report), Report> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Err(fail(r, Status::InvalidInput, format!("{}: {e}", path.display()))),
    };
    let file: CoverFile = match text.parse() {
        Ok(f) => f,
        Err(e) => return Err(fail(r, Status::ParseError, format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message))),
    };
    let spec = match file.to_spec() {
        Ok(s) => s,
        Err(e) => return Err(fail(r, Status::InvalidInput, e.to_string())),
    };
    let mut bounds = file.options.bounds();
    if let Some(n) = opts.max_n {
        bounds.max_n = n;
    }
    if let Some(d) = opts.max_degree {
        bounds.max_aux_degree = d;
    }
    r = r
        .option("max_N", bounds.max_n)
        .option("max_degree", bounds.max_aux_degree)
        .option("family", spec.family.kind())
        .option("degree", spec.degree);
    let cert = match certify_cover(&spec, &bounds) {
        Ok(c) => c,
        Err(e @ CoverError::Unsupported(_)) => return Err(fail(r, Status::Unsupported, e.to_string())),
        Err(e) => return Err(fail(r, Status::Inconclusive, e.to_string())),
    };
    r.certify = Some(CertifySection::new(&cert));
    Ok((Certified { file, spec, cert }, r))
}

/// Certifies the cover in `path` and reports `S` with all certificates.
pub fn cmd_certify(path: &Path, opts: &RunOptions) -> Report {
    let r = Report::new("certify", &path.display().to_string());
    let (c, mut r) = match run_certify(path, opts, r) {
        Ok(x) => x,
        Err(r) => return r,
    };
    match &c.cert.verdict {
        Verdict::IsCover => match bad_primes(&c.spec, &c.cert) {
            Ok(s) => {
                r.set_s(&s, false);
                r.set_status(Status::IsCover);
            }
            Err(e) => return fail(r, Status::Inconclusive, e.to_string()),
        },
        Verdict::NotACover(w) => {
            r.messages.push(format!("not a cover: {w}"));
            r.set_status(Status::NotACover);
        }
        Verdict::Inconclusive(w) => {
            r.messages.push(format!("inconclusive: {w}"));
            r.set_status(Status::Inconclusive);
        }
    }
    r
}

/// Reads one point per line, coordinates separated by commas and
/// optionally wrapped in parentheses. `#` starts a comment.
pub fn parse_points(text: &str) -> Result<Vec<(usize, Vec<Rat>)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let inner = line.strip_prefix('(').and_then(|l| l.strip_suffix(')')).unwrap_or(line);
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<Rat>().map_err(|_| format!("line {}: bad coordinate `{}`", i + 1, c.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        out.push((i + 1, coords));
    }
    Ok(out)
}

/// Certifies, then lifts each point along the cover and checks for
/// ramification outside `S`. Points come from `points` or are sampled.
pub fn cmd_verify(path: &Path, points: Option<&Path>, opts: &RunOptions) -> Report {
    let r = Report::new("verify", &path.display().to_string());
    let (c, mut r) = match run_certify(path, opts, r) {
        Ok(x) => x,
        Err(mut r) => {
            if matches!(r.status, Status::Inconclusive | Status::Unsupported) {
                r.set_status(Status::Uncertified);
            }
            return r;
        }
    };
    if c.cert.verdict != Verdict::IsCover {
        return fail(r, Status::Uncertified, "the cover is not certified".into());
    }
    let computed = match bad_primes(&c.spec, &c.cert) {
        Ok(s) => s,
        Err(e) => return fail(r, Status::Uncertified, e.to_string()),
    };
    let s = match &opts.force_s {
        Some(f) => {
            r.messages.push(format!("S forced to {f}; certificates give {computed}"));
            r.set_s(f, true);
            f.clone()
        }
        None => {
            r.set_s(&computed, false);
            computed
        }
    };
    let budget = opts.prime_budget.or(c.file.options.prime_budget).unwrap_or(DEFAULT_PRIME_BUDGET);
    r = r.option("prime_budget", budget);
    let pts = match points {
        Some(pp) => {
            r = r.option("points", pp.display());
            let text = match fs::read_to_string(pp) {
                Ok(t) => t,
                Err(e) => return fail(r, Status::InvalidInput, format!("{}: {e}", pp.display())),
            };
            let raw = match parse_points(&text) {
                Ok(p) => p,
                Err(e) => return fail(r, Status::ParseError, format!("{}: {e}", pp.display())),
            };
            let mut pts = Vec::new();
            for (line, coords) in raw {
                match PointQ::new(&c.spec.target, coords) {
                    Ok(p) => pts.push(p),
                    Err(e) => return fail(r, Status::InvalidInput, format!("{}: line {line}: {e}", pp.display())),
                }
            }
            pts
        }
        None => {
            let n = opts.sample.or(c.file.options.sample).unwrap_or(DEFAULT_SAMPLE);
            r = r.option("sample", n);
            let pts = sample_s_integral_points(&c.spec.target, &s, n);
            if pts.len() < n {
                r.messages.push(format!("only {} S-integral points found of {n} requested", pts.len()));
            }
            pts
        }
    };
    match verify_cw(&c.spec, &c.cert, &s, &pts, budget) {
        Ok(rep) => {
            let status = if rep.violations.is_empty() { Status::Pass } else { Status::Violation };
            r.verify = Some(rep);
            r.set_status(status);
            r
        }
        Err(e) => fail(r, Status::Inconclusive, e.to_string()),
    }
}

/// Classifies `a x^p + b y^q = c z^r` and tabulates primitive solutions
/// up to `bound` with their `β` values.
pub fn cmd_fermat(coeffs: [i64; 3], exps: [u32; 3], bound: u64) -> Report {
    let [a, b, c] = coeffs;
    let [p, q, r] = exps;
    let mut rep = Report::new("fermat", &format!("{a} {b} {c} {p} {q} {r}")).option("bound", bound);
    let sig = match FermatSignature::new(a, b, c, p, q, r) {
        Ok(s) => s,
        Err(e) => return fail(rep, Status::InvalidInput, e.to_string()),
    };
    let sols = search(&sig, bound);
    rep.fermat = Some(FermatSection::new(&sig, classify(&sig), bound, &sols));
    rep.set_status(Status::Done);
    rep
}
