//! The sectioned plain-text cover format.
//!
//! ```text
//! [source]
//! vars = t, s
//! J1 = t*s - 1
//!
//! [target]
//! vars = u, v
//! J1 = u*v - 1
//!
//! [map]
//! u = t^2
//! v = s^2
//!
//! [family]
//! kind = kummer
//! n = 2
//! root = t
//! inverse = s
//! radicand = u
//!
//! [options]
//! max_N = 4
//! ```
//!
//! `J1` and `J2` may repeat; `[action]` lines read `name = p1, p2, ...`
//! with one image per source variable. `#` starts a comment.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::certify::Bounds;
use crate::cover::{CoverError, CoverSpec, Family, GroupAction, GroupElement, VarietyPresentation};
use crate::poly::{parse_poly, MPoly, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct CoverFileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub max_n: Option<u32>,
    pub max_degree: Option<u32>,
    pub prime_budget: Option<u64>,
    pub sample: Option<usize>,
}

impl Options {
    pub fn bounds(&self) -> Bounds {
        let d = Bounds::default();
        Bounds::new(self.max_n.unwrap_or(d.max_n), self.max_degree.unwrap_or(d.max_aux_degree))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverFile {
    pub source: VarietyPresentation,
    pub target: VarietyPresentation,
    pub map: Vec<MPoly>,
    /// Non-identity elements as written.
    pub action: Vec<GroupElement>,
    pub family: Family,
    pub degree: Option<u32>,
    pub options: Options,
}

struct Entry {
    key: String,
    value: String,
    line: usize,
    key_col: usize,
    value_col: usize,
}

#[derive(Default)]
struct Section {
    line: usize,
    entries: Vec<Entry>,
}

const SECTIONS: [&str; 6] = ["source", "target", "map", "action", "family", "options"];

fn err(line: usize, column: usize, message: impl Into<String>) -> CoverFileError {
    CoverFileError {
        line,
        column,
        message: message.into(),
    }
}

fn poly_at(e: &Entry, text: &str, offset: usize, ring: &Ring) -> Result<MPoly, CoverFileError> {
    parse_poly(text, ring).map_err(|pe| err(e.line, e.value_col + offset + pe.column - 1, pe.message))
}

fn number<T: FromStr>(e: &Entry) -> Result<T, CoverFileError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, e.value_col, format!("`{}` expects a non-negative integer", e.key)))
}

fn parse_variety(name: &str, sec: &Section) -> Result<VarietyPresentation, CoverFileError> {
    let mut vars: Option<Ring> = None;
    let mut j1 = Vec::new();
    let mut j2 = Vec::new();
    for e in &sec.entries {
        match e.key.as_str() {
            "vars" => {
                if vars.is_some() {
                    return Err(err(e.line, e.key_col, "duplicate `vars`"));
                }
                let names: Vec<&str> = e.value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                for (i, n) in names.iter().enumerate() {
                    let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                        && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !ok {
                        return Err(err(e.line, e.value_col, format!("invalid variable name `{n}`")));
                    }
                    if names[..i].contains(n) {
                        return Err(err(e.line, e.value_col, format!("repeated variable `{n}`")));
                    }
                }
                vars = Some(Ring::new(&names));
            }
            "J1" | "J2" => {
                let Some(r) = &vars else {
                    return Err(err(e.line, e.key_col, format!("`vars` must precede `{}`", e.key)));
                };
                let p = poly_at(e, &e.value, 0, r)?;
                if e.key == "J1" {
                    j1.push(p);
                } else {
                    j2.push(p);
                }
            }
            k => return Err(err(e.line, e.key_col, format!("unknown key `{k}` in [{name}]"))),
        }
    }
    let ring = vars.ok_or_else(|| err(sec.line, 1, format!("[{name}] needs `vars`")))?;
    VarietyPresentation::new(&ring, j1, j2).map_err(|ce| err(sec.line, 1, ce.to_string()))
}

/// Splits on commas, returning each piece with its byte offset.
fn split_commas(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == ',' {
            out.push((start, &s[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &s[start..]));
    out
}

impl FromStr for CoverFile {
    type Err = CoverFileError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut sections: Vec<(String, Section)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let lead = content.len() - content.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(err(line, lead + 1, "unterminated section header"));
                };
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(line, lead + 2, format!("unknown section [{name}]")));
                }
                if sections.iter().any(|(n, _)| n == name) {
                    return Err(err(line, lead + 1, format!("duplicate section [{name}]")));
                }
                sections.push((
                    name.to_string(),
                    Section {
                        line,
                        entries: Vec::new(),
                    },
                ));
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(err(line, lead + 1, "expected `key = value`"));
            };
            let Some((_, sec)) = sections.last_mut() else {
                return Err(err(line, lead + 1, "entry outside of any section"));
            };
            let key = content[..eq].trim();
            let after = &content[eq + 1..];
            let vlead = after.len() - after.trim_start().len();
            let value = after.trim();
            if key.is_empty() {
                return Err(err(line, lead + 1, "missing key"));
            }
            if value.is_empty() {
                return Err(err(line, eq + 2, format!("missing value for `{key}`")));
            }
            sec.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
                key_col: lead + 1,
                value_col: eq + 2 + vlead,
            });
        }
        let get = |name: &str| sections.iter().find(|(n, _)| n == name).map(|(_, s)| s);
        let need = |name: &str| get(name).ok_or_else(|| err(1, 1, format!("missing section [{name}]")));
        let source = parse_variety("source", need("source")?)?;
        let target = parse_variety("target", need("target")?)?;

        let map_sec = need("map")?;
        let mut map: Vec<Option<MPoly>> = vec![None; target.ring().nvars()];
        for e in &map_sec.entries {
            let Some(i) = target.ring().index_of(&e.key) else {
                return Err(err(e.line, e.key_col, format!("`{}` is not a target variable", e.key)));
            };
            if map[i].is_some() {
                return Err(err(e.line, e.key_col, format!("duplicate map entry `{}`", e.key)));
            }
            map[i] = Some(poly_at(e, &e.value, 0, source.ring())?);
        }
        let map: Vec<MPoly> = map
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| {
                    err(map_sec.line, 1, format!("no map entry for `{}`", target.ring().var_name(i)))
                })
            })
            .collect::<Result<_, _>>()?;

        let mut action = Vec::new();
        if let Some(sec) = get("action") {
            for e in &sec.entries {
                let parts = split_commas(&e.value);
                if parts.len() != source.ring().nvars() {
                    return Err(err(
                        e.line,
                        e.value_col,
                        format!("`{}` needs {} images, got {}", e.key, source.ring().nvars(), parts.len()),
                    ));
                }
                let images = parts
                    .iter()
                    .map(|(off, s)| poly_at(e, s, *off, source.ring()))
                    .collect::<Result<Vec<_>, _>>()?;
                action.push(GroupElement {
                    name: e.key.clone(),
                    images,
                });
            }
        }

        let fam_sec = need("family")?;
        let mut kv: Vec<(&str, &Entry)> = Vec::new();
        for e in &fam_sec.entries {
            const KEYS: [&str; 8] = ["kind", "n", "root", "inverse", "radicand", "var", "poly", "degree"];
            if !KEYS.contains(&e.key.as_str()) {
                return Err(err(e.line, e.key_col, format!("unknown key `{}` in [family]", e.key)));
            }
            if kv.iter().any(|(k, _)| *k == e.key) {
                return Err(err(e.line, e.key_col, format!("duplicate key `{}`", e.key)));
            }
            kv.push((e.key.as_str(), e));
        }
        let fget = |k: &str| kv.iter().find(|(key, _)| *key == k).map(|(_, e)| *e);
        let freq = |k: &str| fget(k).ok_or_else(|| err(fam_sec.line, 1, format!("[family] needs `{k}`")));
        let kind = freq("kind")?;
        let allowed: &[&str] = match kind.value.as_str() {
            "kummer" => &["kind", "n", "root", "inverse", "radicand", "degree"],
            "polynomial_in_y" => &["kind", "var", "poly", "degree"],
            "parametrized" | "generic" => &["kind", "degree"],
            other => return Err(err(kind.line, kind.value_col, format!("unknown family `{other}`"))),
        };
        for (k, e) in &kv {
            if !allowed.contains(k) {
                return Err(err(e.line, e.key_col, format!("`{k}` does not apply to a {} family", kind.value)));
            }
        }
        let family = match kind.value.as_str() {
            "kummer" => Family::Kummer {
                n: number(freq("n")?)?,
                root: freq("root")?.value.clone(),
                inverse: fget("inverse").map(|e| e.value.clone()),
                radicand: {
                    let e = freq("radicand")?;
                    poly_at(e, &e.value, 0, target.ring())?
                },
            },
            "polynomial_in_y" => Family::PolynomialInY {
                var: freq("var")?.value.clone(),
                poly: {
                    let e = freq("poly")?;
                    poly_at(e, &e.value, 0, source.ring())?
                },
            },
            "parametrized" => Family::Parametrized,
            _ => Family::Generic,
        };
        let degree = fget("degree").map(number::<u32>).transpose()?;

        let mut options = Options {
            max_n: None,
            max_degree: None,
            prime_budget: None,
            sample: None,
        };
        if let Some(sec) = get("options") {
            for e in &sec.entries {
                let dup = || err(e.line, e.key_col, format!("duplicate key `{}`", e.key));
                match e.key.as_str() {
                    "max_N" => {
                        if options.max_n.replace(number(e)?).is_some() {
                            return Err(dup());
                        }
                    }
                    "max_degree" => {
                        if options.max_degree.replace(number(e)?).is_some() {
                            return Err(dup());
                        }
                    }
                    "prime_budget" => {
                        if options.prime_budget.replace(number(e)?).is_some() {
                            return Err(dup());
                        }
                    }
                    "sample" => {
                        if options.sample.replace(number(e)?).is_some() {
                            return Err(dup());
                        }
                    }
                    k => return Err(err(e.line, e.key_col, format!("unknown key `{k}` in [options]"))),
                }
            }
        }
        let file = CoverFile {
            source,
            target,
            map,
            action,
            family,
            degree,
            options,
        };
        file.to_spec().map_err(|ce| err(fam_sec.line, 1, ce.to_string()))?;
        Ok(file)
    }
}

impl CoverFile {
    pub fn effective_degree(&self) -> Result<u32, CoverError> {
        if let Some(d) = self.degree {
            return Ok(d);
        }
        match &self.family {
            Family::Kummer { n, .. } => Ok(*n),
            Family::PolynomialInY { var, poly } => {
                let i = self.source.ring().require(var)?;
                Ok(poly.degree_in(i).max(0) as u32)
            }
            Family::Parametrized => Ok(1),
            Family::Generic => Err(CoverError::Domain("a generic family needs `degree`".into())),
        }
    }

    pub fn to_spec(&self) -> Result<CoverSpec, CoverError> {
        let action = if self.action.is_empty() {
            None
        } else {
            Some(GroupAction::new(self.source.ring(), self.action.clone())?)
        };
        CoverSpec::new(
            self.source.clone(),
            self.target.clone(),
            self.map.clone(),
            self.effective_degree()?,
            action,
            self.family.clone(),
        )
    }
}

fn write_variety(f: &mut fmt::Formatter<'_>, name: &str, v: &VarietyPresentation) -> fmt::Result {
    writeln!(f, "[{name}]")?;
    writeln!(f, "vars = {}", v.ring().vars().join(", "))?;
    for p in v.j1() {
        writeln!(f, "J1 = {p}")?;
    }
    for p in v.j2() {
        writeln!(f, "J2 = {p}")?;
    }
    Ok(())
}

impl fmt::Display for CoverFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_variety(f, "source", &self.source)?;
        writeln!(f)?;
        write_variety(f, "target", &self.target)?;
        writeln!(f)?;
        writeln!(f, "[map]")?;
        for (name, p) in self.target.ring().vars().iter().zip(&self.map) {
            writeln!(f, "{name} = {p}")?;
        }
        if !self.action.is_empty() {
            writeln!(f)?;
            writeln!(f, "[action]")?;
            for g in &self.action {
                let imgs: Vec<String> = g.images.iter().map(|p| p.to_string()).collect();
                writeln!(f, "{} = {}", g.name, imgs.join(", "))?;
            }
        }
        writeln!(f)?;
        writeln!(f, "[family]")?;
        writeln!(f, "kind = {}", self.family.kind())?;
        match &self.family {
            Family::Kummer {
                n,
                root,
                inverse,
                radicand,
            } => {
                writeln!(f, "n = {n}")?;
                writeln!(f, "root = {root}")?;
                if let Some(i) = inverse {
                    writeln!(f, "inverse = {i}")?;
                }
                writeln!(f, "radicand = {radicand}")?;
            }
            Family::PolynomialInY { var, poly } => {
                writeln!(f, "var = {var}")?;
                writeln!(f, "poly = {poly}")?;
            }
            _ => {}
        }
        if let Some(d) = self.degree {
            writeln!(f, "degree = {d}")?;
        }
        let o = &self.options;
        if o.max_n.is_some() || o.max_degree.is_some() || o.prime_budget.is_some() || o.sample.is_some() {
            writeln!(f)?;
            writeln!(f, "[options]")?;
            if let Some(v) = o.max_n {
                writeln!(f, "max_N = {v}")?;
            }
            if let Some(v) = o.max_degree {
                writeln!(f, "max_degree = {v}")?;
            }
            if let Some(v) = o.prime_budget {
                writeln!(f, "prime_budget = {v}")?;
            }
            if let Some(v) = o.sample {
                writeln!(f, "sample = {v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::families;

    const KUMMER2: &str = "\
# t -> t^2 on the multiplicative group
[source]
vars = t, s
J1 = t*s - 1

[target]
vars = u, v
J1 = u*v - 1

[map]
u = t^2
v = s^2

[family]
kind = kummer
n = 2
root = t
inverse = s
radicand = u

[options]
max_N = 4
prime_budget = 50
";

    #[test]
    fn parses_kummer() {
        let f: CoverFile = KUMMER2.parse().unwrap();
        assert_eq!(f.to_spec().unwrap(), families::kummer_gm(2));
        assert_eq!(f.options.max_n, Some(4));
        assert_eq!(f.options.prime_budget, Some(50));
    }

    #[test]
    fn round_trip() {
        let f: CoverFile = KUMMER2.parse().unwrap();
        let g: CoverFile = f.to_string().parse().unwrap();
        assert_eq!(f, g);
        let with_action = "[source]\nvars = t\n[target]\nvars = x\n[map]\nx = t^2\n[action]\nneg = -t\n[family]\nkind = kummer\nn = 2\nroot = t\nradicand = x\n";
        let f: CoverFile = with_action.parse().unwrap();
        assert_eq!(f.to_string().parse::<CoverFile>().unwrap(), f);
        assert_eq!(f.to_spec().unwrap(), families::affine_line_sign());
    }

    #[test]
    fn errors_carry_locations() {
        let bad = KUMMER2.replace("J1 = t*s - 1", "J1 = t*s - ");
        let e = bad.parse::<CoverFile>().unwrap_err();
        assert_eq!(e.line, 4);
        let bad = KUMMER2.replace("prime_budget = 50", "prime_budjet = 50");
        let e = bad.parse::<CoverFile>().unwrap_err();
        assert_eq!((e.line, e.column), (23, 1));
        assert!(e.message.contains("prime_budjet"));
        let bad = KUMMER2.replace("[map]", "[mapping]");
        assert!(bad.parse::<CoverFile>().unwrap_err().message.contains("unknown section"));
        let bad = KUMMER2.replace("u = t^2", "w = t^2");
        assert!(bad.parse::<CoverFile>().is_err());
        let bad = KUMMER2.replace("J1 = u*v - 1", "J1 = u*v - q");
        let e = bad.parse::<CoverFile>().unwrap_err();
        assert_eq!((e.line, e.column), (8, 12));
    }

    #[test]
    fn family_keys_are_checked() {
        let bad = KUMMER2.replace("inverse = s", "poly = s");
        assert!(bad.parse::<CoverFile>().is_err());
        let bad = KUMMER2.replace("kind = kummer", "kind = weird");
        assert!(bad.parse::<CoverFile>().is_err());
    }
}
