use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A finite set of places of `Q`: rational primes plus, separately, the
/// archimedean place.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeSet {
    primes: BTreeSet<u64>,
    includes_infinity: bool,
}

impl PrimeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{∞}`
    pub fn infinity() -> Self {
        PrimeSet {
            primes: BTreeSet::new(),
            includes_infinity: true,
        }
    }

    pub fn from_primes<I: IntoIterator<Item = u64>>(ps: I) -> Self {
        PrimeSet {
            primes: ps.into_iter().collect(),
            includes_infinity: true,
        }
    }

    pub fn insert(&mut self, p: u64) {
        self.primes.insert(p);
    }

    pub fn set_infinity(&mut self, yes: bool) {
        self.includes_infinity = yes;
    }

    pub fn includes_infinity(&self) -> bool {
        self.includes_infinity
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty() && !self.includes_infinity
    }

    pub fn extend(&mut self, other: &PrimeSet) {
        self.primes.extend(other.primes.iter().copied());
        self.includes_infinity |= other.includes_infinity;
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut s = self.clone();
        s.extend(other);
        s
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.primes.is_subset(&other.primes) && (!self.includes_infinity || other.includes_infinity)
    }
}

impl Extend<u64> for PrimeSet {
    fn extend<I: IntoIterator<Item = u64>>(&mut self, iter: I) {
        self.primes.extend(iter);
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.primes.iter().map(|p| p.to_string()).collect();
        if self.includes_infinity {
            parts.push("inf".into());
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid prime set entry `{0}`")]
pub struct PrimeSetParseError(pub String);

impl FromStr for PrimeSet {
    type Err = PrimeSetParseError;

    /// Parses `"2, 3, inf"`; braces are optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut out = PrimeSet::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "inf" | "infinity" | "∞" => out.includes_infinity = true,
                _ => {
                    let p: u64 = part
                        .parse()
                        .map_err(|_| PrimeSetParseError(part.to_string()))?;
                    if !crate::arith::is_prime(p) {
                        return Err(PrimeSetParseError(part.to_string()));
                    }
                    out.primes.insert(p);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: PrimeSet = "{3, 2, inf}".parse().unwrap();
        assert_eq!(s.to_string(), "{2, 3, inf}");
        assert!("4".parse::<PrimeSet>().is_err());
        assert_eq!("inf".parse::<PrimeSet>().unwrap(), PrimeSet::infinity());
    }

    #[test]
    fn subset_respects_infinity() {
        let a = PrimeSet::from_primes([2]);
        let mut b = a.clone();
        b.set_infinity(false);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
    }
}
