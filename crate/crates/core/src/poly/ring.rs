use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// Ordered list of variable names shared by every polynomial of a ring.
///
/// Two rings are equal iff their variable lists are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Arc<[String]>,
}

impl Ring {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Self {
        Ring {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
        }
    }

    /// The ring with no variables; its polynomials are rational constants.
    pub fn constants() -> Self {
        Ring::new::<&str>(&[])
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.vars[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// Ring with `extra` appended; names already present are kept once.
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> Ring {
        let mut vars: Vec<String> = self.vars.to_vec();
        for e in extra {
            if !vars.iter().any(|v| v == e.as_ref()) {
                vars.push(e.as_ref().to_string());
            }
        }
        Ring::new(&vars)
    }

    /// Ring with variable `i` removed.
    pub fn without(&self, i: usize) -> Ring {
        let vars: Vec<&String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v)
            .collect();
        Ring::new(&vars)
    }

    pub(crate) fn check(&self, other: &Ring) -> Result<(), PolyError> {
        if self == other {
            Ok(())
        } else {
            Err(PolyError::RingMismatch {
                left: self.vars.join(","),
                right: other.vars.join(","),
            })
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring[{}]", self.vars.join(","))
    }
}

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then lexicographically with the first variable largest.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Mono) -> Mono {
        Mono(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    /// All monomials in `n` variables of total degree exactly `d`, in
    /// ascending order.
    pub fn of_degree(n: usize, d: u32) -> Vec<Mono> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Mono>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(Mono(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=d {
                prefix.push(e);
                rec(n, d - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Mono(Vec::new()));
            }
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out.sort();
        out
    }

    /// All monomials of total degree at most `d`, ascending.
    pub fn up_to_degree(n: usize, d: u32) -> Vec<Mono> {
        (0..=d).flat_map(|k| Mono::of_degree(n, k)).collect()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        // x^2 > xy > y^2 > x > y > 1 with x first
        let mut ms = Mono::up_to_degree(2, 2);
        ms.reverse();
        let got: Vec<Vec<u32>> = ms.into_iter().map(|m| m.0).collect();
        assert_eq!(
            got,
            vec![
                vec![2, 0],
                vec![1, 1],
                vec![0, 2],
                vec![1, 0],
                vec![0, 1],
                vec![0, 0]
            ]
        );
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(Mono::of_degree(3, 2).len(), 6);
        assert_eq!(Mono::up_to_degree(2, 10).len(), 66);
        assert_eq!(Mono::up_to_degree(0, 3).len(), 1);
    }
}
