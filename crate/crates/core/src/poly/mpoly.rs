use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Mono, PolyError, QPoly, Rat, Ring};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a map keyed by monomial; zero coefficients are never
/// stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    ring: Ring,
    terms: BTreeMap<Mono, Rat>,
}

/// Result of a homogeneity test. The zero polynomial is reported as
/// homogeneous with `degree == -1` and `is_zero` set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Homogeneity {
    pub homogeneous: bool,
    pub degree: i64,
    pub is_zero: bool,
}

impl MPoly {
    pub fn zero(ring: &Ring) -> Self {
        MPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Rat::one())
    }

    pub fn constant(ring: &Ring, c: Rat) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Mono::one(ring.nvars()), c);
        }
        p
    }

    pub fn from_int(ring: &Ring, c: i64) -> Self {
        Self::constant(ring, Rat::from_integer(BigInt::from(c)))
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        Self::monomial(ring, Mono::var(ring.nvars(), i), Rat::one())
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Self, PolyError> {
        Ok(Self::var(ring, ring.require(name)?))
    }

    pub fn monomial(ring: &Ring, m: Mono, c: Rat) -> Self {
        assert_eq!(m.0.len(), ring.nvars(), "monomial arity");
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Rat)>>(ring: &Ring, terms: I) -> Self {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rat)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading_term(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Total degree, `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Degree in variable `i`, `-1` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms
            .keys()
            .map(|m| m.0[i] as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degs = self.terms.keys().map(|m| m.degree() as i64);
        match degs.next() {
            None => Homogeneity {
                homogeneous: true,
                degree: -1,
                is_zero: true,
            },
            Some(d) => Homogeneity {
                homogeneous: degs.all(|e| e == d),
                degree: d,
                is_zero: false,
            },
        }
    }

    fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn checked_add(&self, other: &MPoly) -> Result<MPoly, PolyError> {
        self.ring.check(&other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MPoly) -> Result<MPoly, PolyError> {
        self.ring.check(&other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MPoly) -> Result<MPoly, PolyError> {
        self.ring.check(&other.ring)?;
        let mut out = MPoly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m2, a)| (m2.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        if point.len() != self.ring.nvars() {
            return Err(PolyError::Arity {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Replaces variable `i` by `images[i]`. The result lives in the ring of
    /// the images, which must all agree.
    pub fn substitute(&self, images: &[MPoly]) -> Result<MPoly, PolyError> {
        if images.len() != self.ring.nvars() {
            return Err(PolyError::Arity {
                expected: self.ring.nvars(),
                got: images.len(),
            });
        }
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => {
                return Ok(MPoly {
                    ring: Ring::constants(),
                    terms: self.terms.clone(),
                })
            }
        };
        for im in images {
            target.check(&im.ring)?;
        }
        // cache powers per variable
        let mut powers: Vec<Vec<MPoly>> = vec![vec![MPoly::one(&target)]; images.len()];
        let mut out = MPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in `target`, mapping each variable by
    /// name. Fails if a variable in use is missing from `target`.
    pub fn embed(&self, target: &Ring) -> Result<MPoly, PolyError> {
        let mut idx = Vec::with_capacity(self.ring.nvars());
        for (i, name) in self.ring.vars().iter().enumerate() {
            match target.index_of(name) {
                Some(j) => idx.push(Some(j)),
                None if self.degree_in(i) <= 0 => idx.push(None),
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let mut out = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &k) in m.0.iter().enumerate() {
                if let Some(j) = idx[i] {
                    e[j] += k;
                }
            }
            out.add_term(Mono(e), c.clone());
        }
        Ok(out)
    }

    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * Rat::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact quotient `self / d`, or `InexactDivision`.
    pub fn div_exact(&self, d: &MPoly) -> Result<MPoly, PolyError> {
        self.ring.check(&d.ring)?;
        let (lm, lc) = match d.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(PolyError::Domain("division by zero polynomial".into())),
        };
        let mut q = MPoly::zero(&self.ring);
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading_term() {
            if !lm.divides(rm) {
                return Err(PolyError::InexactDivision);
            }
            let m = lm.quotient_of(rm);
            let c = rc / &lc;
            r = &r - &d.mul_mono(&m, &c);
            q.add_term(m, c);
        }
        Ok(q)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Rat> {
        self.terms.values()
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Univariate view in variable `i` with coefficients in the remaining
    /// variables.
    pub fn to_upoly(&self, i: usize) -> super::UPoly {
        super::UPoly::from_mpoly(self, i)
    }

    /// Substitutes rational values for some variables and returns the result
    /// as a univariate polynomial in `var`, provided every other variable has
    /// been assigned.
    pub fn specialize_univariate(&self, assignment: &[Option<Rat>], var: usize) -> Option<QPoly> {
        let mut coeffs: Vec<Rat> = Vec::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.0.iter().enumerate() {
                if j == var || e == 0 {
                    continue;
                }
                match &assignment[j] {
                    Some(v) => t *= num_traits::pow(v.clone(), e as usize),
                    None => return None,
                }
            }
            let k = m.0[var] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rat::zero());
            }
            coeffs[k] += t;
        }
        Some(QPoly::new(coeffs))
    }

    /// Evaluates with arguments taken in `Q[θ]/(modulus)`.
    pub fn eval_mod(&self, args: &[QPoly], modulus: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for (m, c) in &self.terms {
            let mut t = QPoly::constant(c.clone());
            for (x, &e) in args.iter().zip(&m.0) {
                for _ in 0..e {
                    t = t.mul(x).rem(modulus);
                }
            }
            acc = acc.add(&t);
        }
        acc.rem(modulus)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Largest absolute numerator among the coefficients.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::format_poly(self))
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({})", self)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a MPoly> for &'a MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &'a MPoly) -> MPoly {
                self.$checked(rhs).expect("ring mismatch")
            }
        }
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &'a MPoly) -> MPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat, ratio};

    fn ring_xy() -> Ring {
        Ring::new(&["x", "y"])
    }

    fn p(s: &str) -> MPoly {
        parse_poly(s, &ring_xy()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("x + y") * &p("x - y"), p("x^2 - y^2"));
    }

    #[test]
    fn additive_identity_and_identity_substitution() {
        let f = p("3*x^2*y - 1/2*x + 7");
        assert_eq!(&f + &MPoly::zero(&ring_xy()), f);
        let r = ring_xy();
        let ids = vec![MPoly::var(&r, 0), MPoly::var(&r, 1)];
        assert_eq!(f.substitute(&ids).unwrap(), f);
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = p("x");
        let b = parse_poly("t", &Ring::new(&["t"])).unwrap();
        assert!(matches!(
            a.checked_add(&b),
            Err(PolyError::RingMismatch { .. })
        ));
    }

    #[test]
    fn homogeneity_cases() {
        let h = p("x^2 + x*y").homogeneity();
        assert!(h.homogeneous && h.degree == 2 && !h.is_zero);
        assert!(!p("x^2 + x").homogeneity().homogeneous);
        let z = MPoly::zero(&ring_xy()).homogeneity();
        assert!(z.homogeneous && z.is_zero && z.degree == -1);
    }

    #[test]
    fn evaluation_and_substitution() {
        let f = p("x^2 - 2*y");
        assert_eq!(f.eval(&[ratio(1, 2), rat(3)]).unwrap(), ratio(-23, 4));
        let r = Ring::new(&["t"]);
        let t = MPoly::var(&r, 0);
        let g = f.substitute(&[t.pow(2), t.pow(3)]).unwrap();
        assert_eq!(g, parse_poly("t^4 - 2*t^3", &r).unwrap());
    }

    #[test]
    fn exact_division() {
        let f = p("x^3 - y^3");
        let q = f.div_exact(&p("x - y")).unwrap();
        assert_eq!(q, p("x^2 + x*y + y^2"));
        assert_eq!(p("x^2 + 1").div_exact(&p("x")), Err(PolyError::InexactDivision));
    }

    #[test]
    fn embed_into_larger_ring() {
        let big = Ring::new(&["y", "z", "x"]);
        let e = p("x*y + 2").embed(&big).unwrap();
        assert_eq!(e, parse_poly("y*x + 2", &big).unwrap());
        assert!(p("x").embed(&Ring::new(&["y"])).is_err());
    }
}
