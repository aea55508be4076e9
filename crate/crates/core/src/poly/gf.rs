//! Finite fields `F_q = F_p[X]/(ψ)` for sampling reduced points.

use super::fp::{factor_fp, inv_mod, mul_mod, reduce_rat, FpPoly};
use super::{MPoly, PolyError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    degree: usize,
    modulus: FpPoly,
}

/// Element of a [`GaloisField`]: `degree` coefficients over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf(pub Vec<u64>);

impl GaloisField {
    /// `F_{p^degree}`, using the first monic irreducible in a fixed
    /// enumeration as modulus.
    pub fn new(p: u64, degree: usize) -> Result<Self, PolyError> {
        if !crate::arith::is_prime(p) {
            return Err(PolyError::Domain(format!("{p} is not prime")));
        }
        if degree == 0 {
            return Err(PolyError::Domain("extension degree 0".into()));
        }
        if degree == 1 {
            return Ok(GaloisField {
                p,
                degree,
                modulus: FpPoly::x(p),
            });
        }
        let mut k: u64 = 0;
        loop {
            // monic of the given degree, lower coefficients from k in base p
            let mut c = Vec::with_capacity(degree + 1);
            let mut t = k;
            for _ in 0..degree {
                c.push(t % p);
                t /= p;
            }
            c.push(1);
            k += 1;
            let cand = FpPoly::new(p, c);
            if cand.c[0] == 0 {
                continue;
            }
            let fac = factor_fp(&cand)?;
            if fac.factors.len() == 1 && fac.factors[0].1 == 1 {
                return Ok(GaloisField {
                    p,
                    degree,
                    modulus: cand,
                });
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Field size, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        self.p.saturating_pow(self.degree as u32)
    }

    fn norm(&self, f: FpPoly) -> Gf {
        let r = if self.degree == 1 { f } else { f.rem(&self.modulus) };
        let mut c = r.c;
        c.resize(self.degree, 0);
        Gf(c)
    }

    fn as_poly(&self, a: &Gf) -> FpPoly {
        FpPoly::new(self.p, a.0.clone())
    }

    pub fn zero(&self) -> Gf {
        Gf(vec![0; self.degree])
    }

    pub fn one(&self) -> Gf {
        self.from_u64(1)
    }

    pub fn from_u64(&self, a: u64) -> Gf {
        let mut c = vec![0; self.degree];
        c[0] = a % self.p;
        Gf(c)
    }

    /// The class of `X`; a generator of the field over `F_p`.
    pub fn generator(&self) -> Gf {
        self.norm(FpPoly::x(self.p))
    }

    pub fn from_rat(&self, r: &super::Rat) -> Option<Gf> {
        reduce_rat(r, self.p).map(|a| self.from_u64(a))
    }

    /// The element with base-`p` digit expansion `index`.
    pub fn element(&self, mut index: u64) -> Gf {
        let mut c = vec![0; self.degree];
        for x in c.iter_mut() {
            *x = index % self.p;
            index /= self.p;
        }
        Gf(c)
    }

    pub fn is_zero(&self, a: &Gf) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &Gf, b: &Gf) -> Gf {
        Gf(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &Gf, b: &Gf) -> Gf {
        Gf(a.0
            .iter()
            .zip(&b.0)
            .map(|(x, y)| (x + self.p - y) % self.p)
            .collect())
    }

    pub fn neg(&self, a: &Gf) -> Gf {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &Gf, b: &Gf) -> Gf {
        if self.degree == 1 {
            return Gf(vec![mul_mod(a.0[0], b.0[0], self.p)]);
        }
        self.norm(self.as_poly(a).mul(&self.as_poly(b)))
    }

    pub fn scale(&self, a: &Gf, k: u64) -> Gf {
        Gf(a.0.iter().map(|&x| mul_mod(x, k, self.p)).collect())
    }

    pub fn pow(&self, a: &Gf, mut e: u64) -> Gf {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: &Gf) -> Option<Gf> {
        if self.is_zero(a) {
            return None;
        }
        if self.degree == 1 {
            return Some(Gf(vec![inv_mod(a.0[0], self.p)]));
        }
        Some(self.pow(a, self.size() - 2))
    }

    /// Evaluates a rational polynomial; `None` if a coefficient is not
    /// `p`-integral.
    pub fn eval(&self, f: &MPoly, point: &[Gf]) -> Option<Gf> {
        let mut acc = self.zero();
        for (m, c) in f.terms() {
            let k = reduce_rat(c, self.p)?;
            let mut t = self.from_u64(k);
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = self.mul(&t, &self.pow(x, e as u64));
                }
            }
            acc = self.add(&acc, &t);
        }
        Some(acc)
    }

    pub fn format(&self, a: &Gf) -> String {
        if self.degree == 1 {
            return a.0[0].to_string();
        }
        let terms: Vec<String> = a
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*X"),
                _ => format!("{c}*X^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicative_group_order() {
        for (p, d) in [(2u64, 3usize), (3, 2), (5, 2), (7, 1)] {
            let f = GaloisField::new(p, d).unwrap();
            let q = f.size();
            for i in 1..q {
                let a = f.element(i);
                assert_eq!(f.pow(&a, q - 1), f.one(), "p={p} d={d} a={a:?}");
                let inv = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &inv), f.one());
            }
        }
    }

    #[test]
    fn primitive_cube_roots_in_f4() {
        let f = GaloisField::new(2, 2).unwrap();
        let roots: Vec<u64> = (0..4)
            .filter(|&i| {
                let a = f.element(i);
                let v = f.add(&f.add(&f.mul(&a, &a), &a), &f.one());
                f.is_zero(&v)
            })
            .collect();
        assert_eq!(roots.len(), 2);
    }
}
