//! Univariate polynomials over a prime field and their factorization
//! (square-free decomposition, distinct-degree, equal-degree).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{PolyError, QPoly, Rat};
use crate::arith::pow_mod;

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Reduces a rational modulo `p`; `None` when `p` divides the denominator.
pub fn reduce_rat(c: &Rat, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = c.denom().mod_floor(&pb).to_u64().unwrap();
    if d == 0 {
        return None;
    }
    let n = c.numer().mod_floor(&pb).to_u64().unwrap();
    Some(mul_mod(n, inv_mod(d, p), p))
}

/// Dense polynomial over `F_p`, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn from_qpoly(f: &QPoly, p: u64) -> Result<Self, PolyError> {
        let cs: Option<Vec<u64>> = f.coeffs().iter().map(|c| reduce_rat(c, p)).collect();
        cs.map(|c| FpPoly::new(p, c))
            .ok_or(PolyError::BadReduction(p))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &a| (mul_mod(acc, x, self.p) + a) % self.p)
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p
            })
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        let c = (0..n)
            .map(|i| {
                (self.c.get(i).copied().unwrap_or(0) + p - o.c.get(i).copied().unwrap_or(0)) % p
            })
            .collect();
        FpPoly::new(p, c)
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        FpPoly::new(p, out)
    }

    pub fn scale(&self, a: u64) -> FpPoly {
        FpPoly::new(self.p, self.c.iter().map(|&x| mul_mod(x, a, self.p)).collect())
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p))
    }

    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dn = d.c.len() - 1;
        if self.c.len() <= dn {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(d.lc(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dn];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + dn], inv, p);
            if c != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mul_mod(c, dc, p)) % p;
                }
            }
            q[k] = c;
        }
        r.truncate(dn);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn div(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).0
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        FpPoly::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mul_mod(a, (i as u64) % p, p))
                .collect(),
        )
    }

    /// `self^e mod m` with a big exponent.
    pub fn pow_mod(&self, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut result = FpPoly::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            result = result.mul(&result).rem(m);
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
        }
        result
    }

    /// `g` with `g^p = self`, assuming every exponent is a multiple of `p`.
    fn pth_root(&self) -> FpPoly {
        let p = self.p as usize;
        FpPoly::new(self.p, self.c.iter().step_by(p).copied().collect())
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .map(|&a| Rat::from_integer(BigInt::from(a)))
                .collect(),
        )
    }

    /// Integer lift with coefficients in `[0, p)`.
    pub fn lift(&self) -> Vec<BigInt> {
        self.c.iter().map(|&a| BigInt::from(a)).collect()
    }
}

/// Factorization of a polynomial modulo `p`:
/// `f ≡ leading · ∏ factor^multiplicity (mod p)` with monic irreducible
/// factors sorted by degree then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPFactorization {
    pub p: u64,
    pub leading: u64,
    pub squarefree: bool,
    pub factors: Vec<(FpPoly, u32)>,
}

impl ModPFactorization {
    pub fn product(&self) -> FpPoly {
        let mut acc = FpPoly::new(self.p, vec![self.leading]);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }

    pub fn degrees(&self) -> Vec<(i64, u32)> {
        self.factors.iter().map(|(f, e)| (f.degree(), *e)).collect()
    }
}

/// Square-free decomposition of a monic polynomial over `F_p`.
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.degree() <= 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div(&y);
        if !fac.is_one() {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div(&w);
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decomposition(&c.pth_root().monic()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a square-free monic polynomial into `(product of irreducibles of
/// degree d, d)` blocks.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let pb = BigUint::from(p);
    let mut d = 1usize;
    while rest.degree() >= 2 * d as i64 {
        h = h.pow_mod(&pb, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            out.push((g.clone(), d));
            rest = rest.div(&g);
            h = h.rem(&rest);
        }
        d += 1;
    }
    if rest.degree() > 0 {
        let deg = rest.degree() as usize;
        out.push((rest, deg));
    }
    out
}

/// Deterministic sequence of non-constant test polynomials of degree
/// below `n`.
fn test_poly(p: u64, index: u64, n: usize) -> FpPoly {
    let mut k = index + p;
    let mut c = Vec::new();
    while k > 0 && c.len() < n {
        c.push(k % p);
        k /= p;
    }
    FpPoly::new(p, c)
}

/// Splits a product of distinct irreducibles all of degree `d`.
fn equal_degree(f: &FpPoly, d: usize, out: &mut Vec<FpPoly>) {
    let n = f.degree() as usize;
    if n == d {
        out.push(f.monic());
        return;
    }
    let p = f.p;
    let mut idx = 0u64;
    loop {
        let a = test_poly(p, idx, n);
        idx += 1;
        if a.degree() <= 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
            a.pow_mod(&e, f).sub(&FpPoly::one(p))
        };
        let g = b.gcd(f);
        if g.degree() > 0 && g.degree() < f.degree() {
            let h = f.div(&g);
            equal_degree(&g, d, out);
            equal_degree(&h, d, out);
            return;
        }
    }
}

/// Factors `f mod p`. Fails with `BadReduction` when `p` divides a
/// coefficient denominator or the leading coefficient.
pub fn factor_mod_p(f: &QPoly, p: u64) -> Result<ModPFactorization, PolyError> {
    if !crate::arith::is_prime(p) {
        return Err(PolyError::Domain(format!("{p} is not prime")));
    }
    let fb = FpPoly::from_qpoly(f, p)?;
    if fb.degree() != f.degree() || f.is_zero() {
        return Err(PolyError::BadReduction(p));
    }
    factor_fp(&fb)
}

/// Factors a nonzero polynomial over `F_p`.
pub fn factor_fp(fb: &FpPoly) -> Result<ModPFactorization, PolyError> {
    let p = fb.p;
    if fb.is_zero() {
        return Err(PolyError::Domain("factoring the zero polynomial".into()));
    }
    let leading = fb.lc();
    let monic = fb.monic();
    let squarefree = monic.degree() <= 0 || monic.gcd(&monic.derivative()).is_one();
    let mut factors: Vec<(FpPoly, u32)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (block, d) in distinct_degree(&part) {
            let mut irr = Vec::new();
            equal_degree(&block, d, &mut irr);
            for g in irr {
                match factors.iter_mut().find(|(h, _)| *h == g) {
                    Some((_, e)) => *e += mult,
                    None => factors.push((g, mult)),
                }
            }
        }
    }
    factors.sort_by(|a, b| (a.0.degree(), &a.0.c).cmp(&(b.0.degree(), &b.0.c)));
    Ok(ModPFactorization {
        p,
        leading,
        squarefree,
        factors,
    })
}
