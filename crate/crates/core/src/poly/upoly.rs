use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MPoly, Mono, PolyError, QPoly, Rat, Ring};

/// A polynomial in one distinguished variable whose coefficients are
/// polynomials in the remaining variables. `coeffs[k]` multiplies `var^k`.
#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    var: String,
    coeff_ring: Ring,
    coeffs: Vec<MPoly>,
}

impl UPoly {
    pub fn new(var: &str, coeff_ring: &Ring, mut coeffs: Vec<MPoly>) -> Self {
        for c in &coeffs {
            assert_eq!(c.ring(), coeff_ring, "coefficient ring mismatch");
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly {
            var: var.to_string(),
            coeff_ring: coeff_ring.clone(),
            coeffs,
        }
    }

    /// Univariate polynomial with rational coefficients.
    pub fn from_rats(var: &str, coeffs: &[Rat]) -> Self {
        let r = Ring::constants();
        Self::new(
            var,
            &r,
            coeffs.iter().map(|c| MPoly::constant(&r, c.clone())).collect(),
        )
    }

    pub fn from_qpoly(var: &str, q: &QPoly) -> Self {
        Self::from_rats(var, q.coeffs())
    }

    pub fn from_mpoly(p: &MPoly, i: usize) -> Self {
        let ring = p.ring();
        let coeff_ring = ring.without(i);
        let deg = p.degree_in(i).max(-1);
        let mut buckets: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); (deg + 1) as usize];
        for (m, c) in p.terms() {
            let k = m.0[i] as usize;
            let rest: Vec<u32> = m
                .0
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &e)| e)
                .collect();
            buckets[k].push((Mono(rest), c.clone()));
        }
        let coeffs = buckets
            .into_iter()
            .map(|b| MPoly::from_terms(&coeff_ring, b))
            .collect();
        Self::new(ring.var_name(i), &coeff_ring, coeffs)
    }

    /// Reassembles into `ring`, which must contain the distinguished
    /// variable and every coefficient variable.
    pub fn to_mpoly(&self, ring: &Ring) -> Result<MPoly, PolyError> {
        let v = MPoly::var_named(ring, &self.var)?;
        let mut out = MPoly::zero(ring);
        let mut pw = MPoly::one(ring);
        for c in &self.coeffs {
            out = &out + &(&c.embed(ring)? * &pw);
            pw = &pw * &v;
        }
        Ok(out)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn coeff_ring(&self) -> &Ring {
        &self.coeff_ring
    }

    pub fn coeffs(&self) -> &[MPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> MPoly {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| MPoly::zero(&self.coeff_ring))
    }

    pub fn derivative(&self) -> UPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&Rat::from_integer(BigInt::from(k))))
            .collect();
        UPoly::new(&self.var, &self.coeff_ring, coeffs)
    }

    /// Rational coefficients when the coefficient ring has no variables in
    /// use.
    pub fn to_qpoly(&self) -> Option<QPoly> {
        let cs: Option<Vec<Rat>> = self.coeffs.iter().map(|c| c.constant_value()).collect();
        cs.map(QPoly::new)
    }

    /// Evaluates every coefficient at a point of the coefficient ring.
    pub fn specialize(&self, point: &[Rat]) -> Result<QPoly, PolyError> {
        let cs: Result<Vec<Rat>, _> = self.coeffs.iter().map(|c| c.eval(point)).collect();
        Ok(QPoly::new(cs?))
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})*{}^{k}", self.var))
            .collect();
        write!(f, "UPoly[{}]", parts.join(" + "))
    }
}

/// Sylvester matrix of `f` (degree `m`) and `g` (degree `n`): `n` shifted
/// rows of `f`'s coefficients on top, then `m` shifted rows of `g`'s,
/// coefficients in descending degree.
pub fn sylvester_matrix(f: &UPoly, g: &UPoly) -> Vec<Vec<MPoly>> {
    let m = f.degree().max(0) as usize;
    let n = g.degree().max(0) as usize;
    let size = m + n;
    let zero = MPoly::zero(&f.coeff_ring);
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in f.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in g.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free (Bareiss) determinant over the polynomial ring.
pub(crate) fn determinant(mut a: Vec<Vec<MPoly>>, ring: &Ring) -> MPoly {
    let n = a.len();
    if n == 0 {
        return MPoly::one(ring);
    }
    let mut sign_flip = false;
    let mut prev = MPoly::one(ring);
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return MPoly::zero(ring),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step divides exactly");
            }
            a[i][k] = MPoly::zero(ring);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

/// `Res(f, g)` as the determinant of [`sylvester_matrix`].
pub fn resultant(f: &UPoly, g: &UPoly) -> Result<MPoly, PolyError> {
    f.coeff_ring.check(&g.coeff_ring)?;
    if f.var != g.var {
        return Err(PolyError::Domain(format!(
            "resultant in different variables {} and {}",
            f.var, g.var
        )));
    }
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::Domain("resultant of a zero polynomial".into()));
    }
    Ok(determinant(sylvester_matrix(f, g), &f.coeff_ring))
}

/// `disc(f) = (-1)^{d(d-1)/2} Res(f, f') / lc(f)`.
pub fn discriminant(f: &UPoly) -> Result<MPoly, PolyError> {
    let d = f.degree();
    if d < 1 {
        return Err(PolyError::Domain(
            "discriminant of a constant polynomial".into(),
        ));
    }
    let res = resultant(f, &f.derivative())?;
    let q = res.div_exact(&f.lc())?;
    if (d * (d - 1) / 2) % 2 == 1 {
        Ok(-q)
    } else {
        Ok(q)
    }
}

/// Convenience: discriminant of a rational univariate polynomial.
pub(crate) fn qpoly_discriminant(f: &QPoly) -> Result<Rat, PolyError> {
    let u = UPoly::from_qpoly("x", f);
    let d = discriminant(&u)?;
    Ok(d.constant_value().unwrap_or_else(Rat::zero))
}
