//! Number fields `Q[x]/(m)` and per-prime ramification verdicts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, FactorError};
use crate::poly::fp::{factor_fp, FpPoly};
use crate::poly::{qpoly_discriminant, PolyError, QPoly, Rat};
use crate::primes::PrimeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumFieldError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("discriminant factorization overflow: {0}")]
    Overflow(#[from] FactorError),
    #[error("{0}")]
    Domain(String),
}

/// Monic integral defining polynomial. A root `θ` of the input polynomial
/// corresponds to the root `scale·θ` of `poly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinPoly {
    poly: QPoly,
    scale: BigInt,
    rescale_primes: Vec<u64>,
}

impl MinPoly {
    /// Makes `f` monic, then rescales its root by the lcm of the
    /// coefficient denominators.
    pub fn new(f: &QPoly) -> Result<Self, NumFieldError> {
        if f.degree() < 1 {
            return Err(NumFieldError::Domain("defining polynomial must have degree at least 1".into()));
        }
        let m = f.monic();
        let n = m.degree() as usize;
        let mut scale = BigInt::one();
        for c in m.coeffs() {
            scale = scale.lcm(c.denom());
        }
        // θ' = Lθ has minimal polynomial Σ c_i L^{n-i} x^i
        let lr = Rat::from_integer(scale.clone());
        let coeffs: Vec<Rat> = m
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * num_traits::pow(lr.clone(), n - i))
            .collect();
        let rescale_primes = arith::prime_divisors(&scale)?;
        Ok(MinPoly {
            poly: QPoly::new(coeffs),
            scale,
            rescale_primes,
        })
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree() as usize
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn rescale_primes(&self) -> &[u64] {
        &self.rescale_primes
    }

    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        self.poly.coeffs().iter().map(|c| c.to_integer()).collect()
    }

    /// Discriminant of `poly`; `1` in degree one.
    pub fn discriminant(&self) -> Result<BigInt, NumFieldError> {
        if self.degree() == 1 {
            return Ok(BigInt::one());
        }
        Ok(qpoly_discriminant(&self.poly)?.to_integer())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason")]
pub enum RamVerdict {
    Unramified,
    Ramified,
    Undetermined(String),
}

/// Candidate ramified primes: those dividing `disc(m)` or the rescaling.
pub fn poly_discriminant_primes(m: &MinPoly) -> Result<PrimeSet, NumFieldError> {
    let d = m.discriminant()?;
    if d.is_zero() {
        return Err(NumFieldError::Domain("polynomial is not squarefree".into()));
    }
    let mut s = PrimeSet::infinity();
    Extend::extend(&mut s, arith::prime_divisors(&d)?);
    Extend::extend(&mut s, m.rescale_primes.iter().copied());
    Ok(s)
}

/// Squarefree reduction gives an unramified verdict; otherwise Dedekind's
/// criterion decides whether `Z[x]/(m)` is `p`-maximal, in which case the
/// repeated factor means ramification.
pub fn ramification_verdict(m: &MinPoly, p: u64) -> RamVerdict {
    if m.degree() == 1 {
        return RamVerdict::Unramified;
    }
    let coeffs = m.integer_coeffs();
    let reduce = |c: &[BigInt]| {
        let pb = BigInt::from(p);
        FpPoly::new(
            p,
            c.iter()
                .map(|x| x.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        )
    };
    let mbar = reduce(&coeffs);
    if mbar.gcd(&mbar.derivative()).degree() == 0 {
        return RamVerdict::Unramified;
    }
    let fac = match factor_fp(&mbar) {
        Ok(f) => f,
        Err(e) => return RamVerdict::Undetermined(format!("factorization mod {p} failed: {e}")),
    };
    // g = product of the distinct irreducible factors, h = m̄ / ḡ
    let g = fac
        .factors
        .iter()
        .fold(FpPoly::one(p), |acc, (f, _)| acc.mul(f));
    let h = mbar.div(&g);
    let gl = g.lift();
    let hl = h.lift();
    let mut prod = vec![BigInt::zero(); gl.len() + hl.len() - 1];
    for (i, a) in gl.iter().enumerate() {
        for (j, b) in hl.iter().enumerate() {
            prod[i + j] += a * b;
        }
    }
    let len = prod.len().max(coeffs.len());
    let pb = BigInt::from(p);
    let f: Vec<BigInt> = (0..len)
        .map(|i| {
            let a = prod.get(i).cloned().unwrap_or_default();
            let b = coeffs.get(i).cloned().unwrap_or_default();
            let d = a - b;
            debug_assert!((&d % &pb).is_zero());
            d / &pb
        })
        .collect();
    let fbar = reduce(&f);
    let common = fbar.gcd(&g).gcd(&h);
    if common.degree() == 0 {
        RamVerdict::Ramified
    } else {
        RamVerdict::Undetermined(format!("order not {p}-maximal"))
    }
}

/// Closed-form ramification of `p` in `Q(√d)`.
pub fn quadratic_oracle(d: i64, p: u64) -> Result<RamVerdict, NumFieldError> {
    if d == 0 || d == 1 || !arith::is_squarefree(d) {
        return Err(NumFieldError::Domain(format!("{d} is not a squarefree integer other than 0, 1")));
    }
    if !arith::is_prime(p) {
        return Err(NumFieldError::Domain(format!("{p} is not prime")));
    }
    let ramified = if p == 2 {
        matches!(d.rem_euclid(4), 2 | 3)
    } else {
        d.abs() as u64 % p == 0
    };
    Ok(if ramified {
        RamVerdict::Ramified
    } else {
        RamVerdict::Unramified
    })
}
