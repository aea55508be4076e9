//! Generalized Fermat equations `a·x^p + b·y^q = c·z^r`: signature
//! classification, coprime solution search, and the map
//! `β = a·x^p / (c·z^r)` with its weighted `G_m`-action.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::exact_root;
use crate::poly::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FermatError {
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("exponents must be at least 2")]
    SmallExponent,
    #[error("β = {0} lies over {{0, 1, ∞}}")]
    FlaggedFiber(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermatSignature {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub p: u32,
    pub q: u32,
    pub r: u32,
}

impl FermatSignature {
    pub fn new(a: i64, b: i64, c: i64, p: u32, q: u32, r: u32) -> Result<Self, FermatError> {
        if a == 0 || b == 0 || c == 0 {
            return Err(FermatError::ZeroCoefficient);
        }
        if p < 2 || q < 2 || r < 2 {
            return Err(FermatError::SmallExponent);
        }
        Ok(FermatSignature { a, b, c, p, q, r })
    }

    /// `a·x^p + b·y^q − c·z^r`.
    pub fn residual(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        self.a * num_traits::pow(x.clone(), self.p as usize) + self.b * num_traits::pow(y.clone(), self.q as usize)
            - self.c * num_traits::pow(z.clone(), self.r as usize)
    }

    pub fn exponent_sum(&self) -> Rat {
        let inv = |k: u32| Rat::new(BigInt::one(), BigInt::from(k));
        inv(self.p) + inv(self.q) + inv(self.r)
    }
}

impl fmt::Display for FermatSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*x^{} + {}*y^{} = {}*z^{}",
            self.a, self.p, self.b, self.q, self.c, self.r
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    Hyperbolic,
    Euclidean,
    Spherical,
}

/// Compares `1/p + 1/q + 1/r` with `1` exactly.
pub fn classify(sig: &FermatSignature) -> Geometry {
    match sig.exponent_sum().cmp(&Rat::one()) {
        std::cmp::Ordering::Less => Geometry::Hyperbolic,
        std::cmp::Ordering::Equal => Geometry::Euclidean,
        std::cmp::Ordering::Greater => Geometry::Spherical,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Beta {
    Finite(Rat),
    Infinity,
}

impl Beta {
    /// Over `0`, `1` or `∞`, where the fibers are multiple.
    pub fn is_flagged(&self) -> bool {
        match self {
            Beta::Infinity => true,
            Beta::Finite(v) => v.is_zero() || v.is_one(),
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(v) => write!(f, "{v}"),
            Beta::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    pub beta: Beta,
}

pub fn beta(sig: &FermatSignature, x: &BigInt, z: &BigInt) -> Beta {
    if z.is_zero() {
        return Beta::Infinity;
    }
    let num = sig.a * num_traits::pow(x.clone(), sig.p as usize);
    let den = sig.c * num_traits::pow(z.clone(), sig.r as usize);
    Beta::Finite(Rat::new(num, den))
}

/// All solutions with `gcd(x, y, z) = 1` and `max(|x|, |y|, |z|) ≤ bound`,
/// ordered by `(x, y, z)`. Signs are not identified.
pub fn search(sig: &FermatSignature, bound: u64) -> Vec<Solution> {
    let b = bound as i64;
    let cb = BigInt::from(sig.c);
    let zmax = BigInt::from(bound);
    let mut out = Vec::new();
    for x in -b..=b {
        let x = BigInt::from(x);
        let ax = sig.a * num_traits::pow(x.clone(), sig.p as usize);
        for y in -b..=b {
            let y = BigInt::from(y);
            let rhs = &ax + sig.b * num_traits::pow(y.clone(), sig.q as usize);
            if !(&rhs % &cb).is_zero() {
                continue;
            }
            let w = rhs / &cb;
            let Some(root) = exact_root(&w, sig.r) else { continue };
            let zs = if sig.r % 2 == 0 && !root.is_zero() {
                vec![-root.clone(), root]
            } else {
                vec![root]
            };
            for z in zs {
                if z.abs() > zmax {
                    continue;
                }
                if !x.gcd(&y).gcd(&z).is_one() {
                    continue;
                }
                let beta = beta(sig, &x, &z);
                out.push(Solution {
                    x: x.clone(),
                    y: y.clone(),
                    z,
                    beta,
                });
            }
        }
    }
    out.sort_by(|s, t| (&s.x, &s.y, &s.z).cmp(&(&t.x, &t.y, &t.z)));
    out
}

/// The `G_m`-action `λ·(x, y, z) = (λ^{w1} x, λ^{w2} y, λ^{w3} z)` that
/// preserves the fibers of `β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberStructure {
    pub beta0: Rat,
    pub weights: (u64, u64, u64),
}

impl FiberStructure {
    pub fn act(&self, lambda: &BigInt, x: &BigInt, y: &BigInt, z: &BigInt) -> (BigInt, BigInt, BigInt) {
        act_with(self.weights, lambda, x, y, z)
    }
}

/// Weighted scaling with explicit weights.
pub fn act_with(
    w: (u64, u64, u64),
    lambda: &BigInt,
    x: &BigInt,
    y: &BigInt,
    z: &BigInt,
) -> (BigInt, BigInt, BigInt) {
    let pw = |e: u64| num_traits::pow(lambda.clone(), e as usize);
    (x * pw(w.0), y * pw(w.1), z * pw(w.2))
}

/// Weights `(qr, pr, pq)`: each term of the equation scales by
/// `λ^{pqr}` and `β` is invariant.
pub fn fiber_structure(sig: &FermatSignature, beta0: &Rat) -> Result<FiberStructure, FermatError> {
    if beta0.is_zero() || beta0.is_one() {
        return Err(FermatError::FlaggedFiber(beta0.to_string()));
    }
    let (p, q, r) = (sig.p as u64, sig.q as u64, sig.r as u64);
    Ok(FiberStructure {
        beta0: beta0.clone(),
        weights: (q * r, p * r, p * q),
    })
}
