//! Integer helpers: primes, factorization, exact roots.
//!
//! Factorization is trial division by primes below 10^6, then Pollard rho
//! (Brent variant) on the cofactor. Certificate denominators and
//! discriminants stay small, so the rho stage is rarely reached.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_ITERATION_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("cannot factor zero")]
    Zero,
    #[error("factorization budget exceeded on cofactor {0}")]
    BudgetExceeded(String),
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut budget = RHO_ITERATION_BUDGET;
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
            budget = budget.checked_sub(1)?;
        }
        if d != n {
            return Some(d);
        }
    }
    None
}

fn factor_u64(n: u64, out: &mut Vec<u64>) -> Result<(), FactorError> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    let d = rho_u64(n).ok_or_else(|| FactorError::BudgetExceeded(n.to_string()))?;
    factor_u64(d, out)?;
    factor_u64(n / d, out)
}

/// Prime factorization of `|n|` as sorted `(prime, exponent)` pairs.
pub fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    let mut m: BigUint = n.magnitude().clone();
    let mut found: Vec<u64> = Vec::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        while (&m % &pb).is_zero() {
            m /= &pb;
            found.push(p);
        }
    }
    if !m.is_one() {
        match m.to_u64() {
            Some(r) => factor_u64(r, &mut found)?,
            None => return Err(FactorError::BudgetExceeded(m.to_string())),
        }
    }
    found.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in found {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>, FactorError> {
    Ok(factor(n)?.into_iter().map(|(p, _)| p).collect())
}

/// Positive divisors of `|n|`, ascending.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>, FactorError> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// Exact `k`-th root of `n` if one exists in the integers.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 0 {
        return None;
    }
    if n.sign() == Sign::Minus {
        if k % 2 == 0 {
            return None;
        }
        return exact_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    factor(&BigInt::from(n))
        .map(|f| f.iter().all(|&(_, e)| e == 1))
        .unwrap_or(false)
}

/// Euler's totient for small `n`.
pub fn totient(n: u64) -> u64 {
    factor(&BigInt::from(n))
        .map(|f| {
            f.iter()
                .fold(n, |acc, &(p, _)| acc / p * (p - 1))
        })
        .unwrap_or(0)
}
