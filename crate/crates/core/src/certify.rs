//! Nullstellensatz certificates `h_i^N = Σ_j a_ij f_j` found by
//! degree-bounded exact linear algebra, and the primes they force into `S`.
//!
//! For fixed `N` and a degree bound `D` on the cofactors `a_ij`, the
//! identity is linear in the unknown coefficients of the `a_ij`. The search
//! deepens `N` first-class and `D` second-class, so the certificate with the
//! lowest exponent wins; within one `N`, each target uses its own minimal
//! `D`. The system is solved by sparse Gauss–Jordan elimination over `Q`
//! with free variables set to zero, which makes the output canonical.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, FactorError};
use crate::poly::fp::{mul_mod, reduce_rat};
use crate::poly::{MPoly, Mono, PolyError, Rat, Ring};

pub use crate::primes::PrimeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("bounds must be at least 1 (max_n = {max_n})")]
    InvalidBounds { max_n: u32 },
    #[error("p = {0} divides a certificate denominator")]
    PrimeInDenominators(u64),
}

/// Ideal given by generators in a fixed ring. Zero generators are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    ring: Ring,
    generators: Vec<MPoly>,
}

impl Ideal {
    pub fn new(ring: &Ring, generators: Vec<MPoly>) -> Result<Self, CertifyError> {
        for g in &generators {
            ring.check(g.ring())?;
        }
        Ok(Ideal {
            ring: ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[MPoly] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The sum of two ideals, generators concatenated.
    pub fn sum(&self, other: &Ideal) -> Result<Ideal, CertifyError> {
        let mut g = self.generators.clone();
        g.extend(other.generators.iter().cloned());
        Ideal::new(&self.ring, g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_n: u32,
    pub max_aux_degree: u32,
    /// Restrict each `a_ij` to be homogeneous of degree
    /// `N·deg(h_i) − deg(f_j)`.
    pub homogeneous: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_n: 4,
            max_aux_degree: 8,
            homogeneous: false,
        }
    }
}

impl Bounds {
    pub fn new(max_n: u32, max_aux_degree: u32) -> Self {
        Bounds {
            max_n,
            max_aux_degree,
            homogeneous: false,
        }
    }
}

/// Witness of `targets[i]^exponent = Σ_j coefficients[i][j] · generators[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub ring: Ring,
    pub targets: Vec<MPoly>,
    pub generators: Vec<MPoly>,
    pub exponent: u32,
    pub coefficients: Vec<Vec<MPoly>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateSearch {
    Found(Certificate),
    /// Inconclusive: membership may still hold at higher degree.
    NotFound { max_n: u32, max_aux_degree: u32 },
}

impl CertificateSearch {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertificateSearch::Found(c) => Some(c),
            CertificateSearch::NotFound { .. } => None,
        }
    }
}

pub fn find_certificate(
    targets: &[MPoly],
    ideal: &Ideal,
    bounds: &Bounds,
) -> Result<CertificateSearch, CertifyError> {
    if bounds.max_n == 0 {
        return Err(CertifyError::InvalidBounds {
            max_n: bounds.max_n,
        });
    }
    for t in targets {
        ideal.ring.check(t.ring())?;
    }
    'exponent: for n in 1..=bounds.max_n {
        let mut rows = Vec::with_capacity(targets.len());
        for h in targets {
            let rhs = h.pow(n);
            let found = if bounds.homogeneous {
                solve_homogeneous(&rhs, h, n, ideal)
            } else {
                (0..=bounds.max_aux_degree).find_map(|d| solve_bounded(&rhs, ideal, d))
            };
            match found {
                Some(a) => rows.push(a),
                None => continue 'exponent,
            }
        }
        let cert = Certificate {
            ring: ideal.ring.clone(),
            targets: targets.to_vec(),
            generators: ideal.generators.clone(),
            exponent: n,
            coefficients: rows,
        };
        debug_assert!(check_certificate(&cert));
        return Ok(CertificateSearch::Found(cert));
    }
    Ok(CertificateSearch::NotFound {
        max_n: bounds.max_n,
        max_aux_degree: bounds.max_aux_degree,
    })
}

fn solve_bounded(rhs: &MPoly, ideal: &Ideal, d: u32) -> Option<Vec<MPoly>> {
    let monos = Mono::up_to_degree(ideal.ring.nvars(), d);
    let supports: Vec<Vec<Mono>> = ideal.generators.iter().map(|_| monos.clone()).collect();
    solve_with_supports(rhs, ideal, &supports)
}

fn solve_homogeneous(rhs: &MPoly, h: &MPoly, n: u32, ideal: &Ideal) -> Option<Vec<MPoly>> {
    let target_deg = n as i64 * h.total_degree();
    let supports: Vec<Vec<Mono>> = ideal
        .generators
        .iter()
        .map(|f| {
            let d = target_deg - f.total_degree();
            if d < 0 {
                Vec::new()
            } else {
                Mono::of_degree(ideal.ring.nvars(), d as u32)
            }
        })
        .collect();
    solve_with_supports(rhs, ideal, &supports)
}

/// Solves `Σ_j a_j f_j = rhs` with `a_j` supported on `supports[j]`.
fn solve_with_supports(rhs: &MPoly, ideal: &Ideal, supports: &[Vec<Mono>]) -> Option<Vec<MPoly>> {
    let mut row_of: HashMap<Mono, usize> = HashMap::new();
    let mut columns: Vec<(usize, Mono)> = Vec::new();
    let mut entries: Vec<Vec<(usize, Rat)>> = Vec::new();
    for (j, f) in ideal.generators.iter().enumerate() {
        for m in &supports[j] {
            let col = columns.len();
            columns.push((j, m.clone()));
            let _ = col;
            let mut colvec = Vec::with_capacity(f.num_terms());
            for (fm, c) in f.terms() {
                let prod = fm.mul(m);
                let next = row_of.len();
                let r = *row_of.entry(prod).or_insert(next);
                colvec.push((r, c.clone()));
            }
            entries.push(colvec);
        }
    }
    let mut b_entries: Vec<(usize, Rat)> = Vec::new();
    for (m, c) in rhs.terms() {
        match row_of.get(m) {
            Some(&r) => b_entries.push((r, c.clone())),
            // a monomial outside every product: no solution at this degree
            None => return None,
        }
    }
    let nrows = row_of.len();
    let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); nrows];
    for (col, colvec) in entries.into_iter().enumerate() {
        for (r, c) in colvec {
            let e = rows[r].entry(col).or_insert_with(Rat::zero);
            *e += c;
        }
    }
    for row in rows.iter_mut() {
        row.retain(|_, v| !v.is_zero());
    }
    let mut b = vec![Rat::zero(); nrows];
    for (r, c) in b_entries {
        b[r] += c;
    }
    let x = gauss_jordan(rows, b, columns.len())?;
    let mut out: Vec<MPoly> = ideal
        .generators
        .iter()
        .map(|_| MPoly::zero(&ideal.ring))
        .collect();
    let mut acc: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); out.len()];
    for (col, v) in x.into_iter().enumerate() {
        if !v.is_zero() {
            let (j, m) = &columns[col];
            acc[*j].push((m.clone(), v));
        }
    }
    for (j, terms) in acc.into_iter().enumerate() {
        out[j] = MPoly::from_terms(&ideal.ring, terms);
    }
    Some(out)
}

/// Gauss–Jordan elimination on sparse rows; pivots are chosen per column
/// as the entry with the largest absolute numerator. Returns the solution
/// with every free variable set to zero, or `None` if inconsistent.
fn gauss_jordan(mut rows: Vec<BTreeMap<usize, Rat>>, mut b: Vec<Rat>, ncols: usize) -> Option<Vec<Rat>> {
    let nrows = rows.len();
    let mut is_pivot_row = vec![false; nrows];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..ncols {
        let mut best: Option<(usize, BigInt)> = None;
        for (r, row) in rows.iter().enumerate() {
            if is_pivot_row[r] {
                continue;
            }
            if let Some(v) = row.get(&col) {
                let mag = v.numer().abs();
                if best.as_ref().is_none_or(|(_, m)| mag > *m) {
                    best = Some((r, mag));
                }
            }
        }
        let Some((pr, _)) = best else { continue };
        let inv = rows[pr][&col].recip();
        let prow: BTreeMap<usize, Rat> = rows[pr].iter().map(|(&c, v)| (c, v * &inv)).collect();
        let pb = &b[pr] * &inv;
        for r in 0..nrows {
            if r == pr {
                continue;
            }
            let Some(factor) = rows[r].get(&col).cloned() else {
                continue;
            };
            let row = &mut rows[r];
            for (&c, v) in &prow {
                let e = row.entry(c).or_insert_with(Rat::zero);
                *e -= &factor * v;
                if e.is_zero() {
                    row.remove(&c);
                }
            }
            b[r] = &b[r] - &factor * &pb;
        }
        rows[pr] = prow;
        b[pr] = pb;
        is_pivot_row[pr] = true;
        pivots.push((col, pr));
    }
    for r in 0..nrows {
        if !is_pivot_row[r] && !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); ncols];
    for (col, r) in pivots {
        x[col] = b[r].clone();
    }
    Some(x)
}

/// Re-expands every identity exactly.
pub fn check_certificate(c: &Certificate) -> bool {
    if c.coefficients.len() != c.targets.len() {
        return false;
    }
    c.targets.iter().zip(&c.coefficients).all(|(h, row)| {
        if row.len() != c.generators.len() {
            return false;
        }
        let mut sum = MPoly::zero(&c.ring);
        for (a, f) in row.iter().zip(&c.generators) {
            match a.checked_mul(f).and_then(|t| sum.checked_add(&t)) {
                Ok(s) => sum = s,
                Err(_) => return false,
            }
        }
        sum == h.pow(c.exponent)
    })
}

/// Primes dividing some coefficient denominator of some `a_ij`, plus `∞`.
pub fn denominator_primes(c: &Certificate) -> Result<PrimeSet, CertifyError> {
    let mut s = PrimeSet::infinity();
    for row in &c.coefficients {
        for a in row {
            let l = a.denominator_lcm();
            Extend::extend(&mut s, arith::prime_divisors(&l)?);
        }
    }
    Ok(s)
}

/// Sparse polynomial over `F_p`.
type FpTerms = HashMap<Mono, u64>;

fn reduce_poly(f: &MPoly, p: u64) -> Option<FpTerms> {
    let mut out = HashMap::new();
    for (m, c) in f.terms() {
        let v = reduce_rat(c, p)?;
        if v != 0 {
            out.insert(m.clone(), v);
        }
    }
    Some(out)
}

fn fp_mul(a: &FpTerms, b: &FpTerms, p: u64) -> FpTerms {
    let mut out: FpTerms = HashMap::new();
    for (m1, c1) in a {
        for (m2, c2) in b {
            let e = out.entry(m1.mul(m2)).or_insert(0);
            *e = (*e + mul_mod(*c1, *c2, p)) % p;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn fp_add_into(acc: &mut FpTerms, a: &FpTerms, p: u64) {
    for (m, c) in a {
        let e = acc.entry(m.clone()).or_insert(0);
        *e = (*e + c) % p;
    }
    acc.retain(|_, v| *v != 0);
}

/// Checks the certificate identities after reducing every coefficient
/// modulo `p`. Errors if `p` divides any denominator involved.
pub fn reduce_certificate_mod_p(c: &Certificate, p: u64) -> Result<bool, CertifyError> {
    if !arith::is_prime(p) {
        return Err(PolyError::Domain(format!("{p} is not prime")).into());
    }
    let bad = CertifyError::PrimeInDenominators(p);
    let gens: Option<Vec<FpTerms>> = c.generators.iter().map(|f| reduce_poly(f, p)).collect();
    let gens = gens.ok_or(bad.clone())?;
    for (h, row) in c.targets.iter().zip(&c.coefficients) {
        let hb = reduce_poly(h, p).ok_or(bad.clone())?;
        let mut lhs: FpTerms = HashMap::new();
        lhs.insert(Mono::one(c.ring.nvars()), 1);
        for _ in 0..c.exponent {
            lhs = fp_mul(&lhs, &hb, p);
        }
        let mut rhs: FpTerms = HashMap::new();
        for (a, f) in row.iter().zip(&gens) {
            let ab = reduce_poly(a, p).ok_or(bad.clone())?;
            fp_add_into(&mut rhs, &fp_mul(&ab, f, p), p);
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, ratio};
    use proptest::prelude::*;

    fn ring_ts() -> Ring {
        Ring::new(&["t", "s"])
    }

    fn p(s: &str) -> MPoly {
        parse_poly(s, &ring_ts()).unwrap()
    }

    fn ideal(gens: &[&str]) -> Ideal {
        Ideal::new(&ring_ts(), gens.iter().map(|g| p(g)).collect()).unwrap()
    }

    fn found(targets: &[&str], gens: &[&str]) -> Certificate {
        let t: Vec<MPoly> = targets.iter().map(|s| p(s)).collect();
        match find_certificate(&t, &ideal(gens), &Bounds::default()).unwrap() {
            CertificateSearch::Found(c) => c,
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn generator_as_target() {
        let c = found(&["t*s - 1"], &["t*s - 1", "t^2"]);
        assert_eq!(c.exponent, 1);
        assert_eq!(c.coefficients[0], vec![p("1"), p("0")]);
    }

    #[test]
    fn one_unknown_solve_has_denominator_two() {
        let c = found(&["t"], &["2*t"]);
        assert_eq!(c.exponent, 1);
        assert_eq!(c.coefficients[0], vec![MPoly::constant(&ring_ts(), ratio(1, 2))]);
        assert_eq!(denominator_primes(&c).unwrap(), PrimeSet::from_primes([2]));
    }

    #[test]
    fn hyperbola_fixed_locus() {
        // 1 = -(ts - 1) + (s/2)(2t)
        let c = found(&["1"], &["t*s - 1", "2*t"]);
        assert_eq!(c.exponent, 1);
        assert_eq!(c.coefficients[0], vec![p("-1"), p("s/2")]);
        assert!(check_certificate(&c));
        let mut bad = c.clone();
        bad.coefficients[0][0] = &bad.coefficients[0][0] + &p("1");
        assert!(!check_certificate(&bad));
    }

    #[test]
    fn radical_membership_needs_exponent_two() {
        // t^2 ∈ (t^2) but t ∉ (t^2): N = 2
        let c = found(&["t"], &["t^2"]);
        assert_eq!(c.exponent, 2);
    }

    #[test]
    fn not_found_is_inconclusive() {
        let t = vec![p("1")];
        let r = find_certificate(&t, &ideal(&["t"]), &Bounds::new(2, 3)).unwrap();
        assert_eq!(
            r,
            CertificateSearch::NotFound {
                max_n: 2,
                max_aux_degree: 3
            }
        );
        assert!(find_certificate(&t, &ideal(&["t"]), &Bounds::new(0, 3)).is_err());
    }

    #[test]
    fn ring_mismatch_rejected() {
        let other = parse_poly("x", &Ring::new(&["x"])).unwrap();
        assert!(find_certificate(&[other], &ideal(&["t"]), &Bounds::default()).is_err());
    }

    #[test]
    fn denominators_six_and_ten() {
        let r = ring_ts();
        let c = Certificate {
            ring: r.clone(),
            targets: vec![p("1")],
            generators: vec![p("6"), p("10")],
            exponent: 1,
            coefficients: vec![vec![
                MPoly::constant(&r, ratio(1, 12)),
                MPoly::constant(&r, ratio(1, 20)),
            ]],
        };
        assert!(check_certificate(&c));
        assert_eq!(
            denominator_primes(&c).unwrap(),
            PrimeSet::from_primes([2, 3, 5])
        );
    }

    #[test]
    fn integral_certificate_has_only_infinity() {
        let c = found(&["t*s"], &["t*s - 1", "t"]);
        assert_eq!(denominator_primes(&c).unwrap(), PrimeSet::infinity());
        for q in [2, 3, 5, 7] {
            assert!(reduce_certificate_mod_p(&c, q).unwrap());
        }
    }

    #[test]
    fn reduction_mod_primes() {
        let c = found(&["1"], &["t*s - 1", "2*t"]);
        assert!(reduce_certificate_mod_p(&c, 3).unwrap());
        assert!(reduce_certificate_mod_p(&c, 5).unwrap());
        assert_eq!(
            reduce_certificate_mod_p(&c, 2),
            Err(CertifyError::PrimeInDenominators(2))
        );
    }

    #[test]
    fn homogeneous_mode_degrees() {
        let r = Ring::new(&["x", "y"]);
        let q = |s: &str| parse_poly(s, &r).unwrap();
        let id = Ideal::new(&r, vec![q("x^2"), q("y^2")]).unwrap();
        let b = Bounds {
            homogeneous: true,
            ..Bounds::default()
        };
        let CertificateSearch::Found(c) = find_certificate(&[q("x"), q("y")], &id, &b).unwrap()
        else {
            panic!()
        };
        assert_eq!(c.exponent, 2);
        for (h, row) in c.targets.iter().zip(&c.coefficients) {
            for (a, f) in row.iter().zip(&c.generators) {
                let hom = a.homogeneity();
                assert!(hom.is_zero || hom.degree == 2 * h.total_degree() - f.total_degree());
            }
        }
    }

    // Independent oracles for small instances in two variables.

    fn lin(c: (i64, i64, i64)) -> String {
        format!("({}) + ({})*t + ({})*s", c.0, c.1, c.2)
    }

    fn grid_combination_exists(h: &MPoly, f: &[MPoly]) -> bool {
        // a_j ∈ span{1, t, s} with coefficients in {-1, 0, 1}
        let vals = [-1i64, 0, 1];
        let basis = [p("1"), p("t"), p("s")];
        let mut combos = Vec::new();
        for a in vals {
            for b in vals {
                for c in vals {
                    let q = &(&basis[0].scale(&Rat::from_integer(a.into()))
                        + &basis[1].scale(&Rat::from_integer(b.into())))
                        + &basis[2].scale(&Rat::from_integer(c.into()));
                    combos.push(q);
                }
            }
        }
        for a1 in &combos {
            for a2 in &combos {
                if &(a1 * &f[0]) + &(a2 * &f[1]) == *h {
                    return true;
                }
            }
        }
        false
    }

    fn nonvanishing_common_zero(h: &MPoly, f: &[MPoly]) -> bool {
        for x in -5i64..=5 {
            for y in -5i64..=5 {
                let pt = [Rat::from_integer(x.into()), Rat::from_integer(y.into())];
                if f.iter().all(|g| g.eval(&pt).unwrap().is_zero()) && !h.eval(&pt).unwrap().is_zero() {
                    return true;
                }
            }
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn agrees_with_grid_and_point_oracles(
            a in -2i64..=2, b in -2i64..=2,
            l1 in (-2i64..=2, -2i64..=2, -2i64..=2),
            l2 in (-2i64..=2, -2i64..=2, -2i64..=2),
            c1 in (-1i64..=1, -1i64..=1, -1i64..=1),
            c2 in (-1i64..=1, -1i64..=1, -1i64..=1),
            noise in -3i64..=3,
        ) {
            // generators share the rational zero (a, b)
            let f1 = &p(&format!("t - ({a})")) * &p(&lin(l1));
            let f2 = &p(&format!("s - ({b})")) * &p(&lin(l2));
            prop_assume!(!f1.is_zero() && !f2.is_zero());
            let f = vec![f1, f2];
            let h = &(&(&p(&lin(c1)) * &f[0]) + &(&p(&lin(c2)) * &f[1]))
                + &MPoly::from_int(&ring_ts(), noise);
            let id = Ideal::new(&ring_ts(), f.clone()).unwrap();
            let res = find_certificate(&[h.clone()], &id, &Bounds::new(3, 4)).unwrap();
            if let Some(cert) = res.certificate() {
                prop_assert!(check_certificate(cert));
            }
            if grid_combination_exists(&h, &f) {
                prop_assert!(res.certificate().is_some());
            }
            if nonvanishing_common_zero(&h, &f) {
                prop_assert!(res.certificate().is_none());
            }
            if noise == 0 {
                prop_assert!(res.certificate().is_some());
            }
        }

        #[test]
        fn reduction_stable_outside_denominators(
            k in 1i64..12, pi in 0usize..8,
        ) {
            let c = found(&["1"], &["t*s - 1", &format!("{k}*t")]);
            let q = [2u64, 3, 5, 7, 11, 13, 17, 19][pi];
            let den = denominator_primes(&c).unwrap();
            if den.contains(q) {
                prop_assert!(reduce_certificate_mod_p(&c, q).is_err());
            } else {
                prop_assert!(reduce_certificate_mod_p(&c, q).unwrap());
            }
        }
    }
}
