//! Fibers of a cover over rational points as exact algebraic data.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::FactorError;
use crate::cover::{fmt_point, parametrized_dependence, parametrized_fiber, CoverError, CoverSpec, Family, VarietyPresentation};
use crate::numfield::{MinPoly, NumFieldError};
use crate::poly::{MPoly, PolyError, QPoly, Rat};
use crate::primes::PrimeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    NumField(#[from] NumFieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("{0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A rational point of a presented variety, off its boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointQ {
    coords: Vec<Rat>,
}

impl PointQ {
    pub fn new(v: &VarietyPresentation, coords: Vec<Rat>) -> Result<Self, LiftError> {
        if !v.on_closure(&coords)? {
            return Err(LiftError::Domain(format!("{} does not satisfy J1", fmt_point(&coords))));
        }
        if v.on_boundary(&coords)? {
            return Err(LiftError::Domain(format!("{} lies on the boundary", fmt_point(&coords))));
        }
        Ok(PointQ { coords })
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }
}

impl std::fmt::Display for PointQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&fmt_point(&self.coords))
    }
}

/// Removes the primes of `S` from `n`.
fn strip_primes(mut n: BigInt, s: &PrimeSet) -> BigInt {
    for p in s.primes() {
        let pb = BigInt::from(p);
        while !n.is_zero() && (&n % &pb).is_zero() {
            n /= &pb;
        }
    }
    n
}

fn support_in(n: &BigInt, s: &PrimeSet) -> bool {
    let r = strip_primes(n.clone(), s);
    r == BigInt::one() || r == -BigInt::one()
}

fn rat_in(r: &Rat, s: &PrimeSet) -> bool {
    support_in(r.denom(), s)
}

/// Coordinates are `S`-integers and, at every prime outside `S`, the
/// reduction of the point avoids the boundary.
pub fn is_s_integral(v: &VarietyPresentation, p: &PointQ, s: &PrimeSet) -> bool {
    if !p.coords.iter().all(|c| rat_in(c, s)) {
        return false;
    }
    if v.j2().is_empty() {
        return true;
    }
    // all h(P) ≡ 0 mod p exactly when p divides every numerator
    let mut g = BigInt::zero();
    for h in v.j2() {
        match h.eval(&p.coords) {
            Ok(val) => g = num_integer::Integer::gcd(&g, val.numer()),
            Err(_) => return false,
        }
    }
    if g.is_zero() {
        return false;
    }
    support_in(&g, s)
}

/// One Galois orbit (or a union of orbits, when flagged) of points in a
/// fiber. `coordinates[i]` expresses source coordinate `i` as a polynomial
/// in the root of `minpoly.poly()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPoint {
    pub minpoly: MinPoly,
    pub coordinates: Vec<QPoly>,
    pub may_be_reducible: bool,
    /// Monic relation satisfied by the fiber coordinate over the point.
    pub dependence: QPoly,
}

impl LiftedPoint {
    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    /// Every polynomial vanishes at the coordinates modulo the minimal
    /// polynomial.
    pub fn satisfies(&self, polys: &[MPoly]) -> bool {
        polys
            .iter()
            .all(|f| f.eval_mod(&self.coordinates, self.minpoly.poly()).is_zero())
    }
}

/// Splits off rational roots; the cofactor is irreducible when it has
/// degree at most three.
fn split(f: &QPoly) -> Result<Vec<(QPoly, bool)>, LiftError> {
    let f = f.monic();
    let mut rest = f.clone();
    let mut out = Vec::new();
    for r in f.rational_roots()? {
        let lin = QPoly::new(vec![-r, Rat::one()]);
        rest = rest.divrem(&lin).0;
        out.push((lin, false));
    }
    if rest.degree() >= 1 {
        let flagged = rest.degree() >= 4;
        out.push((rest, flagged));
    }
    Ok(out)
}

/// Builds the lifted point for a factor `m(θ)` and coordinates in `θ`,
/// moving to the rescaled root `θ' = Lθ`.
fn make_lift(m: &QPoly, coords: &[QPoly], flagged: bool, dependence: &QPoly) -> Result<LiftedPoint, LiftError> {
    let mp = MinPoly::new(m)?;
    let l = Rat::from_integer(mp.scale().clone());
    let m = m.monic();
    let coordinates = coords
        .iter()
        .map(|c| {
            let c = c.rem(&m);
            let mut scaled = Vec::with_capacity(c.coeffs().len());
            let mut lk = Rat::one();
            for a in c.coeffs() {
                scaled.push(a / &lk);
                lk *= &l;
            }
            QPoly::new(scaled).rem(mp.poly())
        })
        .collect();
    Ok(LiftedPoint {
        minpoly: mp,
        coordinates,
        may_be_reducible: flagged,
        dependence: dependence.monic(),
    })
}

/// Source coordinates fixed by the map: `x_i` with `π_j = x_i`.
fn pinned_by_map(c: &CoverSpec, i: usize, p: &PointQ) -> Option<Rat> {
    let v = MPoly::var(c.source.ring(), i);
    c.map_pi.iter().position(|m| *m == v).map(|j| p.coords[j].clone())
}

fn other_coordinates(
    c: &CoverSpec,
    p: &PointQ,
    known: &[(usize, QPoly)],
) -> Result<Vec<QPoly>, LiftError> {
    (0..c.source.ring().nvars())
        .map(|i| {
            if let Some((_, q)) = known.iter().find(|(k, _)| *k == i) {
                return Ok(q.clone());
            }
            pinned_by_map(c, i, p).map(QPoly::constant).ok_or_else(|| {
                LiftError::Unsupported(format!(
                    "source coordinate `{}` is not determined over the target",
                    c.source.ring().var_name(i)
                ))
            })
        })
        .collect()
}

/// The fiber of `c` over `p`, split into rational points and the
/// remaining orbit.
pub fn lift_point(c: &CoverSpec, p: &PointQ) -> Result<Vec<LiftedPoint>, LiftError> {
    if !c.target.contains(p.coords())? {
        return Err(LiftError::Domain(format!("{p} is not a point of the target")));
    }
    match &c.family {
        Family::Kummer {
            n,
            root,
            inverse,
            radicand,
        } => {
            let u = radicand.eval(p.coords())?;
            if u.is_zero() {
                return Err(LiftError::Domain(format!("radicand vanishes at {p}")));
            }
            let f = QPoly::binomial(*n as usize, &u);
            let ring = c.source.ring();
            let mut known = vec![(ring.require(root)?, QPoly::x())];
            if let Some(inv) = inverse {
                // 1/θ = θ^{n-1}/u
                let e = QPoly::binomial(*n as usize - 1, &Rat::zero()).scale(&u.recip());
                known.push((ring.require(inv)?, e));
            }
            let coords = other_coordinates(c, p, &known)?;
            split(&f)?
                .into_iter()
                .map(|(m, fl)| make_lift(&m, &coords, fl, &f))
                .collect()
        }
        Family::PolynomialInY { var, .. } => {
            let f = c.fiber_polynomial()?.specialize(p.coords())?;
            let ring = c.source.ring();
            let coords = other_coordinates(c, p, &[(ring.require(var)?, QPoly::x())])?;
            split(&f)?
                .into_iter()
                .map(|(m, fl)| make_lift(&m, &coords, fl, &f))
                .collect()
        }
        Family::Parametrized if c.degree == 1 => {
            let fiber = parametrized_fiber(c, p.coords())?;
            let dep = match parametrized_dependence(c) {
                Some((j, q)) => q.sub(&QPoly::constant(p.coords[j].clone())),
                None => fiber.clone(),
            };
            split(&fiber)?
                .into_iter()
                .map(|(m, fl)| make_lift(&m, &[QPoly::x()], fl, &dep))
                .collect()
        }
        f => Err(LiftError::Unsupported(format!(
            "lifting along a degree-{} {} cover",
            c.degree,
            f.kind()
        ))),
    }
}

fn qpoly_in(q: &QPoly, s: &PrimeSet) -> bool {
    q.coeffs().iter().all(|c| rat_in(c, s))
}

/// Per lift: the minimal polynomial and dependence are monic with
/// `S`-integral coefficients and every coordinate is `S`-integral.
pub fn lift_integrality_report(
    c: &CoverSpec,
    p: &PointQ,
    s: &PrimeSet,
    lifts: &[LiftedPoint],
) -> Result<Vec<bool>, LiftError> {
    if !is_s_integral(&c.target, p, s) {
        return Err(LiftError::Precondition(format!("{p} is not S-integral for S = {s}")));
    }
    Ok(lifts
        .iter()
        .map(|l| {
            l.minpoly.poly().is_monic()
                && qpoly_in(l.minpoly.poly(), s)
                && l.dependence.is_monic()
                && qpoly_in(&l.dependence, s)
                && l.coordinates.iter().all(|q| qpoly_in(q, s))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::families::*;
    use crate::poly::{parse_poly, ratio, Ring};
    use proptest::prelude::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    fn gm_point(u: Rat) -> PointQ {
        let c = kummer_gm(2);
        PointQ::new(&c.target, vec![u.clone(), u.recip()]).unwrap()
    }

    #[test]
    fn s_integrality_on_torus() {
        let c = kummer_gm(2);
        let p = PointQ::new(&c.target, vec![r(3), ratio(1, 3)]).unwrap();
        assert!(is_s_integral(&c.target, &p, &PrimeSet::from_primes([3])));
        assert!(!is_s_integral(&c.target, &p, &PrimeSet::infinity()));
        assert!(PointQ::new(&c.target, vec![r(3), r(3)]).is_err());
    }

    #[test]
    fn s_integrality_off_origin() {
        let ring = Ring::new(&["x", "y", "z"]);
        let q = |s: &str| parse_poly(s, &ring).unwrap();
        let v = VarietyPresentation::new(&ring, vec![q("x^2 + y^3 - z^7")], vec![q("x"), q("y"), q("z")]).unwrap();
        let p = PointQ::new(&v, vec![r(1), r(0), r(1)]).unwrap();
        assert!(is_s_integral(&v, &p, &PrimeSet::infinity()));
        // (2^7, 0, 2^2) reduces to the origin mod 2
        let p2 = PointQ::new(&v, vec![r(128), r(0), r(4)]).unwrap();
        assert!(!is_s_integral(&v, &p2, &PrimeSet::infinity()));
        assert!(is_s_integral(&v, &p2, &PrimeSet::from_primes([2])));
        assert!(PointQ::new(&v, vec![r(0), r(0), r(0)]).is_err());
    }

    #[test]
    fn square_fiber_splits() {
        let c = kummer_gm(2);
        let lifts = lift_point(&c, &gm_point(r(4))).unwrap();
        assert_eq!(lifts.len(), 2);
        let roots: Vec<QPoly> = lifts.iter().map(|l| l.coordinates[0].clone()).collect();
        assert_eq!(roots, [QPoly::constant(r(-2)), QPoly::constant(r(2))]);
        for l in &lifts {
            assert_eq!(l.degree(), 1);
            assert!(l.satisfies(c.source.j1()));
        }
    }

    #[test]
    fn gaussian_fiber() {
        let c = kummer_gm(2);
        let lifts = lift_point(&c, &gm_point(r(-1))).unwrap();
        assert_eq!(lifts.len(), 1);
        assert_eq!(lifts[0].minpoly.poly(), &QPoly::from_ints(&[1, 0, 1]));
        assert!(!lifts[0].may_be_reducible);
        assert!(lifts[0].satisfies(c.source.j1()));
    }

    #[test]
    fn cusp_lift() {
        let c = cuspidal();
        let p = PointQ::new(&c.target, vec![r(4), r(8)]).unwrap();
        let lifts = lift_point(&c, &p).unwrap();
        assert_eq!(lifts.len(), 1);
        assert_eq!(lifts[0].coordinates[0], QPoly::constant(r(2)));
        assert_eq!(lifts[0].dependence, QPoly::from_ints(&[-4, 0, 1]));
        // t = y/x on the lift
        assert_eq!(r(8) / r(4), r(2));
        assert_eq!(lift_integrality_report(&c, &p, &PrimeSet::infinity(), &lifts).unwrap(), [true]);
    }

    #[test]
    fn integrality_reports() {
        let c = kummer_gm(2);
        let p = gm_point(r(2));
        let s = PrimeSet::from_primes([2]);
        let lifts = lift_point(&c, &p).unwrap();
        assert_eq!(lifts[0].minpoly.poly(), &QPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(lift_integrality_report(&c, &p, &s, &lifts).unwrap(), [true]);
        assert!(lift_integrality_report(&c, &p, &PrimeSet::infinity(), &lifts).is_err());

        let f = third_root_cover();
        let p = PointQ::new(&f.target, vec![r(1), r(1)]).unwrap();
        let lifts = lift_point(&f, &p).unwrap();
        assert_eq!(lifts.len(), 1);
        assert!(lifts[0].satisfies(f.source.j1()));
        assert_eq!(lift_integrality_report(&f, &p, &PrimeSet::infinity(), &lifts).unwrap(), [false]);
        assert_eq!(lift_integrality_report(&f, &p, &PrimeSet::from_primes([3]), &lifts).unwrap(), [true]);
    }

    #[test]
    fn unsupported_families() {
        let mut c = sqrt_gm();
        c.family = Family::Generic;
        let p = PointQ::new(&c.target, vec![r(1), r(1)]).unwrap();
        assert!(matches!(lift_point(&c, &p), Err(LiftError::Unsupported(_))));
    }

    #[test]
    fn quartic_remainder_flagged() {
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2) has no rational root
        let c = kummer_gm(4);
        let lifts = lift_point(&c, &PointQ::new(&c.target, vec![r(-4), ratio(-1, 4)]).unwrap()).unwrap();
        assert_eq!(lifts.len(), 1);
        assert!(lifts[0].may_be_reducible);
        assert!(lifts[0].satisfies(c.source.j1()));
    }

    proptest! {
        #[test]
        fn lifts_fill_the_fiber(n in 2u32..5, k in -20i64..20, neg: bool, three: bool) {
            let c = kummer_gm(n);
            let base = if three { 3 } else { 2 };
            let mut u = if k >= 0 {
                Rat::from_integer(BigInt::from(base).pow(k as u32))
            } else {
                Rat::new(BigInt::one(), BigInt::from(base).pow((-k) as u32))
            };
            if neg { u = -u; }
            let p = PointQ::new(&c.target, vec![u.clone(), u.recip()]).unwrap();
            let lifts = lift_point(&c, &p).unwrap();
            let total: usize = lifts.iter().map(|l| l.degree()).sum();
            prop_assert_eq!(total, n as usize);
            let s = PrimeSet::from_primes([base as u64]);
            for (l, ok) in lifts.iter().zip(lift_integrality_report(&c, &p, &s, &lifts).unwrap()) {
                prop_assert!(l.satisfies(c.source.j1()));
                prop_assert!(ok);
                prop_assert!(l.minpoly.poly().is_monic());
            }
        }

        #[test]
        fn square_root_cover_lifts(k in 1i64..40, neg: bool) {
            let c = sqrt_gm();
            let t = if neg { -Rat::from_integer(k.into()) } else { Rat::from_integer(k.into()) };
            let p = PointQ::new(&c.target, vec![t.clone(), t.recip()]).unwrap();
            let lifts = lift_point(&c, &p).unwrap();
            prop_assert_eq!(lifts.iter().map(|l| l.degree()).sum::<usize>(), 2);
            for l in &lifts {
                prop_assert!(l.satisfies(c.source.j1()));
            }
        }
    }
}
