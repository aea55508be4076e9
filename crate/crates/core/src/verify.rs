//! End-to-end checks: lifts of `S`-integral points are `S`-integral and
//! generate fields unramified outside `S`.

use num_bigint::BigInt;
use num_integer::Roots;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::cover::{fmt_point, CoverCertification, CoverSpec, Verdict, VarietyPresentation};
use crate::lift::{is_s_integral, lift_integrality_report, lift_point, LiftError, PointQ};
use crate::numfield::{poly_discriminant_primes, ramification_verdict, NumFieldError, RamVerdict};
use crate::poly::gf::GaloisField;
use crate::poly::PolyError;
use crate::primes::PrimeSet;
use crate::poly::Rat;
use crate::sample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    NumField(#[from] NumFieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RamifiedOutsideS { point: String, lift: usize, prime: u64 },
    NotIntegral { point: String, lift: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Undetermined {
    pub point: String,
    pub lift: usize,
    pub prime: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LiftSummary {
    pub minpoly: String,
    pub degree: usize,
    pub may_be_reducible: bool,
    pub integral: bool,
    /// Primes outside `S` that were tested.
    pub primes_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointResult {
    pub point: String,
    pub lifts: Vec<LiftSummary>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub points: usize,
    pub passed: usize,
    pub results: Vec<PointResult>,
    pub violations: Vec<Violation>,
    pub undetermined: Vec<Undetermined>,
    /// Points skipped because they are not `S`-integral.
    pub rejected: Vec<String>,
}

impl VerifyReport {
    /// Combines two reports; the result does not depend on the order.
    pub fn merge(mut self, other: VerifyReport) -> VerifyReport {
        self.points += other.points;
        self.passed += other.passed;
        self.results.extend(other.results);
        self.violations.extend(other.violations);
        self.undetermined.extend(other.undetermined);
        self.rejected.extend(other.rejected);
        self.results.sort();
        self.violations.sort();
        self.undetermined.sort();
        self.rejected.sort();
        self
    }
}

/// Primes at which a lift's field is tested: all `p ≤ budget` and every
/// candidate from the discriminant, minus `S`.
fn primes_to_test(disc: &PrimeSet, s: &PrimeSet, budget: u64) -> Vec<u64> {
    let mut ps: Vec<u64> = arith::primes_up_to(budget);
    ps.extend(disc.primes());
    ps.sort_unstable();
    ps.dedup();
    ps.retain(|&p| !s.contains(p));
    ps
}

fn verify_point(c: &CoverSpec, s: &PrimeSet, p: &PointQ, budget: u64) -> Result<VerifyReport, VerifyError> {
    let name = p.to_string();
    let mut rep = VerifyReport {
        points: 1,
        ..Default::default()
    };
    if !is_s_integral(&c.target, p, s) {
        rep.rejected.push(name);
        return Ok(rep);
    }
    let lifts = lift_point(c, p)?;
    let integral = lift_integrality_report(c, p, s, &lifts)?;
    let mut summaries = Vec::new();
    for (i, (l, ok)) in lifts.iter().zip(integral).enumerate() {
        if !ok {
            rep.violations.push(Violation::NotIntegral {
                point: name.clone(),
                lift: i,
            });
        }
        let disc = poly_discriminant_primes(&l.minpoly)?;
        let ps = primes_to_test(&disc, s, budget);
        for &q in &ps {
            match ramification_verdict(&l.minpoly, q) {
                RamVerdict::Unramified => {}
                RamVerdict::Ramified => rep.violations.push(Violation::RamifiedOutsideS {
                    point: name.clone(),
                    lift: i,
                    prime: q,
                }),
                RamVerdict::Undetermined(reason) => rep.undetermined.push(Undetermined {
                    point: name.clone(),
                    lift: i,
                    prime: q,
                    reason,
                }),
            }
        }
        summaries.push(LiftSummary {
            minpoly: l.minpoly.poly().format_in("x"),
            degree: l.degree(),
            may_be_reducible: l.may_be_reducible,
            integral: ok,
            primes_checked: ps.len(),
        });
    }
    let passed = rep.violations.is_empty();
    if passed {
        rep.passed = 1;
    }
    rep.results.push(PointResult {
        point: name,
        lifts: summaries,
        passed,
    });
    Ok(rep)
}

/// Lifts every point, checks integrality of the lifts and tests each
/// residue field for ramification at primes outside `S`.
pub fn verify_cw(
    c: &CoverSpec,
    cert: &CoverCertification,
    s: &PrimeSet,
    points: &[PointQ],
    prime_budget: u64,
) -> Result<VerifyReport, VerifyError> {
    if cert.verdict != Verdict::IsCover {
        return Err(VerifyError::Precondition("cover is not certified".into()));
    }
    let mut rep = VerifyReport::default();
    for p in points {
        rep = rep.merge(verify_point(c, s, p, prime_budget)?);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspReport {
    pub bound: u64,
    pub points: Vec<(i64, i64)>,
    pub all_divide: bool,
    pub matches_parametrization: bool,
}

/// All integer points of `y² = x³` with `|x| ≤ bound`, the divisibility
/// `x | y` on each, and agreement with `{(t², ±t³)}`.
pub fn cusp_divisibility_check(bound: u64) -> CuspReport {
    let b = bound as i64;
    let mut points = Vec::new();
    for x in -b..=b {
        let c = (x as i128).pow(3);
        if c < 0 {
            continue;
        }
        let y = c.sqrt();
        if y * y == c {
            points.push((x, y as i64));
            if y != 0 {
                points.push((x, -(y as i64)));
            }
        }
    }
    points.sort();
    let all_divide = points
        .iter()
        .all(|&(x, y)| if x == 0 { y == 0 } else { y % x == 0 });
    let mut expected = Vec::new();
    let mut t: i64 = 0;
    while t * t <= b {
        expected.push((t * t, t * t * t));
        if t != 0 {
            expected.push((t * t, -t * t * t));
        }
        t += 1;
    }
    expected.sort();
    CuspReport {
        bound,
        matches_parametrization: expected == points,
        points,
        all_divide,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub prime: u64,
    pub field_degree: usize,
    pub points_checked: usize,
    pub violations: Vec<String>,
}

/// Largest finite field searched when looking for reduced sample points.
const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Samples points of the reduction of `W` modulo `p` (over the smallest
/// extension of `F_p` with enough of them) and checks that no non-identity
/// element fixes any of them.
pub fn reduction_fixed_point_check(
    c: &CoverSpec,
    s: &PrimeSet,
    p: u64,
    want: usize,
) -> Result<ReductionReport, VerifyError> {
    if s.contains(p) {
        return Err(VerifyError::Precondition(format!("p = {p} lies in S")));
    }
    if !arith::is_prime(p) {
        return Err(VerifyError::Precondition(format!("{p} is not prime")));
    }
    let Some(action) = &c.action else {
        return Err(VerifyError::Precondition("cover has no group action".into()));
    };
    let n = c.source.ring().nvars();
    let mut degree = 1;
    loop {
        let field = GaloisField::new(p, degree)?;
        let off_boundary = |pt: &[_]| {
            c.source.j2().is_empty()
                || c.source
                    .j2()
                    .iter()
                    .any(|h| field.eval(h, pt).is_some_and(|v| !field.is_zero(&v)))
        };
        let pts = sample::field_points(&field, n, c.source.j1(), off_boundary, want);
        if pts.len() >= want || field.size().saturating_mul(p) > MAX_FIELD_SIZE {
            let mut violations = Vec::new();
            for pt in &pts {
                for g in action.non_identity() {
                    let img: Option<Vec<_>> = g.images.iter().map(|f| field.eval(f, pt)).collect();
                    let Some(img) = img else {
                        return Err(VerifyError::Precondition(format!(
                            "`{}` is not {p}-integral",
                            g.name
                        )));
                    };
                    if &img == pt {
                        let shown: Vec<String> = pt.iter().map(|x| field.format(x)).collect();
                        violations.push(format!("`{}` fixes ({}) over F_{}^{degree}", g.name, shown.join(", "), p));
                    }
                }
            }
            return Ok(ReductionReport {
                prime: p,
                field_degree: degree,
                points_checked: pts.len(),
                violations,
            });
        }
        degree += 1;
    }
}

/// Up to `want` `S`-integral rational points of `V`, free coordinates
/// running over `S`-units and small `S`-integers by increasing height.
pub fn sample_s_integral_points(v: &VarietyPresentation, s: &PrimeSet, want: usize) -> Vec<PointQ> {
    let finite: Vec<u64> = s.primes().collect();
    let budget = (4 * want).max(64);
    let mut free: Vec<Rat> = sample::rational_sequence()
        .take(512)
        .filter(|r| arith::prime_divisors(r.denom()).is_ok_and(|ps| ps.iter().all(|p| s.contains(*p))))
        .collect();
    let mut bound = BigInt::from(16);
    loop {
        let units = sample::s_units(&finite, &bound);
        let enough = units.len() >= budget || finite.is_empty() || bound.bits() > 64;
        if enough {
            free.extend(units);
            break;
        }
        bound *= 16;
    }
    free.sort_by(|a, b| {
        sample::height_product(a)
            .cmp(&sample::height_product(b))
            .then_with(|| a.cmp(b))
    });
    free.dedup();
    free.truncate(budget);
    sample::rational_points_over(
        v.ring(),
        v.j1(),
        |c| PointQ::new(v, c.to_vec()).is_ok_and(|p| is_s_integral(v, &p, s)),
        want,
        free,
    )
    .into_iter()
    .filter_map(|c| PointQ::new(v, c).ok())
    .collect()
}

/// Formats a list of points for reports.
pub fn format_points(points: &[PointQ]) -> Vec<String> {
    points.iter().map(|p| fmt_point(p.coords())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Bounds;
    use crate::cover::families::*;
    use crate::cover::{bad_primes, certify_cover};
    use crate::numfield::quadratic_oracle;
    use crate::poly::Rat;
    use num_bigint::BigInt;

    fn r(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    fn gm_points(c: &CoverSpec, us: &[Rat]) -> Vec<PointQ> {
        us.iter()
            .map(|u| PointQ::new(&c.target, vec![u.clone(), u.recip()]).unwrap())
            .collect()
    }

    #[test]
    fn kummer_two_units_pass() {
        let c = kummer_gm(2);
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        let s = bad_primes(&c, &cert).unwrap();
        let us: Vec<Rat> = [1, -1, 2, -2, 4, -4].iter().map(|&k| r(k)).collect();
        let rep = verify_cw(&c, &cert, &s, &gm_points(&c, &us), 50).unwrap();
        assert_eq!(rep.points, 6);
        assert_eq!(rep.passed, 6);
        assert!(rep.violations.is_empty());
        for u in [-1i64, 2, -2] {
            for p in arith::primes_up_to(50) {
                if !s.contains(p) {
                    assert_eq!(quadratic_oracle(u, p).unwrap(), RamVerdict::Unramified);
                }
            }
        }
    }

    #[test]
    fn forced_small_s_reports_ramification_at_two() {
        let c = kummer_gm(2);
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        let rep = verify_cw(&c, &cert, &PrimeSet::infinity(), &gm_points(&c, &[r(-1)]), 50).unwrap();
        assert_eq!(
            rep.violations,
            [Violation::RamifiedOutsideS {
                point: "(-1, -1)".into(),
                lift: 0,
                prime: 2
            }]
        );
        assert_eq!(quadratic_oracle(-1, 2).unwrap(), RamVerdict::Ramified);
    }

    #[test]
    fn cusp_degree_one_passes() {
        let c = cuspidal();
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        let s = bad_primes(&c, &cert).unwrap();
        let pts: Vec<PointQ> = (-5i64..=5)
            .map(|t| PointQ::new(&c.target, vec![r(t * t), r(t * t * t)]).unwrap())
            .collect();
        let rep = verify_cw(&c, &cert, &s, &pts, 30).unwrap();
        assert_eq!(rep.passed, 11);
        assert!(rep.results.iter().all(|p| p.lifts.iter().all(|l| l.degree == 1 && l.integral)));
    }

    #[test]
    fn uncertified_cover_refused() {
        let c = nodal();
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        assert!(verify_cw(&c, &cert, &PrimeSet::infinity(), &[], 10).is_err());
    }

    #[test]
    fn non_integral_points_rejected() {
        let c = kummer_gm(2);
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        let rep = verify_cw(&c, &cert, &PrimeSet::from_primes([2]), &gm_points(&c, &[r(3)]), 10).unwrap();
        assert_eq!(rep.rejected, ["(3, 1/3)"]);
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn cusp_bound_ten() {
        let rep = cusp_divisibility_check(10);
        assert_eq!(rep.points, [(0, 0), (1, -1), (1, 1), (4, -8), (4, 8), (9, -27), (9, 27)]);
        assert!(rep.all_divide && rep.matches_parametrization);
    }

    #[test]
    fn reduction_check_on_torus() {
        let c = certify_cover(&kummer_gm(2), &Bounds::default()).unwrap().closure;
        let s = PrimeSet::from_primes([2]);
        for p in [3u64, 5, 7, 11] {
            let rep = reduction_fixed_point_check(&c, &s, p, 20).unwrap();
            assert!(rep.points_checked >= 20, "p={p}");
            assert!(rep.violations.is_empty());
        }
        assert!(reduction_fixed_point_check(&c, &s, 2, 20).is_err());
    }

    #[test]
    fn reduction_check_detects_fixed_points_in_bad_characteristic() {
        // at p = 2 the sign change is the identity
        let c = certify_cover(&kummer_gm(2), &Bounds::default()).unwrap().closure;
        let rep = reduction_fixed_point_check(&c, &PrimeSet::infinity(), 2, 5).unwrap();
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn merge_is_order_independent() {
        let c = kummer_gm(2);
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        let pts = gm_points(&c, &[r(-1), r(2), r(-2)]);
        let s = PrimeSet::infinity();
        let a = verify_cw(&c, &cert, &s, &pts, 20).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        let b = verify_cw(&c, &cert, &s, &rev, 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samples_s_unit_points() {
        let c = kummer_gm(2);
        let s: PrimeSet = "{2, inf}".parse().unwrap();
        let pts = sample_s_integral_points(&c.target, &s, 100);
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!(is_s_integral(&c.target, p, &s));
        }
        let only_inf = sample_s_integral_points(&c.target, &PrimeSet::infinity(), 100);
        assert_eq!(only_inf.len(), 2);
    }
}
