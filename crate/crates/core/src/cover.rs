//! Covers `π: W → V` given by equations, their deck groups, and the
//! certificates that make them unramified covers away from a finite set of
//! primes.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{self, FactorError};
use crate::certify::{
    denominator_primes, find_certificate, Bounds, Certificate, CertificateSearch, CertifyError, Ideal,
};
use crate::poly::{discriminant, MPoly, PolyError, QPoly, Rat, Ring, UPoly};
use crate::primes::PrimeSet;
use crate::sample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("{0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn domain<T>(msg: impl Into<String>) -> Result<T, CoverError> {
    Err(CoverError::Domain(msg.into()))
}

/// `W = V(J1) \ V(J2)`. An empty `J2` means an empty boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyPresentation {
    ring: Ring,
    j1: Vec<MPoly>,
    j2: Vec<MPoly>,
}

impl VarietyPresentation {
    pub fn new(ring: &Ring, j1: Vec<MPoly>, j2: Vec<MPoly>) -> Result<Self, CoverError> {
        for f in j1.iter().chain(&j2) {
            if f.ring() != ring {
                return Err(PolyError::RingMismatch {
                    left: ring.vars().join(","),
                    right: f.ring().vars().join(","),
                }
                .into());
            }
        }
        if j2.iter().any(|h| h.is_zero()) {
            return domain("zero boundary generator makes the whole closure boundary");
        }
        Ok(VarietyPresentation {
            ring: ring.clone(),
            j1: j1.into_iter().filter(|f| !f.is_zero()).collect(),
            j2,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn j1(&self) -> &[MPoly] {
        &self.j1
    }

    pub fn j2(&self) -> &[MPoly] {
        &self.j2
    }

    pub fn j1_ideal(&self) -> Ideal {
        Ideal::new(&self.ring, self.j1.clone()).expect("same ring")
    }

    fn check_arity(&self, pt: &[Rat]) -> Result<(), CoverError> {
        if pt.len() != self.ring.nvars() {
            return Err(PolyError::Arity {
                expected: self.ring.nvars(),
                got: pt.len(),
            }
            .into());
        }
        Ok(())
    }

    /// Point of the closure `V(J1)`.
    pub fn on_closure(&self, pt: &[Rat]) -> Result<bool, CoverError> {
        self.check_arity(pt)?;
        for f in &self.j1 {
            if !f.eval(pt)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Point of `V(J2)`; never true for an empty boundary.
    pub fn on_boundary(&self, pt: &[Rat]) -> Result<bool, CoverError> {
        self.check_arity(pt)?;
        if self.j2.is_empty() {
            return Ok(false);
        }
        for h in &self.j2 {
            if !h.eval(pt)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains(&self, pt: &[Rat]) -> Result<bool, CoverError> {
        Ok(self.on_closure(pt)? && !self.on_boundary(pt)?)
    }

    /// Up to `want` rational points of `W`.
    pub fn sample_points(&self, want: usize) -> Vec<Vec<Rat>> {
        sample::rational_points(
            &self.ring,
            &self.j1,
            |p| !self.on_boundary(p).unwrap_or(true),
            want,
        )
    }

    fn polys(&self) -> impl Iterator<Item = &MPoly> {
        self.j1.iter().chain(&self.j2)
    }
}

/// A named polynomial self-map of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub name: String,
    pub images: Vec<MPoly>,
}

impl GroupElement {
    pub fn identity(ring: &Ring) -> Self {
        GroupElement {
            name: "id".into(),
            images: (0..ring.nvars()).map(|i| MPoly::var(ring, i)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, p)| *p == MPoly::var(p.ring(), i))
    }

    pub fn apply(&self, pt: &[Rat]) -> Result<Vec<Rat>, CoverError> {
        Ok(self.images.iter().map(|p| p.eval(pt)).collect::<Result<_, _>>()?)
    }
}

/// Finite group acting on the source; the identity is always present and
/// listed first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    elements: Vec<GroupElement>,
}

impl GroupAction {
    pub fn new(ring: &Ring, elements: Vec<GroupElement>) -> Result<Self, CoverError> {
        let mut names = BTreeSet::new();
        for e in &elements {
            if e.images.len() != ring.nvars() {
                return Err(PolyError::Arity {
                    expected: ring.nvars(),
                    got: e.images.len(),
                }
                .into());
            }
            if e.images.iter().any(|p| p.ring() != ring) {
                return domain(format!("element `{}` is not in the source ring", e.name));
            }
            if !names.insert(e.name.clone()) {
                return domain(format!("duplicate group element `{}`", e.name));
            }
        }
        let mut out: Vec<GroupElement> = Vec::with_capacity(elements.len() + 1);
        match elements.iter().position(|e| e.is_identity()) {
            Some(i) => out.push(elements[i].clone()),
            None => {
                if names.contains("id") {
                    return domain("`id` must be the identity");
                }
                out.push(GroupElement::identity(ring));
            }
        }
        out.extend(elements.into_iter().filter(|e| !e.is_identity()));
        Ok(GroupAction { elements: out })
    }

    pub fn trivial(ring: &Ring) -> Self {
        GroupAction {
            elements: vec![GroupElement::identity(ring)],
        }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn non_identity(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter().skip(1)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, name: &str) -> Option<&GroupElement> {
        self.elements.iter().find(|e| e.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `root^n = radicand(π(x))`; `inverse` names a coordinate equal to
    /// `1/root` when the source is a torus. The radicand lives in the
    /// target ring.
    Kummer {
        n: u32,
        root: String,
        inverse: Option<String>,
        radicand: MPoly,
    },
    /// The source is a line with coordinate `t` and `π` is given by
    /// polynomials in `t`.
    Parametrized,
    /// The fiber coordinate `var` satisfies `poly = 0`, with `poly` monic
    /// up to a constant in `var` and its other variables named as in the
    /// target.
    PolynomialInY { var: String, poly: MPoly },
    Generic,
}

impl Family {
    pub fn kind(&self) -> &'static str {
        match self {
            Family::Kummer { .. } => "kummer",
            Family::Parametrized => "parametrized",
            Family::PolynomialInY { .. } => "polynomial_in_y",
            Family::Generic => "generic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpec {
    pub source: VarietyPresentation,
    pub target: VarietyPresentation,
    /// One polynomial in the source ring per target coordinate.
    pub map_pi: Vec<MPoly>,
    pub degree: u32,
    pub action: Option<GroupAction>,
    pub family: Family,
}

impl CoverSpec {
    pub fn new(
        source: VarietyPresentation,
        target: VarietyPresentation,
        map_pi: Vec<MPoly>,
        degree: u32,
        action: Option<GroupAction>,
        family: Family,
    ) -> Result<Self, CoverError> {
        if degree == 0 {
            return domain("cover degree must be at least 1");
        }
        if map_pi.len() != target.ring.nvars() {
            return Err(PolyError::Arity {
                expected: target.ring.nvars(),
                got: map_pi.len(),
            }
            .into());
        }
        if map_pi.iter().any(|p| p.ring() != &source.ring) {
            return domain("map components must lie in the source ring");
        }
        match &family {
            Family::Kummer {
                n,
                root,
                inverse,
                radicand,
            } => {
                if *n < 2 {
                    return domain("Kummer exponent must be at least 2");
                }
                source.ring.require(root)?;
                if let Some(inv) = inverse {
                    source.ring.require(inv)?;
                }
                if radicand.ring() != &target.ring {
                    return domain("Kummer radicand must lie in the target ring");
                }
            }
            Family::Parametrized => {
                if source.ring.nvars() != 1 {
                    return domain("parametrized family needs a one-variable source");
                }
            }
            Family::PolynomialInY { var, poly } => {
                source.ring.require(var)?;
                if poly.ring() != &source.ring {
                    return domain("fiber polynomial must lie in the source ring");
                }
            }
            Family::Generic => {}
        }
        Ok(CoverSpec {
            source,
            target,
            map_pi,
            degree,
            action,
            family,
        })
    }

    pub fn image(&self, pt: &[Rat]) -> Result<Vec<Rat>, CoverError> {
        self.source.check_arity(pt)?;
        Ok(self.map_pi.iter().map(|p| p.eval(pt)).collect::<Result<_, _>>()?)
    }

    /// Checks `π(P) ∈ V(J1(V))` on up to `want` sampled source points.
    /// Returns the number of points checked.
    pub fn check_map_on_samples(&self, want: usize) -> Result<usize, CoverError> {
        let pts = self.source.sample_points(want);
        for p in &pts {
            let q = self.image(p)?;
            if !self.target.on_closure(&q)? {
                return domain(format!("π maps {} off the target", fmt_point(p)));
            }
        }
        Ok(pts.len())
    }

    /// The polynomial in the fiber coordinate whose roots over a target
    /// point are the fiber, with coefficients in the target ring.
    pub fn fiber_polynomial(&self) -> Result<UPoly, CoverError> {
        match &self.family {
            Family::Kummer {
                n, root, radicand, ..
            } => {
                let t = &self.target.ring;
                let mut cs = vec![-radicand.clone()];
                cs.resize(*n as usize, MPoly::zero(t));
                cs.push(MPoly::one(t));
                Ok(UPoly::new(root, t, cs))
            }
            Family::PolynomialInY { var, poly } => {
                let i = self.source.ring.require(var)?;
                let u = poly.to_upoly(i);
                let t = &self.target.ring;
                let cs: Result<Vec<MPoly>, PolyError> = u.coeffs().iter().map(|c| c.embed(t)).collect();
                let u = UPoly::new(var, t, cs?);
                if u.degree() < 1 || !u.lc().is_constant() {
                    return domain(format!("fiber polynomial must have constant leading coefficient in {var}"));
                }
                Ok(u)
            }
            _ => Err(CoverError::Unsupported(format!(
                "no fiber polynomial for the {} family",
                self.family.kind()
            ))),
        }
    }
}

pub(crate) fn fmt_point(p: &[Rat]) -> String {
    let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// `J1 ∪ {g_i(x) − x_i}`.
pub fn fixed_locus_ideal(c: &CoverSpec, g: &GroupElement) -> Result<Ideal, CoverError> {
    if c.action.is_none() {
        return Err(CoverError::Precondition("cover has no group action".into()));
    }
    if g.is_identity() {
        return domain("the identity fixes every point");
    }
    let ring = &c.source.ring;
    let mut gens = c.source.j1.clone();
    for (i, im) in g.images.iter().enumerate() {
        gens.push(im - &MPoly::var(ring, i));
    }
    Ok(Ideal::new(ring, gens)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointStatus {
    Certified(Certificate),
    /// A rational point of `W` fixed by the element.
    Fixed(Vec<Rat>),
    Inconclusive { max_n: u32, max_aux_degree: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementCertification {
    pub element: String,
    pub status: FixedPointStatus,
}

fn boundary_targets(v: &VarietyPresentation) -> Vec<MPoly> {
    if v.j2.is_empty() {
        vec![MPoly::one(&v.ring)]
    } else {
        v.j2.clone()
    }
}

/// For every `g ≠ 1`, a certificate that the fixed locus of `g` lies in
/// the boundary, or a rational fixed point of `W`.
pub fn certify_fixed_point_free(
    c: &CoverSpec,
    bounds: &Bounds,
) -> Result<Vec<ElementCertification>, CoverError> {
    let Some(action) = &c.action else {
        return Err(CoverError::Precondition("cover has no group action".into()));
    };
    let targets = boundary_targets(&c.source);
    let mut out = Vec::new();
    for g in action.non_identity() {
        let ideal = fixed_locus_ideal(c, g)?;
        let witness = sample::rational_points(
            &c.source.ring,
            ideal.generators(),
            |p| !c.source.on_boundary(p).unwrap_or(true),
            1,
        );
        let status = if let Some(p) = witness.into_iter().next() {
            FixedPointStatus::Fixed(p)
        } else {
            match find_certificate(&targets, &ideal, bounds)? {
                CertificateSearch::Found(cert) => FixedPointStatus::Certified(cert),
                CertificateSearch::NotFound {
                    max_n,
                    max_aux_degree,
                } => FixedPointStatus::Inconclusive {
                    max_n,
                    max_aux_degree,
                },
            }
        };
        out.push(ElementCertification {
            element: g.name.clone(),
            status,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberWitness {
    pub point: Vec<Rat>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberStatus {
    /// `J2(V) ⊆ rad(J1(V) + (disc))`: the fiber polynomial is separable on `V`.
    Certified(Certificate),
    /// Every sampled fiber had exactly `size` points.
    Sampled { points: usize, size: usize },
    /// Two target points with different fiber cardinalities.
    Failure { first: FiberWitness, second: FiberWitness },
    /// Constant fiber size, but not the declared degree.
    DegreeMismatch { witness: FiberWitness, degree: u32 },
    Inconclusive { max_n: u32, max_aux_degree: u32 },
}

/// Minimum number of target points sampled for parametrized families.
pub const FIBER_SAMPLES: usize = 25;

pub fn certify_constant_fibers(c: &CoverSpec, bounds: &Bounds) -> Result<FiberStatus, CoverError> {
    match &c.family {
        Family::Kummer { .. } | Family::PolynomialInY { .. } => {
            let f = c.fiber_polynomial()?;
            if f.degree() != c.degree as i64 {
                return domain(format!(
                    "fiber polynomial has degree {} but the cover has degree {}",
                    f.degree(),
                    c.degree
                ));
            }
            let disc = if f.degree() == 1 {
                MPoly::one(&c.target.ring)
            } else {
                discriminant(&f)?
            };
            let mut gens = c.target.j1.clone();
            gens.push(disc);
            let ideal = Ideal::new(&c.target.ring, gens)?;
            Ok(match find_certificate(&boundary_targets(&c.target), &ideal, bounds)? {
                CertificateSearch::Found(cert) => FiberStatus::Certified(cert),
                CertificateSearch::NotFound {
                    max_n,
                    max_aux_degree,
                } => FiberStatus::Inconclusive {
                    max_n,
                    max_aux_degree,
                },
            })
        }
        Family::Parametrized => sampled_fibers(c),
        Family::Generic => Err(CoverError::Unsupported(
            "constant-fiber certification for a generic family".into(),
        )),
    }
}

fn univariate(p: &MPoly) -> QPoly {
    p.specialize_univariate(&[None], 0).expect("one-variable ring")
}

/// Number of distinct points of `W` over a target point, for a
/// parametrized family: common roots of `x_i(t) − P_i` and `J1`, minus
/// those on the boundary.
pub fn parametrized_fiber_size(c: &CoverSpec, target_pt: &[Rat]) -> Result<usize, CoverError> {
    Ok(parametrized_fiber(c, target_pt)?.degree().max(0) as usize)
}

/// Squarefree polynomial in `t` whose roots are the fiber.
pub(crate) fn parametrized_fiber(c: &CoverSpec, target_pt: &[Rat]) -> Result<QPoly, CoverError> {
    if !matches!(c.family, Family::Parametrized) {
        return Err(CoverError::Unsupported("not a parametrized family".into()));
    }
    c.target.check_arity(target_pt)?;
    let mut g = QPoly::zero();
    for (x, p) in c.map_pi.iter().zip(target_pt) {
        g = g.gcd(&univariate(x).sub(&QPoly::constant(p.clone())));
    }
    for f in &c.source.j1 {
        g = g.gcd(&univariate(f));
    }
    if g.is_zero() {
        return domain(format!("infinite fiber over {}", fmt_point(target_pt)));
    }
    let mut fiber = g.squarefree_part();
    if !c.source.j2.is_empty() {
        let b = c
            .source
            .j2
            .iter()
            .fold(QPoly::zero(), |acc, h| acc.gcd(&univariate(h)));
        if !b.is_zero() {
            let common = fiber.gcd(&b);
            fiber = fiber.divrem(&common).0;
        }
    }
    Ok(fiber.monic())
}

fn sampled_fibers(c: &CoverSpec) -> Result<FiberStatus, CoverError> {
    let mut seen = BTreeSet::new();
    let mut samples: Vec<FiberWitness> = Vec::new();
    for t in sample::rational_sequence().take(10_000) {
        if samples.len() >= FIBER_SAMPLES {
            break;
        }
        let src = [t];
        if !c.source.contains(&src)? {
            continue;
        }
        let p = c.image(&src)?;
        if c.target.on_boundary(&p)? || !seen.insert(p.clone()) {
            continue;
        }
        let size = parametrized_fiber_size(c, &p)?;
        samples.push(FiberWitness { point: p, size });
    }
    if samples.len() < FIBER_SAMPLES {
        return domain(format!("only {} distinct target points sampled", samples.len()));
    }
    let first = &samples[0];
    if let Some(other) = samples.iter().find(|w| w.size != first.size) {
        return Ok(FiberStatus::Failure {
            first: first.clone(),
            second: other.clone(),
        });
    }
    if first.size != c.degree as usize {
        return Ok(FiberStatus::DegreeMismatch {
            witness: first.clone(),
            degree: c.degree,
        });
    }
    Ok(FiberStatus::Sampled {
        points: samples.len(),
        size: first.size,
    })
}

/// Galois closure for the supported families. Returns the input when an
/// action is already present.
pub fn galois_closure(c: &CoverSpec) -> Result<CoverSpec, CoverError> {
    if c.action.is_some() {
        return Ok(c.clone());
    }
    let ring = &c.source.ring;
    if c.degree == 1 {
        let mut out = c.clone();
        out.action = Some(GroupAction::trivial(ring));
        return Ok(out);
    }
    match &c.family {
        Family::PolynomialInY { var, poly } if c.degree == 2 => {
            let i = ring.require(var)?;
            let u = poly.to_upoly(i);
            if u.degree() != 2 {
                return domain("fiber polynomial degree differs from the cover degree");
            }
            // y ↦ −y − a1 for the monic y² + a1·y + a2
            let lc = u.lc().constant_value().ok_or_else(|| {
                CoverError::Domain("non-constant leading coefficient".into())
            })?;
            let a1 = u.coeffs()[1].scale(&lc.recip()).embed(ring)?;
            let mut images: Vec<MPoly> = (0..ring.nvars()).map(|k| MPoly::var(ring, k)).collect();
            images[i] = &(-MPoly::var(ring, i)) - &a1;
            let mut out = c.clone();
            out.action = Some(GroupAction::new(
                ring,
                vec![GroupElement {
                    name: "swap".into(),
                    images,
                }],
            )?);
            Ok(out)
        }
        Family::Kummer {
            n, root, inverse, ..
        } => kummer_closure(c, *n, root, inverse.as_deref()),
        _ => Err(CoverError::Unsupported(format!(
            "Galois closure of a degree-{} {} cover",
            c.degree,
            c.family.kind()
        ))),
    }
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: u32) -> QPoly {
    // x^n − 1 divided by Φ_d for every proper divisor d
    let mut p = QPoly::binomial(n as usize, &Rat::one());
    for d in 1..n {
        if n % d == 0 {
            p = p.divrem(&cyclotomic(d)).0;
        }
    }
    p
}

fn kummer_closure(c: &CoverSpec, n: u32, root: &str, inverse: Option<&str>) -> Result<CoverSpec, CoverError> {
    let ring = &c.source.ring;
    let ri = ring.require(root)?;
    let ii = inverse.map(|v| ring.require(v)).transpose()?;
    if n == 2 {
        let mut images: Vec<MPoly> = (0..ring.nvars()).map(|k| MPoly::var(ring, k)).collect();
        images[ri] = -MPoly::var(ring, ri);
        if let Some(ii) = ii {
            images[ii] = -MPoly::var(ring, ii);
        }
        let mut out = c.clone();
        out.action = Some(GroupAction::new(
            ring,
            vec![GroupElement {
                name: "g1".into(),
                images,
            }],
        )?);
        return Ok(out);
    }
    // adjoin a primitive n-th root of unity
    let mut zname = String::from("zeta");
    while ring.index_of(&zname).is_some() {
        zname.push('_');
    }
    let big = ring.extend(&[zname.as_str()]);
    let z = MPoly::var(&big, big.nvars() - 1);
    let phi = cyclotomic(n);
    let phi_z = qpoly_in(&phi, &z);
    let lift = |p: &MPoly| p.embed(&big);
    let j1: Result<Vec<MPoly>, _> = c.source.j1.iter().map(lift).collect();
    let mut j1 = j1?;
    j1.push(phi_z.clone());
    let j2: Result<Vec<MPoly>, _> = c.source.j2.iter().map(lift).collect();
    let source = VarietyPresentation::new(&big, j1, j2?)?;
    let map_pi: Result<Vec<MPoly>, _> = c.map_pi.iter().map(lift).collect();
    let mut elements = Vec::new();
    for k in 1..n {
        let zk = QPoly::binomial(k as usize, &Rat::zero()).rem(&phi);
        let zmk = QPoly::binomial((n - k) as usize, &Rat::zero()).rem(&phi);
        let mut images: Vec<MPoly> = (0..big.nvars()).map(|j| MPoly::var(&big, j)).collect();
        images[ri] = &qpoly_in(&zk, &z) * &MPoly::var(&big, ri);
        if let Some(ii) = ii {
            images[ii] = &qpoly_in(&zmk, &z) * &MPoly::var(&big, ii);
        }
        elements.push(GroupElement {
            name: format!("g{k}"),
            images,
        });
    }
    Ok(CoverSpec {
        source,
        target: c.target.clone(),
        map_pi: map_pi?,
        degree: c.degree,
        action: Some(GroupAction::new(&big, elements)?),
        family: c.family.clone(),
    })
}

/// `q(x)` as a polynomial in the ring of `x`.
fn qpoly_in(q: &QPoly, x: &MPoly) -> MPoly {
    let mut out = MPoly::zero(x.ring());
    for c in q.coeffs().iter().rev() {
        out = &(&out * x) + &MPoly::constant(x.ring(), c.clone());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    IsCover,
    NotACover(String),
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertification {
    /// The cover the deck-group certificates refer to.
    pub closure: CoverSpec,
    pub fixed_point_free: Vec<ElementCertification>,
    pub constant_fibers: FiberStatus,
    pub verdict: Verdict,
}

impl CoverCertification {
    pub fn certificates(&self) -> Vec<&Certificate> {
        let mut out: Vec<&Certificate> = self
            .fixed_point_free
            .iter()
            .filter_map(|e| match &e.status {
                FixedPointStatus::Certified(c) => Some(c),
                _ => None,
            })
            .collect();
        if let FiberStatus::Certified(c) = &self.constant_fibers {
            out.push(c);
        }
        out
    }
}

/// Galois closure, fixed-point-freeness of its deck group, and constancy
/// of the fiber cardinality of the original cover.
pub fn certify_cover(c: &CoverSpec, bounds: &Bounds) -> Result<CoverCertification, CoverError> {
    let closure = galois_closure(c)?;
    let fixed = certify_fixed_point_free(&closure, bounds)?;
    let fibers = certify_constant_fibers(c, bounds)?;
    let mut reasons = Vec::new();
    let mut open = Vec::new();
    for e in &fixed {
        match &e.status {
            FixedPointStatus::Certified(_) => {}
            FixedPointStatus::Fixed(p) => {
                reasons.push(format!("`{}` fixes {}", e.element, fmt_point(p)))
            }
            FixedPointStatus::Inconclusive {
                max_n,
                max_aux_degree,
            } => open.push(format!(
                "no certificate for `{}` with N ≤ {max_n}, degree ≤ {max_aux_degree}",
                e.element
            )),
        }
    }
    match &fibers {
        FiberStatus::Certified(_) | FiberStatus::Sampled { .. } => {}
        FiberStatus::Failure { first, second } => reasons.push(format!(
            "fiber over {} has {} points but fiber over {} has {}",
            fmt_point(&first.point),
            first.size,
            fmt_point(&second.point),
            second.size
        )),
        FiberStatus::DegreeMismatch { witness, degree } => reasons.push(format!(
            "fibers have {} points, declared degree {degree}",
            witness.size
        )),
        FiberStatus::Inconclusive {
            max_n,
            max_aux_degree,
        } => open.push(format!(
            "no separability certificate with N ≤ {max_n}, degree ≤ {max_aux_degree}"
        )),
    }
    let verdict = if !reasons.is_empty() {
        Verdict::NotACover(reasons.join("; "))
    } else if !open.is_empty() {
        Verdict::Inconclusive(open.join("; "))
    } else {
        Verdict::IsCover
    };
    Ok(CoverCertification {
        closure,
        fixed_point_free: fixed,
        constant_fibers: fibers,
        verdict,
    })
}

fn coefficient_primes<'a>(polys: impl Iterator<Item = &'a MPoly>, s: &mut PrimeSet) -> Result<(), CoverError> {
    for p in polys {
        Extend::extend(s, arith::prime_divisors(&p.denominator_lcm())?);
    }
    Ok(())
}

fn rat_primes(r: &Rat, s: &mut PrimeSet) -> Result<(), CoverError> {
    Extend::extend(s, arith::prime_divisors(r.numer())?);
    Extend::extend(s, arith::prime_divisors(r.denom())?);
    Ok(())
}

/// Primes at which the integral dependence of the fiber coordinate over
/// the target stops being monic.
fn dependence_primes(c: &CoverSpec, s: &mut PrimeSet) -> Result<(), CoverError> {
    match &c.family {
        Family::Kummer { .. } | Family::PolynomialInY { .. } => {
            let f = c.fiber_polynomial()?;
            rat_primes(&f.lc().constant_value().unwrap_or_else(Rat::one), s)?;
            coefficient_primes(f.coeffs().iter(), s)?;
        }
        Family::Parametrized => {
            if let Some((_, q)) = parametrized_dependence(c) {
                rat_primes(&q.lc(), s)?;
            }
        }
        Family::Generic => {}
    }
    Ok(())
}

/// The map component of least positive degree in `t`, preferring a unit
/// leading coefficient: `t` is integral over it. Returns its index.
pub(crate) fn parametrized_dependence(c: &CoverSpec) -> Option<(usize, QPoly)> {
    c.map_pi
        .iter()
        .map(univariate)
        .enumerate()
        .filter(|(_, q)| q.degree() >= 1)
        .min_by_key(|(_, q)| {
            let unit = q.lc() == Rat::one() || q.lc() == -Rat::one();
            (!unit, q.degree())
        })
}

/// `S`: certificate denominators, coefficient denominators of every
/// defining polynomial, action and map, and the leading data of the
/// integral dependence, together with `∞`.
pub fn bad_primes(c: &CoverSpec, cert: &CoverCertification) -> Result<PrimeSet, CoverError> {
    if cert.verdict != Verdict::IsCover {
        return Err(CoverError::Precondition(format!("cover not certified: {:?}", cert.verdict)));
    }
    let mut s = PrimeSet::infinity();
    for k in cert.certificates() {
        s.extend(&denominator_primes(k)?);
    }
    for spec in [c, &cert.closure] {
        coefficient_primes(spec.source.polys(), &mut s)?;
        coefficient_primes(spec.target.polys(), &mut s)?;
        coefficient_primes(spec.map_pi.iter(), &mut s)?;
        if let Some(a) = &spec.action {
            coefficient_primes(a.elements.iter().flat_map(|e| e.images.iter()), &mut s)?;
        }
    }
    dependence_primes(c, &mut s)?;
    Ok(s)
}

/// Result of spot-checking the deck group on rational points of the
/// closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionCheck {
    pub points: usize,
    /// Orbits that were free, inside `W`, inside one fiber, and of size
    /// equal to the cover degree.
    pub transitive_free_orbits: usize,
    pub failures: Vec<String>,
}

/// Checks on sampled rational points that each element maps `W` to `W`
/// and preserves `π`, that orbits have `|G|` distinct points, that `G` is
/// closed under composition, and that `|G|` matches the degree.
pub fn check_action_on_samples(c: &CoverSpec, want: usize) -> Result<ActionCheck, CoverError> {
    let Some(action) = &c.action else {
        return Err(CoverError::Precondition("cover has no group action".into()));
    };
    let pts = c.source.sample_points(want);
    let mut failures = Vec::new();
    let mut good = 0;
    for p in &pts {
        let base = c.image(p)?;
        let mut orbit = BTreeSet::new();
        let mut ok = true;
        for g in action.elements() {
            let q = g.apply(p)?;
            if !c.source.contains(&q)? || c.image(&q)? != base {
                failures.push(format!("`{}` moves {} off its fiber", g.name, fmt_point(p)));
                ok = false;
            }
            // closure: g∘h agrees with some element at p
            for h in action.elements() {
                let gh = g.apply(&h.apply(p)?)?;
                if !action.elements().iter().any(|e| e.apply(p).map(|x| x == gh).unwrap_or(false)) {
                    failures.push(format!("`{}`∘`{}` is not in the group at {}", g.name, h.name, fmt_point(p)));
                    ok = false;
                }
            }
            orbit.insert(q);
        }
        if orbit.len() != action.order() || action.order() != c.degree as usize {
            ok = false;
        }
        if ok {
            good += 1;
        }
    }
    Ok(ActionCheck {
        points: pts.len(),
        transitive_free_orbits: good,
        failures,
    })
}

/// Ready-made presentations of the standard examples.
pub mod families {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str, r: &Ring) -> MPoly {
        parse_poly(s, r).expect("fixture polynomial")
    }

    /// `t ↦ t^n` on `G_m = {ts = 1}`, mapping to `{uv = 1}`.
    pub fn kummer_gm(n: u32) -> CoverSpec {
        let src = Ring::new(&["t", "s"]);
        let tgt = Ring::new(&["u", "v"]);
        CoverSpec::new(
            VarietyPresentation::new(&src, vec![p("t*s - 1", &src)], vec![]).unwrap(),
            VarietyPresentation::new(&tgt, vec![p("u*v - 1", &tgt)], vec![]).unwrap(),
            vec![p(&format!("t^{n}"), &src), p(&format!("s^{n}"), &src)],
            n,
            None,
            Family::Kummer {
                n,
                root: "t".into(),
                inverse: Some("s".into()),
                radicand: p("u", &tgt),
            },
        )
        .unwrap()
    }

    /// `y² = t` over `G_m = {ts = 1}`.
    pub fn sqrt_gm() -> CoverSpec {
        let src = Ring::new(&["t", "s", "y"]);
        let tgt = Ring::new(&["t", "s"]);
        CoverSpec::new(
            VarietyPresentation::new(&src, vec![p("t*s - 1", &src), p("y^2 - t", &src)], vec![]).unwrap(),
            VarietyPresentation::new(&tgt, vec![p("t*s - 1", &tgt)], vec![]).unwrap(),
            vec![p("t", &src), p("s", &src)],
            2,
            None,
            Family::PolynomialInY {
                var: "y".into(),
                poly: p("y^2 - t", &src),
            },
        )
        .unwrap()
    }

    /// Normalization `t ↦ (t², t³)` of the cuspidal cubic `y² = x³`.
    pub fn cuspidal() -> CoverSpec {
        let src = Ring::new(&["t"]);
        let tgt = Ring::new(&["x", "y"]);
        CoverSpec::new(
            VarietyPresentation::new(&src, vec![], vec![]).unwrap(),
            VarietyPresentation::new(&tgt, vec![p("y^2 - x^3", &tgt)], vec![]).unwrap(),
            vec![p("t^2", &src), p("t^3", &src)],
            1,
            None,
            Family::Parametrized,
        )
        .unwrap()
    }

    /// Normalization `t ↦ (t² − 1, t³ − t)` of the nodal cubic
    /// `y² = x³ + x²`.
    pub fn nodal() -> CoverSpec {
        let src = Ring::new(&["t"]);
        let tgt = Ring::new(&["x", "y"]);
        CoverSpec::new(
            VarietyPresentation::new(&src, vec![], vec![]).unwrap(),
            VarietyPresentation::new(&tgt, vec![p("y^2 - x^3 - x^2", &tgt)], vec![]).unwrap(),
            vec![p("t^2 - 1", &src), p("t^3 - t", &src)],
            1,
            None,
            Family::Parametrized,
        )
        .unwrap()
    }

    /// `A¹` with `t ↦ −t` as a degree-2 cover of `A¹` by `t ↦ t²`.
    pub fn affine_line_sign() -> CoverSpec {
        let src = Ring::new(&["t"]);
        let tgt = Ring::new(&["x"]);
        let action = GroupAction::new(
            &src,
            vec![GroupElement {
                name: "neg".into(),
                images: vec![p("-t", &src)],
            }],
        )
        .unwrap();
        CoverSpec::new(
            VarietyPresentation::new(&src, vec![], vec![]).unwrap(),
            VarietyPresentation::new(&tgt, vec![], vec![]).unwrap(),
            vec![p("t^2", &src)],
            2,
            Some(action),
            Family::Kummer {
                n: 2,
                root: "t".into(),
                inverse: None,
                radicand: p("x", &tgt),
            },
        )
        .unwrap()
    }

    /// `y² = x/3`, whose integral dependence is not monic over `Z`.
    pub fn third_root_cover() -> CoverSpec {
        let src = Ring::new(&["x", "w", "y"]);
        let tgt = Ring::new(&["x", "w"]);
        CoverSpec::new(
            VarietyPresentation::new(&src, vec![p("x*w - 1", &src), p("y^2 - x/3", &src)], vec![]).unwrap(),
            VarietyPresentation::new(&tgt, vec![p("x*w - 1", &tgt)], vec![]).unwrap(),
            vec![p("x", &src), p("w", &src)],
            2,
            None,
            Family::PolynomialInY {
                var: "y".into(),
                poly: p("y^2 - x/3", &src),
            },
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use num_bigint::BigInt;
    use super::*;
    use crate::certify::check_certificate;
    use crate::poly::{parse_poly, ratio};
    use proptest::prelude::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    #[test]
    fn fixed_locus_of_sign_on_torus() {
        let c = galois_closure(&kummer_gm(2)).unwrap();
        let g = &c.action.as_ref().unwrap().elements()[1];
        let id = fixed_locus_ideal(&c, g).unwrap();
        let ring = c.source.ring();
        let want: Vec<MPoly> = ["t*s - 1", "-2*t", "-2*s"]
            .iter()
            .map(|s| parse_poly(s, ring).unwrap())
            .collect();
        assert_eq!(id.generators(), &want[..]);
        let e = &c.action.as_ref().unwrap().elements()[0];
        assert!(fixed_locus_ideal(&c, e).is_err());
    }

    #[test]
    fn sign_on_line_has_fixed_point() {
        let c = affine_line_sign();
        let g = &c.action.as_ref().unwrap().elements()[1];
        let id = fixed_locus_ideal(&c, g).unwrap();
        assert_eq!(id.generators(), &[parse_poly("-2*t", c.source.ring()).unwrap()][..]);
        let res = certify_fixed_point_free(&c, &Bounds::default()).unwrap();
        assert_eq!(res[0].status, FixedPointStatus::Fixed(vec![r(0)]));
    }

    #[test]
    fn kummer_two_certifies_with_prime_two() {
        let c = kummer_gm(2);
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::IsCover);
        let FixedPointStatus::Certified(k) = &cert.fixed_point_free[0].status else {
            panic!()
        };
        assert_eq!(k.coefficients[0][0], parse_poly("-1", &k.ring).unwrap());
        for k in cert.certificates() {
            assert!(check_certificate(k));
        }
        assert_eq!(bad_primes(&c, &cert).unwrap(), PrimeSet::from_primes([2]));
    }

    #[test]
    fn kummer_primes_divide_exponent() {
        for (n, want) in [(2u32, vec![2u64]), (3, vec![3]), (4, vec![2]), (6, vec![2, 3])] {
            let c = kummer_gm(n);
            let cert = certify_cover(&c, &Bounds::default()).unwrap();
            assert_eq!(cert.verdict, Verdict::IsCover, "n={n}");
            assert_eq!(cert.fixed_point_free.len(), n as usize - 1);
            for k in cert.certificates() {
                assert!(check_certificate(k));
            }
            assert_eq!(bad_primes(&c, &cert).unwrap(), PrimeSet::from_primes(want), "n={n}");
        }
    }

    #[test]
    fn square_root_over_torus() {
        let c = sqrt_gm();
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::IsCover);
        let FiberStatus::Certified(k) = &cert.constant_fibers else {
            panic!()
        };
        // 1 = -(ts - 1) + (s/4)(4t)
        assert_eq!(k.generators[1], parse_poly("4*t", &k.ring).unwrap());
        assert_eq!(k.coefficients[0][1], parse_poly("s/4", &k.ring).unwrap());
        assert_eq!(bad_primes(&c, &cert).unwrap(), PrimeSet::from_primes([2]));
        let swap = &cert.closure.action.as_ref().unwrap().elements()[1];
        assert_eq!(swap.images[2], parse_poly("-y", c.source.ring()).unwrap());
    }

    #[test]
    fn nodal_fibers_differ() {
        let c = nodal();
        assert_eq!(parametrized_fiber_size(&c, &[r(0), r(0)]).unwrap(), 2);
        assert_eq!(parametrized_fiber_size(&c, &[r(3), r(6)]).unwrap(), 1);
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        let FiberStatus::Failure { first, second } = &cert.constant_fibers else {
            panic!("{:?}", cert.constant_fibers)
        };
        let mut sizes = [first.size, second.size];
        sizes.sort();
        assert_eq!(sizes, [1, 2]);
        for w in [first, second] {
            assert!(c.target.on_closure(&w.point).unwrap());
            assert_eq!(parametrized_fiber_size(&c, &w.point).unwrap(), w.size);
        }
        assert!(matches!(cert.verdict, Verdict::NotACover(_)));
        assert!(bad_primes(&c, &cert).is_err());
    }

    #[test]
    fn cuspidal_is_degree_one_cover() {
        let c = cuspidal();
        let cert = certify_cover(&c, &Bounds::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::IsCover);
        assert!(cert.fixed_point_free.is_empty());
        assert_eq!(
            cert.constant_fibers,
            FiberStatus::Sampled {
                points: FIBER_SAMPLES,
                size: 1
            }
        );
        assert_eq!(bad_primes(&c, &cert).unwrap(), PrimeSet::infinity());
        assert_eq!(parametrized_fiber_size(&c, &[r(0), r(0)]).unwrap(), 1);
    }

    #[test]
    fn generic_and_large_degree_unsupported() {
        let mut c = sqrt_gm();
        c.family = Family::Generic;
        assert!(matches!(certify_constant_fibers(&c, &Bounds::default()), Err(CoverError::Unsupported(_))));
        assert!(matches!(galois_closure(&c), Err(CoverError::Unsupported(_))));
        let mut d = c.clone();
        d.degree = 5;
        assert!(matches!(galois_closure(&d), Err(CoverError::Unsupported(_))));
        let k = galois_closure(&kummer_gm(2)).unwrap();
        assert_eq!(galois_closure(&k).unwrap(), k);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), QPoly::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic(3), QPoly::from_ints(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), QPoly::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), QPoly::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic(12).degree(), 4);
    }

    #[test]
    fn action_checks_on_samples() {
        for c in [galois_closure(&kummer_gm(2)).unwrap(), galois_closure(&sqrt_gm()).unwrap()] {
            let chk = check_action_on_samples(&c, 40).unwrap();
            assert!(chk.points >= 20, "{}", chk.points);
            assert!(chk.failures.is_empty(), "{:?}", chk.failures);
            assert_eq!(chk.transitive_free_orbits, chk.points);
        }
        assert_eq!(kummer_gm(3).check_map_on_samples(50).unwrap(), 50);
    }

    #[test]
    fn fixed_point_free_soundness_on_samples() {
        for c in [galois_closure(&kummer_gm(2)).unwrap(), galois_closure(&sqrt_gm()).unwrap()] {
            let fx = certify_fixed_point_free(&c, &Bounds::default()).unwrap();
            assert!(fx.iter().all(|e| matches!(e.status, FixedPointStatus::Certified(_))));
            let pts = c.source.sample_points(100);
            assert_eq!(pts.len(), 100);
            for p in &pts {
                for g in c.action.as_ref().unwrap().non_identity() {
                    assert_ne!(&g.apply(p).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn bad_primes_monotone_under_extra_generators() {
        let c = kummer_gm(2);
        let base = bad_primes(&c, &certify_cover(&c, &Bounds::default()).unwrap()).unwrap();
        let mut d = c.clone();
        let extra = parse_poly("3*(t*s - 1)", c.source.ring()).unwrap();
        let mut j1 = d.source.j1().to_vec();
        j1.push(extra);
        d.source = VarietyPresentation::new(c.source.ring(), j1, vec![]).unwrap();
        let more = bad_primes(&d, &certify_cover(&d, &Bounds::default()).unwrap()).unwrap();
        assert!(base.is_subset(&more));
    }

    #[test]
    fn non_constant_fibers_detected_in_sample() {
        let c = nodal();
        let chk = sampled_fibers(&c).unwrap();
        assert!(matches!(chk, FiberStatus::Failure { .. }));
        // half-integers never hit the node
        let w = [ratio(1, 2)];
        assert_eq!(parametrized_fiber_size(&c, &c.image(&w).unwrap()).unwrap(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn kummer_fiber_sizes_on_samples(n in 2u32..5, k in -6i32..6) {
            // u = 2^k has n distinct n-th roots over Q̄
            let c = kummer_gm(n);
            let u = if k >= 0 { r(1 << k) } else { Rat::new(BigInt::one(), BigInt::from(1i64 << -k)) };
            let f = c.fiber_polynomial().unwrap().specialize(&[u.clone(), u.recip()]).unwrap();
            prop_assert_eq!(f.distinct_root_count(), n as usize);
        }
    }
}
