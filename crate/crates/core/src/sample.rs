//! Deterministic point samplers over `Q` and over finite fields.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::gf::{GaloisField, Gf};
use crate::poly::{MPoly, Rat, Ring};

/// `0, 1, -1, 2, -2, 1/2, -1/2, 3, -3, 3/2, -3/2, 1/3, -1/3, ...`:
/// reduced fractions ordered by height `max(|num|, den)`.
pub fn rational_sequence() -> impl Iterator<Item = Rat> {
    std::iter::once(Rat::zero()).chain((1i64..).flat_map(|h| {
        let mut level = Vec::new();
        // numerator h over smaller denominators, then h as the denominator
        for den in 1..=h {
            if h.gcd(&den) == 1 {
                level.push((h, den));
            }
        }
        for num in (1..h).rev() {
            if num.gcd(&h) == 1 {
                level.push((num, h));
            }
        }
        level.into_iter().flat_map(|(n, d)| {
            let r = Rat::new(BigInt::from(n), BigInt::from(d));
            [r.clone(), -r]
        })
    }))
}

/// S-units `±∏ p^e` (including `±1`) ordered by `|num·den|`, then by the
/// sequence of sign and exponents. Only units with `|num·den| ≤ bound`.
pub fn s_units(primes: &[u64], bound: &BigInt) -> Vec<Rat> {
    let mut out: Vec<(BigInt, Rat)> = Vec::new();
    fn rec(primes: &[u64], i: usize, num: BigInt, den: BigInt, bound: &BigInt, out: &mut Vec<(BigInt, Rat)>) {
        if i == primes.len() {
            let size = &num * &den;
            let r = Rat::new(num, den);
            out.push((size.clone(), r.clone()));
            out.push((size, -r));
            return;
        }
        let p = BigInt::from(primes[i]);
        rec(primes, i + 1, num.clone(), den.clone(), bound, out);
        let mut pk = p.clone();
        while &(&num * &den) * &pk <= *bound {
            rec(primes, i + 1, &num * &pk, den.clone(), bound, out);
            rec(primes, i + 1, num.clone(), &den * &pk, bound, out);
            pk *= &p;
        }
    }
    let mut ps: Vec<u64> = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    rec(&ps, 0, BigInt::one(), BigInt::one(), bound, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out.into_iter().map(|(_, r)| r).collect()
}

fn unassigned_in(f: &MPoly, assigned: &[bool]) -> Vec<usize> {
    f.support_vars().into_iter().filter(|&v| !assigned[v]).collect()
}

/// The unassigned variable whose assignment lets the most other variables
/// be pinned by linear equations in turn; ties go to the earliest.
fn choose_free(gens: &[MPoly], assigned: &[bool]) -> usize {
    let mut best: Option<(usize, usize)> = None;
    for v in (0..assigned.len()).filter(|&i| !assigned[i]) {
        if !gens.iter().any(|g| g.degree_in(v) > 0) {
            continue;
        }
        let mut known = assigned.to_vec();
        known[v] = true;
        let mut pinned = 0;
        loop {
            let next = gens.iter().find_map(|g| {
                let un = unassigned_in(g, &known);
                (un.len() == 1 && g.degree_in(un[0]) == 1).then(|| un[0])
            });
            match next {
                Some(u) => {
                    known[u] = true;
                    pinned += 1;
                }
                None => break,
            }
        }
        if best.is_none_or(|(_, b)| pinned > b) {
            best = Some((v, pinned));
        }
    }
    best.map(|(v, _)| v)
        .unwrap_or_else(|| assigned.iter().position(|a| !a).unwrap())
}

struct QSearch<'a, F: Fn(&[Rat]) -> bool> {
    gens: &'a [MPoly],
    accept: F,
    width: usize,
    nodes: usize,
    max_nodes: usize,
    want: usize,
    seen: HashSet<Vec<Rat>>,
    out: Vec<Vec<Rat>>,
    free: Vec<Rat>,
}

impl<F: Fn(&[Rat]) -> bool> QSearch<'_, F> {
    fn done(&self) -> bool {
        self.out.len() >= self.want || self.nodes >= self.max_nodes
    }

    fn dfs(&mut self, values: &mut Vec<Option<Rat>>) {
        if self.done() {
            return;
        }
        self.nodes += 1;
        let assigned: Vec<bool> = values.iter().map(|v| v.is_some()).collect();
        if assigned.iter().all(|&a| a) {
            let pt: Vec<Rat> = values.iter().map(|v| v.clone().unwrap()).collect();
            let on = self.gens.iter().all(|g| g.eval(&pt).map(|v| v.is_zero()).unwrap_or(false));
            if on && (self.accept)(&pt) && self.seen.insert(pt.clone()) {
                self.out.push(pt);
            }
            return;
        }
        // a generator with exactly one unknown pins that unknown down
        let mut best: Option<(i64, usize, crate::poly::QPoly)> = None;
        for g in self.gens {
            let un = unassigned_in(g, &assigned);
            match un.len() {
                0 => {
                    let pt: Vec<Rat> = values.iter().map(|v| v.clone().unwrap_or_default()).collect();
                    if !g.eval(&pt).map(|v| v.is_zero()).unwrap_or(false) {
                        return;
                    }
                }
                1 => {
                    let v = un[0];
                    let Some(q) = g.specialize_univariate(values, v) else { continue };
                    if q.is_zero() {
                        continue;
                    }
                    if q.degree() == 0 {
                        return;
                    }
                    if best.as_ref().is_none_or(|b| q.degree() < b.0) {
                        best = Some((q.degree(), v, q));
                    }
                }
                _ => {}
            }
        }
        if let Some((_, v, q)) = best {
            let Ok(roots) = q.rational_roots() else { return };
            for r in roots {
                values[v] = Some(r);
                self.dfs(values);
                values[v] = None;
                if self.done() {
                    return;
                }
            }
            return;
        }
        let v = choose_free(self.gens, &assigned);
        for k in 0..self.width {
            values[v] = Some(self.free[k].clone());
            self.dfs(values);
            values[v] = None;
            if self.done() {
                return;
            }
        }
    }
}

/// Up to `want` distinct rational points of `V(gens)` passing `accept`,
/// in a deterministic order. Variables pinned by a generator with a single
/// unknown are solved by rational roots; the rest run over
/// [`rational_sequence`] with widening breadth.
pub fn rational_points<F: Fn(&[Rat]) -> bool>(
    ring: &Ring,
    gens: &[MPoly],
    accept: F,
    want: usize,
) -> Vec<Vec<Rat>> {
    rational_points_over(ring, gens, accept, want, rational_sequence().take(256).collect())
}

/// As [`rational_points`], with free variables drawn from `free` in order.
pub fn rational_points_over<F: Fn(&[Rat]) -> bool>(
    ring: &Ring,
    gens: &[MPoly],
    accept: F,
    want: usize,
    free: Vec<Rat>,
) -> Vec<Vec<Rat>> {
    let max_width = free.len().max(1);
    let mut s = QSearch {
        gens,
        accept,
        width: 4,
        nodes: 0,
        max_nodes: 0,
        want,
        seen: HashSet::new(),
        out: Vec::new(),
        free,
    };
    while s.width <= max_width {
        s.nodes = 0;
        s.max_nodes = 20_000;
        let mut values = vec![None; ring.nvars()];
        s.dfs(&mut values);
        if s.out.len() >= want {
            break;
        }
        if s.width >= max_width {
            break;
        }
        s.width = (s.width * 2).min(max_width);
    }
    s.out
}

/// Finite-field points of `V(gens)` passing `accept`. Variables with a
/// single-unknown generator are found by exhaustive search of the field.
pub fn field_points<F: Fn(&[Gf]) -> bool>(
    field: &GaloisField,
    nvars: usize,
    gens: &[MPoly],
    accept: F,
    want: usize,
) -> Vec<Vec<Gf>> {
    let q = field.size().min(1 << 20);
    let width = (want * 4).max(8) as u64;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut values: Vec<Option<Gf>> = vec![None; nvars];
    let mut nodes = 0usize;
    fq_dfs(field, q, width, gens, &accept, want, &mut values, &mut nodes, &mut seen, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn fq_dfs<F: Fn(&[Gf]) -> bool>(
    field: &GaloisField,
    q: u64,
    width: u64,
    gens: &[MPoly],
    accept: &F,
    want: usize,
    values: &mut Vec<Option<Gf>>,
    nodes: &mut usize,
    seen: &mut HashSet<Vec<Gf>>,
    out: &mut Vec<Vec<Gf>>,
) {
    if out.len() >= want || *nodes > 200_000 {
        return;
    }
    *nodes += 1;
    let assigned: Vec<bool> = values.iter().map(|v| v.is_some()).collect();
    let current = |vals: &Vec<Option<Gf>>| -> Vec<Gf> {
        vals.iter().map(|v| v.clone().unwrap_or_else(|| field.zero())).collect()
    };
    if assigned.iter().all(|&a| a) {
        let pt = current(values);
        let on = gens
            .iter()
            .all(|g| field.eval(g, &pt).is_some_and(|v| field.is_zero(&v)));
        if on && accept(&pt) && seen.insert(pt.clone()) {
            out.push(pt);
        }
        return;
    }
    let mut pinned: Option<usize> = None;
    for g in gens {
        let un = unassigned_in(g, &assigned);
        if un.is_empty() {
            let v = field.eval(g, &current(values));
            if !v.is_some_and(|v| field.is_zero(&v)) {
                return;
            }
        } else if un.len() == 1 && pinned.is_none() {
            pinned = Some(un[0]);
        }
    }
    if let Some(v) = pinned {
        let single: Vec<&MPoly> = gens
            .iter()
            .filter(|g| unassigned_in(g, &assigned) == [v])
            .collect();
        for i in 0..q {
            values[v] = Some(field.element(i));
            let pt = current(values);
            if single
                .iter()
                .all(|g| field.eval(g, &pt).is_some_and(|x| field.is_zero(&x)))
            {
                fq_dfs(field, q, width, gens, accept, want, values, nodes, seen, out);
            }
            values[v] = None;
            if out.len() >= want {
                return;
            }
        }
        return;
    }
    let v = choose_free(gens, &assigned);
    for i in 0..width.min(q) {
        // spread the free values over the field deterministically
        let idx = (i * 7919 + 1) % q;
        values[v] = Some(field.element(idx));
        fq_dfs(field, q, width, gens, accept, want, values, nodes, seen, out);
        values[v] = None;
        if out.len() >= want {
            return;
        }
    }
}

/// Whether `|num·den| ≤ bound` for a rational.
pub fn height_product(r: &Rat) -> BigInt {
    (r.numer() * r.denom()).abs()
}
