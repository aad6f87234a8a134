//! Equivalence relations, kernels, quotients, descent, and comprehensions inside a doctrine.

use crate::doctrine::{describe_elem, Doctrine, DoctrineArrow, DoctrineError};
use crate::fincat::{describe_arrow, Arr, Obj, NONE};
use crate::infsl::{Elem, InfSemilattice};
use crate::report::{Line, Report, Tally};
use rayon::prelude::*;
use rustc_hash::FxHashSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Holds,
    Fails(String),
    /// The window lacks a product the clause needs.
    Unstateable,
}

impl Clause {
    pub fn fails(&self) -> bool {
        matches!(self, Clause::Fails(_))
    }

    fn from(holds: bool, witness: impl FnOnce() -> String) -> Clause {
        if holds {
            Clause::Holds
        } else {
            Clause::Fails(witness())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqRelWitness {
    pub object: Obj,
    pub rho: Elem,
    pub reflexive: Clause,
    pub symmetric: Clause,
    pub transitive: Clause,
}

impl EqRelWitness {
    /// No clause fails (clauses the window cannot state are not held against it).
    pub fn is_equivalence(&self) -> bool {
        !self.reflexive.fails() && !self.symmetric.fails() && !self.transitive.fails()
    }

    pub fn fully_stated(&self) -> bool {
        ![&self.reflexive, &self.symmetric, &self.transitive]
            .iter()
            .any(|c| **c == Clause::Unstateable)
    }

    pub fn clauses(&self) -> [(&'static str, &Clause); 3] {
        [
            ("reflexive", &self.reflexive),
            ("symmetric", &self.symmetric),
            ("transitive", &self.transitive),
        ]
    }
}

/// Reflexivity `delta_A <= rho`, symmetry `rho <= P_<pr2,pr1>(rho)`, transitivity
/// `P_<pr1,pr2>(rho) meet P_<pr2,pr3>(rho) <= P_<pr1,pr3>(rho)`.
pub fn is_equivalence_relation(
    p: &Doctrine,
    a: Obj,
    rho: Elem,
) -> Result<EqRelWitness, DoctrineError> {
    let c = p.base();
    let aa = c.product(a, a)?.apex;
    let label = || describe_elem(p, aa, rho);
    let reflexive = match p.delta(a) {
        Some(d) => Clause::from(p.leq(aa, d, rho), || {
            format!("delta does not lie below {}", label())
        }),
        None => Clause::Unstateable,
    };
    let symmetric = match c.tuple_map(&[a, a], &[2, 1]) {
        Ok(sw) => Clause::from(p.leq(aa, rho, p.re(sw, rho)), || {
            format!(
                "{} is not below its transpose {}",
                label(),
                describe_elem(p, aa, p.re(sw, rho))
            )
        }),
        Err(_) => Clause::Unstateable,
    };
    let f = [a, a, a];
    let transitive = match (
        c.iterated_product(&f),
        c.tuple_map(&f, &[1, 2]),
        c.tuple_map(&f, &[2, 3]),
        c.tuple_map(&f, &[1, 3]),
    ) {
        (Ok(aaa), Ok(p12), Ok(p23), Ok(p13)) => {
            let l = p.meet(aaa, p.re(p12, rho), p.re(p23, rho));
            Clause::from(p.leq(aaa, l, p.re(p13, rho)), || {
                format!("{} is not transitive", label())
            })
        }
        _ => Clause::Unstateable,
    };
    Ok(EqRelWitness {
        object: a,
        rho,
        reflexive,
        symmetric,
        transitive,
    })
}

/// Every element of `P(A x A)` no stateable clause rules out.
pub fn equivalence_relations(p: &Doctrine, a: Obj) -> Vec<Elem> {
    let Ok(cell) = p.base().product(a, a) else {
        return Vec::new();
    };
    p.fiber(cell.apex)
        .elements()
        .filter(|&r| {
            is_equivalence_relation(p, a, r)
                .map(|w| w.is_equivalence())
                .unwrap_or(false)
        })
        .collect()
}

/// `P_(f x f)(delta_B)`.
pub fn kernel(p: &Doctrine, f: Arr) -> Result<Elem, DoctrineError> {
    let c = p.base();
    let d = p.delta_or_err(c.cod(f))?;
    c.product(c.dom(f), c.dom(f))?;
    let ff = c.times(f, f)?;
    Ok(p.re(ff, d))
}

/// `rho <= P_(f x f)(delta_B)`, or `None` when the comparison cannot be stated.
fn respects(p: &Doctrine, rho: Elem, f: Arr) -> Option<bool> {
    let c = p.base();
    let k = kernel(p, f).ok()?;
    let aa = c.product(c.dom(f), c.dom(f)).ok()?.apex;
    Some(p.leq(aa, rho, k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientWitness {
    pub q: Arr,
    /// `(g, h)` with `g = h . q`, one for every tested `g`.
    pub factorizations: Vec<(Arr, Arr)>,
    /// Arrows out of `A` whose codomain carries no fibered equality, so could not be tested.
    pub untested: u64,
}

/// The quotient property of `q` for `rho`; `None` when the codomain of `q` carries no
/// fibered equality; `Err` carries the failing reason.
pub fn quotient_check(p: &Doctrine, rho: Elem, q: Arr) -> Option<Result<QuotientWitness, String>> {
    let c = p.base();
    let a = c.dom(q);
    let cc = c.cod(q);
    if !respects(p, rho, q)? {
        return Some(Err(format!(
            "{} does not respect the relation",
            describe_arrow(c, q)
        )));
    }
    let mut factorizations = Vec::new();
    let mut untested = 0;
    for &g in c.out_of(a) {
        match respects(p, rho, g) {
            None => untested += 1,
            Some(false) => {}
            Some(true) => {
                let hs: Vec<Arr> = c
                    .hom(cc, c.cod(g))
                    .iter()
                    .copied()
                    .filter(|&h| c.compose(h, q) == g)
                    .collect();
                match hs.len() {
                    1 => factorizations.push((g, hs[0])),
                    0 => {
                        return Some(Err(format!(
                            "{} does not factor through it",
                            describe_arrow(c, g)
                        )))
                    }
                    n => {
                        return Some(Err(format!(
                            "{} factors through it in {n} ways",
                            describe_arrow(c, g)
                        )))
                    }
                }
            }
        }
    }
    Some(Ok(QuotientWitness {
        q,
        factorizations,
        untested,
    }))
}

/// `q` as a claimed quotient of `rho`.
pub fn check_quotient(p: &Doctrine, rho: Elem, q: Arr) -> Line {
    let mut t = Tally::new(
        "quotient.claimed",
        "q respects rho and every rho-compatible arrow factors through q exactly once",
    );
    match quotient_check(p, rho, q) {
        None => t.skip(),
        Some(Ok(_)) => t.ok(),
        Some(Err(why)) => t.fail(|| why),
    }
    t.finish()
}

pub fn is_quotient(p: &Doctrine, rho: Elem, q: Arr) -> Option<bool> {
    quotient_check(p, rho, q).map(|r| r.is_ok())
}

/// Every quotient of `rho` in the window.
pub fn find_quotients(p: &Doctrine, a: Obj, rho: Elem) -> Vec<QuotientWitness> {
    p.base()
        .out_of(a)
        .par_iter()
        .filter_map(|&q| match quotient_check(p, rho, q) {
            Some(Ok(w)) => Some(w),
            _ => None,
        })
        .collect()
}

/// `rho = P_(q x q)(delta_C)`.
pub fn is_effective(p: &Doctrine, rho: Elem, q: Arr) -> bool {
    kernel(p, q).map(|k| k == rho).unwrap_or(false)
}

fn stability_tally(p: &Doctrine, q: Arr) -> Tally {
    let c = p.base();
    let mut t = Tally::new(
        "quotient.stable",
        "every pullback of the quotient is again a quotient (of its kernel)",
    );
    for &f in c.into(c.cod(q)) {
        for sq in c.find_pullbacks(q, f, false) {
            let qq = sq.q;
            let Ok(k) = kernel(p, qq) else {
                t.skip();
                continue;
            };
            match quotient_check(p, k, qq) {
                None => t.skip(),
                Some(Ok(_)) => t.ok(),
                Some(Err(why)) => t.fail(|| {
                    format!(
                        "pullback of {} along {}: {} is not a quotient of its kernel ({why})",
                        describe_arrow(c, q),
                        describe_arrow(c, f),
                        describe_arrow(c, qq)
                    )
                }),
            }
        }
    }
    t
}

/// Stability of a quotient under every strong pullback in the window.
pub fn is_stable_quotient(p: &Doctrine, q: Arr) -> Report {
    let mut r = Report::new("stability");
    r.push(stability_tally(p, q).finish());
    r
}

/// `Des(rho)`: the `alpha` with `P_pr1(alpha) meet rho <= P_pr2(alpha)`, and its inclusion.
pub fn descent_data(
    p: &Doctrine,
    a: Obj,
    rho: Elem,
) -> Result<(InfSemilattice, Vec<Elem>), DoctrineError> {
    let cell = p.base().product(a, a)?;
    let keep = |al: Elem| {
        p.leq(
            cell.apex,
            p.meet(cell.apex, p.re(cell.pr1, al), rho),
            p.re(cell.pr2, al),
        )
    };
    Ok(p.fiber(a).sub(keep)?)
}

pub fn is_descent_datum(p: &Doctrine, a: Obj, rho: Elem, al: Elem) -> Result<bool, DoctrineError> {
    let cell = p.base().product(a, a)?;
    Ok(p.leq(
        cell.apex,
        p.meet(cell.apex, p.re(cell.pr1, al), rho),
        p.re(cell.pr2, al),
    ))
}

/// Every claimed element of `Des(rho)` really is a descent datum.
pub fn check_descent_data(p: &Doctrine, a: Obj, rho: Elem, claimed: &[Elem]) -> Line {
    let mut t = Tally::new(
        "descent.datum",
        "P_pr1(alpha) meet rho <= P_pr2(alpha) for every claimed descent datum",
    );
    for &al in claimed {
        match is_descent_datum(p, a, rho, al) {
            Ok(true) => t.ok(),
            Ok(false) => t.fail(|| {
                format!(
                    "{} is not compatible with {}",
                    describe_elem(p, a, al),
                    describe_elem(p, p.base().product(a, a).unwrap().apex, rho)
                )
            }),
            Err(e) => t.structural(|| e.to_string()),
        }
    }
    t.finish()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentVerdict {
    /// `P_f` maps `P(B)` into the descent data of the kernel.
    pub lands: bool,
    /// `P_f` reflects the order.
    pub descent: bool,
    /// Additionally onto the descent data.
    pub effective: bool,
    pub witness: Option<String>,
}

pub fn descent_verdict(p: &Doctrine, f: Arr) -> Result<DescentVerdict, DoctrineError> {
    let c = p.base();
    let (a, b) = (c.dom(f), c.cod(f));
    let k = kernel(p, f)?;
    let mut witness = None;
    let fb = p.fiber(b);
    let mut lands = true;
    for be in fb.elements() {
        if !is_descent_datum(p, a, k, p.re(f, be))? {
            lands = false;
            witness.get_or_insert_with(|| format!("P_f({}) is not a descent datum", fb.label(be)));
        }
    }
    let mut descent = true;
    'o: for x in fb.elements() {
        for y in fb.elements() {
            if p.leq(a, p.re(f, x), p.re(f, y)) && !fb.leq(x, y) {
                descent = false;
                witness.get_or_insert_with(|| {
                    format!(
                        "P_f({}) <= P_f({}) but not {} <= {}",
                        fb.label(x),
                        fb.label(y),
                        fb.label(x),
                        fb.label(y)
                    )
                });
                break 'o;
            }
        }
    }
    let image: FxHashSet<Elem> = fb.elements().map(|x| p.re(f, x)).collect();
    let mut onto = true;
    for al in p.fiber(a).elements() {
        if is_descent_datum(p, a, k, al)? && !image.contains(&al) {
            onto = false;
            witness.get_or_insert_with(|| {
                format!("descent datum {} is not in the image", p.fiber(a).label(al))
            });
            break;
        }
    }
    Ok(DescentVerdict {
        lands,
        descent: lands && descent,
        effective: lands && descent && onto,
        witness,
    })
}

pub fn is_descent(p: &Doctrine, f: Arr) -> Report {
    let mut r = Report::new("descent");
    let mut t = Tally::new(
        "arrow.descent",
        "P_f : P(B) -> Des(kernel f) reflects the order",
    );
    match descent_verdict(p, f) {
        Ok(v) => t.check(v.descent, || v.witness.clone().unwrap_or_default()),
        Err(_) => t.skip(),
    }
    r.push(t.finish());
    r
}

pub fn is_effective_descent(p: &Doctrine, f: Arr) -> Report {
    let mut r = Report::new("effective descent");
    let mut t = Tally::new(
        "arrow.effective-descent",
        "P_f : P(B) -> Des(kernel f) reflects the order and is onto",
    );
    match descent_verdict(p, f) {
        Ok(v) => t.check(v.effective, || v.witness.clone().unwrap_or_default()),
        Err(_) => t.skip(),
    }
    r.push(t.finish());
    r
}

/// For each object `Y`, how many arrows `Y -> A` satisfy `P_f(alpha) = top`.
fn satisfier_counts(p: &Doctrine, a: Obj, alpha: Elem) -> Vec<usize> {
    let c = p.base();
    let mut n = vec![0; c.n_objects()];
    for &f in c.into(a) {
        let y = c.dom(f);
        if p.re(f, alpha) == p.top(y) {
            n[y] += 1;
        }
    }
    n
}

fn comprehension_with(p: &Doctrine, cand: Arr, alpha: Elem, weak: bool, counts: &[usize]) -> bool {
    let c = p.base();
    let x = c.dom(cand);
    if p.re(cand, alpha) != p.top(x) {
        return false;
    }
    let mut seen: FxHashSet<Arr> = FxHashSet::default();
    for y in c.objects() {
        let hs = c.hom(y, x);
        if !weak && hs.len() != counts[y] {
            return false;
        }
        seen.clear();
        for &h in hs {
            let k = c.compose(cand, h);
            if k == NONE {
                return false;
            }
            seen.insert(k);
        }
        if seen.len() != counts[y] || (!weak && seen.len() != hs.len()) {
            return false;
        }
    }
    true
}

/// `cand` is a (weak) comprehension of `alpha` in `P(cod cand)`.
pub fn is_comprehension(p: &Doctrine, cand: Arr, alpha: Elem, weak: bool) -> bool {
    let counts = satisfier_counts(p, p.base().cod(cand), alpha);
    comprehension_with(p, cand, alpha, weak, &counts)
}

fn candidate_objects(p: &Doctrine, counts: &[usize], weak: bool) -> Vec<Obj> {
    let c = p.base();
    c.objects()
        .filter(|&x| weak || c.objects().all(|y| c.hom(y, x).len() == counts[y]))
        .collect()
}

/// Every (weak) comprehension of `alpha` in `P(A)`.
pub fn find_comprehension(p: &Doctrine, a: Obj, alpha: Elem, weak: bool) -> Vec<Arr> {
    let c = p.base();
    let counts = satisfier_counts(p, a, alpha);
    candidate_objects(p, &counts, weak)
        .into_iter()
        .flat_map(|x| c.hom(x, a).to_vec())
        .filter(|&k| comprehension_with(p, k, alpha, weak, &counts))
        .collect()
}

/// The first (weak) comprehension found, searching codomain-compatible domains first.
pub fn first_comprehension(p: &Doctrine, a: Obj, alpha: Elem, weak: bool) -> Option<Arr> {
    let c = p.base();
    let counts = satisfier_counts(p, a, alpha);
    candidate_objects(p, &counts, weak)
        .into_iter()
        .find_map(|x| {
            c.hom(x, a)
                .iter()
                .copied()
                .find(|&k| comprehension_with(p, k, alpha, weak, &counts))
        })
}

fn factors_through(p: &Doctrine, f: Arr, g: Arr) -> bool {
    let c = p.base();
    c.hom(c.dom(f), c.dom(g))
        .iter()
        .any(|&h| c.compose(g, h) == f)
}

/// Existence of comprehensions for every element, and fullness.
pub fn has_full_comprehensions(p: &Doctrine) -> Report {
    let c = p.base();
    let mut r = Report::new(format!("comprehensions {}", p.name));
    let found: Vec<Vec<Option<Arr>>> = c
        .objects()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&a| {
            p.fiber(a)
                .elements()
                .map(|al| first_comprehension(p, a, al, false))
                .collect()
        })
        .collect();
    let mut ex = Tally::new("comprehension.exists", "every element has a comprehension");
    for a in c.objects() {
        for al in p.fiber(a).elements() {
            ex.check(found[a][al].is_some(), || {
                format!("no comprehension of {}", describe_elem(p, a, al))
            });
        }
    }
    r.push(ex.finish());
    let mut full = Tally::new(
        "comprehension.full",
        "alpha <= beta whenever the comprehension of alpha factors through that of beta",
    );
    for a in c.objects() {
        let fa = p.fiber(a);
        for al in fa.elements() {
            for be in fa.elements() {
                let (Some(ca), Some(cb)) = (found[a][al], found[a][be]) else {
                    full.skip();
                    continue;
                };
                if factors_through(p, ca, cb) {
                    full.check(fa.leq(al, be), || {
                        format!(
                            "comprehension of {} factors through that of {}",
                            describe_elem(p, a, al),
                            describe_elem(p, a, be)
                        )
                    });
                } else {
                    full.ok();
                }
            }
        }
    }
    r.push(full.finish());
    r
}

/// Every diagonal is a comprehension, and (sanity) it is one iff it is that of `delta_A`.
pub fn has_comprehensive_diagonals(p: &Doctrine) -> Report {
    let c = p.base();
    let mut r = Report::new(format!("diagonals {}", p.name));
    let mut comp = Tally::new(
        "diagonal.comprehensive",
        "every diagonal <id,id> is a comprehension",
    );
    let mut iff = Tally::new(
        "diagonal.comprehension-of-equality",
        "the diagonal is a comprehension iff it is the comprehension of delta",
    );
    for a in c.objects() {
        let (Ok(cell), Ok(d)) = (c.product(a, a), c.diagonal(a)) else {
            comp.skip();
            iff.skip();
            continue;
        };
        let some = p
            .fiber(cell.apex)
            .elements()
            .any(|al| is_comprehension(p, d, al, false));
        comp.check(some, || format!("diagonal of {}", c.object_name(a)));
        match p.delta(a) {
            Some(da) => iff.check(some == is_comprehension(p, d, da, false), || {
                format!(
                    "diagonal of {} is a comprehension, but not of delta",
                    c.object_name(a)
                )
            }),
            None => iff.skip(),
        }
    }
    r.push(comp.finish());
    r.push(iff.finish());
    r
}

/// Closure facts: kernels are equivalence relations, reindexing preserves them,
/// `P_f` lands in the descent data of its kernel, descent carriers are sub-semilattices.
pub fn closure_sweep(p: &Doctrine) -> Report {
    let c = p.base();
    let mut r = Report::new(format!("closure {}", p.name));
    let mut ker = Tally::new(
        "kernel.equivalence",
        "every kernel P_(f x f)(delta_B) is an equivalence relation",
    );
    let mut lands = Tally::new(
        "reindex.lands-in-descent",
        "P_f maps P(B) into Des(kernel f)",
    );
    let mut pres = Tally::new(
        "reindex.preserves-equivalence",
        "P_(f x f)(sigma) is an equivalence relation whenever sigma is",
    );
    let rels: Vec<Vec<Elem>> = c.objects().map(|a| equivalence_relations(p, a)).collect();
    for f in c.arrows() {
        let (a, b) = (c.dom(f), c.cod(f));
        match kernel(p, f) {
            Ok(k) => {
                let w = is_equivalence_relation(p, a, k).unwrap();
                ker.check(w.is_equivalence(), || {
                    format!(
                        "kernel of {}: {:?}",
                        describe_arrow(c, f),
                        w.clauses().iter().find(|x| x.1.fails())
                    )
                });
                let v = descent_verdict(p, f).unwrap();
                lands.check(v.lands, || {
                    format!(
                        "{}: {}",
                        describe_arrow(c, f),
                        v.witness.clone().unwrap_or_default()
                    )
                });
            }
            Err(_) => {
                ker.skip();
                lands.skip();
            }
        }
        let (Ok(ff), true) = (c.times(f, f), c.has_product(a, a)) else {
            pres.skip();
            continue;
        };
        for &s in &rels[b] {
            let t = p.re(ff, s);
            let w = is_equivalence_relation(p, a, t).unwrap();
            pres.check(w.is_equivalence(), || {
                format!(
                    "{} along {}",
                    describe_elem(p, c.dom(ff), t),
                    describe_arrow(c, f)
                )
            });
        }
    }
    r.push(ker.finish());
    r.push(pres.finish());
    r.push(lands.finish());
    let mut des = Tally::new(
        "descent.carrier",
        "descent data contain top and are closed under meets",
    );
    for a in c.objects() {
        for &rho in &rels[a] {
            match descent_data(p, a, rho) {
                Ok((l, _)) => des.check(l.elements().any(|x| x == l.top()), String::new),
                Err(e) => des.fail(|| {
                    format!(
                        "{}: {e}",
                        describe_elem(p, c.product(a, a).unwrap().apex, rho)
                    )
                }),
            }
        }
    }
    r.push(des.finish());
    r
}

/// Quotients of every in-window equivalence relation: existence, descent, stability,
/// effective descent, effectiveness of the relation, and pairwise isomorphism of quotients.
pub fn quotient_sweep(p: &Doctrine) -> Report {
    let c = p.base();
    let mut r = Report::new(format!("quotients {}", p.name));
    let mut ex = Tally::new(
        "quotient.exists",
        "every equivalence relation has a quotient",
    );
    let mut desc = Tally::new("quotient.descent", "quotients are descent arrows");
    let mut stable = Tally::new(
        "quotient.stable",
        "every pullback of the quotient is again a quotient (of its kernel)",
    );
    let mut eff = Tally::new(
        "quotient.effective-descent",
        "quotients are effective descent arrows",
    );
    let mut rel = Tally::new(
        "relation.effective",
        "every equivalence relation is the kernel of its quotient",
    );
    let mut iso = Tally::new(
        "quotient.unique-up-to-iso",
        "any two quotients of a relation are isomorphic under it",
    );
    let items: Vec<(Obj, Elem)> = c
        .objects()
        .flat_map(|a| equivalence_relations(p, a).into_iter().map(move |r| (a, r)))
        .collect();
    let results: Vec<_> = items
        .par_iter()
        .map(|&(a, rho)| {
            let qs = find_quotients(p, a, rho);
            let st = qs.first().map(|w| stability_tally(p, w.q));
            (a, rho, qs, st)
        })
        .collect();
    for (a, rho, qs, st) in results {
        let aa = c.product(a, a).unwrap().apex;
        let name = || describe_elem(p, aa, rho);
        let testable = c
            .out_of(a)
            .iter()
            .any(|&q| p.delta(c.cod(q)).is_some() && c.has_product(c.cod(q), c.cod(q)));
        if !testable {
            ex.skip();
            continue;
        }
        ex.check(!qs.is_empty(), || format!("no quotient of {}", name()));
        let Some(w) = qs.first() else { continue };
        match descent_verdict(p, w.q) {
            Ok(v) => {
                desc.check(v.descent, || {
                    format!("{} for {}", v.witness.clone().unwrap_or_default(), name())
                });
                eff.check(v.effective, || {
                    format!("{} for {}", v.witness.clone().unwrap_or_default(), name())
                });
            }
            Err(_) => {
                desc.skip();
                eff.skip();
            }
        }
        stable.merge(st.unwrap());
        rel.check(is_effective(p, rho, w.q), || {
            format!("{} is not the kernel of {}", name(), describe_arrow(c, w.q))
        });
        for other in &qs[1..] {
            let (c1, c2) = (c.cod(w.q), c.cod(other.q));
            let ok = c.hom(c1, c2).iter().any(|&h| {
                c.compose(h, w.q) == other.q
                    && c.hom(c2, c1).iter().any(|&k| {
                        c.compose(k, other.q) == w.q
                            && c.compose(k, h) == c.id(c1)
                            && c.compose(h, k) == c.id(c2)
                    })
            });
            iso.check(ok, || {
                format!(
                    "{} and {}",
                    describe_arrow(c, w.q),
                    describe_arrow(c, other.q)
                )
            });
        }
    }
    for l in [ex, desc, stable, eff, rel, iso] {
        r.push(l.finish());
    }
    r
}

/// A doctrine belongs to the quotient-complete class when every equivalence relation the
/// window can state has a quotient that is a descent arrow.
pub fn qed_membership(p: &Doctrine) -> Report {
    let q = quotient_sweep(p);
    let mut r = Report::new(format!("descent quotients {}", p.name));
    for id in ["quotient.exists", "quotient.descent"] {
        if let Some(l) = q.line(id) {
            r.push(l.clone());
        }
    }
    r
}

pub fn ced_membership(p: &Doctrine) -> Report {
    has_comprehensive_diagonals(p)
}

/// `F q` is a quotient of `R_<F pr1, F pr2>(b(rho))` for every quotient `q` of `rho`.
pub fn preserves_quotients(p: &Doctrine, q: &Doctrine, a: &DoctrineArrow) -> Tally {
    let (c, d) = (p.base(), q.base());
    let mut t = Tally::new(
        "one-arrow.preserves-quotients",
        "F q is a quotient of the transported relation",
    );
    for x in c.objects() {
        let Ok(cell) = c.product(x, x) else { continue };
        for rho in equivalence_relations(p, x) {
            for w in find_quotients(p, x, rho) {
                let Ok(m) = d.pair(a.functor.arrows[cell.pr1], a.functor.arrows[cell.pr2]) else {
                    t.skip();
                    continue;
                };
                let rho2 = q.re(m, a.b[cell.apex][rho]);
                let fq = a.functor.arrows[w.q];
                match quotient_check(q, rho2, fq) {
                    None => t.skip(),
                    Some(Ok(_)) => t.ok(),
                    Some(Err(why)) => {
                        t.fail(|| format!("image of {} ({why})", describe_arrow(c, w.q)))
                    }
                }
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{finset_sub, terminal};

    fn arrow(p: &Doctrine, name: &str) -> Arr {
        p.base().find_arrow(name).unwrap()
    }

    #[test]
    fn delta_is_an_equivalence_relation() {
        let p = finset_sub(4);
        let w = is_equivalence_relation(&p, 2, p.delta(2).unwrap()).unwrap();
        assert_eq!(w.reflexive, Clause::Holds);
        assert_eq!(w.symmetric, Clause::Holds);
        assert_eq!(w.transitive, Clause::Unstateable);
        let w = is_equivalence_relation(&p, 2, 0b1011).unwrap();
        assert!(w.symmetric.fails());
    }

    #[test]
    fn kernels_in_fs4() {
        let p = finset_sub(4);
        assert_eq!(kernel(&p, p.base().id(2)), Ok(p.delta(2).unwrap()));
        assert_eq!(kernel(&p, arrow(&p, "f2_1_00")), Ok(0b1111));
        assert_eq!(kernel(&p, arrow(&p, "f2_2_11")), Ok(0b1111));
    }

    #[test]
    fn quotient_of_full_relation_on_two() {
        let p = finset_sub(4);
        let qs = find_quotients(&p, 2, 0b1111);
        assert!(qs.iter().any(|w| w.q == arrow(&p, "f2_1_00")));
        assert!(is_effective(&p, 0b1111, arrow(&p, "f2_1_00")));
        let qs = find_quotients(&p, 2, p.delta(2).unwrap());
        assert!(qs.iter().all(|w| p.base().hom(2, 2).contains(&w.q)));
        assert!(qs.iter().any(|w| w.q == p.base().id(2)));
    }

    #[test]
    fn descent_examples() {
        let p = finset_sub(4);
        let (d, inc) = descent_data(&p, 2, 0b1111).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(inc, vec![0, 3]);
        assert!(is_effective_descent(&p, arrow(&p, "f2_1_00")).passed());
        assert!(!is_descent(&p, arrow(&p, "f1_2_0")).passed());
    }

    #[test]
    fn comprehensions_in_fs4() {
        let p = finset_sub(4);
        let cs = find_comprehension(&p, 2, 0b01, false);
        assert_eq!(cs, vec![arrow(&p, "f1_2_0")]);
        assert!(has_full_comprehensions(&p).passed());
        assert!(has_comprehensive_diagonals(&p).passed());
    }

    #[test]
    fn terminal_quotients_are_trivial() {
        let t = terminal();
        assert!(quotient_sweep(&t).passed());
        assert!(closure_sweep(&t).passed());
    }
}
