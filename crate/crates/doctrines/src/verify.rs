//! Suite runner, universal properties of the units by enumeration, and equivalence search.

use crate::completions::{
    complete_d, complete_gr, complete_q, complete_x, eqc, CompletionError, CompletionResult,
    EqcMode,
};
use crate::doctrine::{
    check_doctrine, check_elementary, check_one_arrow, check_two_arrow, describe_elem,
    enumerate_one_arrows, enumerate_two_cells, Doctrine, Doctrine2Cell, DoctrineArrow, ExtEquality,
};
use crate::fincat::{describe_arrow, Arr, CatWindow, Obj};
use crate::infsl::{is_order_iso, Elem};
use crate::logic::{
    ced_membership, closure_sweep, descent_data, equivalence_relations, find_comprehension,
    find_quotients, has_comprehensive_diagonals, has_full_comprehensions, is_comprehension,
    preserves_quotients, qed_membership, quotient_check, quotient_sweep,
};
use crate::report::{Coverage, Line, Report, Status, Tally};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Build the completions and re-run the suite on each.
    pub completions: bool,
    /// Include the comprehension completion (and the composite through it).
    pub with_gr: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            completions: true,
            with_gr: true,
        }
    }
}

fn single(check: &str, status: Status, detail: impl Into<String>, witness: Option<String>) -> Line {
    Line {
        check: check.into(),
        status,
        coverage: Coverage {
            checked: u64::from(matches!(status, Status::Pass | Status::Fail)),
            unstateable: u64::from(status == Status::Unstateable),
        },
        detail: detail.into(),
        witness,
    }
}

/// Lines recording properties a doctrine may lack; they fail a run only when required.
pub const PROPERTY_LINES: [&str; 8] = [
    "quotient.exists",
    "quotient.descent",
    "quotient.stable",
    "quotient.effective-descent",
    "relation.effective",
    "comprehension.exists",
    "comprehension.full",
    "diagonal.comprehensive",
];

/// The properties the quotient completion always has.
pub const QUOTIENT_PROPERTIES: [&str; 5] = [
    "quotient.exists",
    "quotient.descent",
    "quotient.stable",
    "quotient.effective-descent",
    "relation.effective",
];

/// Structure, elementary axioms, closure properties, quotients, comprehensions and diagonals.
/// Property lines outside `required` are reported as information.
pub fn base_suite(p: &Doctrine, required: &[&str]) -> Report {
    let mut r = check_doctrine(p);
    r.subject = format!("suite {}", p.name);
    if r.has_structural() {
        return r;
    }
    for sub in [
        check_elementary(p),
        closure_sweep(p),
        quotient_sweep(p),
        has_full_comprehensions(p),
        has_comprehensive_diagonals(p),
    ] {
        r.absorb("", sub);
    }
    for l in &mut r.lines {
        if PROPERTY_LINES.contains(&l.check.as_str())
            && !required.contains(&l.check.as_str())
            && l.status == Status::Fail
        {
            l.status = Status::Info;
            l.detail = format!("{} (does not hold)", l.detail);
        }
    }
    r
}

fn passes(r: &Report, ids: &[&str]) -> bool {
    ids.iter().all(|id| {
        r.line(id)
            .is_some_and(|l| matches!(l.status, Status::Pass | Status::Vacuous))
    })
}

/// `to` holds wherever `from` holds.
fn inherits(check: &str, detail: &str, from: &Report, to: &Report, ids: &[&str]) -> Line {
    if !passes(from, ids) {
        return single(
            check,
            Status::Vacuous,
            format!("{detail} (the input lacks it)"),
            None,
        );
    }
    if passes(to, ids) {
        single(check, Status::Pass, detail, None)
    } else {
        let w = ids
            .iter()
            .filter_map(|id| to.line(id))
            .find(|l| l.is_failure() || l.status == Status::Unstateable)
            .map(|l| format!("{}: {}", l.check, l.witness.clone().unwrap_or_default()));
        single(check, Status::Fail, detail, w)
    }
}

/// The unit's functor is a bijection on every hom-set.
pub fn unit_full_faithful(src: &Doctrine, dst: &Doctrine, unit: &DoctrineArrow) -> Line {
    let (c, d) = (src.base(), dst.base());
    let mut t = Tally::new(
        "unit.full-faithful",
        "the unit is a bijection on every hom-set",
    );
    for a in c.objects() {
        for b in c.objects() {
            let mut img: Vec<Arr> = c
                .hom(a, b)
                .iter()
                .map(|&f| unit.functor.arrows[f])
                .collect();
            img.sort_unstable();
            img.dedup();
            let target = d.hom(unit.functor.objects[a], unit.functor.objects[b]);
            t.check(
                img.len() == c.hom(a, b).len() && img.len() == target.len(),
                || {
                    format!(
                        "hom({}, {}): {} arrows, {} distinct images, {} in the target",
                        c.object_name(a),
                        c.object_name(b),
                        c.hom(a, b).len(),
                        img.len(),
                        target.len()
                    )
                },
            );
        }
    }
    t.finish()
}

/// All quotient arrows of the window, with the relation they quotient.
fn quotient_arrows(q: &Doctrine) -> Vec<(Obj, Elem, Arr)> {
    let c = q.base();
    let mut out = Vec::new();
    for x in c.objects() {
        if !c.has_product(x, x) {
            continue;
        }
        for rho in equivalence_relations(q, x) {
            for w in find_quotients(q, x, rho) {
                out.push((x, rho, w.q));
            }
        }
    }
    out
}

fn q_postconditions(
    p: &Doctrine,
    qr: &CompletionResult,
    base_p: &Report,
    base_q: &Report,
) -> Report {
    let q = &qr.doctrine;
    let (c, d) = (qr.source.base(), q.base());
    let j = &qr.unit;
    let mut r = Report::new("quotient completion postconditions");
    r.push(unit_full_faithful(&qr.source, q, j));
    let quots = quotient_arrows(q);
    let mut proj = Tally::new(
        "q.units-projective",
        "every J(A) is projective with respect to quotients",
    );
    for a in c.objects() {
        let ja = j.functor.objects[a];
        for &(_, _, qa) in &quots {
            let (dom, cod) = (d.dom(qa), d.cod(qa));
            for &g in d.hom(ja, cod) {
                let lifts = d.hom(ja, dom).iter().any(|&h| d.compose(qa, h) == g);
                proj.check(lifts, || {
                    format!(
                        "{} does not lift along {}",
                        describe_arrow(d, g),
                        describe_arrow(d, qa)
                    )
                });
            }
        }
    }
    r.push(proj.finish());
    let mut cover = Tally::new(
        "q.covered-by-units",
        "every (A,rho) is a quotient of J(A) under the identity of A",
    );
    if let ExtEquality::Relations { rel, .. } = &q.ext {
        let jo: Vec<Option<Obj>> = d
            .objects()
            .map(|o| c.objects().find(|&a| j.functor.objects[a] == o))
            .collect();
        for o in d.objects() {
            let (a, rho) = rel[o];
            let Some(ja) = d.objects().find(|&x| jo[x].is_some() && rel[x].0 == a) else {
                cover.skip();
                continue;
            };
            let Ok(cell) = d.product(ja, ja) else {
                cover.skip();
                continue;
            };
            let Some(&e) = d
                .hom(ja, o)
                .iter()
                .find(|&&e| qr.arrow_under[e] == p.base().id(a))
            else {
                cover.fail(|| format!("no arrow over the identity into {}", d.object_name(o)));
                continue;
            };
            let (ap, sig) = rel[cell.apex];
            let inc = match descent_data(p, ap, sig) {
                Ok((_, inc)) => inc,
                Err(err) => {
                    cover.fail(|| err.to_string());
                    continue;
                }
            };
            let Ok(loc) = inc.binary_search(&rho) else {
                cover.fail(|| {
                    format!(
                        "the relation of {} is not a descent datum on the square",
                        d.object_name(o)
                    )
                });
                continue;
            };
            match quotient_check(q, loc, e) {
                Some(Ok(_)) => cover.ok(),
                Some(Err(why)) => cover.fail(|| format!("{}: {why}", d.object_name(o))),
                None => cover.skip(),
            }
        }
    }
    r.push(cover.finish());
    r.push(inherits(
        "q.inherits-comprehensions",
        "the quotient completion has comprehensions when the input does",
        base_p,
        base_q,
        &["comprehension.exists"],
    ));
    let mut jc = Tally::new(
        "q.unit-comprehension-criterion",
        "J(c) is a comprehension of j(alpha) iff delta_X = P_(c x c)(delta_A)",
    );
    for a in c.objects() {
        let a0 = qr.source_objects[a];
        for al in p.fiber(a0).elements() {
            for cmp in find_comprehension(&qr.source, a, al, false) {
                let x = c.dom(cmp);
                let (Some(dx), Some(da), Ok(cc)) =
                    (qr.source.delta(x), qr.source.delta(a), c.times(cmp, cmp))
                else {
                    jc.skip();
                    continue;
                };
                let criterion = dx == qr.source.re(cc, da);
                let holds = is_comprehension(q, j.functor.arrows[cmp], j.b[a][al], false);
                jc.check(holds == criterion, || {
                    format!(
                        "{} for {}: comprehension {holds}, criterion {criterion}",
                        describe_arrow(c, cmp),
                        describe_elem(&qr.source, a, al)
                    )
                });
            }
        }
    }
    r.push(jc.finish());
    r
}

fn x_postconditions(
    p: &Doctrine,
    xr: &CompletionResult,
    base_p: &Report,
    base_x: &Report,
) -> Report {
    let x = &xr.doctrine;
    let mut r = Report::new("extensional collapse postconditions");
    r.push(preserves_quotients(p, x, &xr.unit).finish());
    r.push(inherits(
        "x.inherits-descent-quotients",
        "the collapse has descent quotients when the input does",
        base_p,
        base_x,
        &["quotient.exists", "quotient.descent"],
    ));
    r.push(inherits(
        "x.inherits-comprehensions",
        "the collapse has comprehensions when the input does",
        base_p,
        base_x,
        &["comprehension.exists"],
    ));
    r.push(preserves_comprehensions(
        p,
        x,
        &xr.unit,
        "x.unit-preserves-comprehensions",
    ));
    r
}

/// `F c` is a comprehension of `b(alpha)` for every comprehension `c` of `alpha`.
pub fn preserves_comprehensions(
    p: &Doctrine,
    q: &Doctrine,
    f: &DoctrineArrow,
    check: &str,
) -> Line {
    let c = p.base();
    let mut t = Tally::new(
        check,
        "the image of a comprehension of alpha is a comprehension of b(alpha)",
    );
    for a in c.objects() {
        for al in p.fiber(a).elements() {
            for cmp in find_comprehension(p, a, al, false) {
                t.check(
                    is_comprehension(q, f.functor.arrows[cmp], f.b[a][al], false),
                    || format!("{} for {}", describe_arrow(c, cmp), describe_elem(p, a, al)),
                );
            }
        }
    }
    t.finish()
}

fn construction_failure(check: &str, e: &CompletionError) -> Line {
    single(
        check,
        Status::Fail,
        "the completion could not be built",
        Some(e.to_string()),
    )
}

fn completion_block(
    r: &mut Report,
    prefix: &str,
    built: Result<CompletionResult, CompletionError>,
    required: &[&str],
    extra: impl FnOnce(&CompletionResult, &Report) -> Report,
) -> Option<CompletionResult> {
    match built {
        Ok(res) => {
            r.push(single(
                &format!("{prefix}.construction"),
                Status::Pass,
                format!(
                    "{} built: {} objects, {} arrows",
                    res.doctrine.name,
                    res.doctrine.base().n_objects(),
                    res.doctrine.base().n_arrows()
                ),
                None,
            ));
            r.absorb(prefix, res.construction.clone());
            let suite = base_suite(&res.doctrine, required);
            r.absorb(prefix, suite.clone());
            r.absorb(
                &format!("{prefix}/unit"),
                check_one_arrow(&res.source, &res.doctrine, &res.unit),
            );
            r.absorb(prefix, extra(&res, &suite));
            Some(res)
        }
        Err(e) => {
            r.push(construction_failure(&format!("{prefix}.construction"), &e));
            None
        }
    }
}

/// Every check on `p`, then on each completion with its postconditions.
pub fn run_suite(p: &Arc<Doctrine>, config: SuiteConfig) -> Report {
    let base = base_suite(p, &[]);
    let mut r = base.clone();
    if !config.completions || r.has_structural() {
        return r;
    }
    completion_block(&mut r, "q", complete_q(p), &QUOTIENT_PROPERTIES, |q, s| {
        q_postconditions(p, q, &base, s)
    });
    completion_block(
        &mut r,
        "x",
        complete_x(p),
        &["diagonal.comprehensive"],
        |x, s| x_postconditions(p, x, &base, s),
    );
    if config.with_gr {
        completion_block(
            &mut r,
            "gr",
            complete_gr(p),
            &["comprehension.exists", "comprehension.full"],
            |g, _| {
                let mut e = Report::new("comprehension completion postconditions");
                e.push(unit_full_faithful(&g.source, &g.doctrine, &g.unit));
                e
            },
        );
    }
    match complete_d(p) {
        Err(CompletionError::NoWeakComprehension(w)) => r.push(single(
            "d.construction",
            Status::Unstateable,
            "the retract completion needs weak comprehensions",
            Some(w),
        )),
        built => {
            completion_block(&mut r, "d", built, &["comprehension.exists"], |d, _| {
                let mut e = Report::new("retract completion postconditions");
                e.push(preserves_comprehensions(
                    &d.source,
                    &d.doctrine,
                    &d.unit,
                    "d.unit-preserves-comprehensions",
                ));
                e
            });
        }
    }
    let (mode, required): (_, &[&str]) = if config.with_gr {
        (
            EqcMode::WithComprehensions,
            &[
                "quotient.exists",
                "quotient.descent",
                "comprehension.exists",
                "diagonal.comprehensive",
            ],
        )
    } else {
        (
            EqcMode::WithoutComprehensions,
            &[
                "quotient.exists",
                "quotient.descent",
                "diagonal.comprehensive",
            ],
        )
    };
    completion_block(
        &mut r,
        "eqc",
        eqc(p, mode).map(|e| e.result),
        required,
        |_, _| Report::new("eqc"),
    );
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniversalKind {
    /// Targets with descent quotients; 1-arrows out of the completion preserve quotients.
    Quotients,
    /// Targets with comprehensive diagonals.
    Extensional,
}

pub fn check_universal_q(p: &Arc<Doctrine>, z: &Doctrine, budget: u64) -> Report {
    match complete_q(p) {
        Ok(q) => check_universal_with(&q, z, UniversalKind::Quotients, budget),
        Err(e) => {
            let mut r = Report::new("universal property");
            r.push(construction_failure("universal.construction", &e));
            r
        }
    }
}

pub fn check_universal_x(p: &Arc<Doctrine>, z: &Doctrine, budget: u64) -> Report {
    match complete_x(p) {
        Ok(x) => check_universal_with(&x, z, UniversalKind::Extensional, budget),
        Err(e) => {
            let mut r = Report::new("universal property");
            r.push(construction_failure("universal.construction", &e));
            r
        }
    }
}

/// Invertible 2-cells between `f` and `g`, if any.
pub fn invertible_two_cell(
    p: &Doctrine,
    q: &Doctrine,
    f: &DoctrineArrow,
    g: &DoctrineArrow,
) -> Option<(Doctrine2Cell, Doctrine2Cell)> {
    let d = q.base();
    let there = enumerate_two_cells(p, q, f, g);
    if there.is_empty() {
        return None;
    }
    let back = enumerate_two_cells(p, q, g, f);
    for t in &there {
        for s in &back {
            let inverse = p.base().objects().all(|a| {
                d.compose(t.components[a], s.components[a]) == d.id(f.functor.objects[a])
                    && d.compose(s.components[a], t.components[a]) == d.id(g.functor.objects[a])
            });
            if inverse {
                return Some((t.clone(), s.clone()));
            }
        }
    }
    None
}

/// Precomposition with the unit is essentially surjective and full and faithful, from
/// 1-arrows out of the completion to 1-arrows out of the unit's source.
pub fn check_universal_with(
    res: &CompletionResult,
    z: &Doctrine,
    kind: UniversalKind,
    budget: u64,
) -> Report {
    let src = &res.source;
    let done = &res.doctrine;
    let mut r = Report::new(format!(
        "universal property of {} against {}",
        done.name, z.name
    ));
    let member = match kind {
        UniversalKind::Quotients => qed_membership(z),
        UniversalKind::Extensional => ced_membership(z),
    };
    let ok = member.passed();
    r.absorb("target", member);
    if !ok {
        return r;
    }
    let unit = check_one_arrow(src, done, &res.unit);
    let unit_ok = unit.passed();
    r.push(single(
        "universal.unit-is-one-arrow",
        if unit_ok { Status::Pass } else { Status::Fail },
        "the unit is a 1-arrow",
        unit.failures()
            .next()
            .map(|l| format!("{}: {}", l.check, l.witness.clone().unwrap_or_default())),
    ));
    let lower = enumerate_one_arrows(src, z, budget);
    let upper_all = enumerate_one_arrows(done, z, budget);
    let exhaustive = lower.exhaustive && upper_all.exhaustive;
    r.push(single(
        "universal.enumeration-exhaustive",
        if exhaustive {
            Status::Pass
        } else {
            Status::Fail
        },
        format!(
            "{} 1-arrows from the source and {} from the completion ({} search nodes)",
            lower.items.len(),
            upper_all.items.len(),
            lower.explored + upper_all.explored
        ),
        (!exhaustive).then(|| format!("budget of {budget} nodes exhausted")),
    ));
    let upper: Vec<DoctrineArrow> = match kind {
        UniversalKind::Quotients => upper_all
            .items
            .into_par_iter()
            .filter(|f| !preserves_quotients(done, z, f).failed())
            .collect(),
        UniversalKind::Extensional => upper_all.items,
    };
    let pre: Vec<DoctrineArrow> = upper.iter().map(|f| res.unit.then(f)).collect();
    let mut lands = Tally::new(
        "universal.precomposition-lands",
        "F . unit is a 1-arrow out of the source",
    );
    for g in &pre {
        let rep = check_one_arrow(src, z, g);
        lands.check(rep.passed(), || {
            rep.failures()
                .next()
                .map(|l| format!("{}: {}", l.check, l.witness.clone().unwrap_or_default()))
                .unwrap_or_default()
        });
    }
    r.push(lands.finish());
    let found: Vec<bool> = lower
        .items
        .par_iter()
        .map(|g| {
            pre.iter()
                .any(|h| invertible_two_cell(src, z, h, g).is_some())
        })
        .collect();
    let mut es = Tally::new(
        "universal.essentially-surjective",
        "every 1-arrow out of the source is isomorphic to some F . unit",
    );
    for (i, &hit) in found.iter().enumerate() {
        es.check(hit, || {
            format!("1-arrow #{i} out of {} has no extension", src.name)
        });
    }
    r.push(es.finish());
    let pairs: Vec<(usize, usize)> = (0..upper.len())
        .flat_map(|i| (0..upper.len()).map(move |k| (i, k)))
        .collect();
    let verdicts: Vec<Result<(), String>> = pairs
        .par_iter()
        .map(|&(i, k)| {
            let above = enumerate_two_cells(done, z, &upper[i], &upper[k]);
            let below = enumerate_two_cells(src, z, &pre[i], &pre[k]);
            let mut img: Vec<Vec<Arr>> = above
                .iter()
                .map(|t| {
                    src.base()
                        .objects()
                        .map(|a| t.components[res.unit.functor.objects[a]])
                        .collect()
                })
                .collect();
            img.sort();
            img.dedup();
            if img.len() != above.len() {
                return Err(format!(
                    "2-cells #{i} => #{k}: restriction is not injective"
                ));
            }
            for t in &img {
                let cell = Doctrine2Cell {
                    components: t.clone(),
                };
                if !check_two_arrow(src, z, &pre[i], &pre[k], &cell).passed() {
                    return Err(format!(
                        "2-cells #{i} => #{k}: a restriction is not a 2-cell"
                    ));
                }
            }
            if img.len() != below.len() {
                return Err(format!(
                    "2-cells #{i} => #{k}: {} above, {} below",
                    above.len(),
                    below.len()
                ));
            }
            Ok(())
        })
        .collect();
    let mut ff = Tally::new(
        "universal.full-faithful",
        "restricting 2-cells along the unit is a bijection for every pair of 1-arrows",
    );
    for v in verdicts {
        match v {
            Ok(()) => ff.ok(),
            Err(w) => ff.fail(|| w),
        }
    }
    r.push(ff.finish());
    r
}

fn iso_in(d: &CatWindow, a: Obj, b: Obj) -> bool {
    d.hom(a, b).iter().any(|&u| {
        d.hom(b, a)
            .iter()
            .any(|&v| d.compose(v, u) == d.id(a) && d.compose(u, v) == d.id(b))
    })
}

/// A 1-arrow that is full, faithful, essentially surjective, and an order iso on fibers.
pub fn check_equivalence_arrow(p: &Doctrine, r: &Doctrine, f: &DoctrineArrow) -> Report {
    let (c, d) = (p.base(), r.base());
    let mut rep = Report::new(format!("equivalence {} -> {}", p.name, r.name));
    let one = check_one_arrow(p, r, f);
    let broken = !one.passed();
    rep.absorb("", one);
    if broken {
        return rep;
    }
    let mut full = Tally::new(
        "equivalence.full-faithful",
        "the functor is a bijection on every hom-set",
    );
    for a in c.objects() {
        for b in c.objects() {
            let mut img: Vec<Arr> = c.hom(a, b).iter().map(|&g| f.functor.arrows[g]).collect();
            img.sort_unstable();
            img.dedup();
            let n = d.hom(f.functor.objects[a], f.functor.objects[b]).len();
            full.check(img.len() == c.hom(a, b).len() && img.len() == n, || {
                format!("hom({}, {})", c.object_name(a), c.object_name(b))
            });
        }
    }
    rep.push(full.finish());
    let mut es = Tally::new(
        "equivalence.essentially-surjective",
        "every target object is isomorphic to an image",
    );
    for o in d.objects() {
        es.check(
            c.objects().any(|a| iso_in(d, f.functor.objects[a], o)),
            || format!("{} is not isomorphic to any image", d.object_name(o)),
        );
    }
    rep.push(es.finish());
    let mut fi = Tally::new("equivalence.fiber-iso", "every b_A is an order isomorphism");
    for a in c.objects() {
        fi.check(
            is_order_iso(p.fiber(a), r.fiber(f.functor.objects[a]), &f.b[a]),
            || format!("b at {}", c.object_name(a)),
        );
    }
    rep.push(fi.finish());
    rep
}

#[derive(Clone, Debug)]
pub struct EquivalenceSearch {
    /// `F : P -> R` and `G : R -> P` with invertible 2-cells `G F ~ id` and `F G ~ id`.
    pub witness: Option<(DoctrineArrow, DoctrineArrow)>,
    pub exhaustive: bool,
    /// 1-arrows examined in each direction.
    pub candidates: (usize, usize),
    /// The best forward candidate's report, or the first one when none passes.
    pub report: Report,
}

/// Search for an equivalence pair of 1-arrows between `p` and `r`.
pub fn doctrine_equivalence(p: &Doctrine, r: &Doctrine, budget: u64) -> EquivalenceSearch {
    let fwd = enumerate_one_arrows(p, r, budget);
    let back = enumerate_one_arrows(r, p, budget);
    let exhaustive = fwd.exhaustive && back.exhaustive;
    let idp = DoctrineArrow::identity(p);
    let idr = DoctrineArrow::identity(r);
    let mut first: Option<Report> = None;
    for f in &fwd.items {
        let rep = check_equivalence_arrow(p, r, f);
        if !rep.passed() {
            first.get_or_insert(rep);
            continue;
        }
        for g in &back.items {
            if invertible_two_cell(p, p, &f.then(g), &idp).is_some()
                && invertible_two_cell(r, r, &g.then(f), &idr).is_some()
            {
                return EquivalenceSearch {
                    witness: Some((f.clone(), g.clone())),
                    exhaustive,
                    candidates: (fwd.items.len(), back.items.len()),
                    report: rep,
                };
            }
        }
        first.get_or_insert(rep);
    }
    let mut report =
        first.unwrap_or_else(|| Report::new(format!("equivalence {} -> {}", p.name, r.name)));
    report.push(single(
        "equivalence.witness",
        Status::Fail,
        format!(
            "{} and {} 1-arrows examined",
            fwd.items.len(),
            back.items.len()
        ),
        Some(if exhaustive {
            "no equivalence pair exists".into()
        } else {
            format!("budget of {budget} nodes exhausted")
        }),
    ));
    EquivalenceSearch {
        witness: None,
        exhaustive,
        candidates: (fwd.items.len(), back.items.len()),
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{blur, finset_sub, finset_weaksub, posetal, terminal, two};
    use crate::infsl::InfSemilattice;

    #[test]
    fn terminal_suite_passes() {
        let t = Arc::new(terminal());
        let r = run_suite(&t, SuiteConfig::default());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn universal_q_posetal_into_fs2() {
        let p = Arc::new(posetal(
            &InfSemilattice::chain(2),
            &InfSemilattice::chain(2),
        ));
        let z = finset_sub(2);
        let r = check_universal_q(&p, &z, 1_000_000);
        assert!(r.passed(), "{r}");
        assert_eq!(
            r.line("universal.essentially-surjective")
                .unwrap()
                .coverage
                .checked,
            5
        );
    }

    #[test]
    fn universal_x_blur() {
        let p = Arc::new(blur());
        let z = complete_x(&p).unwrap().doctrine;
        let r = check_universal_x(&p, &z, 1_000_000);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn two_has_three_arrows_into_fs4() {
        let e = enumerate_one_arrows(&two(), &finset_sub(4), 1_000_000);
        assert!(e.exhaustive);
        assert_eq!(e.items.len(), 3);
    }

    #[test]
    fn sub_and_weaksub_are_equivalent() {
        let s = doctrine_equivalence(&finset_sub(2), &finset_weaksub(2), 1_000_000);
        assert!(s.witness.is_some(), "{}", s.report);
        let none = doctrine_equivalence(&terminal(), &two(), 1_000_000);
        assert!(none.witness.is_none() && none.exhaustive);
    }
}
