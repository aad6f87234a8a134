//! Free completions of an elementary doctrine: quotients (Q), extensional collapse (X),
//! comprehensions (Gr), retracts of weak comprehensions (D), and their composite.

use crate::doctrine::{
    boxtimes_paired, describe_elem, Doctrine, DoctrineArrow, DoctrineError, ExtEquality,
};
use crate::fincat::{
    describe_arrow, Arr, ArrowInfo, CatWindow, FunctorData, Obj, ProductCell, WindowError, NONE,
};
use crate::infsl::{Elem, InfSemilattice, InfslError};
use crate::logic::{
    descent_data, equivalence_relations, find_comprehension, is_equivalence_relation,
};
use crate::report::{Report, Tally};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error(transparent)]
    Doctrine(#[from] DoctrineError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Infsl(#[from] InfslError),
    #[error("no weak comprehension of {0}")]
    NoWeakComprehension(String),
    #[error("construction invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Debug)]
pub struct CompletionResult {
    pub doctrine: Arc<Doctrine>,
    /// Domain of the unit: the input, or its restriction to the objects the construction uses.
    pub source: Arc<Doctrine>,
    /// Source objects and arrows as objects and arrows of the input.
    pub source_objects: Vec<Obj>,
    pub source_arrows: Vec<Arr>,
    pub unit: DoctrineArrow,
    /// Underlying input object of every completed object.
    pub object_under: Vec<Obj>,
    /// Underlying input arrow (the representative, for quotiented hom-sets) of every completed arrow.
    pub arrow_under: Vec<Arr>,
    /// Facts asserted while building, as report lines.
    pub construction: Report,
}

fn local(inc: &[Elem], x: Elem) -> Option<Elem> {
    inc.binary_search(&x).ok()
}

/// `id_(object)` for identities, `f:source>target` otherwise.
fn arrow_label(c: &CatWindow, f: Arr, s: Obj, t: Obj, names: &[String]) -> String {
    if s == t && c.is_identity(f) {
        format!("id_{}", names[s])
    } else {
        format!("{}:{}>{}", c.arrow_name(f), names[s], names[t])
    }
}

fn invariant(msg: impl Into<String>) -> CompletionError {
    CompletionError::Invariant(msg.into())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Merge, keeping the smaller id as root; true if the classes were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

fn identity_source(p: &Arc<Doctrine>) -> (Arc<Doctrine>, Vec<Obj>, Vec<Arr>) {
    (
        p.clone(),
        p.base().objects().collect(),
        p.base().arrows().collect(),
    )
}

fn restricted_source(p: &Doctrine, keep: &[Obj]) -> (Arc<Doctrine>, Vec<Obj>, Vec<Arr>) {
    let (d, r) = p.restrict(keep);
    (Arc::new(d), r.obj_old, r.arr_old)
}

/// Objects `(A, alpha)`, arrows `f` with `alpha <= P_f(beta)`, fibers the downsets of
/// `alpha`, and fibered equality `P_pr1(alpha) meet delta_A`.
pub fn complete_gr(p: &Arc<Doctrine>) -> Result<CompletionResult, CompletionError> {
    let c = p.base();
    let mut obj_of: Vec<Vec<Obj>> = Vec::new();
    let mut names = Vec::new();
    let mut under_obj = Vec::new();
    let mut top_of = Vec::new();
    for a in c.objects() {
        let f = p.fiber(a);
        obj_of.push(
            f.elements()
                .map(|al| {
                    names.push(format!("({},{})", c.object_name(a), f.label(al)));
                    under_obj.push(a);
                    top_of.push(al);
                    names.len() - 1
                })
                .collect(),
        );
    }
    let per_arrow: Vec<Vec<(Obj, Obj)>> = (0..c.n_arrows())
        .into_par_iter()
        .map(|f| {
            let (a, b) = (c.dom(f), c.cod(f));
            let mut v = Vec::new();
            for al in p.fiber(a).elements() {
                for be in p.fiber(b).elements() {
                    if p.leq(a, al, p.re(f, be)) {
                        v.push((obj_of[a][al], obj_of[b][be]));
                    }
                }
            }
            v
        })
        .collect();
    let mut arrows = Vec::new();
    let mut under = Vec::new();
    let mut index: FxHashMap<(Arr, Obj, Obj), Arr> = FxHashMap::default();
    for (f, v) in per_arrow.into_iter().enumerate() {
        for (s, t) in v {
            index.insert((f, s, t), arrows.len());
            arrows.push(ArrowInfo {
                name: arrow_label(c, f, s, t, &names),
                dom: s,
                cod: t,
            });
            under.push(f);
        }
    }
    let identity: Vec<Arr> = (0..names.len())
        .map(|o| index[&(c.id(under_obj[o]), o, o)])
        .collect();
    let mut products = BTreeMap::new();
    for (&(a, b), cell) in c.products() {
        for al in p.fiber(a).elements() {
            for be in p.fiber(b).elements() {
                let g = p.meet(cell.apex, p.re(cell.pr1, al), p.re(cell.pr2, be));
                let apex = obj_of[cell.apex][g];
                let (oa, ob) = (obj_of[a][al], obj_of[b][be]);
                let pr1 = *index
                    .get(&(cell.pr1, apex, oa))
                    .ok_or_else(|| invariant("first projection of a product is not an arrow"))?;
                let pr2 = *index
                    .get(&(cell.pr2, apex, ob))
                    .ok_or_else(|| invariant("second projection of a product is not an arrow"))?;
                products.insert((oa, ob), ProductCell { apex, pr1, pr2 });
            }
        }
    }
    let downs: Vec<(Arc<InfSemilattice>, Vec<Elem>)> = (0..names.len())
        .map(|o| {
            let (l, inc) = p.fiber(under_obj[o]).downset(top_of[o]);
            (Arc::new(l), inc)
        })
        .collect();
    let reindex: Vec<Vec<Elem>> = (0..arrows.len())
        .into_par_iter()
        .map(|k| {
            let (s, t, f) = (arrows[k].dom, arrows[k].cod, under[k]);
            let a = under_obj[s];
            downs[t]
                .1
                .iter()
                .map(|&g| local(&downs[s].1, p.meet(a, top_of[s], p.re(f, g))).unwrap())
                .collect()
        })
        .collect();
    let mut construction = Report::new("comprehension completion");
    let mut din = Tally::new(
        "gr.delta-in-fiber",
        "P_pr1(alpha) meet delta_A lies below the top of the square",
    );
    let mut delta = vec![None; names.len()];
    for o in 0..names.len() {
        let a = under_obj[o];
        let (Some(cell), Some(d)) = (products.get(&(o, o)).copied(), p.delta(a)) else {
            continue;
        };
        let aa = c.product(a, a)?;
        let e = p.meet(aa.apex, p.re(aa.pr1, top_of[o]), d);
        match local(&downs[cell.apex].1, e) {
            Some(x) => {
                din.ok();
                delta[o] = Some(x);
            }
            None => {
                din.fail(|| format!("over {}", names[o]));
            }
        }
    }
    construction.push(din.finish());
    let window = CatWindow::lifted(
        names.clone(),
        arrows,
        identity,
        products,
        p.base_arc(),
        under_obj.clone(),
        under.clone(),
    )?;
    let fibers = downs.iter().map(|d| d.0.clone()).collect();
    let d = Doctrine::new(
        format!("Gr({})", p.name),
        Arc::new(window),
        fibers,
        reindex,
        delta,
    )?;
    let functor = FunctorData {
        objects: c.objects().map(|a| obj_of[a][p.top(a)]).collect(),
        arrows: c
            .arrows()
            .map(|f| {
                index[&(
                    f,
                    obj_of[c.dom(f)][p.top(c.dom(f))],
                    obj_of[c.cod(f)][p.top(c.cod(f))],
                )]
            })
            .collect(),
        product_preserving: true,
    };
    let b = c
        .objects()
        .map(|a| {
            let o = obj_of[a][p.top(a)];
            p.fiber(a)
                .elements()
                .map(|x| local(&downs[o].1, x).unwrap())
                .collect()
        })
        .collect();
    let (source, source_objects, source_arrows) = identity_source(p);
    Ok(CompletionResult {
        doctrine: Arc::new(d),
        source,
        source_objects,
        source_arrows,
        unit: DoctrineArrow { functor, b },
        object_under: under_obj,
        arrow_under: under,
        construction,
    })
}

/// Objects `(A, rho)` for equivalence relations over the elementary core, arrows `f` with
/// `rho <= P_(f x f)(sigma)`, fibers the descent data, and `delta_(A,rho) = rho`.
pub fn complete_q(p: &Arc<Doctrine>) -> Result<CompletionResult, CompletionError> {
    let c = p.base();
    let core = p.elementary_core();
    let mut construction = Report::new("quotient completion");
    let mut partial = Tally::new(
        "q.relations-fully-stated",
        "relations admitted with every clause stated (transitivity needs the cube)",
    );
    let mut obj_of: FxHashMap<(Obj, Elem), Obj> = FxHashMap::default();
    let mut objs: Vec<(Obj, Elem)> = Vec::new();
    let mut names = Vec::new();
    let mut rels: Vec<Vec<Elem>> = vec![Vec::new(); c.n_objects()];
    for &a in &core {
        let aa = c.product(a, a)?.apex;
        for r in equivalence_relations(p, a) {
            let w = is_equivalence_relation(p, a, r)?;
            if w.fully_stated() {
                partial.ok();
            } else {
                partial.skip();
            }
            obj_of.insert((a, r), objs.len());
            objs.push((a, r));
            names.push(format!("({},{})", c.object_name(a), p.fiber(aa).label(r)));
            rels[a].push(r);
        }
    }
    construction.push(partial.finish_info());
    let mut arrows = Vec::new();
    let mut under = Vec::new();
    let mut index: FxHashMap<(Arr, Obj, Obj), Arr> = FxHashMap::default();
    for &a in &core {
        let aa = c.product(a, a)?.apex;
        for &b in &core {
            for &f in c.hom(a, b) {
                let ff = c.times(f, f)?;
                for &r in &rels[a] {
                    for &s in &rels[b] {
                        if p.leq(aa, r, p.re(ff, s)) {
                            let (o1, o2) = (obj_of[&(a, r)], obj_of[&(b, s)]);
                            index.insert((f, o1, o2), arrows.len());
                            arrows.push(ArrowInfo {
                                name: arrow_label(c, f, o1, o2, &names),
                                dom: o1,
                                cod: o2,
                            });
                            under.push(f);
                        }
                    }
                }
            }
        }
    }
    let identity: Vec<Arr> = objs
        .iter()
        .enumerate()
        .map(|(o, &(a, _))| index[&(c.id(a), o, o)])
        .collect();
    let mut products = BTreeMap::new();
    for (o1, &(a, r)) in objs.iter().enumerate() {
        for (o2, &(b, s)) in objs.iter().enumerate() {
            let Ok(cell) = c.product(a, b) else { continue };
            let Ok(t) = boxtimes_paired(p, (a, a, r), (b, b, s)) else {
                continue;
            };
            let Some(&apex) = obj_of.get(&(cell.apex, t)) else {
                if core.contains(&cell.apex) {
                    return Err(invariant(format!(
                        "the product relation of {} and {} is not an equivalence relation",
                        names[o1], names[o2]
                    )));
                }
                continue;
            };
            let pr1 = *index
                .get(&(cell.pr1, apex, o1))
                .ok_or_else(|| invariant("first projection does not respect the relations"))?;
            let pr2 = *index
                .get(&(cell.pr2, apex, o2))
                .ok_or_else(|| invariant("second projection does not respect the relations"))?;
            products.insert((o1, o2), ProductCell { apex, pr1, pr2 });
        }
    }
    let des: Vec<(Arc<InfSemilattice>, Vec<Elem>)> = objs
        .iter()
        .map(|&(a, r)| descent_data(p, a, r).map(|(l, inc)| (Arc::new(l), inc)))
        .collect::<Result<_, _>>()?;
    let mut reindex = Vec::with_capacity(arrows.len());
    for k in 0..arrows.len() {
        let (s, t, f) = (arrows[k].dom, arrows[k].cod, under[k]);
        let m = des[t]
            .1
            .iter()
            .map(|&be| {
                local(&des[s].1, p.re(f, be)).ok_or_else(|| {
                    invariant(format!(
                        "P_f of a descent datum is not a descent datum along {}",
                        arrows[k].name
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        reindex.push(m);
    }
    let mut delta = vec![None; objs.len()];
    for (o, &(_, r)) in objs.iter().enumerate() {
        if let Some(cell) = products.get(&(o, o)) {
            delta[o] = Some(local(&des[cell.apex].1, r).ok_or_else(|| {
                invariant(format!(
                    "the relation of {} is not a descent datum for its square",
                    names[o]
                ))
            })?);
        }
    }
    let window = CatWindow::lifted(
        names.clone(),
        arrows,
        identity,
        products,
        p.base_arc(),
        objs.iter().map(|x| x.0).collect(),
        under.clone(),
    )?;
    let mut d = Doctrine::new(
        format!("Q({})", p.name),
        Arc::new(window),
        des.iter().map(|x| x.0.clone()).collect(),
        reindex,
        delta,
    )?;
    d.ext = ExtEquality::Relations {
        parent: p.clone(),
        rel: objs.clone(),
        under: under.clone(),
    };
    // a relation of the completion is a relation of the input on the underlying object
    let mut transfer = Tally::new(
        "q.relation-transfer",
        "every Q-equivalence relation on (A,rho) is a P-equivalence relation on A",
    );
    for (o, &(a, _)) in objs.iter().enumerate() {
        let Some(cell) = d.base().products().get(&(o, o)).copied() else {
            transfer.skip();
            continue;
        };
        for t in equivalence_relations(&d, o) {
            let g = des[cell.apex].1[t];
            let w = is_equivalence_relation(p, a, g)?;
            transfer.check(w.is_equivalence(), || {
                format!("{} on {}", describe_elem(&d, cell.apex, t), names[o])
            });
        }
    }
    construction.push(transfer.finish());
    let (source, source_objects, source_arrows) = restricted_source(p, &core);
    let sc = source.base();
    let jo: Vec<Obj> = source_objects
        .iter()
        .map(|&a| obj_of[&(a, p.delta(a).unwrap())])
        .collect();
    let mut ja = Vec::new();
    for (k, &f) in source_arrows.iter().enumerate() {
        let (s, t) = (jo[sc.dom(k)], jo[sc.cod(k)]);
        ja.push(*index.get(&(f, s, t)).ok_or_else(|| {
            invariant(format!(
                "{} does not preserve the fibered equality",
                describe_arrow(c, f)
            ))
        })?);
    }
    let b = source_objects
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            p.fiber(a)
                .elements()
                .map(|x| local(&des[jo[i]].1, x).unwrap())
                .collect()
        })
        .collect();
    Ok(CompletionResult {
        doctrine: Arc::new(d),
        source,
        source_objects,
        source_arrows,
        unit: DoctrineArrow {
            functor: FunctorData {
                objects: jo,
                arrows: ja,
                product_preserving: true,
            },
            b,
        },
        object_under: objs.iter().map(|x| x.0).collect(),
        arrow_under: under,
        construction,
    })
}

/// How the extensional relation between two parallel arrows was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    InWindow(bool),
    ViaRelations(bool),
    Unstateable,
}

impl Verdict {
    pub fn value(self) -> Option<bool> {
        match self {
            Verdict::InWindow(b) | Verdict::ViaRelations(b) => Some(b),
            Verdict::Unstateable => None,
        }
    }
}

/// `delta_A <= P_(f x g)(delta_B)`, in the window or through the relation hint.
pub fn extensional_relation(p: &Doctrine, f: Arr, g: Arr) -> Verdict {
    let c = p.base();
    let (a, b) = (c.dom(f), c.cod(f));
    if let (Some(da), Some(db)) = (p.delta(a), p.delta(b)) {
        if let (Ok(fg), Ok(cell)) = (c.times(f, g), c.product(a, a)) {
            return Verdict::InWindow(p.leq(cell.apex, da, p.re(fg, db)));
        }
    }
    if let ExtEquality::Relations { parent, rel, under } = &p.ext {
        let pc = parent.base();
        let ((a0, r), (_, s)) = (rel[a], rel[b]);
        if let (Ok(fg), Ok(cell)) = (pc.times(under[f], under[g]), pc.product(a0, a0)) {
            return Verdict::ViaRelations(parent.leq(cell.apex, r, parent.re(fg, s)));
        }
    }
    Verdict::Unstateable
}

fn parallel_verdicts(p: &Doctrine) -> Vec<(Arr, Arr, Verdict)> {
    let c = p.base();
    c.objects()
        .flat_map(|a| c.objects().map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let hs = c.hom(a, b);
            let mut v = Vec::new();
            if hs.len() < 2 || extensional_relation(p, hs[0], hs[0]) == Verdict::Unstateable {
                return v;
            }
            for i in 0..hs.len() {
                for j in i + 1..hs.len() {
                    v.push((hs[i], hs[j], extensional_relation(p, hs[i], hs[j])));
                }
            }
            v
        })
        .collect()
}

fn congruence_tallies(
    p: &Doctrine,
    pairs: &[(Arr, Arr, Verdict)],
    class: &[Arr],
) -> (Tally, Tally, u64) {
    let c = p.base();
    let mut agree = Tally::new(
        "x.congruence-agrees",
        "arrows are identified exactly when delta_A <= P_(f x f')(delta_B), wherever stateable",
    );
    let mut wd = Tally::new(
        "x.well-defined",
        "delta_A <= P_(f x g)(delta_B) implies P_f = P_g (checked on every related parallel pair)",
    );
    let mut unstated = 0u64;
    for &(f, g, r) in pairs {
        match r.value() {
            Some(rel) => {
                let same = class[f] == class[g];
                agree.check(rel == same, || {
                    format!(
                        "{} and {}: related {} but identified {}",
                        describe_arrow(c, f),
                        describe_arrow(c, g),
                        rel,
                        same
                    )
                });
                if rel {
                    wd.check(p.reindex_map(f) == p.reindex_map(g), || {
                        format!("{} and {}", describe_arrow(c, f), describe_arrow(c, g))
                    });
                }
            }
            None => unstated += 1,
        }
    }
    (agree, wd, unstated)
}

/// Compare a class assignment on the arrows of `p` (`class[f]` a representative of the
/// class of `f`) with the extensional relation.
pub fn check_congruence(p: &Doctrine, class: &[Arr]) -> Report {
    let mut r = Report::new(format!("congruence {}", p.name));
    if class.len() != p.base().n_arrows() {
        let mut t = Tally::new("x.congruence-agrees", "one class per arrow");
        t.structural(|| format!("{} classes for {} arrows", class.len(), p.base().n_arrows()));
        r.push(t.finish());
        return r;
    }
    let (agree, wd, _) = congruence_tallies(p, &parallel_verdicts(p), class);
    r.push(agree.finish());
    r.push(wd.finish());
    r
}

/// The extensional collapse: same objects, hom-sets quotiented by the extensional relation
/// where it can be stated, closed under composition and pairing.
pub fn complete_x(p: &Arc<Doctrine>) -> Result<CompletionResult, CompletionError> {
    let c = p.base();
    let n = c.n_arrows();
    let mut construction = Report::new("extensional collapse");
    let selfrel: Vec<Verdict> = (0..n)
        .into_par_iter()
        .map(|f| extensional_relation(p, f, f))
        .collect();
    let excluded: Vec<bool> = selfrel.iter().map(|v| v.value() == Some(false)).collect();
    if let Some(f) = excluded.iter().position(|&e| e) {
        return Err(invariant(format!(
            "{} does not preserve the fibered equality, so the unit is undefined",
            describe_arrow(c, f)
        )));
    }
    let pairs = parallel_verdicts(p);
    let mut uf = UnionFind::new(n);
    let mut direct = 0u64;
    for &(f, g, r) in &pairs {
        if r.value() == Some(true) && uf.union(f, g) {
            direct += 1;
        }
    }
    let mut closure_merges = 0u64;
    if direct > 0 {
        loop {
            let mut changed = false;
            let mut comp: FxHashMap<(usize, usize), usize> = FxHashMap::default();
            for f in c.arrows() {
                for &g in c.out_of(c.cod(f)) {
                    let h = c.compose(g, f);
                    let key = (uf.find(g), uf.find(f));
                    match comp.get(&key) {
                        Some(&h0) => {
                            if uf.union(h0, h) {
                                changed = true;
                                closure_merges += 1;
                            }
                        }
                        None => {
                            comp.insert(key, h);
                        }
                    }
                }
            }
            for cell in c.products().values() {
                let mut seen: FxHashMap<(Obj, usize, usize), usize> = FxHashMap::default();
                for &u in c.into(cell.apex) {
                    let key = (
                        c.dom(u),
                        uf.find(c.compose(cell.pr1, u)),
                        uf.find(c.compose(cell.pr2, u)),
                    );
                    match seen.get(&key) {
                        Some(&u0) => {
                            if uf.union(u0, u) {
                                changed = true;
                                closure_merges += 1;
                            }
                        }
                        None => {
                            seen.insert(key, u);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    // identities represent their classes
    let mut class: Vec<usize> = (0..n).map(|f| uf.find(f)).collect();
    let mut rep_of: Vec<usize> = (0..n).collect();
    for a in c.objects() {
        rep_of[class[c.id(a)]] = c.id(a);
    }
    for f in 0..n {
        class[f] = rep_of[class[f]];
    }
    let (agree, wd, unstated) = congruence_tallies(p, &pairs, &class);
    let mut rep_ok = Tally::new(
        "x.reindex-by-representative",
        "every member of a class has the same reindexing",
    );
    for f in c.arrows() {
        rep_ok.check(p.reindex_map(f) == p.reindex_map(class[f]), || {
            format!(
                "{} and {}",
                describe_arrow(c, f),
                describe_arrow(c, class[f])
            )
        });
    }
    let rep_broken = rep_ok.failed();
    construction.push(agree.finish());
    construction.push(wd.finish());
    construction.push(rep_ok.finish());
    let mut info = Tally::new(
        "x.closure-merges",
        format!(
            "{direct} merges from the relation, {closure_merges} more from closing under composition and pairing, {unstated} parallel pairs not stateable"
        ),
    );
    info.ok_n(direct + closure_merges);
    construction.push(info.finish_info());
    if rep_broken {
        return Err(invariant(
            "reindexing is not constant on an identified class",
        ));
    }
    let reps: Vec<Arr> = c.arrows().filter(|&f| class[f] == f).collect();
    let mut new_id = vec![NONE; n];
    for (i, &r) in reps.iter().enumerate() {
        new_id[r] = i;
    }
    let to_new = |f: Arr| new_id[class[f]];
    let arrows = reps.iter().map(|&r| c.arrow(r).clone()).collect();
    let identity = c.objects().map(|a| to_new(c.id(a))).collect();
    let products = c
        .products()
        .iter()
        .map(|(&k, cell)| {
            (
                k,
                ProductCell {
                    apex: cell.apex,
                    pr1: to_new(cell.pr1),
                    pr2: to_new(cell.pr2),
                },
            )
        })
        .collect();
    let window = CatWindow::dense(
        c.object_names().to_vec(),
        arrows,
        identity,
        products,
        |g, f| {
            let h = c.compose(reps[g], reps[f]);
            (h != NONE).then(|| to_new(h))
        },
    )?;
    let d = Doctrine::new(
        format!("X({})", p.name),
        Arc::new(window),
        c.objects().map(|a| p.fiber_arc(a)).collect(),
        reps.iter().map(|&r| p.reindex_map(r).to_vec()).collect(),
        p.deltas().to_vec(),
    )?;
    let functor = FunctorData {
        objects: c.objects().collect(),
        arrows: c.arrows().map(to_new).collect(),
        product_preserving: true,
    };
    let b = c
        .objects()
        .map(|a| p.fiber(a).elements().collect())
        .collect();
    let (source, source_objects, source_arrows) = identity_source(p);
    Ok(CompletionResult {
        doctrine: Arc::new(d),
        source,
        source_objects,
        source_arrows,
        unit: DoctrineArrow { functor, b },
        object_under: c.objects().collect(),
        arrow_under: reps,
        construction,
    })
}

/// Objects `(A, alpha, c)` with `c : X -> A` a weak comprehension of `alpha` (over the
/// elementary core), arrows classes of `f : X -> Y` respecting the kernels of the
/// comprehensions, fibers the descent data of those kernels.
pub fn complete_d(p: &Arc<Doctrine>) -> Result<CompletionResult, CompletionError> {
    let c = p.base();
    let core = p.elementary_core();
    let in_core = |x: Obj| core.contains(&x);
    let mut construction = Report::new("retract completion");
    // (A, alpha, comprehension)
    let mut objs: Vec<(Obj, Elem, Arr)> = Vec::new();
    let mut names = Vec::new();
    for &a in &core {
        for al in p.fiber(a).elements() {
            let cs: Vec<Arr> = find_comprehension(p, a, al, true)
                .into_iter()
                .filter(|&k| in_core(c.dom(k)))
                .collect();
            if cs.is_empty() {
                return Err(CompletionError::NoWeakComprehension(describe_elem(
                    p, a, al,
                )));
            }
            for k in cs {
                names.push(format!(
                    "({},{},{})",
                    c.object_name(a),
                    p.fiber(a).label(al),
                    c.arrow_name(k)
                ));
                objs.push((a, al, k));
            }
        }
    }
    let obj_index: FxHashMap<(Obj, Elem, Arr), Obj> =
        objs.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    // the kernel of each comprehension, on its domain
    let kern: Vec<Elem> = objs
        .iter()
        .map(|&(_, _, k)| crate::logic::kernel(p, k))
        .collect::<Result<_, _>>()?;
    let mut arrows = Vec::new();
    let mut under = Vec::new();
    let mut lookup: FxHashMap<(Obj, Obj, Arr), Arr> = FxHashMap::default();
    let mut members: Vec<Vec<Arr>> = Vec::new();
    let mut equiv = Tally::new(
        "d.relation-equivalence",
        "the relation on representatives is an equivalence on each hom-set",
    );
    for (o1, &(_, _, k1)) in objs.iter().enumerate() {
        let x = c.dom(k1);
        let xx = c.product(x, x)?.apex;
        for (o2, &(_, _, k2)) in objs.iter().enumerate() {
            let y = c.dom(k2);
            let rel = |f: Arr, g: Arr| -> Result<bool, CompletionError> {
                let fg = c.times(f, g)?;
                Ok(p.leq(xx, kern[o1], p.re(fg, kern[o2])))
            };
            let hs: Vec<Arr> = c
                .hom(x, y)
                .iter()
                .copied()
                .filter(|&f| rel(f, f).unwrap_or(false))
                .collect();
            let mut classes: Vec<Vec<Arr>> = Vec::new();
            for &f in &hs {
                match classes.iter_mut().find(|cl| rel(cl[0], f).unwrap_or(false)) {
                    Some(cl) => cl.push(f),
                    None => classes.push(vec![f]),
                }
            }
            if o1 == o2 {
                let idx = c.id(x);
                for cl in classes.iter_mut() {
                    if let Some(i) = cl.iter().position(|&f| f == idx) {
                        cl.swap(0, i);
                    }
                }
            }
            for cl in &classes {
                for &f in cl {
                    for &g in cl {
                        equiv.check(rel(f, g)?, || {
                            format!(
                                "{} and {} in one class",
                                describe_arrow(c, f),
                                describe_arrow(c, g)
                            )
                        });
                    }
                }
                let id = arrows.len();
                for &f in cl {
                    lookup.insert((o1, o2, f), id);
                }
                arrows.push(ArrowInfo {
                    name: arrow_label(c, cl[0], o1, o2, &names),
                    dom: o1,
                    cod: o2,
                });
                under.push(cl[0]);
                members.push(cl.clone());
            }
        }
    }
    construction.push(equiv.finish());
    let identity: Vec<Arr> = objs
        .iter()
        .enumerate()
        .map(|(o, &(_, _, k))| {
            lookup
                .get(&(o, o, c.id(c.dom(k))))
                .copied()
                .ok_or_else(|| invariant(format!("identity of {} is not an arrow", names[o])))
        })
        .collect::<Result<_, _>>()?;
    let mut wd = Tally::new(
        "d.composition-well-defined",
        "composites of class members land in one class",
    );
    for (i, mi) in members.iter().enumerate() {
        let (o1, o2) = (arrows[i].dom, arrows[i].cod);
        for (j, mj) in members.iter().enumerate() {
            if arrows[j].dom != o2 {
                continue;
            }
            let o3 = arrows[j].cod;
            let target = lookup.get(&(o1, o3, c.compose(mj[0], mi[0]))).copied();
            for &f in mi {
                for &g in mj {
                    let h = lookup.get(&(o1, o3, c.compose(g, f))).copied();
                    wd.check(h.is_some() && h == target, || {
                        format!("{} after {}", describe_arrow(c, g), describe_arrow(c, f))
                    });
                }
            }
        }
    }
    let broken = wd.failed();
    construction.push(wd.finish());
    if broken {
        return Err(invariant("composition is not well defined on classes"));
    }
    let mut products = BTreeMap::new();
    for (o1, &(a, al, k1)) in objs.iter().enumerate() {
        for (o2, &(b, be, k2)) in objs.iter().enumerate() {
            let (x, y) = (c.dom(k1), c.dom(k2));
            let (Ok(ab), Ok(xy)) = (c.product(a, b), c.product(x, y)) else {
                continue;
            };
            if !in_core(ab.apex) || !in_core(xy.apex) {
                continue;
            }
            let Ok(kk) = c.times(k1, k2) else { continue };
            let g = p.meet(ab.apex, p.re(ab.pr1, al), p.re(ab.pr2, be));
            let Some(&apex) = obj_index.get(&(ab.apex, g, kk)) else {
                continue;
            };
            let (Some(&pr1), Some(&pr2)) = (
                lookup.get(&(apex, o1, xy.pr1)),
                lookup.get(&(apex, o2, xy.pr2)),
            ) else {
                continue;
            };
            products.insert((o1, o2), ProductCell { apex, pr1, pr2 });
        }
    }
    let des: Vec<(Arc<InfSemilattice>, Vec<Elem>)> = objs
        .iter()
        .enumerate()
        .map(|(o, &(_, _, k))| {
            descent_data(p, c.dom(k), kern[o]).map(|(l, inc)| (Arc::new(l), inc))
        })
        .collect::<Result<_, _>>()?;
    let mut rwd = Tally::new(
        "d.reindex-well-defined",
        "every member of a class reindexes descent data alike",
    );
    let mut reindex = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let (o1, o2) = (arrows[i].dom, arrows[i].cod);
        let map = des[o2]
            .1
            .iter()
            .map(|&be| {
                local(&des[o1].1, p.re(m[0], be)).ok_or_else(|| {
                    invariant(format!(
                        "reindexing along {} leaves the descent data",
                        arrows[i].name
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        for &f in &m[1..] {
            rwd.check(
                des[o2]
                    .1
                    .iter()
                    .enumerate()
                    .all(|(j, &be)| local(&des[o1].1, p.re(f, be)) == Some(map[j])),
                || format!("{} and {}", describe_arrow(c, m[0]), describe_arrow(c, f)),
            );
        }
        reindex.push(map);
    }
    construction.push(rwd.finish());
    let mut delta = vec![None; objs.len()];
    for o in 0..objs.len() {
        if let Some(cell) = products.get(&(o, o)) {
            delta[o] = Some(local(&des[cell.apex].1, kern[o]).ok_or_else(|| {
                invariant(format!(
                    "kernel of {} is not a descent datum of its square",
                    names[o]
                ))
            })?);
        }
    }
    let window = CatWindow::dense(names.clone(), arrows.clone(), identity, products, |g, f| {
        let (o1, o3) = (arrows[f].dom, arrows[g].cod);
        lookup
            .get(&(o1, o3, c.compose(under[g], under[f])))
            .copied()
    })?;
    let d = Doctrine::new(
        format!("D({})", p.name),
        Arc::new(window),
        des.iter().map(|x| x.0.clone()).collect(),
        reindex,
        delta,
    )?;
    let (source, source_objects, source_arrows) = restricted_source(p, &core);
    let sc = source.base();
    let ko: Vec<Obj> = source_objects
        .iter()
        .map(|&a| obj_index[&(a, p.top(a), c.id(a))])
        .collect();
    let ka = source_arrows
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            lookup
                .get(&(ko[sc.dom(k)], ko[sc.cod(k)], f))
                .copied()
                .ok_or_else(|| invariant(format!("{} has no class", describe_arrow(c, f))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let b = source_objects
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            p.fiber(a)
                .elements()
                .map(|x| local(&des[ko[i]].1, x).unwrap())
                .collect()
        })
        .collect();
    Ok(CompletionResult {
        doctrine: Arc::new(d),
        source,
        source_objects,
        source_arrows,
        unit: DoctrineArrow {
            functor: FunctorData {
                objects: ko,
                arrows: ka,
                product_preserving: true,
            },
            b,
        },
        object_under: objs.iter().map(|o| o.0).collect(),
        arrow_under: under,
        construction,
    })
}

/// `second . first`, where `second` was built on `first.doctrine`. The source shrinks to the
/// objects whose image lies in the source of `second`.
pub fn compose_results(first: &CompletionResult, second: &CompletionResult) -> CompletionResult {
    let mid = &first.doctrine;
    let mut inv_o = vec![None; mid.base().n_objects()];
    for (i, &o) in second.source_objects.iter().enumerate() {
        inv_o[o] = Some(i);
    }
    let mut inv_a = vec![None; mid.base().n_arrows()];
    for (i, &a) in second.source_arrows.iter().enumerate() {
        inv_a[a] = Some(i);
    }
    let u1 = &first.unit;
    let keep: Vec<Obj> = first
        .source
        .base()
        .objects()
        .filter(|&o| inv_o[u1.functor.objects[o]].is_some())
        .collect();
    let (s, r) = first.source.restrict(&keep);
    let u2 = &second.unit;
    let objects: Vec<Obj> = r
        .obj_old
        .iter()
        .map(|&o| u2.functor.objects[inv_o[u1.functor.objects[o]].unwrap()])
        .collect();
    let arrows: Vec<Arr> = r
        .arr_old
        .iter()
        .map(|&f| u2.functor.arrows[inv_a[u1.functor.arrows[f]].expect("full subwindow")])
        .collect();
    let b = r
        .obj_old
        .iter()
        .map(|&o| {
            let m = inv_o[u1.functor.objects[o]].unwrap();
            u1.b[o].iter().map(|&x| u2.b[m][x]).collect()
        })
        .collect();
    let mut construction = Report::new(format!(
        "{} then {}",
        first.construction.subject, second.construction.subject
    ));
    construction.absorb("", first.construction.clone());
    construction.absorb("", second.construction.clone());
    CompletionResult {
        doctrine: second.doctrine.clone(),
        source: Arc::new(s),
        source_objects: r.obj_old.iter().map(|&o| first.source_objects[o]).collect(),
        source_arrows: r.arr_old.iter().map(|&f| first.source_arrows[f]).collect(),
        unit: DoctrineArrow {
            functor: FunctorData {
                objects,
                arrows,
                product_preserving: true,
            },
            b,
        },
        object_under: second
            .object_under
            .iter()
            .map(|&o| first.object_under[o])
            .collect(),
        arrow_under: second
            .arrow_under
            .iter()
            .map(|&f| first.arrow_under[f])
            .collect(),
        construction,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqcMode {
    /// `X(Q(Gr(P)))`.
    WithComprehensions,
    /// `X(Q(P))`.
    WithoutComprehensions,
}

#[derive(Clone, Debug)]
pub struct EqcResult {
    pub stages: Vec<CompletionResult>,
    pub result: CompletionResult,
}

/// The elementary quotient completion, with every intermediate stage.
pub fn eqc(p: &Arc<Doctrine>, mode: EqcMode) -> Result<EqcResult, CompletionError> {
    let mut stages = Vec::new();
    let mut cur = p.clone();
    if mode == EqcMode::WithComprehensions {
        let g = complete_gr(&cur)?;
        cur = g.doctrine.clone();
        stages.push(g);
    }
    let q = complete_q(&cur)?;
    cur = q.doctrine.clone();
    stages.push(q);
    let x = complete_x(&cur)?;
    stages.push(x);
    let mut result = stages[0].clone();
    for s in &stages[1..] {
        result = compose_results(&result, s);
    }
    let mut d = (*result.doctrine).clone();
    d.name = match mode {
        EqcMode::WithComprehensions => format!("eqc({})", p.name),
        EqcMode::WithoutComprehensions => format!("XQ({})", p.name),
    };
    result.doctrine = Arc::new(d);
    Ok(EqcResult { stages, result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doctrine::{check_doctrine, check_elementary, check_one_arrow};
    use crate::fixtures::{blur, finset_sub, terminal};

    fn counts_by_size(r: &CompletionResult, n: usize) -> Vec<usize> {
        let mut v = vec![0; n + 1];
        for &a in &r.object_under {
            v[a] += 1;
        }
        v
    }

    #[test]
    fn q_of_fs4_is_elementary_with_unit() {
        let p = Arc::new(finset_sub(4));
        let q = complete_q(&p).unwrap();
        assert_eq!(counts_by_size(&q, 4), vec![1, 1, 2, 0, 0]);
        assert!(check_doctrine(&q.doctrine).passed());
        assert!(
            check_elementary(&q.doctrine).passed(),
            "{}",
            check_elementary(&q.doctrine)
        );
        assert!(check_one_arrow(&q.source, &q.doctrine, &q.unit).passed());
        assert!(q.construction.passed(), "{}", q.construction);
    }

    #[test]
    fn gr_downset_fiber() {
        let p = Arc::new(finset_sub(2));
        let g = complete_gr(&p).unwrap();
        let o = g.doctrine.base().find_object("(2,{0})").unwrap();
        assert_eq!(g.doctrine.fiber(o).len(), 2);
        assert!(
            check_elementary(&g.doctrine).passed(),
            "{}",
            check_elementary(&g.doctrine)
        );
        assert!(check_one_arrow(&g.source, &g.doctrine, &g.unit).passed());
    }

    #[test]
    fn x_of_fs2_collapses_nothing() {
        let p = Arc::new(finset_sub(2));
        let x = complete_x(&p).unwrap();
        assert_eq!(x.doctrine.base().n_arrows(), p.base().n_arrows());
    }

    #[test]
    fn x_of_blur_collapses_every_hom_set() {
        let p = Arc::new(blur());
        let x = complete_x(&p).unwrap();
        let w = x.doctrine.base();
        for a in w.objects() {
            for b in w.objects() {
                assert_eq!(w.hom(a, b).len(), 1);
            }
        }
        assert!(x.construction.passed(), "{}", x.construction);
    }

    #[test]
    fn d_of_fs2_and_terminal_eqc() {
        let p = Arc::new(finset_sub(2));
        let d = complete_d(&p).unwrap();
        assert!(
            check_elementary(&d.doctrine).passed(),
            "{}",
            check_elementary(&d.doctrine)
        );
        assert!(check_one_arrow(&d.source, &d.doctrine, &d.unit).passed());
        let t = Arc::new(terminal());
        let e = eqc(&t, EqcMode::WithComprehensions).unwrap();
        assert_eq!(e.result.doctrine.base().n_objects(), 1);
        assert_eq!(e.result.doctrine.base().n_arrows(), 1);
    }
}
