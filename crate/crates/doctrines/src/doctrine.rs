//! Doctrines over windows, fibered equality, and the 1- and 2-arrows between doctrines.

use crate::fincat::{
    check_category, check_functor, describe_arrow, Arr, CatWindow, FunctorData, Obj, Restriction,
    WindowData, WindowError, NONE,
};
use crate::infsl::{
    check_hom, check_infsl, enumerate_homs, Elem, InfSemilattice, InfslData, InfslError,
};
use crate::report::{Report, Tally};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DoctrineError {
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Infsl(#[from] InfslError),
    #[error("delta-missing: no fibered equality on object {0}")]
    DeltaMissing(Obj),
    #[error("malformed doctrine: {0}")]
    Structure(String),
}

/// How to decide `delta_A <= P_{f x f'}(delta_B)` when the window lacks the squares.
#[derive(Clone, Debug, Default)]
pub enum ExtEquality {
    /// Only inside the window.
    #[default]
    Window,
    /// Objects are pairs `(A, rho)` over `parent`; the fibered equality on `(A, rho)` is
    /// `rho` itself, so the comparison can be made in the parent fiber over `A x A`.
    Relations {
        parent: Arc<Doctrine>,
        rel: Vec<(Obj, Elem)>,
        under: Vec<Arr>,
    },
}

#[derive(Clone, Debug)]
pub struct Doctrine {
    pub name: String,
    base: Arc<CatWindow>,
    fibers: Vec<Arc<InfSemilattice>>,
    reindex: Vec<Vec<Elem>>,
    delta: Vec<Option<Elem>>,
    pub ext: ExtEquality,
}

/// Serializable form of a doctrine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoctrineData {
    pub name: String,
    pub window: WindowData,
    pub fibers: Vec<InfslData>,
    /// For each arrow `f : A -> B`, the image of each element of `P(B)` in `P(A)`.
    pub reindex: Vec<Vec<Elem>>,
    pub delta: Vec<Option<Elem>>,
}

impl Doctrine {
    pub fn new(
        name: impl Into<String>,
        base: Arc<CatWindow>,
        fibers: Vec<Arc<InfSemilattice>>,
        reindex: Vec<Vec<Elem>>,
        delta: Vec<Option<Elem>>,
    ) -> Result<Self, DoctrineError> {
        if fibers.len() != base.n_objects() || delta.len() != base.n_objects() {
            return Err(DoctrineError::Structure(format!(
                "{} fibers / {} delta entries for {} objects",
                fibers.len(),
                delta.len(),
                base.n_objects()
            )));
        }
        if reindex.len() != base.n_arrows() {
            return Err(DoctrineError::Structure(format!(
                "{} reindexing maps for {} arrows",
                reindex.len(),
                base.n_arrows()
            )));
        }
        Ok(Doctrine {
            name: name.into(),
            base,
            fibers,
            reindex,
            delta,
            ext: ExtEquality::Window,
        })
    }

    pub fn from_data(d: &DoctrineData) -> Result<Self, DoctrineError> {
        let base = Arc::new(CatWindow::from_data(&d.window)?);
        let fibers = d
            .fibers
            .iter()
            .map(|f| InfSemilattice::from_data(f).map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        Doctrine::new(
            d.name.clone(),
            base,
            fibers,
            d.reindex.clone(),
            d.delta.clone(),
        )
    }

    pub fn to_data(&self) -> DoctrineData {
        DoctrineData {
            name: self.name.clone(),
            window: self.base.to_data(),
            fibers: self.fibers.iter().map(|f| f.to_data()).collect(),
            reindex: self.reindex.clone(),
            delta: self.delta.clone(),
        }
    }

    pub fn base(&self) -> &CatWindow {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<CatWindow> {
        self.base.clone()
    }

    pub fn fiber(&self, a: Obj) -> &InfSemilattice {
        &self.fibers[a]
    }

    pub fn fiber_arc(&self, a: Obj) -> Arc<InfSemilattice> {
        self.fibers[a].clone()
    }

    pub fn reindex_map(&self, f: Arr) -> &[Elem] {
        &self.reindex[f]
    }

    /// `P_f(x)`.
    pub fn re(&self, f: Arr, x: Elem) -> Elem {
        self.reindex[f][x]
    }

    pub fn top(&self, a: Obj) -> Elem {
        self.fibers[a].top()
    }

    pub fn meet(&self, a: Obj, x: Elem, y: Elem) -> Elem {
        self.fibers[a].meet(x, y)
    }

    pub fn leq(&self, a: Obj, x: Elem, y: Elem) -> bool {
        self.fibers[a].leq(x, y)
    }

    pub fn delta(&self, a: Obj) -> Option<Elem> {
        self.delta[a]
    }

    pub fn delta_or_err(&self, a: Obj) -> Result<Elem, DoctrineError> {
        self.delta[a].ok_or(DoctrineError::DeltaMissing(a))
    }

    pub fn deltas(&self) -> &[Option<Elem>] {
        &self.delta
    }

    /// Objects carrying a fibered equality whose square is in the window.
    pub fn elementary_core(&self) -> Vec<Obj> {
        self.base
            .objects()
            .filter(|&a| self.delta[a].is_some() && self.base.has_product(a, a))
            .collect()
    }

    pub fn with_reindex(&self, f: Arr, map: Vec<Elem>) -> Doctrine {
        let mut d = self.clone();
        d.reindex[f] = map;
        d
    }

    pub fn with_delta(&self, a: Obj, e: Option<Elem>) -> Doctrine {
        let mut d = self.clone();
        d.delta[a] = e;
        d
    }

    pub fn with_base(&self, base: CatWindow) -> Doctrine {
        let mut d = self.clone();
        d.base = Arc::new(base);
        d
    }

    pub fn with_fiber(&self, a: Obj, l: InfSemilattice) -> Doctrine {
        let mut d = self.clone();
        d.fibers[a] = Arc::new(l);
        d
    }

    /// Restriction to the full subwindow on `keep`; `delta_A` survives when `A x A` does.
    pub fn restrict(&self, keep: &[Obj]) -> (Doctrine, Restriction) {
        let r = self.base.restrict(keep);
        let fibers = r.obj_old.iter().map(|&o| self.fibers[o].clone()).collect();
        let reindex = r.arr_old.iter().map(|&f| self.reindex[f].clone()).collect();
        let delta = r
            .obj_old
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                if r.window.has_product(new, new) {
                    self.delta[old]
                } else {
                    None
                }
            })
            .collect();
        let d = Doctrine {
            name: format!("{}|restricted", self.name),
            base: Arc::new(r.window.clone()),
            fibers,
            reindex,
            delta,
            ext: ExtEquality::Window,
        };
        (d, r)
    }
}

fn elem_label(p: &Doctrine, a: Obj, x: Elem) -> String {
    let f = p.fiber(a);
    if x < f.len() {
        format!("{}@{}", f.label(x), p.base().object_name(a))
    } else {
        format!("<elem {x} outside P({})>", p.base().object_name(a))
    }
}

pub fn describe_elem(p: &Doctrine, a: Obj, x: Elem) -> String {
    elem_label(p, a, x)
}

/// Check base laws, fibers, reindexing homomorphisms, and contravariant functoriality.
pub fn check_doctrine(p: &Doctrine) -> Report {
    let mut r = Report::new(format!("doctrine {}", p.name));
    let base = check_category(p.base());
    let base_broken = base.has_structural();
    r.absorb("base", base);
    if base_broken {
        return r;
    }
    let c = p.base();
    let mut fib = Tally::new("doctrine.fibers", "every fiber is an inf-semilattice");
    for a in c.objects() {
        let fr = check_infsl(p.fiber(a));
        let first = fr.failures().next().cloned();
        match first {
            Some(l) => fib.fail(|| {
                format!(
                    "P({}): {} {}",
                    c.object_name(a),
                    l.check,
                    l.witness.unwrap_or_default()
                )
            }),
            None => fib.ok(),
        }
    }
    let fibers_broken = fib.failed();
    r.push(fib.finish());
    if fibers_broken {
        return r;
    }
    let mut typing = Tally::new("doctrine.reindex-typing", "P_f maps P(cod f) into P(dom f)");
    for f in c.arrows() {
        let (src, dst) = (p.fiber(c.cod(f)), p.fiber(c.dom(f)));
        let m = &p.reindex[f];
        if m.len() != src.len() || m.iter().any(|&y| y >= dst.len()) {
            typing.structural(|| format!("P_f for {} is mistyped", describe_arrow(c, f)));
        } else {
            typing.ok();
        }
    }
    let typing_broken = typing.failed();
    r.push(typing.finish());
    if typing_broken {
        return r;
    }
    let homs: Vec<Tally> = (0..c.n_arrows())
        .into_par_iter()
        .map(|f| {
            let mut t = Tally::new("", "");
            let hr = check_hom(p.fiber(c.cod(f)), p.fiber(c.dom(f)), &p.reindex[f]);
            let first = hr.failures().next().cloned();
            match first {
                Some(l) => t.fail(|| {
                    format!(
                        "P_f for {}: {} ({})",
                        describe_arrow(c, f),
                        l.check,
                        l.witness.clone().unwrap_or_default()
                    )
                }),
                None => t.ok(),
            }
            t
        })
        .collect();
    let mut hom = Tally::new(
        "doctrine.reindex-homomorphism",
        "every P_f preserves top and meets",
    );
    for t in homs {
        hom.merge(t);
    }
    r.push(hom.finish());
    let mut ids = Tally::new("doctrine.functor-identity", "P_id = id");
    for a in c.objects() {
        let m = &p.reindex[c.id(a)];
        ids.check(m.iter().enumerate().all(|(i, &y)| i == y), || {
            format!("P_id on {} is not the identity", c.object_name(a))
        });
    }
    r.push(ids.finish());
    let parts: Vec<Tally> = (0..c.n_arrows())
        .into_par_iter()
        .map(|f| {
            let mut t = Tally::new("", "");
            let pf = &p.reindex[f];
            for &g in c.out_of(c.cod(f)) {
                let h = c.compose(g, f);
                let (pg, ph) = (&p.reindex[g], &p.reindex[h]);
                match (0..ph.len()).find(|&x| ph[x] != pf[pg[x]]) {
                    None => t.ok(),
                    Some(x) => t.fail(|| {
                        format!(
                            "P_(g.f) != P_f . P_g for g = {}, f = {} at {}",
                            describe_arrow(c, g),
                            describe_arrow(c, f),
                            elem_label(p, c.cod(g), x)
                        )
                    }),
                }
            }
            t
        })
        .collect();
    let mut comp = Tally::new("doctrine.functor-composition", "P_(g.f) = P_f . P_g");
    for t in parts {
        comp.merge(t);
    }
    r.push(comp.finish());
    r
}

/// `P_pr1(alpha) meet delta_A` in `P(A x A)`.
pub fn exists_along_diagonal(p: &Doctrine, a: Obj, alpha: Elem) -> Result<Elem, DoctrineError> {
    let cell = p.base().product(a, a)?;
    let d = p.delta_or_err(a)?;
    Ok(p.meet(cell.apex, p.re(cell.pr1, alpha), d))
}

/// The arrows of condition (ii): `e = <pr1, pr2, pr2> : X x A -> (X x A) x A`, plus
/// `<pr1, pr2>` and `<pr2, pr3>` out of `(X x A) x A`.
pub struct EData {
    pub xa: Obj,
    pub xaa: Obj,
    pub e: Arr,
    pub p12: Arr,
    pub p23: Arr,
}

pub fn e_data(p: &Doctrine, x: Obj, a: Obj) -> Result<EData, DoctrineError> {
    let c = p.base();
    let xa = c.product(x, a)?.apex;
    let xaa = c.product(xa, a)?.apex;
    let e = c.tuple_map(&[x, a], &[1, 2, 2])?;
    let p12 = c.tuple_map(&[x, a, a], &[1, 2])?;
    let p23 = c.tuple_map(&[x, a, a], &[2, 3])?;
    Ok(EData {
        xa,
        xaa,
        e,
        p12,
        p23,
    })
}

/// `P_<pr1,pr2>(alpha) meet P_<pr2,pr3>(delta_A)` in `P(X x A x A)`.
pub fn exists_along_e(p: &Doctrine, x: Obj, a: Obj, alpha: Elem) -> Result<Elem, DoctrineError> {
    let d = p.delta_or_err(a)?;
    let ed = e_data(p, x, a)?;
    Ok(p.meet(ed.xaa, p.re(ed.p12, alpha), p.re(ed.p23, d)))
}

/// `P_<pr1,pr3>(a1) meet P_<pr2,pr4>(a2)` in `P(X1 x X2 x Y1 x Y2)` (left-associated).
pub fn boxtimes(
    p: &Doctrine,
    (x1, y1, a1): (Obj, Obj, Elem),
    (x2, y2, a2): (Obj, Obj, Elem),
) -> Result<Elem, DoctrineError> {
    let c = p.base();
    let f = [x1, x2, y1, y2];
    let apex = c.iterated_product(&f)?;
    let p13 = c.tuple_map(&f, &[1, 3])?;
    let p24 = c.tuple_map(&f, &[2, 4])?;
    Ok(p.meet(apex, p.re(p13, a1), p.re(p24, a2)))
}

/// The same operation landing in `P((X1 x X2) x (Y1 x Y2))`, the form used for products of
/// relations: the first relation links the first components, the second the second ones.
pub fn boxtimes_paired(
    p: &Doctrine,
    (x1, y1, a1): (Obj, Obj, Elem),
    (x2, y2, a2): (Obj, Obj, Elem),
) -> Result<Elem, DoctrineError> {
    let c = p.base();
    let l = c.product(x1, x2)?;
    let r = c.product(y1, y2)?;
    let s = c.product(l.apex, r.apex)?;
    let u = c.pair(c.try_compose(l.pr1, s.pr1)?, c.try_compose(r.pr1, s.pr2)?)?;
    let v = c.pair(c.try_compose(l.pr2, s.pr1)?, c.try_compose(r.pr2, s.pr2)?)?;
    Ok(p.meet(s.apex, p.re(u, a1), p.re(v, a2)))
}

/// `((A x B) x A) x B -> (A x B) x (A x B)`, the canonical reassociation.
pub fn reassociation(c: &CatWindow, a: Obj, b: Obj) -> Result<Arr, WindowError> {
    let f = [a, b, a, b];
    let l = c.tuple_map(&f, &[1, 2])?;
    let r = c.tuple_map(&f, &[3, 4])?;
    c.pair(l, r)
}

/// Both adjunctions, the derived facts about delta, and the boxtimes law.
pub fn check_elementary(p: &Doctrine) -> Report {
    let mut r = Report::new(format!("elementary {}", p.name));
    let c = p.base();
    let mut typed = Tally::new(
        "elementary.delta-typed",
        "delta_A is an element of P(A x A) wherever A x A is in the window",
    );
    for a in c.objects() {
        match (c.product(a, a), p.delta(a)) {
            (Ok(cell), Some(d)) => typed.check(d < p.fiber(cell.apex).len(), || {
                format!("delta on {} is {} outside the fiber", c.object_name(a), d)
            }),
            (Ok(_), None) => typed.fail(|| {
                format!(
                    "no delta on {} although its square exists",
                    c.object_name(a)
                )
            }),
            (Err(_), Some(_)) => {
                typed.structural(|| format!("delta on {} without a square", c.object_name(a)))
            }
            (Err(_), None) => typed.skip(),
        }
    }
    let broken = typed.failed();
    r.push(typed.finish());
    if broken {
        return r;
    }

    let mut cond1 = Tally::new(
        "elementary.diagonal-adjunction",
        "E(alpha) <= theta iff alpha <= P_diag(theta), E(alpha) = P_pr1(alpha) meet delta",
    );
    let mut topd = Tally::new("elementary.top-below-diagonal", "top_A <= P_diag(delta_A)");
    let mut frob = Tally::new(
        "elementary.frobenius",
        "E(P_diag(theta) meet alpha) = theta meet E(alpha)",
    );
    for a in c.objects() {
        let (Ok(cell), Some(d)) = (c.product(a, a), p.delta(a)) else {
            cond1.skip();
            topd.skip();
            frob.skip();
            continue;
        };
        let diag = match c.diagonal(a) {
            Ok(x) => x,
            Err(e) => {
                cond1.structural(|| e.to_string());
                continue;
            }
        };
        let (fa, faa) = (p.fiber(a), p.fiber(cell.apex));
        let ex = |al: Elem| p.meet(cell.apex, p.re(cell.pr1, al), d);
        for al in fa.elements() {
            let e = ex(al);
            for th in faa.elements() {
                let lhs = faa.leq(e, th);
                let rhs = fa.leq(al, p.re(diag, th));
                cond1.check(lhs == rhs, || {
                    format!(
                        "A = {}, alpha = {}, theta = {}: E(alpha) <= theta is {} but alpha <= P_diag(theta) is {}",
                        c.object_name(a),
                        fa.label(al),
                        faa.label(th),
                        lhs,
                        rhs
                    )
                });
                let l = ex(fa.meet(p.re(diag, th), al));
                let rr = faa.meet(th, e);
                frob.check(l == rr, || {
                    format!(
                        "A = {}, alpha = {}, theta = {}",
                        c.object_name(a),
                        fa.label(al),
                        faa.label(th)
                    )
                });
            }
        }
        topd.check(fa.leq(fa.top(), p.re(diag, d)), || {
            c.object_name(a).to_string()
        });
    }
    r.push(cond1.finish());

    let mut cond2 = Tally::new(
        "elementary.e-adjunction",
        "E_e(alpha) <= theta iff alpha <= P_e(theta) for e = <pr1,pr2,pr2>",
    );
    for x in c.objects() {
        for a in c.objects() {
            if p.delta(a).is_none() {
                cond2.skip();
                continue;
            }
            let ed = match e_data(p, x, a) {
                Ok(ed) => ed,
                Err(_) => {
                    cond2.skip();
                    continue;
                }
            };
            let d = p.delta(a).unwrap();
            let (fxa, fxaa) = (p.fiber(ed.xa), p.fiber(ed.xaa));
            let d23 = p.re(ed.p23, d);
            for al in fxa.elements() {
                let e = fxaa.meet(p.re(ed.p12, al), d23);
                for th in fxaa.elements() {
                    let lhs = fxaa.leq(e, th);
                    let rhs = fxa.leq(al, p.re(ed.e, th));
                    cond2.check(lhs == rhs, || {
                        format!(
                            "X = {}, A = {}, alpha = {}, theta = {}: {} vs {}",
                            c.object_name(x),
                            c.object_name(a),
                            fxa.label(al),
                            fxaa.label(th),
                            lhs,
                            rhs
                        )
                    });
                }
            }
        }
    }
    r.push(cond2.finish());
    r.push(topd.finish());

    let mut stable = Tally::new("elementary.delta-stable", "delta_A <= P_(f x f)(delta_B)");
    for f in c.arrows() {
        let (a, b) = (c.dom(f), c.cod(f));
        let (Some(da), Some(db)) = (p.delta(a), p.delta(b)) else {
            stable.skip();
            continue;
        };
        let Ok(ff) = c.times(f, f) else {
            stable.skip();
            continue;
        };
        let apex = c.dom(ff);
        stable.check(p.leq(apex, da, p.re(ff, db)), || describe_arrow(c, f));
    }
    r.push(stable.finish());

    let mut bx = Tally::new(
        "elementary.boxtimes-law",
        "delta_(A x B) = delta_A boxtimes delta_B (via the canonical reassociation where stateable)",
    );
    for (&(a, b), cell) in c.products() {
        let (Some(da), Some(db), Some(dab)) = (p.delta(a), p.delta(b), p.delta(cell.apex)) else {
            bx.skip();
            continue;
        };
        match boxtimes_paired(p, (a, a, da), (b, b, db)) {
            Ok(v) => bx.check(v == dab, || {
                format!(
                    "A = {}, B = {}: delta_AxB = {} but boxtimes gives {}",
                    c.object_name(a),
                    c.object_name(b),
                    elem_label(p, c.product(cell.apex, cell.apex).unwrap().apex, dab),
                    elem_label(p, c.product(cell.apex, cell.apex).unwrap().apex, v)
                )
            }),
            Err(_) => bx.skip(),
        }
        if let (Ok(iso), Ok(q)) = (reassociation(c, a, b), boxtimes(p, (a, a, da), (b, b, db))) {
            bx.check(p.re(iso, dab) == q, || {
                format!(
                    "A = {}, B = {}: reassociated delta_AxB differs from the left-associated boxtimes",
                    c.object_name(a),
                    c.object_name(b)
                )
            });
        }
    }
    r.push(bx.finish());
    r.push(frob.finish_info());
    r
}

/// A 1-arrow `(F, b)`: a functor on bases and `b_A : P(A) -> R(F A)` per object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoctrineArrow {
    pub functor: FunctorData,
    pub b: Vec<Vec<Elem>>,
}

impl DoctrineArrow {
    pub fn identity(p: &Doctrine) -> Self {
        DoctrineArrow {
            functor: FunctorData::identity(p.base()),
            b: p.base()
                .objects()
                .map(|a| p.fiber(a).elements().collect())
                .collect(),
        }
    }

    /// `other . self`.
    pub fn then(&self, other: &DoctrineArrow) -> DoctrineArrow {
        DoctrineArrow {
            functor: self.functor.then(&other.functor),
            b: self
                .b
                .iter()
                .enumerate()
                .map(|(a, m)| {
                    let o = &other.b[self.functor.objects[a]];
                    m.iter().map(|&x| o[x]).collect()
                })
                .collect(),
        }
    }
}

/// A 2-arrow between `(F, b)` and `(G, c)`: components `theta_A : G A -> F A` in the target base.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Doctrine2Cell {
    pub components: Vec<Arr>,
}

/// Functor laws, product preservation, `b` homomorphisms, naturality, and fibered equality.
pub fn check_one_arrow(p: &Doctrine, q: &Doctrine, a: &DoctrineArrow) -> Report {
    let mut r = Report::new("1-arrow");
    let fr = check_functor(&a.functor, p.base(), q.base());
    let broken = fr.has_structural();
    r.absorb("", fr);
    if broken {
        return r;
    }
    let (c, d) = (p.base(), q.base());
    let fo = &a.functor.objects;
    let fa = &a.functor.arrows;
    let mut st = Tally::new("one-arrow.b-typing", "b_A : P(A) -> R(F A)");
    if a.b.len() != c.n_objects() {
        st.structural(|| format!("{} components for {} objects", a.b.len(), c.n_objects()));
    } else {
        for x in c.objects() {
            let ok = a.b[x].len() == p.fiber(x).len()
                && a.b[x].iter().all(|&y| y < q.fiber(fo[x]).len());
            if ok {
                st.ok();
            } else {
                st.structural(|| format!("b on {} is mistyped", c.object_name(x)));
            }
        }
    }
    let broken = st.failed();
    r.push(st.finish());
    if broken {
        return r;
    }
    let mut hom = Tally::new(
        "one-arrow.b-homomorphism",
        "each b_A preserves top and meets",
    );
    for x in c.objects() {
        let hr = check_hom(p.fiber(x), q.fiber(fo[x]), &a.b[x]);
        let first = hr.failures().next().cloned();
        match first {
            Some(l) => hom.fail(|| {
                format!(
                    "b on {}: {} ({})",
                    c.object_name(x),
                    l.check,
                    l.witness.clone().unwrap_or_default()
                )
            }),
            None => hom.ok(),
        }
    }
    r.push(hom.finish());
    let mut nat = Tally::new("one-arrow.naturality", "b_A(P_f beta) = R_(F f)(b_B beta)");
    for f in c.arrows() {
        let (x, y) = (c.dom(f), c.cod(f));
        for be in p.fiber(y).elements() {
            let l = a.b[x][p.re(f, be)];
            let rr = q.re(fa[f], a.b[y][be]);
            nat.check(l == rr, || {
                format!(
                    "f = {}, beta = {}",
                    describe_arrow(c, f),
                    elem_label(p, y, be)
                )
            });
        }
    }
    r.push(nat.finish());
    let mut eq2 = Tally::new(
        "one-arrow.equality-preserved",
        "b_(A x A)(delta_A) = R_<F pr1, F pr2>(delta_FA)",
    );
    for x in c.objects() {
        let (Ok(cell), Some(dx)) = (c.product(x, x), p.delta(x)) else {
            eq2.skip();
            continue;
        };
        let fx = fo[x];
        let Some(dfx) = q.delta(fx) else {
            eq2.skip();
            continue;
        };
        let Ok(m) = d.pair(fa[cell.pr1], fa[cell.pr2]) else {
            eq2.skip();
            continue;
        };
        let l = a.b[cell.apex][dx];
        let rr = q.re(m, dfx);
        eq2.check(l == rr, || {
            format!(
                "A = {}: b(delta) = {} but reindexed delta = {}",
                c.object_name(x),
                elem_label(q, fo[cell.apex], l),
                elem_label(q, fo[cell.apex], rr)
            )
        });
    }
    r.push(eq2.finish());
    r
}

/// Naturality of `theta` and `R_(theta_A)(b_A alpha) <= c_A(alpha)`.
pub fn check_two_arrow(
    p: &Doctrine,
    q: &Doctrine,
    f: &DoctrineArrow,
    g: &DoctrineArrow,
    theta: &Doctrine2Cell,
) -> Report {
    let mut r = Report::new("2-arrow");
    let (c, d) = (p.base(), q.base());
    let mut st = Tally::new("two-arrow.typing", "theta_A : G A -> F A");
    if theta.components.len() != c.n_objects() {
        st.structural(|| {
            format!(
                "{} components for {} objects",
                theta.components.len(),
                c.n_objects()
            )
        });
    } else {
        for a in c.objects() {
            let t = theta.components[a];
            let ok = t < d.n_arrows()
                && d.dom(t) == g.functor.objects[a]
                && d.cod(t) == f.functor.objects[a];
            if ok {
                st.ok();
            } else {
                st.structural(|| format!("component at {} is mistyped", c.object_name(a)));
            }
        }
    }
    let broken = st.failed();
    r.push(st.finish());
    if broken {
        return r;
    }
    let mut nat = Tally::new("two-arrow.naturality", "F f . theta_A = theta_B . G f");
    for h in c.arrows() {
        let (a, b) = (c.dom(h), c.cod(h));
        let l = d.compose(f.functor.arrows[h], theta.components[a]);
        let rr = d.compose(theta.components[b], g.functor.arrows[h]);
        nat.check(l == rr && l != NONE, || describe_arrow(c, h));
    }
    r.push(nat.finish());
    let mut ineq = Tally::new(
        "two-arrow.inequality",
        "R_(theta_A)(b_A alpha) <= c_A(alpha)",
    );
    for a in c.objects() {
        let ga = g.functor.objects[a];
        for al in p.fiber(a).elements() {
            let l = q.re(theta.components[a], f.b[a][al]);
            ineq.check(q.leq(ga, l, g.b[a][al]), || {
                format!("A = {}, alpha = {}", c.object_name(a), elem_label(p, a, al))
            });
        }
    }
    r.push(ineq.finish());
    r
}

/// Result of a budgeted enumeration.
#[derive(Clone, Debug)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub exhaustive: bool,
    pub explored: u64,
}

struct Budget {
    left: u64,
    used: u64,
}

impl Budget {
    fn tick(&mut self) -> bool {
        self.used += 1;
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        true
    }
}

/// All functors `c -> d` (product preserving when asked), within `budget` search nodes.
pub fn enumerate_functors(
    c: &CatWindow,
    d: &CatWindow,
    product_preserving: bool,
    budget: u64,
) -> Enumeration<FunctorData> {
    // composition facts indexed by the largest arrow id they mention
    let mut facts: Vec<Vec<(Arr, Arr, Arr)>> = vec![Vec::new(); c.n_arrows()];
    for f in c.arrows() {
        for &g in c.out_of(c.cod(f)) {
            let h = c.compose(g, f);
            let k = f.max(g).max(h);
            facts[k].push((g, f, h));
        }
    }
    let mut cell_at: Vec<Vec<(Arr, Arr)>> = vec![Vec::new(); c.n_arrows()];
    if product_preserving {
        for cell in c.products().values() {
            cell_at[cell.pr1.max(cell.pr2)].push((cell.pr1, cell.pr2));
        }
    }
    let mut budget = Budget {
        left: budget,
        used: 0,
    };
    let mut items = Vec::new();
    let mut objs = vec![0usize; c.n_objects()];
    let mut exhaustive = true;

    fn arrows_rec(
        k: usize,
        c: &CatWindow,
        d: &CatWindow,
        objs: &[Obj],
        arrs: &mut Vec<Arr>,
        facts: &[Vec<(Arr, Arr, Arr)>],
        cell_at: &[Vec<(Arr, Arr)>],
        budget: &mut Budget,
        items: &mut Vec<FunctorData>,
        product_preserving: bool,
    ) -> bool {
        if !budget.tick() {
            return false;
        }
        if k == c.n_arrows() {
            items.push(FunctorData {
                objects: objs.to_vec(),
                arrows: arrs.clone(),
                product_preserving,
            });
            return true;
        }
        let (a, b) = (objs[c.dom(k)], objs[c.cod(k)]);
        let candidates: Vec<Arr> = if c.is_identity(k) {
            vec![d.id(a)]
        } else {
            d.hom(a, b).to_vec()
        };
        for y in candidates {
            arrs[k] = y;
            let ok = facts[k]
                .iter()
                .all(|&(g, f, h)| arrs[h] == d.compose(arrs[g], arrs[f]))
                && cell_at[k]
                    .iter()
                    .all(|&(p1, p2)| d.is_product_cone(arrs[p1], arrs[p2]));
            if ok
                && !arrows_rec(
                    k + 1,
                    c,
                    d,
                    objs,
                    arrs,
                    facts,
                    cell_at,
                    budget,
                    items,
                    product_preserving,
                )
            {
                return false;
            }
        }
        arrs[k] = NONE;
        true
    }

    fn objects_rec(
        i: usize,
        c: &CatWindow,
        d: &CatWindow,
        objs: &mut Vec<Obj>,
        facts: &[Vec<(Arr, Arr, Arr)>],
        cell_at: &[Vec<(Arr, Arr)>],
        budget: &mut Budget,
        items: &mut Vec<FunctorData>,
        product_preserving: bool,
    ) -> bool {
        if i == c.n_objects() {
            let mut arrs = vec![NONE; c.n_arrows()];
            return arrows_rec(
                0,
                c,
                d,
                objs,
                &mut arrs,
                facts,
                cell_at,
                budget,
                items,
                product_preserving,
            );
        }
        for o in d.objects() {
            objs[i] = o;
            // every arrow between assigned objects needs a target hom-set
            let feasible = (0..=i).all(|j| {
                (c.hom(i, j).is_empty() || !d.hom(objs[i], objs[j]).is_empty())
                    && (c.hom(j, i).is_empty() || !d.hom(objs[j], objs[i]).is_empty())
            });
            if feasible
                && !objects_rec(
                    i + 1,
                    c,
                    d,
                    objs,
                    facts,
                    cell_at,
                    budget,
                    items,
                    product_preserving,
                )
            {
                return false;
            }
        }
        true
    }

    if c.n_objects() == 0 {
        items.push(FunctorData {
            objects: vec![],
            arrows: vec![],
            product_preserving,
        });
    } else if d.n_objects() > 0
        && !objects_rec(
            0,
            c,
            d,
            &mut objs,
            &facts,
            &cell_at,
            &mut budget,
            &mut items,
            product_preserving,
        )
    {
        exhaustive = false;
    }
    Enumeration {
        items,
        exhaustive,
        explored: budget.used,
    }
}

/// All `b` making `(F, b)` a 1-arrow `p -> q`.
pub fn enumerate_b(p: &Doctrine, q: &Doctrine, f: &FunctorData) -> Vec<Vec<Vec<Elem>>> {
    let c = p.base();
    let n = c.n_objects();
    let cands: Vec<Vec<Vec<Elem>>> = c
        .objects()
        .map(|a| enumerate_homs(p.fiber(a), q.fiber(f.objects[a])))
        .collect();
    // equality constraint: b at the square of A, when delta_A is defined
    let mut eq_at: Vec<Vec<(Elem, Elem)>> = vec![Vec::new(); n];
    for a in c.objects() {
        if let (Ok(cell), Some(da)) = (c.product(a, a), p.delta(a)) {
            if let (Some(dfa), Ok(m)) = (
                q.delta(f.objects[a]),
                q.base().pair(f.arrows[cell.pr1], f.arrows[cell.pr2]),
            ) {
                eq_at[cell.apex].push((da, q.re(m, dfa)));
            }
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = vec![0; n];
    fn rec(
        i: usize,
        p: &Doctrine,
        q: &Doctrine,
        f: &FunctorData,
        cands: &[Vec<Vec<Elem>>],
        eq_at: &[Vec<(Elem, Elem)>],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<Elem>>>,
    ) {
        let c = p.base();
        if i == c.n_objects() {
            out.push(
                (0..c.n_objects())
                    .map(|a| cands[a][cur[a]].clone())
                    .collect(),
            );
            return;
        }
        'cand: for k in 0..cands[i].len() {
            cur[i] = k;
            let bi = &cands[i][k];
            for &(d, want) in &eq_at[i] {
                if bi[d] != want {
                    continue 'cand;
                }
            }
            for j in 0..=i {
                let bj = &cands[j][cur[j]];
                for &h in c.hom(i, j) {
                    for be in p.fiber(j).elements() {
                        if bi[p.re(h, be)] != q.re(f.arrows[h], bj[be]) {
                            continue 'cand;
                        }
                    }
                }
                for &h in c.hom(j, i) {
                    for be in p.fiber(i).elements() {
                        if bj[p.re(h, be)] != q.re(f.arrows[h], bi[be]) {
                            continue 'cand;
                        }
                    }
                }
            }
            rec(i + 1, p, q, f, cands, eq_at, cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(0, p, q, f, &cands, &eq_at, &mut cur, &mut out);
    out
}

/// All 1-arrows `p -> q` within `budget` functor-search nodes.
pub fn enumerate_one_arrows(p: &Doctrine, q: &Doctrine, budget: u64) -> Enumeration<DoctrineArrow> {
    let fs = enumerate_functors(p.base(), q.base(), true, budget);
    let mut items = Vec::new();
    for f in fs.items {
        for b in enumerate_b(p, q, &f) {
            items.push(DoctrineArrow {
                functor: f.clone(),
                b,
            });
        }
    }
    Enumeration {
        items,
        exhaustive: fs.exhaustive,
        explored: fs.explored,
    }
}

/// All 2-arrows from `f` to `g` (components `G A -> F A`).
pub fn enumerate_two_cells(
    p: &Doctrine,
    q: &Doctrine,
    f: &DoctrineArrow,
    g: &DoctrineArrow,
) -> Vec<Doctrine2Cell> {
    let c = p.base();
    let n = c.n_objects();
    let mut out = Vec::new();
    let mut cur = vec![NONE; n];
    fn rec(
        i: usize,
        p: &Doctrine,
        q: &Doctrine,
        f: &DoctrineArrow,
        g: &DoctrineArrow,
        cur: &mut Vec<Arr>,
        out: &mut Vec<Doctrine2Cell>,
    ) {
        let (c, d) = (p.base(), q.base());
        if i == c.n_objects() {
            out.push(Doctrine2Cell {
                components: cur.clone(),
            });
            return;
        }
        let (gi, fi) = (g.functor.objects[i], f.functor.objects[i]);
        'cand: for &t in d.hom(gi, fi) {
            for al in p.fiber(i).elements() {
                if !q.leq(gi, q.re(t, f.b[i][al]), g.b[i][al]) {
                    continue 'cand;
                }
            }
            cur[i] = t;
            for j in 0..=i {
                for &h in c.hom(i, j) {
                    if d.compose(f.functor.arrows[h], cur[i])
                        != d.compose(cur[j], g.functor.arrows[h])
                    {
                        continue 'cand;
                    }
                }
                for &h in c.hom(j, i) {
                    if d.compose(f.functor.arrows[h], cur[j])
                        != d.compose(cur[i], g.functor.arrows[h])
                    {
                        continue 'cand;
                    }
                }
            }
            rec(i + 1, p, q, f, g, cur, out);
        }
        cur[i] = NONE;
    }
    if n == 0 {
        return vec![Doctrine2Cell { components: vec![] }];
    }
    rec(0, p, q, f, g, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    pub(crate) fn terminal() -> Doctrine {
        let mut products = BTreeMap::new();
        products.insert(
            (0, 0),
            crate::fincat::ProductCell {
                apex: 0,
                pr1: 0,
                pr2: 0,
            },
        );
        let w = CatWindow::dense(
            vec!["1".into()],
            vec![crate::fincat::ArrowInfo {
                name: "id".into(),
                dom: 0,
                cod: 0,
            }],
            vec![0],
            products,
            |_, _| Some(0),
        )
        .unwrap();
        Doctrine::new(
            "terminal",
            Arc::new(w),
            vec![Arc::new(InfSemilattice::chain(1))],
            vec![vec![0]],
            vec![Some(0)],
        )
        .unwrap()
    }

    #[test]
    fn terminal_doctrine_passes_everything() {
        let t = terminal();
        assert!(check_doctrine(&t).passed());
        assert!(check_elementary(&t).passed());
        assert_eq!(exists_along_diagonal(&t, 0, 0), Ok(0));
    }

    #[test]
    fn identity_arrow_on_terminal() {
        let t = terminal();
        let id = DoctrineArrow::identity(&t);
        assert!(check_one_arrow(&t, &t, &id).passed());
        let e = enumerate_one_arrows(&t, &t, 1000);
        assert!(e.exhaustive);
        assert_eq!(e.items, vec![id]);
    }
}
