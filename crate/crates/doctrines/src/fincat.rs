//! Finite category windows with a chosen, partial product structure.
//!
//! Iterated products are left-associated: `X1 x X2 x X3` means `(X1 x X2) x X3`,
//! and projections are numbered from 1 along that bracketing.

use crate::report::{Line, Report, Status, Tally};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

pub type Obj = usize;
pub type Arr = usize;

/// Sentinel for a missing composite.
pub const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("product-undefined: no product cell for objects {0} and {1}")]
    ProductUndefined(Obj, Obj),
    #[error("arrows {g} and {f} are not composable")]
    NotComposable { g: Arr, f: Arr },
    #[error("arrows {0} and {1} do not share a domain")]
    DomainMismatch(Arr, Arr),
    #[error("window invariant violated: no mediating arrow for ({0}, {1})")]
    NoMediator(Arr, Arr),
    #[error("window invariant violated: several mediating arrows for ({0}, {1})")]
    NonUniqueMediator(Arr, Arr),
    #[error("dangling reference: {0}")]
    Dangling(String),
    #[error("empty product")]
    EmptyProduct,
    #[error("projection index {0} out of range 1..={1}")]
    ProjectionIndex(usize, usize),
    #[error("composition is not stored densely in this window")]
    NotDense,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowInfo {
    pub name: String,
    pub dom: Obj,
    pub cod: Obj,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductCell {
    pub apex: Obj,
    pub pr1: Arr,
    pub pr2: Arr,
}

/// Composition of a window whose arrows are arrows of a base window, via `under`.
#[derive(Clone, Debug)]
pub struct Lift {
    pub base: Arc<CatWindow>,
    pub under_obj: Vec<Obj>,
    pub under: Vec<Arr>,
    index: FxHashMap<(Arr, Obj, Obj), Arr>,
}

#[derive(Clone, Debug)]
enum Composition {
    /// `table[f][out_pos[g]] = g . f` for every `g` out of `cod f`.
    Dense(Vec<Vec<Arr>>),
    Lifted(Lift),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mediator {
    Unique(Arr),
    Many,
}

#[derive(Clone, Debug)]
pub struct CatWindow {
    objects: Vec<String>,
    arrows: Vec<ArrowInfo>,
    identity: Vec<Arr>,
    products: BTreeMap<(Obj, Obj), ProductCell>,
    comp: Composition,
    out: Vec<Vec<Arr>>,
    inc: Vec<Vec<Arr>>,
    out_pos: Vec<usize>,
    hom: Vec<Vec<Arr>>,
    pairing: OnceLock<FxHashMap<(Arr, Arr), Mediator>>,
}

/// Plain, serializable form of a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowData {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowInfo>,
    pub identities: Vec<Arr>,
    /// `(g, f, g . f)` for every composable pair.
    pub composition: Vec<(Arr, Arr, Arr)>,
    pub products: Vec<ProductEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub left: Obj,
    pub right: Obj,
    pub apex: Obj,
    pub pr1: Arr,
    pub pr2: Arr,
}

/// A pullback or weak-pullback square `apex -p-> A`, `apex -q-> B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Square {
    pub apex: Obj,
    pub p: Arr,
    pub q: Arr,
}

/// A full subwindow together with the id translation both ways.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub window: CatWindow,
    pub obj_old: Vec<Obj>,
    pub arr_old: Vec<Arr>,
    pub obj_new: Vec<Option<Obj>>,
    pub arr_new: Vec<Option<Arr>>,
}

fn index_arrows(
    n_obj: usize,
    arrows: &[ArrowInfo],
) -> (Vec<Vec<Arr>>, Vec<Vec<Arr>>, Vec<usize>, Vec<Vec<Arr>>) {
    let mut out = vec![Vec::new(); n_obj];
    let mut inc = vec![Vec::new(); n_obj];
    let mut hom = vec![Vec::new(); n_obj * n_obj];
    let mut out_pos = vec![0; arrows.len()];
    for (i, a) in arrows.iter().enumerate() {
        out_pos[i] = out[a.dom].len();
        out[a.dom].push(i);
        inc[a.cod].push(i);
        hom[a.dom * n_obj + a.cod].push(i);
    }
    (out, inc, out_pos, hom)
}

fn validate(
    objects: &[String],
    arrows: &[ArrowInfo],
    identity: &[Arr],
    products: &BTreeMap<(Obj, Obj), ProductCell>,
) -> Result<(), WindowError> {
    let n = objects.len();
    for (i, a) in arrows.iter().enumerate() {
        if a.dom >= n || a.cod >= n {
            return Err(WindowError::Dangling(format!(
                "arrow {} ({}) has dom/cod outside the {} objects",
                i, a.name, n
            )));
        }
    }
    if identity.len() != n {
        return Err(WindowError::Dangling(format!(
            "{} identities for {} objects",
            identity.len(),
            n
        )));
    }
    for &i in identity {
        if i >= arrows.len() {
            return Err(WindowError::Dangling(format!("identity arrow {i}")));
        }
    }
    for (&(a, b), c) in products {
        if a >= n || b >= n || c.apex >= n || c.pr1 >= arrows.len() || c.pr2 >= arrows.len() {
            return Err(WindowError::Dangling(format!(
                "product cell for ({a}, {b})"
            )));
        }
    }
    Ok(())
}

impl CatWindow {
    /// Build a window with a dense composition table filled by `comp(g, f)`.
    pub fn dense(
        objects: Vec<String>,
        arrows: Vec<ArrowInfo>,
        identity: Vec<Arr>,
        products: BTreeMap<(Obj, Obj), ProductCell>,
        comp: impl Fn(Arr, Arr) -> Option<Arr> + Sync,
    ) -> Result<Self, WindowError> {
        validate(&objects, &arrows, &identity, &products)?;
        let (out, inc, out_pos, hom) = index_arrows(objects.len(), &arrows);
        let table: Vec<Vec<Arr>> = (0..arrows.len())
            .into_par_iter()
            .map(|f| {
                out[arrows[f].cod]
                    .iter()
                    .map(|&g| comp(g, f).unwrap_or(NONE))
                    .collect()
            })
            .collect();
        Ok(CatWindow {
            objects,
            arrows,
            identity,
            products,
            comp: Composition::Dense(table),
            out,
            inc,
            out_pos,
            hom,
            pairing: OnceLock::new(),
        })
    }

    /// Build a window whose arrows sit over arrows of `base`; composition is computed in
    /// the base and looked up again by (underlying arrow, domain, codomain).
    pub fn lifted(
        objects: Vec<String>,
        arrows: Vec<ArrowInfo>,
        identity: Vec<Arr>,
        products: BTreeMap<(Obj, Obj), ProductCell>,
        base: Arc<CatWindow>,
        under_obj: Vec<Obj>,
        under: Vec<Arr>,
    ) -> Result<Self, WindowError> {
        validate(&objects, &arrows, &identity, &products)?;
        if under.len() != arrows.len() || under_obj.len() != objects.len() {
            return Err(WindowError::Dangling(
                "lift maps have the wrong length".into(),
            ));
        }
        let (out, inc, out_pos, hom) = index_arrows(objects.len(), &arrows);
        let mut index = FxHashMap::default();
        index.reserve(arrows.len());
        for (i, a) in arrows.iter().enumerate() {
            index.insert((under[i], a.dom, a.cod), i);
        }
        Ok(CatWindow {
            objects,
            arrows,
            identity,
            products,
            comp: Composition::Lifted(Lift {
                base,
                under_obj,
                under,
                index,
            }),
            out,
            inc,
            out_pos,
            hom,
            pairing: OnceLock::new(),
        })
    }

    pub fn from_data(d: &WindowData) -> Result<Self, WindowError> {
        let mut products = BTreeMap::new();
        for p in &d.products {
            products.insert(
                (p.left, p.right),
                ProductCell {
                    apex: p.apex,
                    pr1: p.pr1,
                    pr2: p.pr2,
                },
            );
        }
        let mut table: FxHashMap<(Arr, Arr), Arr> = FxHashMap::default();
        for &(g, f, h) in &d.composition {
            for x in [g, f, h] {
                if x >= d.arrows.len() {
                    return Err(WindowError::Dangling(format!(
                        "composition mentions arrow {x}"
                    )));
                }
            }
            table.insert((g, f), h);
        }
        CatWindow::dense(
            d.objects.clone(),
            d.arrows.clone(),
            d.identities.clone(),
            products,
            |g, f| table.get(&(g, f)).copied(),
        )
    }

    pub fn to_data(&self) -> WindowData {
        let mut composition = Vec::new();
        for f in 0..self.arrows.len() {
            for &g in &self.out[self.arrows[f].cod] {
                composition.push((g, f, self.compose(g, f)));
            }
        }
        WindowData {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            identities: self.identity.clone(),
            composition,
            products: self
                .products
                .iter()
                .map(|(&(l, r), c)| ProductEntry {
                    left: l,
                    right: r,
                    apex: c.apex,
                    pr1: c.pr1,
                    pr2: c.pr2,
                })
                .collect(),
        }
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        0..self.objects.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arr> {
        0..self.arrows.len()
    }

    pub fn object_name(&self, a: Obj) -> &str {
        &self.objects[a]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow(&self, f: Arr) -> &ArrowInfo {
        &self.arrows[f]
    }

    pub fn arrow_name(&self, f: Arr) -> &str {
        &self.arrows[f].name
    }

    pub fn arrow_infos(&self) -> &[ArrowInfo] {
        &self.arrows
    }

    pub fn dom(&self, f: Arr) -> Obj {
        self.arrows[f].dom
    }

    pub fn cod(&self, f: Arr) -> Obj {
        self.arrows[f].cod
    }

    pub fn id(&self, a: Obj) -> Arr {
        self.identity[a]
    }

    pub fn identities(&self) -> &[Arr] {
        &self.identity
    }

    pub fn is_identity(&self, f: Arr) -> bool {
        self.identity[self.arrows[f].dom] == f
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &[Arr] {
        &self.hom[a * self.objects.len() + b]
    }

    pub fn out_of(&self, a: Obj) -> &[Arr] {
        &self.out[a]
    }

    pub fn into(&self, a: Obj) -> &[Arr] {
        &self.inc[a]
    }

    pub fn lift(&self) -> Option<&Lift> {
        match &self.comp {
            Composition::Lifted(l) => Some(l),
            Composition::Dense(_) => None,
        }
    }

    pub fn find_object(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn find_arrow(&self, name: &str) -> Option<Arr> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// `g . f`, or [`NONE`] if the window lacks the composite or the pair is not composable.
    pub fn compose(&self, g: Arr, f: Arr) -> Arr {
        if self.arrows[f].cod != self.arrows[g].dom {
            return NONE;
        }
        match &self.comp {
            Composition::Dense(t) => t[f][self.out_pos[g]],
            Composition::Lifted(l) => {
                let u = l.base.compose(l.under[g], l.under[f]);
                if u == NONE {
                    return NONE;
                }
                l.index
                    .get(&(u, self.arrows[f].dom, self.arrows[g].cod))
                    .copied()
                    .unwrap_or(NONE)
            }
        }
    }

    pub fn try_compose(&self, g: Arr, f: Arr) -> Result<Arr, WindowError> {
        match self.compose(g, f) {
            NONE => Err(WindowError::NotComposable { g, f }),
            h => Ok(h),
        }
    }

    /// Compose a path given in diagrammatic order reversed: `compose_all(&[h, g, f]) = h . g . f`.
    pub fn compose_all(&self, path: &[Arr]) -> Arr {
        let mut it = path.iter().rev();
        let Some(&first) = it.next() else { return NONE };
        let mut acc = first;
        for &g in it {
            if acc == NONE {
                return NONE;
            }
            acc = self.compose(g, acc);
        }
        acc
    }

    pub fn products(&self) -> &BTreeMap<(Obj, Obj), ProductCell> {
        &self.products
    }

    pub fn product(&self, a: Obj, b: Obj) -> Result<ProductCell, WindowError> {
        self.products
            .get(&(a, b))
            .copied()
            .ok_or(WindowError::ProductUndefined(a, b))
    }

    pub fn has_product(&self, a: Obj, b: Obj) -> bool {
        self.products.contains_key(&(a, b))
    }

    fn pairing(&self) -> &FxHashMap<(Arr, Arr), Mediator> {
        self.pairing.get_or_init(|| {
            let mut m: FxHashMap<(Arr, Arr), Mediator> = FxHashMap::default();
            for c in self.products.values() {
                for &h in &self.inc[c.apex] {
                    let key = (self.compose(c.pr1, h), self.compose(c.pr2, h));
                    if key.0 == NONE || key.1 == NONE {
                        continue;
                    }
                    m.entry(key)
                        .and_modify(|e| *e = Mediator::Many)
                        .or_insert(Mediator::Unique(h));
                }
            }
            m
        })
    }

    /// The mediating arrow `<f, g>` into the chosen product of `cod f` and `cod g`.
    pub fn pair(&self, f: Arr, g: Arr) -> Result<Arr, WindowError> {
        if self.dom(f) != self.dom(g) {
            return Err(WindowError::DomainMismatch(f, g));
        }
        self.product(self.cod(f), self.cod(g))?;
        match self.pairing().get(&(f, g)) {
            Some(Mediator::Unique(h)) => Ok(*h),
            Some(Mediator::Many) => Err(WindowError::NonUniqueMediator(f, g)),
            None => Err(WindowError::NoMediator(f, g)),
        }
    }

    /// `f x g : A x C -> B x D`.
    pub fn times(&self, f: Arr, g: Arr) -> Result<Arr, WindowError> {
        let src = self.product(self.dom(f), self.dom(g))?;
        let l = self.try_compose(f, src.pr1)?;
        let r = self.try_compose(g, src.pr2)?;
        self.pair(l, r)
    }

    /// `<id_A, id_A> : A -> A x A`.
    pub fn diagonal(&self, a: Obj) -> Result<Arr, WindowError> {
        let i = self.id(a);
        self.pair(i, i)
    }

    /// Left-associated product of the listed objects.
    pub fn iterated_product(&self, factors: &[Obj]) -> Result<Obj, WindowError> {
        let (&first, rest) = factors.split_first().ok_or(WindowError::EmptyProduct)?;
        let mut acc = first;
        for &x in rest {
            acc = self.product(acc, x)?.apex;
        }
        Ok(acc)
    }

    /// The `i`-th projection (1-based) out of the left-associated product of `factors`.
    pub fn projection(&self, factors: &[Obj], i: usize) -> Result<Arr, WindowError> {
        let n = factors.len();
        if i == 0 || i > n {
            return Err(WindowError::ProjectionIndex(i, n));
        }
        if n == 1 {
            return Ok(self.id(factors[0]));
        }
        let inner = self.iterated_product(&factors[..n - 1])?;
        let cell = self.product(inner, factors[n - 1])?;
        if i == n {
            Ok(cell.pr2)
        } else {
            let p = self.projection(&factors[..n - 1], i)?;
            self.try_compose(p, cell.pr1)
        }
    }

    /// Left-associated pairing `<f1, f2, ..., fk>` of arrows sharing a domain.
    pub fn tuple(&self, arrows: &[Arr]) -> Result<Arr, WindowError> {
        let (&first, rest) = arrows.split_first().ok_or(WindowError::EmptyProduct)?;
        let mut acc = first;
        for &f in rest {
            acc = self.pair(acc, f)?;
        }
        Ok(acc)
    }

    /// `<pr_{s1}, ..., pr_{sk}>` out of the left-associated product of `factors`.
    pub fn tuple_map(&self, factors: &[Obj], spec: &[usize]) -> Result<Arr, WindowError> {
        let projs = spec
            .iter()
            .map(|&i| self.projection(factors, i))
            .collect::<Result<Vec<_>, _>>()?;
        self.tuple(&projs)
    }

    /// Commuting squares over the cospan `f : A -> C <- B : g` that are limits (strong)
    /// or merely weakly terminal (weak).
    pub fn find_pullbacks(&self, f: Arr, g: Arr, weak: bool) -> Vec<Square> {
        let (a, b) = (self.dom(f), self.dom(g));
        if self.cod(f) != self.cod(g) {
            return Vec::new();
        }
        let cones: Vec<Vec<(Arr, Arr)>> = self
            .objects()
            .map(|p| {
                let mut v = Vec::new();
                for &x in self.hom(p, a) {
                    let fx = self.compose(f, x);
                    for &y in self.hom(p, b) {
                        if fx != NONE && fx == self.compose(g, y) {
                            v.push((x, y));
                        }
                    }
                }
                v
            })
            .collect();
        let mut found = Vec::new();
        for apex in self.objects() {
            for &(p, q) in &cones[apex] {
                let mut ok = true;
                'outer: for src in self.objects() {
                    let mut counts: FxHashMap<(Arr, Arr), u32> = FxHashMap::default();
                    for &m in self.hom(src, apex) {
                        *counts
                            .entry((self.compose(p, m), self.compose(q, m)))
                            .or_insert(0) += 1;
                    }
                    for c in &cones[src] {
                        let k = counts.get(c).copied().unwrap_or(0);
                        if k == 0 || (!weak && k > 1) {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                if ok {
                    found.push(Square { apex, p, q });
                }
            }
        }
        found
    }

    /// Whether `(apex, p1, p2)` is a product cone of `cod p1` and `cod p2` inside the window.
    pub fn is_product_cone(&self, p1: Arr, p2: Arr) -> bool {
        let apex = self.dom(p1);
        if self.dom(p2) != apex {
            return false;
        }
        let (a, b) = (self.cod(p1), self.cod(p2));
        for x in self.objects() {
            let hs = self.hom(x, apex);
            if hs.len() != self.hom(x, a).len() * self.hom(x, b).len() {
                return false;
            }
            let mut seen: FxHashMap<(Arr, Arr), ()> = FxHashMap::default();
            for &h in hs {
                if seen
                    .insert((self.compose(p1, h), self.compose(p2, h)), ())
                    .is_some()
                {
                    return false;
                }
            }
        }
        true
    }

    /// Full subwindow on `keep`; product cells survive when both factors and the apex do.
    pub fn restrict(&self, keep: &[Obj]) -> Restriction {
        let mut obj_new = vec![None; self.n_objects()];
        let mut obj_old = Vec::new();
        for &o in keep {
            if obj_new[o].is_none() {
                obj_new[o] = Some(obj_old.len());
                obj_old.push(o);
            }
        }
        let mut arr_new = vec![None; self.n_arrows()];
        let mut arr_old = Vec::new();
        let mut arrows = Vec::new();
        for f in self.arrows() {
            if let (Some(d), Some(c)) = (obj_new[self.dom(f)], obj_new[self.cod(f)]) {
                arr_new[f] = Some(arr_old.len());
                arr_old.push(f);
                arrows.push(ArrowInfo {
                    name: self.arrows[f].name.clone(),
                    dom: d,
                    cod: c,
                });
            }
        }
        let objects = obj_old.iter().map(|&o| self.objects[o].clone()).collect();
        let identity = obj_old
            .iter()
            .map(|&o| arr_new[self.id(o)].unwrap())
            .collect();
        let mut products = BTreeMap::new();
        for (&(a, b), c) in &self.products {
            if let (Some(na), Some(nb), Some(napex)) = (obj_new[a], obj_new[b], obj_new[c.apex]) {
                products.insert(
                    (na, nb),
                    ProductCell {
                        apex: napex,
                        pr1: arr_new[c.pr1].unwrap(),
                        pr2: arr_new[c.pr2].unwrap(),
                    },
                );
            }
        }
        let window = CatWindow::dense(objects, arrows, identity, products, |g, f| {
            let h = self.compose(arr_old[g], arr_old[f]);
            if h == NONE {
                None
            } else {
                arr_new[h]
            }
        })
        .expect("restriction of a valid window is valid");
        Restriction {
            window,
            obj_old,
            arr_old,
            obj_new,
            arr_new,
        }
    }

    /// Copy of a densely stored window with one composition entry overwritten.
    pub fn with_composite(&self, g: Arr, f: Arr, h: Arr) -> Result<CatWindow, WindowError> {
        let Composition::Dense(t) = &self.comp else {
            return Err(WindowError::NotDense);
        };
        if self.cod(f) != self.dom(g) {
            return Err(WindowError::NotComposable { g, f });
        }
        let mut t = t.clone();
        t[f][self.out_pos[g]] = h;
        let mut w = self.clone();
        w.comp = Composition::Dense(t);
        w.pairing = OnceLock::new();
        Ok(w)
    }

    /// Copy with one product cell replaced (or inserted).
    pub fn with_product_cell(&self, a: Obj, b: Obj, cell: ProductCell) -> CatWindow {
        let mut w = self.clone();
        w.products.insert((a, b), cell);
        w.pairing = OnceLock::new();
        w
    }

    /// Copy with one product cell removed.
    pub fn without_product_cell(&self, a: Obj, b: Obj) -> CatWindow {
        let mut w = self.clone();
        w.products.remove(&(a, b));
        w.pairing = OnceLock::new();
        w
    }

    /// Number of composable triples, the cost of an exhaustive associativity check.
    pub fn composable_triples(&self) -> u128 {
        let weight: Vec<u128> = self
            .objects()
            .map(|b| {
                self.out[b]
                    .iter()
                    .map(|&g| self.out[self.cod(g)].len() as u128)
                    .sum()
            })
            .collect();
        self.arrows().map(|f| weight[self.cod(f)]).sum()
    }

    pub fn composable_pairs(&self) -> u64 {
        self.arrows()
            .map(|f| self.out[self.cod(f)].len() as u64)
            .sum()
    }
}

/// Above this many triples, lifted windows inherit associativity from their base.
pub const EXHAUSTIVE_TRIPLE_LIMIT: u128 = 60_000_000;

fn arrow_label(c: &CatWindow, f: Arr) -> String {
    if f == NONE || f >= c.n_arrows() {
        return format!("<missing {f}>");
    }
    let a = c.arrow(f);
    format!(
        "{}: {} -> {}",
        a.name,
        c.object_name(a.dom),
        c.object_name(a.cod)
    )
}

pub fn describe_arrow(c: &CatWindow, f: Arr) -> String {
    arrow_label(c, f)
}

fn structure_line(c: &CatWindow) -> Line {
    let mut t = Tally::new(
        "category.structure",
        "identities, composites and projections are well typed",
    );
    for a in c.objects() {
        let i = c.id(a);
        if c.dom(i) != a || c.cod(i) != a {
            t.structural(|| format!("identity of {} is {}", c.object_name(a), arrow_label(c, i)));
        } else {
            t.ok();
        }
    }
    for f in c.arrows() {
        for &g in c.out_of(c.cod(f)) {
            let h = c.compose(g, f);
            if h == NONE || h >= c.n_arrows() {
                t.structural(|| {
                    format!(
                        "composite {} . {} missing",
                        arrow_label(c, g),
                        arrow_label(c, f)
                    )
                });
            } else if c.dom(h) != c.dom(f) || c.cod(h) != c.cod(g) {
                t.structural(|| {
                    format!(
                        "composite {} . {} = {} is mistyped",
                        arrow_label(c, g),
                        arrow_label(c, f),
                        arrow_label(c, h)
                    )
                });
            } else {
                t.ok();
            }
        }
    }
    for (&(a, b), cell) in c.products() {
        if c.dom(cell.pr1) != cell.apex
            || c.dom(cell.pr2) != cell.apex
            || c.cod(cell.pr1) != a
            || c.cod(cell.pr2) != b
        {
            t.structural(|| {
                format!(
                    "product cell ({}, {}) has projections {} and {}",
                    c.object_name(a),
                    c.object_name(b),
                    arrow_label(c, cell.pr1),
                    arrow_label(c, cell.pr2)
                )
            });
        } else {
            t.ok();
        }
    }
    t.finish()
}

fn unit_line(c: &CatWindow) -> Line {
    let mut t = Tally::new("category.unit-laws", "id . f = f = f . id");
    for f in c.arrows() {
        let (a, b) = (c.dom(f), c.cod(f));
        let l = c.compose(c.id(b), f);
        let r = c.compose(f, c.id(a));
        t.check(l == f && r == f, || {
            format!(
                "{} with identities gives {} / {}",
                arrow_label(c, f),
                arrow_label(c, l),
                arrow_label(c, r)
            )
        });
    }
    t.finish()
}

fn assoc_exhaustive(c: &CatWindow) -> Tally {
    let chunks: Vec<Tally> = (0..c.n_arrows())
        .into_par_iter()
        .map(|f| {
            let mut t = Tally::new("", "");
            for &g in c.out_of(c.cod(f)) {
                let gf = c.compose(g, f);
                for &h in c.out_of(c.cod(g)) {
                    let hg = c.compose(h, g);
                    let l = if gf == NONE { NONE } else { c.compose(h, gf) };
                    let r = if hg == NONE { NONE } else { c.compose(hg, f) };
                    if l == r && l != NONE {
                        t.ok();
                    } else {
                        t.fail(|| {
                            format!(
                                "(h, g, f) = ({}, {}, {}): h.(g.f) = {} but (h.g).f = {}",
                                arrow_label(c, h),
                                arrow_label(c, g),
                                arrow_label(c, f),
                                arrow_label(c, l),
                                arrow_label(c, r)
                            )
                        });
                    }
                }
            }
            t
        })
        .collect();
    let mut t = Tally::new(
        "category.associativity",
        "h . (g . f) = (h . g) . f on every composable triple (exhaustive)",
    );
    for x in chunks {
        t.merge(x);
    }
    t
}

/// Associativity for a lifted window: base associativity plus a faithful, composition-
/// preserving underlying map imply it.
fn assoc_by_lift(c: &CatWindow, lift: &Lift) -> Tally {
    let mut t = Tally::new(
        "category.associativity",
        "inherited: base associative, and the underlying map is a faithful functor",
    );
    let base = check_category(&lift.base);
    match base.line("category.associativity") {
        Some(l) if l.status == Status::Pass => t.ok_n(l.coverage.checked),
        Some(l) => t.fail(|| format!("base window fails associativity: {:?}", l.witness)),
        None => t.fail(|| "base window has no associativity line".into()),
    }
    for a in c.objects() {
        let i = c.id(a);
        t.check(lift.under[i] == lift.base.id(lift.under_obj[a]), || {
            format!(
                "identity of {} does not lie over an identity",
                c.object_name(a)
            )
        });
    }
    for f in c.arrows() {
        let ok = lift.base.dom(lift.under[f]) == lift.under_obj[c.dom(f)]
            && lift.base.cod(lift.under[f]) == lift.under_obj[c.cod(f)];
        t.check(ok, || {
            format!("{} lies over a mistyped arrow", arrow_label(c, f))
        });
    }
    let per: Vec<Tally> = (0..c.n_arrows())
        .into_par_iter()
        .map(|f| {
            let mut t = Tally::new("", "");
            for &g in c.out_of(c.cod(f)) {
                let h = c.compose(g, f);
                let ok =
                    h != NONE && lift.under[h] == lift.base.compose(lift.under[g], lift.under[f]);
                t.check(ok, || {
                    format!(
                        "composite of {} and {} does not lie over the base composite",
                        arrow_label(c, g),
                        arrow_label(c, f)
                    )
                });
            }
            t
        })
        .collect();
    for x in per {
        t.merge(x);
    }
    for a in c.objects() {
        for b in c.objects() {
            let mut seen = rustc_hash::FxHashSet::default();
            for &f in c.hom(a, b) {
                if !seen.insert(lift.under[f]) {
                    t.fail(|| {
                        format!(
                            "two arrows {} -> {} lie over the same base arrow",
                            c.object_name(a),
                            c.object_name(b)
                        )
                    });
                }
            }
        }
    }
    t
}

fn products_line(c: &CatWindow) -> Line {
    let mut t = Tally::new(
        "category.products",
        "every chosen cell has exactly one mediating arrow for every cone in the window",
    );
    for (&(a, b), cell) in c.products() {
        if c.dom(cell.pr1) != cell.apex
            || c.dom(cell.pr2) != cell.apex
            || c.cod(cell.pr1) != a
            || c.cod(cell.pr2) != b
        {
            t.skip();
            continue;
        }
        for x in c.objects() {
            let mut counts: FxHashMap<(Arr, Arr), u32> = FxHashMap::default();
            for &h in c.hom(x, cell.apex) {
                *counts
                    .entry((c.compose(cell.pr1, h), c.compose(cell.pr2, h)))
                    .or_insert(0) += 1;
            }
            for &f in c.hom(x, a) {
                for &g in c.hom(x, b) {
                    let k = counts.get(&(f, g)).copied().unwrap_or(0);
                    t.check(k == 1, || {
                        format!(
                            "cell ({}, {}) and cone ({}, {}): {} mediating arrows",
                            c.object_name(a),
                            c.object_name(b),
                            arrow_label(c, f),
                            arrow_label(c, g),
                            k
                        )
                    });
                }
            }
            let extra = c.hom(x, cell.apex).len();
            let cones = c.hom(x, a).len() * c.hom(x, b).len();
            if extra != cones {
                t.fail(|| {
                    format!(
                        "cell ({}, {}): {} arrows from {} into the apex but {} cones",
                        c.object_name(a),
                        c.object_name(b),
                        extra,
                        c.object_name(x),
                        cones
                    )
                });
            }
        }
    }
    t.finish()
}

/// Check composition, units, associativity and the chosen products.
pub fn check_category(c: &CatWindow) -> Report {
    let mut r = Report::new("category");
    let s = structure_line(c);
    let broken = s.is_failure();
    r.push(s);
    if broken {
        return r;
    }
    r.push(unit_line(c));
    let assoc = match c.lift() {
        Some(l) if c.composable_triples() > EXHAUSTIVE_TRIPLE_LIMIT => assoc_by_lift(c, l),
        _ => assoc_exhaustive(c),
    };
    r.push(assoc.finish());
    r.push(products_line(c));
    r
}

/// Structural check of serialized window data, before any law is looked at.
pub fn check_category_data(d: &WindowData) -> Report {
    match CatWindow::from_data(d) {
        Ok(c) => check_category(&c),
        Err(e) => {
            let mut r = Report::new("category");
            let mut t = Tally::new("category.structure", "ids resolve");
            t.structural(|| e.to_string());
            r.push(t.finish());
            r
        }
    }
}

/// Object and arrow assignment between two windows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorData {
    pub objects: Vec<Obj>,
    pub arrows: Vec<Arr>,
    pub product_preserving: bool,
}

impl FunctorData {
    pub fn identity(c: &CatWindow) -> Self {
        FunctorData {
            objects: c.objects().collect(),
            arrows: c.arrows().collect(),
            product_preserving: true,
        }
    }

    /// `other . self`.
    pub fn then(&self, other: &FunctorData) -> FunctorData {
        FunctorData {
            objects: self.objects.iter().map(|&o| other.objects[o]).collect(),
            arrows: self.arrows.iter().map(|&f| other.arrows[f]).collect(),
            product_preserving: self.product_preserving && other.product_preserving,
        }
    }
}

/// Check that `f` is a functor `c -> d`, and product preserving when flagged.
pub fn check_functor(f: &FunctorData, c: &CatWindow, d: &CatWindow) -> Report {
    let mut r = Report::new("functor");
    let mut s = Tally::new(
        "functor.structure",
        "maps are total and preserve domains and codomains",
    );
    if f.objects.len() != c.n_objects() || f.arrows.len() != c.n_arrows() {
        s.structural(|| {
            format!(
                "maps cover {} objects / {} arrows, source has {} / {}",
                f.objects.len(),
                f.arrows.len(),
                c.n_objects(),
                c.n_arrows()
            )
        });
        r.push(s.finish());
        return r;
    }
    for a in c.objects() {
        if f.objects[a] >= d.n_objects() {
            s.structural(|| format!("object {} maps outside the target", c.object_name(a)));
        }
    }
    for x in c.arrows() {
        let y = f.arrows[x];
        if y >= d.n_arrows() {
            s.structural(|| format!("{} maps outside the target", arrow_label(c, x)));
        } else if f.objects[c.dom(x)] < d.n_objects()
            && f.objects[c.cod(x)] < d.n_objects()
            && (d.dom(y) != f.objects[c.dom(x)] || d.cod(y) != f.objects[c.cod(x)])
        {
            s.structural(|| format!("{} maps to {}", arrow_label(c, x), arrow_label(d, y)));
        } else {
            s.ok();
        }
    }
    let broken = s.failed();
    r.push(s.finish());
    if broken {
        return r;
    }
    let mut ids = Tally::new("functor.identities", "F(id_A) = id_FA");
    for a in c.objects() {
        ids.check(f.arrows[c.id(a)] == d.id(f.objects[a]), || {
            format!(
                "F(id {}) = {}",
                c.object_name(a),
                arrow_label(d, f.arrows[c.id(a)])
            )
        });
    }
    r.push(ids.finish());
    let parts: Vec<Tally> = (0..c.n_arrows())
        .into_par_iter()
        .map(|x| {
            let mut t = Tally::new("", "");
            for &g in c.out_of(c.cod(x)) {
                let h = c.compose(g, x);
                let l = f.arrows[h];
                let rr = d.compose(f.arrows[g], f.arrows[x]);
                t.check(l == rr, || {
                    format!(
                        "F({} . {}) = {} but F g . F f = {}",
                        arrow_label(c, g),
                        arrow_label(c, x),
                        arrow_label(d, l),
                        arrow_label(d, rr)
                    )
                });
            }
            t
        })
        .collect();
    let mut comp = Tally::new("functor.composition", "F(g . f) = F g . F f");
    for p in parts {
        comp.merge(p);
    }
    r.push(comp.finish());
    if f.product_preserving {
        let mut p = Tally::new(
            "functor.products",
            "images of chosen product cells are product cones",
        );
        for (&(a, b), cell) in c.products() {
            let ok = d.is_product_cone(f.arrows[cell.pr1], f.arrows[cell.pr2]);
            p.check(ok, || {
                format!(
                    "image of cell ({}, {}) is not a product cone",
                    c.object_name(a),
                    c.object_name(b)
                )
            });
        }
        r.push(p.finish());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_object() -> CatWindow {
        CatWindow::dense(
            vec!["*".into()],
            vec![ArrowInfo {
                name: "id".into(),
                dom: 0,
                cod: 0,
            }],
            vec![0],
            BTreeMap::new(),
            |_, _| Some(0),
        )
        .unwrap()
    }

    #[test]
    fn identity_only_window_passes() {
        let r = check_category(&one_object());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn missing_composite_is_structural() {
        let w = CatWindow::dense(
            vec!["*".into()],
            vec![ArrowInfo {
                name: "id".into(),
                dom: 0,
                cod: 0,
            }],
            vec![0],
            BTreeMap::new(),
            |_, _| None,
        )
        .unwrap();
        let r = check_category(&w);
        assert!(r.has_structural());
    }

    #[test]
    fn dangling_ids_are_structural_not_law_failures() {
        let d = WindowData {
            objects: vec!["A".into()],
            arrows: vec![ArrowInfo {
                name: "f".into(),
                dom: 0,
                cod: 3,
            }],
            identities: vec![0],
            composition: vec![],
            products: vec![],
        };
        let r = check_category_data(&d);
        assert_eq!(r.lines[0].status, Status::Structural);
    }

    #[test]
    fn identity_functor_passes() {
        let w = one_object();
        let r = check_functor(&FunctorData::identity(&w), &w, &w);
        assert!(r.passed(), "{r}");
    }
}
