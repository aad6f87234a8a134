//! Canonical fixtures: subobjects and weak subobjects of small finite sets, posetal
//! doctrines, and hand-built micro windows.

use crate::doctrine::{Doctrine, DoctrineArrow};
use crate::fincat::{ArrowInfo, CatWindow, FunctorData, Obj, ProductCell};
use crate::infsl::{is_order_iso, Elem, InfSemilattice};
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureSpec {
    FinsetSub(usize),
    FinsetWeaksub(usize),
    /// Posetal doctrine on an `n`-chain with constant `m`-chain fibers.
    Posetal {
        chain: usize,
        fiber: usize,
    },
    Terminal,
    Two,
    Blur,
}

impl FixtureSpec {
    pub fn build(&self) -> Doctrine {
        match *self {
            FixtureSpec::FinsetSub(n) => finset_sub(n),
            FixtureSpec::FinsetWeaksub(n) => finset_weaksub(n),
            FixtureSpec::Posetal { chain, fiber } => {
                posetal(&InfSemilattice::chain(chain), &InfSemilattice::chain(fiber))
            }
            FixtureSpec::Terminal => terminal(),
            FixtureSpec::Two => two(),
            FixtureSpec::Blur => blur(),
        }
    }
}

/// Skeletal finite sets `0..=n` with every function; arrows are listed by
/// (domain, codomain, function in lexicographic order).
pub struct FinsetWindow {
    pub window: CatWindow,
    pub functions: Vec<Vec<usize>>,
}

fn all_functions(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 {
        return vec![vec![]];
    }
    if n == 0 {
        return out;
    }
    let mut cur = vec![0; m];
    loop {
        out.push(cur.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < n {
                break;
            }
            cur[i] = 0;
        }
    }
}

fn function_name(m: usize, n: usize, f: &[usize]) -> String {
    let body: String = f
        .iter()
        .map(|x| char::from_digit(*x as u32, 36).unwrap())
        .collect();
    format!("f{m}_{n}_{body}")
}

pub fn finset_window(n: usize) -> FinsetWindow {
    let mut arrows = Vec::new();
    let mut functions = Vec::new();
    let mut index: FxHashMap<(usize, usize, Vec<usize>), usize> = FxHashMap::default();
    for m in 0..=n {
        for k in 0..=n {
            for f in all_functions(m, k) {
                index.insert((m, k, f.clone()), arrows.len());
                arrows.push(ArrowInfo {
                    name: if m == k && f.iter().enumerate().all(|(i, &x)| i == x) {
                        format!("id_{m}")
                    } else {
                        function_name(m, k, &f)
                    },
                    dom: m,
                    cod: k,
                });
                functions.push(f);
            }
        }
    }
    let identity = (0..=n)
        .map(|m| index[&(m, m, (0..m).collect::<Vec<_>>())])
        .collect();
    let mut products = BTreeMap::new();
    for a in 0..=n {
        for b in 0..=n {
            if a * b <= n {
                let apex = a * b;
                let pr1: Vec<usize> = (0..apex).map(|k| k / b).collect();
                let pr2: Vec<usize> = (0..apex).map(|k| k % b).collect();
                products.insert(
                    (a, b),
                    ProductCell {
                        apex,
                        pr1: index[&(apex, a, pr1)],
                        pr2: index[&(apex, b, pr2)],
                    },
                );
            }
        }
    }
    let objects = (0..=n).map(|m| m.to_string()).collect();
    let window = CatWindow::dense(objects, arrows.clone(), identity, products, |g, f| {
        let (ag, af) = (&arrows[g], &arrows[f]);
        if af.cod != ag.dom {
            return None;
        }
        let h: Vec<usize> = functions[f].iter().map(|&x| functions[g][x]).collect();
        index.get(&(af.dom, ag.cod, h)).copied()
    })
    .expect("finite-set window is well formed");
    FinsetWindow { window, functions }
}

/// Subobjects of finite sets of size at most `n`: powerset fibers, inverse image,
/// diagonal subsets as fibered equality.
pub fn finset_sub(n: usize) -> Doctrine {
    let fw = finset_window(n);
    let c = &fw.window;
    let fibers = c
        .objects()
        .map(|a| Arc::new(InfSemilattice::powerset(a)))
        .collect();
    let reindex = c
        .arrows()
        .map(|f| {
            let fun = &fw.functions[f];
            (0..1usize << c.cod(f))
                .map(|s| {
                    fun.iter()
                        .enumerate()
                        .filter(|(_, &y)| s >> y & 1 == 1)
                        .fold(0, |acc, (i, _)| acc | 1 << i)
                })
                .collect()
        })
        .collect();
    let delta = c
        .objects()
        .map(|a| {
            c.product(a, a)
                .ok()
                .map(|_| (0..a).fold(0, |acc, i| acc | 1 << (i * a + i)))
        })
        .collect();
    Doctrine::new(
        format!("FS{n}"),
        Arc::new(fw.window),
        fibers,
        reindex,
        delta,
    )
    .expect("subobject doctrine is well formed")
}

fn image_mask(f: &[usize]) -> usize {
    f.iter().fold(0, |acc, &y| acc | 1 << y)
}

/// Weak subobjects: the poset reflection of the slice over each object, restricted to
/// domains in the window. Classes are computed by factorization, not by images; the
/// builder then asserts the order isomorphism with the powerset.
pub fn finset_weaksub(n: usize) -> Doctrine {
    let fw = finset_window(n);
    let c = &fw.window;
    let mut fibers = Vec::new();
    // class of every arrow inside the fiber of its codomain
    let mut class_of = vec![0usize; c.n_arrows()];
    let mut mono_rep: Vec<Vec<usize>> = Vec::new();
    for a in c.objects() {
        let into: Vec<usize> = c.into(a).to_vec();
        let factors = |x: usize, y: usize| -> bool {
            c.hom(c.dom(x), c.dom(y))
                .iter()
                .any(|&h| c.compose(y, h) == x)
        };
        let mut reps: Vec<usize> = Vec::new();
        for &x in &into {
            match reps.iter().position(|&r| factors(x, r) && factors(r, x)) {
                Some(i) => class_of[x] = i,
                None => {
                    class_of[x] = reps.len();
                    reps.push(x);
                }
            }
        }
        // choose an injective representative for each class
        let monos: Vec<usize> = (0..reps.len())
            .map(|i| {
                *into
                    .iter()
                    .filter(|&&x| class_of[x] == i)
                    .find(|&&x| image_mask(&fw.functions[x]).count_ones() as usize == c.dom(x))
                    .expect("every class has an injective member")
            })
            .collect();
        let k = reps.len();
        let mut leq = vec![false; k * k];
        for i in 0..k {
            for j in 0..k {
                leq[i * k + j] = factors(reps[i], reps[j]);
            }
        }
        let top = class_of[c.id(a)];
        let labels = monos
            .iter()
            .map(|&x| {
                format!(
                    "[{}]",
                    crate::infsl::subset_label(image_mask(&fw.functions[x]), a)
                )
            })
            .collect();
        let l =
            InfSemilattice::new(labels, leq, top).expect("poset reflection is an inf-semilattice");
        let to_powerset: Vec<Elem> = monos
            .iter()
            .map(|&x| image_mask(&fw.functions[x]))
            .collect();
        assert!(
            is_order_iso(&l, &InfSemilattice::powerset(a), &to_powerset),
            "weak subobjects of {a} are not order-isomorphic to its subsets"
        );
        fibers.push(Arc::new(l));
        mono_rep.push(monos);
    }
    // reindex along the chosen pullback of the injective representative
    let index: FxHashMap<(usize, usize, Vec<usize>), usize> = c
        .arrows()
        .map(|f| ((c.dom(f), c.cod(f), fw.functions[f].clone()), f))
        .collect();
    let reindex = c
        .arrows()
        .map(|f| {
            let (a, b) = (c.dom(f), c.cod(f));
            mono_rep[b]
                .iter()
                .map(|&y| {
                    let im = image_mask(&fw.functions[y]);
                    let pre: Vec<usize> = (0..a)
                        .filter(|&i| im >> fw.functions[f][i] & 1 == 1)
                        .collect();
                    let p = index[&(pre.len(), a, pre)];
                    class_of[p]
                })
                .collect()
        })
        .collect();
    let delta = c
        .objects()
        .map(|a| c.diagonal(a).ok().map(|d| class_of[d]))
        .collect();
    Doctrine::new(
        format!("WS{n}"),
        Arc::new(fw.window),
        fibers,
        reindex,
        delta,
    )
    .expect("weak subobject doctrine is well formed")
}

/// The comparison `S -> Psi` sending a subset to the class of its inclusion.
pub fn sub_to_weaksub(s: &Doctrine, w: &Doctrine) -> DoctrineArrow {
    let c = s.base();
    let b = c
        .objects()
        .map(|a| {
            let f = w.fiber(a);
            (0..s.fiber(a).len())
                .map(|m| {
                    let want = format!("[{}]", crate::infsl::subset_label(m, a));
                    f.find(&want)
                        .expect("every subset has a weak-subobject class")
                })
                .collect()
        })
        .collect();
    DoctrineArrow {
        functor: FunctorData::identity(c),
        b,
    }
}

/// The inf-semilattice `l` as a category (one arrow `x -> y` iff `x <= y`, products are
/// meets), with the constant fiber `fiber`, identity reindexing, and `delta = top`.
pub fn posetal(l: &InfSemilattice, fiber: &InfSemilattice) -> Doctrine {
    let n = l.len();
    let mut arrows = Vec::new();
    let mut at = vec![usize::MAX; n * n];
    for x in 0..n {
        for y in 0..n {
            if l.leq(x, y) {
                at[x * n + y] = arrows.len();
                arrows.push(ArrowInfo {
                    name: if x == y {
                        format!("id_{}", l.label(x))
                    } else {
                        format!("le_{}_{}", l.label(x), l.label(y))
                    },
                    dom: x,
                    cod: y,
                });
            }
        }
    }
    let identity = (0..n).map(|x| at[x * n + x]).collect();
    let mut products = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let m = l.meet(x, y);
            products.insert(
                (x, y),
                ProductCell {
                    apex: m,
                    pr1: at[m * n + x],
                    pr2: at[m * n + y],
                },
            );
        }
    }
    let objects = l.labels().to_vec();
    let arrs = arrows.clone();
    let w = CatWindow::dense(objects, arrows, identity, products, |g, f| {
        let h = at[arrs[f].dom * n + arrs[g].cod];
        (h != usize::MAX).then_some(h)
    })
    .expect("posetal window is well formed");
    let fib = Arc::new(fiber.clone());
    let reindex = (0..w.n_arrows())
        .map(|_| fiber.elements().collect())
        .collect();
    let delta = (0..n).map(|_| Some(fiber.top())).collect();
    Doctrine::new(
        format!("posetal({n},{})", fiber.len()),
        Arc::new(w),
        vec![fib; n],
        reindex,
        delta,
    )
    .expect("posetal doctrine is well formed")
}

/// One object, one arrow, one-element fiber.
pub fn terminal() -> Doctrine {
    let mut d = posetal(&InfSemilattice::chain(1), &InfSemilattice::chain(1));
    d.name = "terminal".into();
    d
}

/// One object with a two-element fiber.
pub fn two() -> Doctrine {
    let mut d = posetal(&InfSemilattice::chain(1), &InfSemilattice::chain(2));
    d.name = "Two".into();
    d
}

/// Objects `A` (two points) and `AA = A x A`. The window keeps only
/// `hom(A,A) = {id, c0}` (c0 constant at 0), pairs of those into `AA`,
/// `{p1, p2, k0}` out of `AA` (k0 constant at 0), and pairs of those on `AA`.
/// The doctrine is indiscrete: two-element fibers, identity reindexing, `delta_A = top`.
pub fn blur() -> Doctrine {
    // functions on A = {0,1} and AA = {0..3}, (i,j) at 2i+j
    let m: [[usize; 2]; 2] = [[0, 1], [0, 0]];
    let nm = ["id", "c0"];
    let pn: [[usize; 4]; 3] = [[0, 0, 1, 1], [0, 1, 0, 1], [0, 0, 0, 0]];
    let nn = ["p1", "p2", "k0"];
    let mut arrows = Vec::new();
    let mut funs: Vec<Vec<usize>> = Vec::new();
    for (i, f) in m.iter().enumerate() {
        arrows.push(ArrowInfo {
            name: if i == 0 { "id_A".into() } else { nm[i].into() },
            dom: 0,
            cod: 0,
        });
        funs.push(f.to_vec());
    }
    for (i, f) in m.iter().enumerate() {
        for (j, g) in m.iter().enumerate() {
            arrows.push(ArrowInfo {
                name: format!("m_{}_{}", nm[i], nm[j]),
                dom: 0,
                cod: 1,
            });
            funs.push((0..2).map(|x| 2 * f[x] + g[x]).collect());
        }
    }
    for (i, f) in pn.iter().enumerate() {
        arrows.push(ArrowInfo {
            name: nn[i].into(),
            dom: 1,
            cod: 0,
        });
        funs.push(f.to_vec());
    }
    for (i, f) in pn.iter().enumerate() {
        for (j, g) in pn.iter().enumerate() {
            arrows.push(ArrowInfo {
                name: if (i, j) == (0, 1) {
                    "id_AA".into()
                } else {
                    format!("n_{}_{}", nn[i], nn[j])
                },
                dom: 1,
                cod: 1,
            });
            funs.push((0..4).map(|x| 2 * f[x] + g[x]).collect());
        }
    }
    let find = |d: Obj, c: Obj, f: &[usize]| {
        (0..arrows.len()).find(|&k| arrows[k].dom == d && arrows[k].cod == c && funs[k] == f)
    };
    let identity = vec![
        find(0, 0, &[0, 1]).unwrap(),
        find(1, 1, &[0, 1, 2, 3]).unwrap(),
    ];
    let mut products = BTreeMap::new();
    products.insert(
        (0, 0),
        ProductCell {
            apex: 1,
            pr1: find(1, 0, &pn[0]).unwrap(),
            pr2: find(1, 0, &pn[1]).unwrap(),
        },
    );
    let w = CatWindow::dense(
        vec!["A".into(), "AA".into()],
        arrows.clone(),
        identity,
        products,
        |g, f| {
            let h: Vec<usize> = funs[f].iter().map(|&x| funs[g][x]).collect();
            find(arrows[f].dom, arrows[g].cod, &h)
        },
    )
    .expect("blur window is well formed");
    let fib = Arc::new(InfSemilattice::chain(2));
    let reindex = (0..w.n_arrows()).map(|_| vec![0, 1]).collect();
    Doctrine::new(
        "Blur",
        Arc::new(w),
        vec![fib.clone(), fib],
        reindex,
        vec![Some(1), None],
    )
    .expect("blur doctrine is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doctrine::{check_doctrine, check_elementary, check_one_arrow};
    use crate::fincat::check_category;

    #[test]
    fn function_enumeration_counts() {
        assert_eq!(all_functions(0, 0).len(), 1);
        assert_eq!(all_functions(2, 0).len(), 0);
        assert_eq!(all_functions(3, 2).len(), 8);
    }

    #[test]
    fn fs1_shape() {
        let p = finset_sub(1);
        assert_eq!(p.base().n_objects(), 2);
        assert_eq!(p.fiber(0).len(), 1);
        assert_eq!(p.fiber(1).len(), 2);
    }

    #[test]
    fn fs2_passes() {
        let p = finset_sub(2);
        assert!(check_doctrine(&p).passed());
        assert!(check_elementary(&p).passed());
    }

    #[test]
    fn weaksub2_passes_and_compares() {
        let s = finset_sub(2);
        let w = finset_weaksub(2);
        assert!(check_doctrine(&w).passed(), "{}", check_doctrine(&w));
        assert!(check_elementary(&w).passed(), "{}", check_elementary(&w));
        let a = sub_to_weaksub(&s, &w);
        assert!(check_one_arrow(&s, &w, &a).passed());
    }

    #[test]
    fn posetal_and_blur_pass() {
        for p in [
            posetal(&InfSemilattice::chain(2), &InfSemilattice::chain(2)),
            terminal(),
            two(),
            blur(),
        ] {
            assert!(
                check_category(p.base()).passed(),
                "{}",
                check_category(p.base())
            );
            assert!(check_doctrine(&p).passed(), "{}", p.name);
            assert!(check_elementary(&p).passed(), "{}", check_elementary(&p));
        }
        assert_eq!(blur().base().n_arrows(), 18);
    }
}
