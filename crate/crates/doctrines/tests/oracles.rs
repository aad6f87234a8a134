//! Finite-set fixtures against values computed directly from functions and partitions.

use doctrines::completions::complete_q;
use doctrines::fixtures::{finset_sub, finset_window};
use doctrines::logic::{equivalence_relations, find_comprehension, find_quotients, kernel};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Function table of a finite-set arrow, read back from its name.
fn table(name: &str, dom: usize) -> Vec<usize> {
    if let Some(rest) = name.strip_prefix("id_") {
        let m: usize = rest.parse().unwrap();
        return (0..m).collect();
    }
    let body = name.rsplit('_').next().unwrap();
    assert_eq!(body.len(), dom, "{name}");
    body.chars()
        .map(|ch| ch.to_digit(36).unwrap() as usize)
        .collect()
}

/// All set partitions of `0..n`, by restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        let max = cur.iter().copied().max().map_or(0, |m| m + 1);
        for b in 0..=max {
            cur.push(b);
            go(i + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// `(x, y)` sits at `x * n + y` in the product `n x n`.
fn relation_mask(n: usize, same: impl Fn(usize, usize) -> bool) -> usize {
    let mut m = 0;
    for x in 0..n {
        for y in 0..n {
            if same(x, y) {
                m |= 1 << (x * n + y);
            }
        }
    }
    m
}

#[test]
fn bell_numbers_from_partitions() {
    let bell: Vec<usize> = (0..6).map(|n| partitions(n).len()).collect();
    assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
}

#[test]
fn hom_sets_have_k_to_the_m_elements() {
    let fw = finset_window(3);
    let c = &fw.window;
    for m in 0..=3 {
        for k in 0..=3 {
            assert_eq!(c.hom(m, k).len(), k.pow(m as u32), "hom({m},{k})");
        }
    }
}

#[test]
fn fibers_are_powersets() {
    let p = finset_sub(4);
    for a in p.base().objects() {
        assert_eq!(p.fiber(a).len(), 1 << a);
    }
}

#[test]
fn kernels_match_function_tables() {
    let p = finset_sub(4);
    let c = p.base();
    for f in c.arrows() {
        let (m, k) = (c.dom(f), c.cod(f));
        if m * m > 4 || k * k > 4 {
            continue;
        }
        let t = table(c.arrow_name(f), m);
        let want = relation_mask(m, |x, y| t[x] == t[y]);
        assert_eq!(kernel(&p, f).unwrap(), want, "{}", c.arrow_name(f));
    }
}

#[test]
fn equivalence_relations_are_partitions() {
    let p = finset_sub(4);
    for n in 0..=2 {
        let got: BTreeSet<usize> = equivalence_relations(&p, n).into_iter().collect();
        let want: BTreeSet<usize> = partitions(n)
            .iter()
            .map(|b| relation_mask(n, |x, y| b[x] == b[y]))
            .collect();
        assert_eq!(got, want, "relations on {n}");
    }
}

#[test]
fn quotients_have_one_point_per_block() {
    let p = finset_sub(4);
    for n in 0..=2 {
        for b in partitions(n) {
            let rho = relation_mask(n, |x, y| b[x] == b[y]);
            let blocks = b.iter().copied().max().map_or(0, |m| m + 1);
            let qs = find_quotients(&p, n, rho);
            assert!(!qs.is_empty(), "{b:?} has a quotient");
            for w in qs {
                assert_eq!(p.base().cod(w.q), blocks, "{b:?}");
            }
        }
    }
}

#[test]
fn comprehensions_are_inclusions() {
    let p = finset_sub(4);
    let c = p.base();
    for a in 0..=4 {
        for s in 0..(1usize << a) {
            let cs = find_comprehension(&p, a, s, false);
            assert!(!cs.is_empty(), "{s:b} in {a}");
            for k in cs {
                let t = table(c.arrow_name(k), c.dom(k));
                let image: usize = t.iter().map(|&x| 1 << x).sum();
                assert_eq!(c.dom(k), s.count_ones() as usize);
                assert_eq!(image, s, "{}", c.arrow_name(k));
            }
        }
    }
}

/// Objects over `n` are exactly the partitions of `n` when `n x n` is in the window.
#[test]
fn quotient_completion_objects_are_stateable_partitions() {
    let p = Arc::new(finset_sub(4));
    let q = complete_q(&p).unwrap();
    let mut counts = [0usize; 5];
    for &a in &q.object_under {
        counts[a] += 1;
    }
    let want: Vec<usize> = (0..=4)
        .map(|n| if n * n <= 4 { partitions(n).len() } else { 0 })
        .collect();
    assert_eq!(counts.to_vec(), want);
}
