use doctrines::doctrine::{check_doctrine, check_elementary};
use doctrines::fincat::check_category;
use doctrines::fixtures::{finset_sub, posetal};
use doctrines::infsl::{check_infsl, is_hom, subset_label, InfSemilattice};
use proptest::prelude::*;
use std::sync::OnceLock;

fn fs3() -> &'static doctrines::doctrine::Doctrine {
    static P: OnceLock<doctrines::doctrine::Doctrine> = OnceLock::new();
    P.get_or_init(|| finset_sub(3))
}

/// The intersection-closure of `gens` together with the full set, ordered by inclusion.
fn closure_lattice(n: usize, gens: &[usize]) -> (InfSemilattice, Vec<usize>) {
    let full = (1usize << n) - 1;
    let mut sets: Vec<usize> = vec![full];
    for &g in gens {
        sets.push(g & full);
    }
    sets.sort_unstable();
    sets.dedup();
    loop {
        let mut grown = sets.clone();
        for &a in &sets {
            for &b in &sets {
                grown.push(a & b);
            }
        }
        grown.sort_unstable();
        grown.dedup();
        if grown.len() == sets.len() {
            break;
        }
        sets = grown;
    }
    let k = sets.len();
    let leq = (0..k * k)
        .map(|i| sets[i / k] & !sets[i % k] == 0)
        .collect();
    let labels = sets.iter().map(|&s| subset_label(s, n)).collect();
    let top = sets.iter().position(|&s| s == full).unwrap();
    (InfSemilattice::new(labels, leq, top).unwrap(), sets)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_closed_families_are_inf_semilattices(gens in prop::collection::vec(0usize..32, 0..6)) {
        let (l, sets) = closure_lattice(5, &gens);
        prop_assert!(check_infsl(&l).passed());
        for a in l.elements() {
            prop_assert_eq!(l.meet(a, l.top()), a);
            prop_assert_eq!(l.meet(a, a), a);
            for b in l.elements() {
                prop_assert_eq!(sets[l.meet(a, b)], sets[a] & sets[b]);
                prop_assert_eq!(l.meet(a, b), l.meet(b, a));
                prop_assert_eq!(l.leq(a, b), l.meet(a, b) == a);
            }
        }
    }

    #[test]
    fn inverse_image_is_a_homomorphism(i in 0usize..1000) {
        let p = fs3();
        let f = i % p.base().n_arrows();
        let (a, b) = (p.base().dom(f), p.base().cod(f));
        prop_assert!(is_hom(p.fiber(b), p.fiber(a), p.reindex_map(f)));
    }

    #[test]
    fn reindexing_is_contravariant(i in 0usize..1000, j in 0usize..1000) {
        let p = fs3();
        let c = p.base();
        let f = i % c.n_arrows();
        let outs = c.out_of(c.cod(f));
        let g = outs[j % outs.len()];
        let gf = c.compose(g, f);
        for x in p.fiber(c.cod(g)).elements() {
            prop_assert_eq!(p.re(gf, x), p.re(f, p.re(g, x)));
        }
    }

    #[test]
    fn posetal_doctrines_are_elementary(chain in 1usize..5, fiber in 1usize..4) {
        let p = posetal(&InfSemilattice::chain(chain), &InfSemilattice::chain(fiber));
        prop_assert!(check_doctrine(&p).passed());
        prop_assert!(check_elementary(&p).passed());
    }

    /// Redirecting any single composite to another arrow of the same hom-set is detected.
    #[test]
    fn single_composition_faults_are_detected(i in 0usize..10_000, j in 0usize..10_000, k in 0usize..10_000) {
        let p = finset_sub(2);
        let c = p.base();
        let f = i % c.n_arrows();
        let outs = c.out_of(c.cod(f));
        let g = outs[j % outs.len()];
        let h = c.compose(g, f);
        let hom = c.hom(c.dom(f), c.cod(g));
        prop_assume!(hom.len() > 1);
        let mut wrong = hom[k % hom.len()];
        if wrong == h {
            wrong = hom[(k + 1) % hom.len()];
        }
        let broken = c.with_composite(g, f, wrong).unwrap();
        prop_assert!(!check_category(&broken).passed());
    }
}
