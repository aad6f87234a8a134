use doctrines::completions::{complete_q, complete_x, CompletionResult};
use doctrines::fixtures::{blur, finset_sub, posetal};
use doctrines::infsl::InfSemilattice;
use doctrines::verify::{check_universal_with, UniversalKind};
use std::sync::Arc;

const BUDGET: u64 = 5_000_000;

/// Every way of changing one value of one fiber component of the unit.
fn unit_mutants(res: &CompletionResult) -> Vec<CompletionResult> {
    let mut out = Vec::new();
    for (a, comp) in res.unit.b.iter().enumerate() {
        let target = res.doctrine.fiber(res.unit.functor.objects[a]).len();
        for (x, &y) in comp.iter().enumerate() {
            for v in (0..target).filter(|&v| v != y) {
                let mut m = res.clone();
                m.unit.b[a][x] = v;
                out.push(m);
            }
        }
    }
    out
}

fn assert_sharp(res: &CompletionResult, z: &doctrines::doctrine::Doctrine, kind: UniversalKind) {
    let r = check_universal_with(res, z, kind, BUDGET);
    assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
    let mutants = unit_mutants(res);
    assert!(!mutants.is_empty());
    for (i, m) in mutants.iter().enumerate() {
        assert!(
            !check_universal_with(m, z, kind, BUDGET).passed(),
            "unit mutant #{i} still satisfies the universal property"
        );
    }
}

#[test]
fn quotient_unit_mutations_break_the_universal_property() {
    let p = Arc::new(posetal(
        &InfSemilattice::chain(2),
        &InfSemilattice::chain(2),
    ));
    let q = complete_q(&p).unwrap();
    assert_sharp(&q, &finset_sub(2), UniversalKind::Quotients);
}

#[test]
fn collapse_unit_mutations_break_the_universal_property() {
    let p = Arc::new(blur());
    let x = complete_x(&p).unwrap();
    let target = x.doctrine.as_ref().clone();
    assert_sharp(&x, &target, UniversalKind::Extensional);
}
