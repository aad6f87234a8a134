//! Single-fault mutants of the fixtures. Each one pairs the report of a check on the
//! intact structure with the report of the same check after exactly one fault is injected.

use crate::completions::{check_congruence, complete_x};
use crate::doctrine::{
    check_doctrine, check_elementary, check_one_arrow, check_two_arrow, Doctrine, Doctrine2Cell,
    DoctrineArrow,
};
use crate::fincat::{check_category, Arr, FunctorData, Obj};
use crate::fixtures::{blur, finset_sub, posetal};
use crate::infsl::InfSemilattice;
use crate::logic::{
    check_descent_data, check_quotient, descent_data, has_full_comprehensions, kernel,
};
use crate::report::{Line, Report, Status};
use std::sync::Arc;

pub struct Mutant {
    pub name: &'static str,
    pub fault: &'static str,
    /// The line expected to catch the fault.
    pub check: &'static str,
    pub original: Report,
    pub mutated: Report,
}

impl Mutant {
    fn caught_line(&self) -> Option<&Line> {
        self.mutated.line(self.check)
    }

    /// The intact structure passes the check and the mutant fails it with a witness.
    pub fn caught(&self) -> bool {
        let clean = self
            .original
            .line(self.check)
            .is_some_and(|l| !l.is_failure());
        let hit = self.caught_line().is_some_and(|l| {
            matches!(l.status, Status::Fail | Status::Structural) && l.witness.is_some()
        });
        clean && hit
    }

    pub fn witness(&self) -> Option<&str> {
        self.caught_line().and_then(|l| l.witness.as_deref())
    }
}

fn arrow(p: &Doctrine, name: &str) -> Arr {
    p.base()
        .find_arrow(name)
        .unwrap_or_else(|| panic!("fixture has no arrow {name}"))
}

fn object(p: &Doctrine, name: &str) -> Obj {
    p.base()
        .find_object(name)
        .unwrap_or_else(|| panic!("fixture has no object {name}"))
}

fn single(line: Line) -> Report {
    let mut r = Report::new(line.check.clone());
    r.push(line);
    r
}

/// `swap . pick0` redirected to `pick0`.
fn broken_composition() -> Mutant {
    let p = finset_sub(2);
    let (g, f, wrong) = (
        arrow(&p, "f2_2_10"),
        arrow(&p, "f1_2_0"),
        arrow(&p, "f1_2_0"),
    );
    let base = p.base().with_composite(g, f, wrong).expect("dense window");
    Mutant {
        name: "broken-composition",
        fault: "swap . pick0 = pick0 in FS2",
        check: "category.associativity",
        original: check_category(p.base()),
        mutated: check_category(&base),
    }
}

/// `P_swap` sends `{0}` to the whole set.
fn non_meet_preserving_reindex() -> Mutant {
    let p = finset_sub(2);
    let q = p.with_reindex(arrow(&p, "f2_2_10"), vec![0, 3, 1, 3]);
    Mutant {
        name: "non-meet-preserving-reindex",
        fault: "P_swap({0}) = {0,1} in FS2",
        check: "doctrine.reindex-homomorphism",
        original: check_doctrine(&p),
        mutated: check_doctrine(&q),
    }
}

/// `delta_2` replaced by the full relation.
fn wrong_delta() -> Mutant {
    let p = finset_sub(4);
    let two = object(&p, "2");
    let q = p.with_delta(two, Some(15));
    Mutant {
        name: "wrong-delta",
        fault: "delta_2 = top in FS4",
        check: "elementary.diagonal-adjunction",
        original: check_elementary(&p),
        mutated: check_elementary(&q),
    }
}

/// Identity functor with every `b_A` constant at top: a natural family of homomorphisms
/// that forgets equality.
fn broken_equality_component() -> Mutant {
    let p = finset_sub(4);
    let c = p.base();
    let good = DoctrineArrow::identity(&p);
    let bad = DoctrineArrow {
        functor: FunctorData::identity(c),
        b: c.objects()
            .map(|a| vec![p.top(a); p.fiber(a).len()])
            .collect(),
    };
    Mutant {
        name: "broken-equality-component",
        fault: "b_A = const top on FS4",
        check: "one-arrow.equality-preserved",
        original: check_one_arrow(&p, &p, &good),
        mutated: check_one_arrow(&p, &p, &bad),
    }
}

/// `id_2` offered as the quotient of the full relation on 2.
fn fake_quotient() -> Mutant {
    let p = finset_sub(4);
    let bang = arrow(&p, "f2_1_00");
    let rho = kernel(&p, bang).expect("2 x 2 is in the window");
    Mutant {
        name: "fake-quotient",
        fault: "id_2 claimed as quotient of the full relation on 2",
        check: "quotient.claimed",
        original: single(check_quotient(&p, rho, bang)),
        mutated: single(check_quotient(&p, rho, arrow(&p, "id_2"))),
    }
}

/// Two-object chain `0 <= 1`; the top of `P(1)` is the only element not killed by the
/// arrow into it, so the comprehensions of bottom and middle coincide.
fn non_full_comprehension() -> Mutant {
    let base = posetal(&InfSemilattice::chain(2), &InfSemilattice::chain(1)).base_arc();
    let three = Arc::new(InfSemilattice::chain(3));
    let one = Arc::new(InfSemilattice::chain(1));
    let le = base.find_arrow("le_0_1").expect("chain arrow");
    let reindex: Vec<Vec<usize>> = base
        .arrows()
        .map(|f| match f {
            _ if f == le => vec![0; 3],
            _ if base.dom(f) == 0 => vec![0],
            _ => vec![0, 1, 2],
        })
        .collect();
    let mutated = Doctrine::new(
        "non-full",
        base.clone(),
        vec![one, three.clone()],
        reindex.clone(),
        vec![Some(0), Some(2)],
    )
    .expect("well typed");
    let intact = Doctrine::new(
        "chain",
        base.clone(),
        vec![three.clone(), three],
        base.arrows().map(|_| vec![0, 1, 2]).collect(),
        vec![Some(2), Some(2)],
    )
    .expect("well typed");
    Mutant {
        name: "non-full-comprehension",
        fault: "P(0) collapsed to a point under a three-element P(1)",
        check: "comprehension.full",
        original: has_full_comprehensions(&intact),
        mutated: has_full_comprehensions(&mutated),
    }
}

/// `{0}` smuggled into the descent data of the full relation on 2.
fn broken_descent_datum() -> Mutant {
    let p = finset_sub(4);
    let two = object(&p, "2");
    let rho = kernel(&p, arrow(&p, "f2_1_00")).expect("2 x 2 is in the window");
    let (_, inc) = descent_data(&p, two, rho).expect("2 x 2 is in the window");
    let mut claimed = inc.clone();
    claimed.push(1);
    Mutant {
        name: "broken-descent-datum",
        fault: "{0} claimed compatible with the full relation on 2",
        check: "descent.datum",
        original: single(check_descent_data(&p, two, rho, &inc)),
        mutated: single(check_descent_data(&p, two, rho, &claimed)),
    }
}

/// The chosen product `1 x 2` with the constant map as second projection.
fn bad_product_cell() -> Mutant {
    let p = finset_sub(2);
    let (one, two) = (object(&p, "1"), object(&p, "2"));
    let mut cell = p.base().product(one, two).expect("chosen");
    cell.pr2 = arrow(&p, "f2_2_00");
    let base = p.base().with_product_cell(one, two, cell);
    Mutant {
        name: "bad-product-cell",
        fault: "pr2 of 1 x 2 = const 0 in FS2",
        check: "category.products",
        original: check_category(p.base()),
        mutated: check_category(&base),
    }
}

/// The identity 2-cell on the identity of FS2 with its component at 2 made constant.
fn collapsed_two_cell() -> Mutant {
    let p = finset_sub(2);
    let c = p.base();
    let id = DoctrineArrow::identity(&p);
    let good = Doctrine2Cell {
        components: c.objects().map(|a| c.id(a)).collect(),
    };
    let mut bad = good.clone();
    bad.components[object(&p, "2")] = arrow(&p, "f2_2_00");
    Mutant {
        name: "collapsed-two-cell",
        fault: "theta_2 = const 0 on id_FS2",
        check: "two-arrow.naturality",
        original: check_two_arrow(&p, &p, &id, &id, &good),
        mutated: check_two_arrow(&p, &p, &id, &id, &bad),
    }
}

/// `c0 : A -> A` split off from the class of `id_A` in the collapse of Blur.
fn corrupted_class() -> Mutant {
    let p = Arc::new(blur());
    let x = complete_x(&p).expect("Blur collapses");
    let class: Vec<Arr> = x
        .unit
        .functor
        .arrows
        .iter()
        .map(|&g| x.arrow_under[g])
        .collect();
    let c0 = arrow(&p, "c0");
    let mut bad = class.clone();
    bad[c0] = c0;
    Mutant {
        name: "corrupted-class",
        fault: "c0 separated from id_A in X(Blur)",
        check: "x.congruence-agrees",
        original: check_congruence(&p, &class),
        mutated: check_congruence(&p, &bad),
    }
}

/// The ten shipped mutants.
pub fn battery() -> Vec<Mutant> {
    vec![
        broken_composition(),
        non_meet_preserving_reindex(),
        wrong_delta(),
        broken_equality_component(),
        fake_quotient(),
        non_full_comprehension(),
        broken_descent_datum(),
        bad_product_cell(),
        collapsed_two_cell(),
        corrupted_class(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_mutant_is_caught() {
        for m in battery() {
            assert!(
                m.caught(),
                "{}: original {:?} / mutated {:?}",
                m.name,
                m.original.line(m.check),
                m.mutated.line(m.check)
            );
        }
    }
}
