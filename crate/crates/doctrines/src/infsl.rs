//! Finite inf-semilattices and their homomorphisms.

use crate::report::{Report, Tally};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Elem = usize;

const NO_MEET: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InfslError {
    #[error("element {0} is not in a carrier of size {1}")]
    NotInCarrier(Elem, usize),
    #[error("elements {0} and {1} have no greatest lower bound")]
    NoMeet(Elem, Elem),
    #[error("order is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("{0} is not the greatest element")]
    NotTop(Elem),
    #[error("selected carrier does not contain top")]
    MissingTop,
    #[error("selected carrier is not closed under meet: {0} and {1}")]
    NotMeetClosed(Elem, Elem),
}

/// Finite poset with top; meets are tabulated where they exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfSemilattice {
    labels: Vec<String>,
    leq: Vec<bool>,
    top: Elem,
    meet: Vec<u32>,
}

/// Serializable form: element labels, top, and the order as pairs `(i, j)` meaning `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfslData {
    pub elements: Vec<String>,
    pub top: Elem,
    pub order: Vec<(Elem, Elem)>,
}

impl InfSemilattice {
    /// Build from a raw order relation without validating it; see [`check_infsl`].
    pub fn from_relation(labels: Vec<String>, leq: Vec<bool>, top: Elem) -> Self {
        let n = labels.len();
        assert_eq!(leq.len(), n * n, "order matrix has the wrong size");
        let mut meet = vec![NO_MEET; n * n];
        for a in 0..n {
            for b in a..n {
                let lower: Vec<Elem> = (0..n)
                    .filter(|&c| leq[c * n + a] && leq[c * n + b])
                    .collect();
                let glb = lower
                    .iter()
                    .copied()
                    .filter(|&c| lower.iter().all(|&d| leq[d * n + c]))
                    .collect::<Vec<_>>();
                if glb.len() == 1 {
                    meet[a * n + b] = glb[0] as u32;
                    meet[b * n + a] = glb[0] as u32;
                }
            }
        }
        InfSemilattice {
            labels,
            leq,
            top,
            meet,
        }
    }

    /// Build and validate.
    pub fn new(labels: Vec<String>, leq: Vec<bool>, top: Elem) -> Result<Self, InfslError> {
        let l = Self::from_relation(labels, leq, top);
        l.validate()?;
        Ok(l)
    }

    pub fn from_data(d: &InfslData) -> Result<Self, InfslError> {
        let n = d.elements.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in &d.order {
            if a >= n || b >= n {
                return Err(InfslError::NotInCarrier(a.max(b), n));
            }
            leq[a * n + b] = true;
        }
        // reflexive-transitive closure of the declared pairs
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        if d.top >= n {
            return Err(InfslError::NotInCarrier(d.top, n));
        }
        Self::new(d.elements.clone(), leq, d.top)
    }

    /// The Hasse pairs of the order (covering relations).
    pub fn to_data(&self) -> InfslData {
        let n = self.len();
        let mut order = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) {
                    let covered =
                        (0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                    if !covered {
                        order.push((a, b));
                    }
                }
            }
        }
        InfslData {
            elements: self.labels.clone(),
            top: self.top,
            order,
        }
    }

    /// Powerset of `{0..n-1}` ordered by inclusion; element id is the subset bitmask.
    pub fn powerset(n: usize) -> Self {
        let size = 1usize << n;
        let labels = (0..size).map(|m| subset_label(m, n)).collect();
        let mut leq = vec![false; size * size];
        let mut meet = vec![0u32; size * size];
        for a in 0..size {
            for b in 0..size {
                leq[a * size + b] = a & !b == 0;
                meet[a * size + b] = (a & b) as u32;
            }
        }
        InfSemilattice {
            labels,
            leq,
            top: size - 1,
            meet,
        }
    }

    /// A chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in a..n {
                leq[a * n + b] = true;
            }
        }
        Self::from_relation(labels, leq, n - 1)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.labels.len());
        self.labels = labels;
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.labels.len()
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.len() + b]
    }

    /// Greatest lower bound. Panics if the meet is missing; check with [`check_infsl`] first.
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        let m = self.meet[a * self.len() + b];
        assert!(m != NO_MEET, "no meet for {a} and {b}");
        m as Elem
    }

    pub fn try_meet(&self, a: Elem, b: Elem) -> Result<Elem, InfslError> {
        let n = self.len();
        if a >= n {
            return Err(InfslError::NotInCarrier(a, n));
        }
        if b >= n {
            return Err(InfslError::NotInCarrier(b, n));
        }
        match self.meet[a * n + b] {
            NO_MEET => Err(InfslError::NoMeet(a, b)),
            m => Ok(m as Elem),
        }
    }

    /// Least element, when there is one.
    pub fn bottom(&self) -> Option<Elem> {
        self.elements()
            .find(|&b| self.elements().all(|x| self.leq(b, x)))
    }

    fn validate(&self) -> Result<(), InfslError> {
        let n = self.len();
        if self.top >= n {
            return Err(InfslError::NotInCarrier(self.top, n));
        }
        for a in 0..n {
            if !self.leq(a, a) {
                return Err(InfslError::NotPartialOrder(format!(
                    "{} not <= itself",
                    self.label(a)
                )));
            }
            if !self.leq(a, self.top) {
                return Err(InfslError::NotTop(self.top));
            }
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(InfslError::NotPartialOrder(format!(
                        "{} and {} are distinct but mutually below",
                        self.label(a),
                        self.label(b)
                    )));
                }
                for c in 0..n {
                    if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                        return Err(InfslError::NotPartialOrder(format!(
                            "{} <= {} <= {} but not {} <= {}",
                            self.label(a),
                            self.label(b),
                            self.label(c),
                            self.label(a),
                            self.label(c)
                        )));
                    }
                }
                if self.meet[a * n + b] == NO_MEET {
                    return Err(InfslError::NoMeet(a, b));
                }
            }
        }
        Ok(())
    }

    /// Restriction to the elements satisfying `keep`, which must contain top and be meet-closed.
    /// Returns the restricted semilattice and the inclusion map.
    pub fn sub(
        &self,
        keep: impl Fn(Elem) -> bool,
    ) -> Result<(InfSemilattice, Vec<Elem>), InfslError> {
        let carrier: Vec<Elem> = self.elements().filter(|&x| keep(x)).collect();
        if !carrier.contains(&self.top) {
            return Err(InfslError::MissingTop);
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &x) in carrier.iter().enumerate() {
            pos[x] = i;
        }
        let k = carrier.len();
        let mut leq = vec![false; k * k];
        let mut meet = vec![0u32; k * k];
        for (i, &a) in carrier.iter().enumerate() {
            for (j, &b) in carrier.iter().enumerate() {
                leq[i * k + j] = self.leq(a, b);
                let m = self.try_meet(a, b)?;
                if pos[m] == usize::MAX {
                    return Err(InfslError::NotMeetClosed(a, b));
                }
                meet[i * k + j] = pos[m] as u32;
            }
        }
        let labels = carrier.iter().map(|&x| self.labels[x].clone()).collect();
        Ok((
            InfSemilattice {
                labels,
                leq,
                top: pos[self.top],
                meet,
            },
            carrier,
        ))
    }
}

impl InfSemilattice {
    /// The principal downset `{x | x <= a}` with `a` as its top, and its inclusion.
    pub fn downset(&self, a: Elem) -> (InfSemilattice, Vec<Elem>) {
        let carrier: Vec<Elem> = self.elements().filter(|&x| self.leq(x, a)).collect();
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &x) in carrier.iter().enumerate() {
            pos[x] = i;
        }
        let k = carrier.len();
        let mut leq = vec![false; k * k];
        let mut meet = vec![0u32; k * k];
        for (i, &x) in carrier.iter().enumerate() {
            for (j, &y) in carrier.iter().enumerate() {
                leq[i * k + j] = self.leq(x, y);
                meet[i * k + j] = pos[self.meet(x, y)] as u32;
            }
        }
        let labels = carrier.iter().map(|&x| self.labels[x].clone()).collect();
        (
            InfSemilattice {
                labels,
                leq,
                top: pos[a],
                meet,
            },
            carrier,
        )
    }
}

/// `{0,2}`-style label of a bitmask subset.
pub fn subset_label(mask: usize, n: usize) -> String {
    let items: Vec<String> = (0..n)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i.to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}

/// Check partial order, top, and existence of binary meets.
pub fn check_infsl(l: &InfSemilattice) -> Report {
    let mut r = Report::new("infsl");
    let n = l.len();
    let mut po = Tally::new(
        "infsl.partial-order",
        "reflexive, antisymmetric, transitive",
    );
    if l.top >= n {
        po.structural(|| format!("top {} outside carrier of size {}", l.top, n));
        r.push(po.finish());
        return r;
    }
    for a in 0..n {
        for b in 0..n {
            let anti = a == b || !(l.leq(a, b) && l.leq(b, a));
            po.check(anti && l.leq(a, a), || {
                format!("{} / {}", l.label(a), l.label(b))
            });
            for c in 0..n {
                if l.leq(a, b) && l.leq(b, c) && !l.leq(a, c) {
                    po.fail(|| {
                        format!(
                            "{} <= {} <= {} not transitive",
                            l.label(a),
                            l.label(b),
                            l.label(c)
                        )
                    });
                }
            }
        }
    }
    r.push(po.finish());
    let mut top = Tally::new("infsl.top", "top is the greatest element");
    for a in 0..n {
        top.check(l.leq(a, l.top), || {
            format!("{} is not below top {}", l.label(a), l.label(l.top))
        });
    }
    r.push(top.finish());
    let mut m = Tally::new("infsl.meets", "every pair has a greatest lower bound");
    for a in 0..n {
        for b in a..n {
            m.check(l.meet[a * n + b] != NO_MEET, || {
                format!("{} and {}", l.label(a), l.label(b))
            });
        }
    }
    r.push(m.finish());
    r
}

/// Check that `map: src -> dst` is monotone and preserves top and binary meets.
pub fn check_hom(src: &InfSemilattice, dst: &InfSemilattice, map: &[Elem]) -> Report {
    let mut r = Report::new("infsl-hom");
    let mut s = Tally::new("hom.structure", "map is total into the target");
    if map.len() != src.len() {
        s.structural(|| format!("map has {} entries for {} elements", map.len(), src.len()));
    } else if let Some(x) = map.iter().position(|&y| y >= dst.len()) {
        s.structural(|| format!("{} maps outside the target", src.label(x)));
    } else {
        s.ok();
    }
    let broken = s.failed();
    r.push(s.finish());
    if broken {
        return r;
    }
    let mut t = Tally::new("hom.top", "h(top) = top");
    t.check(map[src.top()] == dst.top(), || {
        format!(
            "h({}) = {}",
            src.label(src.top()),
            dst.label(map[src.top()])
        )
    });
    r.push(t.finish());
    let mut mono = Tally::new("hom.monotone", "a <= b implies h a <= h b");
    let mut meet = Tally::new("hom.meets", "h(a meet b) = h a meet h b");
    for a in src.elements() {
        for b in src.elements() {
            if src.leq(a, b) {
                mono.check(dst.leq(map[a], map[b]), || {
                    format!("{} <= {}", src.label(a), src.label(b))
                });
            }
            if b >= a {
                let l = map[src.meet(a, b)];
                let rr = dst.meet(map[a], map[b]);
                meet.check(l == rr, || {
                    format!(
                        "h({} meet {}) = {} but h a meet h b = {}",
                        src.label(a),
                        src.label(b),
                        dst.label(l),
                        dst.label(rr)
                    )
                });
            }
        }
    }
    r.push(mono.finish());
    r.push(meet.finish());
    r
}

/// Whether `map` preserves top and meets (and hence order).
pub fn is_hom(src: &InfSemilattice, dst: &InfSemilattice, map: &[Elem]) -> bool {
    map[src.top()] == dst.top()
        && src.elements().all(|a| {
            src.elements()
                .all(|b| map[src.meet(a, b)] == dst.meet(map[a], map[b]))
        })
}

/// Whether `map` is an order isomorphism.
pub fn is_order_iso(src: &InfSemilattice, dst: &InfSemilattice, map: &[Elem]) -> bool {
    if src.len() != dst.len() {
        return false;
    }
    let mut seen = vec![false; dst.len()];
    for &y in map {
        if seen[y] {
            return false;
        }
        seen[y] = true;
    }
    src.elements().all(|a| {
        src.elements()
            .all(|b| src.leq(a, b) == dst.leq(map[a], map[b]))
    })
}

/// All meet- and top-preserving maps `src -> dst`.
pub fn enumerate_homs(src: &InfSemilattice, dst: &InfSemilattice) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut cur = vec![usize::MAX; src.len()];
    fn go(
        i: usize,
        src: &InfSemilattice,
        dst: &InfSemilattice,
        cur: &mut Vec<Elem>,
        out: &mut Vec<Vec<Elem>>,
    ) {
        if i == src.len() {
            out.push(cur.clone());
            return;
        }
        let candidates: Vec<Elem> = if i == src.top() {
            vec![dst.top()]
        } else {
            dst.elements().collect()
        };
        for y in candidates {
            cur[i] = y;
            let ok = (0..=i).all(|j| {
                let m = src.meet(i, j);
                m > i || cur[m] == dst.meet(cur[i], cur[j])
            }) && (i != src.top() || y == dst.top())
                && (src.top() > i || cur[src.top()] == dst.top());
            if ok {
                go(i + 1, src, dst, cur, out);
            }
        }
        cur[i] = usize::MAX;
    }
    go(0, src, dst, &mut cur, &mut out);
    out.retain(|m| is_hom(src, dst, m));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meet_with_top_is_identity() {
        let l = InfSemilattice::powerset(3);
        for a in l.elements() {
            assert_eq!(l.meet(a, l.top()), a);
        }
    }

    #[test]
    fn chain_meet_is_min() {
        let c = InfSemilattice::chain(3);
        assert_eq!(c.meet(1, 0), 0);
        assert!(check_infsl(&c).passed());
    }

    #[test]
    fn two_chain_passes() {
        assert!(check_infsl(&InfSemilattice::chain(2)).passed());
    }

    #[test]
    fn missing_meet_is_reported() {
        // top over two incomparable atoms, no bottom
        let labels = vec!["a".into(), "b".into(), "t".into()];
        let mut leq = vec![false; 9];
        for i in 0..3 {
            leq[i * 3 + i] = true;
            leq[i * 3 + 2] = true;
        }
        let l = InfSemilattice::from_relation(labels, leq.clone(), 2);
        let r = check_infsl(&l);
        let line = r.line("infsl.meets").unwrap();
        assert!(line.is_failure());
        assert_eq!(line.witness.as_deref(), Some("a and b"));
        assert!(InfSemilattice::new(vec!["a".into(), "b".into(), "t".into()], leq, 2).is_err());
    }

    #[test]
    fn sub_whole_carrier_is_identity() {
        let l = InfSemilattice::powerset(2);
        let (s, inc) = l.sub(|_| true).unwrap();
        assert_eq!(s, l);
        assert_eq!(inc, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sub_rejects_non_closed_carrier() {
        let l = InfSemilattice::powerset(2);
        // {0}, {1}, top but not their meet
        assert_eq!(l.sub(|x| x != 0), Err(InfslError::NotMeetClosed(1, 2)));
        assert_eq!(l.sub(|x| x != 3), Err(InfslError::MissingTop));
    }

    #[test]
    fn enumerate_homs_two_chain_into_powerset_of_one() {
        let two = InfSemilattice::chain(2);
        let p1 = InfSemilattice::powerset(1);
        assert_eq!(enumerate_homs(&two, &p1).len(), 2);
    }
}
