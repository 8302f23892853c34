//! Strict difference normal forms over propositional atoms.
//!
//! A cell is a negation-free DNF, kept absorption-reduced so that two cells
//! are logically equivalent exactly when they are equal. A strict chain
//! `Phi_1 - (Phi_2 - (... - Phi_k))` has strictly decreasing cells and ends
//! in the empty disjunction.

pub mod chain;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub type Atom = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolOp {
    And,
    Or,
    Minus,
}

impl BoolOp {
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Minus => a && !b,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dnf {
    conjuncts: BTreeSet<BTreeSet<Atom>>,
}

fn absorb(conjuncts: BTreeSet<BTreeSet<Atom>>) -> BTreeSet<BTreeSet<Atom>> {
    let mut by_size: Vec<BTreeSet<Atom>> = conjuncts.into_iter().collect();
    by_size.sort_by_key(|c| c.len());
    let mut kept: Vec<BTreeSet<Atom>> = Vec::new();
    for c in by_size {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    kept.into_iter().collect()
}

impl Dnf {
    pub fn bottom() -> Self {
        Dnf::default()
    }

    pub fn top() -> Self {
        Dnf { conjuncts: std::iter::once(BTreeSet::new()).collect() }
    }

    pub fn atom(a: Atom) -> Self {
        Dnf::conjunction([a])
    }

    pub fn conjunction(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Dnf { conjuncts: std::iter::once(atoms.into_iter().collect()).collect() }
    }

    pub fn from_conjuncts<I, C>(conjuncts: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Atom>,
    {
        Dnf { conjuncts: absorb(conjuncts.into_iter().map(|c| c.into_iter().collect()).collect()) }
    }

    pub fn conjuncts(&self) -> impl Iterator<Item = &BTreeSet<Atom>> {
        self.conjuncts.iter()
    }

    pub fn is_bottom(&self) -> bool {
        self.conjuncts.is_empty()
    }

    /// Every disjunct of `self` contains some disjunct of `other`.
    pub fn entails(&self, other: &Dnf) -> bool {
        self.conjuncts.iter().all(|c| other.conjuncts.iter().any(|d| d.is_subset(c)))
    }

    pub fn strictly_entails(&self, other: &Dnf) -> bool {
        self.entails(other) && !other.entails(self)
    }

    pub fn and(&self, other: &Dnf) -> Dnf {
        let mut out = BTreeSet::new();
        for a in &self.conjuncts {
            for b in &other.conjuncts {
                out.insert(a.union(b).copied().collect());
            }
        }
        Dnf { conjuncts: absorb(out) }
    }

    pub fn or(&self, other: &Dnf) -> Dnf {
        Dnf { conjuncts: absorb(self.conjuncts.union(&other.conjuncts).cloned().collect()) }
    }

    pub fn eval(&self, val: &dyn Fn(Atom) -> bool) -> bool {
        self.conjuncts.iter().any(|c| c.iter().all(|&a| val(a)))
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjuncts.is_empty() {
            return write!(f, "F");
        }
        let parts: Vec<String> = self
            .conjuncts
            .iter()
            .map(|c| {
                if c.is_empty() {
                    "T".to_string()
                } else {
                    c.iter().map(|a| format!("p{a}")).collect::<Vec<_>>().join("&")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// A chain of cells, the last of which is `F`.
pub type SdfChain = Vec<Dnf>;

pub fn bottom_chain() -> SdfChain {
    vec![Dnf::bottom()]
}

pub fn chain_eval(chain: &[Dnf], val: &dyn Fn(Atom) -> bool) -> bool {
    match chain.split_first() {
        None => false,
        Some((head, tail)) => head.eval(val) && !chain_eval(tail, val),
    }
}

pub fn is_strict(chain: &[Dnf]) -> bool {
    match chain.last() {
        Some(last) if last.is_bottom() => chain.windows(2).all(|w| w[1].strictly_entails(&w[0])),
        _ => false,
    }
}

/// `phi : psi`, a strict chain for `phi - psi`.
pub fn prop_cons(phi: &Dnf, psi: &[Dnf]) -> SdfChain {
    debug_assert!(is_strict(psi));
    let out = cons_inner(phi, psi);
    debug_assert!(is_strict(&out));
    debug_assert!(out.len() <= psi.len() + 1);
    out
}

fn cons_inner(phi: &Dnf, psi: &[Dnf]) -> SdfChain {
    if phi.is_bottom() {
        return bottom_chain();
    }
    let phi1 = &psi[0];
    if phi1.is_bottom() {
        return vec![phi.clone(), Dnf::bottom()];
    }
    if phi1.strictly_entails(phi) {
        let mut out = vec![phi.clone()];
        out.extend_from_slice(psi);
        return out;
    }
    let meet = phi.and(phi1);
    if meet.strictly_entails(phi) {
        let mut out = vec![phi.clone()];
        out.extend(cons_inner(&meet, &psi[1..]));
        return out;
    }
    if psi.len() >= 3 {
        return cons_inner(&phi.and(&psi[1]), &psi[2..]);
    }
    bottom_chain()
}

/// Applies a Boolean operation to two strict chains.
pub fn prop_apply(op: BoolOp, a: &[Dnf], b: &[Dnf]) -> SdfChain {
    let mut ap = Applier::default();
    let out = ap.apply(op, a, b);
    debug_assert!(is_strict(&out));
    debug_assert!(out.len() <= a.len() * b.len());
    out
}

#[derive(Default)]
struct Applier {
    memo: HashMap<(BoolOp, SdfChain, SdfChain), SdfChain>,
}

impl Applier {
    fn apply(&mut self, op: BoolOp, a: &[Dnf], b: &[Dnf]) -> SdfChain {
        let key = (op, a.to_vec(), b.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let out = self.compute(op, a, b);
        self.memo.insert(key, out.clone());
        out
    }

    fn compute(&mut self, op: BoolOp, a: &[Dnf], b: &[Dnf]) -> SdfChain {
        let a_empty = a.len() <= 1;
        let b_empty = b.len() <= 1;
        if a_empty || b_empty {
            return match op {
                BoolOp::And => bottom_chain(),
                BoolOp::Minus => a.to_vec(),
                BoolOp::Or => {
                    if a_empty {
                        b.to_vec()
                    } else {
                        a.to_vec()
                    }
                }
            };
        }
        let (a1, at) = (&a[0], &a[1..]);
        let (b1, bt) = (&b[0], &b[1..]);
        match op {
            BoolOp::And => {
                let rest = self.apply(BoolOp::Or, at, bt);
                prop_cons(&a1.and(b1), &rest)
            }
            BoolOp::Minus => {
                let rest = self.apply(BoolOp::Or, at, b);
                prop_cons(a1, &rest)
            }
            BoolOp::Or => {
                if b1.entails(a1) {
                    let rest = self.apply(BoolOp::Minus, at, b);
                    prop_cons(a1, &rest)
                } else {
                    let both = self.apply(BoolOp::And, at, bt);
                    let inner = prop_cons(&a1.and(b1), &both);
                    let either = self.apply(BoolOp::Or, at, bt);
                    let rest = self.apply(BoolOp::Minus, &either, &inner);
                    prop_cons(&a1.or(b1), &rest)
                }
            }
        }
    }
}
