//! Difference chains `X_1 - (X_2 - (... - X_l))` of lattice unions, with
//! Boolean operations, inclusion, and (universal) projection.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;

use super::{prop_apply, BoolOp, Dnf, SdfChain};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;
use crate::unions::{rel_unproj, union_subset, LatticeUnion};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnfChain {
    dim: usize,
    links: Vec<LatticeUnion>,
}

impl DnfChain {
    /// Pads the links to `dim` and cuts the chain at its first empty link,
    /// which does not change the denoted set.
    pub fn new(dim: usize, links: Vec<LatticeUnion>) -> Self {
        let mut out = Vec::with_capacity(links.len());
        for l in links {
            if l.is_empty() {
                break;
            }
            out.push(l.pad_to_dim(dim).expect("link dimension exceeds chain dimension"));
        }
        DnfChain { dim, links: out }
    }

    pub fn empty(dim: usize) -> Self {
        DnfChain { dim, links: Vec::new() }
    }

    pub fn top(dim: usize) -> Self {
        DnfChain { dim, links: vec![LatticeUnion::full(dim)] }
    }

    pub fn single(u: LatticeUnion) -> Self {
        DnfChain::new(u.dim(), vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn links(&self) -> &[LatticeUnion] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// Syntactic emptiness (no links); see [`is_satisfiable`] for the
    /// semantic test.
    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        fn go(links: &[LatticeUnion], p: &[BigInt]) -> bool {
            match links.split_first() {
                None => false,
                Some((h, t)) => h.contains(p) && !go(t, p),
            }
        }
        go(&self.links, p)
    }

    pub fn contains_i64(&self, p: &[i64]) -> bool {
        let v: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        self.contains(&v)
    }

    pub fn pad_to_dim(&self, m: usize) -> Result<Self> {
        if m < self.dim {
            return Err(Error::ShrinkForbidden { from: self.dim, to: m });
        }
        Ok(DnfChain::new(m, self.links.clone()))
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        DnfChain::new(self.dim, self.links.iter().map(|l| l.permute(perm)).collect())
    }

    /// Drops the coordinates from `keep` on, fixing them to zero. Exact when
    /// the set is a cylinder over those coordinates.
    pub fn restrict_prefix(&self, keep: usize) -> Self {
        DnfChain::new(keep, self.links.iter().map(|l| l.restrict_prefix(keep)).collect())
    }

    /// Whether each link contains the next one.
    pub fn is_decreasing(&self) -> bool {
        self.links.windows(2).all(|w| union_subset(&w[1], &w[0]))
    }
}

impl fmt::Display for DnfChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.links.is_empty() {
            return write!(f, "empty[{}]", self.dim);
        }
        let parts: Vec<String> = self.links.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" - "))
    }
}

fn equalize(u: &DnfChain, v: &DnfChain) -> (DnfChain, DnfChain) {
    let m = u.dim.max(v.dim);
    (u.pad_to_dim(m).unwrap(), v.pad_to_dim(m).unwrap())
}

/// Cumulative strict chain `p_0 - (p_0 p_1 - (... - F))` over fresh atoms.
fn cumulative(first_atom: u32, len: usize) -> SdfChain {
    let mut out: SdfChain = (1..=len).map(|l| Dnf::conjunction(first_atom..first_atom + l as u32)).collect();
    out.push(Dnf::bottom());
    out
}

/// Boolean operation on chains: encode both chains over fresh atoms, combine
/// the propositional chains, and read each output cell back as a union of
/// meets of links.
pub fn chain_bool(op: BoolOp, u: &DnfChain, v: &DnfChain) -> DnfChain {
    let (u, v) = equalize(u, v);
    let d = u.dim;
    let (i, j) = (u.links.len(), v.links.len());
    let a = cumulative(0, i);
    let b = cumulative(i as u32, j);
    let out = prop_apply(op, &a, &b);

    let mut upre = vec![LatticeUnion::full(d)];
    for l in &u.links {
        let next = upre.last().unwrap().and(l);
        upre.push(next);
    }
    let mut vpre = vec![LatticeUnion::full(d)];
    for l in &v.links {
        let next = vpre.last().unwrap().and(l);
        vpre.push(next);
    }
    let mut meets: HashMap<BTreeSet<u32>, LatticeUnion> = HashMap::new();
    let mut translate = |conj: &BTreeSet<u32>| -> LatticeUnion {
        if let Some(hit) = meets.get(conj) {
            return hit.clone();
        }
        let ps: Vec<usize> = conj.iter().filter(|&&x| (x as usize) < i).map(|&x| x as usize).collect();
        let qs: Vec<usize> = conj.iter().filter(|&&x| (x as usize) >= i).map(|&x| x as usize - i).collect();
        let prefix = |xs: &[usize]| xs.iter().enumerate().all(|(n, &x)| n == x);
        let left = if prefix(&ps) {
            upre[ps.len()].clone()
        } else {
            ps.iter().fold(LatticeUnion::full(d), |acc, &x| acc.and(&u.links[x]))
        };
        let right = if prefix(&qs) {
            vpre[qs.len()].clone()
        } else {
            qs.iter().fold(LatticeUnion::full(d), |acc, &x| acc.and(&v.links[x]))
        };
        let w = left.and(&right);
        meets.insert(conj.clone(), w.clone());
        w
    };
    let mut links = Vec::new();
    for cell in &out {
        if cell.is_bottom() {
            break;
        }
        let mut w = LatticeUnion::empty(d);
        for conj in cell.conjuncts() {
            w = w.or(&translate(conj));
        }
        links.push(w);
    }
    let res = DnfChain::new(d, links);
    debug_assert!(res.len() <= (i + 1) * (j + 1));
    res
}

pub fn chain_and(u: &DnfChain, v: &DnfChain) -> DnfChain {
    chain_bool(BoolOp::And, u, v)
}

pub fn chain_or(u: &DnfChain, v: &DnfChain) -> DnfChain {
    chain_bool(BoolOp::Or, u, v)
}

pub fn chain_minus(u: &DnfChain, v: &DnfChain) -> DnfChain {
    chain_bool(BoolOp::Minus, u, v)
}

pub fn complement(u: &DnfChain) -> DnfChain {
    chain_minus(&DnfChain::top(u.dim), u)
}

/// Emptiness scan for a decreasing chain: empty iff every odd link is
/// contained in its successor.
fn decreasing_is_empty(w: &DnfChain) -> bool {
    let mut l = 0;
    while l < w.links.len() {
        if w.links[l].is_empty() {
            return true;
        }
        if l + 1 < w.links.len() && union_subset(&w.links[l], &w.links[l + 1]) {
            l += 2;
        } else {
            return false;
        }
    }
    true
}

/// `[[u]] ⊆ [[v]]`.
pub fn chain_leq(u: &DnfChain, v: &DnfChain) -> bool {
    decreasing_is_empty(&chain_minus(u, v))
}

pub fn is_satisfiable(u: &DnfChain) -> bool {
    !chain_leq(u, &DnfChain::empty(u.dim))
}

/// An equivalent chain whose links decrease.
pub fn decreasing_form(u: &DnfChain) -> DnfChain {
    if u.is_decreasing() {
        u.clone()
    } else {
        chain_minus(u, &DnfChain::empty(u.dim))
    }
}

fn check_indices(indices: &[usize], dim: usize) -> Result<()> {
    for &i in indices {
        if i == 0 || i > dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
    }
    Ok(())
}

/// Permutation moving the (1-based) `indices` to the end, other coordinates
/// keeping their order. Returns `(perm, inverse)`.
fn suffix_permutation(indices: &[usize], dim: usize) -> (Vec<usize>, Vec<usize>) {
    let set: BTreeSet<usize> = indices.iter().map(|i| i - 1).collect();
    let mut perm: Vec<usize> = (0..dim).filter(|i| !set.contains(i)).collect();
    perm.extend(set.iter().copied());
    let mut inv = vec![0; dim];
    for (pos, &src) in perm.iter().enumerate() {
        inv[src] = pos;
    }
    (perm, inv)
}

/// Relative universal projection on arbitrary coordinates with cylinder
/// semantics: the result keeps the ambient dimension and is free in `indices`.
pub fn rel_unproj_indices(z: &ShiftedLattice, x: &LatticeUnion, indices: &[usize]) -> Result<DnfChain> {
    let d = z.dim().max(x.dim());
    check_indices(indices, d)?;
    let set: BTreeSet<usize> = indices.iter().copied().collect();
    let k = set.len();
    let idx: Vec<usize> = set.into_iter().collect();
    let (perm, inv) = suffix_permutation(&idx, d);
    let zp = z.pad_to_dim(d)?.permute(&perm);
    let xp = x.pad_to_dim(d)?.permute(&perm);
    let r = rel_unproj(&zp, &xp, k)?;
    Ok(r.pad_to_dim(d)?.permute(&inv))
}

/// Existential projection `proj(I, [[u]])`, cylinder semantics.
pub fn chain_project(indices: &[usize], u: &DnfChain) -> Result<DnfChain> {
    check_indices(indices, u.dim)?;
    if indices.is_empty() || u.is_empty() {
        return Ok(u.clone());
    }
    let u = decreasing_form(u);
    let mut primed: Vec<DnfChain> = Vec::with_capacity(u.links.len());
    for r in 0..u.links.len() {
        let x = if r % 2 == 0 {
            DnfChain::single(u.links[r].project_indices(indices)?)
        } else {
            let prev = &u.links[r - 1];
            let mut acc = DnfChain::top(u.dim);
            for cell in prev.cells() {
                let rel = rel_unproj_indices(cell, &u.links[r], indices)?;
                let pc = DnfChain::single(LatticeUnion::single(cell.project_indices(indices)?));
                let outside = chain_minus(&primed[r - 1], &pc);
                acc = chain_and(&acc, &chain_or(&rel, &outside));
            }
            acc
        };
        primed.push(x);
    }
    let mut res = primed.pop().unwrap();
    while let Some(x) = primed.pop() {
        res = chain_minus(&x, &res);
    }
    Ok(res)
}

/// Universal projection `unproj(I, [[u]])`, cylinder semantics.
pub fn chain_unproj(indices: &[usize], u: &DnfChain) -> Result<DnfChain> {
    check_indices(indices, u.dim)?;
    if indices.is_empty() || u.is_empty() {
        return Ok(u.clone());
    }
    let head = rel_unproj_indices(&ShiftedLattice::full(u.dim), &u.links[0], indices)?;
    let tail = DnfChain::new(u.dim, u.links[1..].to_vec());
    let tail_proj = chain_project(indices, &tail)?;
    Ok(chain_minus(&head, &tail_proj))
}
