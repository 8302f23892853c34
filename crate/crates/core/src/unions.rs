//! Finite unions of shifted lattices, the union inclusion test, and the
//! relative universal projection.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::Result;
use crate::intlin::{zero_vector, BigVector};
use crate::lattice::ShiftedLattice;
use crate::sdf::chain::{chain_bool, DnfChain};
use crate::sdf::BoolOp;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeUnion {
    dim: usize,
    cells: Vec<ShiftedLattice>,
}

impl LatticeUnion {
    /// Pads every cell to `dim`, drops empty cells and cells contained in
    /// another cell, and sorts the rest.
    pub fn new(dim: usize, cells: Vec<ShiftedLattice>) -> Self {
        let mut cells: Vec<ShiftedLattice> = cells
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|c| c.pad_to_dim(dim).expect("cell dimension exceeds union dimension"))
            .collect();
        cells.sort();
        cells.dedup();
        let mut keep = vec![true; cells.len()];
        for i in 0..cells.len() {
            for j in 0..cells.len() {
                if i != j && keep[j] && cells[i].is_subset(&cells[j]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let cells = cells.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect();
        LatticeUnion { dim, cells }
    }

    pub fn empty(dim: usize) -> Self {
        LatticeUnion { dim, cells: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        LatticeUnion { dim, cells: vec![ShiftedLattice::full(dim)] }
    }

    pub fn single(cell: ShiftedLattice) -> Self {
        LatticeUnion::new(cell.dim(), vec![cell])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[ShiftedLattice] {
        &self.cells
    }

    /// Cells are never empty, so this is semantic emptiness.
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        self.cells.iter().any(|c| c.member(p))
    }

    pub fn pad_to_dim(&self, m: usize) -> Result<Self> {
        let cells = self.cells.iter().map(|c| c.pad_to_dim(m)).collect::<Result<Vec<_>>>()?;
        Ok(LatticeUnion::new(m, cells))
    }

    pub fn or(&self, other: &Self) -> Self {
        let m = self.dim.max(other.dim);
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        LatticeUnion::new(m, cells)
    }

    pub fn and(&self, other: &Self) -> Self {
        let m = self.dim.max(other.dim);
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                cells.push(a.intersect(b));
            }
        }
        LatticeUnion::new(m, cells)
    }

    pub fn and_cell(&self, cell: &ShiftedLattice) -> Self {
        let m = self.dim.max(cell.dim());
        LatticeUnion::new(m, self.cells.iter().map(|a| a.intersect(cell)).collect())
    }

    pub fn project_indices(&self, indices: &[usize]) -> Result<Self> {
        let cells = self.cells.iter().map(|c| c.project_indices(indices)).collect::<Result<Vec<_>>>()?;
        Ok(LatticeUnion::new(self.dim, cells))
    }

    pub fn drop_project(&self, k: usize) -> Result<Self> {
        let cells = self.cells.iter().map(|c| c.drop_project(k)).collect::<Result<Vec<_>>>()?;
        Ok(LatticeUnion::new(self.dim - k, cells))
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        LatticeUnion::new(self.dim, self.cells.iter().map(|c| c.permute(perm)).collect())
    }

    pub fn restrict_prefix(&self, keep: usize) -> Self {
        LatticeUnion::new(keep, self.cells.iter().map(|c| c.restrict_prefix(keep)).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        union_subset(self, other)
    }
}

impl fmt::Display for LatticeUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(" | "))
    }
}

/// Inclusion–exclusion sum `sum_{J nonempty} (-1)^{|J|+1} |V_J ∩ box|` with
/// `V_J` the intersection of the `w_j`, `j in J`. Branches with an empty
/// intersection are cut since every superset is empty too.
fn inclusion_exclusion(ws: &[ShiftedLattice], s: &BigInt) -> BigInt {
    fn go(ws: &[ShiftedLattice], start: usize, acc: &ShiftedLattice, size: usize, s: &BigInt, total: &mut BigInt) {
        for j in start..ws.len() {
            let v = if size == 0 { ws[j].clone() } else { acc.intersect(&ws[j]) };
            if v.is_empty() {
                continue;
            }
            let n = v.count_points_in_fundamental_box(s).expect("s is a common multiple of the indices");
            if size % 2 == 0 {
                *total += n;
            } else {
                *total -= n;
            }
            go(ws, j + 1, &v, size + 1, s, total);
        }
    }
    let mut total = BigInt::zero();
    if let Some(first) = ws.first() {
        go(ws, 0, first, 0, s, &mut total);
    }
    total
}

fn lattice_part(x: &ShiftedLattice) -> ShiftedLattice {
    ShiftedLattice::new(zero_vector(x.dim()), x.periods().to_vec())
}

/// Whether a single non-empty cell is covered by the union `ys`.
fn cell_covered(x: &ShiftedLattice, ys: &[ShiftedLattice]) -> bool {
    if ys.iter().any(|y| x.is_subset(y)) {
        return true;
    }
    let r = x.rank();
    // Only summands of full relative rank can contribute to a cover.
    let parts: Vec<ShiftedLattice> = ys.iter().map(|y| y.intersect(x)).filter(|y| !y.is_empty() && y.rank() == r).collect();
    if parts.is_empty() {
        return false;
    }
    let perp = lattice_part(x).orthogonal().expect("lattice part has zero base");
    let z = x.add_periods(&perp);
    let ws = LatticeUnion::new(x.dim(), parts.iter().map(|p| p.add_periods(&perp)).collect());
    if ws.cells().iter().any(|w| w == &z) {
        return true;
    }
    let mut s = z.index().expect("orthogonal completion is full-dimensional");
    for w in ws.cells() {
        s = s.lcm(&w.index().expect("orthogonal completion is full-dimensional"));
    }
    let nz = z.count_points_in_fundamental_box(&s).expect("s is a multiple of det");
    nz == inclusion_exclusion(ws.cells(), &s)
}

/// `U x ⊆ U y`, decided per cell by orthogonal completion and an exact
/// inclusion–exclusion count over the fundamental box.
pub fn union_subset(x: &LatticeUnion, y: &LatticeUnion) -> bool {
    let m = x.dim.max(y.dim);
    let x = x.pad_to_dim(m).unwrap();
    let y = y.pad_to_dim(m).unwrap();
    x.cells.iter().all(|c| cell_covered(c, &y.cells))
}

/// Relative universal projection over the last `k` coordinates:
/// the kept prefixes `v` of `Z` whose whole slice in `Z` lies in `U x`.
/// The result lives in dimension `dim - k`.
pub fn rel_unproj(z: &ShiftedLattice, x: &LatticeUnion, k: usize) -> Result<DnfChain> {
    let d = z.dim().max(x.dim);
    let z = z.pad_to_dim(d)?;
    let x = x.pad_to_dim(d)?;
    if k > d {
        return Err(crate::error::Error::IndexOutOfRange { index: k, dim: d });
    }
    let kept = d - k;
    if z.is_empty() {
        return Ok(DnfChain::empty(kept));
    }
    let xs: Vec<ShiftedLattice> = x.cells.iter().map(|c| c.intersect(&z)).filter(|c| !c.is_empty()).collect();
    if xs.is_empty() {
        return Ok(DnfChain::empty(kept));
    }

    // Thicken every slice by the orthogonal complement of Z's slice lattice
    // so that the slice lattices become full-dimensional.
    let l = z.slice_lattice(k)?;
    let lift = |v: &BigVector| {
        let mut w = zero_vector(kept);
        w.extend(v.iter().cloned());
        w
    };
    let perp: Vec<BigVector> = l.orthogonal()?.iter().map(lift).collect();
    let zt = z.add_periods(&perp);
    let l0 = zt.slice_lattice(k)?;
    let mut members = Vec::new();
    let mut slices = Vec::new();
    for c in &xs {
        let ct = c.add_periods(&perp);
        let lj = ct.slice_lattice(k)?;
        if lj.rank() == k {
            members.push(c.clone());
            slices.push(lj);
        }
    }
    let m = members.len();
    if m == 0 {
        return Ok(DnfChain::empty(kept));
    }
    let mut s = l0.index().expect("full-dimensional by construction");
    for lj in &slices {
        s = s.lcm(&lj.index().unwrap());
    }
    let n0 = l0.count_points_in_fundamental_box(&s)?;

    // Per nonempty J (bitmask over members): P_J = proj(meet of X_j ∩ Z) and
    // the signed slice count c_J = (-1)^{|J|+1} N_J.
    let full = (1usize << m) - 1;
    let mut meet: Vec<Option<ShiftedLattice>> = vec![None; full + 1];
    let mut proj: Vec<Option<ShiftedLattice>> = vec![None; full + 1];
    let mut coeff: Vec<BigInt> = vec![BigInt::zero(); full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let cell = if rest == 0 {
            members[low].clone()
        } else {
            match &meet[rest] {
                Some(c) => c.intersect(&members[low]),
                None => continue,
            }
        };
        if cell.is_empty() {
            continue;
        }
        let mut lat = slices[low].clone();
        for (j, lj) in slices.iter().enumerate() {
            if rest & (1 << j) != 0 {
                lat = lat.intersect(lj);
            }
        }
        let nj = lat.count_points_in_fundamental_box(&s)?;
        coeff[mask] = if mask.count_ones() % 2 == 1 { nj } else { -nj };
        proj[mask] = Some(cell.drop_project(k)?);
        meet[mask] = Some(cell);
    }

    // Enumerate the feasible truth patterns f: downward closed in J (a point
    // in the projection of a meet is in the projection of every sub-meet) and
    // false wherever P_J is empty. Keep those whose density sum is N_0.
    let order: Vec<usize> = {
        let mut v: Vec<usize> = (1..=full).filter(|&mk| proj[mk].is_some()).collect();
        v.sort_by_key(|&mk| (mk.count_ones(), mk));
        v
    };
    let mut families: Vec<Vec<bool>> = Vec::new();
    let mut f = vec![false; full + 1];
    enumerate_down_closed(&order, 0, &mut f, &coeff, &BigInt::zero(), &n0, &mut families);

    let mut result = DnfChain::empty(kept);
    for fam in families {
        let mut head = z.drop_project(k)?;
        let mut holes = Vec::new();
        for mask in 1..=full {
            let below_all = (0..m).filter(|j| mask & (1 << j) != 0).all(|j| {
                let sub = mask & !(1 << j);
                sub == 0 || fam[sub]
            });
            if fam[mask] {
                let maximal = (0..m).all(|j| mask & (1 << j) != 0 || !fam[mask | (1 << j)]);
                if maximal {
                    head = head.intersect(proj[mask].as_ref().unwrap());
                }
            } else if below_all {
                if let Some(p) = &proj[mask] {
                    holes.push(p.clone());
                }
            }
        }
        if head.is_empty() {
            continue;
        }
        let holes = LatticeUnion::new(kept, holes).and_cell(&head);
        let term = DnfChain::new(kept, vec![LatticeUnion::single(head), holes]);
        result = chain_bool(BoolOp::Or, &result, &term);
    }
    Ok(result)
}

fn enumerate_down_closed(
    order: &[usize],
    pos: usize,
    f: &mut Vec<bool>,
    coeff: &[BigInt],
    sum: &BigInt,
    target: &BigInt,
    out: &mut Vec<Vec<bool>>,
) {
    if pos == order.len() {
        if sum == target {
            out.push(f.clone());
        }
        return;
    }
    let mask = order[pos];
    enumerate_down_closed(order, pos + 1, f, coeff, sum, target, out);
    let allowed = (0..usize::BITS as usize).filter(|j| mask & (1 << j) != 0).all(|j| {
        let sub = mask & !(1 << j);
        sub == 0 || f[sub]
    });
    if allowed {
        f[mask] = true;
        let s = sum + &coeff[mask];
        enumerate_down_closed(order, pos + 1, f, coeff, &s, target, out);
        f[mask] = false;
    }
}
