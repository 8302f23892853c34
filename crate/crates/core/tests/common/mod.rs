#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wpa_core::intlin::BigVector;
use wpa_core::{DnfChain, LatticeUnion, ShiftedLattice};

pub fn sl(base: &[i64], periods: &[Vec<i64>]) -> ShiftedLattice {
    ShiftedLattice::from_i64(base, periods)
}

pub fn big(v: &[i64]) -> BigVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn union(dim: usize, cells: Vec<ShiftedLattice>) -> LatticeUnion {
    LatticeUnion::new(dim, cells)
}

pub fn chain(dim: usize, links: Vec<Vec<ShiftedLattice>>) -> DnfChain {
    DnfChain::new(dim, links.into_iter().map(|cs| LatticeUnion::new(dim, cs)).collect())
}

/// All points of `[-r, r]^d`.
pub fn cube(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Points `base + sum l_i p_i` with every `|l_i| <= r`, the set a shifted
/// lattice generates without any membership test.
pub fn generated(base: &[i64], periods: &[Vec<i64>], r: i64) -> Vec<Vec<i64>> {
    cube(periods.len(), r)
        .into_iter()
        .map(|l| {
            let mut p = base.to_vec();
            for (li, per) in l.iter().zip(periods) {
                for (pj, vj) in p.iter_mut().zip(per) {
                    *pj += li * vj;
                }
            }
            p
        })
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random shifted lattice in `Z^d` with independent periods, entries in
/// `[-e, e]`, rank in `[min_rank, d]`.
pub fn random_lattice(rng: &mut StdRng, d: usize, e: i64, min_rank: usize) -> (Vec<i64>, Vec<Vec<i64>>) {
    loop {
        let r = rng.gen_range(min_rank..=d);
        let base: Vec<i64> = (0..d).map(|_| rng.gen_range(-e..=e)).collect();
        let periods: Vec<Vec<i64>> = (0..r).map(|_| (0..d).map(|_| rng.gen_range(-e..=e)).collect()).collect();
        let m = wpa_core::intlin::BigMatrix::from_columns(d, periods.iter().map(|p| big(p)).collect());
        if wpa_core::intlin::rank(&m) == r {
            return (base, periods);
        }
    }
}

/// `x` is divisible by `m` in the integers (`m` may be zero).
pub fn divides(m: i64, x: i64) -> bool {
    if m == 0 {
        x == 0
    } else {
        x.rem_euclid(m) == 0
    }
}

/// Exact membership in `base + span(periods)` for `d <= 3`, decided by
/// rational elimination with small integer arithmetic and an integrality
/// check, independent of the Hermite form code.
pub fn brute_member(base: &[i64], periods: &[Vec<i64>], p: &[i64]) -> bool {
    let d = base.len();
    let r = periods.len();
    let target: Vec<i64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
    if r == 0 {
        return target.iter().all(|&t| t == 0);
    }
    // Solve over the rationals with Cramer on an r x r nonsingular minor,
    // then check integrality and the remaining rows.
    let rows: Vec<usize> = (0..d).collect();
    for combo in combinations(&rows, r) {
        let m: Vec<Vec<i128>> = combo.iter().map(|&i| periods.iter().map(|per| per[i] as i128).collect()).collect();
        let det = det_i128(&m);
        if det == 0 {
            continue;
        }
        let mut lambda = Vec::with_capacity(r);
        for j in 0..r {
            let mut mj = m.clone();
            for (row, &i) in combo.iter().enumerate() {
                mj[row][j] = target[i] as i128;
            }
            let num = det_i128(&mj);
            if num % det != 0 {
                return false;
            }
            lambda.push(num / det);
        }
        return (0..d).all(|i| {
            let s: i128 = periods.iter().zip(&lambda).map(|(per, l)| per[i] as i128 * l).sum();
            s == target[i] as i128
        });
    }
    unreachable!("periods are independent")
}

pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &v)| v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_i128(&minor)
            })
            .sum(),
    }
}

/// Rank of the columns `cols` in `Z^d` by fraction-free elimination.
pub fn rank_i64(cols: &[Vec<i64>], d: usize) -> usize {
    let mut rows: Vec<Vec<i128>> = (0..d).map(|i| cols.iter().map(|c| c[i] as i128).collect()).collect();
    let n = cols.len();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..d).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        for r in rank + 1..d {
            let f = rows[r][c];
            let g = rows[rank][c];
            if f != 0 {
                for k in 0..n {
                    rows[r][k] = rows[r][k] * g - rows[rank][k] * f;
                }
                let h = rows[r].iter().fold(0i128, |a, &b| num_integer::gcd(a, b));
                if h > 1 {
                    rows[r].iter_mut().for_each(|x| *x /= h);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Absolute value of some nonzero maximal minor of independent columns.
pub fn nonzero_maximal_minor(cols: &[Vec<i64>], d: usize) -> i128 {
    let r = cols.len();
    let rows: Vec<usize> = (0..d).collect();
    combinations(&rows, r)
        .into_iter()
        .map(|combo| {
            let m: Vec<Vec<i128>> = combo.iter().map(|&i| cols.iter().map(|c| c[i] as i128).collect()).collect();
            det_i128(&m).abs()
        })
        .find(|&x| x != 0)
        .expect("columns are independent")
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub base: Vec<i64>,
    pub periods: Vec<Vec<i64>>,
}

impl Cell {
    pub fn lattice(&self) -> ShiftedLattice {
        sl(&self.base, &self.periods)
    }

    pub fn member(&self, p: &[i64]) -> bool {
        brute_member(&self.base, &self.periods, p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    Empty,
    Point(i128),
    /// `t0 + g Z`
    Progression(i128, i128),
}

/// Smallest `g > 0` with `(0, ..., 0, g)` a period, or `None` when the last
/// axis meets the lattice only in zero.
pub fn vertical_period(c: &Cell, d: usize) -> Option<i128> {
    let mut with_axis = c.periods.clone();
    with_axis.push((0..d).map(|i| i64::from(i + 1 == d)).collect());
    if rank_i64(&with_axis, d) > c.periods.len() {
        return None;
    }
    let bound = nonzero_maximal_minor(&c.periods, d);
    let zero = vec![0; d];
    (1..=bound)
        .find(|&g| {
            let mut p = vec![0; d];
            p[d - 1] = g as i64;
            brute_member(&zero, &c.periods, &p)
        })
        .or_else(|| panic!("no vertical period up to the minor bound {bound}"))
}

/// Slice of `c` over the prefix `v`.
pub fn slice(c: &Cell, d: usize, g: Option<i128>, v: &[i64]) -> Slice {
    match g {
        Some(g) => (0..g)
            .find(|&t| {
                let mut p = v.to_vec();
                p.push(t as i64);
                c.member(&p)
            })
            .map_or(Slice::Empty, |t| Slice::Progression(t, g)),
        None => {
            // the top rows have full column rank: solve them by Cramer
            let r = c.periods.len();
            let top: Vec<usize> = (0..d - 1).collect();
            let target: Vec<i128> = v.iter().zip(&c.base).map(|(a, b)| (*a - *b) as i128).collect();
            let combo = combinations(&top, r)
                .into_iter()
                .find(|combo| {
                    let m: Vec<Vec<i128>> = combo.iter().map(|&i| c.periods.iter().map(|p| p[i] as i128).collect()).collect();
                    det_i128(&m) != 0
                })
                .expect("top rows have full column rank");
            let m: Vec<Vec<i128>> = combo.iter().map(|&i| c.periods.iter().map(|p| p[i] as i128).collect()).collect();
            let det = det_i128(&m);
            let mut lambda = Vec::with_capacity(r);
            for j in 0..r {
                let mut mj = m.clone();
                for (row, &i) in combo.iter().enumerate() {
                    mj[row][j] = target[i];
                }
                let num = det_i128(&mj);
                if num % det != 0 {
                    return Slice::Empty;
                }
                lambda.push(num / det);
            }
            let at = |i: usize| c.periods.iter().zip(&lambda).map(|(p, l)| p[i] as i128 * l).sum::<i128>();
            if (0..d - 1).any(|i| at(i) != target[i]) {
                return Slice::Empty;
            }
            Slice::Point(c.base[d - 1] as i128 + at(d - 1))
        }
    }
}

pub fn slice_holds(s: Slice, t: i128) -> bool {
    match s {
        Slice::Empty => false,
        Slice::Point(p) => p == t,
        Slice::Progression(t0, g) => (t - t0).rem_euclid(g) == 0,
    }
}

/// Whether the slice of `z` over `v` is non-empty and inside the union of
/// the slices of `xs`. A progression is covered iff each of its residues
/// modulo the lcm of all progression steps is; points never cover one.
pub fn kept_oracle(z: Slice, xs: &[Slice]) -> bool {
    match z {
        Slice::Empty => false,
        Slice::Point(t) => xs.iter().any(|&s| slice_holds(s, t)),
        Slice::Progression(t0, g) => {
            let modulus = xs.iter().fold(g, |m, s| match s {
                Slice::Progression(_, h) => m.lcm(h),
                _ => m,
            });
            (0..modulus / g).all(|i| {
                let t = t0 + g * i;
                xs.iter().any(|&s| matches!(s, Slice::Progression(..)) && slice_holds(s, t))
            })
        }
    }
}
