//! Bottom-up evaluation of core formulas to difference chains, satisfiability
//! and witness extraction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive};

use crate::error::{Error, Result};
use crate::frontend::{atoms_to_lattice, desugar_and_weigh, parse, Equation, Formula, Parsed};
use crate::intlin::{self, solve_system, BigMatrix, BigVector};
use crate::lattice::ShiftedLattice;
use crate::sdf::chain::{
    chain_and, chain_or, chain_project, chain_unproj, complement, decreasing_form, DnfChain,
};
use crate::unions::{union_subset, LatticeUnion};

/// Residue classes tried per cell before the witness search gives up.
pub const WITNESS_RESIDUE_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Evaluate `!E x. !phi` as a universal projection of `phi`.
    pub peephole: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { peephole: true }
    }
}

/// Evaluates a core formula. The result lives in `Z^d` for the smallest `d`
/// covering the variables that matter; coordinates past `d` are free.
pub fn evaluate(f: &Formula) -> Result<DnfChain> {
    evaluate_with(f, Options::default())
}

pub fn evaluate_with(f: &Formula, opts: Options) -> Result<DnfChain> {
    if !f.is_core() {
        return Err(Error::PreconditionViolation("formula is not in core form".into()));
    }
    eval(f, opts)
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other),
    }
}

fn eliminate(i: usize, u: DnfChain, universal: bool) -> Result<DnfChain> {
    if i > u.dim() {
        return Ok(u);
    }
    let r = if universal { chain_unproj(&[i], &u)? } else { chain_project(&[i], &u)? };
    Ok(if i == r.dim() { r.restrict_prefix(i - 1) } else { r })
}

fn eval(f: &Formula, opts: Options) -> Result<DnfChain> {
    match f {
        Formula::Atom(e) => Ok(atoms_chain(&[e])),
        Formula::And(..) => {
            let mut parts = Vec::new();
            conjuncts(f, &mut parts);
            let atoms: Vec<&Equation> = parts
                .iter()
                .filter_map(|g| match g {
                    Formula::Atom(e) => Some(e),
                    _ => None,
                })
                .collect();
            let mut acc = if atoms.is_empty() { DnfChain::top(0) } else { atoms_chain(&atoms) };
            for g in parts.iter().filter(|g| !matches!(g, Formula::Atom(_))) {
                if acc.is_empty() {
                    break;
                }
                acc = chain_and(&acc, &eval(g, opts)?);
            }
            Ok(acc)
        }
        Formula::Or(a, b) => Ok(chain_or(&eval(a, opts)?, &eval(b, opts)?)),
        Formula::Not(a) => {
            if opts.peephole {
                if let Formula::Exists(i, body) = a.as_ref() {
                    if let Formula::Not(inner) = body.as_ref() {
                        return eliminate(*i, eval(inner, opts)?, true);
                    }
                }
            }
            Ok(complement(&eval(a, opts)?))
        }
        Formula::Exists(i, a) => eliminate(*i, eval(a, opts)?, false),
        Formula::Implies(..) | Formula::Forall(..) => unreachable!("checked by is_core"),
    }
}

fn atoms_chain(atoms: &[&Equation]) -> DnfChain {
    let d = atoms.iter().map(|e| e.max_var()).max().unwrap_or(0);
    DnfChain::single(LatticeUnion::single(atoms_to_lattice(atoms, d)))
}

/// Outcome of running a formula end to end.
#[derive(Clone, Debug)]
pub struct Decision {
    pub parsed: Parsed,
    pub core: Formula,
    pub weight: usize,
    /// Solution set over `Z^n`, `n` the largest free variable index.
    pub chain: DnfChain,
    pub satisfiable: bool,
}

/// Largest index of a variable occurring free.
pub fn report_dim(f: &Formula) -> usize {
    f.free_vars().into_iter().max().unwrap_or(0)
}

/// Brings an evaluated chain to dimension `n`. Coordinates past `n` are
/// never free, so the chain is a cylinder over them.
pub fn to_report_dim(u: &DnfChain, n: usize) -> DnfChain {
    if u.dim() > n {
        u.restrict_prefix(n)
    } else {
        u.pad_to_dim(n).expect("n is at least the chain dimension")
    }
}

pub fn decide_formula(parsed: Parsed, max_negations: Option<usize>, opts: Options) -> Result<Decision> {
    let (core, weight) = desugar_and_weigh(&parsed.formula);
    if let Some(limit) = max_negations {
        if weight > limit {
            return Err(Error::BudgetExceeded { weight, limit });
        }
    }
    let raw = evaluate_with(&core, opts)?;
    let chain = to_report_dim(&raw, report_dim(&parsed.formula));
    let satisfiable = crate::sdf::chain::is_satisfiable(&chain);
    Ok(Decision { parsed, core, weight, chain, satisfiable })
}

pub fn decide(text: &str, max_negations: Option<usize>) -> Result<Decision> {
    decide_formula(parse(text)?, max_negations, Options::default())
}

/// A point of `[[u]]`, or `None` when the set is empty.
///
/// In the decreasing form a point of an odd link outside the next link is a
/// member. Such a point is searched for per cell: residues modulo the common
/// index of the full-rank covering pieces, then a moment-curve walk to step
/// off the thin ones.
pub fn extract_witness(u: &DnfChain) -> Result<Option<BigVector>> {
    if u.is_empty() {
        return Ok(None);
    }
    let w = decreasing_form(u);
    let links = w.links();
    for t in (0..links.len()).step_by(2) {
        let next = links.get(t + 1).cloned().unwrap_or_else(|| LatticeUnion::empty(w.dim()));
        for cell in links[t].cells() {
            if union_subset(&LatticeUnion::single(cell.clone()), &next) {
                continue;
            }
            let p = point_outside(cell, &next)?;
            if u.contains(&p) {
                return Ok(Some(p));
            }
            return Err(Error::PreconditionViolation(format!("witness candidate {p:?} is not a member")));
        }
    }
    Ok(None)
}

/// Coordinates of `v - base` in the (full column rank) period basis.
fn pull_back(periods: &BigMatrix, v: &[BigInt]) -> BigVector {
    let (sol, _) = solve_system(periods, v)
        .expect("dimensions agree")
        .expect("vector lies in the period lattice");
    sol
}

/// A point of `cell` outside `ys`, given that one exists.
fn point_outside(cell: &ShiftedLattice, ys: &LatticeUnion) -> Result<BigVector> {
    let base = cell.base().expect("non-empty cell").clone();
    let r = cell.rank();
    if r == 0 {
        return Ok(base);
    }
    let d = cell.dim();
    let p = BigMatrix::from_columns(d, cell.periods().to_vec());
    let mut full = Vec::new();
    let mut thin = 0usize;
    for y in ys.cells() {
        let yc = y.intersect(cell);
        let Some(yb) = yc.base() else { continue };
        if yc.rank() < r {
            thin += 1;
            continue;
        }
        let lb = pull_back(&p, &intlin::sub(yb, &base));
        let lp: Vec<BigVector> = yc.periods().iter().map(|q| pull_back(&p, q)).collect();
        full.push(ShiftedLattice::new(lb, lp));
    }
    let mut m = BigInt::one();
    for l in &full {
        m = m.lcm(&l.index().expect("full relative rank"));
    }
    let total = m.to_u64().and_then(|mm| mm.checked_pow(r as u32));
    if total.map_or(true, |t| t > WITNESS_RESIDUE_CAP) {
        return Err(Error::SearchExhausted);
    }
    let mm = m.to_u64().unwrap();
    let to_point = |lambda: &[BigInt]| intlin::add(&base, &p.mul_vec(lambda));
    for code in 0..total.unwrap() {
        let mut rest = code;
        let rho: BigVector = (0..r)
            .map(|_| {
                let digit = rest % mm;
                rest /= mm;
                BigInt::from(digit)
            })
            .collect();
        if full.iter().any(|l| l.member(&rho)) {
            continue;
        }
        // An affine hyperplane meets the moment curve in at most r points.
        for c in 0..=(thin * r) as u64 {
            let lambda: BigVector = rho
                .iter()
                .zip(1..=r as u32)
                .map(|(x, e)| x + &m * BigInt::from(c).pow(e))
                .collect();
            let q = to_point(&lambda);
            if !ys.contains(&q) {
                return Ok(q);
            }
        }
    }
    if full.is_empty() && thin == 0 {
        return Ok(base);
    }
    Err(Error::SearchExhausted)
}

/// Whether `u` has a point with every coordinate in `[-bound, bound]`;
/// used by tests as an independent emptiness check on small instances.
pub fn has_point_in_box(u: &DnfChain, bound: i64) -> bool {
    let d = u.dim();
    let side = (2 * bound + 1) as u64;
    let Some(total) = side.checked_pow(d as u32) else { return false };
    (0..total).any(|code| {
        let mut rest = code;
        let p: Vec<i64> = (0..d)
            .map(|_| {
                let v = (rest % side) as i64 - bound;
                rest /= side;
                v
            })
            .collect();
        u.contains_i64(&p)
    })
}
