//! Direct semantic evaluation of formulas at integer points, independent of
//! the lattice machinery. Used by `wpa check` and the test suites.
//!
//! A quantifier over a quantifier-free body is decided exactly by test
//! points: the values of the bound variable that zero some atom, plus one
//! value that zeroes none. A quantifier whose body holds one more quantifier
//! over a single variable `z` is decided by scanning `[-(E+P), E+P]`, where
//! `P` is the lcm of the `z` coefficients and `E` bounds every point at which
//! two atoms meet after substituting a critical `z`. Past `E` the body is
//! periodic with period `P`. Anything deeper is skipped.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::frontend::Formula;

/// Largest scan radius accepted for a nested quantifier.
pub const DEFAULT_RANGE_CAP: i128 = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skip(pub String);

#[derive(Clone, Debug)]
struct Lin {
    coeffs: Vec<(usize, i128)>,
    constant: i128,
}

impl Lin {
    fn coeff(&self, v: usize) -> i128 {
        self.coeffs.iter().find(|(i, _)| *i == v).map_or(0, |(_, c)| *c)
    }

    /// Value with `skip` variables treated as zero.
    fn eval_without(&self, env: &[i128], skip: &[usize]) -> i128 {
        self.coeffs
            .iter()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(i, c)| c * env[*i])
            .sum::<i128>()
            + self.constant
    }
}

#[derive(Clone, Debug)]
enum Node {
    Atom(Lin),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Quant { exists: bool, var: usize, body: Box<Node> },
}

fn lower(f: &Formula) -> Result<Node, Skip> {
    let too_big = || Skip("coefficient does not fit in 64 bits".into());
    Ok(match f {
        Formula::Atom(e) => {
            let d = e.difference();
            let coeffs = d
                .coeffs
                .iter()
                .map(|(&i, c)| c.to_i64().map(|c| (i, c as i128)).ok_or_else(too_big))
                .collect::<Result<_, _>>()?;
            let constant = d.constant.to_i64().ok_or_else(too_big)? as i128;
            Node::Atom(Lin { coeffs, constant })
        }
        Formula::Not(a) => Node::Not(Box::new(lower(a)?)),
        Formula::And(a, b) => Node::And(Box::new(lower(a)?), Box::new(lower(b)?)),
        Formula::Or(a, b) => Node::Or(Box::new(lower(a)?), Box::new(lower(b)?)),
        Formula::Implies(a, b) => Node::Implies(Box::new(lower(a)?), Box::new(lower(b)?)),
        Formula::Exists(v, a) => Node::Quant { exists: true, var: *v, body: Box::new(lower(a)?) },
        Formula::Forall(v, a) => Node::Quant { exists: false, var: *v, body: Box::new(lower(a)?) },
    })
}

fn atoms<'a>(n: &'a Node, out: &mut Vec<&'a Lin>) {
    match n {
        Node::Atom(l) => out.push(l),
        Node::Not(a) => atoms(a, out),
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        Node::Quant { body, .. } => atoms(body, out),
    }
}

fn quantifier_free(n: &Node) -> bool {
    match n {
        Node::Atom(_) => true,
        Node::Not(a) => quantifier_free(a),
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => quantifier_free(a) && quantifier_free(b),
        Node::Quant { .. } => false,
    }
}

/// Variables bound by quantifiers inside `n`, and whether every such
/// quantifier has a quantifier-free body.
fn inner_quantifiers(n: &Node, vars: &mut BTreeSet<usize>) -> bool {
    match n {
        Node::Atom(_) => true,
        Node::Not(a) => inner_quantifiers(a, vars),
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => {
            let x = inner_quantifiers(a, vars);
            inner_quantifiers(b, vars) && x
        }
        Node::Quant { var, body, .. } => {
            vars.insert(*var);
            quantifier_free(body)
        }
    }
}

/// Whether `z` occurs in an atom outside every quantifier on `z`.
fn occurs_free(n: &Node, z: usize) -> bool {
    match n {
        Node::Atom(l) => l.coeff(z) != 0,
        Node::Not(a) => occurs_free(a, z),
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => occurs_free(a, z) || occurs_free(b, z),
        Node::Quant { var, body, .. } => *var != z && occurs_free(body, z),
    }
}

pub struct Oracle {
    root: Node,
    nvars: usize,
    range_cap: i128,
    /// Largest nested scan radius used so far.
    pub max_range: i128,
}

impl Oracle {
    pub fn new(f: &Formula) -> Result<Self, Skip> {
        Ok(Oracle { root: lower(f)?, nvars: f.max_var(), range_cap: DEFAULT_RANGE_CAP, max_range: 0 })
    }

    pub fn with_range_cap(mut self, cap: i128) -> Self {
        self.range_cap = cap;
        self
    }

    /// Truth value at `point`, whose entry `i - 1` is the value of `x_i`.
    /// Variables past the point are zero.
    pub fn holds(&mut self, point: &[i128]) -> Result<bool, Skip> {
        let mut env = vec![0i128; self.nvars.max(point.len()) + 1];
        env[1..=point.len()].copy_from_slice(point);
        let root = self.root.clone();
        self.eval(&root, &mut env)
    }

    fn eval(&mut self, n: &Node, env: &mut Vec<i128>) -> Result<bool, Skip> {
        Ok(match n {
            Node::Atom(l) => l.eval_without(env, &[]) == 0,
            Node::Not(a) => !self.eval(a, env)?,
            Node::And(a, b) => self.eval(a, env)? && self.eval(b, env)?,
            Node::Or(a, b) => self.eval(a, env)? || self.eval(b, env)?,
            Node::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            Node::Quant { exists, var, body } => {
                let saved = env[*var];
                let candidates = if quantifier_free(body) {
                    test_points(body, *var, env)
                } else {
                    let q = self.nested_range(body, *var, env)?;
                    self.max_range = self.max_range.max(q);
                    (-q..=q).collect()
                };
                let mut result = !*exists;
                for c in candidates {
                    env[*var] = c;
                    if self.eval(body, env)? == *exists {
                        result = *exists;
                        break;
                    }
                }
                env[*var] = saved;
                result
            }
        })
    }

    fn nested_range(&self, body: &Node, v: usize, env: &[i128]) -> Result<i128, Skip> {
        let mut inner = BTreeSet::new();
        if !inner_quantifiers(body, &mut inner) {
            return Err(Skip("quantifier nesting deeper than two".into()));
        }
        if inner.len() != 1 {
            return Err(Skip("nested quantifiers over several variables".into()));
        }
        let z = *inner.iter().next().unwrap();
        if z == v || occurs_free(body, z) {
            return Err(Skip("variable is both bound and free in a nested scope".into()));
        }
        let mut ls = Vec::new();
        atoms(body, &mut ls);
        let parts: Vec<(i128, i128, i128)> =
            ls.iter().map(|l| (l.coeff(v), l.coeff(z), l.eval_without(env, &[v, z]))).collect();
        let mut e: i128 = 0;
        let mut p: i128 = 1;
        for &(a, b, g) in &parts {
            if b == 0 {
                if a != 0 {
                    e = e.max(g.abs());
                }
                continue;
            }
            p = p.lcm(&b.abs());
            for &(aj, bj, gj) in &parts {
                let coef = aj * b - bj * a;
                if coef != 0 {
                    e = e.max((gj * b - bj * g).abs());
                }
            }
        }
        let q = e + p;
        if q > self.range_cap {
            return Err(Skip(format!("nested quantifier range {q} exceeds cap {}", self.range_cap)));
        }
        Ok(q)
    }
}

/// Values of `v` zeroing some atom of `body`, plus one that zeroes none.
fn test_points(body: &Node, v: usize, env: &[i128]) -> Vec<i128> {
    let mut ls = Vec::new();
    atoms(body, &mut ls);
    let mut out = Vec::new();
    for l in ls {
        let a = l.coeff(v);
        if a == 0 {
            continue;
        }
        let rest = l.eval_without(env, &[v]);
        if rest % a == 0 {
            out.push(-rest / a);
        }
    }
    let generic = out.iter().map(|c| c.abs()).max().map_or(0, |m| m + 1);
    out.sort_unstable();
    out.dedup();
    out.push(generic);
    out
}

/// All points of `[-r, r]^n`, in lexicographic order.
pub fn box_points(n: usize, r: i128) -> impl Iterator<Item = Vec<i128>> {
    let side = (2 * r + 1) as u128;
    let total = side.checked_pow(n as u32).expect("box too large");
    (0..total).map(move |code| {
        let mut rest = code;
        let mut p = vec![0i128; n];
        for slot in p.iter_mut().rev() {
            *slot = (rest % side) as i128 - r;
            rest /= side;
        }
        p
    })
}
