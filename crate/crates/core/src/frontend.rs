//! Surface syntax: lexer, parser, printer, desugaring to the core connectives
//! and the map from linear equations to shifted lattices.
//!
//! ```text
//! formula := 'E' var '.' formula | 'A' var '.' formula | '!' formula
//!          | formula '&' formula | formula '|' formula | formula '->' formula
//!          | '(' formula ')' | term '=' term
//! term    := integer | var | integer '*' var | term '+' term | term '-' term | '-' term
//! ```
//!
//! `!` binds tightest, then `&`, `|`, and the right-associative `->`.
//! Quantifiers extend as far right as possible. Variables named `x<N>` get
//! index `N`; other names get the next free indices, free variables first.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intlin::{solve_system, BigMatrix};
use crate::lattice::ShiftedLattice;

/// `sum coeffs[i] * x_i + constant`, with no zero coefficients stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearTerm {
    pub coeffs: BTreeMap<usize, BigInt>,
    pub constant: BigInt,
}

impl LinearTerm {
    pub fn constant(c: BigInt) -> Self {
        LinearTerm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(i: usize, c: BigInt) -> Self {
        let mut t = LinearTerm::default();
        t.add_coeff(i, c);
        t
    }

    fn add_coeff(&mut self, i: usize, c: BigInt) {
        let e = self.coeffs.entry(i).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn plus(mut self, other: &LinearTerm) -> Self {
        for (&i, c) in &other.coeffs {
            self.add_coeff(i, c.clone());
        }
        self.constant += &other.constant;
        self
    }

    pub fn negated(&self) -> Self {
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(&i, c)| (i, -c)).collect(),
            constant: -&self.constant,
        }
    }

    pub fn max_var(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn eval(&self, env: &dyn Fn(usize) -> BigInt) -> BigInt {
        self.coeffs.iter().map(|(&i, c)| c * env(i)).sum::<BigInt>() + &self.constant
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| if c.is_one() { format!("x{i}") } else { format!("{c}*x{i}") })
            .collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: LinearTerm,
    pub rhs: LinearTerm,
}

impl Equation {
    /// `lhs - rhs`, which the equation sets to zero.
    pub fn difference(&self) -> LinearTerm {
        self.lhs.clone().plus(&self.rhs.negated())
    }

    pub fn max_var(&self) -> usize {
        self.lhs.max_var().max(self.rhs.max_var())
    }

    pub fn holds(&self, env: &dyn Fn(usize) -> BigInt) -> bool {
        self.difference().eval(env).is_zero()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Equation),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(usize, Box<Formula>),
    Forall(usize, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: usize, f: Formula) -> Formula {
        Exists(v, Box::new(f))
    }

    /// Number of `Not` nodes.
    pub fn negations(&self) -> usize {
        match self {
            Atom(_) => 0,
            Not(a) => 1 + a.negations(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.negations() + b.negations(),
            Exists(_, a) | Forall(_, a) => a.negations(),
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            Atom(e) => e.max_var(),
            Not(a) => a.max_var(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.max_var().max(b.max_var()),
            Exists(v, a) | Forall(v, a) => (*v).max(a.max_var()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        match self {
            Atom(e) => e.lhs.coeffs.keys().chain(e.rhs.coeffs.keys()).copied().collect(),
            Not(a) => a.free_vars(),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Exists(v, a) | Forall(v, a) => {
                let mut s = a.free_vars();
                s.remove(v);
                s
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Atom(_) => true,
            Not(a) => a.is_quantifier_free(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Exists(..) | Forall(..) => false,
        }
    }

    /// Uses only atoms, `Not`, `And`, `Or` and `Exists`.
    pub fn is_core(&self) -> bool {
        match self {
            Atom(_) => true,
            Not(a) | Exists(_, a) => a.is_core(),
            And(a, b) | Or(a, b) => a.is_core() && b.is_core(),
            Implies(..) | Forall(..) => false,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom(e) => write!(f, "{e}"),
            Not(a) => write!(f, "!({a})"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            Exists(v, a) => write!(f, "(E x{v}. {a})"),
            Forall(v, a) => write!(f, "(A x{v}. {a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Dot,
    Bang,
    Amp,
    Bar,
    Arrow,
    Eq,
    Plus,
    Minus,
    Star,
    Exists,
    Forall,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Eof => write!(f, "end of input"),
            t => write!(
                f,
                "'{}'",
                match t {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Dot => ".",
                    Tok::Bang => "!",
                    Tok::Amp => "&",
                    Tok::Bar => "|",
                    Tok::Arrow => "->",
                    Tok::Eq => "=",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Exists => "E",
                    _ => "A",
                }
            ),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '!' | '¬' | '~' => push(Tok::Bang, 1, &mut i, &mut col),
            '&' | '∧' => push(Tok::Amp, 1, &mut i, &mut col),
            '|' | '∨' => push(Tok::Bar, 1, &mut i, &mut col),
            '→' => push(Tok::Arrow, 1, &mut i, &mut col),
            '∃' => push(Tok::Exists, 1, &mut i, &mut col),
            '∀' => push(Tok::Forall, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '*' | '·' => push(Tok::Star, 1, &mut i, &mut col),
            '-' | '−' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow, 2, &mut i, &mut col)
                } else {
                    push(Tok::Minus, 1, &mut i, &mut col)
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Int(s.parse().unwrap()), line: l0, col: c0 });
                col += i - start;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
                col += i - start;
            }
            other => {
                return Err(Error::UnknownSymbol { line, col, symbol: other.to_string() });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Formula over variable names, before index assignment.
#[derive(Clone, Debug)]
enum Raw {
    Atom(RawTerm, RawTerm),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Exists(String, Box<Raw>),
    Forall(String, Box<Raw>),
}

#[derive(Clone, Debug, Default)]
struct RawTerm {
    vars: Vec<(String, BigInt)>,
    constant: BigInt,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T> {
        let s = &self.toks[self.pos];
        Err(Error::Parse { line: s.line, col: s.col, message })
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn formula(&mut self) -> Result<Raw> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.formula()?;
            return Ok(Raw::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Raw> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.next();
            let rhs = self.conjunction()?;
            acc = Raw::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Raw> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.next();
            let rhs = self.unary()?;
            acc = Raw::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn quantifier(&self) -> Option<bool> {
        match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Tok::Exists, Tok::Ident(_), _) => Some(true),
            (Tok::Forall, Tok::Ident(_), _) => Some(false),
            (Tok::Ident(q), Tok::Ident(_), Tok::Dot) if q == "E" => Some(true),
            (Tok::Ident(q), Tok::Ident(_), Tok::Dot) if q == "A" => Some(false),
            _ => None,
        }
    }

    fn unary(&mut self) -> Result<Raw> {
        if let Some(is_exists) = self.quantifier() {
            self.next();
            let Tok::Ident(v) = self.next() else { unreachable!() };
            self.expect(Tok::Dot)?;
            let body = Box::new(self.formula()?);
            return Ok(if is_exists { Raw::Exists(v, body) } else { Raw::Forall(v, body) });
        }
        match self.peek() {
            Tok::Bang => {
                self.next();
                Ok(Raw::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => {
                let lhs = self.term()?;
                self.expect(Tok::Eq)?;
                let rhs = self.term()?;
                Ok(Raw::Atom(lhs, rhs))
            }
        }
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut acc = RawTerm::default();
        self.signed_summand(&mut acc, BigInt::one())?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    self.signed_summand(&mut acc, BigInt::one())?;
                }
                Tok::Minus => {
                    self.next();
                    self.signed_summand(&mut acc, -BigInt::one())?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_summand(&mut self, acc: &mut RawTerm, sign: BigInt) -> Result<()> {
        match self.peek().clone() {
            Tok::Minus => {
                self.next();
                self.signed_summand(acc, -sign)
            }
            Tok::Int(n) => {
                self.next();
                if *self.peek() == Tok::Star {
                    self.next();
                    match self.next() {
                        Tok::Ident(v) => acc.vars.push((v, sign * n)),
                        _ => {
                            self.pos -= 1;
                            return self.error(format!("expected a variable after '*', found {}", self.peek()));
                        }
                    }
                } else {
                    acc.constant += sign * n;
                }
                Ok(())
            }
            Tok::Ident(v) => {
                self.next();
                acc.vars.push((v, sign));
                Ok(())
            }
            t => self.error(format!("expected a term, found {t}")),
        }
    }
}

/// A parsed formula together with its variable naming.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub formula: Formula,
    /// `names[i - 1]` is the source name of variable `i`.
    pub names: Vec<String>,
}

impl Parsed {
    pub fn name(&self, i: usize) -> String {
        self.names.get(i - 1).cloned().unwrap_or_else(|| format!("x{i}"))
    }
}

fn explicit_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok().filter(|&n| n >= 1)
}

/// Names in order of first occurrence, split into those that occur free
/// somewhere and the rest.
fn collect_names(r: &Raw, bound: &mut Vec<String>, free: &mut Vec<String>, all: &mut Vec<String>) {
    let note = |v: &String, is_free: bool, free: &mut Vec<String>, all: &mut Vec<String>| {
        if !all.contains(v) {
            all.push(v.clone());
        }
        if is_free && !free.contains(v) {
            free.push(v.clone());
        }
    };
    match r {
        Raw::Atom(a, b) => {
            for (v, _) in a.vars.iter().chain(&b.vars) {
                let is_free = !bound.contains(v);
                note(v, is_free, free, all);
            }
        }
        Raw::Not(a) => collect_names(a, bound, free, all),
        Raw::And(a, b) | Raw::Or(a, b) | Raw::Implies(a, b) => {
            collect_names(a, bound, free, all);
            collect_names(b, bound, free, all);
        }
        Raw::Exists(v, a) | Raw::Forall(v, a) => {
            note(v, false, free, all);
            bound.push(v.clone());
            collect_names(a, bound, free, all);
            bound.pop();
        }
    }
}

fn bind(r: &Raw, idx: &HashMap<String, usize>) -> Formula {
    let term = |t: &RawTerm| {
        let mut out = LinearTerm::constant(t.constant.clone());
        for (v, c) in &t.vars {
            out.add_coeff(idx[v], c.clone());
        }
        out
    };
    match r {
        Raw::Atom(a, b) => Atom(Equation { lhs: term(a), rhs: term(b) }),
        Raw::Not(a) => Not(Box::new(bind(a, idx))),
        Raw::And(a, b) => And(Box::new(bind(a, idx)), Box::new(bind(b, idx))),
        Raw::Or(a, b) => Or(Box::new(bind(a, idx)), Box::new(bind(b, idx))),
        Raw::Implies(a, b) => Implies(Box::new(bind(a, idx)), Box::new(bind(b, idx))),
        Raw::Exists(v, a) => Exists(idx[v], Box::new(bind(a, idx))),
        Raw::Forall(v, a) => Forall(idx[v], Box::new(bind(a, idx))),
    }
}

pub fn parse(text: &str) -> Result<Parsed> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let raw = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after formula", p.peek()));
    }
    let (mut bound, mut free, mut all) = (Vec::new(), Vec::new(), Vec::new());
    collect_names(&raw, &mut bound, &mut free, &mut all);
    let mut idx: HashMap<String, usize> = HashMap::new();
    for v in &all {
        if let Some(n) = explicit_index(v) {
            idx.insert(v.clone(), n);
        }
    }
    let mut next = idx.values().copied().max().unwrap_or(0) + 1;
    let implicit = free.iter().chain(all.iter().filter(|v| !free.contains(v)));
    for v in implicit {
        if !idx.contains_key(v) {
            idx.insert(v.clone(), next);
            next += 1;
        }
    }
    let n = idx.values().copied().max().unwrap_or(0);
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    for (v, &i) in &idx {
        names[i - 1] = v.clone();
    }
    Ok(Parsed { formula: bind(&raw, &idx), names })
}

/// The cheaper of `!f` and its De Morgan dual, with `!!g` cancelled.
fn negate(f: Formula) -> Formula {
    match f {
        Not(g) => *g,
        And(a, b) => demorgan(a, b, true),
        Or(a, b) => demorgan(a, b, false),
        other => Not(Box::new(other)),
    }
}

fn demorgan(a: Box<Formula>, b: Box<Formula>, was_and: bool) -> Formula {
    let direct = 1 + a.negations() + b.negations();
    let na = negate((*a).clone());
    let nb = negate((*b).clone());
    if na.negations() + nb.negations() < direct {
        if was_and {
            Or(Box::new(na), Box::new(nb))
        } else {
            And(Box::new(na), Box::new(nb))
        }
    } else if was_and {
        Not(Box::new(And(a, b)))
    } else {
        Not(Box::new(Or(a, b)))
    }
}

fn core(f: &Formula) -> Formula {
    match f {
        Atom(e) => Atom(e.clone()),
        Not(a) => negate(core(a)),
        And(a, b) => And(Box::new(core(a)), Box::new(core(b))),
        Or(a, b) => Or(Box::new(core(a)), Box::new(core(b))),
        Implies(a, b) => Or(Box::new(negate(core(a))), Box::new(core(b))),
        Exists(v, a) => Exists(*v, Box::new(core(a))),
        Forall(v, a) => negate(Exists(*v, Box::new(negate(core(a))))),
    }
}

/// Rewrites to atoms, `Not`, `And`, `Or`, `Exists`, cancelling double
/// negations and applying De Morgan where it removes negations. Returns the
/// core formula and its number of negations.
pub fn desugar_and_weigh(f: &Formula) -> (Formula, usize) {
    let c = core(f);
    let w = c.negations();
    (c, w)
}

/// The solution set in `Z^nvars` of a system of equations.
pub fn atoms_to_lattice(atoms: &[&Equation], nvars: usize) -> ShiftedLattice {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(atoms.len());
    let mut rhs = Vec::with_capacity(atoms.len());
    for e in atoms {
        let d = e.difference();
        assert!(d.max_var() <= nvars, "atom mentions a variable beyond nvars");
        let mut row = vec![BigInt::zero(); nvars];
        for (&i, c) in &d.coeffs {
            row[i - 1] = c.clone();
        }
        rows.push(row);
        rhs.push(-d.constant);
    }
    let mut a = BigMatrix::zeros(rows.len(), nvars);
    for (r, row) in rows.into_iter().enumerate() {
        for (c, x) in row.into_iter().enumerate() {
            a.set(r, c, x);
        }
    }
    match solve_system(&a, &rhs).expect("row count matches") {
        None => ShiftedLattice::empty(nvars),
        Some((base, periods)) => ShiftedLattice::new(base, periods),
    }
}

pub fn atom_to_lattice(atom: &Equation, nvars: usize) -> ShiftedLattice {
    atoms_to_lattice(&[atom], nvars)
}

/// Largest absolute coefficient and constant, for oracle bounds.
pub fn magnitudes(f: &Formula) -> (BigInt, BigInt) {
    match f {
        Atom(e) => {
            let d = e.difference();
            let c = d.coeffs.values().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
            (c, d.constant.abs())
        }
        Not(a) | Exists(_, a) | Forall(_, a) => magnitudes(a),
        And(a, b) | Or(a, b) | Implies(a, b) => {
            let (c1, k1) = magnitudes(a);
            let (c2, k2) = magnitudes(b);
            (c1.max(c2), k1.max(k2))
        }
    }
}
