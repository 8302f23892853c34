//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::Rng;
use wpa_core::cli::{noncong_formula, scaling_formula, time_decide, SCALING_RATIO_LIMIT, SCALING_SIZES};
use wpa_core::frontend::{desugar_and_weigh, parse};
use wpa_core::intlin::{determinant, hnf, BigMatrix, Hnf};
use wpa_core::sdf::chain::{chain_and, chain_minus, chain_or, chain_project, chain_unproj, complement, rel_unproj_indices};
use wpa_core::sdf::{bottom_chain, chain_eval, is_strict, prop_apply, prop_cons, BoolOp, Dnf, SdfChain};
use wpa_core::solver::{decide, evaluate_with, extract_witness, Options};
use wpa_core::unions::{rel_unproj, union_subset};
use wpa_core::{DnfChain, LatticeUnion};

const HNF_CASES: usize = 500;
const HNF_TIME_LIMIT: Duration = Duration::from_secs(30);
const VOLUME_CASES: usize = 200;
const UNION_CASES: usize = 300;
const UNION_TIME_LIMIT: Duration = Duration::from_secs(120);
const UNPROJ_CASES: usize = 150;
const SDF_PAIRS: usize = 1200;
const E2E_TIME_LIMIT: Duration = Duration::from_secs(1);
const E2E_RADIUS: i64 = 50;
const CORPUS_SIZE: usize = 60;
const LEMMA_PAIRS: usize = 100;

type Outcome = Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("HNF contract", hnf_contract),
        ("volume law", volume_law),
        ("union inclusion", union_inclusion),
        ("relative universal projection", relative_unprojection),
        ("SDF engine", sdf_engine),
        ("end-to-end instances", end_to_end),
        ("fixed-k scaling", scaling),
        ("metamorphic suite", metamorphic),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let elapsed = t0.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ---------------------------------------------------------------------

/// Membership of `v` in the column lattice of an echelon matrix, by forced
/// back-substitution along the pivots.
fn in_echelon_lattice(hn: &Hnf, v: &[BigInt]) -> bool {
    let mut rest = v.to_vec();
    for (j, &p) in hn.pivot_rows.iter().enumerate() {
        let col = hn.h.column(j);
        let (q, r) = rest[p].div_rem(&col[p]);
        if !r.is_zero() {
            return false;
        }
        for (x, c) in rest.iter_mut().zip(col) {
            *x -= &q * c;
        }
    }
    rest.iter().all(Zero::is_zero)
}

fn random_matrix(rng: &mut StdRng) -> (usize, Vec<Vec<i64>>) {
    let m = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=5);
    let mut cols: Vec<Vec<i64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-100..=100)).collect()).collect();
    if n >= 2 && rng.gen_bool(0.3) {
        let i = rng.gen_range(0..n);
        let j = (i + 1) % n;
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        cols[j] = cols[i].iter().map(|x| s * x).collect();
    }
    if rng.gen_bool(0.3) {
        for c in cols.iter_mut() {
            for x in c.iter_mut() {
                if rng.gen_bool(0.4) {
                    *x = 0;
                }
            }
        }
    }
    (m, cols)
}

fn hnf_contract() -> Outcome {
    let mut rng = rng(101);
    let t0 = Instant::now();
    let mut combos = 0usize;
    for case in 0..HNF_CASES {
        let (m, cols) = random_matrix(&mut rng);
        let n = cols.len();
        let a = BigMatrix::from_columns(m, cols.iter().map(|c| big(c)).collect());
        let hn = hnf(&a);
        let ctx = || format!("case {case}: A = {cols:?}");
        ensure(a.mul(&hn.u) == hn.h, || format!("{}: H != A U", ctx()))?;
        ensure(determinant(&hn.u).abs().is_one(), || format!("{}: |det U| != 1", ctx()))?;
        ensure(hn.rank == rank_i64(&cols, m), || format!("{}: rank {}", ctx(), hn.rank))?;
        ensure(hn.pivot_rows.len() == hn.rank, || format!("{}: pivot count", ctx()))?;
        ensure(hn.pivot_rows.windows(2).all(|w| w[0] < w[1]), || format!("{}: pivots not increasing", ctx()))?;
        for j in 0..n {
            let col = hn.h.column(j);
            if j >= hn.rank {
                ensure(col.iter().all(Zero::is_zero), || format!("{}: column {j} not zero", ctx()))?;
                continue;
            }
            let p = hn.pivot_rows[j];
            ensure(col[..p].iter().all(Zero::is_zero), || format!("{}: column {j} not triangular", ctx()))?;
            ensure(col[p].is_positive(), || format!("{}: pivot {j} not positive", ctx()))?;
            for k in 0..j {
                let e = hn.h.get(p, k);
                ensure(!e.is_negative() && e < &col[p], || format!("{}: row {p} left of pivot unreduced", ctx()))?;
            }
        }
        // L(H) is inside L(A) because U is integral; the converse is checked
        // on every combination of A's columns with coefficients in {-1,0,1}.
        for c in cube(n, 1) {
            let v = a.mul_vec(&big(&c));
            ensure(in_echelon_lattice(&hn, &v), || format!("{}: A {c:?} outside L(H)", ctx()))?;
            combos += 1;
        }
    }
    let elapsed = t0.elapsed();
    ensure(elapsed < HNF_TIME_LIMIT, || format!("took {elapsed:.2?}, limit {HNF_TIME_LIMIT:?}"))?;
    Ok(format!("{HNF_CASES} matrices, {combos} combinations, limit {HNF_TIME_LIMIT:?}"))
}

// 2 ---------------------------------------------------------------------

fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let d = m.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let minor: Vec<Vec<i128>> = (0..d)
                        .filter(|&r| r != j)
                        .map(|r| (0..d).filter(|&c| c != i).map(|c| m[r][c]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * det_i128(&minor)
                })
                .collect()
        })
        .collect()
}

fn volume_law() -> Outcome {
    let mut rng = rng(202);
    let mut points = 0u64;
    for case in 0..VOLUME_CASES {
        let d = rng.gen_range(1..=3);
        let (periods, det) = loop {
            let ps: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-8..=8)).collect()).collect();
            let m: Vec<Vec<i128>> = (0..d).map(|i| ps.iter().map(|p| p[i] as i128).collect()).collect();
            let det = det_i128(&m);
            if det != 0 && det.abs() <= 64 {
                break (ps, det);
            }
        };
        let base: Vec<i64> = (0..d).map(|_| rng.gen_range(-10..=10)).collect();
        let s = det.abs();
        let x = sl(&base, &periods);
        let closed = x.count_points_in_fundamental_box(&BigInt::from(s)).map_err(|e| format!("case {case}: {e}"))?;
        // p - b is in the lattice iff adj(M) (p - b) vanishes modulo det(M)
        let m: Vec<Vec<i128>> = (0..d).map(|i| periods.iter().map(|p| p[i] as i128).collect()).collect();
        let adj = adjugate(&m);
        let mut literal = 0u64;
        let total = (s as u64).pow(d as u32);
        for code in 0..total {
            let mut rest = code;
            let p: Vec<i128> = (0..d)
                .map(|_| {
                    let c = (rest % s as u64) as i128;
                    rest /= s as u64;
                    c
                })
                .collect();
            let diff: Vec<i128> = p.iter().zip(&base).map(|(a, b)| a - *b as i128).collect();
            if adj.iter().all(|row| row.iter().zip(&diff).map(|(a, b)| a * b).sum::<i128>() % det == 0) {
                literal += 1;
            }
        }
        points += total;
        ensure(closed == BigInt::from(literal), || {
            format!("case {case}: base {base:?} periods {periods:?}, closed form {closed}, enumeration {literal}")
        })?;
    }
    Ok(format!("{VOLUME_CASES} lattices, {points} box points enumerated, exact equality"))
}

// 3 ---------------------------------------------------------------------

fn random_cell(rng: &mut StdRng, d: usize, e: i64, min_rank: usize) -> Cell {
    let (base, periods) = random_lattice(rng, d, e, min_rank);
    Cell { base, periods }
}

fn to_union(d: usize, cells: &[Cell]) -> LatticeUnion {
    LatticeUnion::new(d, cells.iter().map(Cell::lattice).collect())
}

/// The `k` cosets of `cell` obtained by scaling its first period by `k`.
fn split(cell: &Cell, k: i64) -> Vec<Cell> {
    let p1 = &cell.periods[0];
    (0..k)
        .map(|j| {
            let mut periods = cell.periods.clone();
            periods[0] = p1.iter().map(|x| k * x).collect();
            Cell { base: cell.base.iter().zip(p1).map(|(b, p)| b + j * p).collect(), periods }
        })
        .collect()
}

/// Residue classes of the first coordinate modulo `k`.
fn residues(d: usize, k: i64) -> Vec<Cell> {
    (0..k)
        .map(|j| {
            let mut base = vec![0; d];
            base[0] = j;
            let periods = (0..d).map(|i| (0..d).map(|r| if r == i { if i == 0 { k } else { 1 } } else { 0 }).collect()).collect();
            Cell { base, periods }
        })
        .collect()
}

fn drop_one(rng: &mut StdRng, mut cells: Vec<Cell>) -> Vec<Cell> {
    if rng.gen_bool(0.4) {
        let i = rng.gen_range(0..cells.len());
        cells.remove(i);
    }
    cells
}

fn union_instance(rng: &mut StdRng) -> (usize, Vec<Cell>, Vec<Cell>) {
    let d = rng.gen_range(1..=3);
    let many = |rng: &mut StdRng, e: i64| -> Vec<Cell> { (0..rng.gen_range(1..=3)).map(|_| random_cell(rng, d, e, 0)).collect() };
    match rng.gen_range(0..4) {
        0 => (d, many(rng, 6), many(rng, 6)),
        1 => {
            let k = rng.gen_range(2..=3);
            let x = random_cell(rng, d, 6 / k, 1);
            let ys = drop_one(rng, split(&x, k));
            (d, vec![x], ys)
        }
        2 => {
            let ys = many(rng, 3);
            let mut xs = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let y = &ys[rng.gen_range(0..ys.len())];
                let c = rng.gen_range(1..=2);
                let periods: Vec<Vec<i64>> =
                    y.periods.iter().filter(|_| rng.gen_bool(0.7)).map(|p| p.iter().map(|v| c * v).collect()).collect();
                let mut base = y.base.clone();
                for p in &y.periods {
                    let l = rng.gen_range(-1..=1);
                    base.iter_mut().zip(p).for_each(|(b, v)| *b += l * v);
                }
                if rng.gen_bool(0.3) {
                    base[rng.gen_range(0..d)] += 1;
                }
                xs.push(Cell { base, periods });
            }
            (d, xs, ys)
        }
        _ => {
            let k = rng.gen_range(2..=3);
            let ys = drop_one(rng, residues(d, k));
            (d, many(rng, 6), ys)
        }
    }
}

/// Exact inclusion of one cell in a union by enumeration in the parameter
/// space of the cell. Cells of `ys` whose span holds the cell's span pull
/// back to cosets containing `D Z^r`, `D` any nonzero maximal minor, so the
/// full pieces repeat modulo `M = lcm D`. The `t` other cells pull back into
/// hyperplanes, and the grid `rho + M [0, t]^r` has more points than `t`
/// hyperplanes can hold, so `[0, M (t + 1))^r` decides. Returns `None` when
/// that box exceeds `limit` points.
fn cell_covered_oracle(d: usize, x: &Cell, ys: &[Cell], limit: u64) -> Option<bool> {
    let r = x.periods.len();
    let mut m: i128 = 1;
    let mut thin: i128 = 0;
    for y in ys {
        let mut both = y.periods.clone();
        both.extend(x.periods.iter().cloned());
        if rank_i64(&both, d) == y.periods.len() {
            m = m.lcm(&nonzero_maximal_minor(&y.periods, d));
        } else {
            thin += 1;
        }
    }
    let w = m * (thin + 1);
    let total = (w as u64).checked_pow(r as u32)?;
    if total > limit {
        return None;
    }
    for code in 0..total {
        let mut rest = code;
        let mut q = x.base.clone();
        for p in &x.periods {
            let l = (rest % w as u64) as i64;
            rest /= w as u64;
            q.iter_mut().zip(p).for_each(|(a, v)| *a += l * v);
        }
        if !ys.iter().any(|y| y.member(&q)) {
            return Some(false);
        }
    }
    Some(true)
}

fn union_inclusion() -> Outcome {
    const LIMIT: u64 = 20_000;
    let mut rng = rng(303);
    let t0 = Instant::now();
    let (mut included, mut resampled) = (0, 0);
    let mut case = 0;
    while case < UNION_CASES {
        let (d, xs, ys) = union_instance(&mut rng);
        let verdicts: Option<Vec<bool>> = xs.iter().map(|x| cell_covered_oracle(d, x, &ys, LIMIT)).collect();
        let Some(verdicts) = verdicts else {
            resampled += 1;
            continue;
        };
        let expected = verdicts.iter().all(|&b| b);
        let got = union_subset(&to_union(d, &xs), &to_union(d, &ys));
        ensure(got == expected, || format!("case {case}: X = {xs:?}, Y = {ys:?}: solver {got}, oracle {expected}"))?;
        included += usize::from(expected);
        case += 1;
    }
    let elapsed = t0.elapsed();
    ensure(elapsed < UNION_TIME_LIMIT, || format!("took {elapsed:.2?}, limit {UNION_TIME_LIMIT:?}"))?;
    Ok(format!(
        "{UNION_CASES} instances, {included} included, {resampled} resampled over the {LIMIT}-point box cap, limit {UNION_TIME_LIMIT:?}"
    ))
}

// 4 ---------------------------------------------------------------------

fn unproj_instance(rng: &mut StdRng) -> (usize, Cell, Vec<Cell>) {
    let d = rng.gen_range(1..=3);
    let z = random_cell(rng, d, 6, 0);
    let mut xs = match rng.gen_range(0..4) {
        1 if !z.periods.is_empty() => split(&z, rng.gen_range(2..=3)),
        2 => {
            // residues of the last coordinate
            let k = rng.gen_range(2..=3);
            (0..k)
                .map(|j| {
                    let mut base = vec![0; d];
                    base[d - 1] = j;
                    let periods =
                        (0..d).map(|i| (0..d).map(|r| if r == i { if i + 1 == d { k } else { 1 } } else { 0 }).collect()).collect();
                    Cell { base, periods }
                })
                .collect()
        }
        _ => vec![],
    };
    if xs.len() > 1 && rng.gen_bool(0.4) {
        xs.remove(rng.gen_range(0..xs.len()));
    }
    while xs.is_empty() || (xs.len() < 3 && rng.gen_bool(0.3)) {
        xs.push(random_cell(rng, d, 6, 0));
    }
    (d, z, xs)
}

fn relative_unprojection() -> Outcome {
    const RADIUS: i64 = 5;
    let mut rng = rng(404);
    let (mut kept, mut points) = (0usize, 0usize);
    for case in 0..UNPROJ_CASES {
        let (d, z, xs) = unproj_instance(&mut rng);
        let got = rel_unproj(&z.lattice(), &to_union(d, &xs), 1).map_err(|e| format!("case {case}: {e}"))?;
        ensure(got.dim() == d - 1, || format!("case {case}: result dimension {}", got.dim()))?;
        let gz = vertical_period(&z, d);
        let gxs: Vec<Option<i128>> = xs.iter().map(|x| vertical_period(x, d)).collect();
        for v in cube(d - 1, RADIUS) {
            let zs = slice(&z, d, gz, &v);
            let ss: Vec<Slice> = xs.iter().zip(&gxs).map(|(x, g)| slice(x, d, *g, &v)).collect();
            let expected = kept_oracle(zs, &ss);
            let actual = got.contains_i64(&v);
            ensure(actual == expected, || {
                format!("case {case}: Z = {z:?}, X = {xs:?}, v = {v:?}: solver {actual}, oracle {expected}")
            })?;
            kept += usize::from(expected);
            points += 1;
        }
    }
    Ok(format!("{UNPROJ_CASES} instances, {points} kept-box points ({kept} in the projection), radius {RADIUS}"))
}

// 5 ---------------------------------------------------------------------

fn random_dnf(rng: &mut StdRng) -> Dnf {
    let n = rng.gen_range(0..=3);
    Dnf::from_conjuncts((0..n).map(|_| (0..3u32).filter(|_| rng.gen_bool(0.5)).collect::<Vec<_>>()))
}

fn random_chain(rng: &mut StdRng) -> SdfChain {
    let mut c = bottom_chain();
    for _ in 0..rng.gen_range(0..=4) {
        c = prop_cons(&random_dnf(rng), &c);
    }
    c
}

fn sdf_engine() -> Outcome {
    let mut rng = rng(505);
    let mut longest = 0;
    for case in 0..SDF_PAIRS {
        let a = random_chain(&mut rng);
        let b = random_chain(&mut rng);
        ensure(is_strict(&a) && is_strict(&b), || format!("case {case}: generator produced a non-strict chain"))?;
        for op in [BoolOp::And, BoolOp::Or, BoolOp::Minus] {
            let out = prop_apply(op, &a, &b);
            let ctx = || format!("case {case}: {op:?} on {a:?} and {b:?} gave {out:?}");
            ensure(is_strict(&out), || format!("{}: not strict", ctx()))?;
            ensure(out.len() <= a.len() * b.len(), || format!("{}: length bound", ctx()))?;
            for bits in 0..8u32 {
                let val = |x: u32| bits >> x & 1 == 1;
                let want = op.eval(chain_eval(&a, &val), chain_eval(&b, &val));
                ensure(chain_eval(&out, &val) == want, || format!("{}: valuation {bits:03b}", ctx()))?;
            }
            longest = longest.max(out.len());
        }
    }
    Ok(format!("{SDF_PAIRS} pairs x 3 operations, 8 valuations each, longest result {longest}"))
}

// 6 ---------------------------------------------------------------------

fn end_to_end() -> Outcome {
    let t0 = Instant::now();
    let even = decide("E y. x = 2*y", None).map_err(|e| e.to_string())?;
    let t_even = t0.elapsed();
    ensure(even.chain.dim() == 1, || format!("evenness: dimension {}", even.chain.dim()))?;
    for x in -E2E_RADIUS..=E2E_RADIUS {
        ensure(even.chain.contains_i64(&[x]) == (x % 2 == 0), || format!("evenness: wrong at {x}"))?;
    }
    ensure(t_even < E2E_TIME_LIMIT, || format!("evenness took {t_even:.2?}"))?;

    let text = noncong_formula(&[(BigInt::from(2), BigInt::zero())]).map_err(|e| e.to_string())?;
    let t0 = Instant::now();
    let odd = decide(&text, None).map_err(|e| e.to_string())?;
    let witness = extract_witness(&odd.chain).map_err(|e| e.to_string())?;
    let t_odd = t0.elapsed();
    ensure(odd.satisfiable, || "non-congruence instance reported unsat".into())?;
    for x in -E2E_RADIUS..=E2E_RADIUS {
        ensure(odd.chain.contains_i64(&[x]) == (x % 2 != 0), || format!("non-congruence: wrong at {x}"))?;
    }
    let w = witness.ok_or("no witness for a satisfiable instance")?;
    ensure(w.len() == 1 && w[0].is_odd() && odd.chain.contains(&w), || format!("witness {w:?} is not an odd member"))?;
    ensure(t_odd < E2E_TIME_LIMIT, || format!("non-congruence took {t_odd:.2?}"))?;
    Ok(format!(
        "2Z in {t_even:.2?}, 1+2Z sat with witness x1 = {} in {t_odd:.2?}, checked on [-{E2E_RADIUS}, {E2E_RADIUS}], limit {E2E_TIME_LIMIT:?}",
        w[0]
    ))
}

// 7 ---------------------------------------------------------------------

fn scaling() -> Outcome {
    let mut times = Vec::new();
    for n in SCALING_SIZES {
        let (t, d) = time_decide(&scaling_formula(n), 3).map_err(|e| e.to_string())?;
        ensure(d.weight == 2, || format!("n = {n}: weight {}", d.weight))?;
        times.push((n, t));
    }
    let mut log = vec![format!("t({})={:.2?}", times[0].0, times[0].1)];
    let mut worst: f64 = 0.0;
    for w in times.windows(2) {
        let ratio = w[1].1.as_secs_f64() / w[0].1.as_secs_f64().max(1e-9);
        worst = worst.max(ratio);
        log.push(format!("t({})={:.2?} ratio {ratio:.2}", w[1].0, w[1].1));
    }
    let summary = format!("{}, limit {SCALING_RATIO_LIMIT}", log.join(", "));
    ensure(worst <= SCALING_RATIO_LIMIT, || summary.clone())?;
    Ok(summary)
}

// 8 ---------------------------------------------------------------------

fn random_atom(rng: &mut StdRng) -> String {
    let side = |rng: &mut StdRng| {
        let mut s = String::new();
        for v in 1..=3 {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 && rng.gen_bool(0.6) {
                s.push_str(&format!("{}{}*x{v}", if s.is_empty() { "" } else { " + " }, c));
            }
        }
        let k: i64 = rng.gen_range(-3..=3);
        if s.is_empty() {
            s = k.to_string();
        } else if k != 0 {
            s.push_str(&format!(" + {k}"));
        }
        s
    };
    format!("{} = {}", side(rng), side(rng))
}

fn random_formula(rng: &mut StdRng, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_atom(rng);
    }
    let v = rng.gen_range(1..=3);
    match rng.gen_range(0..6) {
        0 => format!("({} & {})", random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        1 => format!("({} | {})", random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        2 => format!("!({})", random_formula(rng, depth - 1)),
        3 => format!("({} -> {})", random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        4 => format!("(E x{v}. {})", random_formula(rng, depth - 1)),
        _ => format!("(A x{v}. {})", random_formula(rng, depth - 1)),
    }
}

/// Extensional equality on `[-r, r]^n`, coordinates past a chain's
/// dimension being free.
fn same_on_box(u: &DnfChain, v: &DnfChain, r: i64) -> Result<(), Vec<i64>> {
    let n = u.dim().max(v.dim()).max(1);
    let u = u.pad_to_dim(n).unwrap();
    let v = v.pad_to_dim(n).unwrap();
    match cube(n, r).into_iter().find(|p| u.contains_i64(p) != v.contains_i64(p)) {
        Some(p) => Err(p),
        None => Ok(()),
    }
}

fn metamorphic() -> Outcome {
    const RADIUS: i64 = 4;
    let mut rng = rng(808);
    let mut corpus = Vec::with_capacity(CORPUS_SIZE);
    while corpus.len() < CORPUS_SIZE {
        let text = random_formula(&mut rng, 3);
        let parsed = parse(&text).map_err(|e| format!("{text}: {e}"))?;
        let (core, _) = desugar_and_weigh(&parsed.formula);
        let on = evaluate_with(&core, Options { peephole: true }).map_err(|e| format!("{text}: {e}"))?;
        let off = evaluate_with(&core, Options { peephole: false }).map_err(|e| format!("{text}: {e}"))?;
        corpus.push((text, on, off));
    }
    let mut checks = 0;
    for (i, (text, u, off)) in corpus.iter().enumerate() {
        same_on_box(&complement(&complement(u)), u, RADIUS).map_err(|p| format!("double complement, {text}, at {p:?}"))?;
        same_on_box(u, off, RADIUS).map_err(|p| format!("peephole, {text}, at {p:?}"))?;
        let (other, v, _) = &corpus[(i + 1) % corpus.len()];
        same_on_box(&chain_and(u, v), &chain_and(v, u), RADIUS)
            .map_err(|p| format!("and commutativity, {text} / {other}, at {p:?}"))?;
        same_on_box(&chain_or(u, v), &chain_or(v, u), RADIUS)
            .map_err(|p| format!("or commutativity, {text} / {other}, at {p:?}"))?;
        checks += 4;
        // duality on the single-link chains formed by each link
        for link in u.links() {
            if link.dim() == 0 {
                continue;
            }
            let s = DnfChain::single(link.clone());
            let idx = [rng.gen_range(1..=link.dim())];
            let direct = chain_unproj(&idx, &s).map_err(|e| e.to_string())?;
            let dual = complement(&chain_project(&idx, &complement(&s)).map_err(|e| e.to_string())?);
            same_on_box(&direct, &dual, RADIUS).map_err(|p| format!("duality on {s} over x{}, at {p:?}", idx[0]))?;
            checks += 1;
        }
    }
    // proj(X - Y) = proj(X) - unproj_X(Y) for single cells, eliminating the last coordinate
    let mut lemma = 0;
    for case in 0..LEMMA_PAIRS {
        let d = rng.gen_range(1..=3);
        let x = random_cell(&mut rng, d, 4, 0);
        let y = if x.periods.is_empty() || rng.gen_bool(0.5) {
            random_cell(&mut rng, d, 4, 0)
        } else {
            split(&x, 2).swap_remove(0)
        };
        let cx = DnfChain::single(LatticeUnion::single(x.lattice()));
        let cy = DnfChain::single(LatticeUnion::single(y.lattice()));
        let lhs = chain_project(&[d], &chain_minus(&cx, &cy)).map_err(|e| e.to_string())?;
        let rel = rel_unproj_indices(&x.lattice(), &LatticeUnion::single(y.lattice()), &[d]).map_err(|e| e.to_string())?;
        let rhs = chain_minus(&chain_project(&[d], &cx).map_err(|e| e.to_string())?, &rel);
        same_on_box(&lhs, &rhs, RADIUS).map_err(|p| format!("projection of a difference, case {case}: X = {x:?}, Y = {y:?}, at {p:?}"))?;
        lemma += 1;
    }
    Ok(format!(
        "{CORPUS_SIZE} formulas, {checks} identities and {lemma} projection-of-difference pairs checked on [-{RADIUS}, {RADIUS}]^n"
    ))
}
