//! JSON form of lattices and chains. Integers are decimal strings so that
//! big values survive any JSON reader.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::BigVector;
use crate::lattice::ShiftedLattice;
use crate::sdf::chain::DnfChain;
use crate::unions::LatticeUnion;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(untagged)]
pub enum LatticeJson {
    Empty { empty: bool, dim: usize },
    Coset { dim: usize, base: Vec<String>, periods: Vec<Vec<String>> },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct UnionJson {
    pub union: Vec<LatticeJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ChainJson {
    pub dim: usize,
    pub chain: Vec<UnionJson>,
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn ints(v: &[String], dim: usize) -> Result<BigVector> {
    if v.len() != dim {
        return Err(Error::Json(format!("expected {dim} entries, found {}", v.len())));
    }
    v.iter()
        .map(|s| s.trim().parse::<BigInt>().map_err(|_| Error::Json(format!("not an integer: {s:?}"))))
        .collect()
}

pub fn lattice_to_json(x: &ShiftedLattice) -> LatticeJson {
    match x.base() {
        None => LatticeJson::Empty { empty: true, dim: x.dim() },
        Some(b) => LatticeJson::Coset {
            dim: x.dim(),
            base: strings(b),
            periods: x.periods().iter().map(|p| strings(p)).collect(),
        },
    }
}

pub fn lattice_from_json(j: &LatticeJson) -> Result<ShiftedLattice> {
    match j {
        LatticeJson::Empty { empty: true, dim } => Ok(ShiftedLattice::empty(*dim)),
        LatticeJson::Empty { empty: false, .. } => Err(Error::Json("\"empty\": false needs base and periods".into())),
        LatticeJson::Coset { dim, base, periods } => {
            let base = ints(base, *dim)?;
            let periods = periods.iter().map(|p| ints(p, *dim)).collect::<Result<Vec<_>>>()?;
            if crate::intlin::rank(&crate::intlin::BigMatrix::from_columns(*dim, periods.clone())) != periods.len() {
                return Err(Error::Json("periods are not linearly independent".into()));
            }
            Ok(ShiftedLattice::new(base, periods))
        }
    }
}

pub fn chain_to_json(u: &DnfChain) -> ChainJson {
    ChainJson {
        dim: u.dim(),
        chain: u
            .links()
            .iter()
            .map(|l| UnionJson { union: l.cells().iter().map(lattice_to_json).collect() })
            .collect(),
    }
}

pub fn chain_from_json(j: &ChainJson) -> Result<DnfChain> {
    let mut links = Vec::with_capacity(j.chain.len());
    for l in &j.chain {
        let mut cells = Vec::with_capacity(l.union.len());
        for c in &l.union {
            let x = lattice_from_json(c)?;
            if x.dim() != j.dim {
                return Err(Error::Json(format!("cell of dimension {} in a chain of dimension {}", x.dim(), j.dim)));
            }
            cells.push(x);
        }
        links.push(LatticeUnion::new(j.dim, cells));
    }
    Ok(DnfChain::new(j.dim, links))
}

pub fn lattice_to_string(x: &ShiftedLattice) -> String {
    serde_json::to_string(&lattice_to_json(x)).expect("serializable")
}

pub fn lattice_from_str(s: &str) -> Result<ShiftedLattice> {
    let j: LatticeJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    lattice_from_json(&j)
}

pub fn chain_to_string(u: &DnfChain) -> String {
    serde_json::to_string(&chain_to_json(u)).expect("serializable")
}

pub fn chain_to_string_pretty(u: &DnfChain) -> String {
    serde_json::to_string_pretty(&chain_to_json(u)).expect("serializable")
}

pub fn chain_from_str(s: &str) -> Result<DnfChain> {
    let j: ChainJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    chain_from_json(&j)
}
