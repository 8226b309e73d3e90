use crate::connective::Connective;
use crate::enumerate::{visit_circuits, EnumSpec};
use crate::error::{Error, Result};
use crate::setcover::{min_cover, Bits, Cover};
use crate::truth_table::TruthTable;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anticheckers {
    /// S as a set of points, ascending.
    pub points: Vec<usize>,
    /// Distinct tables computed by circuits of size <= s.
    pub tables_checked: usize,
}

impl Anticheckers {
    pub fn as_set(&self, n: usize) -> TruthTable {
        TruthTable::from_fn(n, |x| self.points.contains(&x))
    }
}

/// Tables of every circuit with at most `s` gates (constants allowed).
pub fn small_tables(n: usize, s: usize, basis: &[Connective]) -> Result<BTreeSet<TruthTable>> {
    let spec = EnumSpec::new(n, basis.to_vec(), s).with_constants(true);
    let mut out = BTreeSet::new();
    visit_circuits(&spec, |p| {
        out.insert(p.table().clone());
        true
    })?;
    Ok(out)
}

/// A minimum set S such that every circuit of size <= s disagrees with f
/// somewhere on S: a minimum hitting set of the disagreement sets.
pub fn anticheckers(f: &TruthTable, s: usize, basis: &[Connective]) -> Result<Anticheckers> {
    let tables: Vec<TruthTable> = small_tables(f.n(), s, basis)?.into_iter().collect();
    if tables.contains(f) {
        return Err(Error::NoAntichecker(format!("{f} has a circuit with at most {s} gates")));
    }
    let len = tables.len();
    let sets: Vec<Bits> = (0..f.len())
        .map(|x| Bits::from_indices(len, (0..len).filter(|&c| tables[c].get(x) != f.get(x))))
        .collect();
    let target = Bits::from_indices(len, 0..len);
    match min_cover(len, &target, &sets, None) {
        Cover::Optimal(points) => Ok(Anticheckers { points, tables_checked: len }),
        _ => Err(Error::NoAntichecker("disagreement sets cannot be hit".into())),
    }
}

/// Whether every table in `tables` disagrees with f on some point of S.
pub fn is_antichecker_set(f: &TruthTable, s: &[usize], tables: &BTreeSet<TruthTable>) -> bool {
    tables.iter().all(|t| s.iter().any(|&x| t.get(x) != f.get(x)))
}
