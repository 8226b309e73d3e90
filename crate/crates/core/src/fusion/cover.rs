use super::semifilter::{enumerate_semifilters, preserves, SemiFilter, SemiFilterSet, Subset, Universe};
use crate::budget;
use crate::connective::standard_basis;
use crate::enumerate::{visit_circuits, EnumSpec};
use crate::error::{Error, Result};
use crate::setcover::{min_cover, Bits, Cover};
use crate::truth_table::TruthTable;
use std::collections::BTreeSet;

/// Pairs (A, B) of subsets of U.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairCover {
    pub pairs: Vec<(Subset, Subset)>,
}

impl PairCover {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn covers(&self, f: &SemiFilter) -> bool {
        self.pairs.iter().any(|&(a, b)| !preserves(f, a, b))
    }

    /// Index of the first filter no pair covers.
    pub fn first_uncovered(&self, set: &SemiFilterSet) -> Option<usize> {
        set.filters.iter().position(|f| !self.covers(f))
    }
}

/// Which pairs (A, B) a cover may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairUniverse {
    /// Every A, B ⊆ U.
    All,
    /// Only ([[g]], [[h]]) for g, h with circuits of at most this many
    /// gates over {¬, ∧2, ∨2}.
    Brackets { size_cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoF0 {
    /// None when no set of pairs covers F0.
    pub value: Option<usize>,
    pub cover: PairCover,
}

/// Subsets of U that are [[g]] for some g of circuit size <= cap, ascending.
pub fn small_brackets(uni: &Universe, size_cap: usize) -> Result<Vec<Subset>> {
    let spec = EnumSpec::new(uni.n(), standard_basis(), size_cap).with_constants(true);
    let mut seen = BTreeSet::new();
    visit_circuits(&spec, |p| {
        seen.insert(uni.bracket(p.table()));
        true
    })?;
    Ok(seen.into_iter().collect())
}

/// Candidate pairs A < B in lexicographic order. Pairs with A ⊆ B or
/// B ⊆ A are dropped since A∩B is one of them and nothing is covered.
pub fn candidate_pairs(uni: &Universe, mode: PairUniverse) -> Result<Vec<(Subset, Subset)>> {
    let sets: Vec<Subset> = match mode {
        PairUniverse::All => (0..uni.subset_count() as Subset).collect(),
        PairUniverse::Brackets { size_cap } => small_brackets(uni, size_cap)?,
    };
    let mut out = Vec::new();
    for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            if a & b != a && a & b != b {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// Minimum number of pairs covering every filter in F0, with the
/// lexicographically least optimal pair list.
pub fn rho_f0(f0: &SemiFilterSet, mode: PairUniverse) -> Result<RhoF0> {
    if f0.is_empty() {
        return Ok(RhoF0 { value: Some(0), cover: PairCover::default() });
    }
    let pairs = candidate_pairs(&f0.universe, mode)?;
    budget::check("pair cover search", (pairs.len() as u128) * (f0.len() as u128))?;
    let len = f0.len();
    let sets: Vec<Bits> = pairs
        .iter()
        .map(|&(a, b)| Bits::from_indices(len, (0..len).filter(|&k| !preserves(&f0.filters[k], a, b))))
        .collect();
    let target = Bits::from_indices(len, 0..len);
    Ok(match min_cover(len, &target, &sets, None) {
        Cover::Optimal(idx) => RhoF0 {
            value: Some(idx.len()),
            cover: PairCover { pairs: idx.iter().map(|&i| pairs[i]).collect() },
        },
        Cover::Infeasible => RhoF0 { value: None, cover: PairCover::default() },
        Cover::ExceedsCap => unreachable!("no cap given"),
    })
}

/// ρ with F0 = F_∀ over the universe of f restricted to S.
pub fn rho_s_f0(f: &TruthTable, s: &TruthTable, mode: PairUniverse) -> Result<(SemiFilterSet, RhoF0)> {
    let uni = Universe::restricted(f, s);
    let all = enumerate_semifilters(&uni)?;
    let r = rho_f0(&all, mode)?;
    Ok((all, r))
}

/// Check that `pairs` covers every filter of `set`.
pub fn check_pair_cover(pairs: &PairCover, set: &SemiFilterSet) -> Result<()> {
    match pairs.first_uncovered(set) {
        None => Ok(()),
        Some(k) => Err(Error::NotACover(format!(
            "semi-filter {:#x} (v = {}) preserves every pair",
            set.filters[k].family,
            set.v_of(k)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_family_needs_no_pairs() {
        let f = TruthTable::from_hex(2, "8").unwrap();
        let all = enumerate_semifilters(&Universe::new(&f)).unwrap();
        assert!(all.is_empty());
        assert_eq!(rho_f0(&all, PairUniverse::All).unwrap().value, Some(0));
    }

    #[test]
    fn parity_complement_needs_pairs() {
        let f = TruthTable::from_hex(3, "69").unwrap();
        let all = enumerate_semifilters(&Universe::new(&f)).unwrap();
        let r = rho_f0(&all, PairUniverse::All).unwrap();
        let v = r.value.unwrap();
        assert!(v >= 1);
        check_pair_cover(&r.cover, &all).unwrap();
        // Every cover of the bracket-restricted universe is also a cover here.
        let rb = rho_f0(&all, PairUniverse::Brackets { size_cap: 2 }).unwrap();
        if let Some(b) = rb.value {
            assert!(b >= v);
        }
    }
}
