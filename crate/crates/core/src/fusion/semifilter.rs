use crate::error::{Error, Result};
use crate::truth_table::TruthTable;

/// Subsets of U are bitmasks over the positions of U's sorted points.
pub type Subset = u32;

pub const MAX_UNIVERSE: usize = 5;

/// U = f^-1(0) and V = f^-1(1), optionally intersected with a set S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    pub f: TruthTable,
    pub u: Vec<usize>,
    pub v: Vec<usize>,
}

impl Universe {
    pub fn new(f: &TruthTable) -> Self {
        Self::restricted(f, &TruthTable::one(f.n()))
    }

    /// Universe of the partial function f restricted to S.
    pub fn restricted(f: &TruthTable, s: &TruthTable) -> Self {
        let u = (0..f.len()).filter(|&x| s.get(x) && !f.get(x)).collect();
        let v = (0..f.len()).filter(|&x| s.get(x) && f.get(x)).collect();
        Universe { f: f.clone(), u, v }
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn size(&self) -> usize {
        self.u.len()
    }

    pub fn full(&self) -> Subset {
        ((1u64 << self.u.len()) - 1) as Subset
    }

    pub fn subset_count(&self) -> usize {
        1 << self.u.len()
    }

    /// [[g]] = g^-1(1) ∩ U.
    pub fn bracket(&self, g: &TruthTable) -> Subset {
        self.u.iter().enumerate().filter(|(_, &x)| g.get(x)).fold(0, |m, (k, _)| m | (1 << k))
    }

    /// [[x_i]] or [[¬x_i]].
    pub fn literal_bracket(&self, i: usize, positive: bool) -> Subset {
        self.u
            .iter()
            .enumerate()
            .filter(|(_, &x)| ((x >> i) & 1 == 1) == positive)
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    /// The points of U in a subset.
    pub fn points(&self, a: Subset) -> Vec<usize> {
        (0..self.u.len()).filter(|k| (a >> k) & 1 == 1).map(|k| self.u[k]).collect()
    }

    pub fn check_size(&self, cap: usize) -> Result<()> {
        if self.u.len() > cap {
            return Err(Error::Budget {
                what: format!("set families over a universe of {} points (cap {cap})", self.u.len()),
                estimate: 1u128 << (1u32 << self.u.len().min(6)).min(127),
                cap: 1u128 << (1u32 << cap).min(127),
            });
        }
        Ok(())
    }
}

/// F ⊆ P(U) as a bitmask indexed by subsets (|U| <= 5, so 32 subsets).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SemiFilter {
    pub family: u64,
}

impl SemiFilter {
    pub fn contains(&self, a: Subset) -> bool {
        (self.family >> a) & 1 == 1
    }

    pub fn is_nontrivial(&self, uni: &Universe) -> bool {
        !self.contains(0) && self.contains(uni.full())
    }

    pub fn is_monotone(&self, uni: &Universe) -> bool {
        let k = uni.size();
        (0..uni.subset_count() as Subset).all(|a| {
            !self.contains(a) || (0..k).all(|e| self.contains(a | (1 << e)))
        })
    }

    /// v(F)_i = F([[x_i]]) when F([[x_i]]) != F([[¬x_i]]) for all i.
    pub fn v(&self, uni: &Universe) -> Option<usize> {
        let mut x = 0;
        for i in 0..uni.n() {
            let a = self.contains(uni.literal_bracket(i, true));
            let b = self.contains(uni.literal_bracket(i, false));
            if a == b {
                return None;
            }
            if a {
                x |= 1 << i;
            }
        }
        Some(x)
    }
}

/// F(A)=1 and F(B)=1 imply F(A∩B)=1. A false result means (A,B) covers F.
pub fn preserves(f: &SemiFilter, a: Subset, b: Subset) -> bool {
    !(f.contains(a) && f.contains(b)) || f.contains(a & b)
}

/// A universe and semi-filters over it, each with v(F) defined and in V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiFilterSet {
    pub universe: Universe,
    pub filters: Vec<SemiFilter>,
}

impl SemiFilterSet {
    pub fn new(universe: Universe, filters: Vec<SemiFilter>) -> Result<Self> {
        for f in &filters {
            if !f.is_nontrivial(&universe) || !f.is_monotone(&universe) {
                return Err(Error::Precondition(format!("family {:#x} is not a semi-filter", f.family)));
            }
            match f.v(&universe) {
                Some(x) if universe.v.contains(&x) => {}
                _ => return Err(Error::Precondition(format!("family {:#x} has no v(F) in V", f.family))),
            }
        }
        Ok(SemiFilterSet { universe, filters })
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn v_of(&self, k: usize) -> usize {
        self.filters[k].v(&self.universe).expect("validated on construction")
    }
}

/// All monotone families on P(U), in a fixed order. Subsets are decided
/// by increasing size; a subset is forced in once one of its immediate
/// subsets is in.
pub fn monotone_families(k: usize) -> Vec<u64> {
    let mut order: Vec<Subset> = (0..(1u32 << k)).collect();
    order.sort_by_key(|a| (a.count_ones(), *a));
    let mut out = Vec::new();
    fn go(order: &[Subset], pos: usize, fam: u64, k: usize, out: &mut Vec<u64>) {
        if pos == order.len() {
            out.push(fam);
            return;
        }
        let a = order[pos];
        let forced = (0..k).any(|e| (a >> e) & 1 == 1 && (fam >> (a & !(1 << e))) & 1 == 1);
        if forced {
            go(order, pos + 1, fam | (1 << a), k, out);
        } else {
            go(order, pos + 1, fam, k, out);
            go(order, pos + 1, fam | (1 << a), k, out);
        }
    }
    go(&order, 0, 0, k, &mut out);
    out
}

/// F_∀: every semi-filter on P(U) whose v(F) is defined and lies in V.
/// U = ∅ gives the empty set (F(∅)=0 and F(U)=1 conflict).
pub fn enumerate_semifilters(uni: &Universe) -> Result<SemiFilterSet> {
    uni.check_size(MAX_UNIVERSE)?;
    if uni.size() == 0 {
        return Ok(SemiFilterSet { universe: uni.clone(), filters: vec![] });
    }
    let filters = monotone_families(uni.size())
        .into_iter()
        .map(|family| SemiFilter { family })
        .filter(|f| f.is_nontrivial(uni))
        .filter(|f| matches!(f.v(uni), Some(x) if uni.v.contains(&x)))
        .collect();
    Ok(SemiFilterSet { universe: uni.clone(), filters })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_numbers() {
        let counts: Vec<usize> = (0..=4).map(|k| monotone_families(k).len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168]);
    }

    #[test]
    fn bracket_laws() {
        let f = TruthTable::from_hex(2, "8").unwrap();
        let uni = Universe::new(&f);
        assert_eq!(uni.bracket(&f), 0);
        assert_eq!(uni.bracket(&TruthTable::one(2)), uni.full());
        let g = TruthTable::var(2, 0);
        let h = TruthTable::var(2, 1).not();
        assert_eq!(uni.bracket(&g) & uni.bracket(&h), uni.bracket(&g.and(&h)));
        assert_eq!(uni.bracket(&g) | uni.bracket(&h), uni.bracket(&g.or(&h)));
    }

    #[test]
    fn degenerate_universes() {
        let one = TruthTable::one(2);
        assert!(enumerate_semifilters(&Universe::new(&one)).unwrap().is_empty());
        let x1 = TruthTable::var(1, 0);
        // U = {0}: the only nontrivial family is {U}; [[x1]] = ∅, [[¬x1]] = U,
        // so v(F) = 0, which is not in V = {1}.
        assert!(enumerate_semifilters(&Universe::new(&x1)).unwrap().is_empty());
    }

    #[test]
    fn preservation_cases() {
        let uni = Universe::new(&TruthTable::from_hex(2, "8").unwrap());
        let f = SemiFilter { family: (1 << 0b011) | (1 << 0b101) | (1 << 0b110) | (1 << 0b111) };
        assert!(f.is_monotone(&uni) && f.is_nontrivial(&uni));
        assert!(!preserves(&f, 0b011, 0b101));
        assert!(preserves(&f, 0b001, 0b010));
        assert!(preserves(&f, uni.full(), 0b011));
    }
}
