use super::closure::{literal_w0, true_literal_brackets, up_close, DnfBuilder, Dnf};
use super::semifilter::{Subset, Universe};
use crate::budget;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::setcover::{min_cover, Bits, Cover};
use std::collections::{BTreeMap, BTreeSet};

pub const MAX_DEPTH_UNIVERSE: usize = 4;

/// A chain F^0 ⊆ ... ⊆ F^d of families over P(U), as family bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DSemiFilter {
    pub levels: Vec<u64>,
}

impl DSemiFilter {
    /// The d of a d-semifilter: one less than the number of levels.
    pub fn d(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn contains(&self, k: usize, a: Subset) -> bool {
        (self.levels[k] >> a) & 1 == 1
    }

    /// v(F) from the initial sets, if defined.
    pub fn v(&self, uni: &Universe) -> Option<usize> {
        let mut x = 0;
        for i in 0..uni.n() {
            let a = self.contains(0, uni.literal_bracket(i, true));
            if a == self.contains(0, uni.literal_bracket(i, false)) {
                return None;
            }
            if a {
                x |= 1 << i;
            }
        }
        Some(x)
    }

    /// Chain, F^d(∅) = 0, F^0(U) = 1, initial sets, d-monotonicity, v ∈ V.
    pub fn is_valid(&self, uni: &Universe) -> bool {
        let d = self.d();
        let k = uni.size();
        self.levels.windows(2).all(|w| w[0] & !w[1] == 0)
            && !self.contains(d, 0)
            && self.contains(0, uni.full())
            && (1..=d).all(|j| up_close(self.levels[j - 1], k) & !self.levels[j] == 0)
            && matches!(self.v(uni), Some(x) if uni.v.contains(&x))
    }
}

/// F^{k-1}(A_i) = 1 for all i implies F^k(∩ A_i) = 1.
pub fn k_preserves(f: &DSemiFilter, k: usize, tuple: &[Subset]) -> bool {
    assert!(k >= 1 && k <= f.d());
    let meet = tuple.iter().fold(Subset::MAX, |m, &a| m & a);
    !tuple.iter().all(|&a| f.contains(k - 1, a)) || f.contains(k, meet)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSemiFilterSet {
    pub universe: Universe,
    pub d: usize,
    pub filters: Vec<DSemiFilter>,
}

impl DSemiFilterSet {
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }
}

/// Every d-semifilter with v(F) ∈ V. Each subset A gets the first level
/// it enters (or none), decided by increasing size so that d-monotonicity
/// is checked against all of A's subsets.
pub fn enumerate_dsemifilters(uni: &Universe, d: usize) -> Result<DSemiFilterSet> {
    if uni.size() > MAX_DEPTH_UNIVERSE {
        return Err(Error::Budget {
            what: format!("d-semifilters over {} points (cap {MAX_DEPTH_UNIVERSE})", uni.size()),
            estimate: u128::MAX,
            cap: budget::global(),
        });
    }
    if d == 0 {
        return Err(Error::Precondition("d-semifilters need d >= 1".into()));
    }
    let empty = DSemiFilterSet { universe: uni.clone(), d, filters: vec![] };
    if uni.size() == 0 {
        return Ok(empty);
    }
    let subsets = uni.subset_count();
    let estimate = ((d + 2) as u128).saturating_pow((subsets - 2) as u32);
    budget::check("d-semifilter enumeration", estimate)?;
    let mut order: Vec<Subset> = (1..subsets as Subset - 1).collect();
    order.sort_by_key(|a| (a.count_ones(), *a));
    let never = d + 1;
    let mut entry = vec![never; subsets];
    entry[uni.full() as usize] = 0;
    let mut out = Vec::new();
    fn go(
        uni: &Universe,
        d: usize,
        order: &[Subset],
        pos: usize,
        entry: &mut Vec<usize>,
        out: &mut Vec<DSemiFilter>,
    ) {
        if pos == order.len() {
            let levels: Vec<u64> = (0..=d)
                .map(|k| (0..entry.len()).filter(|&a| entry[a] <= k).fold(0u64, |m, a| m | (1 << a)))
                .collect();
            let f = DSemiFilter { levels };
            if matches!(f.v(uni), Some(x) if uni.v.contains(&x)) {
                out.push(f);
            }
            return;
        }
        let a = order[pos];
        // A ⊇ B with B at level j < d puts A at level <= j + 1.
        let mut cap = d + 1;
        for b in 1..a {
            if b & a == b && entry[b as usize] < d {
                cap = cap.min(entry[b as usize] + 1);
            }
        }
        for e in (0..=d + 1).filter(|&e| e <= cap) {
            entry[a as usize] = e;
            go(uni, d, order, pos + 1, entry, out);
        }
        entry[a as usize] = d + 1;
    }
    go(uni, d, &order, 0, &mut entry, &mut out);
    // Re-check every condition on the finished chains.
    out.retain(|f| f.is_valid(uni));
    out.sort();
    Ok(DSemiFilterSet { filters: out, ..empty })
}

/// Tuples (A_1, .., A_t) of subsets of U, each sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TupleCover {
    pub tuples: Vec<Vec<Subset>>,
}

impl TupleCover {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Some tuple k-covers F for some 1 <= k <= F's d.
    pub fn covers(&self, f: &DSemiFilter) -> bool {
        self.tuples.iter().any(|t| (1..=f.d()).any(|k| !k_preserves(f, k, t)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoDepth {
    pub value: Option<usize>,
    pub cover: TupleCover,
}

/// Multisets of t subsets of U in lexicographic order.
pub fn candidate_tuples(uni: &Universe, t: usize) -> Vec<Vec<Subset>> {
    let m = uni.subset_count();
    let mut out = Vec::new();
    let mut cur = vec![0usize; t];
    loop {
        out.push(cur.iter().map(|&a| a as Subset).collect());
        if !crate::model::next_multiset(&mut cur, m) {
            break;
        }
    }
    out
}

/// ρ_{F0,d,t}: the minimum number of t-tuples such that each F in F0 (a
/// set of (d-1)-semifilters) is k-covered by one of them for some k < d.
pub fn rho_f0_d_t(f0: &DSemiFilterSet, d: usize, t: usize) -> Result<RhoDepth> {
    if f0.d + 1 != d {
        return Err(Error::Precondition(format!("ρ at depth {d} needs {}-semifilters, got {}", d - 1, f0.d)));
    }
    if f0.is_empty() {
        return Ok(RhoDepth { value: Some(0), cover: TupleCover::default() });
    }
    let tuples = candidate_tuples(&f0.universe, t);
    budget::check("tuple cover search", tuples.len() as u128 * f0.len() as u128)?;
    let len = f0.len();
    let sets: Vec<Bits> = tuples
        .iter()
        .map(|tp| {
            let one = TupleCover { tuples: vec![tp.clone()] };
            Bits::from_indices(len, (0..len).filter(|&k| one.covers(&f0.filters[k])))
        })
        .collect();
    Ok(match min_cover(len, &Bits::from_indices(len, 0..len), &sets, None) {
        Cover::Optimal(idx) => RhoDepth {
            value: Some(idx.len()),
            cover: TupleCover { tuples: idx.iter().map(|&i| tuples[i].clone()).collect() },
        },
        _ => RhoDepth { value: None, cover: TupleCover::default() },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthClosureTrace {
    pub family: Vec<Subset>,
    /// w[k][j] = w^k_B for B = family[j], k = 0..d-1.
    pub w: Vec<Vec<bool>>,
    /// F^k_z over all of P(U), k = 0..d-1.
    pub levels: Vec<u64>,
    /// ∅ ∈ F^{d-1}_z.
    pub verdict: bool,
}

/// A := tuple members and meets, literal brackets, ∅ and U.
pub fn depth_family(uni: &Universe, tuples: &TupleCover) -> Vec<Subset> {
    let mut s = BTreeSet::new();
    for t in &tuples.tuples {
        s.extend(t.iter().copied());
        s.insert(t.iter().fold(uni.full(), |m, &a| m & a));
    }
    for i in 0..uni.n() {
        s.insert(uni.literal_bracket(i, true));
        s.insert(uni.literal_bracket(i, false));
    }
    s.insert(0);
    s.insert(uni.full());
    s.into_iter().collect()
}

fn meet(uni: &Universe, t: &[Subset]) -> Subset {
    t.iter().fold(uni.full(), |m, &a| m & a)
}

/// The cover's tuples plus the literal pairs ([[x_i]], [[¬x_i]]). Without
/// the literal pairs a closure can hold both brackets of some x_i while
/// missing ∅, and then it has no v(F) and certifies nothing.
fn closure_tuples(uni: &Universe, tuples: &TupleCover) -> Vec<Vec<Subset>> {
    let mut all = tuples.tuples.clone();
    all.extend((0..uni.n()).map(|i| vec![uni.literal_bracket(i, true), uni.literal_bracket(i, false)]));
    all
}

/// F^0_z ⊆ .. ⊆ F^{d-1}_z, where each level adds supersets and the meets
/// of tuples (and literal pairs) lying in the previous level.
pub fn fz_depth_closure(uni: &Universe, tuples: &TupleCover, d: usize, z: usize) -> DepthClosureTrace {
    let k = uni.size();
    let all = closure_tuples(uni, tuples);
    let mut levels = vec![true_literal_brackets(uni, z).iter().fold(1u64 << uni.full(), |m, &b| m | (1 << b))];
    for _ in 1..d {
        let prev = *levels.last().unwrap();
        let mut next = up_close(prev, k);
        for t in &all {
            if t.iter().all(|&a| (prev >> a) & 1 == 1) {
                next |= 1 << meet(uni, t);
            }
        }
        levels.push(next);
    }
    let family = depth_family(uni, tuples);
    let lits = true_literal_brackets(uni, z);
    let mut w = vec![family.iter().map(|&b| lits.contains(&b) || b == uni.full()).collect::<Vec<bool>>()];
    let pos: BTreeMap<Subset, usize> = family.iter().enumerate().map(|(j, &b)| (b, j)).collect();
    for _ in 1..d {
        let prev = w.last().unwrap();
        let next = family
            .iter()
            .map(|&b| {
                family.iter().enumerate().any(|(j, &c)| c & b == c && prev[j])
                    || all.iter().any(|t| meet(uni, t) == b && t.iter().all(|a| prev[pos[a]]))
            })
            .collect();
        w.push(next);
    }
    let verdict = levels[d - 1] & 1 == 1;
    DepthClosureTrace { family, w, levels, verdict }
}

#[derive(Clone, Debug)]
pub struct DepthExtraction {
    pub circuit: Circuit,
    pub depth: usize,
    pub size: usize,
    pub max_fan_in: usize,
}

/// The circuit computing w^{d-1}_∅ with wide ∧/∨ gates. Requires `tuples`
/// to cover every (d-1)-semifilter of f.
pub fn extract_depth_circuit(uni: &Universe, tuples: &TupleCover, d: usize) -> Result<DepthExtraction> {
    if d < 2 {
        return Err(Error::Precondition("depth fusion needs d >= 2".into()));
    }
    let all = enumerate_dsemifilters(uni, d - 1)?;
    if let Some(f) = all.filters.iter().find(|f| !tuples.covers(f)) {
        return Err(Error::NotACover(format!("{}-semifilter {:x?} is not k-covered", d - 1, f.levels)));
    }
    let family = depth_family(uni, tuples);
    let pos: BTreeMap<Subset, usize> = family.iter().enumerate().map(|(j, &b)| (b, j)).collect();
    let all = closure_tuples(uni, tuples);
    let mut db = DnfBuilder::new(uni.n(), true);
    let mut w = literal_w0(uni, &family, &mut db, true);
    for _ in 1..d {
        let mut next: Vec<Dnf> = Vec::with_capacity(family.len());
        for &b in &family {
            let mut acc = Dnf::zero();
            for (j, &c) in family.iter().enumerate() {
                if c & b == c {
                    acc.or_assign(&w[j]);
                }
            }
            for t in &all {
                if meet(uni, t) == b {
                    let args: Vec<&Dnf> = t.iter().map(|a| &w[pos[a]]).collect();
                    let term = db.and(&args);
                    acc.or_assign(&term);
                }
            }
            next.push(acc);
        }
        w = next;
    }
    let circuit = db.finish(&w[pos[&0]]);
    let max_fan_in = circuit
        .gates()
        .iter()
        .map(|g| if let Gate::Apply(_, ch) = g { ch.len() } else { 0 })
        .max()
        .unwrap_or(0);
    Ok(DepthExtraction { depth: circuit.depth(), size: circuit.size(), max_fan_in, circuit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::enumerate_semifilters;
    use crate::truth_table::TruthTable;

    #[test]
    fn constant_chains_are_semifilters() {
        for hex in ["69", "16"] {
            let f = TruthTable::from_hex(3, hex).unwrap();
            let uni = Universe::new(&f);
            if uni.size() > MAX_DEPTH_UNIVERSE {
                continue;
            }
            let sf = enumerate_semifilters(&uni).unwrap();
            let ds = enumerate_dsemifilters(&uni, 1).unwrap();
            let flat = ds.filters.iter().filter(|c| c.levels[0] == c.levels[1]).count();
            assert_eq!(flat, sf.len());
        }
    }

    #[test]
    fn vacuous_preservation() {
        let f = DSemiFilter { levels: vec![0b1000_0000, 0b1100_0000] };
        assert!(k_preserves(&f, 1, &[0b001, 0b010]));
    }

    #[test]
    fn enumerated_chains_are_valid() {
        let f = TruthTable::from_hex(2, "8").unwrap();
        let uni = Universe::new(&f);
        let ds = enumerate_dsemifilters(&uni, 2).unwrap();
        assert!(!ds.is_empty());
        assert!(ds.filters.iter().all(|c| c.is_valid(&uni)));
    }

    #[test]
    fn extraction_decides_every_two_variable_function() {
        for code in 1..15u64 {
            let f = TruthTable::from_fn(2, |x| (code >> x) & 1 == 1);
            let uni = Universe::new(&f);
            let d = 2;
            let ds = enumerate_dsemifilters(&uni, d - 1).unwrap();
            let r = rho_f0_d_t(&ds, d, 2).unwrap();
            let ex = extract_depth_circuit(&uni, &r.cover, d).unwrap();
            assert_eq!(ex.circuit.truth_table(), f, "f = {code:x}");
        }
    }
}
