use super::cover::{check_pair_cover, PairCover};
use super::semifilter::{enumerate_semifilters, SemiFilter, SemiFilterSet, Subset, Universe};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::Result;
use std::collections::{BTreeMap, BTreeSet};

/// The closure F_z and the values w^k_B over the relevant family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTrace {
    /// The relevant family, ascending.
    pub family: Vec<Subset>,
    /// w[k][j] = w^k_B for B = family[j].
    pub w: Vec<Vec<bool>>,
    /// F_z over all of P(U), as a family bitmask.
    pub fz: u64,
    /// ∅ ∈ F_z.
    pub verdict: bool,
}

impl ClosureTrace {
    pub fn contains(&self, b: Subset) -> bool {
        (self.fz >> b) & 1 == 1
    }
}

/// Brackets of the literals true at z.
pub(crate) fn true_literal_brackets(uni: &Universe, z: usize) -> Vec<Subset> {
    (0..uni.n()).map(|i| uni.literal_bracket(i, (z >> i) & 1 == 1)).collect()
}

/// The pair family plus ([[x_i]], [[¬x_i]]) for every i.
fn closure_pairs(uni: &Universe, pairs: &PairCover) -> Vec<(Subset, Subset)> {
    let mut all = pairs.pairs.clone();
    all.extend((0..uni.n()).map(|i| (uni.literal_bracket(i, true), uni.literal_bracket(i, false))));
    all
}

pub(crate) fn up_close(fam: u64, k: usize) -> u64 {
    let mut fam = fam;
    for a in 0..(1u32 << k) {
        if (fam >> a) & 1 == 1 {
            for e in 0..k {
                fam |= 1 << (a | (1 << e));
            }
        }
    }
    fam
}

/// A := {A_i, B_i, A_i∩B_i} ∪ {[[x_i]], [[¬x_i]]} ∪ {∅}.
pub fn relevant_family(uni: &Universe, pairs: &PairCover) -> Vec<Subset> {
    let mut s = BTreeSet::new();
    for &(a, b) in &pairs.pairs {
        s.extend([a, b, a & b]);
    }
    for i in 0..uni.n() {
        s.insert(uni.literal_bracket(i, true));
        s.insert(uni.literal_bracket(i, false));
    }
    s.insert(0);
    s.into_iter().collect()
}

/// The least superset-closed family that contains the brackets of the
/// literals true at z and preserves every pair and every literal pair.
pub fn fz_family(uni: &Universe, pairs: &PairCover, z: usize) -> u64 {
    let k = uni.size();
    let all = closure_pairs(uni, pairs);
    let mut fam: u64 = true_literal_brackets(uni, z).iter().fold(0, |m, &b| m | (1 << b));
    loop {
        let mut next = up_close(fam, k);
        for &(a, b) in &all {
            if (next >> a) & 1 == 1 && (next >> b) & 1 == 1 {
                next |= 1 << (a & b);
            }
        }
        if next == fam {
            return fam;
        }
        fam = next;
    }
}

/// F_z, the membership verdict for ∅, and the w^k_B values for k up to |A|.
pub fn fz_closure(uni: &Universe, pairs: &PairCover, z: usize) -> ClosureTrace {
    let family = relevant_family(uni, pairs);
    let pos: BTreeMap<Subset, usize> = family.iter().enumerate().map(|(j, &b)| (b, j)).collect();
    let lits = true_literal_brackets(uni, z);
    let lit_pairs: Vec<(usize, usize)> = (0..uni.n())
        .map(|i| (pos[&uni.literal_bracket(i, true)], pos[&uni.literal_bracket(i, false)]))
        .collect();
    let mut w = vec![family.iter().map(|b| lits.contains(b)).collect::<Vec<bool>>()];
    for _ in 0..family.len() {
        let prev = w.last().unwrap();
        let lit_meet = lit_pairs.iter().any(|&(p, q)| prev[p] && prev[q]);
        let next = family
            .iter()
            .map(|&b| {
                family.iter().enumerate().any(|(j, &c)| c & b == c && prev[j])
                    || pairs.pairs.iter().any(|&(a1, b1)| a1 & b1 == b && prev[pos[&a1]] && prev[pos[&b1]])
                    || lit_meet
            })
            .collect();
        w.push(next);
    }
    let fz = fz_family(uni, pairs, z);
    ClosureTrace { family, w, fz, verdict: fz & 1 == 1 }
}

/// For each z, F_z when it is a semi-filter with v(F_z) in V. A set of
/// pairs fails to cover F_∀ exactly when one of these preserves them all.
pub fn closure_filters(uni: &Universe, pairs: &PairCover) -> Vec<SemiFilter> {
    let mut out: Vec<SemiFilter> = (0..(1usize << uni.n()))
        .map(|z| SemiFilter { family: fz_family(uni, pairs, z) })
        .filter(|f| f.is_nontrivial(uni) && matches!(f.v(uni), Some(x) if uni.v.contains(&x)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A formula over the inputs kept as a disjunction of built terms, so that
/// nested disjunctions flatten. `None` is the constant 1; an empty set is 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Dnf(pub Option<BTreeSet<usize>>);

impl Dnf {
    pub fn zero() -> Self {
        Dnf(Some(BTreeSet::new()))
    }

    pub fn one() -> Self {
        Dnf(None)
    }

    pub fn term(t: usize) -> Self {
        Dnf(Some(BTreeSet::from([t])))
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Some(s) if s.is_empty())
    }

    pub fn or_assign(&mut self, o: &Dnf) {
        match (&mut self.0, &o.0) {
            (None, _) => {}
            (_, None) => self.0 = None,
            (Some(a), Some(b)) => a.extend(b.iter().copied()),
        }
    }
}

/// Turns Dnf values into gates. With `wide` set, ∧ and ∨ use one gate of
/// any arity; otherwise balanced binary trees.
pub(crate) struct DnfBuilder {
    pub b: CircuitBuilder,
    wide: bool,
}

impl DnfBuilder {
    pub fn new(n: usize, wide: bool) -> Self {
        DnfBuilder { b: CircuitBuilder::shared(n), wide }
    }

    fn join(&mut self, and: bool, ch: Vec<usize>) -> usize {
        if self.wide {
            if and {
                self.b.and_n(ch)
            } else {
                self.b.or_n(ch)
            }
        } else {
            self.b.balanced(and, &ch)
        }
    }

    /// The gate computing a Dnf.
    pub fn node(&mut self, d: &Dnf) -> usize {
        match &d.0 {
            None => self.b.constant(true),
            Some(s) if s.is_empty() => self.b.constant(false),
            Some(s) => {
                let ch: Vec<usize> = s.iter().copied().collect();
                self.join(false, ch)
            }
        }
    }

    /// Conjunction of Dnf values as a single new term.
    pub fn and(&mut self, ds: &[&Dnf]) -> Dnf {
        if ds.iter().any(|d| d.is_zero()) {
            return Dnf::zero();
        }
        let mut ch: Vec<usize> = ds.iter().filter(|d| d.0.is_some()).map(|d| self.node(d)).collect();
        ch.sort_unstable();
        ch.dedup();
        match ch.len() {
            0 => Dnf::one(),
            1 => Dnf::term(ch[0]),
            _ => {
                let t = self.join(true, ch);
                Dnf::term(t)
            }
        }
    }

    pub fn literal(&mut self, i: usize, positive: bool) -> Dnf {
        let t = self.b.literal(i, positive);
        Dnf::term(t)
    }

    pub fn finish(mut self, d: &Dnf) -> Circuit {
        let out = self.node(d);
        self.b.finish(out)
    }
}

/// w^0 over z as Dnf values, one per family member.
pub(crate) fn literal_w0(uni: &Universe, family: &[Subset], db: &mut DnfBuilder, with_u: bool) -> Vec<Dnf> {
    family
        .iter()
        .map(|&b| {
            let mut d = Dnf::zero();
            for i in 0..uni.n() {
                for pos in [true, false] {
                    if uni.literal_bracket(i, pos) == b {
                        d.or_assign(&db.literal(i, pos));
                    }
                }
            }
            if with_u && b == uni.full() {
                d = Dnf::one();
            }
            d
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub circuit: Circuit,
    pub family_size: usize,
    /// Number of w-levels built before the values reached a fixed point.
    pub levels: usize,
}

/// The circuit computing w^{|A|}_∅ over inputs z, which decides ∅ ∈ F_z.
/// Requires `pairs` to cover F_∀ of f.
pub fn extract_circuit(uni: &Universe, pairs: &PairCover) -> Result<Extraction> {
    let all: SemiFilterSet = enumerate_semifilters(uni)?;
    check_pair_cover(pairs, &all)?;
    let family = relevant_family(uni, pairs);
    let pos: BTreeMap<Subset, usize> = family.iter().enumerate().map(|(j, &b)| (b, j)).collect();
    let mut db = DnfBuilder::new(uni.n(), false);
    let mut w = literal_w0(uni, &family, &mut db, false);
    let lit_pairs: Vec<(usize, usize)> = (0..uni.n())
        .map(|i| (pos[&uni.literal_bracket(i, true)], pos[&uni.literal_bracket(i, false)]))
        .collect();
    let mut levels = 0;
    for _ in 0..family.len() {
        let mut meet = Dnf::zero();
        for &(p, q) in &lit_pairs {
            meet.or_assign(&db.and(&[&w[p], &w[q]]));
        }
        let mut next = Vec::with_capacity(family.len());
        for &b in &family {
            let mut d = meet.clone();
            for (j, &c) in family.iter().enumerate() {
                if c & b == c {
                    d.or_assign(&w[j]);
                }
            }
            for &(a1, b1) in &pairs.pairs {
                if a1 & b1 == b {
                    let t = db.and(&[&w[pos[&a1]], &w[pos[&b1]]]);
                    d.or_assign(&t);
                }
            }
            next.push(d);
        }
        if next == w {
            break;
        }
        w = next;
        levels += 1;
    }
    let circuit = db.finish(&w[pos[&0]]);
    Ok(Extraction { circuit, family_size: family.len(), levels })
}
