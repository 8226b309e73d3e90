use super::{ApproxModel, MemberId, OpRule};
use crate::connective::Connective;
use crate::error::{Error, Result};
use crate::fusion::SemiFilterSet;
use crate::truth_table::{TruthTable, MAX_VARS};
use std::collections::HashMap;
use std::sync::Arc;

/// The model of order N = n + ceil(log2 |F0|) built from a set of
/// semi-filters, with f' = f viewed over N variables.
///
/// Variables 0..n are x and n..N are the filter index y. Indices y at or
/// beyond |F0| stand for filter y mod |F0|. When F0 has two filters with
/// distinct v(F), member `id` is ḡ for the g whose table has value `id`.
#[derive(Clone, Debug)]
pub struct FusionModel {
    pub model: ApproxModel,
    pub f_prime: TruthTable,
    pub filters: SemiFilterSet,
    pub n: usize,
    pub big_n: usize,
    /// Member id of ḡ, indexed by the table value of g.
    pub member_of: Vec<MemberId>,
    /// Least table value g with ḡ = member, indexed by member id.
    pub base: Vec<u64>,
}

impl FusionModel {
    /// The filter index that y stands for.
    pub fn filter_of(&self, y: usize) -> usize {
        y % self.filters.len()
    }

    /// The least g with ḡ = member `id`.
    pub fn base_function(&self, id: MemberId) -> TruthTable {
        TruthTable::from_u64(self.n, self.base[id])
    }

    /// {(x,y) : v(y) = x}.
    pub fn diagonal(&self) -> TruthTable {
        let mask = (1usize << self.n) - 1;
        TruthTable::from_fn(self.big_n, |p| self.filters.v_of(self.filter_of(p >> self.n)) == p & mask)
    }

    /// ḡ for an arbitrary g over the base variables.
    pub fn lift(&self, g: &TruthTable) -> TruthTable {
        lift(g, &self.filters, self.big_n)
    }
}

fn lift(g: &TruthTable, f0: &SemiFilterSet, big_n: usize) -> TruthTable {
    let n = g.n();
    let mask = (1usize << n) - 1;
    let a = f0.universe.bracket(g);
    let k = f0.len();
    TruthTable::from_fn(big_n, |p| {
        let (x, y) = (p & mask, (p >> n) % k);
        if f0.v_of(y) == x {
            f0.filters[y].contains(a)
        } else {
            g.get(x)
        }
    })
}

struct FusionRule {
    member_of: Vec<MemberId>,
    base: Vec<u64>,
    members: Vec<TruthTable>,
}

impl OpRule for FusionRule {
    fn approximate(&self, conn: &Connective, _inputs: &[TruthTable], ids: &[MemberId]) -> Option<TruthTable> {
        let (a, b) = (self.base[*ids.first()?], self.base[*ids.get(1)?]);
        let g = match conn {
            Connective::And(2) => a & b,
            Connective::Or(2) => a | b,
            _ => return None,
        };
        Some(self.members[self.member_of[g as usize]].clone())
    }

    fn describe(&self) -> String {
        "fusion".into()
    }
}

/// The fusion model, requiring |V| >= 2 and two filters in F0 with
/// distinct v(F), which makes g -> ḡ injective.
pub fn gen_fusion_model(f: &TruthTable, f0: &SemiFilterSet) -> Result<FusionModel> {
    if f0.universe.v.len() < 2 {
        return Err(Error::FusionDegenerate(format!("|V| = {} < 2", f0.universe.v.len())));
    }
    let vs: Vec<usize> = (0..f0.len()).map(|k| f0.v_of(k)).collect();
    if !vs.iter().any(|v| *v != vs[0]) {
        return Err(Error::FusionDegenerate("F0 needs two filters with distinct v(F)".into()));
    }
    build(f, f0)
}

/// The fusion model when every filter of F0 has the same v(F) = x*.
///
/// Then ḡ forgets g(x*), so members are classes of functions that differ
/// only at x*. Since x* lies in V, [[g]] and the class of g∘h depend only on
/// the classes of g and h, so the connectives stay well defined.
pub fn gen_fusion_model_quotient(f: &TruthTable, f0: &SemiFilterSet) -> Result<FusionModel> {
    if f0.is_empty() {
        return Err(Error::FusionDegenerate("F0 is empty".into()));
    }
    build(f, f0)
}

fn build(f: &TruthTable, f0: &SemiFilterSet) -> Result<FusionModel> {
    let n = f.n();
    if n > 3 {
        return Err(Error::Precondition(format!("fusion models need n <= 3, got {n}")));
    }
    if f0.universe.f != *f {
        return Err(Error::FusionDegenerate("the semi-filters are over a different function".into()));
    }
    let extra = (f0.len() as u64).next_power_of_two().trailing_zeros() as usize;
    let big_n = n + extra;
    if big_n > MAX_VARS {
        return Err(Error::Precondition(format!("order {big_n} exceeds {MAX_VARS} variables")));
    }
    let mut members = Vec::new();
    let mut index = HashMap::new();
    let mut member_of = Vec::new();
    let mut base = Vec::new();
    for g in 0..1u64 << (1 << n) {
        let t = lift(&TruthTable::from_u64(n, g), f0, big_n);
        let id = *index.entry(t.clone()).or_insert_with(|| {
            members.push(t);
            base.push(g);
            members.len() - 1
        });
        member_of.push(id);
    }
    let rule = FusionRule { member_of: member_of.clone(), base: base.clone(), members: members.clone() };
    let name = format!("fusion:{}:{}", f, f0.len());
    let model = ApproxModel::from_members(big_n, &name, members, true)
        .with_rule(Arc::new(rule))
        .with_core_vars(n);
    Ok(FusionModel { model, f_prime: f.extend(big_n), filters: f0.clone(), n, big_n, member_of, base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{enumerate_semifilters, Universe};

    fn parity_filters() -> SemiFilterSet {
        let f = TruthTable::from_hex(3, "69").unwrap();
        enumerate_semifilters(&Universe::new(&f)).unwrap()
    }

    #[test]
    fn lift_fixes_constants_and_variables() {
        let f0 = parity_filters();
        assert_eq!(f0.len(), 4);
        let fm = gen_fusion_model(&f0.universe.f.clone(), &f0).unwrap();
        assert_eq!(fm.big_n, 5);
        assert_eq!(fm.model.member_count(), 256);
        assert_eq!(fm.model.member(0), TruthTable::zero(5));
        assert_eq!(fm.model.member(255), TruthTable::one(5));
        for i in 0..3 {
            assert_eq!(fm.lift(&TruthTable::var(3, i)), TruthTable::var(5, i));
            assert_eq!(fm.lift(&TruthTable::var(3, i).not()), TruthTable::var(5, i).not());
        }
        let fbar = fm.lift(&f0.universe.f);
        assert!(!fbar.intersects(&fm.diagonal()));
    }

    #[test]
    fn ops_follow_base_functions() {
        let f0 = parity_filters();
        let fm = gen_fusion_model(&f0.universe.f.clone(), &f0).unwrap();
        let id = fm.model.op(&Connective::And(2), &[0xAA, 0xCC]).unwrap();
        assert_eq!(id, 0x88);
        assert!(fm.model.op(&Connective::Not, &[3]).is_err());
    }

    #[test]
    fn single_v_needs_the_quotient() {
        let f = TruthTable::from_hex(3, "16").unwrap();
        let all = enumerate_semifilters(&Universe::new(&f)).unwrap();
        let same: Vec<_> = (0..all.len()).filter(|&k| all.v_of(k) == all.v_of(0)).map(|k| all.filters[k]).collect();
        let f0 = SemiFilterSet::new(all.universe.clone(), same).unwrap();
        assert!(gen_fusion_model(&f, &f0).is_err());
        let fm = gen_fusion_model_quotient(&f, &f0).unwrap();
        assert_eq!(fm.model.member_count(), 128);
        let e = fm.model.error_set(&Connective::Or(2), &[fm.member_of[0x10], fm.member_of[0x04]]).unwrap();
        assert!(e.delta.is_subset_of(&fm.diagonal()));
    }
}
