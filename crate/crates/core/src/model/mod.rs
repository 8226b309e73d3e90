//! Approximation models: member families, approximating operations and
//! the error sets they induce.

mod exact;
mod fusion_model;
mod projective;
mod rs;

pub use exact::gen_exact_model;
pub use fusion_model::{gen_fusion_model, gen_fusion_model_quotient, FusionModel};
pub use projective::{check_0_projective, check_projective, ProjectivityVerdict};
pub use rs::{gen_rs_poly_model, RsRule};

use crate::budget;
use crate::circuit::{Circuit, Gate};
use crate::connective::Connective;
use crate::error::{Error, Result};
use crate::truth_table::TruthTable;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

pub type MemberId = usize;

/// Op-table key: connective plus input members, sorted for commutative
/// connectives so that the key is a multiset.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OpKey {
    pub conn: Connective,
    pub inputs: Vec<MemberId>,
}

impl OpKey {
    pub fn new(conn: Connective, mut inputs: Vec<MemberId>) -> Self {
        if conn.commutative() {
            inputs.sort_unstable();
        }
        OpKey { conn, inputs }
    }
}

impl Ord for OpKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.conn.name(), self.conn.arity(), &self.inputs).cmp(&(
            other.conn.name(),
            other.conn.arity(),
            &other.inputs,
        ))
    }
}

impl PartialOrd for OpKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OpKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.conn.name(), self.conn.arity())?;
        for i in &self.inputs {
            write!(f, " {i}")?;
        }
        Ok(())
    }
}

/// Computes approximating operations on demand.
pub trait OpRule: Send + Sync {
    /// The table of the approximated gate, or None if the connective is not
    /// part of the model.
    fn approximate(&self, conn: &Connective, inputs: &[TruthTable], ids: &[MemberId]) -> Option<TruthTable>;

    fn describe(&self) -> String;
}

#[derive(Clone, Default)]
struct State {
    members: Vec<TruthTable>,
    index: HashMap<TruthTable, MemberId>,
    ops: BTreeMap<OpKey, MemberId>,
}

impl State {
    fn intern(&mut self, t: TruthTable) -> MemberId {
        if let Some(&i) = self.index.get(&t) {
            return i;
        }
        self.members.push(t.clone());
        self.index.insert(t, self.members.len() - 1);
        self.members.len() - 1
    }
}

/// A legitimate approximation model of order n.
///
/// The op table is memoized behind a lock: every query for a key returns
/// the entry stored by the first writer. Models whose member family is
/// `closed` list every member up front, so member ids are canonical; lazy
/// models assign ids in discovery order.
pub struct ApproxModel {
    n: usize,
    name: String,
    state: RwLock<State>,
    rule: Option<Arc<dyn OpRule>>,
    closed: bool,
    pub neg_is_exact: bool,
    pub relaxed_vars: bool,
    /// Variables x_i with i >= core_vars need not be members.
    core_vars: usize,
}

impl Clone for ApproxModel {
    fn clone(&self) -> Self {
        ApproxModel {
            n: self.n,
            name: self.name.clone(),
            state: RwLock::new(self.state.read().unwrap().clone()),
            rule: self.rule.clone(),
            closed: self.closed,
            neg_is_exact: self.neg_is_exact,
            relaxed_vars: self.relaxed_vars,
            core_vars: self.core_vars,
        }
    }
}

impl fmt::Debug for ApproxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApproxModel({}, n={}, members={})", self.name, self.n, self.member_count())
    }
}

/// Error sets of one op-table tuple, as subsets of {0,1}^n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ErrorSetTuple {
    pub key: OpKey,
    /// The exact value of the connective on the inputs, minus the approximation.
    pub delta_plus: TruthTable,
    /// The approximation minus the exact value.
    pub delta_minus: TruthTable,
    pub delta: TruthTable,
}

impl ApproxModel {
    /// A model with the given members (deduplicated, order kept) and no
    /// rule; ops must be added with `set_op`.
    pub fn from_members(n: usize, name: &str, members: Vec<TruthTable>, closed: bool) -> Self {
        let mut st = State::default();
        for m in members {
            assert_eq!(m.n(), n);
            st.intern(m);
        }
        ApproxModel {
            n,
            name: name.to_string(),
            state: RwLock::new(st),
            rule: None,
            closed,
            neg_is_exact: false,
            relaxed_vars: false,
            core_vars: n,
        }
    }

    pub fn with_rule(mut self, rule: Arc<dyn OpRule>) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn with_core_vars(mut self, k: usize) -> Self {
        self.core_vars = k;
        self.relaxed_vars = k < self.n;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_lazy(&self) -> bool {
        self.rule.is_some()
    }

    pub fn core_vars(&self) -> usize {
        self.core_vars
    }

    pub fn member_count(&self) -> usize {
        self.state.read().unwrap().members.len()
    }

    pub fn member(&self, id: MemberId) -> TruthTable {
        self.state.read().unwrap().members[id].clone()
    }

    pub fn members(&self) -> Vec<TruthTable> {
        self.state.read().unwrap().members.clone()
    }

    pub fn member_id(&self, t: &TruthTable) -> Option<MemberId> {
        self.state.read().unwrap().index.get(t).copied()
    }

    fn require_member(&self, t: &TruthTable, what: &str) -> Result<MemberId> {
        self.member_id(t)
            .ok_or_else(|| Error::IncompleteModel(format!("{what} ({t}) is not a member")))
    }

    pub fn const_member(&self, b: bool) -> Result<MemberId> {
        self.require_member(&TruthTable::constant(self.n, b), if b { "constant 1" } else { "constant 0" })
    }

    pub fn var_member(&self, i: usize) -> Result<MemberId> {
        self.require_member(&TruthTable::var(self.n, i), &format!("x{}", i + 1))
    }

    /// Add a member (used by loaders and lazy exact models).
    pub fn intern(&self, t: TruthTable) -> MemberId {
        self.state.write().unwrap().intern(t)
    }

    /// Store an op-table entry, replacing any memoized value.
    pub fn set_op(&self, conn: Connective, inputs: Vec<MemberId>, out: MemberId) {
        let key = OpKey::new(conn, inputs);
        self.state.write().unwrap().ops.insert(key, out);
    }

    /// Memoized entries in key order.
    pub fn op_entries(&self) -> Vec<(OpKey, MemberId)> {
        self.state.read().unwrap().ops.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }

    /// The approximating operation applied to members.
    pub fn op(&self, conn: &Connective, inputs: &[MemberId]) -> Result<MemberId> {
        if conn.is_oracle() {
            return Err(Error::IncompleteModel(format!("oracle gate {conn} has no approximator")));
        }
        let key = OpKey::new(conn.clone(), inputs.to_vec());
        if let Some(&v) = self.state.read().unwrap().ops.get(&key) {
            return Ok(v);
        }
        let rule = self.rule.as_ref().ok_or_else(|| Error::IncompleteModel(key.to_string()))?;
        let tables: Vec<TruthTable> = {
            let st = self.state.read().unwrap();
            key.inputs.iter().map(|&i| st.members[i].clone()).collect()
        };
        let t = rule
            .approximate(conn, &tables, &key.inputs)
            .ok_or_else(|| Error::IncompleteModel(key.to_string()))?;
        let mut st = self.state.write().unwrap();
        if let Some(&v) = st.ops.get(&key) {
            return Ok(v);
        }
        if self.closed && !st.index.contains_key(&t) {
            return Err(Error::IncompleteModel(format!("{key} yields {t}, which is not a member")));
        }
        let id = st.intern(t);
        st.ops.insert(key, id);
        Ok(id)
    }

    /// Approximator of every gate, with `leaves[k]` standing for x_k.
    pub fn approximate_gates_with(&self, c: &Circuit, leaves: &[MemberId]) -> Result<Vec<MemberId>> {
        let mut v: Vec<MemberId> = Vec::with_capacity(c.gates().len());
        for g in c.gates() {
            let id = match g {
                Gate::Input(k) => leaves[*k],
                Gate::Const(b) => self.const_member(*b)?,
                Gate::Apply(conn, ch) => {
                    let ins: Vec<MemberId> = ch.iter().map(|&j| v[j]).collect();
                    self.op(conn, &ins)?
                }
            };
            v.push(id);
        }
        Ok(v)
    }

    pub fn approximate_gates(&self, c: &Circuit) -> Result<Vec<MemberId>> {
        let leaves = self.circuit_leaves(c)?;
        self.approximate_gates_with(c, &leaves)
    }

    fn circuit_leaves(&self, c: &Circuit) -> Result<Vec<MemberId>> {
        if c.n() != self.n {
            return Err(Error::Precondition(format!("circuit has {} variables, model order {}", c.n(), self.n)));
        }
        let used: Vec<usize> = c
            .gates()
            .iter()
            .filter_map(|g| if let Gate::Input(k) = g { Some(*k) } else { None })
            .collect();
        (0..self.n)
            .map(|i| if used.contains(&i) { self.var_member(i) } else { Ok(usize::MAX) })
            .collect()
    }

    /// The member computed by the approximating circuit.
    pub fn approximate_circuit(&self, c: &Circuit) -> Result<MemberId> {
        Ok(self.approximate_gates(c)?[c.output()])
    }

    pub fn error_set(&self, conn: &Connective, inputs: &[MemberId]) -> Result<ErrorSetTuple> {
        let out = self.op(conn, inputs)?;
        let key = OpKey::new(conn.clone(), inputs.to_vec());
        let st = self.state.read().unwrap();
        let args: Vec<&TruthTable> = key.inputs.iter().map(|&i| &st.members[i]).collect();
        let exact = conn.apply(&args);
        let approx = &st.members[out];
        Ok(ErrorSetTuple {
            delta_plus: exact.minus(approx),
            delta_minus: approx.minus(&exact),
            delta: exact.xor(approx),
            key,
        })
    }

    /// Legitimacy problems found: missing constants or variables, stored
    /// entries of the wrong arity, NOT entries that contradict
    /// `neg_is_exact`, and for closed models a tuple over `basis` with no
    /// entry.
    pub fn validate(&self, basis: &[Connective]) -> Vec<String> {
        let mut issues = Vec::new();
        for b in [false, true] {
            if let Err(e) = self.const_member(b) {
                issues.push(e.to_string());
            }
        }
        for i in 0..self.core_vars {
            if let Err(e) = self.var_member(i) {
                issues.push(e.to_string());
            }
        }
        for (k, out) in self.op_entries() {
            if k.inputs.len() != k.conn.arity() {
                issues.push(format!("{k}: arity {} with {} inputs", k.conn.arity(), k.inputs.len()));
            } else if self.neg_is_exact && k.conn == Connective::Not && self.member(out) != self.member(k.inputs[0]).not() {
                issues.push(format!("{k} -> {out} is not the exact negation"));
            }
        }
        if self.closed {
            if let Err(e) = self.enumerate_error_sets(basis, 2) {
                issues.push(e.to_string());
            }
        }
        issues
    }

    /// Every multiset tuple over the members for each connective of arity
    /// at most `arity_cap`, in key order.
    pub fn enumerate_error_sets(&self, basis: &[Connective], arity_cap: usize) -> Result<Vec<ErrorSetTuple>> {
        if !self.closed {
            return Err(Error::Precondition(
                "error sets can only be enumerated for models with a closed member family".into(),
            ));
        }
        let m = self.member_count();
        let mut conns: Vec<&Connective> = basis.iter().filter(|c| c.arity() <= arity_cap).collect();
        conns.sort_by(|a, b| (a.name(), a.arity()).cmp(&(b.name(), b.arity())));
        conns.dedup();
        let estimate: u128 = conns.iter().map(|c| multiset_count(m, c.arity())).sum();
        budget::check("error-set enumeration", estimate)?;
        let mut out = Vec::new();
        for c in conns {
            let mut ids = vec![0usize; c.arity()];
            loop {
                match self.error_set(c, &ids) {
                    Ok(e) => out.push(e),
                    Err(Error::IncompleteModel(_)) => {}
                    Err(e) => return Err(e),
                }
                if !next_multiset(&mut ids, m) {
                    break;
                }
            }
        }
        out.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(out)
    }
}

pub(crate) fn multiset_count(m: usize, k: usize) -> u128 {
    // C(m + k - 1, k)
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (m + i) as u128 / (i + 1) as u128;
    }
    r
}

/// Next non-decreasing sequence over 0..m.
pub(crate) fn next_multiset(ids: &mut [usize], m: usize) -> bool {
    let k = ids.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if ids[i] + 1 < m {
            let v = ids[i] + 1;
            for x in ids[i..].iter_mut() {
                *x = v;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connective::standard_basis;

    #[test]
    fn validate_flags_broken_models() {
        let rs = rs::gen_rs_poly_model(2, 1, 5);
        assert!(rs.validate(&standard_basis()).is_empty());

        // no constant 1 and no x2
        let thin = ApproxModel::from_members(2, "thin", vec![TruthTable::zero(2), TruthTable::var(2, 0)], false);
        assert_eq!(thin.validate(&standard_basis()).len(), 2);

        let mut bad = exact::gen_exact_model(2);
        bad.neg_is_exact = true;
        let x = bad.var_member(0).unwrap();
        let zero = bad.const_member(false).unwrap();
        bad.set_op(Connective::Not, vec![x], zero);
        let issues = bad.validate(&standard_basis());
        assert_eq!(issues.len(), 1, "{issues:?}");
        assert!(issues[0].contains("not the exact negation"));
    }

    #[test]
    fn multiset_counting() {
        assert_eq!(multiset_count(4, 2), 10);
        let mut ids = vec![0, 0];
        let mut n = 1;
        while next_multiset(&mut ids, 4) {
            n += 1;
        }
        assert_eq!(n, 10);
    }

    #[test]
    fn four_member_model_has_ten_and_tuples() {
        let n = 2;
        let members = vec![
            TruthTable::zero(n),
            TruthTable::one(n),
            TruthTable::var(n, 0),
            TruthTable::var(n, 1),
        ];
        let m = ApproxModel::from_members(n, "tiny", members, true);
        for a in 0..4 {
            for b in a..4 {
                m.set_op(Connective::And(2), vec![a, b], 0);
            }
        }
        let es = m.enumerate_error_sets(&[Connective::And(2)], 2).unwrap();
        assert_eq!(es.len(), 10);
        let e = m.error_set(&Connective::And(2), &[2, 3]).unwrap();
        assert_eq!(e.delta_plus.ones().collect::<Vec<_>>(), vec![3]);
        assert!(e.delta_minus.is_zero());
    }
}
