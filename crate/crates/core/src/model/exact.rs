use super::{ApproxModel, MemberId, OpRule};
use crate::connective::Connective;
use crate::truth_table::{all_functions, TruthTable};
use std::sync::Arc;

struct ExactRule;

impl OpRule for ExactRule {
    fn approximate(&self, conn: &Connective, inputs: &[TruthTable], _: &[MemberId]) -> Option<TruthTable> {
        if conn.is_oracle() {
            return None;
        }
        let args: Vec<&TruthTable> = inputs.iter().collect();
        Some(conn.apply(&args))
    }

    fn describe(&self) -> String {
        "exact".into()
    }
}

/// Members are all of F_n (closed, in numeric table order) for n <= 4 and
/// are discovered lazily above that; every approximator is exact.
pub fn gen_exact_model(n: usize) -> ApproxModel {
    let (members, closed) = if n <= 4 {
        (all_functions(n), true)
    } else {
        let mut v = vec![TruthTable::zero(n), TruthTable::one(n)];
        v.extend((0..n).map(|i| TruthTable::var(n, i)));
        (v, false)
    };
    let mut m = ApproxModel::from_members(n, &format!("gen:exact:{n}"), members, closed)
        .with_rule(Arc::new(ExactRule));
    m.neg_is_exact = true;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_small_models() {
        let m1 = gen_exact_model(1);
        assert_eq!(m1.member_count(), 4);
        let m2 = gen_exact_model(2);
        let x1 = m2.var_member(0).unwrap();
        let x2 = m2.var_member(1).unwrap();
        let and = m2.op(&Connective::And(2), &[x1, x2]).unwrap();
        assert_eq!(m2.member(and).to_hex(), "8");
        let es = m2.enumerate_error_sets(&crate::connective::standard_basis(), 2).unwrap();
        assert!(es.iter().all(|e| e.delta.is_zero()));
    }

    #[test]
    fn lazy_exact_model_grows() {
        let m = gen_exact_model(5);
        let a = m.op(&Connective::And(2), &[2, 3]).unwrap();
        assert_eq!(m.member(a), TruthTable::var(5, 0).and(&TruthTable::var(5, 1)));
        assert!(!m.is_closed());
    }
}
